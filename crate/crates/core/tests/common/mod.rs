#![allow(dead_code)]

use derham_core::complexes::ChainComplex;
use derham_core::linalg::{int, invariant_factors, rank, Matrix, RingSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero complex `Z^n --d--> Z^m` in degrees 1, 0 with `n, m ≤ 2` and small entries.
pub fn random_two_term(rng: &mut impl Rng) -> ChainComplex {
    loop {
        let m = rng.gen_range(0..=2usize);
        let n = rng.gen_range(0..=2usize);
        if m + n == 0 {
            continue;
        }
        let rows: Vec<Vec<_>> = (0..m).map(|_| (0..n).map(|_| int(rng.gen_range(-3i64..=3))).collect()).collect();
        let d = Matrix::from_rows_sized(RingSpec::Integers, m, n, rows).unwrap();
        let mut ranks = std::collections::BTreeMap::new();
        ranks.insert(0, m);
        ranks.insert(1, n);
        let mut ds = std::collections::BTreeMap::new();
        if m > 0 && n > 0 {
            ds.insert(1, d);
        }
        return ChainComplex::new(RingSpec::Integers, ranks, ds).unwrap();
    }
}

/// Tor-amplitude `[a, b]` of a two-term complex of free Z-modules in degrees 1, 0.
///
/// `a = 1` exactly when `d` is surjective; `b = 0` exactly when `d` is a split injection.
pub fn tor_amplitude(c: &ChainComplex) -> (i32, i32) {
    let d = c.differential(1);
    let (m, n) = (c.rank(0), c.rank(1));
    let r = rank(&d);
    let unimodular = invariant_factors(&d).iter().all(|f| *f == int(1) || *f == int(-1));
    let surjective = r == m && unimodular;
    let split_injective = r == n && unimodular;
    let a = if surjective { 1 } else { 0 };
    let b = if split_injective { 0 } else { 1 };
    (a, b.max(a))
}

/// Prints the one-line verdict for an acceptance criterion and returns whether it passed.
pub fn verdict(id: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id}: {} | tolerance: exact | {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
