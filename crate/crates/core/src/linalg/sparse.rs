//! Sparse elimination computing ranks and invariant factors.
//!
//! Pivots are taken greedily from short rows. Over Z a pivot must divide every
//! entry of its row and column, so removing it records an honest diagonal
//! entry; whatever is left without such a pivot goes to the dense Smith form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::domain::Zz;
use super::ring::{bigint_mod, mod_inverse, RingSpec, Scalar};
use super::snf::{dense_snf, normalize_diagonal};
use super::Matrix;

trait Elim {
    type E: Clone;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    fn divides(&self, p: &Self::E, a: &Self::E) -> bool;
    fn quo(&self, a: &Self::E, p: &Self::E) -> Self::E;
    /// `a - q * b`, or `None` on overflow.
    fn sub_mul(&self, a: &Self::E, q: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn neg_mul(&self, q: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn to_big(&self, a: &Self::E) -> BigInt;
    fn size(&self, a: &Self::E) -> u128;
}

struct SmallZ;
impl Elim for SmallZ {
    type E = i128;
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &i128) -> bool {
        *a == 1 || *a == -1
    }
    fn divides(&self, p: &i128, a: &i128) -> bool {
        a % p == 0
    }
    fn quo(&self, a: &i128, p: &i128) -> i128 {
        a / p
    }
    fn sub_mul(&self, a: &i128, q: &i128, b: &i128) -> Option<i128> {
        a.checked_sub(q.checked_mul(*b)?)
    }
    fn neg_mul(&self, q: &i128, b: &i128) -> Option<i128> {
        q.checked_mul(*b)?.checked_neg()
    }
    fn to_big(&self, a: &i128) -> BigInt {
        BigInt::from(*a)
    }
    fn size(&self, a: &i128) -> u128 {
        a.unsigned_abs()
    }
}

struct BigZ;
impl Elim for BigZ {
    type E = BigInt;
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn divides(&self, p: &BigInt, a: &BigInt) -> bool {
        (a % p).is_zero()
    }
    fn quo(&self, a: &BigInt, p: &BigInt) -> BigInt {
        a / p
    }
    fn sub_mul(&self, a: &BigInt, q: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - q * b)
    }
    fn neg_mul(&self, q: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(-(q * b))
    }
    fn to_big(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
    fn size(&self, a: &BigInt) -> u128 {
        a.abs().to_u128().unwrap_or(u128::MAX)
    }
}

struct FpE(u64);
impl Elim for FpE {
    type E = u64;
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn divides(&self, p: &u64, _a: &u64) -> bool {
        *p != 0
    }
    fn quo(&self, a: &u64, p: &u64) -> u64 {
        (*a as u128 * mod_inverse(*p, self.0) as u128 % self.0 as u128) as u64
    }
    fn sub_mul(&self, a: &u64, q: &u64, b: &u64) -> Option<u64> {
        let m = self.0 as u128;
        let qb = *q as u128 * *b as u128 % m;
        Some(((*a as u128 + m - qb) % m) as u64)
    }
    fn neg_mul(&self, q: &u64, b: &u64) -> Option<u64> {
        self.sub_mul(&0, q, b)
    }
    fn to_big(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
    fn size(&self, _a: &u64) -> u128 {
        1
    }
}

struct QE;
impl Elim for QE {
    type E = Scalar;
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &Scalar) -> bool {
        !a.is_zero()
    }
    fn divides(&self, p: &Scalar, _a: &Scalar) -> bool {
        !p.is_zero()
    }
    fn quo(&self, a: &Scalar, p: &Scalar) -> Scalar {
        a / p
    }
    fn sub_mul(&self, a: &Scalar, q: &Scalar, b: &Scalar) -> Option<Scalar> {
        Some(a - q * b)
    }
    fn neg_mul(&self, q: &Scalar, b: &Scalar) -> Option<Scalar> {
        Some(-(q * b))
    }
    fn to_big(&self, a: &Scalar) -> BigInt {
        a.to_integer()
    }
    fn size(&self, a: &Scalar) -> u128 {
        (a.numer().abs() + a.denom()).to_u128().unwrap_or(u128::MAX)
    }
}

type Row<E> = Vec<(u32, E)>;

struct State<E> {
    rows: Vec<Row<E>>,
    alive: Vec<bool>,
    col_rows: Vec<Vec<u32>>,
    col_alive: Vec<bool>,
    rank: usize,
    diag: Vec<BigInt>,
}

fn entry<E>(row: &Row<E>, c: u32) -> Option<&E> {
    row.binary_search_by_key(&c, |(j, _)| *j).ok().map(|k| &row[k].1)
}

/// `row_i - q * row_r`, dropping zeros.
fn combine<R: Elim>(r: &R, a: &Row<R::E>, q: &R::E, b: &Row<R::E>) -> Option<Row<R::E>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, r.neg_mul(q, &b[j].1)?));
            j += 1;
        } else {
            let v = r.sub_mul(&a[i].1, q, &b[j].1)?;
            if !r.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

impl<E: Clone> State<E> {
    fn new(rows: Vec<Row<E>>, ncols: usize) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c as usize].push(i as u32);
            }
        }
        let n = rows.len();
        State { rows, alive: vec![true; n], col_rows, col_alive: vec![true; ncols], rank: 0, diag: Vec::new() }
    }

    fn rows_with_col(&self, c: u32) -> Vec<u32> {
        let mut v: Vec<u32> = self.col_rows[c as usize]
            .iter()
            .copied()
            .filter(|&i| self.alive[i as usize] && entry(&self.rows[i as usize], c).is_some())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Removes pivot `(r, c)`; returns rows that changed, or `None` on overflow.
    fn eliminate<R: Elim<E = E>>(&mut self, ring: &R, r: usize, c: u32) -> Option<Vec<u32>> {
        let piv = entry(&self.rows[r], c).unwrap().clone();
        let prow = std::mem::take(&mut self.rows[r]);
        self.alive[r] = false;
        let targets: Vec<u32> = self.rows_with_col(c);
        for &i in &targets {
            let a = entry(&self.rows[i as usize], c).unwrap().clone();
            let q = ring.quo(&a, &piv);
            let new = combine(ring, &self.rows[i as usize], &q, &prow)?;
            for (col, _) in &new {
                if entry(&self.rows[i as usize], *col).is_none() {
                    self.col_rows[*col as usize].push(i);
                }
            }
            self.rows[i as usize] = new;
        }
        self.col_alive[c as usize] = false;
        self.col_rows[c as usize].clear();
        self.rank += 1;
        if !ring.is_unit(&piv) {
            self.diag.push(ring.to_big(&piv));
        }
        Some(targets)
    }
}

fn pick_unit<R: Elim>(ring: &R, st: &State<R::E>, r: usize) -> Option<u32> {
    st.rows[r]
        .iter()
        .filter(|(_, v)| ring.is_unit(v))
        .min_by_key(|(c, v)| (ring.size(v), st.col_rows[*c as usize].len()))
        .map(|(c, _)| *c)
}

fn run<R: Elim>(ring: &R, rows: Vec<Row<R::E>>, ncols: usize, exact_z: bool) -> Option<(usize, Vec<BigInt>, Vec<Row<R::E>>)> {
    let mut st = State::new(rows, ncols);
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = BinaryHeap::new();
    for (i, row) in st.rows.iter().enumerate() {
        if !row.is_empty() {
            heap.push(Reverse((row.len(), i as u32)));
        }
    }
    loop {
        while let Some(Reverse((len, i))) = heap.pop() {
            let i = i as usize;
            if !st.alive[i] || st.rows[i].len() != len || len == 0 {
                continue;
            }
            if let Some(c) = pick_unit(ring, &st, i) {
                let changed = st.eliminate(ring, i, c)?;
                for t in changed {
                    let l = st.rows[t as usize].len();
                    if l > 0 {
                        heap.push(Reverse((l, t)));
                    }
                }
            }
        }
        if !exact_z {
            break;
        }
        // a non-unit pivot dividing its whole row and column
        let mut found = None;
        'outer: for i in 0..st.rows.len() {
            if !st.alive[i] || st.rows[i].is_empty() {
                continue;
            }
            let mut cands: Vec<&(u32, R::E)> = st.rows[i].iter().collect();
            cands.sort_by_key(|(_, v)| ring.size(v));
            for (c, v) in cands {
                if !st.rows[i].iter().all(|(_, w)| ring.divides(v, w)) {
                    continue;
                }
                let ok = st.rows_with_col(*c).iter().all(|&t| ring.divides(v, entry(&st.rows[t as usize], *c).unwrap()));
                if ok {
                    found = Some((i, *c));
                    break 'outer;
                }
            }
        }
        match found {
            Some((i, c)) => {
                let changed = st.eliminate(ring, i, c)?;
                for t in changed {
                    let l = st.rows[t as usize].len();
                    if l > 0 {
                        heap.push(Reverse((l, t)));
                    }
                }
            }
            None => break,
        }
    }
    let rest: Vec<Row<R::E>> = st
        .rows
        .into_iter()
        .zip(st.alive)
        .filter(|(r, a)| *a && !r.is_empty())
        .map(|(r, _)| r)
        .collect();
    Some((st.rank, st.diag, rest))
}

fn dense_remainder(rows: &[Row<BigInt>]) -> (usize, Vec<BigInt>) {
    if rows.is_empty() {
        return (0, vec![]);
    }
    let mut cols: Vec<u32> = rows.iter().flat_map(|r| r.iter().map(|(c, _)| *c)).collect();
    cols.sort_unstable();
    cols.dedup();
    let a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![BigInt::zero(); cols.len()];
            for (c, x) in r {
                v[cols.binary_search(c).unwrap()] = x.clone();
            }
            v
        })
        .collect();
    let s = dense_snf(&Zz, a, rows.len(), cols.len(), false);
    (s.diag.len(), s.diag)
}

/// Rank and the nontrivial invariant factors (over Z only).
pub(crate) fn rank_and_factors(m: &Matrix) -> (usize, Vec<BigInt>) {
    let nrows = m.rows();
    let mut rows_idx: Vec<Vec<(u32, &Scalar)>> = vec![Vec::new(); nrows];
    for j in 0..m.cols() {
        for (i, v) in m.column(j) {
            rows_idx[*i].push((j as u32, v));
        }
    }
    match m.ring() {
        RingSpec::PrimeField(p) => {
            let p = p.get();
            let rows = rows_idx
                .iter()
                .map(|r| r.iter().map(|(c, v)| (*c, bigint_mod(v.numer(), p))).collect())
                .collect();
            let (rank, _, _) = run(&FpE(p), rows, m.cols(), false).unwrap();
            (rank, vec![])
        }
        RingSpec::Rationals => {
            let rows = rows_idx.iter().map(|r| r.iter().map(|(c, v)| (*c, (*v).clone())).collect()).collect();
            let (rank, _, _) = run(&QE, rows, m.cols(), false).unwrap();
            (rank, vec![])
        }
        RingSpec::Integers => {
            let small: Option<Vec<Row<i128>>> = rows_idx
                .iter()
                .map(|r| r.iter().map(|(c, v)| v.numer().to_i128().map(|x| (*c, x))).collect())
                .collect();
            let attempt = small.and_then(|rows| run(&SmallZ, rows, m.cols(), true));
            let (rank, diag, rest): (usize, Vec<BigInt>, Vec<Row<BigInt>>) = match attempt {
                Some((r, d, rest)) => {
                    (r, d, rest.into_iter().map(|row| row.into_iter().map(|(c, x)| (c, BigInt::from(x))).collect()).collect())
                }
                None => {
                    let rows = rows_idx.iter().map(|r| r.iter().map(|(c, v)| (*c, v.to_integer())).collect()).collect();
                    run(&BigZ, rows, m.cols(), true).unwrap()
                }
            };
            let (r2, d2) = dense_remainder(&rest);
            let mut all = diag;
            all.extend(d2);
            (rank + r2, normalize_diagonal(all))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::snf::smith_normal_form;

    #[test]
    fn agrees_with_dense_on_fixed_matrix() {
        let z = RingSpec::Integers;
        let m = Matrix::from_i64(z, &[&[2, 4, 4, 0], &[-6, 6, 12, 2], &[10, -4, -16, 4], &[1, 1, 1, 1]]);
        let (r, f) = rank_and_factors(&m);
        let s = smith_normal_form(&m);
        assert_eq!(r, s.rank());
        let dense: Vec<BigInt> = s.diagonal.iter().map(|x| x.to_integer()).filter(|x| !x.is_one()).collect();
        assert_eq!(f, dense);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let z = RingSpec::Integers;
        let big = i64::MAX;
        let m = Matrix::from_i64(z, &[&[big, big - 1, 1], &[big - 1, big, 1], &[3, 5, 1]]);
        let (r, f) = rank_and_factors(&m);
        let s = smith_normal_form(&m);
        assert_eq!(r, s.rank());
        let dense: Vec<BigInt> = s.diagonal.iter().map(|x| x.to_integer()).filter(|x| !x.is_one()).collect();
        assert_eq!(f, dense);
    }
}
