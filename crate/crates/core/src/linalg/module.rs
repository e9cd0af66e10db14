use std::fmt;

use num_bigint::BigInt;

use super::ring::RingSpec;
use super::snf::normalize_diagonal;

/// A finitely generated module `k^free ⊕ ⊕ k/(t_i)` in invariant-factor form.
///
/// Torsion only occurs over Z; the factors are `> 1` and each divides the next.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgModule {
    ring: RingSpec,
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgModule {
    pub fn new(ring: RingSpec, free_rank: usize, torsion: Vec<BigInt>) -> Self {
        let torsion = if ring.is_field() { vec![] } else { normalize_diagonal(torsion) };
        FgModule { ring, free_rank, torsion }
    }

    pub fn zero(ring: RingSpec) -> Self {
        FgModule::new(ring, 0, vec![])
    }

    pub fn free(ring: RingSpec, rank: usize) -> Self {
        FgModule::new(ring, rank, vec![])
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Number of cyclic summands in invariant-factor form.
    pub fn num_generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn direct_sum(&self, other: &FgModule) -> FgModule {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        FgModule::new(self.ring, self.free_rank + other.free_rank, t)
    }

    /// The underlying abelian group: `F_p^d` becomes `(Z/p)^d`, Z-modules are unchanged.
    /// Over Q the rank is kept and the ring stays Q.
    pub fn as_abelian_group(&self) -> FgModule {
        match self.ring {
            RingSpec::PrimeField(p) => {
                FgModule::new(RingSpec::Integers, 0, vec![BigInt::from(p.get()); self.free_rank])
            }
            _ => self.clone(),
        }
    }

    /// Elementary divisor multiset `{p^e}` of the torsion part.
    pub fn primary_parts(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for t in &self.torsion {
            let mut n: u64 = t.try_into().expect("torsion order fits in u64");
            let mut p = 2u64;
            while n > 1 {
                if p * p > n {
                    out.push((n, 1));
                    break;
                }
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
                p += 1;
            }
        }
        out.sort();
        out
    }

    pub fn parse(ring: RingSpec, s: &str) -> Option<FgModule> {
        let s = s.trim();
        if s == "0" {
            return Some(FgModule::zero(ring));
        }
        let mut free = 0;
        let mut tors = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().ok()?),
                None => (part, 1),
            };
            let base = base.trim_start_matches('(').trim_end_matches(')');
            if let Some(ord) = base.strip_prefix("Z/") {
                let o: BigInt = ord.parse().ok()?;
                tors.extend(std::iter::repeat_n(o, exp));
            } else {
                free += exp;
            }
        }
        Some(FgModule::new(ring, free, tors))
    }
}

fn base_name(ring: RingSpec) -> String {
    match ring {
        RingSpec::Integers => "Z".into(),
        RingSpec::Rationals => "Q".into(),
        RingSpec::PrimeField(p) => format!("F_{}", p.get()),
    }
}

impl fmt::Display for FgModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push(base_name(self.ring));
        } else if self.free_rank > 1 {
            parts.push(format!("{}^{}", base_name(self.ring), self.free_rank));
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("Z/{}", self.torsion[i]));
            } else {
                parts.push(format!("(Z/{})^{}", self.torsion[i], j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}
