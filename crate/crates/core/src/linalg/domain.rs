//! Typed scalar arithmetic used by the dense and sparse elimination kernels.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ring::{bigint_mod, int, mod_inverse, RingSpec, Scalar};

pub(crate) trait Domain: Clone + Send + Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn is_unit(&self, a: &Self::E) -> bool;
    /// Euclidean size; only compared between nonzero elements.
    fn size(&self, a: &Self::E) -> BigInt;
    /// Quotient of the Euclidean division `a = q b + r`.
    fn quo(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// A unit `u` with `u * a` in canonical form, and its inverse.
    fn canonical_unit(&self, a: &Self::E) -> (Self::E, Self::E);
    fn from_scalar(&self, s: &Scalar) -> Self::E;
    fn to_scalar(&self, a: &Self::E) -> Scalar;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Zz;

impl Domain for Zz {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn size(&self, a: &BigInt) -> BigInt {
        a.abs()
    }
    fn quo(&self, a: &BigInt, b: &BigInt) -> BigInt {
        // rounded division keeps remainders small: |r| <= |b|/2
        let (q, r) = a.div_mod_floor(b);
        if (&r + &r).abs() > b.abs() {
            q + 1
        } else {
            q
        }
    }
    fn canonical_unit(&self, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_negative() {
            (-BigInt::one(), -BigInt::one())
        } else {
            (BigInt::one(), BigInt::one())
        }
    }
    fn from_scalar(&self, s: &Scalar) -> BigInt {
        s.to_integer()
    }
    fn to_scalar(&self, a: &BigInt) -> Scalar {
        int(a.clone())
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Qq;

impl Domain for Qq {
    type E = Scalar;
    fn zero(&self) -> Scalar {
        Scalar::zero()
    }
    fn one(&self) -> Scalar {
        Scalar::one()
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }
    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }
    fn is_unit(&self, a: &Scalar) -> bool {
        !a.is_zero()
    }
    fn size(&self, a: &Scalar) -> BigInt {
        // prefer pivots with small height to limit coefficient growth
        a.numer().abs() + a.denom()
    }
    fn quo(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a / b
    }
    fn canonical_unit(&self, a: &Scalar) -> (Scalar, Scalar) {
        (a.recip(), a.clone())
    }
    fn from_scalar(&self, s: &Scalar) -> Scalar {
        s.clone()
    }
    fn to_scalar(&self, a: &Scalar) -> Scalar {
        a.clone()
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp(pub u64);

impl Domain for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + (self.0 - *b) as u128) % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn size(&self, _a: &u64) -> BigInt {
        BigInt::one()
    }
    fn quo(&self, a: &u64, b: &u64) -> u64 {
        self.mul(a, &mod_inverse(*b, self.0))
    }
    fn canonical_unit(&self, a: &u64) -> (u64, u64) {
        (mod_inverse(*a, self.0), *a)
    }
    fn from_scalar(&self, s: &Scalar) -> u64 {
        let den = bigint_mod(s.denom(), self.0);
        self.mul(&bigint_mod(s.numer(), self.0), &mod_inverse(den, self.0))
    }
    fn to_scalar(&self, a: &u64) -> Scalar {
        int(*a)
    }
}

/// Runs `$body` with `$d` bound to the typed domain matching `$ring`.
macro_rules! with_domain {
    ($ring:expr, $d:ident => $body:expr) => {
        match $ring {
            $crate::linalg::RingSpec::Integers => {
                let $d = $crate::linalg::domain::Zz;
                $body
            }
            $crate::linalg::RingSpec::Rationals => {
                let $d = $crate::linalg::domain::Qq;
                $body
            }
            $crate::linalg::RingSpec::PrimeField(p) => {
                let $d = $crate::linalg::domain::Fp(p.get());
                $body
            }
        }
    };
}
pub(crate) use with_domain;

pub(crate) fn dense_from_matrix<D: Domain>(d: &D, m: &super::Matrix) -> Vec<Vec<D::E>> {
    let mut out = vec![vec![d.zero(); m.cols()]; m.rows()];
    for j in 0..m.cols() {
        for (i, v) in m.column(j) {
            out[*i][j] = d.from_scalar(v);
        }
    }
    out
}

pub(crate) fn matrix_from_dense<D: Domain>(d: &D, ring: RingSpec, rows: usize, cols: usize, a: &[Vec<D::E>]) -> super::Matrix {
    let entries = (0..cols)
        .map(|j| (0..rows).filter(|&i| !d.is_zero(&a[i][j])).map(|i| (i, d.to_scalar(&a[i][j]))).collect())
        .collect();
    super::Matrix::from_col_entries(ring, rows, entries).expect("dense matrix well formed")
}
