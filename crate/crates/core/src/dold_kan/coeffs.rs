use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::{int, RingSpec, Scalar};

/// How the element 2 behaves in a coefficient ring; decides the model for `AntiSym`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoBehavior {
    /// `2 = 0`, so the antisymmetric and symmetric powers agree.
    Zero,
    /// `2` is invertible, so repeated factors die.
    Unit,
    /// `2` is a nonzerodivisor but not a unit (Z and Z-flat algebras).
    NonZeroDivisor,
}

/// Commutative coefficient ring over which free complexes and power functors are computed.
pub trait Coeffs: Clone + Send + Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn from_bigint(&self, n: &BigInt) -> Self::E;
    fn two_behavior(&self) -> TwoBehavior;
    /// Exact division by 2, when `a` is divisible by 2.
    fn half(&self, a: &Self::E) -> Option<Self::E>;

    fn from_i64(&self, n: i64) -> Self::E {
        self.from_bigint(&BigInt::from(n))
    }

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::E, e: u32) -> Self::E {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

/// The ground ring itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseCoeffs(pub RingSpec);

impl Coeffs for BaseCoeffs {
    type E = Scalar;
    fn zero(&self) -> Scalar {
        Scalar::zero()
    }
    fn one(&self) -> Scalar {
        int(1)
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.0.add(a, b)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.0.mul(a, b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        self.0.neg(a)
    }
    fn from_bigint(&self, n: &BigInt) -> Scalar {
        self.0.from_int(n.clone())
    }
    fn two_behavior(&self) -> TwoBehavior {
        match self.0 {
            RingSpec::Integers => TwoBehavior::NonZeroDivisor,
            RingSpec::PrimeField(p) if p.get() == 2 => TwoBehavior::Zero,
            _ => TwoBehavior::Unit,
        }
    }
    fn half(&self, a: &Scalar) -> Option<Scalar> {
        let h = a / int(2);
        if self.0 == RingSpec::Integers && !h.is_integer() {
            None
        } else {
            Some(self.0.red(h))
        }
    }
}
