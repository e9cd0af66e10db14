use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Matrix entries are stored as exact rationals; the ring decides which
/// values are admissible and how arithmetic reduces.
pub type Scalar = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The ground ring k: the integers, the rationals or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Integers,
    Rationals,
    PrimeField(Prime),
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::PrimeField(p) => write!(f, "Fp:{}", p.get()),
        }
    }
}

pub fn int(n: impl Into<BigInt>) -> Scalar {
    BigRational::from_integer(n.into())
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

pub(crate) fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

impl RingSpec {
    pub fn fp(p: u64) -> Result<Self> {
        Ok(RingSpec::PrimeField(Prime::new(p)?))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Z" => Ok(RingSpec::Integers),
            "Q" => Ok(RingSpec::Rationals),
            _ => {
                let rest = t
                    .strip_prefix("Fp:")
                    .or_else(|| t.strip_prefix("F"))
                    .ok_or_else(|| Error::Parse(format!("unknown ring {t:?}")))?;
                let p: u64 = rest
                    .trim_start_matches('_')
                    .parse()
                    .map_err(|_| Error::Parse(format!("unknown ring {t:?}")))?;
                RingSpec::fp(p)
            }
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, RingSpec::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            RingSpec::PrimeField(p) => p.get(),
            _ => 0,
        }
    }

    /// Canonical representative of `x` in this ring.
    pub fn reduce(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            RingSpec::Rationals => Ok(x.clone()),
            RingSpec::Integers => {
                if x.is_integer() {
                    Ok(x.clone())
                } else {
                    Err(Error::Parse(format!("{x} is not an integer")))
                }
            }
            RingSpec::PrimeField(p) => {
                let p = p.get();
                let den = bigint_mod(x.denom(), p);
                if den == 0 {
                    return Err(Error::Parse(format!("{x} has denominator divisible by {p}")));
                }
                let num = bigint_mod(x.numer(), p);
                let v = (num as u128 * mod_inverse(den, p) as u128 % p as u128) as u64;
                Ok(int(v))
            }
        }
    }

    pub(crate) fn red(&self, x: Scalar) -> Scalar {
        match self {
            RingSpec::PrimeField(_) => self.reduce(&x).expect("entry reducible mod p"),
            _ => x,
        }
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> Scalar {
        self.red(int(n))
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.red(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.red(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.red(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.red(-a)
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            RingSpec::Integers => a.abs().is_one(),
            _ => !a.is_zero(),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        Some(self.red(a.recip()))
    }

    /// Whether `a` divides `b` in this ring.
    pub fn divides(&self, a: &Scalar, b: &Scalar) -> bool {
        if a.is_zero() {
            return b.is_zero();
        }
        match self {
            RingSpec::Integers => (b.numer() % a.numer()).is_zero(),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rings() {
        assert_eq!(RingSpec::parse("Z").unwrap(), RingSpec::Integers);
        assert_eq!(RingSpec::parse("Q").unwrap(), RingSpec::Rationals);
        assert_eq!(RingSpec::parse("Fp:7").unwrap(), RingSpec::fp(7).unwrap());
        assert_eq!(RingSpec::parse("F_5").unwrap(), RingSpec::fp(5).unwrap());
        assert!(matches!(RingSpec::parse("Fp:6"), Err(Error::NotPrime(6))));
        assert!(RingSpec::parse("R").is_err());
    }

    #[test]
    fn reduction_mod_p() {
        let f5 = RingSpec::fp(5).unwrap();
        assert_eq!(f5.reduce(&int(-1)).unwrap(), int(4));
        let half = Scalar::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(f5.reduce(&half).unwrap(), int(3));
        assert!(RingSpec::Integers.reduce(&half).is_err());
        assert_eq!(f5.inv(&int(2)).unwrap(), int(3));
        assert!(RingSpec::Integers.inv(&int(2)).is_none());
    }

    #[test]
    fn display_roundtrip() {
        for r in [RingSpec::Integers, RingSpec::Rationals, RingSpec::fp(11).unwrap()] {
            assert_eq!(RingSpec::parse(&r.to_string()).unwrap(), r);
        }
    }
}
