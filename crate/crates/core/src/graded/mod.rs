//! Graded complexes and filtered stubs.

mod stub;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::complexes::{ChainComplex, HomologyTable};
use crate::error::{Error, Result};
use crate::linalg::RingSpec;

pub use stub::{CoherentCochain, FilteredStub, Rees};

/// A finite family of chain complexes indexed by an internal weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    ring: RingSpec,
    pieces: BTreeMap<i32, ChainComplex>,
}

impl GradedComplex {
    pub fn new(ring: RingSpec, pieces: BTreeMap<i32, ChainComplex>) -> Result<Self> {
        for c in pieces.values() {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring, c.ring()));
            }
        }
        Ok(GradedComplex { ring, pieces })
    }

    pub fn zero(ring: RingSpec) -> Self {
        GradedComplex { ring, pieces: BTreeMap::new() }
    }

    /// `k(0)`: the base ring in weight and degree zero.
    pub fn unit(ring: RingSpec) -> Self {
        Self::single(0, ChainComplex::concentrated(ring, 0, 1))
    }

    /// `c(w)`: a complex placed in weight `w`.
    pub fn single(weight: i32, c: ChainComplex) -> Self {
        let ring = c.ring();
        let mut pieces = BTreeMap::new();
        pieces.insert(weight, c);
        GradedComplex { ring, pieces }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn piece(&self, w: i32) -> ChainComplex {
        self.pieces.get(&w).cloned().unwrap_or_else(|| ChainComplex::zero(self.ring))
    }

    pub fn pieces(&self) -> &BTreeMap<i32, ChainComplex> {
        &self.pieces
    }

    pub fn weights(&self) -> impl Iterator<Item = i32> + '_ {
        self.pieces.keys().copied()
    }

    pub fn homology(&self) -> BTreeMap<i32, HomologyTable> {
        self.pieces.iter().map(|(w, c)| (*w, c.homology())).collect()
    }

    /// `a`-fold shearing: the weight `n` piece is shifted by `2an`.
    pub fn shear(&self, a: i32) -> Self {
        let pieces = self.pieces.iter().map(|(n, c)| (*n, c.shift(2 * a * n))).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    /// Homological shift of every piece.
    pub fn shift(&self, n: i32) -> Self {
        let pieces = self.pieces.iter().map(|(w, c)| (*w, c.shift(n))).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    /// Moves the weight `w` piece to weight `w + k`.
    pub fn twist(&self, k: i32) -> Self {
        let pieces = self.pieces.iter().map(|(w, c)| (w + k, c.clone())).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    /// Replaces weight `w` by weight `-w`.
    pub fn negate_weights(&self) -> Self {
        let pieces = self.pieces.iter().map(|(w, c)| (-w, c.clone())).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    /// Piecewise linear dual.
    pub fn dual(&self) -> Self {
        let pieces = self.pieces.iter().map(|(w, c)| (*w, c.dual())).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let mut pieces = self.pieces.clone();
        for (w, c) in &other.pieces {
            let p = match pieces.remove(w) {
                Some(x) => x.direct_sum(c)?,
                None => c.clone(),
            };
            pieces.insert(*w, p);
        }
        Ok(GradedComplex { ring: self.ring, pieces })
    }

    /// Day convolution: weight `n` is `⊕_{i+j=n} a_i ⊗ b_j`.
    pub fn day_tensor(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let mut pieces: BTreeMap<i32, ChainComplex> = BTreeMap::new();
        for (i, a) in &self.pieces {
            for (j, b) in &other.pieces {
                let t = a.tensor(b)?;
                let p = match pieces.remove(&(i + j)) {
                    Some(x) => x.direct_sum(&t)?,
                    None => t,
                };
                pieces.insert(i + j, p);
            }
        }
        Ok(GradedComplex { ring: self.ring, pieces })
    }

    /// Keeps the weights in `lo..=hi`.
    pub fn weight_range(&self, lo: i32, hi: i32) -> Self {
        let pieces = self.pieces.range(lo..=hi).map(|(w, c)| (*w, c.clone())).collect();
        GradedComplex { ring: self.ring, pieces }
    }

    pub fn to_json(&self) -> Value {
        let mut pieces = Map::new();
        for (w, c) in &self.pieces {
            pieces.insert(w.to_string(), c.to_json());
        }
        json!({"ring": self.ring.to_string(), "pieces": pieces})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = RingSpec::parse(v["ring"].as_str().ok_or_else(|| Error::Parse("graded: missing ring".into()))?)?;
        let obj = v["pieces"].as_object().ok_or_else(|| Error::Parse("graded: missing pieces".into()))?;
        let mut pieces = BTreeMap::new();
        for (k, c) in obj {
            let w: i32 = k.parse().map_err(|_| Error::Parse(format!("graded: bad weight {k:?}")))?;
            pieces.insert(w, ChainComplex::from_json_in(ring, c)?);
        }
        Self::new(ring, pieces)
    }

    /// `{"weight": {"degree": "group"}}`.
    pub fn homology_json(&self) -> Value {
        let mut out = Map::new();
        for (w, h) in self.homology() {
            out.insert(w.to_string(), h.to_json());
        }
        Value::Object(out)
    }
}

impl fmt::Display for GradedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, h) in self.homology() {
            if h.is_zero() {
                continue;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "({w}): {h}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
