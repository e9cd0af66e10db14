use std::collections::BTreeMap;

use super::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

/// A degree-preserving chain map given by one matrix per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    /// Checks shapes and `d f = f d`.
    pub fn new(source: ChainComplex, target: ChainComplex, components: BTreeMap<i32, Matrix>) -> Result<Self> {
        let f = Self::new_unchecked(source, target, components)?;
        let degrees: Vec<i32> = f.source.degrees().chain(f.target.degrees()).collect();
        for i in degrees {
            let lhs = f.target.differential(i).mul(&f.component(i))?;
            let rhs = f.component(i - 1).mul(&f.source.differential(i))?;
            if lhs != rhs {
                return Err(Error::InvalidChainMap(format!("square at degree {i} does not commute")));
            }
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: ChainComplex, target: ChainComplex, components: BTreeMap<i32, Matrix>) -> Result<Self> {
        if source.ring() != target.ring() {
            return Err(Error::RingMismatch(source.ring(), target.ring()));
        }
        let mut comps = BTreeMap::new();
        for (i, m) in components {
            if m.shape() != (target.rank(i), source.rank(i)) {
                return Err(Error::InvalidChainMap(format!(
                    "component {i} has shape {:?}, expected {:?}",
                    m.shape(),
                    (target.rank(i), source.rank(i))
                )));
            }
            if !m.is_zero() {
                comps.insert(i, m);
            }
        }
        Ok(ChainMap { source, target, components: comps })
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let comps = c.ranks().iter().map(|(i, r)| (*i, Matrix::identity(c.ring(), *r))).collect();
        ChainMap { source: c.clone(), target: c.clone(), components: comps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), components: BTreeMap::new() }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, i: i32) -> Matrix {
        match self.components.get(&i) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.source.ring(), self.target.rank(i), self.source.rank(i)),
        }
    }

    pub fn components(&self) -> &BTreeMap<i32, Matrix> {
        &self.components
    }

    /// `other ∘ self`
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target != other.source {
            return Err(Error::InvalidChainMap("composition of non-composable maps".into()));
        }
        let mut comps = BTreeMap::new();
        for i in self.source.degrees() {
            comps.insert(i, other.component(i).mul(&self.component(i))?);
        }
        ChainMap::new_unchecked(self.source.clone(), other.target.clone(), comps)
    }

    pub fn shift(&self, n: i32) -> ChainMap {
        let comps = self.components.iter().map(|(i, m)| (i + n, m.clone())).collect();
        ChainMap { source: self.source.shift(n), target: self.target.shift(n), components: comps }
    }

    /// Matrix of the induced map `H_i(source) -> H_i(target)` in the generators of
    /// [`ChainComplex::homology_basis`]; torsion coordinates are reduced.
    pub fn induced_on_homology(&self, i: i32) -> Result<Matrix> {
        let hs = self.source.homology_basis(i)?;
        let ht = self.target.homology_basis(i)?;
        let f = self.component(i);
        let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(hs.len());
        for j in 0..hs.len() {
            let img = f.apply(&hs.generators.dense_column(j))?;
            cols.push(ht.coordinates(&img)?);
        }
        Matrix::from_dense_cols(self.source.ring(), ht.len(), &cols)
    }
}
