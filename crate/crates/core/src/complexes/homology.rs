use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{Map, Value};

use super::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, kernel_basis, left_inverse, smith_normal_form, FgModule, Matrix, RingSpec, Scalar};

/// Homology groups indexed by degree; only nonzero groups are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    ring: RingSpec,
    groups: BTreeMap<i32, FgModule>,
}

impl HomologyTable {
    pub fn new(ring: RingSpec, groups: BTreeMap<i32, FgModule>) -> Self {
        let groups = groups.into_iter().filter(|(_, g)| !g.is_zero()).collect();
        HomologyTable { ring, groups }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn get(&self, i: i32) -> FgModule {
        self.groups.get(&i).cloned().unwrap_or_else(|| FgModule::zero(self.ring))
    }

    pub fn groups(&self) -> &BTreeMap<i32, FgModule> {
        &self.groups
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn lo(&self) -> Option<i32> {
        self.groups.keys().next().copied()
    }

    pub fn hi(&self) -> Option<i32> {
        self.groups.keys().next_back().copied()
    }

    pub fn is_free(&self) -> bool {
        self.groups.values().all(|g| g.is_free())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .map(|(i, g)| if i.rem_euclid(2) == 0 { g.free_rank() as i64 } else { -(g.free_rank() as i64) })
            .sum()
    }

    pub fn shift(&self, n: i32) -> HomologyTable {
        HomologyTable { ring: self.ring, groups: self.groups.iter().map(|(i, g)| (i + n, g.clone())).collect() }
    }

    /// Keeps degrees `≤ n`.
    pub fn below(&self, n: i32) -> HomologyTable {
        HomologyTable { ring: self.ring, groups: self.groups.range(..=n).map(|(i, g)| (*i, g.clone())).collect() }
    }

    pub fn as_abelian_groups(&self) -> HomologyTable {
        let groups: BTreeMap<i32, FgModule> = self.groups.iter().map(|(i, g)| (*i, g.as_abelian_group())).collect();
        let ring = if matches!(self.ring, RingSpec::PrimeField(_)) { RingSpec::Integers } else { self.ring };
        HomologyTable { ring, groups }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (i, g) in &self.groups {
            m.insert(i.to_string(), Value::String(g.to_string()));
        }
        Value::Object(m)
    }

    pub fn from_json(ring: RingSpec, v: &Value) -> Result<HomologyTable> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("homology table must be an object".into()))?;
        let mut groups = BTreeMap::new();
        for (k, s) in obj {
            let i: i32 = k.parse().map_err(|_| Error::Parse(format!("bad degree {k:?}")))?;
            let s = s.as_str().ok_or_else(|| Error::Parse("homology entry must be a string".into()))?;
            let g = FgModule::parse(ring, s).ok_or_else(|| Error::Parse(format!("bad module {s:?}")))?;
            groups.insert(i, g);
        }
        Ok(HomologyTable::new(ring, groups))
    }
}

impl fmt::Display for HomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.groups.iter().map(|(i, g)| format!("H_{i} = {g}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

pub(super) fn homology_table(c: &ChainComplex) -> HomologyTable {
    let ring = c.ring();
    // rank and nontrivial invariant factors of every differential
    let keys: Vec<i32> = c.differentials().keys().copied().collect();
    let facts: BTreeMap<i32, (usize, Vec<BigInt>)> = keys
        .par_iter()
        .map(|&i| {
            let f = invariant_factors(c.differential_ref(i).unwrap());
            let rank = f.len();
            let tors: Vec<BigInt> = f.into_iter().map(|x| x.to_integer()).filter(|x| *x > BigInt::from(1)).collect();
            (i, (rank, tors))
        })
        .collect();
    let mut groups = BTreeMap::new();
    for (&i, &n) in c.ranks() {
        let r_out = facts.get(&i).map_or(0, |f| f.0);
        let (r_in, tors) = facts.get(&(i + 1)).map_or((0, vec![]), |f| (f.0, f.1.clone()));
        let free = n - r_out - r_in;
        groups.insert(i, FgModule::new(ring, free, tors));
    }
    HomologyTable::new(ring, groups)
}

/// Explicit description of `H_i`: cycle representatives and a coordinate map.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: i32,
    pub module: FgModule,
    /// Columns are cycles in `C_i`, one for each cyclic summand.
    pub generators: Matrix,
    /// Order of each generator; `None` for free generators.
    pub orders: Vec<Option<BigInt>>,
    /// Row `j` computes the `j`-th coordinate of a cycle (before reduction mod the order).
    pub coordinate_map: Matrix,
}

impl HomologyBasis {
    pub(super) fn compute(c: &ChainComplex, i: i32) -> Result<HomologyBasis> {
        let ring = c.ring();
        let k = kernel_basis(&c.differential(i));
        let m = k.cols();
        if m == 0 {
            return Ok(HomologyBasis {
                degree: i,
                module: FgModule::zero(ring),
                generators: Matrix::zeros(ring, c.rank(i), 0),
                orders: vec![],
                coordinate_map: Matrix::zeros(ring, 0, c.rank(i)),
            });
        }
        let l = left_inverse(&k)?;
        let y = l.mul(&c.differential(i + 1))?;
        let s = smith_normal_form(&y);
        let ul = s.u.mul(&l)?;
        let mut keep = Vec::new();
        let mut orders = Vec::new();
        for j in 0..m {
            if j < s.rank() {
                if ring.is_unit(&s.diagonal[j]) {
                    continue;
                }
                orders.push(Some(s.diagonal[j].to_integer()));
            } else {
                orders.push(None);
            }
            keep.push(j);
        }
        let generators = k.mul(&s.u_inv.select_cols(&keep))?;
        let coordinate_map = ul.select_rows(&keep);
        let free = orders.iter().filter(|o| o.is_none()).count();
        let tors = orders.iter().flatten().cloned().collect();
        Ok(HomologyBasis { degree: i, module: FgModule::new(ring, free, tors), generators, orders, coordinate_map })
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Coordinates of the class of a cycle, reduced into `[0, order)` on torsion generators.
    pub fn coordinates(&self, cycle: &[Scalar]) -> Result<Vec<Scalar>> {
        let raw = self.coordinate_map.apply(cycle)?;
        Ok(raw.into_iter().zip(&self.orders).map(|(x, o)| reduce_mod(x, o)).collect())
    }

    /// Whether a cycle represents the zero class.
    pub fn is_boundary(&self, cycle: &[Scalar]) -> Result<bool> {
        Ok(self.coordinates(cycle)?.iter().all(|x| x.is_zero()))
    }
}

pub(crate) fn reduce_mod(x: Scalar, order: &Option<BigInt>) -> Scalar {
    match order {
        Some(o) if !o.is_zero() => Scalar::from_integer(x.to_integer().mod_floor(o)),
        _ => x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn basis_of_torsion_class() {
        let c = ChainComplex::two_term(Matrix::from_i64(RingSpec::Integers, &[&[2], &[0]]), 1);
        let b = c.homology_basis(0).unwrap();
        assert_eq!(b.module.to_string(), "Z + Z/2");
        assert_eq!(b.len(), 2);
        // the boundary (2, 0) is zero in homology
        assert!(b.is_boundary(&[int(2), int(0)]).unwrap());
        assert!(!b.is_boundary(&[int(1), int(0)]).unwrap());
    }

    #[test]
    fn table_json_roundtrip() {
        let c = ChainComplex::two_term(Matrix::from_i64(RingSpec::Integers, &[&[4]]), 3);
        let h = c.homology();
        assert_eq!(HomologyTable::from_json(RingSpec::Integers, &h.to_json()).unwrap(), h);
        assert_eq!(h.to_string(), "H_2 = Z/4");
    }
}
