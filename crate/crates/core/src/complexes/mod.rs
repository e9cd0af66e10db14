//! Bounded chain complexes of finite free modules, homologically graded
//! (`d_i : C_i -> C_{i-1}`).

mod homology;
mod map;

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

pub use homology::{HomologyBasis, HomologyTable};
pub use map::ChainMap;

use crate::error::{Error, Result};
use crate::linalg::{image_basis, int, kernel_basis, left_inverse, Matrix, RingSpec, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ring: RingSpec,
    ranks: BTreeMap<i32, usize>,
    d: BTreeMap<i32, Matrix>,
}

impl ChainComplex {
    /// Validates shapes, rings and `d ∘ d = 0`. Zero ranks and zero differentials are dropped.
    pub fn new(ring: RingSpec, ranks: BTreeMap<i32, usize>, d: BTreeMap<i32, Matrix>) -> Result<Self> {
        let c = Self::new_unchecked(ring, ranks, d)?;
        for (&i, m) in &c.d {
            if let Some(m2) = c.d.get(&(i - 1)) {
                if !m2.mul(m)?.is_zero() {
                    return Err(Error::InvalidComplex(format!("d_{} d_{} != 0", i - 1, i)));
                }
            }
        }
        Ok(c)
    }

    /// Checks shapes only; used where `d ∘ d = 0` holds by construction.
    pub(crate) fn new_unchecked(ring: RingSpec, ranks: BTreeMap<i32, usize>, d: BTreeMap<i32, Matrix>) -> Result<Self> {
        let ranks: BTreeMap<i32, usize> = ranks.into_iter().filter(|(_, r)| *r > 0).collect();
        let mut dd = BTreeMap::new();
        for (i, m) in d {
            if m.ring() != ring {
                return Err(Error::RingMismatch(ring, m.ring()));
            }
            let src = ranks.get(&i).copied().unwrap_or(0);
            let tgt = ranks.get(&(i - 1)).copied().unwrap_or(0);
            if m.shape() != (tgt, src) {
                return Err(Error::InvalidComplex(format!(
                    "d_{i} has shape {:?}, expected {:?}",
                    m.shape(),
                    (tgt, src)
                )));
            }
            if !m.is_zero() {
                dd.insert(i, m);
            }
        }
        Ok(ChainComplex { ring, ranks, d: dd })
    }

    pub fn zero(ring: RingSpec) -> Self {
        ChainComplex { ring, ranks: BTreeMap::new(), d: BTreeMap::new() }
    }

    /// `k^rank` placed in a single degree.
    pub fn concentrated(ring: RingSpec, degree: i32, rank: usize) -> Self {
        let mut ranks = BTreeMap::new();
        ranks.insert(degree, rank);
        ChainComplex::new_unchecked(ring, ranks, BTreeMap::new()).unwrap()
    }

    /// Two-term complex `k^cols --m--> k^rows` in degrees `degree` and `degree - 1`.
    pub fn two_term(m: Matrix, degree: i32) -> Self {
        let mut ranks = BTreeMap::new();
        ranks.insert(degree, m.cols());
        ranks.insert(degree - 1, m.rows());
        let mut d = BTreeMap::new();
        let ring = m.ring();
        d.insert(degree, m);
        ChainComplex::new_unchecked(ring, ranks, d).unwrap()
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rank(&self, i: i32) -> usize {
        self.ranks.get(&i).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i32, usize> {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Lowest degree with a nonzero term.
    pub fn lo(&self) -> Option<i32> {
        self.ranks.keys().next().copied()
    }

    /// Highest degree with a nonzero term.
    pub fn hi(&self) -> Option<i32> {
        self.ranks.keys().next_back().copied()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.ranks.keys().copied()
    }

    pub fn differential(&self, i: i32) -> Matrix {
        match self.d.get(&i) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.ring, self.rank(i - 1), self.rank(i)),
        }
    }

    pub fn differential_ref(&self, i: i32) -> Option<&Matrix> {
        self.d.get(&i)
    }

    pub fn differentials(&self) -> &BTreeMap<i32, Matrix> {
        &self.d
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().map(|(i, r)| if i.rem_euclid(2) == 0 { *r as i64 } else { -(*r as i64) }).sum()
    }

    pub fn homology(&self) -> HomologyTable {
        homology::homology_table(self)
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_zero()
    }

    /// Generators and coordinates for `H_i`.
    pub fn homology_basis(&self, i: i32) -> Result<HomologyBasis> {
        HomologyBasis::compute(self, i)
    }

    /// `C[n]` with `C[n]_i = C_{i-n}` and differential `(-1)^n d`.
    pub fn shift(&self, n: i32) -> ChainComplex {
        let ranks = self.ranks.iter().map(|(i, r)| (i + n, *r)).collect();
        let sign = if n.rem_euclid(2) == 0 { int(1) } else { int(-1) };
        let d = self.d.iter().map(|(i, m)| (i + n, m.scale(&sign))).collect();
        ChainComplex { ring: self.ring, ranks, d }
    }

    pub fn change_ring(&self, ring: RingSpec) -> Result<ChainComplex> {
        let mut d = BTreeMap::new();
        for (i, m) in &self.d {
            d.insert(*i, m.change_ring(ring)?);
        }
        ChainComplex::new_unchecked(ring, self.ranks.clone(), d)
    }

    fn check_ring(&self, other: &ChainComplex) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> Result<ChainComplex> {
        self.check_ring(other)?;
        let mut ranks = self.ranks.clone();
        for (i, r) in &other.ranks {
            *ranks.entry(*i).or_insert(0) += r;
        }
        let mut d = BTreeMap::new();
        for &i in ranks.keys() {
            if ranks.contains_key(&(i - 1)) {
                d.insert(i, self.differential(i).block_diag(&other.differential(i))?);
            }
        }
        ChainComplex::new_unchecked(self.ring, ranks, d)
    }

    /// Index layout of the tensor product in degree `n`: blocks `(p, q)` by increasing `p`,
    /// entry `a_i ⊗ b_j` at `offset + i * rank(B_q) + j`.
    pub(crate) fn tensor_blocks(&self, other: &ChainComplex, n: i32) -> Vec<(i32, i32, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (&p, &rp) in &self.ranks {
            let q = n - p;
            let rq = other.rank(q);
            if rq > 0 {
                out.push((p, q, off));
                off += rp * rq;
            }
        }
        out
    }

    /// Total tensor product with `d(a ⊗ b) = da ⊗ b + (-1)^|a| a ⊗ db`.
    pub fn tensor(&self, other: &ChainComplex) -> Result<ChainComplex> {
        self.check_ring(other)?;
        let ring = self.ring;
        let mut ranks = BTreeMap::new();
        for (p, rp) in &self.ranks {
            for (q, rq) in &other.ranks {
                *ranks.entry(p + q).or_insert(0) += rp * rq;
            }
        }
        let mut d = BTreeMap::new();
        for &n in ranks.keys() {
            let Some(&tgt_rank) = ranks.get(&(n - 1)) else { continue };
            let src = self.tensor_blocks(other, n);
            let tgt = self.tensor_blocks(other, n - 1);
            let find = |p: i32, q: i32| tgt.iter().find(|(a, b, _)| *a == p && *b == q).map(|t| t.2);
            let mut cols: Vec<Vec<(usize, Scalar)>> = Vec::new();
            for &(p, q, _) in &src {
                let rp = self.rank(p);
                let rq = other.rank(q);
                let da = self.d.get(&p);
                let db = other.d.get(&q);
                let sign = if p.rem_euclid(2) == 0 { int(1) } else { int(-1) };
                let off_a = find(p - 1, q);
                let off_b = find(p, q - 1);
                let rq_minus = other.rank(q - 1);
                for i in 0..rp {
                    for j in 0..rq {
                        let mut col = Vec::new();
                        if let (Some(da), Some(off)) = (da, off_a) {
                            for (k, v) in da.column(i) {
                                col.push((off + k * rq + j, v.clone()));
                            }
                        }
                        if let (Some(db), Some(off)) = (db, off_b) {
                            for (l, v) in db.column(j) {
                                col.push((off + i * rq_minus + l, &sign * v));
                            }
                        }
                        cols.push(col);
                    }
                }
            }
            d.insert(n, Matrix::from_col_entries(ring, tgt_rank, cols)?);
        }
        ChainComplex::new_unchecked(ring, ranks, d)
    }

    /// Connective cover `τ_{≥n} C` (keeping `H_i` for `i ≥ n`) with its inclusion into `C`.
    ///
    /// Degree `n` becomes the saturated kernel of `d_n`.
    pub fn truncate_connective(&self, n: i32) -> Result<(ChainComplex, ChainMap)> {
        let ring = self.ring;
        let k = kernel_basis(&self.differential(n));
        let mut ranks: BTreeMap<i32, usize> = self.ranks.range(n + 1..).map(|(i, r)| (*i, *r)).collect();
        ranks.insert(n, k.cols());
        let mut d: BTreeMap<i32, Matrix> = self.d.range(n + 2..).map(|(i, m)| (*i, m.clone())).collect();
        if k.cols() > 0 && self.rank(n + 1) > 0 {
            let l = left_inverse(&k)?;
            d.insert(n + 1, l.mul(&self.differential(n + 1))?);
        }
        let trunc = ChainComplex::new_unchecked(ring, ranks, d)?;
        let mut comps = BTreeMap::new();
        comps.insert(n, k);
        for (&i, &r) in self.ranks.range(n + 1..) {
            comps.insert(i, Matrix::identity(ring, r));
        }
        let incl = ChainMap::new_unchecked(trunc.clone(), self.clone(), comps)?;
        Ok((trunc, incl))
    }

    /// Truncation `τ_{≤n} C` keeping `H_i` for `i ≤ n`: degree `n+1` is replaced by a basis
    /// of the image of `d_{n+1}` and higher degrees are dropped.
    pub fn truncate_above(&self, n: i32) -> Result<ChainComplex> {
        let ring = self.ring;
        let mut ranks: BTreeMap<i32, usize> = self.ranks.range(..=n).map(|(i, r)| (*i, *r)).collect();
        let mut d: BTreeMap<i32, Matrix> = self.d.range(..=n).map(|(i, m)| (*i, m.clone())).collect();
        if let Some(m) = self.d.get(&(n + 1)) {
            let b = image_basis(m);
            ranks.insert(n + 1, b.cols());
            d.insert(n + 1, b);
        }
        ChainComplex::new_unchecked(ring, ranks, d)
    }

    /// Linear dual: `(C^∨)_n = Hom(C_{-n}, k)` with the transposed differentials.
    pub fn dual(&self) -> ChainComplex {
        let ranks = self.ranks.iter().map(|(i, r)| (-i, *r)).collect();
        // d_i : C_i -> C_{i-1} dualizes to a map in degree -(i-1) -> -i, i.e. d^∨_{1-i}
        let d = self.d.iter().map(|(i, m)| (1 - i, m.transpose())).collect();
        ChainComplex { ring: self.ring, ranks, d }
    }

    /// Keeps only the degrees in `lo..=hi` (as a brutal truncation).
    pub fn brutal_truncation(&self, lo: i32, hi: i32) -> ChainComplex {
        let ranks = self.ranks.range(lo..=hi).map(|(i, r)| (*i, *r)).collect();
        let d = self.d.iter().filter(|(i, _)| **i > lo && **i <= hi).map(|(i, m)| (*i, m.clone())).collect();
        ChainComplex { ring: self.ring, ranks, d }
    }

    pub fn to_json(&self) -> Value {
        let mut ranks = Map::new();
        for (i, r) in &self.ranks {
            ranks.insert(i.to_string(), json!(r));
        }
        let mut d = Map::new();
        for (i, m) in &self.d {
            d.insert(i.to_string(), m.to_json());
        }
        json!({"ring": self.ring.to_string(), "ranks": ranks, "d": d})
    }

    pub fn from_json(v: &Value) -> Result<ChainComplex> {
        let ring = RingSpec::parse(v["ring"].as_str().ok_or_else(|| Error::Parse("complex: missing ring".into()))?)?;
        Self::from_json_in(ring, v)
    }

    /// Parses a complex, interpreting its entries over `ring`.
    pub fn from_json_in(ring: RingSpec, v: &Value) -> Result<ChainComplex> {
        let mut ranks = BTreeMap::new();
        let rk = v["ranks"].as_object().ok_or_else(|| Error::Parse("complex: missing ranks".into()))?;
        for (k, r) in rk {
            let i: i32 = k.parse().map_err(|_| Error::Parse(format!("complex: bad degree {k:?}")))?;
            let r = r.as_u64().ok_or_else(|| Error::Parse("complex: rank must be an integer".into()))?;
            ranks.insert(i, r as usize);
        }
        let mut d = BTreeMap::new();
        if let Some(dm) = v.get("d").and_then(|x| x.as_object()) {
            for (k, m) in dm {
                let i: i32 = k.parse().map_err(|_| Error::Parse(format!("complex: bad degree {k:?}")))?;
                d.insert(i, Matrix::from_json_in(ring, m)?);
            }
        }
        ChainComplex::new(ring, ranks, d)
    }
}

/// Cone of `f : A -> B`: `cone_n = A_{n-1} ⊕ B_n`, `d(a, b) = (-da, f a + db)`.
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    let a = f.source();
    let b = f.target();
    let ring = a.ring();
    let mut ranks = BTreeMap::new();
    for (i, r) in a.ranks() {
        *ranks.entry(i + 1).or_insert(0) += r;
    }
    for (i, r) in b.ranks() {
        *ranks.entry(*i).or_insert(0) += r;
    }
    let mut d = BTreeMap::new();
    for &n in ranks.keys() {
        if !ranks.contains_key(&(n - 1)) {
            continue;
        }
        let da = a.differential(n - 1).neg();
        let fa = f.component(n - 1);
        let db = b.differential(n);
        let m = Matrix::from_blocks(
            ring,
            &[a.rank(n - 2), b.rank(n - 1)],
            &[a.rank(n - 1), b.rank(n)],
            &[vec![Some(&da), None], vec![Some(&fa), Some(&db)]],
        )?;
        d.insert(n, m);
    }
    ChainComplex::new_unchecked(ring, ranks, d)
}

/// Whether `f` induces isomorphisms on all homology groups (its cone is acyclic).
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    Ok(cone(f)?.is_acyclic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FgModule;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    fn mult(n: i64) -> ChainComplex {
        ChainComplex::two_term(Matrix::from_i64(z(), &[&[n]]), 1)
    }

    #[test]
    fn homology_of_multiplication_by_two() {
        let h = mult(2).homology();
        assert_eq!(h.get(0).to_string(), "Z/2");
        assert!(h.get(1).is_zero());
    }

    #[test]
    fn rejects_nonzero_square() {
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(1, 1);
        ranks.insert(2, 1);
        let mut d = BTreeMap::new();
        d.insert(1, Matrix::from_i64(z(), &[&[1]]));
        d.insert(2, Matrix::from_i64(z(), &[&[1]]));
        assert!(matches!(ChainComplex::new(z(), ranks, d), Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn tensor_of_coprime_multiplications_is_acyclic() {
        let t = mult(2).tensor(&mult(3)).unwrap();
        assert!(t.homology().is_zero());
    }

    #[test]
    fn tensor_of_z_mod_2_with_itself() {
        let t = mult(2).tensor(&mult(2)).unwrap();
        let h = t.homology();
        assert_eq!(h.get(0).to_string(), "Z/2");
        assert_eq!(h.get(1).to_string(), "Z/2");
        assert!(h.get(2).is_zero());
    }

    #[test]
    fn shift_moves_homology() {
        let h = mult(2).shift(3).homology();
        assert_eq!(h.get(3), FgModule::new(z(), 0, vec![2.into()]));
    }

    #[test]
    fn truncations_keep_homology_in_range() {
        let c = mult(2).direct_sum(&ChainComplex::concentrated(z(), 1, 1)).unwrap();
        let (t, incl) = c.truncate_connective(1).unwrap();
        assert!(t.homology().get(0).is_zero());
        assert_eq!(t.homology().get(1).to_string(), "Z");
        assert_eq!(incl.source().rank(1), 1);
        assert_eq!(incl.target().rank(1), 2);
        let t = c.truncate_above(0).unwrap();
        assert!(t.homology().get(1).is_zero());
        assert_eq!(t.homology().get(0).to_string(), "Z/2");
    }

    #[test]
    fn json_roundtrip() {
        let c = mult(6).shift(-2);
        let v = c.to_json();
        assert_eq!(ChainComplex::from_json(&v).unwrap(), c);
    }

    #[test]
    fn dual_of_multiplication() {
        let c = mult(3);
        let h = c.dual().homology();
        assert_eq!(h.get(-1).to_string(), "Z/3");
        assert!(h.get(0).is_zero());
    }
}
