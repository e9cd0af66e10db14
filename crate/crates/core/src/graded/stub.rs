//! Nonnegative filtrations recorded in weights `0..N-1`.
//!
//! Level `s` of a stub stands for `F^s / F^N`, so `gr^{N-1} = F^{N-1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use super::GradedComplex;
use crate::complexes::{cone, ChainComplex, ChainMap, HomologyTable};
use crate::error::{Error, Result};
use crate::linalg::{int, kernel_basis, left_inverse, FgModule, Matrix, RingSpec, Scalar};

/// A filtration `F^{N-1} → … → F^1 → F^0` of chain complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredStub {
    levels: Vec<ChainComplex>,
    /// `transitions[s] : F^{s+1} → F^s`.
    transitions: Vec<ChainMap>,
    strict: bool,
}

fn coordinate_inclusion(ring: RingSpec, sub: &[usize], sup: &[usize]) -> Matrix {
    let cols = sub.iter().map(|x| vec![(sup.binary_search(x).expect("nested index sets"), int(1))]).collect();
    Matrix::from_col_entries(ring, sup.len(), cols).expect("inclusion well formed")
}

fn subcomplex(c: &ChainComplex, idx: &BTreeMap<i32, Vec<usize>>) -> Result<ChainComplex> {
    let ring = c.ring();
    let ranks = idx.iter().map(|(i, v)| (*i, v.len())).collect();
    let mut d = BTreeMap::new();
    for (i, v) in idx {
        if let (Some(m), Some(w)) = (c.differential_ref(*i), idx.get(&(i - 1))) {
            d.insert(*i, m.select_rows(w).select_cols(v));
        }
    }
    ChainComplex::new_unchecked(ring, ranks, d)
}

impl FilteredStub {
    /// Validates the transitions and records whether they are degreewise split injective.
    pub fn new(levels: Vec<ChainComplex>, transitions: Vec<ChainMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidComplex("a stub needs N ≥ 1 levels".into()));
        }
        if transitions.len() + 1 != levels.len() {
            return Err(Error::InvalidChainMap(format!(
                "{} levels need {} transitions, got {}",
                levels.len(),
                levels.len() - 1,
                transitions.len()
            )));
        }
        let ring = levels[0].ring();
        for l in &levels {
            if l.ring() != ring {
                return Err(Error::RingMismatch(ring, l.ring()));
            }
        }
        for (s, f) in transitions.iter().enumerate() {
            if f.source() != &levels[s + 1] || f.target() != &levels[s] {
                return Err(Error::InvalidChainMap(format!("transition {s} does not connect F^{} to F^{s}", s + 1)));
            }
        }
        let strict = transitions.iter().all(|f| {
            f.source().ranks().keys().all(|&i| left_inverse(&f.component(i)).is_ok())
        });
        Ok(FilteredStub { levels, transitions, strict })
    }

    /// The filtration of `c` by the levels of its basis vectors: `F^s` is spanned by the basis
    /// vectors of level `≥ s`. Levels below 0 count as 0; vectors of level `≥ n` are dropped.
    pub fn from_levels(c: &ChainComplex, levels: &BTreeMap<i32, Vec<i64>>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidComplex("a stub needs N ≥ 1 levels".into()));
        }
        let ring = c.ring();
        let lvl = |i: i32, j: usize| levels.get(&i).map_or(0, |v| v[j]).max(0);
        for (&i, m) in c.differentials() {
            for j in 0..m.cols() {
                for (r, _) in m.column(j) {
                    if lvl(i - 1, *r) < lvl(i, j) {
                        return Err(Error::InvalidComplex(format!("the differential lowers the level in degree {i}")));
                    }
                }
            }
        }
        let idx = |s: i64| -> BTreeMap<i32, Vec<usize>> {
            c.ranks()
                .iter()
                .map(|(&i, &r)| (i, (0..r).filter(|&j| lvl(i, j) >= s && lvl(i, j) < n as i64).collect::<Vec<_>>()))
                .collect()
        };
        let sets: Vec<BTreeMap<i32, Vec<usize>>> = (0..n as i64).map(idx).collect();
        let complexes = sets.iter().map(|x| subcomplex(c, x)).collect::<Result<Vec<_>>>()?;
        let mut transitions = Vec::new();
        for s in 0..n - 1 {
            let comps = sets[s + 1]
                .iter()
                .map(|(i, sub)| (*i, coordinate_inclusion(ring, sub, &sets[s][i])))
                .collect();
            transitions.push(ChainMap::new_unchecked(complexes[s + 1].clone(), complexes[s].clone(), comps)?);
        }
        Ok(FilteredStub { levels: complexes, transitions, strict: true })
    }

    /// All levels equal to `c`, transitions the identity.
    pub fn constant(c: &ChainComplex, n: usize) -> Result<Self> {
        let levels = vec![c.clone(); n];
        let transitions = vec![ChainMap::identity(c); n.saturating_sub(1)];
        Self::new(levels, transitions)
    }

    /// `ins^s(c)`: `F^t = c` for `t ≤ s` and `0` above, so `gr` is `c` in weight `s`.
    pub fn insertion(c: &ChainComplex, s: usize, n: usize) -> Result<Self> {
        let levels = c.ranks().iter().map(|(i, r)| (*i, vec![s as i64; *r])).collect();
        Self::from_levels(c, &levels, n)
    }

    /// The `a`-adic filtration `a^s k / a^N k` of the base ring, `a` a nonzerodivisor.
    ///
    /// Degree 0 has generators `u_s` (standing for `a^s`) and degree 1 has `v_s` with
    /// `d v_s = u_{s+1} - a u_s` and `d v_{N-1} = -a u_{N-1}`.
    pub fn principal_adic(ring: RingSpec, a: &Scalar, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidComplex("a stub needs N ≥ 1 levels".into()));
        }
        let cols: Vec<Vec<(usize, Scalar)>> = (0..n)
            .map(|s| {
                let mut col = vec![(s, ring.neg(&ring.red(a.clone())))];
                if s + 1 < n {
                    col.push((s + 1, int(1)));
                }
                col
            })
            .collect();
        let m = Matrix::from_col_entries(ring, n, cols)?;
        let c = ChainComplex::two_term(m, 1);
        let lv: Vec<i64> = (0..n as i64).collect();
        let mut levels = BTreeMap::new();
        levels.insert(0, lv.clone());
        levels.insert(1, lv);
        Self::from_levels(&c, &levels, n)
    }

    /// `F^s = τ_{[s, N-1]} c`, realized by saturated kernels so that it is strict.
    pub fn postnikov(c: &ChainComplex, n: usize) -> Result<Self> {
        let ring = c.ring();
        let top = n as i32 - 1;
        let d = c.truncate_above(top)?;
        let mut bases: BTreeMap<i32, Matrix> = BTreeMap::new();
        let mut levels: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
        for (&i, &r) in d.ranks() {
            if i < 0 {
                continue;
            }
            let z = kernel_basis(&d.differential(i));
            if i == 0 {
                levels.insert(0, vec![0; z.cols()]);
                bases.insert(0, z);
                continue;
            }
            let comp = if z.cols() == 0 { Matrix::identity(ring, r) } else { kernel_basis(&left_inverse(&z)?) };
            let mut lv = vec![i as i64; z.cols()];
            lv.extend(vec![i as i64 - 1; comp.cols()]);
            levels.insert(i, lv);
            bases.insert(i, z.hstack(&comp)?);
        }
        let adapted = change_basis(&d, &bases)?;
        Self::from_levels(&adapted, &levels, n)
    }

    pub fn ring(&self) -> RingSpec {
        self.levels[0].ring()
    }

    /// Number of levels `N`.
    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn level(&self, s: usize) -> &ChainComplex {
        &self.levels[s]
    }

    pub fn levels(&self) -> &[ChainComplex] {
        &self.levels
    }

    pub fn transition(&self, s: usize) -> &ChainMap {
        &self.transitions[s]
    }

    /// `F^{s+1} → F^s`, with `F^N = 0`.
    fn step(&self, s: usize) -> ChainMap {
        if s + 1 < self.n() {
            self.transitions[s].clone()
        } else {
            ChainMap::zero(&ChainComplex::zero(self.ring()), &self.levels[s])
        }
    }

    /// `gr^s = cofib(F^{s+1} → F^s)` for `0 ≤ s < N`.
    pub fn gr(&self, s: usize) -> Result<ChainComplex> {
        cone(&self.step(s))
    }

    pub fn associated_graded(&self) -> Result<GradedComplex> {
        let pieces = (0..self.n()).map(|s| self.gr(s).map(|c| (s as i32, c))).collect::<Result<_>>()?;
        GradedComplex::new(self.ring(), pieces)
    }

    pub fn gr_homology(&self) -> Result<BTreeMap<i32, HomologyTable>> {
        Ok(self.associated_graded()?.homology())
    }

    /// Whether `gr^s` has homology only in degree `-s` for every `s`.
    pub fn is_beilinson_static(&self) -> Result<bool> {
        for s in 0..self.n() {
            let h = self.gr(s)?.homology();
            if h.groups().iter().any(|(i, g)| *i != -(s as i32) && !g.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The graded object `⊕ F^s` (weight `s`) with `t : F^{s+1} → F^s` of weight `-1`.
    pub fn rees(&self) -> Result<Rees> {
        let pieces = self.levels.iter().enumerate().map(|(s, c)| (s as i32, c.clone())).collect();
        let graded = GradedComplex::new(self.ring(), pieces)?;
        let t = self.transitions.iter().enumerate().map(|(s, f)| (s as i32, f.clone())).collect();
        Ok(Rees { graded, t, n: self.n() })
    }

    /// A basis of `F^0` in which every `F^s` is spanned by basis vectors, with their levels.
    pub fn to_levels(&self) -> Result<(ChainComplex, BTreeMap<i32, Vec<i64>>)> {
        if !self.strict {
            return Err(Error::Precondition("a level basis needs a strict stub".into()));
        }
        let ring = self.ring();
        let n = self.n();
        // basis of F^s in F^s coordinates, as columns, starting from the top level
        let mut bases: BTreeMap<i32, Matrix> =
            self.levels[n - 1].ranks().iter().map(|(i, r)| (*i, Matrix::identity(ring, *r))).collect();
        let mut lv: BTreeMap<i32, Vec<i64>> =
            self.levels[n - 1].ranks().iter().map(|(i, r)| (*i, vec![n as i64 - 1; *r])).collect();
        for s in (0..n - 1).rev() {
            let f = &self.transitions[s];
            let mut next = BTreeMap::new();
            let mut next_lv = BTreeMap::new();
            for (&i, &r) in self.levels[s].ranks() {
                let fi = f.component(i);
                let (img, mut l) = match bases.get(&i) {
                    Some(b) => (fi.mul(b)?, lv[&i].clone()),
                    None => (Matrix::zeros(ring, r, 0), vec![]),
                };
                let comp = if fi.cols() == 0 { Matrix::identity(ring, r) } else { kernel_basis(&left_inverse(&fi)?) };
                l.extend(vec![s as i64; comp.cols()]);
                next.insert(i, img.hstack(&comp)?);
                next_lv.insert(i, l);
            }
            bases = next;
            lv = next_lv;
        }
        Ok((change_basis(&self.levels[0], &bases)?, lv))
    }

    /// Day convolution of strict stubs: `F^s(a ⊗ b) = Σ_{i+j=s} F^i a ⊗ F^j b`, with
    /// `N = min(N_a, N_b)`.
    pub fn day_tensor(&self, other: &FilteredStub) -> Result<FilteredStub> {
        if !self.strict || !other.strict {
            return Err(Error::Precondition("the Day tensor is only modeled for strict stubs".into()));
        }
        let (a, la) = self.to_levels()?;
        let (b, lb) = other.to_levels()?;
        let t = a.tensor(&b)?;
        let mut levels: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
        for &deg in t.ranks().keys() {
            let mut v = Vec::with_capacity(t.rank(deg));
            for (p, q, _) in a.tensor_blocks(&b, deg) {
                for x in &la[&p] {
                    for y in &lb[&q] {
                        v.push(x + y);
                    }
                }
            }
            levels.insert(deg, v);
        }
        Self::from_levels(&t, &levels, self.n().min(other.n()))
    }

    /// The `E_1` page: `H_{-s}(gr^s)` with `d_1` the connecting map of `F^{s+2} ⊂ F^{s+1} ⊂ F^s`.
    pub fn coherent_cochain(&self) -> Result<CoherentCochain> {
        let ring = self.ring();
        let n = self.n();
        let grs = (0..n).map(|s| self.gr(s)).collect::<Result<Vec<_>>>()?;
        let bases = grs
            .iter()
            .enumerate()
            .map(|(s, g)| g.homology_basis(-(s as i32)))
            .collect::<Result<Vec<_>>>()?;
        let mut d1 = BTreeMap::new();
        for s in 0..n.saturating_sub(1) {
            // gr^s in degree -s is F^{s+1}_{-s-1} ⊕ F^s_{-s}; gr^{s+1} in degree -s-1 is
            // F^{s+2}_{-s-2} ⊕ F^{s+1}_{-s-1}. The snake map sends (a, b) to (0, -a).
            let deg = -(s as i32);
            let a_len = self.levels[s + 1].rank(deg - 1);
            let lower_off = if s + 2 < n { self.levels[s + 2].rank(deg - 2) } else { 0 };
            let src = &bases[s];
            let tgt = &bases[s + 1];
            let mut cols = Vec::with_capacity(src.len());
            for j in 0..src.len() {
                let g = src.generators.dense_column(j);
                let mut image = vec![Scalar::zero(); grs[s + 1].rank(deg - 1)];
                for k in 0..a_len {
                    image[lower_off + k] = -g[k].clone();
                }
                let coords = tgt.coordinates(&image)?;
                cols.push(coords.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
            }
            d1.insert(s as i32, Matrix::from_col_entries(ring, tgt.len(), cols)?);
        }
        let terms = bases.iter().enumerate().map(|(s, b)| (s as i32, b.module.clone())).collect();
        let orders = bases.into_iter().enumerate().map(|(s, b)| (s as i32, b.orders)).collect();
        CoherentCochain::new(ring, terms, orders, d1)
    }

    /// Transports the stub along a change of ring (e.g. `Z → F_p`).
    pub fn change_ring(&self, ring: RingSpec) -> Result<FilteredStub> {
        let levels = self.levels.iter().map(|c| c.change_ring(ring)).collect::<Result<Vec<_>>>()?;
        let mut transitions = Vec::new();
        for (s, f) in self.transitions.iter().enumerate() {
            let comps = f.components().iter().map(|(i, m)| m.change_ring(ring).map(|x| (*i, x))).collect::<Result<_>>()?;
            transitions.push(ChainMap::new(levels[s + 1].clone(), levels[s].clone(), comps)?);
        }
        Self::new(levels, transitions)
    }

    pub fn to_json(&self) -> Value {
        let transitions: Vec<Value> = self
            .transitions
            .iter()
            .map(|f| {
                let mut comps = Map::new();
                for (i, m) in f.components() {
                    comps.insert(i.to_string(), m.to_json());
                }
                json!({"components": comps})
            })
            .collect();
        json!({
            "N": self.n(),
            "levels": self.levels.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "transitions": transitions,
            "strict": self.strict,
        })
    }

    pub fn from_json(v: &Value) -> Result<FilteredStub> {
        let bad = |m: &str| Error::Parse(format!("stub: {m}"));
        let levels: Vec<ChainComplex> = v["levels"]
            .as_array()
            .ok_or_else(|| bad("missing levels"))?
            .iter()
            .map(ChainComplex::from_json)
            .collect::<Result<_>>()?;
        if let Some(n) = v.get("N").and_then(|x| x.as_u64()) {
            if n as usize != levels.len() {
                return Err(bad("N does not match the number of levels"));
            }
        }
        let empty = vec![];
        let ts = v.get("transitions").and_then(|x| x.as_array()).unwrap_or(&empty);
        let mut transitions = Vec::new();
        for (s, t) in ts.iter().enumerate() {
            let (src, tgt) = match (levels.get(s + 1), levels.get(s)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(bad("too many transitions")),
            };
            let mut comps = BTreeMap::new();
            if let Some(obj) = t.get("components").and_then(|x| x.as_object()) {
                for (k, m) in obj {
                    let i: i32 = k.parse().map_err(|_| bad("bad degree"))?;
                    comps.insert(i, Matrix::from_json(m)?);
                }
            }
            transitions.push(ChainMap::new(src.clone(), tgt.clone(), comps)?);
        }
        let stub = Self::new(levels, transitions)?;
        if let Some(claimed) = v.get("strict").and_then(|x| x.as_bool()) {
            if claimed && !stub.strict {
                return Err(Error::InvalidChainMap("stub marked strict but a transition is not split injective".into()));
            }
        }
        Ok(stub)
    }
}

/// Rewrites `c` in new bases: `bases[i]` has columns in `C_i` spanning a subcomplex, split
/// injective, and the new differential is `L_{i-1} d_i B_i` with `L` a left inverse.
pub(crate) fn change_basis(c: &ChainComplex, bases: &BTreeMap<i32, Matrix>) -> Result<ChainComplex> {
    let ring = c.ring();
    let ranks: BTreeMap<i32, usize> = bases.iter().map(|(i, b)| (*i, b.cols())).collect();
    let mut d = BTreeMap::new();
    for (&i, b) in bases {
        let (Some(m), Some(bl)) = (c.differential_ref(i), bases.get(&(i - 1))) else { continue };
        if b.cols() == 0 || bl.cols() == 0 {
            continue;
        }
        let l = left_inverse(bl)?;
        d.insert(i, l.mul(m)?.mul(b)?);
    }
    ChainComplex::new(ring, ranks, d)
}

/// The Rees module of a stub: `⊕_s F^s` in weight `s`, with `t` of weight `-1`.
#[derive(Clone, Debug)]
pub struct Rees {
    pub graded: GradedComplex,
    /// `t[s] : F^{s+1} → F^s`.
    pub t: BTreeMap<i32, ChainMap>,
    n: usize,
}

impl Rees {
    /// `cofib(t)` weightwise, which recovers the associated graded.
    pub fn cone_of_t(&self) -> Result<GradedComplex> {
        let ring = self.graded.ring();
        let mut pieces = BTreeMap::new();
        for s in 0..self.n as i32 {
            let f = match self.t.get(&s) {
                Some(f) => f.clone(),
                None => ChainMap::zero(&ChainComplex::zero(ring), &self.graded.piece(s)),
            };
            pieces.insert(s, cone(&f)?);
        }
        GradedComplex::new(ring, pieces)
    }
}

/// A cochain complex of finitely generated modules, `term_s → term_{s+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentCochain {
    ring: RingSpec,
    pub terms: BTreeMap<i32, FgModule>,
    /// Orders of the chosen generators of each term (`None` for free generators).
    pub orders: BTreeMap<i32, Vec<Option<BigInt>>>,
    /// `d1[s] : term_s → term_{s+1}` on the chosen generators.
    pub d1: BTreeMap<i32, Matrix>,
}

impl CoherentCochain {
    pub fn new(
        ring: RingSpec,
        terms: BTreeMap<i32, FgModule>,
        orders: BTreeMap<i32, Vec<Option<BigInt>>>,
        d1: BTreeMap<i32, Matrix>,
    ) -> Result<Self> {
        let c = CoherentCochain { ring, terms, orders, d1 };
        for (s, m) in &c.d1 {
            if let Some(m2) = c.d1.get(&(s + 1)) {
                let sq = m2.mul(m)?;
                let ord = c.orders.get(&(s + 2)).cloned().unwrap_or_default();
                for j in 0..sq.cols() {
                    for (r, v) in sq.column(j) {
                        let zero = match &ord.get(*r).cloned().flatten() {
                            Some(o) => (v.to_integer() % o).is_zero(),
                            None => v.is_zero(),
                        };
                        if !zero {
                            return Err(Error::InvalidComplex(format!("d1 ∘ d1 != 0 at weight {s}")));
                        }
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Map::new();
        for (s, m) in &self.terms {
            terms.insert(s.to_string(), json!(m.to_string()));
        }
        let mut d1 = Map::new();
        for (s, m) in &self.d1 {
            d1.insert(s.to_string(), m.to_json());
        }
        json!({"terms": terms, "d1": d1})
    }
}
