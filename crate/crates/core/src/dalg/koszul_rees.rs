//! Koszul–Rees models for `S = R/(f_1..f_c)` with `R = k[x_1..x_n]` and `f` a regular sequence.
//!
//! The model is the graded-commutative algebra `R ⊗ P[ξ] ⊗ Λ[e] ⊗ Λ[dx]` where `P[ξ]` is
//! a polynomial algebra (infinitesimal flavor) or a divided power algebra (crystalline
//! flavor), with the derivation `D e_j = ξ_j − f_j`, and optionally `D x_i = dx_i`,
//! `D γ_m(ξ_j) = γ_{m-1}(ξ_j) df_j`. The filtration level of `x^a γ_b e_J dx_K` is `|b| + |K|`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::coeffs::PolyCoeffs;
use super::poly::{Monomial, Poly};
use super::presentation::{AlgebraPresentation, Regularity};
use crate::complexes::{cone, ChainComplex, ChainMap, HomologyTable};
use crate::error::{Error, Result};
use crate::graded::FilteredStub;
use crate::linalg::{cokernel, int, kernel_basis, FgModule, Matrix, RingSpec, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `ξ^b`: the Rees algebra of the I-adic filtration.
    Sym,
    /// `γ_b(ξ)`: the pd envelope with its pd filtration.
    Divided,
}

/// Basis element `x^a ξ^b e_J dx_K` (or `γ_b` in the divided flavor).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KrElem {
    pub a: Monomial,
    pub b: Vec<u32>,
    pub j: u32,
    pub k: u32,
}

impl KrElem {
    pub fn level(&self) -> i64 {
        self.b.iter().map(|x| *x as i64).sum::<i64>() + self.k.count_ones() as i64
    }

    pub fn degree(&self) -> i32 {
        self.j.count_ones() as i32 - self.k.count_ones() as i32
    }
}

/// The model modulo `F^N`, over the ground ring, with the level of every basis vector.
#[derive(Clone, Debug)]
pub struct KoszulRees {
    pub flavor: Flavor,
    pub n: usize,
    pub bound: Option<i64>,
    pub complex: ChainComplex,
    pub levels: BTreeMap<i32, Vec<i64>>,
    pub labels: BTreeMap<i32, Vec<KrElem>>,
}

impl KoszulRees {
    pub fn stub(&self) -> Result<FilteredStub> {
        FilteredStub::from_levels(&self.complex, &self.levels, self.n)
    }

    /// The subquotient complex spanned by the basis vectors of level exactly `s`.
    pub fn graded_piece(&self, s: usize) -> Result<ChainComplex> {
        let s = s as i64;
        let idx: BTreeMap<i32, Vec<usize>> =
            self.levels.iter().map(|(i, l)| (*i, (0..l.len()).filter(|&j| l[j] == s).collect())).collect();
        let ring = self.complex.ring();
        let ranks = idx.iter().map(|(i, v)| (*i, v.len())).collect();
        let mut d = BTreeMap::new();
        for (i, cols) in &idx {
            let Some(rows) = idx.get(&(i - 1)) else { continue };
            if cols.is_empty() || rows.is_empty() {
                continue;
            }
            d.insert(*i, self.complex.differential(*i).select_cols(cols).select_rows(rows));
        }
        ChainComplex::new(ring, ranks, d)
    }
}

/// A default internal-degree bound large enough for the examples: `(N + c)·maxdeg + Σ deg f + n + 1`.
pub fn default_bound(p: &AlgebraPresentation, n: usize) -> i64 {
    let degs = p.relation_degrees();
    let maxdeg = degs.iter().copied().max().unwrap_or(1).max(1);
    (n + degs.len()) as i64 * maxdeg + degs.iter().sum::<i64>() + p.vars().len() as i64 + 1
}

fn subsets(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

/// All exponent vectors of length `c` with total at most `max`.
fn exponent_vectors(c: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..c {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for e in 0..=(max - used) {
                let mut w = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Builds the model for the relations of `p` viewed as a regular sequence in `k[vars]`.
pub fn koszul_rees(p: &AlgebraPresentation, flavor: Flavor, forms: bool, n: usize, bound: Option<i64>) -> Result<KoszulRees> {
    let ring = p.ring();
    let nv = p.vars().len();
    let rels = p.relations();
    let c = rels.len();
    if n == 0 {
        return Err(Error::InvalidComplex("a stub needs N ≥ 1 levels".into()));
    }
    if nv > 16 || c > 16 {
        return Err(Error::Unsupported("at most 16 variables and 16 relations".into()));
    }
    if flavor == Flavor::Divided && c > 0 && matches!(ring, RingSpec::PrimeField(_)) {
        return Err(Error::pre("pd envelopes are modeled only over a Z-flat base or a field of characteristic 0"));
    }
    let bound = if nv > 0 {
        if !p.relations_homogeneous() {
            return Err(Error::Unsupported("truncating k[x] needs homogeneous relations".into()));
        }
        let dflt = default_bound(p, n);
        // a complete intersection of dimension 0 is finite over k, so every class must be kept
        Some(if c == nv { bound.map_or(dflt, |b| b.max(dflt)) } else { bound.unwrap_or(dflt) })
    } else {
        None
    };
    let vw = p.var_weights().to_vec();
    let fdeg = p.relation_degrees();
    let poly = PolyCoeffs::polynomial(ring, nv);

    let mut by_degree: BTreeMap<i32, Vec<KrElem>> = BTreeMap::new();
    let max_k = if forms { nv } else { 0 };
    for k in subsets(max_k) {
        let kk = k.count_ones() as usize;
        if kk >= n {
            continue;
        }
        for b in exponent_vectors(c, (n - 1 - kk) as u32) {
            for j in subsets(c) {
                let mut used: i64 = (0..nv).filter(|i| k >> i & 1 == 1).map(|i| vw[i]).sum();
                used += (0..c).map(|t| (b[t] as i64 + (j >> t & 1) as i64) * fdeg[t]).sum::<i64>();
                let monos = match bound {
                    Some(bd) if bd < used => continue,
                    Some(bd) => poly.basis_monomials(Some(bd - used)),
                    None => vec![Vec::new()],
                };
                for a in monos {
                    let e = KrElem { a, b: b.clone(), j, k };
                    by_degree.entry(e.degree()).or_default().push(e);
                }
            }
        }
    }
    for v in by_degree.values_mut() {
        v.sort();
    }
    let index: HashMap<KrElem, usize> =
        by_degree.values().flat_map(|v| v.iter().enumerate().map(|(i, e)| (e.clone(), i))).collect();

    let df: Vec<Vec<Poly>> = rels.iter().map(|f| (0..nv).map(|i| f.derivative(i)).collect()).collect();
    let image = |e: &KrElem| -> BTreeMap<KrElem, Scalar> {
        let mut out: BTreeMap<KrElem, Scalar> = BTreeMap::new();
        let mut push = |t: KrElem, v: Scalar| {
            if t.level() < n as i64 && !v.is_zero() {
                *out.entry(t).or_insert_with(Scalar::zero) += v;
            }
        };
        // Koszul part
        let mut t = 0;
        for jj in 0..c {
            if e.j >> jj & 1 == 0 {
                continue;
            }
            let sign = if t % 2 == 0 { int(1) } else { int(-1) };
            t += 1;
            let j2 = e.j & !(1 << jj);
            let mut b2 = e.b.clone();
            b2[jj] += 1;
            let coef = match flavor {
                Flavor::Sym => int(1),
                Flavor::Divided => int(b2[jj]),
            };
            push(KrElem { a: e.a.clone(), b: b2, j: j2, k: e.k }, &sign * coef);
            for (m, v) in rels[jj].terms() {
                let a2: Monomial = e.a.iter().zip(m).map(|(x, y)| x + y).collect();
                push(KrElem { a: a2, b: e.b.clone(), j: j2, k: e.k }, -(&sign * v));
            }
        }
        if forms {
            let jsign = if e.j.count_ones() % 2 == 0 { int(1) } else { int(-1) };
            let wedge = |i: usize| -> Option<(u32, Scalar)> {
                if e.k >> i & 1 == 1 {
                    return None;
                }
                let before = (e.k & ((1u32 << i) - 1)).count_ones();
                let s = if before % 2 == 0 { jsign.clone() } else { -jsign.clone() };
                Some((e.k | 1 << i, s))
            };
            for i in 0..nv {
                if e.a[i] == 0 {
                    continue;
                }
                if let Some((k2, s)) = wedge(i) {
                    let mut a2 = e.a.clone();
                    a2[i] -= 1;
                    push(KrElem { a: a2, b: e.b.clone(), j: e.j, k: k2 }, s * int(e.a[i]));
                }
            }
            for jj in 0..c {
                if e.b[jj] == 0 {
                    continue;
                }
                let mut b2 = e.b.clone();
                b2[jj] -= 1;
                let coef = match flavor {
                    Flavor::Sym => int(e.b[jj]),
                    Flavor::Divided => int(1),
                };
                for (i, g) in df[jj].iter().enumerate() {
                    let Some((k2, s)) = wedge(i) else { continue };
                    for (m, v) in g.terms() {
                        let a2: Monomial = e.a.iter().zip(m).map(|(x, y)| x + y).collect();
                        push(KrElem { a: a2, b: b2.clone(), j: e.j, k: k2 }, &s * &coef * v);
                    }
                }
            }
        }
        out
    };

    let mut d = BTreeMap::new();
    for (&i, elems) in &by_degree {
        let Some(targets) = by_degree.get(&(i - 1)) else { continue };
        let mut cols = Vec::with_capacity(elems.len());
        for e in elems {
            let mut col = Vec::new();
            for (t, v) in image(e) {
                let v = ring.red(v);
                if v.is_zero() {
                    continue;
                }
                let r = *index.get(&t).ok_or_else(|| Error::dim("differential leaves the truncated model"))?;
                col.push((r, v));
            }
            cols.push(col);
        }
        d.insert(i, Matrix::from_col_entries(ring, targets.len(), cols)?);
    }
    let ranks = by_degree.iter().map(|(i, v)| (*i, v.len())).collect();
    let complex = ChainComplex::new(ring, ranks, d)?;
    let levels = by_degree.iter().map(|(i, v)| (*i, v.iter().map(KrElem::level).collect())).collect();
    Ok(KoszulRees { flavor, n, bound, complex, levels, labels: by_degree })
}

fn require_regseq(p: &AlgebraPresentation) -> Result<()> {
    if p.regularity() != Regularity::RegularSequence {
        return Err(Error::pre("the relations must be asserted to form a regular sequence"));
    }
    Ok(())
}

/// The I-adic stub `I^s/I^N` of `R = k[vars]` for `I` generated by the relations.
pub fn infinitesimal_stub(p: &AlgebraPresentation, n: usize, bound: Option<i64>) -> Result<FilteredStub> {
    require_regseq(p)?;
    koszul_rees(p, Flavor::Sym, false, n, bound)?.stub()
}

/// The Hodge-filtered de Rham stub: `σ^{≥⋆}Ω^•` for polynomial rings and the pd envelope
/// tensored with `Ω^•` (total pd + Hodge filtration) for regular quotients.
pub fn derham_stub(p: &AlgebraPresentation, n: usize, bound: Option<i64>) -> Result<FilteredStub> {
    match p.regularity() {
        Regularity::Smooth => koszul_rees(p, Flavor::Sym, true, n, bound)?.stub(),
        Regularity::RegularSequence => koszul_rees(p, Flavor::Divided, true, n, bound)?.stub(),
        Regularity::Unknown => Err(Error::pre("de Rham stubs need smooth or regular-sequence input")),
    }
}

/// The pd envelope as explicit linear algebra on divided monomials `x^a γ_b`, `|b| < N`.
#[derive(Clone, Debug)]
pub struct PdAlgebraStub {
    pub base: AlgebraPresentation,
    pub pd_generators: Vec<String>,
    pub n: usize,
    pub bound: Option<i64>,
    /// Basis of the truncated free divided power algebra over `k`.
    pub monomials: Vec<(Monomial, Vec<u32>)>,
    /// Columns are the products `(ξ_j − f_j)·x^a γ_b`, truncated at pd-weight `N`.
    pub relations: Matrix,
}

impl PdAlgebraStub {
    pub fn new(p: &AlgebraPresentation, n: usize, bound: Option<i64>) -> Result<Self> {
        require_regseq(p)?;
        let ring = p.ring();
        if matches!(ring, RingSpec::PrimeField(_)) {
            return Err(Error::pre("pd envelopes are modeled only over a Z-flat base or a field of characteristic 0"));
        }
        let nv = p.vars().len();
        let c = p.relations().len();
        let bound = if nv > 0 {
            if !p.relations_homogeneous() {
                return Err(Error::Unsupported("truncating k[x] needs homogeneous relations".into()));
            }
            Some(bound.unwrap_or_else(|| default_bound(p, n)))
        } else {
            None
        };
        let fdeg = p.relation_degrees();
        let poly = PolyCoeffs::polynomial(ring, nv);
        let wb = |b: &[u32]| -> i64 { b.iter().zip(&fdeg).map(|(x, d)| *x as i64 * d).sum() };
        let mut monomials = Vec::new();
        for b in exponent_vectors(c, (n - 1) as u32) {
            match bound {
                Some(bd) if bd < wb(&b) => continue,
                Some(bd) => monomials.extend(poly.basis_monomials(Some(bd - wb(&b))).into_iter().map(|a| (a, b.clone()))),
                None => monomials.push((Vec::new(), b)),
            }
        }
        monomials.sort();
        let index: HashMap<(Monomial, Vec<u32>), usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cols = Vec::new();
        for (a, b) in &monomials {
            for (j, f) in p.relations().iter().enumerate() {
                let w = poly_weight(a, p.var_weights()) + wb(b) + fdeg[j];
                if bound.is_some_and(|bd| w > bd) {
                    continue;
                }
                let mut col: BTreeMap<usize, Scalar> = BTreeMap::new();
                let mut b2 = b.clone();
                b2[j] += 1;
                if b2.iter().sum::<u32>() < n as u32 {
                    col.insert(index[&(a.clone(), b2.clone())], int(b2[j]));
                }
                for (m, v) in f.terms() {
                    let a2: Monomial = a.iter().zip(m).map(|(x, y)| x + y).collect();
                    *col.entry(index[&(a2, b.clone())]).or_insert_with(Scalar::zero) -= v;
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
        }
        let relations = Matrix::from_col_entries(ring, monomials.len(), cols)?;
        let pd_generators = (1..=c).map(|j| format!("xi{j}")).collect();
        Ok(PdAlgebraStub { base: p.clone(), pd_generators, n, bound, monomials, relations })
    }

    /// `γ_a · γ_b = Π_j C(a_j + b_j, a_j) · γ_{a+b}`.
    pub fn product(a: &[u32], b: &[u32]) -> (BigInt, Vec<u32>) {
        let mut coef = BigInt::one();
        for (x, y) in a.iter().zip(b) {
            coef *= binomial_big(x + y, *x);
        }
        (coef, a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    fn weight_rows(&self, pred: impl Fn(u32) -> bool) -> Vec<usize> {
        (0..self.monomials.len()).filter(|&i| pred(self.monomials[i].1.iter().sum())).collect()
    }

    /// `D / F^N` as a module over the ground ring.
    pub fn quotient(&self) -> FgModule {
        cokernel(&self.relations)
    }

    /// `gr^s = F^s / F^{s+1}`, with `F^s` the image of the span of `γ_b`, `|b| ≥ s`.
    ///
    /// Computed as the cokernel of the weight-`s` part of those relations whose components
    /// of weight below `s` cancel.
    pub fn gr(&self, s: usize) -> Result<FgModule> {
        let s = s as u32;
        let low = self.weight_rows(|w| w < s);
        let here = self.weight_rows(|w| w == s);
        let k = kernel_basis(&self.relations.select_rows(&low));
        let m = self.relations.select_rows(&here).mul(&k)?;
        Ok(cokernel(&m))
    }
}

fn poly_weight(a: &[u32], w: &[i64]) -> i64 {
    a.iter().zip(w).map(|(x, y)| *x as i64 * y).sum()
}

fn binomial_big(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The pd envelope `D_R(I)/F^N` both as divided-monomial linear algebra and as a stub.
pub fn pd_envelope_stub(p: &AlgebraPresentation, n: usize, bound: Option<i64>) -> Result<(PdAlgebraStub, FilteredStub)> {
    let oracle = PdAlgebraStub::new(p, n, bound)?;
    let stub = koszul_rees(p, Flavor::Divided, false, n, bound)?.stub()?;
    Ok((oracle, stub))
}

/// The canonical map `Sym^s(I/I²) → Γ^s(I/I²)` on graded pieces, realized by `ξ^b ↦ b!·γ_b`.
#[derive(Clone, Debug)]
pub struct CrystallizationReport {
    pub s: usize,
    pub description: String,
    /// `s!` in the ground ring.
    pub factor: Scalar,
    pub source: HomologyTable,
    pub target: HomologyTable,
    /// Induced maps on homology, in the generators of the homology bases.
    pub induced: BTreeMap<i32, Matrix>,
    pub is_iso: bool,
    pub is_zero: bool,
    pub cone_homology: HomologyTable,
}

pub fn crystallization_gr_compare(p: &AlgebraPresentation, s: usize, bound: Option<i64>) -> Result<CrystallizationReport> {
    require_regseq(p)?;
    if p.relations().is_empty() {
        return Err(Error::pre("the cotangent complex must have the form Q[1]"));
    }
    let n = s + 1;
    let ring = p.ring();
    let inf = koszul_rees(p, Flavor::Sym, false, n, bound)?;
    let pd = koszul_rees(p, Flavor::Divided, false, n, bound)?;
    let src = inf.graded_piece(s)?;
    let tgt = pd.graded_piece(s)?;
    let mut comps = BTreeMap::new();
    for (&i, elems) in &inf.labels {
        let keep: Vec<&KrElem> = elems.iter().filter(|e| e.level() == s as i64).collect();
        if keep.is_empty() {
            continue;
        }
        let cols = keep
            .iter()
            .enumerate()
            .map(|(j, e)| {
                let f: BigInt = e.b.iter().map(|x| factorial(*x)).product();
                vec![(j, ring.red(Scalar::from_integer(f)))].into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        comps.insert(i, Matrix::from_col_entries(ring, keep.len(), cols)?);
    }
    let map = ChainMap::new(src.clone(), tgt.clone(), comps)?;
    let mut induced = BTreeMap::new();
    for &i in src.ranks().keys() {
        induced.insert(i, map.induced_on_homology(i)?);
    }
    let cone_homology = cone(&map)?.homology();
    let is_iso = cone_homology.is_zero();
    let is_zero = induced.values().all(Matrix::is_zero);
    Ok(CrystallizationReport {
        s,
        description: format!("x^({s}) -> {s}!*gamma_{s}"),
        factor: ring.red(Scalar::from_integer(factorial(s as u32))),
        source: src.homology(),
        target: tgt.homology(),
        induced,
        is_iso,
        is_zero,
        cone_homology,
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> AlgebraPresentation {
        AlgebraPresentation::preset("Fp-over-Z", p).unwrap()
    }

    #[test]
    fn infinitesimal_of_fp_is_p_adic() {
        let st = infinitesimal_stub(&fp(3), 4, None).unwrap();
        let adic = FilteredStub::principal_adic(RingSpec::Integers, &int(3), 4).unwrap();
        assert_eq!(st.gr_homology().unwrap(), adic.gr_homology().unwrap());
        assert_eq!(st.level(0).homology().to_string(), "H_0 = Z/81");
        for s in 0..4 {
            assert_eq!(st.gr(s).unwrap().homology().to_string(), "H_0 = Z/3");
        }
    }

    #[test]
    fn x_adic_stub() {
        let p = AlgebraPresentation::parse_parts("Z", &["x"], &["x"], "regseq").unwrap();
        let st = infinitesimal_stub(&p, 3, Some(6)).unwrap();
        for s in 0..3 {
            assert_eq!(st.gr(s).unwrap().homology().to_string(), "H_0 = Z");
        }
        assert_eq!(st.level(0).homology().to_string(), "H_0 = Z^3");
    }

    #[test]
    fn derham_of_fp_has_fp_pieces() {
        let st = derham_stub(&fp(2), 3, None).unwrap();
        for s in 0..3 {
            assert_eq!(st.gr(s).unwrap().homology().to_string(), "H_0 = Z/2");
        }
    }

    #[test]
    fn derham_of_polynomial_ring_is_hodge() {
        let p = AlgebraPresentation::preset("Zx", 2).unwrap();
        let st = derham_stub(&p, 2, Some(4)).unwrap();
        assert!(st.is_beilinson_static().unwrap());
        // gr^0 = Z[x] (x^0..x^4), gr^1 = Z[x]dx[-1] (x^0dx..x^3dx)
        assert_eq!(st.gr(0).unwrap().homology().to_string(), "H_0 = Z^5");
        assert_eq!(st.gr(1).unwrap().homology().to_string(), "H_-1 = Z^4");
        // de Rham cohomology of Z[x] through degree 4: Z in degree 0, coker of diag(1,2,3,4) in H^1
        assert_eq!(st.level(0).homology().to_string(), "H_-1 = Z/2 + Z/12, H_0 = Z");
    }

    #[test]
    fn pd_oracle_agrees_with_model() {
        for p in [2u64, 3] {
            let (oracle, stub) = pd_envelope_stub(&fp(p), 4, None).unwrap();
            for s in 0..4 {
                let h = stub.gr(s).unwrap().homology();
                assert_eq!(h.get(0), oracle.gr(s).unwrap());
                assert_eq!(h.get(0).to_string(), format!("Z/{p}"));
            }
        }
        assert_eq!(PdAlgebraStub::product(&[2, 1], &[1, 1]), (BigInt::from(6), vec![3, 2]));
    }

    #[test]
    fn pd_over_q_has_rank_one_pieces() {
        let p = AlgebraPresentation::parse_parts("Q", &["x"], &["x"], "regseq").unwrap();
        let (oracle, stub) = pd_envelope_stub(&p, 3, Some(5)).unwrap();
        for s in 0..3 {
            assert_eq!(oracle.gr(s).unwrap().to_string(), "Q");
            assert_eq!(stub.gr(s).unwrap().homology().to_string(), "H_0 = Q");
        }
    }

    #[test]
    fn crystallization_is_factorial() {
        for s in 0..5 {
            let r = crystallization_gr_compare(&fp(3), s, None).unwrap();
            assert_eq!(r.is_iso, s < 3, "s = {s}");
            assert_eq!(r.is_zero, s >= 3, "s = {s}");
        }
        let q = AlgebraPresentation::parse_parts("Q", &["x"], &["x"], "regseq").unwrap();
        assert!(crystallization_gr_compare(&q, 4, Some(8)).unwrap().is_iso);
    }

    #[test]
    fn models_satisfy_d_squared_zero() {
        let h = AlgebraPresentation::preset("hypersurface-x2", 2).unwrap();
        let m = koszul_rees(&h, Flavor::Divided, true, 3, Some(8)).unwrap();
        assert!(m.complex.total_rank() > 0);
        let xy = AlgebraPresentation::parse_parts("Z", &["x", "y"], &["x", "y^2"], "regseq").unwrap();
        koszul_rees(&xy, Flavor::Divided, true, 3, Some(7)).unwrap();
        koszul_rees(&xy, Flavor::Sym, true, 3, Some(7)).unwrap();
    }
}
