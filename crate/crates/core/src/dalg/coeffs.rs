//! Coefficients in a presented ring `k[x]/(g_1(x_1), …)` and realization of free
//! complexes over it as complexes over `k`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, Poly};
use super::presentation::{AlgebraPresentation, Regularity};
use crate::complexes::ChainComplex;
use crate::dold_kan::{Coeffs, FreeComplex, TwoBehavior};
use crate::error::{Error, Result};
use crate::linalg::{int, Matrix, RingSpec, Scalar};

/// The ring `k[x_1..x_n]` modulo monic univariate relations, one per constrained variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCoeffs {
    ring: RingSpec,
    nvars: usize,
    /// `mods[i] = [c_0, …, c_{d-1}]` for the relation `x_i^d + c_{d-1} x_i^{d-1} + … + c_0`.
    mods: Vec<Option<Vec<Scalar>>>,
    var_weights: Vec<i64>,
}

impl PolyCoeffs {
    /// The polynomial ring itself.
    pub fn polynomial(ring: RingSpec, nvars: usize) -> Self {
        PolyCoeffs { ring, nvars, mods: vec![None; nvars], var_weights: vec![1; nvars] }
    }

    /// The quotient ring presented by `p`.
    ///
    /// A constant relation over Z must be a prime and switches the ground ring to F_p;
    /// every other relation must be monic in a single variable.
    pub fn quotient(p: &AlgebraPresentation) -> Result<Self> {
        let n = p.vars().len();
        let mut ring = p.ring();
        let mut mods: Vec<Option<Vec<Scalar>>> = vec![None; n];
        for f in p.relations() {
            if let Some(c) = f.as_constant() {
                if ring != RingSpec::Integers || !c.is_integer() {
                    return Err(Error::Unsupported(format!("constant relation {} over {}", f.format(p.vars()), p.ring())));
                }
                let q = c.to_integer().abs();
                let q: u64 = q.try_into().map_err(|_| Error::Unsupported("relation constant too large".into()))?;
                ring = RingSpec::fp(q).map_err(|_| Error::Unsupported(format!("constant relation {q} is not a prime")))?;
                continue;
            }
            let support = f.support();
            if support.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "normal forms need monic univariate relations, got {}",
                    f.format(p.vars())
                )));
            }
            let i = support[0];
            let d = f.terms().keys().map(|m| m[i]).max().unwrap_or(0);
            let mut top = vec![0; n];
            top[i] = d;
            if !f.coeff(&top).is_one() || mods[i].is_some() {
                return Err(Error::Unsupported(format!(
                    "normal forms need one monic relation per variable, got {}",
                    f.format(p.vars())
                )));
            }
            let tail = (0..d)
                .map(|e| {
                    let mut m = vec![0; n];
                    m[i] = e;
                    f.coeff(&m)
                })
                .collect();
            mods[i] = Some(tail);
        }
        if ring != p.ring() {
            for t in mods.iter_mut().flatten() {
                for c in t.iter_mut() {
                    *c = ring.red(c.clone());
                }
            }
        }
        Ok(PolyCoeffs { ring, nvars: n, mods, var_weights: p.var_weights().to_vec() })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn var_weights(&self) -> &[i64] {
        &self.var_weights
    }

    /// True when the ring is a finite free `k`-module.
    pub fn is_finite(&self) -> bool {
        self.mods.iter().all(Option::is_some)
    }

    /// `k`-rank of the ring, when finite.
    pub fn k_rank(&self) -> Option<usize> {
        self.mods.iter().map(|m| m.as_ref().map(Vec::len)).product()
    }

    /// Normal form: coefficients reduced and every constrained exponent below its bound.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut cur = p.reduce(self.ring);
        for (i, m) in self.mods.iter().enumerate() {
            let Some(tail) = m else { continue };
            let d = tail.len() as u32;
            loop {
                let Some((mono, c)) = cur.terms().iter().find(|(mono, _)| mono[i] >= d).map(|(a, b)| (a.clone(), b.clone()))
                else {
                    break;
                };
                let mut rest = cur.sub(&Poly::monomial(mono.clone(), c.clone()));
                for (e, t) in tail.iter().enumerate() {
                    let mut m2 = mono.clone();
                    m2[i] = mono[i] - d + e as u32;
                    rest = rest.sub(&Poly::monomial(m2, &c * t));
                }
                cur = rest.reduce(self.ring);
            }
        }
        cur
    }

    /// Nonzero constants that are units of `k`.
    pub fn is_unit_constant(&self, a: &Poly) -> bool {
        match a.as_constant() {
            Some(c) => !c.is_zero() && self.ring.is_unit(&c),
            None => false,
        }
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        Poly::constant(self.ring.red(c), self.nvars)
    }

    /// The `k`-basis monomials of weight at most `budget` (all of them for finite rings).
    pub(crate) fn basis_monomials(&self, budget: Option<i64>) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.nvars];
        self.fill(0, budget, &mut cur, &mut out);
        out.sort();
        out
    }

    fn fill(&self, i: usize, budget: Option<i64>, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if let Some(b) = budget {
            if b < 0 {
                return;
            }
        }
        if i == self.nvars {
            out.push(cur.clone());
            return;
        }
        let w = self.var_weights[i];
        let mut e = 0u32;
        loop {
            if let Some(m) = &self.mods[i] {
                if e as usize >= m.len() {
                    break;
                }
            }
            let used = e as i64 * w;
            if let Some(b) = budget {
                if used > b {
                    break;
                }
            }
            cur[i] = e;
            self.fill(i + 1, budget.map(|b| b - used), cur, out);
            e += 1;
        }
        cur[i] = 0;
    }

    fn monomial_weight(&self, m: &[u32]) -> i64 {
        m.iter().zip(&self.var_weights).map(|(e, w)| *e as i64 * w).sum()
    }
}

impl Coeffs for PolyCoeffs {
    type E = Poly;
    fn zero(&self) -> Poly {
        Poly::zero()
    }
    fn one(&self) -> Poly {
        self.constant(int(1))
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b).reduce(self.ring)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&a.mul(b))
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.neg().reduce(self.ring)
    }
    fn from_bigint(&self, n: &BigInt) -> Poly {
        self.constant(Scalar::from_integer(n.clone()))
    }
    fn two_behavior(&self) -> TwoBehavior {
        match self.ring {
            RingSpec::Integers => TwoBehavior::NonZeroDivisor,
            RingSpec::PrimeField(p) if p.get() == 2 => TwoBehavior::Zero,
            _ => TwoBehavior::Unit,
        }
    }
    fn half(&self, a: &Poly) -> Option<Poly> {
        let h = a.scale(&Scalar::new(BigInt::one(), BigInt::from(2)));
        if self.ring == RingSpec::Integers && h.terms().values().any(|c| !c.is_integer()) {
            None
        } else {
            Some(h.reduce(self.ring))
        }
    }
}

/// A free complex over a presented ring, realized over the ground ring.
#[derive(Clone, Debug)]
pub struct Realized {
    pub complex: ChainComplex,
    /// Basis labels per degree: (generator index, monomial multiplier).
    pub labels: BTreeMap<i32, Vec<(usize, Monomial)>>,
    /// Internal-degree bound used for truncation, when the ring is infinite over `k`.
    pub bound: Option<i64>,
}

/// Restriction of scalars along `k → R`.
///
/// When `R` has unconstrained variables the result keeps basis elements of internal
/// degree `≤ bound`; this is a direct summand only for homogeneous differentials,
/// which is checked.
pub fn realize(c: &FreeComplex<PolyCoeffs>, bound: Option<i64>) -> Result<Realized> {
    let co = &c.coeffs;
    let bound = if co.is_finite() { None } else { Some(bound.ok_or_else(|| Error::pre("an internal-degree bound is needed over an infinite ring"))?) };
    let mut labels: BTreeMap<i32, Vec<(usize, Monomial)>> = BTreeMap::new();
    let mut index: BTreeMap<i32, HashMap<(usize, Monomial), usize>> = BTreeMap::new();
    for (&i, &r) in &c.ranks {
        let mut lab = Vec::new();
        for j in 0..r {
            let budget = bound.map(|b| b - c.weight(i, j));
            for m in co.basis_monomials(budget) {
                lab.push((j, m));
            }
        }
        index.insert(i, lab.iter().cloned().enumerate().map(|(k, l)| (l, k)).collect());
        labels.insert(i, lab);
    }
    if bound.is_some() {
        for (&i, cols) in &c.d {
            for (j, col) in cols.iter().enumerate() {
                for (r, p) in col {
                    let target = c.weight(i - 1, *r);
                    if !p.terms().keys().all(|m| target + co.monomial_weight(m) == c.weight(i, j)) {
                        return Err(Error::Unsupported(
                            "truncating an infinite ring needs a homogeneous differential".into(),
                        ));
                    }
                }
            }
        }
    }
    let mut d = BTreeMap::new();
    for (&i, cols) in &c.d {
        let (Some(src), Some(tgt)) = (labels.get(&i), index.get(&(i - 1))) else { continue };
        if src.is_empty() || tgt.is_empty() {
            continue;
        }
        let mut out_cols = Vec::with_capacity(src.len());
        for (j, m) in src {
            let shift = Poly::monomial(m.clone(), int(1));
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (r, p) in &cols[*j] {
                for (m2, v) in co.reduce(&p.mul(&shift)).terms() {
                    let k = tgt.get(&(*r, m2.clone())).ok_or_else(|| Error::dim("realized image leaves the truncation"))?;
                    *acc.entry(*k).or_insert_with(Scalar::zero) += v;
                }
            }
            out_cols.push(acc.into_iter().map(|(k, v)| (k, co.ring.red(v))).filter(|(_, v)| !v.is_zero()).collect());
        }
        d.insert(i, Matrix::from_col_entries(co.ring, tgt.len(), out_cols)?);
    }
    let ranks = labels.iter().map(|(i, l)| (*i, l.len())).collect();
    let complex = ChainComplex::new(co.ring, ranks, d)?;
    Ok(Realized { complex, labels, bound })
}

/// Cancels differential entries that are unit constants (Gaussian elimination),
/// producing a homotopy equivalent free complex.
pub fn minimize(c: &FreeComplex<PolyCoeffs>) -> FreeComplex<PolyCoeffs> {
    let mut c = c.clone();
    let co = c.coeffs.clone();
    'outer: loop {
        let degrees: Vec<i32> = c.d.keys().copied().collect();
        for i in degrees {
            let cols = &c.d[&i];
            let found = cols.iter().enumerate().find_map(|(j, col)| {
                col.iter().find(|(_, v)| co.is_unit_constant(v)).map(|(r, v)| (j, *r, v.clone()))
            });
            let Some((j, r, u)) = found else { continue };
            let uinv = co.constant(co.ring().inv(&u.as_constant().expect("constant")).expect("unit"));
            let dcol_j: Vec<(usize, Poly)> = cols[j].clone();
            let mut new_cols = Vec::new();
            for (jj, col) in cols.iter().enumerate() {
                if jj == j {
                    continue;
                }
                let mut acc: BTreeMap<usize, Poly> = col.iter().cloned().collect();
                if let Some(delta) = col.iter().find(|(rr, _)| *rr == r).map(|(_, v)| v.clone()) {
                    let factor = co.mul(&uinv, &delta);
                    for (rr, g) in &dcol_j {
                        let e = acc.entry(*rr).or_insert_with(Poly::zero);
                        *e = co.sub(e, &co.mul(g, &factor));
                    }
                }
                new_cols.push(
                    acc.into_iter()
                        .filter(|(rr, v)| *rr != r && !v.is_zero())
                        .map(|(rr, v)| (if rr > r { rr - 1 } else { rr }, v))
                        .collect(),
                );
            }
            c.d.insert(i, new_cols);
            if let Some(up) = c.d.get_mut(&(i + 1)) {
                for col in up.iter_mut() {
                    *col = col.iter().filter(|(rr, _)| *rr != j).map(|(rr, v)| (if *rr > j { rr - 1 } else { *rr }, v.clone())).collect();
                }
            }
            if let Some(down) = c.d.get_mut(&(i - 1)) {
                down.remove(r);
            }
            *c.ranks.get_mut(&i).unwrap() -= 1;
            *c.ranks.get_mut(&(i - 1)).unwrap() -= 1;
            if let Some(w) = c.weights.get_mut(&i) {
                w.remove(j);
            }
            if let Some(w) = c.weights.get_mut(&(i - 1)) {
                w.remove(r);
            }
            continue 'outer;
        }
        break;
    }
    c.ranks.retain(|_, r| *r > 0);
    let ranks = c.ranks.clone();
    c.d.retain(|i, _| ranks.contains_key(i) && ranks.contains_key(&(i - 1)));
    c.weights.retain(|i, _| ranks.contains_key(i));
    c
}

/// Ensures the presentation is one the two-term cotangent model covers.
pub(crate) fn require_lci(p: &AlgebraPresentation) -> Result<()> {
    match p.regularity() {
        Regularity::Smooth if !p.relations().is_empty() => {
            Err(Error::Unsupported("smooth presentations with relations are not modeled".into()))
        }
        Regularity::Unknown => Err(Error::pre("regularity is unknown; the two-term cotangent model needs smooth or regular-sequence input")),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dalg::presentation::AlgebraPresentation;

    #[test]
    fn quotient_normal_form() {
        let p = AlgebraPresentation::parse_parts("Z", &["x"], &["x^2 - 3"], "regseq").unwrap();
        let r = PolyCoeffs::quotient(&p).unwrap();
        assert_eq!(r.k_rank(), Some(2));
        let x = Poly::var(0, 1);
        // x^3 = 3x
        assert_eq!(r.pow(&x, 3), Poly::parse("3*x", p.vars()).unwrap());
        let fp = AlgebraPresentation::parse_parts("Z", &[], &["5"], "regseq").unwrap();
        assert_eq!(PolyCoeffs::quotient(&fp).unwrap().ring(), RingSpec::fp(5).unwrap());
        let bad = AlgebraPresentation::parse_parts("Z", &["x", "y"], &["x*y"], "regseq").unwrap();
        assert!(PolyCoeffs::quotient(&bad).is_err());
    }

    #[test]
    fn realize_multiplication_by_two_x() {
        // R = Z[x]/(x^2), the map R --2x--> R
        let p = AlgebraPresentation::parse_parts("Z", &["x"], &["x^2"], "regseq").unwrap();
        let co = PolyCoeffs::quotient(&p).unwrap();
        let mut c = FreeComplex::zero(co.clone());
        c.ranks.insert(0, 1);
        c.ranks.insert(1, 1);
        c.d.insert(1, vec![vec![(0, Poly::parse("2*x", p.vars()).unwrap())]]);
        let r = realize(&c, None).unwrap();
        assert_eq!(r.complex.homology().to_string(), "H_0 = Z + Z/2, H_1 = Z");
    }

    #[test]
    fn realize_truncates_homogeneous_complexes() {
        let co = PolyCoeffs::polynomial(RingSpec::Integers, 1);
        let mut c = FreeComplex::zero(co);
        c.ranks.insert(0, 1);
        c.ranks.insert(1, 1);
        c.weights.insert(0, vec![0]);
        c.weights.insert(1, vec![1]);
        c.d.insert(1, vec![vec![(0, Poly::var(0, 1))]]);
        // Z[x] --x--> Z[x] has homology Z in degree 0
        let r = realize(&c, Some(5)).unwrap();
        assert_eq!(r.complex.homology().to_string(), "H_0 = Z");
        let mut bad = c.clone();
        bad.weights.insert(1, vec![0]);
        assert!(realize(&bad, Some(5)).is_err());
    }

    #[test]
    fn minimize_cancels_units() {
        let co = PolyCoeffs::polynomial(RingSpec::Integers, 1);
        let mut c = FreeComplex::zero(co);
        c.ranks.insert(0, 1);
        c.ranks.insert(1, 1);
        c.d.insert(1, vec![vec![(0, Poly::constant(int(-1), 1))]]);
        let m = minimize(&c);
        assert_eq!(m.lo(), None);
    }
}
