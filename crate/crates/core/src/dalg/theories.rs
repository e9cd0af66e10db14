//! Hodge-graded pieces of de Rham, infinitesimal and Hochschild theories, and the HKR stub.

use std::collections::BTreeMap;

use super::coeffs::{minimize, realize, PolyCoeffs};
use super::koszul_rees::{default_bound, derham_stub, infinitesimal_stub};
use super::poly::Poly;
use super::presentation::{cotangent_complex, AlgebraPresentation, Regularity};
use crate::complexes::{ChainComplex, HomologyTable};
use crate::dold_kan::{derived_power_free, Coeffs, FreeComplex, PowerKind};
use crate::error::{Error, Result};
use crate::graded::FilteredStub;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theory {
    DeRham,
    Infinitesimal,
    Hochschild,
}

impl Theory {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "derham" | "deRham" | "dR" => Ok(Theory::DeRham),
            "inf" | "infinitesimal" | "Infinitesimal" => Ok(Theory::Infinitesimal),
            "hh" | "hochschild" | "Hochschild" => Ok(Theory::Hochschild),
            _ => Err(Error::Parse(format!("unknown theory {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Theory::DeRham => "derham",
            Theory::Infinitesimal => "inf",
            Theory::Hochschild => "hh",
        }
    }
}

/// `gr^i` by formula: `LΛ^i(L)[−i]`, `LSym^i(L[−1])` or `LΛ^i(L)[i]` for `L` the
/// cotangent complex, computed over the presented ring and realized over the ground ring.
///
/// `bound` truncates by internal degree when the ring is infinite over the ground ring.
pub fn hodge_graded_pieces(
    p: &AlgebraPresentation,
    theory: Theory,
    i: usize,
    degree_cutoff: usize,
    bound: Option<i64>,
) -> Result<ChainComplex> {
    let l = cotangent_complex(p)?;
    let ii = i as i32;
    let (input, shift, kind) = match theory {
        Theory::DeRham => (l, -ii, PowerKind::Exterior),
        Theory::Infinitesimal => (minimize(&l).shift(-1), 0, PowerKind::Sym),
        Theory::Hochschild => (l, ii, PowerKind::Exterior),
    };
    let cutoff = (degree_cutoff as i32 - shift).max(0) as usize;
    let (free, exact) = derived_power_free(kind, i, &input, cutoff)?;
    let bound = if free.coeffs.is_finite() { None } else { Some(bound.unwrap_or_else(|| default_bound(p, i + 1))) };
    let mut c = realize(&free, bound)?.complex;
    if let Some(e) = exact {
        c = c.truncate_above(e)?;
    }
    Ok(c.shift(shift))
}

/// The HKR-filtered Hochschild complex modulo `F^N`.
///
/// Polynomial rings use the Koszul resolution of `R` over `R ⊗ R` (zero differential after
/// base change) with the Postnikov filtration. Hypersurfaces `k[x]/(f)` use the 2-periodic
/// complex `… → R --f'--> R --0--> R` where degrees `2s−1` and `2s` have level `s`.
pub fn hochschild_stub(p: &AlgebraPresentation, n: usize, bound: Option<i64>) -> Result<FilteredStub> {
    match p.regularity() {
        Regularity::Smooth => {
            let free = koszul_hochschild(p);
            let bound = if free.coeffs.is_finite() { None } else { Some(bound.unwrap_or_else(|| default_bound(p, n))) };
            let c = realize(&free, bound)?.complex;
            FilteredStub::postnikov(&c, n)
        }
        Regularity::RegularSequence if p.relations().len() == 1 && p.vars().len() <= 1 => {
            let co = PolyCoeffs::quotient(p)?;
            let f = &p.relations()[0];
            let fprime = if p.vars().is_empty() { Poly::zero() } else { co.reduce(&f.derivative(0)) };
            let top = 2 * n as i32 - 2;
            let mut free = FreeComplex::zero(co.clone());
            for m in (0..=top).filter(|m| m % 2 == 0 || !p.vars().is_empty()) {
                free.ranks.insert(m, 1);
                free.weights.insert(m, vec![0]);
                if m >= 2 && m % 2 == 0 && !fprime.is_zero() {
                    free.d.insert(m, vec![vec![(0, fprime.clone())]]);
                }
            }
            let r = realize(&free, None)?;
            let levels: BTreeMap<i32, Vec<i64>> =
                r.labels.iter().map(|(m, l)| (*m, vec![(*m as i64 + 1) / 2; l.len()])).collect();
            FilteredStub::from_levels(&r.complex, &levels, n)
        }
        _ => Err(Error::Unsupported("Hochschild stubs cover polynomial rings and hypersurfaces k[x]/(f)".into())),
    }
}

fn koszul_hochschild(p: &AlgebraPresentation) -> FreeComplex<PolyCoeffs> {
    let nv = p.vars().len();
    let co = PolyCoeffs::quotient(p).expect("polynomial rings have normal forms");
    let mut free = FreeComplex::zero(co.clone());
    let subsets: Vec<u32> = (0..1u32 << nv).collect();
    for deg in 0..=nv {
        let basis: Vec<u32> = subsets.iter().copied().filter(|s| s.count_ones() as usize == deg).collect();
        let w = basis.iter().map(|s| (0..nv).filter(|i| s >> i & 1 == 1).map(|i| p.var_weights()[i]).sum()).collect();
        free.ranks.insert(deg as i32, basis.len());
        free.weights.insert(deg as i32, w);
        if deg == 0 {
            continue;
        }
        let lower: Vec<u32> = subsets.iter().copied().filter(|s| s.count_ones() as usize == deg - 1).collect();
        let cols = basis
            .iter()
            .map(|s| {
                let mut col = Vec::new();
                for (t, i) in (0..nv).filter(|i| s >> i & 1 == 1).enumerate() {
                    // x_i ⊗ 1 − 1 ⊗ x_i maps to x_i − x_i under R ⊗ R → R
                    let x = Poly::var(i, nv);
                    let mut e = co.sub(&x, &x);
                    if t % 2 == 1 {
                        e = co.neg(&e);
                    }
                    if !co.is_zero(&e) {
                        col.push((lower.iter().position(|u| *u == s & !(1 << i)).unwrap(), e));
                    }
                }
                col
            })
            .collect();
        free.d.insert(deg as i32, cols);
    }
    free
}

/// The stub of a theory: de Rham and infinitesimal through the Koszul–Rees models,
/// Hochschild through [`hochschild_stub`].
pub fn theory_stub(p: &AlgebraPresentation, theory: Theory, n: usize, bound: Option<i64>) -> Result<FilteredStub> {
    match theory {
        Theory::DeRham => derham_stub(p, n, bound),
        Theory::Infinitesimal => infinitesimal_stub(p, n, bound),
        Theory::Hochschild => hochschild_stub(p, n, bound),
    }
}

/// One row of a gr-consistency check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrComparison {
    pub s: usize,
    pub stub: HomologyTable,
    pub formula: HomologyTable,
}

impl GrComparison {
    pub fn agrees(&self) -> bool {
        self.stub == self.formula
    }
}

/// Compares `H(gr^s)` of the stub with `H` of [`hodge_graded_pieces`] for `s < N`.
pub fn gr_consistency(p: &AlgebraPresentation, theory: Theory, n: usize, bound: Option<i64>) -> Result<Vec<GrComparison>> {
    let bound = bound.or_else(|| (!p.vars().is_empty()).then(|| default_bound(p, n)));
    let stub = theory_stub(p, theory, n, bound)?;
    let gr = stub.gr_homology()?;
    (0..n)
        .map(|s| {
            let formula = hodge_graded_pieces(p, theory, s, 2 * n + 2, bound)?.homology();
            let st = gr.get(&(s as i32)).cloned().unwrap_or_else(|| HomologyTable::new(formula.ring(), BTreeMap::new()));
            Ok(GrComparison { s, stub: st.as_abelian_groups(), formula: formula.as_abelian_groups() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset(name: &str) -> AlgebraPresentation {
        AlgebraPresentation::preset(name, 3).unwrap()
    }

    #[test]
    fn hodge_pieces_of_fp() {
        let p = preset("Fp-over-Z");
        for i in 0..4 {
            let inf = hodge_graded_pieces(&p, Theory::Infinitesimal, i, 10, None).unwrap();
            assert_eq!(inf.homology().to_string(), "H_0 = F_3");
            let dr = hodge_graded_pieces(&p, Theory::DeRham, i, 10, None).unwrap();
            assert_eq!(dr.homology().to_string(), "H_0 = F_3");
        }
    }

    #[test]
    fn hochschild_piece_of_polynomial_ring() {
        let p = preset("Zx");
        // Ω¹[1] truncated at internal degree 3: x^0dx..x^2dx
        let c = hodge_graded_pieces(&p, Theory::Hochschild, 1, 10, Some(3)).unwrap();
        assert_eq!(c.homology().to_string(), "H_1 = Z^3");
    }

    #[test]
    fn hkr_for_polynomial_rings() {
        for (name, ranks) in [("Zx", vec![1usize, 1]), ("Zxy", vec![1, 2, 1])] {
            let p = preset(name);
            let n = ranks.len() + 1;
            let st = hochschild_stub(&p, n, Some(3)).unwrap();
            let nv = ranks.len() - 1;
            for (s, r) in ranks.iter().enumerate() {
                let h = st.gr(s).unwrap().homology();
                // Ω^s is free on C(n, s) generators of internal degree s
                let monos = (1..=nv).fold(1, |acc, j| acc * (3 - s + j) / j);
                assert_eq!(h.get(s as i32).free_rank(), r * monos, "{name} s = {s}");
                assert!(h.groups().iter().all(|(d, g)| *d == s as i32 || g.is_zero()));
            }
            for s in 0..n {
                let lo = st.level(s).homology().lo();
                assert!(lo.is_none_or(|lo| lo >= s as i32));
            }
            assert!(gr_consistency(&p, Theory::Hochschild, n, Some(3)).unwrap().iter().all(GrComparison::agrees));
        }
    }

    #[test]
    fn hkr_for_hypersurface() {
        let p = preset("hypersurface-x2");
        let st = hochschild_stub(&p, 3, None).unwrap();
        // gr^1 = [R --2x--> R] in degrees 2, 1 over R = Z{1, x}
        assert_eq!(st.gr(1).unwrap().homology().to_string(), "H_1 = Z + Z/2, H_2 = Z");
        assert!(gr_consistency(&p, Theory::Hochschild, 3, None).unwrap().iter().all(GrComparison::agrees));
        let fp = preset("Fp-over-Z");
        let st = hochschild_stub(&fp, 3, None).unwrap();
        assert_eq!(st.level(0).homology().to_string(), "H_0 = F_3, H_2 = F_3, H_4 = F_3");
    }

    #[test]
    fn gr_consistency_for_stubs() {
        for (name, theory) in [
            ("Fp-over-Z", Theory::Infinitesimal),
            ("Fp-over-Z", Theory::DeRham),
            ("Zx", Theory::DeRham),
            ("Zxy", Theory::DeRham),
            ("hypersurface-x2", Theory::DeRham),
        ] {
            let rows = gr_consistency(&preset(name), theory, 3, None).unwrap();
            for r in rows {
                assert!(r.agrees(), "{name} {theory:?} s = {}: {} vs {}", r.s, r.stub, r.formula);
            }
        }
    }
}
