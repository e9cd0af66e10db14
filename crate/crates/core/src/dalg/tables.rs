//! Values of graded free algebras, free crystalline stubs and the finite-level qrsp check.

use std::collections::BTreeMap;

use super::koszul_rees::{default_bound, koszul_rees, Flavor};
use super::presentation::AlgebraPresentation;
use crate::complexes::ChainComplex;
use crate::dold_kan::{derived_power, PowerKind};
use crate::error::{Error, Result};
use crate::graded::{FilteredStub, GradedComplex};
use crate::linalg::{rank, Matrix, RingSpec};

/// Which graded free algebra to tabulate; the parameter is `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFlavor {
    /// `LSym^r(M[−2an])[2anr]` in weight `nr`.
    N(i32),
    /// `LSym^r` (n even) or `LAntiSym^r` (n odd) of `M[n−2an]`, shifted by `−nr+2anr`.
    B(i32),
    /// As `B`, with `LΛ^r` in place of `LAntiSym^r`.
    BStrict(i32),
}

impl TableFlavor {
    pub fn parse(s: &str, a: i32) -> Result<Self> {
        match s {
            "N" => Ok(TableFlavor::N(a)),
            "B" => Ok(TableFlavor::B(a)),
            "Bs" | "B-strict" => Ok(TableFlavor::BStrict(a)),
            _ => Err(Error::Parse(format!("unknown table flavor {s:?}"))),
        }
    }
}

/// The free algebra on `m` placed in weight `n`, through weight `|n|·r ≤ weight_cutoff`.
pub fn graded_free_table(
    flavor: TableFlavor,
    m: &ChainComplex,
    n: i32,
    weight_cutoff: usize,
    degree_cutoff: usize,
) -> Result<GradedComplex> {
    if n == 0 {
        return Err(Error::pre("the generating weight must be nonzero"));
    }
    let mut pieces = BTreeMap::new();
    let mut r = 0usize;
    while (n.unsigned_abs() as usize) * r <= weight_cutoff {
        let ri = r as i32;
        let (input, kind, shift) = match flavor {
            TableFlavor::N(a) => (m.shift(-2 * a * n), PowerKind::Sym, 2 * a * n * ri),
            TableFlavor::B(a) | TableFlavor::BStrict(a) => {
                let odd_kind = if matches!(flavor, TableFlavor::B(_)) { PowerKind::AntiSym } else { PowerKind::Exterior };
                let kind = if n % 2 == 0 { PowerKind::Sym } else { odd_kind };
                (m.shift(n - 2 * a * n), kind, -n * ri + 2 * a * n * ri)
            }
        };
        let cutoff = (degree_cutoff as i32 - shift).max(0) as usize;
        let piece = derived_power(kind, r, &input, cutoff)?.shift(shift);
        pieces.insert(n * ri, piece);
        r += 1;
    }
    GradedComplex::new(m.ring(), pieces)
}

/// One summand `ins^{ir}(LSym^r(P[2i])[−2ir])` of the free crystalline stub.
#[derive(Clone, Debug)]
pub struct CrystallineSummand {
    pub r: usize,
    pub weight: usize,
    pub complex: ChainComplex,
}

impl CrystallineSummand {
    pub fn is_coconnective(&self) -> bool {
        self.complex.homology().hi().is_none_or(|h| h <= 0)
    }
}

/// The summands for `r = 0..=⌊N/i⌋`, using `LSym^r(X[2]) ≅ LΓ^r(X)[2r]` with `X = P[2i−2]`.
pub fn free_crystalline_summands(ring: RingSpec, i: usize, rank_p: usize, n: usize) -> Result<Vec<CrystallineSummand>> {
    if i == 0 {
        return Err(Error::pre("the weight i must be at least 1"));
    }
    let x = ChainComplex::concentrated(ring, 2 * (i as i32 - 1), rank_p);
    (0..=n / i)
        .map(|r| {
            let top = 2 * (i - 1) * r;
            let g = derived_power(PowerKind::Divided, r, &x, top)?;
            Ok(CrystallineSummand { r, weight: i * r, complex: g.shift(2 * r as i32 - 2 * (i * r) as i32) })
        })
        .collect()
}

/// `⊕_{ir ≤ N} ins^{ir}(LSym^r(P[2i])[−2ir])` as a strict stub with levels `0..=N`.
pub fn free_crystalline_stub(ring: RingSpec, i: usize, rank_p: usize, n: usize) -> Result<FilteredStub> {
    let mut total = ChainComplex::zero(ring);
    let mut levels: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
    for s in free_crystalline_summands(ring, i, rank_p, n)? {
        for (&deg, &r) in s.complex.ranks() {
            let lv = levels.entry(deg).or_default();
            lv.resize(total.rank(deg), 0);
            lv.extend(std::iter::repeat_n(s.weight as i64, r));
        }
        total = total.direct_sum(&s.complex)?;
    }
    FilteredStub::from_levels(&total, &levels, n + 1)
}

/// Finite-level shadow of the qrsp comparison for `R_L = F_p[y]/(y^{p^L})`, `y = x^{1/p^L}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QrspReport {
    pub p: u64,
    pub level: u32,
    pub n: usize,
    /// `dim_{F_p} R_L = p^L`.
    pub ring_dim: usize,
    /// `dim_{F_p} gr^s` for `s = 0..=N`.
    pub dims: Vec<usize>,
    /// Whether `gr^s` is free of rank one over `R_L` (and concentrated in degree 0).
    pub free_rank_one: Vec<bool>,
    /// Whether the `R_L`-multiples of `ξ^s` (the image of `Sym^s(I/I²)`) span `gr^s`.
    pub surjective: Vec<bool>,
}

impl QrspReport {
    pub fn passes(&self) -> bool {
        self.free_rank_one.iter().all(|x| *x) && self.surjective.iter().all(|x| *x)
    }
}

/// The I-adic stub of `I = (x) ⊂ F_p[y]`, `x = y^{p^L}`, through weight `N`.
pub fn qrsp_truncated_check(p: u64, level: u32, n: usize) -> Result<QrspReport> {
    let q = p.checked_pow(level).ok_or_else(|| Error::Unsupported("p^L too large".into()))?;
    let pres = AlgebraPresentation::parse_parts(&format!("F{p}"), &["y"], &[&format!("y^{q}")], "regseq")?;
    let model = koszul_rees(&pres, Flavor::Sym, false, n + 1, Some(default_bound(&pres, n + 1)))?;
    let ring_dim = q as usize;
    let mut dims = Vec::new();
    let mut free_rank_one = Vec::new();
    let mut surjective = Vec::new();
    for s in 0..=n {
        let piece = model.graded_piece(s)?;
        let h = piece.homology();
        let dim = h.get(0).free_rank();
        dims.push(dim);
        free_rank_one.push(dim == ring_dim && h.groups().keys().all(|d| *d == 0));
        let basis = piece.homology_basis(0)?;
        let elems: Vec<_> = model.labels[&0].iter().filter(|e| e.level() == s as i64).collect();
        let cycles: Vec<Vec<_>> = elems
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.a[0] as u64) < q)
            .map(|(j, _)| {
                let mut v = vec![crate::linalg::int(0); elems.len()];
                v[j] = crate::linalg::int(1);
                basis.coordinates(&v)
            })
            .collect::<Result<_>>()?;
        let m = Matrix::from_dense_cols(piece.ring(), basis.len(), &cycles)?;
        surjective.push(rank(&m) == basis.len());
    }
    Ok(QrspReport { p, level, n, ring_dim, dims, free_rank_one, surjective })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    #[test]
    fn graded_polynomial_ring() {
        let t = graded_free_table(TableFlavor::N(0), &ChainComplex::concentrated(z(), 0, 1), 1, 4, 10).unwrap();
        for w in 0..=4 {
            assert_eq!(t.piece(w).homology().to_string(), "H_0 = Z");
        }
    }

    #[test]
    fn b_zero_has_two_torsion() {
        let m = ChainComplex::concentrated(z(), -1, 1);
        let t = graded_free_table(TableFlavor::B(0), &m, 1, 3, 10).unwrap();
        assert_eq!(t.piece(1).homology().to_string(), "H_-1 = Z");
        assert_eq!(t.piece(2).homology().to_string(), "H_-2 = Z/2");
        let s = graded_free_table(TableFlavor::BStrict(0), &m, 1, 3, 10).unwrap();
        assert!(s.piece(2).homology().is_free());
        let s = graded_free_table(TableFlavor::BStrict(0), &ChainComplex::concentrated(z(), 0, 1), 1, 2, 10).unwrap();
        assert_eq!(s.piece(2).homology().to_string(), "H_0 = Z");
        // with M = Z the weight 2 piece is LAntiSym²(Z[1])[−2] = Z
        let t = graded_free_table(TableFlavor::B(0), &ChainComplex::concentrated(z(), 0, 1), 1, 2, 10).unwrap();
        assert_eq!(t.piece(2).homology().to_string(), "H_0 = Z");
    }

    #[test]
    fn non_connective_input_is_rejected() {
        let m = ChainComplex::concentrated(z(), -2, 1);
        assert!(matches!(graded_free_table(TableFlavor::N(0), &m, 1, 2, 5), Err(Error::NonConnective(_))));
    }

    #[test]
    fn crystalline_examples() {
        let st = free_crystalline_stub(z(), 1, 1, 2).unwrap();
        let gr = st.gr_homology().unwrap();
        for s in 0..=2 {
            assert_eq!(gr[&s].to_string(), "H_0 = Z");
        }
        let st = free_crystalline_stub(z(), 1, 2, 1).unwrap();
        let gr = st.gr_homology().unwrap();
        assert_eq!(gr[&0].to_string(), "H_0 = Z");
        assert_eq!(gr[&1].to_string(), "H_0 = Z^2");
        assert!(free_crystalline_summands(z(), 2, 2, 6).unwrap().iter().all(CrystallineSummand::is_coconnective));
    }

    #[test]
    fn crystalline_summands_match_direct_sym() {
        for (i, rank_p, r) in [(1, 2, 3), (2, 1, 2), (2, 2, 2)] {
            let s = &free_crystalline_summands(z(), i, rank_p, i * r).unwrap()[r];
            let top = 2 * i * r;
            let direct = derived_power(PowerKind::Sym, r, &ChainComplex::concentrated(z(), 2 * i as i32, rank_p), top)
                .unwrap()
                .shift(-(top as i32));
            assert_eq!(s.complex.homology(), direct.homology(), "i = {i}, rank {rank_p}, r = {r}");
        }
    }

    #[test]
    fn qrsp_levels() {
        let r = qrsp_truncated_check(2, 1, 2).unwrap();
        assert_eq!(r.dims, vec![2, 2, 2]);
        assert!(r.passes());
        let r0 = qrsp_truncated_check(3, 0, 2).unwrap();
        assert_eq!(r0.dims, vec![1, 1, 1]);
        assert!(r0.passes());
    }
}
