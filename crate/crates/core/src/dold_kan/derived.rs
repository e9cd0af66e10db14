//! Derived power functors through the nondegenerate quotient of `F(Γ(C))`.
//!
//! For a simplicial module `A` the normalized chains are isomorphic to `A / D`
//! with `D` the degenerate part. For `A = F(Γ(C))` the quotient `A_n / D_n` is
//! spanned by the monomials in cells whose jump sets together cover `{0..n-1}`,
//! so `F(Γ(C))` never has to be formed in full, and levels beyond `r · top(C)`
//! vanish. The differential is `Σ (-1)^i F(d_i)` with degenerate monomials dropped.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::cells::{face, full_mask, level_cells, Cell, FaceImage};
use super::coeffs::{BaseCoeffs, Coeffs, TwoBehavior};
use super::power::{expand, has_repeat, PowerKind};
use crate::complexes::ChainComplex;
use crate::error::{Error, Result};
use crate::graded::GradedComplex;
use crate::linalg::Matrix;

pub(crate) type SparseCols<E> = Vec<Vec<(usize, E)>>;

/// A bounded complex of finite free modules over a coefficient ring `C`, with an
/// internal (polynomial) degree attached to every basis element.
#[derive(Clone, Debug)]
pub struct FreeComplex<C: Coeffs> {
    pub coeffs: C,
    pub ranks: BTreeMap<i32, usize>,
    /// `d[i]` lists the columns of `d_i : C_i -> C_{i-1}`.
    pub d: BTreeMap<i32, SparseCols<C::E>>,
    pub weights: BTreeMap<i32, Vec<i64>>,
}

impl<C: Coeffs> FreeComplex<C> {
    pub fn zero(coeffs: C) -> Self {
        FreeComplex { coeffs, ranks: BTreeMap::new(), d: BTreeMap::new(), weights: BTreeMap::new() }
    }

    pub fn rank(&self, i: i32) -> usize {
        self.ranks.get(&i).copied().unwrap_or(0)
    }

    pub fn lo(&self) -> Option<i32> {
        self.ranks.iter().find(|(_, r)| **r > 0).map(|(i, _)| *i)
    }

    pub fn hi(&self) -> Option<i32> {
        self.ranks.iter().rev().find(|(_, r)| **r > 0).map(|(i, _)| *i)
    }

    pub fn weight(&self, i: i32, j: usize) -> i64 {
        self.weights.get(&i).map_or(0, |w| w[j])
    }

    /// `C[n]` with differential `(-1)^n d`.
    pub fn shift(&self, n: i32) -> Self {
        let c = &self.coeffs;
        let odd = n.rem_euclid(2) == 1;
        let d = self
            .d
            .iter()
            .map(|(i, cols)| {
                let cols = cols
                    .iter()
                    .map(|col| col.iter().map(|(r, v)| (*r, if odd { c.neg(v) } else { v.clone() })).collect())
                    .collect();
                (i + n, cols)
            })
            .collect();
        FreeComplex {
            coeffs: self.coeffs.clone(),
            ranks: self.ranks.iter().map(|(i, r)| (i + n, *r)).collect(),
            d,
            weights: self.weights.iter().map(|(i, w)| (i + n, w.clone())).collect(),
        }
    }

    /// Adds `shift` to every internal degree.
    pub fn shift_weights(&self, shift: i64) -> Self {
        let mut out = self.clone();
        for w in out.weights.values_mut() {
            for x in w.iter_mut() {
                *x += shift;
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut ranks = self.ranks.clone();
        for (i, r) in &other.ranks {
            *ranks.entry(*i).or_insert(0) += r;
        }
        let mut d = BTreeMap::new();
        let mut weights = BTreeMap::new();
        for &i in ranks.keys() {
            let mut w = self.weights.get(&i).cloned().unwrap_or_else(|| vec![0; self.rank(i)]);
            w.extend(other.weights.get(&i).cloned().unwrap_or_else(|| vec![0; other.rank(i)]));
            weights.insert(i, w);
            let off = self.rank(i - 1);
            let mut cols: SparseCols<C::E> = self.d.get(&i).cloned().unwrap_or_else(|| vec![Vec::new(); self.rank(i)]);
            match other.d.get(&i) {
                Some(oc) => cols.extend(oc.iter().map(|col| col.iter().map(|(r, v)| (r + off, v.clone())).collect())),
                None => cols.extend(std::iter::repeat_n(Vec::new(), other.rank(i))),
            }
            d.insert(i, cols);
        }
        FreeComplex { coeffs: self.coeffs.clone(), ranks, d, weights }
    }
}

impl FreeComplex<BaseCoeffs> {
    pub fn from_chain_complex(c: &ChainComplex) -> Self {
        let coeffs = BaseCoeffs(c.ring());
        let ranks = c.ranks().clone();
        let d = c
            .differentials()
            .iter()
            .map(|(i, m)| (*i, (0..m.cols()).map(|j| m.column(j).to_vec()).collect()))
            .collect();
        let weights = ranks.iter().map(|(i, r)| (*i, vec![0; *r])).collect();
        FreeComplex { coeffs, ranks, d, weights }
    }

    pub fn to_chain_complex(&self) -> Result<ChainComplex> {
        let ring = self.coeffs.0;
        let mut d = BTreeMap::new();
        for (i, cols) in &self.d {
            if self.rank(*i) > 0 && self.rank(i - 1) > 0 {
                d.insert(*i, Matrix::from_col_entries(ring, self.rank(i - 1), cols.clone())?);
            }
        }
        ChainComplex::new_unchecked(ring, self.ranks.clone(), d)
    }
}

/// Composes sparse column matrices: `a ∘ b`.
pub(crate) fn compose<C: Coeffs>(c: &C, a: &SparseCols<C::E>, b: &SparseCols<C::E>) -> SparseCols<C::E> {
    b.iter()
        .map(|col| {
            let mut acc: BTreeMap<usize, C::E> = BTreeMap::new();
            for (k, x) in col {
                if let Some(ac) = a.get(*k) {
                    for (i, y) in ac {
                        let e = acc.entry(*i).or_insert_with(|| c.zero());
                        *e = c.add(e, &c.mul(y, x));
                    }
                }
            }
            acc.into_iter().filter(|(_, v)| !c.is_zero(v)).collect()
        })
        .collect()
}

struct Level {
    keys: Vec<Vec<Cell>>,
    index: HashMap<Vec<Cell>, usize>,
}

fn enumerate_level(cells: &[Cell], r: usize, n: usize, strict: bool, max_bits: u32) -> Vec<Vec<Cell>> {
    let full = full_mask(n);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        cells: &[Cell],
        r: usize,
        full: u64,
        strict: bool,
        max_bits: u32,
        start: usize,
        mask: u64,
        cur: &mut Vec<Cell>,
        out: &mut Vec<Vec<Cell>>,
    ) {
        let left = (r - cur.len()) as u32;
        if left == 0 {
            if mask == full {
                out.push(cur.clone());
            }
            return;
        }
        if (full & !mask).count_ones() > left * max_bits {
            return;
        }
        for i in start..cells.len() {
            cur.push(cells[i]);
            rec(cells, r, full, strict, max_bits, if strict { i + 1 } else { i }, mask | cells[i].jumps, cur, out);
            cur.pop();
        }
    }
    rec(cells, r, full, strict, max_bits, 0, 0, &mut cur, &mut out);
    out
}

/// The complex `F(Γ(C)) / degenerate` for a connective `C`, through level `top`.
/// Returns its terms as monomial lists too, so callers can locate repeated factors.
fn nondegenerate_complex<C: Coeffs>(
    kind: PowerKind,
    r: usize,
    input: &FreeComplex<C>,
    top: usize,
) -> (FreeComplex<C>, Vec<Vec<Vec<Cell>>>) {
    let c = &input.coeffs;
    let max_deg = input.hi().unwrap_or(0);
    let strict = kind.strict();
    let levels: Vec<Level> = (0..=top)
        .map(|n| {
            let cells = level_cells(n, |k| input.rank(k), max_deg);
            let max_bits = (n as u32).min(max_deg.max(0) as u32);
            let keys = enumerate_level(&cells, r, n, strict, max_bits);
            let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
            Level { keys, index }
        })
        .collect();
    let image = |n: usize, i: usize, cell: &Cell| -> Vec<(Cell, C::E)> {
        match face(n, i, cell.jumps) {
            FaceImage::Zero => vec![],
            FaceImage::Move(j) => vec![(Cell { jumps: j, idx: cell.idx }, c.one())],
            FaceImage::Differential(j) => match input.d.get(&cell.degree()) {
                Some(cols) => cols[cell.idx as usize]
                    .iter()
                    .map(|(e, v)| (Cell { jumps: j, idx: *e as u32 }, v.clone()))
                    .collect(),
                None => vec![],
            },
        }
    };
    let mut out = FreeComplex::zero(c.clone());
    for (n, level) in levels.iter().enumerate() {
        if level.keys.is_empty() {
            continue;
        }
        out.ranks.insert(n as i32, level.keys.len());
        let w: Vec<i64> =
            level.keys.iter().map(|k| k.iter().map(|cell| input.weight(cell.degree(), cell.idx as usize)).sum()).collect();
        out.weights.insert(n as i32, w);
        if n == 0 || levels[n - 1].keys.is_empty() {
            continue;
        }
        let below = &levels[n - 1];
        let full = full_mask(n - 1);
        let cols: SparseCols<C::E> = level
            .keys
            .par_iter()
            .map(|key| {
                let mut acc: BTreeMap<usize, C::E> = BTreeMap::new();
                for i in 0..=n {
                    for (k2, v) in expand(kind, c, key, |cell| image(n, i, cell)) {
                        if k2.iter().fold(0, |m, x| m | x.jumps) != full {
                            continue;
                        }
                        let Some(&row) = below.index.get(&k2) else { continue };
                        let v = if i % 2 == 1 { c.neg(&v) } else { v };
                        let e = acc.entry(row).or_insert_with(|| c.zero());
                        *e = c.add(e, &v);
                    }
                }
                acc.into_iter().filter(|(_, v)| !c.is_zero(v)).collect()
            })
            .collect();
        out.d.insert(n as i32, cols);
    }
    let keys = levels.into_iter().map(|l| l.keys).collect();
    (out, keys)
}

/// Free resolution of the `AntiSym` quotient complex when 2 is a nonzerodivisor.
///
/// `G` is free on all monomials and `Rep ⊂ G` on those with a repeated factor, which
/// are 2-torsion. With `d̃` the lifted differential and `d̃² = 2h`, the complex
/// `T_n = G_n ⊕ Rep_{n-1}`, `D(g, x) = (d̃ g + 2x, -h g - d̃ x)` computes the homology
/// of `G / 2 Rep`.
fn twisted_model<C: Coeffs>(g: &FreeComplex<C>, keys: &[Vec<Vec<Cell>>], extra_level: bool) -> Result<FreeComplex<C>> {
    let c = &g.coeffs;
    let top = keys.len() as i32 - 1;
    let rep: Vec<Vec<usize>> = keys.iter().map(|ks| (0..ks.len()).filter(|&j| has_repeat(&ks[j])).collect()).collect();
    let rep_pos: Vec<HashMap<usize, usize>> =
        rep.iter().map(|v| v.iter().enumerate().map(|(a, b)| (*b, a)).collect()).collect();
    let rep_len = |n: i32| if n < 0 || n > top { 0 } else { rep[n as usize].len() };
    let g_len = |n: i32| g.rank(n);
    let empty: SparseCols<C::E> = Vec::new();
    let dt = |n: i32| g.d.get(&n).unwrap_or(&empty);
    let bad = |m: &str| Error::Unsupported(format!("antisymmetric model: {m}"));
    let to_rep = |n: i32, col: &[(usize, C::E)], halve: bool| -> Result<Vec<(usize, C::E)>> {
        let mut out = Vec::with_capacity(col.len());
        for (row, v) in col {
            let pos = rep_pos[n as usize].get(row).ok_or_else(|| bad("strict coordinate in torsion image"))?;
            let v = if halve { c.half(v).ok_or_else(|| bad("odd coefficient in d^2"))? } else { v.clone() };
            out.push((*pos, v));
        }
        Ok(out)
    };
    let mut out = FreeComplex::zero(c.clone());
    let last = if extra_level { top + 1 } else { top };
    for n in 0..=last {
        let rank = g_len(n) + rep_len(n - 1);
        if rank == 0 {
            continue;
        }
        out.ranks.insert(n, rank);
        let mut w = g.weights.get(&n).cloned().unwrap_or_default();
        if n >= 1 {
            w.extend(rep[(n - 1) as usize].iter().map(|&j| g.weight(n - 1, j)));
        }
        out.weights.insert(n, w);
        if n == 0 {
            continue;
        }
        let off = g_len(n - 1);
        let mut cols: SparseCols<C::E> = Vec::with_capacity(rank);
        // generators from G_n
        let sq = if n >= 2 && g_len(n) > 0 { compose(c, dt(n - 1), dt(n)) } else { vec![Vec::new(); g_len(n)] };
        for j in 0..g_len(n) {
            let mut col: Vec<(usize, C::E)> = dt(n).get(j).cloned().unwrap_or_default();
            if n >= 2 {
                for (pos, v) in to_rep(n - 2, &sq[j], true)? {
                    col.push((off + pos, c.neg(&v)));
                }
            }
            cols.push(col);
        }
        // generators from Rep_{n-1}
        if n - 1 <= top {
            for &j in &rep[(n - 1) as usize] {
                let mut col = vec![(j, c.from_i64(2))];
                if n >= 2 {
                    let img = dt(n - 1).get(j).cloned().unwrap_or_default();
                    for (pos, v) in to_rep(n - 2, &img, false)? {
                        col.push((off + pos, c.neg(&v)));
                    }
                }
                cols.push(col);
            }
        }
        out.d.insert(n, cols);
    }
    Ok(out)
}

/// `LF^r(C)` as a free complex over the coefficients of `input`, computed through
/// degree `degree_cutoff`. Returns the degree through which the homology is exact,
/// or `None` when nothing was cut off.
pub fn derived_power_free<C: Coeffs>(
    kind: PowerKind,
    r: usize,
    input: &FreeComplex<C>,
    degree_cutoff: usize,
) -> Result<(FreeComplex<C>, Option<i32>)> {
    if let Some(lo) = input.lo() {
        if lo < 0 {
            return Err(Error::NonConnective(lo));
        }
    }
    let hi = input.hi().unwrap_or(0).max(0) as usize;
    let full_top = r * hi;
    let top = full_top.min(degree_cutoff + 1);
    let exact = if top < full_top { Some(degree_cutoff as i32) } else { None };
    let behavior = input.coeffs.two_behavior();
    let effective = match (kind, behavior) {
        (PowerKind::AntiSym, TwoBehavior::Zero) => PowerKind::Sym,
        (PowerKind::AntiSym, TwoBehavior::Unit) => PowerKind::Exterior,
        (k, _) => k,
    };
    let (g, keys) = nondegenerate_complex(effective, r, input, top);
    if effective == PowerKind::AntiSym {
        let t = twisted_model(&g, &keys, exact.is_none())?;
        return Ok((t, exact));
    }
    Ok((g, exact))
}

/// `LF^r(C)` over the ground ring, with exact homology in degrees `≤ degree_cutoff`.
///
/// When the complex extends beyond the cutoff, degree `degree_cutoff + 1` holds a basis
/// of the boundaries and higher degrees are dropped.
pub fn derived_power(kind: PowerKind, r: usize, c: &ChainComplex, degree_cutoff: usize) -> Result<ChainComplex> {
    let input = FreeComplex::from_chain_complex(c);
    let (out, exact) = derived_power_free(kind, r, &input, degree_cutoff)?;
    let cc = out.to_chain_complex()?;
    match exact {
        Some(n) => cc.truncate_above(n),
        None => Ok(cc),
    }
}

/// `LSym(C) = ⊕_w LSym^w(C)` with `LSym^w` in weight `w`, for `w ≤ weight_cutoff`.
pub fn lsym_total(c: &ChainComplex, weight_cutoff: usize, degree_cutoff: usize) -> Result<GradedComplex> {
    let pieces = (0..=weight_cutoff)
        .into_par_iter()
        .map(|w| derived_power(PowerKind::Sym, w, c, degree_cutoff).map(|x| (w as i32, x)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    GradedComplex::new(c.ring(), pieces)
}



#[cfg(test)]
mod tests {
    use super::*;
    use crate::dold_kan::simplicial::{apply_levelwise, dk_gamma, normalize};
    use crate::linalg::{FgModule, RingSpec};

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    #[test]
    fn sym_square_of_shifted_unit() {
        // LSym^2(Z[2]) = Γ^2(Z)[4]
        let c = ChainComplex::concentrated(z(), 2, 1);
        let h = derived_power(PowerKind::Sym, 2, &c, 10).unwrap().homology();
        assert_eq!(h.to_string(), "H_4 = Z");
        // LSym^2(Z[1]) = 0
        let c = ChainComplex::concentrated(z(), 1, 1);
        assert!(derived_power(PowerKind::Sym, 2, &c, 10).unwrap().homology().is_zero());
    }

    #[test]
    fn exterior_square_of_degree_one() {
        // LΛ^2(Z[1]) = Γ^2(Z)[2]
        let c = ChainComplex::concentrated(z(), 1, 1);
        let h = derived_power(PowerKind::Exterior, 2, &c, 10).unwrap().homology();
        assert_eq!(h.to_string(), "H_2 = Z");
    }

    #[test]
    fn agrees_with_levelwise_route() {
        let c = ChainComplex::two_term(Matrix::from_i64(z(), &[&[2]]), 1);
        for kind in [PowerKind::Sym, PowerKind::Exterior, PowerKind::Divided] {
            for r in 0..=3 {
                let fast = derived_power(kind, r, &c, 4).unwrap().homology();
                let g = dk_gamma(&c, 5).unwrap();
                let slow = normalize(&apply_levelwise(kind, r, &g).unwrap(), 4).unwrap().complex.homology();
                assert_eq!(fast.below(4), slow.below(4), "{kind:?} r={r}");
            }
        }
    }

    #[test]
    fn antisym_square_of_unit_in_degree_one_is_z_in_degree_two() {
        let c = ChainComplex::concentrated(z(), 1, 1);
        let h = derived_power(PowerKind::AntiSym, 2, &c, 10).unwrap().homology();
        assert_eq!(h.to_string(), "H_2 = Z");
        // underived in degree zero: AntiSym^2(Z) = Z/2
        let c = ChainComplex::concentrated(z(), 0, 1);
        let h = derived_power(PowerKind::AntiSym, 2, &c, 10).unwrap().homology();
        assert_eq!(h.get(0), FgModule::new(z(), 0, vec![2.into()]));
    }

    #[test]
    fn total_sym_tables() {
        // polynomial ring on a degree 0 class
        let t = lsym_total(&ChainComplex::concentrated(z(), 0, 1), 3, 6).unwrap();
        for w in 0..=3 {
            assert_eq!(t.piece(w).homology().to_string(), "H_0 = Z");
        }
        let f2 = RingSpec::fp(2).unwrap();
        let t = lsym_total(&ChainComplex::concentrated(f2, 1, 1), 2, 6).unwrap();
        assert_eq!(t.piece(0).homology().to_string(), "H_0 = F_2");
        assert_eq!(t.piece(1).homology().to_string(), "H_1 = F_2");
        assert!(t.piece(2).homology().is_zero());
        let t = lsym_total(&ChainComplex::zero(z()), 2, 4).unwrap();
        assert_eq!(t.piece(0).homology().to_string(), "H_0 = Z");
        assert!(t.piece(1).is_acyclic() && t.piece(2).is_acyclic());
    }

    #[test]
    fn gamma_level_ranks_count_monotone_surjections() {
        let c = ChainComplex::concentrated(z(), 2, 1);
        let g = dk_gamma(&c, 4).unwrap();
        assert_eq!((0..=4).map(|n| g.rank(n)).collect::<Vec<_>>(), vec![0, 0, 1, 3, 6]);
        let g = dk_gamma(&ChainComplex::concentrated(z(), 0, 1), 3).unwrap();
        assert!((0..=3).all(|n| g.rank(n) == 1));
    }

    #[test]
    fn truncated_computation_is_exact_below_cutoff() {
        let c = ChainComplex::concentrated(z(), 2, 1);
        for r in 1..=3 {
            let full = derived_power(PowerKind::Sym, r, &c, 20).unwrap().homology();
            let cut = derived_power(PowerKind::Sym, r, &c, 3).unwrap().homology();
            assert_eq!(full.below(3), cut.below(3));
            assert_eq!(full.to_string(), format!("H_{} = Z", 2 * r));
        }
    }

    #[test]
    fn non_connective_input_rejected() {
        let c = ChainComplex::concentrated(z(), -1, 1);
        assert!(matches!(derived_power(PowerKind::Sym, 2, &c, 4), Err(Error::NonConnective(-1))));
    }
}
