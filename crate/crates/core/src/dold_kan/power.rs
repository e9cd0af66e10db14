use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::One;

use super::coeffs::{BaseCoeffs, Coeffs, TwoBehavior};
use crate::error::{Error, Result};
use crate::linalg::{FgModule, Matrix, RingSpec, Scalar};

/// The power functors on free modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PowerKind {
    /// Symmetric powers `Sym^r`.
    Sym,
    /// Exterior powers `Λ^r` (alternating: `x ∧ x = 0`).
    Exterior,
    /// Divided powers `Γ^r`.
    Divided,
    /// Antisymmetric powers: sign-twisted coinvariants of `M^{⊗r}`, without `x ⊗ x = 0`.
    AntiSym,
}

impl PowerKind {
    pub fn parse(s: &str) -> Result<PowerKind> {
        match s {
            "sym" => Ok(PowerKind::Sym),
            "ext" => Ok(PowerKind::Exterior),
            "div" => Ok(PowerKind::Divided),
            "antisym" => Ok(PowerKind::AntiSym),
            _ => Err(Error::Parse(format!("unknown functor kind {s:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PowerKind::Sym => "sym",
            PowerKind::Exterior => "ext",
            PowerKind::Divided => "div",
            PowerKind::AntiSym => "antisym",
        }
    }

    pub(crate) fn strict(&self) -> bool {
        matches!(self, PowerKind::Exterior)
    }
}

fn sign<C: Coeffs>(c: &C, odd: bool, x: C::E) -> C::E {
    if odd {
        c.neg(&x)
    } else {
        x
    }
}

/// Inserts `u` into the sorted key; returns the new key and whether the sign flips.
fn insert<T: Ord + Clone>(kind: PowerKind, key: &[T], u: &T) -> Option<(Vec<T>, bool)> {
    let upper = key.partition_point(|x| x <= u);
    let (pos, odd) = match kind {
        PowerKind::Sym => (upper, false),
        PowerKind::Exterior => {
            let lower = key.partition_point(|x| x < u);
            if lower != upper {
                return None;
            }
            (lower, (key.len() - lower) % 2 == 1)
        }
        PowerKind::AntiSym => (upper, (key.len() - upper) % 2 == 1),
        PowerKind::Divided => unreachable!("divided powers use run expansion"),
    };
    let mut out = Vec::with_capacity(key.len() + 1);
    out.extend_from_slice(&key[..pos]);
    out.push(u.clone());
    out.extend_from_slice(&key[pos..]);
    Some((out, odd))
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `γ_m(Σ a_j u_j) = Σ_{|b| = m} Π a_j^{b_j} γ_b`, keys as sorted multisets.
fn gamma_power<T: Ord + Clone, C: Coeffs>(c: &C, v: &[(T, C::E)], m: usize) -> Vec<(Vec<T>, C::E)> {
    let mut v: Vec<&(T, C::E)> = v.iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    fn rec<T: Ord + Clone, C: Coeffs>(
        c: &C,
        v: &[&(T, C::E)],
        j: usize,
        left: usize,
        key: &mut Vec<T>,
        coef: C::E,
        out: &mut Vec<(Vec<T>, C::E)>,
    ) {
        if left == 0 {
            out.push((key.clone(), coef));
            return;
        }
        if j == v.len() {
            return;
        }
        let (u, a) = (&v[j].0, &v[j].1);
        let mut cf = coef;
        let base = key.len();
        for b in 0..=left {
            if b > 0 {
                cf = c.mul(&cf, a);
                key.push(u.clone());
            }
            if j + 1 == v.len() && b < left {
                continue;
            }
            rec(c, v, j + 1, left - b, key, cf.clone(), out);
        }
        key.truncate(base);
    }
    let mut key = Vec::new();
    rec(c, &v, 0, m, &mut key, c.one(), &mut out);
    out.retain(|(_, x)| !c.is_zero(x));
    out
}

/// Product of divided monomials: `γ_b γ_c = Π C(b_u + c_u, b_u) γ_{b+c}`.
fn divided_product<T: Ord + Clone>(a: &[T], b: &[T]) -> (Vec<T>, BigInt) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut coef = BigInt::one();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i] <= b[j]);
        let u = if take_a { a[i].clone() } else { b[j].clone() };
        let mut ca = 0u64;
        while i < a.len() && a[i] == u {
            ca += 1;
            i += 1;
        }
        let mut cb = 0u64;
        while j < b.len() && b[j] == u {
            cb += 1;
            j += 1;
        }
        if ca > 0 && cb > 0 {
            coef *= binomial(ca + cb, ca);
        }
        for _ in 0..ca + cb {
            out.push(u.clone());
        }
    }
    (out, coef)
}

/// Image of a basis monomial `key` under the functor applied to the linear map `image`.
pub(crate) fn expand<T, C, F>(kind: PowerKind, c: &C, key: &[T], image: F) -> Vec<(Vec<T>, C::E)>
where
    T: Ord + Clone + Hash,
    C: Coeffs,
    F: Fn(&T) -> Vec<(T, C::E)>,
{
    let mut state: HashMap<Vec<T>, C::E> = HashMap::new();
    state.insert(Vec::new(), c.one());
    if kind == PowerKind::Divided {
        let mut i = 0;
        while i < key.len() {
            let mut j = i;
            while j < key.len() && key[j] == key[i] {
                j += 1;
            }
            let img = image(&key[i]);
            let g = gamma_power(c, &img, j - i);
            if g.is_empty() {
                return Vec::new();
            }
            let mut next: HashMap<Vec<T>, C::E> = HashMap::new();
            for (k, x) in &state {
                for (gk, y) in &g {
                    let (nk, coef) = divided_product(k, gk);
                    let v = c.mul(&c.mul(x, y), &c.from_bigint(&coef));
                    let e = next.entry(nk).or_insert_with(|| c.zero());
                    *e = c.add(e, &v);
                }
            }
            next.retain(|_, v| !c.is_zero(v));
            state = next;
            i = j;
        }
    } else {
        for t in key {
            let img = image(t);
            if img.is_empty() {
                return Vec::new();
            }
            let mut next: HashMap<Vec<T>, C::E> = HashMap::new();
            for (k, x) in &state {
                for (u, a) in &img {
                    if let Some((nk, odd)) = insert(kind, k, u) {
                        let v = sign(c, odd, c.mul(x, a));
                        let e = next.entry(nk).or_insert_with(|| c.zero());
                        *e = c.add(e, &v);
                    }
                }
            }
            next.retain(|_, v| !c.is_zero(v));
            state = next;
        }
    }
    state.into_iter().collect()
}

/// Basis monomials of `F^r(k^n)` in lexicographic order: sorted `r`-tuples of indices,
/// strictly increasing for the exterior power.
pub fn power_basis(kind: PowerKind, r: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(strict: bool, r: usize, n: u32, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(strict, r, n, if strict { i + 1 } else { i }, cur, out);
            cur.pop();
        }
    }
    rec(kind.strict(), r, n as u32, 0, &mut cur, &mut out);
    out
}

pub(crate) fn has_repeat<T: PartialEq>(key: &[T]) -> bool {
    key.windows(2).any(|w| w[0] == w[1])
}

/// `F^r(k^n)` as a module: free except for `AntiSym`, whose monomials with a repeated
/// factor are 2-torsion (and vanish when 2 is invertible).
pub fn power_module(kind: PowerKind, r: usize, n: usize, ring: RingSpec) -> FgModule {
    let basis = power_basis(kind, r, n);
    if kind != PowerKind::AntiSym {
        return FgModule::free(ring, basis.len());
    }
    let reps = basis.iter().filter(|k| has_repeat(k)).count();
    let strict = basis.len() - reps;
    match BaseCoeffs(ring).two_behavior() {
        TwoBehavior::Zero => FgModule::free(ring, basis.len()),
        TwoBehavior::Unit => FgModule::free(ring, strict),
        TwoBehavior::NonZeroDivisor => FgModule::new(ring, strict, vec![BigInt::from(2); reps]),
    }
}

/// Matrix of `F^r(m)` in the bases of [`power_basis`].
///
/// For `AntiSym` this is a lift to the free module on all monomials; rows of monomials
/// with a repeated factor are meaningful modulo 2 only.
pub fn power_on_free(kind: PowerKind, r: usize, m: &Matrix) -> Result<Matrix> {
    let ring = m.ring();
    let c = BaseCoeffs(ring);
    let src = power_basis(kind, r, m.cols());
    let tgt = power_basis(kind, r, m.rows());
    let index: HashMap<&Vec<u32>, usize> = tgt.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let cols: Vec<Vec<(usize, Scalar)>> = src
        .iter()
        .map(|key| {
            expand(kind, &c, key, |t| m.column(*t as usize).iter().map(|(i, v)| (*i as u32, v.clone())).collect())
                .into_iter()
                .map(|(k, v)| (index[&k], v))
                .collect()
        })
        .collect();
    Matrix::from_col_entries(ring, tgt.len(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    #[test]
    fn basis_counts() {
        assert_eq!(power_basis(PowerKind::Sym, 2, 3).len(), 6);
        assert_eq!(power_basis(PowerKind::Exterior, 2, 3).len(), 3);
        assert_eq!(power_basis(PowerKind::Divided, 3, 2).len(), 4);
        assert_eq!(power_basis(PowerKind::Exterior, 0, 0), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn antisym_square_of_rank_two() {
        assert_eq!(power_module(PowerKind::AntiSym, 2, 2, z()).to_string(), "Z + (Z/2)^2");
        assert_eq!(power_module(PowerKind::AntiSym, 2, 2, RingSpec::fp(2).unwrap()).to_string(), "F_2^3");
        assert_eq!(power_module(PowerKind::AntiSym, 2, 2, RingSpec::Rationals).to_string(), "Q");
    }

    #[test]
    fn scalar_action_on_powers() {
        // multiplication by 3 on k^1
        let m = Matrix::from_i64(z(), &[&[3]]);
        assert_eq!(power_on_free(PowerKind::Sym, 2, &m).unwrap().get(0, 0), int(9));
        assert_eq!(power_on_free(PowerKind::Divided, 2, &m).unwrap().get(0, 0), int(9));
        assert!(power_on_free(PowerKind::Exterior, 2, &m).unwrap().shape() == (0, 0));
    }

    #[test]
    fn determinant_from_top_exterior_power() {
        let m = Matrix::from_i64(z(), &[&[1, 2, 0], &[3, 4, 1], &[0, 5, 6]]);
        // det = 1*(24-5) - 2*(18-0) + 0 = -17
        assert_eq!(power_on_free(PowerKind::Exterior, 3, &m).unwrap().get(0, 0), int(-17));
    }

    #[test]
    fn divided_square_of_sum() {
        // γ_2(e0 + e1) = γ_2(e0) + e0 e1 + γ_2(e1)
        let m = Matrix::from_i64(z(), &[&[1], &[1]]);
        let g = power_on_free(PowerKind::Divided, 2, &m).unwrap();
        assert_eq!(g.to_rows(), vec![vec![int(1)], vec![int(1)], vec![int(1)]]);
        // Sym: (e0 + e1)^2 = e0^2 + 2 e0 e1 + e1^2
        let s = power_on_free(PowerKind::Sym, 2, &m).unwrap();
        assert_eq!(s.to_rows(), vec![vec![int(1)], vec![int(2)], vec![int(1)]]);
    }

    #[test]
    fn functoriality_on_composition() {
        let a = Matrix::from_i64(z(), &[&[1, 2], &[0, 1], &[3, -1]]);
        let b = Matrix::from_i64(z(), &[&[2, 1, 0], &[1, 1, 1]]);
        for kind in [PowerKind::Sym, PowerKind::Exterior, PowerKind::Divided] {
            let lhs = power_on_free(kind, 2, &b.mul(&a).unwrap()).unwrap();
            let rhs = power_on_free(kind, 2, &b).unwrap().mul(&power_on_free(kind, 2, &a).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "{kind:?}");
        }
    }
}
