//! The filtered circle as the bar construction of the (u−1)-adically filtered `Z[u^{±1}]`.

use std::collections::{BTreeMap, HashMap};

use crate::complexes::{ChainComplex, HomologyTable};
use crate::error::{Error, Result};
use crate::graded::{FilteredStub, GradedComplex};
use crate::linalg::{int, Matrix, RingSpec, Scalar};

/// Compositions of `w` (ordered tuples of positive integers summing to `w`).
fn compositions(w: u32) -> Vec<Vec<u32>> {
    if w == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=w {
        for mut rest in compositions(w - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Reduced bar complex `B(Z, A, Z)` for `A = Z[u^{±1}]/(u−1)^N ≅ Z[t]/t^N`, `t = u − 1`.
///
/// The bar element `[t^{k_1}|…|t^{k_m}]` sits in degree `m` and level `Σ k_i`; levels `≥ N`
/// are dropped, which is the quotient by `F^N`.
pub fn filtered_circle_stub(n: usize) -> Result<FilteredStub> {
    if n < 2 {
        return Err(Error::pre("the filtered circle stub needs N ≥ 2"));
    }
    let ring = RingSpec::Integers;
    let mut by_degree: BTreeMap<i32, Vec<Vec<u32>>> = BTreeMap::new();
    for w in 0..n as u32 {
        for c in compositions(w) {
            by_degree.entry(c.len() as i32).or_default().push(c);
        }
    }
    let index: HashMap<Vec<u32>, usize> =
        by_degree.values().flat_map(|v| v.iter().enumerate().map(|(i, c)| (c.clone(), i))).collect();
    let mut d = BTreeMap::new();
    for (&m, elems) in &by_degree {
        if m < 2 {
            continue;
        }
        let rows = by_degree[&(m - 1)].len();
        let cols: Vec<Vec<(usize, Scalar)>> = elems
            .iter()
            .map(|c| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for i in 1..c.len() {
                    let mut merged = c[..i - 1].to_vec();
                    merged.push(c[i - 1] + c[i]);
                    merged.extend_from_slice(&c[i + 1..]);
                    let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                    *acc.entry(index[&merged]).or_insert_with(|| int(0)) += sign;
                }
                acc.into_iter().filter(|(_, v)| *v != int(0)).collect()
            })
            .collect();
        d.insert(m, Matrix::from_col_entries(ring, rows, cols)?);
    }
    let ranks = by_degree.iter().map(|(i, v)| (*i, v.len())).collect();
    let complex = ChainComplex::new(ring, ranks, d)?;
    let levels = by_degree.iter().map(|(i, v)| (*i, v.iter().map(|c| c.iter().sum::<u32>() as i64).collect())).collect();
    FilteredStub::from_levels(&complex, &levels, n)
}

/// `D₋^∨ = k(0) ⊕ k[1](−1)`, square-zero, with `∂` of weight −1 primitive.
#[derive(Clone, Debug)]
pub struct DMinusDual {
    pub graded: GradedComplex,
    /// Coordinates of `Δ(∂)` on the weight −1 part of `D₋^∨ ⊗ D₋^∨`, whose basis in
    /// degree 1 is `(1 ⊗ ∂, ∂ ⊗ 1)`.
    pub comultiplication: Vec<Scalar>,
}

impl DMinusDual {
    pub fn new(ring: RingSpec) -> Self {
        let graded = GradedComplex::unit(ring)
            .direct_sum(&GradedComplex::single(-1, ChainComplex::concentrated(ring, 1, 1)))
            .expect("same ring");
        DMinusDual { graded, comultiplication: vec![int(1), int(1)] }
    }

    /// Coassociativity and counitality of `Δ(1) = 1⊗1`, `Δ(∂) = a·1⊗∂ + b·∂⊗1`, checked on the
    /// basis `(1⊗1⊗∂, 1⊗∂⊗1, ∂⊗1⊗1)` of the weight −1 part of the triple tensor.
    pub fn is_counital_coassociative(&self) -> bool {
        let (a, b) = (&self.comultiplication[0], &self.comultiplication[1]);
        let left = [a.clone(), b * a, b * b];
        let right = [a * a, a * b, b.clone()];
        left == right && a == &int(1) && b == &int(1)
    }
}

/// Piecewise comparison of `gr(T_fil)^∨`, weights negated and sheared by `[−2⋆]`, with `D₋^∨`.
#[derive(Clone, Debug)]
pub struct CircleComparison {
    pub gr: BTreeMap<i32, HomologyTable>,
    pub total: HomologyTable,
    pub sheared_dual: BTreeMap<i32, HomologyTable>,
    pub expected: BTreeMap<i32, HomologyTable>,
}

impl CircleComparison {
    pub fn agrees(&self) -> bool {
        self.sheared_dual == self.expected
    }
}

pub fn circle_comparison(n: usize) -> Result<CircleComparison> {
    let st = filtered_circle_stub(n)?;
    let gr = st.associated_graded()?;
    let sheared = gr.dual().negate_weights().shear(-1);
    let d = DMinusDual::new(RingSpec::Integers);
    let nonzero = |g: &GradedComplex| -> BTreeMap<i32, HomologyTable> {
        g.homology().into_iter().filter(|(_, h)| !h.is_zero()).collect()
    };
    Ok(CircleComparison {
        gr: gr.homology(),
        total: st.level(0).homology(),
        sheared_dual: nonzero(&sheared),
        expected: nonzero(&d.graded),
    })
}
