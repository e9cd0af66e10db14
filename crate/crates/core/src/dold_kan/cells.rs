//! Basis of the Dold–Kan levels `Γ(C)_n = ⊕_{[n] ↠ [k]} C_k`.
//!
//! A surjection `σ : [n] ↠ [k]` is recorded by its jump set
//! `J = {j < n : σ(j+1) = σ(j) + 1}`, a bitmask with `k` bits set.

/// Basis element `(σ, e)` with `e` the index of a basis vector of `C_k`, `k = |J|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Cell {
    pub jumps: u64,
    pub idx: u32,
}

impl Cell {
    pub fn degree(&self) -> i32 {
        self.jumps.count_ones() as i32
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX >> (64 - n)
    }
}

/// All `k`-element subsets of `{0..n-1}` as bitmasks, in increasing numeric order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(n: usize, k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(n, k - 1, i + 1, acc | (1 << i), out);
        }
    }
    rec(n, k, 0, 0, &mut out);
    out.sort_unstable();
    out
}

/// Basis of level `n`, sorted; `rank(k)` is the rank of `C_k`.
pub(crate) fn level_cells(n: usize, rank: impl Fn(i32) -> usize, max_degree: i32) -> Vec<Cell> {
    let mut out = Vec::new();
    for k in 0..=max_degree.min(n as i32) {
        let r = rank(k);
        if r == 0 {
            continue;
        }
        for j in subsets(n, k as usize) {
            for e in 0..r {
                out.push(Cell { jumps: j, idx: e as u32 });
            }
        }
    }
    out.sort_unstable();
    out
}

/// Outcome of a simplicial operator on a cell.
pub(crate) enum FaceImage {
    Zero,
    /// The same vector with a new surjection.
    Move(u64),
    /// `d_C` applied to the vector, with the new surjection.
    Differential(u64),
}

/// Face `d_i` on level `n`: precompose `σ` with the coface `δ^i`, then factor the
/// composite through its image; only the face `δ^0` of `[k]` acts (by `d_C`).
pub(crate) fn face(n: usize, i: usize, jumps: u64) -> FaceImage {
    if i == 0 {
        if jumps & 1 == 1 {
            FaceImage::Differential(jumps >> 1)
        } else {
            FaceImage::Move(jumps >> 1)
        }
    } else if i == n {
        if (jumps >> (n - 1)) & 1 == 1 {
            FaceImage::Zero
        } else {
            FaceImage::Move(jumps)
        }
    } else {
        let a = (jumps >> (i - 1)) & 1;
        let b = (jumps >> i) & 1;
        if a == 1 && b == 1 {
            return FaceImage::Zero;
        }
        let low = jumps & full_mask(i - 1);
        let mid = (a | b) << (i - 1);
        let high = (jumps >> (i + 1)) << i;
        FaceImage::Move(low | mid | high)
    }
}

/// Degeneracy `s_i` on level `n`: repeat the value at position `i`.
pub(crate) fn degeneracy(i: usize, jumps: u64) -> u64 {
    (jumps & full_mask(i)) | ((jumps >> i) << (i + 1))
}
