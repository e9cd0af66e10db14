use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::domain::{dense_from_matrix, matrix_from_dense, with_domain, Domain};
use super::module::FgModule;
use super::ring::Scalar;
use super::sparse;
use super::Matrix;
use crate::error::{Error, Result};

pub(crate) struct DenseSnf<E> {
    pub diag: Vec<E>,
    pub u: Vec<Vec<E>>,
    pub u_inv: Vec<Vec<E>>,
    pub v: Vec<Vec<E>>,
    pub v_inv: Vec<Vec<E>>,
}

fn ident<D: Domain>(d: &D, n: usize) -> Vec<Vec<D::E>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { d.one() } else { d.zero() }).collect()).collect()
}

struct Tracker<'a, D: Domain> {
    d: &'a D,
    a: Vec<Vec<D::E>>,
    track: bool,
    u: Vec<Vec<D::E>>,
    u_inv: Vec<Vec<D::E>>,
    v: Vec<Vec<D::E>>,
    v_inv: Vec<Vec<D::E>>,
}

impl<'a, D: Domain> Tracker<'a, D> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            for row in self.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if self.track {
            for row in self.v.iter_mut() {
                row.swap(i, j);
            }
            self.v_inv.swap(i, j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &D::E) {
        let d = self.d;
        let src = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&src) {
            if !d.is_zero(y) {
                *x = d.add(x, &d.mul(c, y));
            }
        }
        if self.track {
            let src = self.u[j].clone();
            for (x, y) in self.u[i].iter_mut().zip(&src) {
                if !d.is_zero(y) {
                    *x = d.add(x, &d.mul(c, y));
                }
            }
            for row in self.u_inv.iter_mut() {
                let t = d.mul(c, &row[i]);
                if !d.is_zero(&t) {
                    row[j] = d.sub(&row[j], &t);
                }
            }
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &D::E) {
        let d = self.d;
        for row in self.a.iter_mut() {
            let t = d.mul(c, &row[j]);
            if !d.is_zero(&t) {
                row[i] = d.add(&row[i], &t);
            }
        }
        if self.track {
            for row in self.v.iter_mut() {
                let t = d.mul(c, &row[j]);
                if !d.is_zero(&t) {
                    row[i] = d.add(&row[i], &t);
                }
            }
            let src = self.v_inv[i].clone();
            for (x, y) in self.v_inv[j].iter_mut().zip(&src) {
                if !d.is_zero(y) {
                    *x = d.sub(x, &d.mul(c, y));
                }
            }
        }
    }

    fn scale_row(&mut self, i: usize, u: &D::E, u_inv: &D::E) {
        let d = self.d;
        for x in self.a[i].iter_mut() {
            *x = d.mul(x, u);
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = d.mul(x, u);
            }
            for row in self.u_inv.iter_mut() {
                row[i] = d.mul(&row[i], u_inv);
            }
        }
    }
}

/// Smith normal form `U A V = D` by Euclidean elimination with minimal-size pivots.
pub(crate) fn dense_snf<D: Domain>(d: &D, a: Vec<Vec<D::E>>, rows: usize, cols: usize, track: bool) -> DenseSnf<D::E> {
    let (u, u_inv, v, v_inv) = if track {
        (ident(d, rows), ident(d, rows), ident(d, cols), ident(d, cols))
    } else {
        (vec![], vec![], vec![], vec![])
    };
    let mut t = Tracker { d, a, track, u, u_inv, v, v_inv };
    let mut diag = Vec::new();
    for s in 0..rows.min(cols) {
        // pivot of minimal size in the remaining block
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in s..rows {
            for j in s..cols {
                if !d.is_zero(&t.a[i][j]) {
                    let sz = d.size(&t.a[i][j]);
                    if best.as_ref().is_none_or(|b| sz < b.2) {
                        best = Some((i, j, sz));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        t.swap_rows(s, pi);
        t.swap_cols(s, pj);
        loop {
            let mut dirty = false;
            for i in s + 1..rows {
                if d.is_zero(&t.a[i][s]) {
                    continue;
                }
                let q = d.quo(&t.a[i][s], &t.a[s][s]);
                t.add_row(i, s, &d.neg(&q));
                if !d.is_zero(&t.a[i][s]) {
                    dirty = true;
                }
            }
            if dirty {
                let i = (s + 1..rows)
                    .filter(|&i| !d.is_zero(&t.a[i][s]))
                    .min_by(|&x, &y| d.size(&t.a[x][s]).cmp(&d.size(&t.a[y][s])))
                    .unwrap();
                t.swap_rows(s, i);
                continue;
            }
            for j in s + 1..cols {
                if d.is_zero(&t.a[s][j]) {
                    continue;
                }
                let q = d.quo(&t.a[s][j], &t.a[s][s]);
                t.add_col(j, s, &d.neg(&q));
                if !d.is_zero(&t.a[s][j]) {
                    dirty = true;
                }
            }
            if dirty {
                let j = (s + 1..cols)
                    .filter(|&j| !d.is_zero(&t.a[s][j]))
                    .min_by(|&x, &y| d.size(&t.a[s][x]).cmp(&d.size(&t.a[s][y])))
                    .unwrap();
                t.swap_cols(s, j);
                continue;
            }
            if d.is_unit(&t.a[s][s]) {
                break;
            }
            let piv = t.a[s][s].clone();
            let bad = (s + 1..rows).find(|&i| {
                (s + 1..cols).any(|j| {
                    let x = &t.a[i][j];
                    !d.is_zero(x) && {
                        let q = d.quo(x, &piv);
                        d.sub(x, &d.mul(&q, &piv)) != d.zero()
                    }
                })
            });
            match bad {
                Some(i) => t.add_row(s, i, &d.one()),
                None => break,
            }
        }
        let (un, un_inv) = d.canonical_unit(&t.a[s][s]);
        t.scale_row(s, &un, &un_inv);
        diag.push(t.a[s][s].clone());
    }
    DenseSnf { diag, u: t.u, u_inv: t.u_inv, v: t.v, v_inv: t.v_inv }
}

/// Smith normal form of a matrix with unimodular transforms: `u * m * v = diag`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_rank`.
    pub diagonal: Vec<Scalar>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// The diagonal matrix `u * m * v`.
    pub fn diagonal_matrix(&self) -> Matrix {
        let (rows, cols) = (self.u.rows(), self.v.cols());
        let entries = (0..cols)
            .map(|j| if j < self.diagonal.len() { vec![(j, self.diagonal[j].clone())] } else { vec![] })
            .collect();
        Matrix::from_col_entries(self.u.ring(), rows, entries).expect("diagonal well formed")
    }
}

pub fn smith_normal_form(m: &Matrix) -> SmithForm {
    let ring = m.ring();
    with_domain!(ring, d => {
        let a = dense_from_matrix(&d, m);
        let s = dense_snf(&d, a, m.rows(), m.cols(), true);
        SmithForm {
            u: matrix_from_dense(&d, ring, m.rows(), m.rows(), &s.u),
            u_inv: matrix_from_dense(&d, ring, m.rows(), m.rows(), &s.u_inv),
            v: matrix_from_dense(&d, ring, m.cols(), m.cols(), &s.v),
            v_inv: matrix_from_dense(&d, ring, m.cols(), m.cols(), &s.v_inv),
            diagonal: s.diag.iter().map(|x| d.to_scalar(x)).collect(),
        }
    })
}

/// Rank of a matrix (over Z: rank over Q).
pub fn rank(m: &Matrix) -> usize {
    sparse::rank_and_factors(m).0
}

/// Nonzero invariant factors, normalized: positive over Z, equal to one over fields.
pub fn invariant_factors(m: &Matrix) -> Vec<Scalar> {
    let (r, tors) = sparse::rank_and_factors(m);
    let mut out: Vec<Scalar> = vec![Scalar::one(); r - tors.len()];
    out.extend(tors.into_iter().map(super::ring::int));
    out
}

/// Cokernel of `m: k^cols -> k^rows`.
pub fn cokernel(m: &Matrix) -> FgModule {
    let (r, tors) = sparse::rank_and_factors(m);
    FgModule::new(m.ring(), m.rows() - r, tors)
}

/// A basis of the kernel as the columns of a matrix; over Z the basis spans a saturated sublattice.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let s = smith_normal_form(m);
    let idx: Vec<usize> = (s.rank()..m.cols()).collect();
    s.v.select_cols(&idx)
}

/// A basis of the image (column span) as the columns of a matrix.
pub fn image_basis(m: &Matrix) -> Matrix {
    let s = smith_normal_form(m);
    let ring = m.ring();
    let cols: Vec<Vec<(usize, Scalar)>> = (0..s.rank())
        .map(|j| s.u_inv.column(j).iter().map(|(i, v)| (*i, v * &s.diagonal[j])).collect())
        .collect();
    Matrix::from_col_entries(ring, m.rows(), cols).expect("image basis well formed")
}

/// A left inverse `l` with `l * k = 1` of a split injective `k`.
pub fn left_inverse(k: &Matrix) -> Result<Matrix> {
    let ring = k.ring();
    let s = smith_normal_form(k);
    if s.rank() != k.cols() || s.diagonal.iter().any(|x| !ring.is_unit(x)) {
        return Err(Error::pre("matrix is not split injective"));
    }
    // k = u^{-1} [D; 0] v^{-1}  so  l = v D^{-1} [1 0] u
    let n = k.cols();
    let dinv: Vec<Vec<(usize, Scalar)>> = (0..k.rows())
        .map(|j| if j < n { vec![(j, ring.inv(&s.diagonal[j]).unwrap())] } else { vec![] })
        .collect();
    let proj = Matrix::from_col_entries(ring, n, dinv)?;
    s.v.mul(&proj)?.mul(&s.u)
}

/// Some `x` with `a * x = b`, if one exists.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    if a.rows() != b.rows() {
        return Err(Error::dim("solve: row counts differ"));
    }
    let ring = a.ring();
    let s = smith_normal_form(a);
    let y = s.u.mul(b)?;
    let r = s.rank();
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        let mut col = Vec::new();
        for (i, v) in y.column(j) {
            if *i >= r {
                return Ok(None);
            }
            let di = &s.diagonal[*i];
            if !ring.divides(di, v) {
                return Ok(None);
            }
            col.push((*i, ring.red(v / di)));
        }
        cols.push(col);
    }
    let z = Matrix::from_col_entries(ring, a.cols(), cols)?;
    Ok(Some(s.v.mul(&z)?))
}

/// Invariant factors of a diagonal matrix with the given nonzero diagonal.
pub(crate) fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.retain(|x| !x.is_one());
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|x| !x.is_one() && !x.is_zero());
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ring::int;
    use crate::linalg::RingSpec;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    #[test]
    fn pivot_with_negative_entry_terminates() {
        let m = Matrix::from_i64(z(), &[&[4, 4, 0], &[-2, 0, 2], &[0, -3, -3]]);
        assert_eq!(smith_normal_form(&m).diagonal, vec![int(1), int(2)]);
        assert_eq!(cokernel(&m).to_string(), "Z + Z/2");
    }

    #[test]
    fn snf_of_small_integer_matrix() {
        let m = Matrix::from_i64(z(), &[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec![int(2), int(6), int(12)]);
        assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.diagonal_matrix());
        assert!(s.u.mul(&s.u_inv).unwrap().is_identity());
        assert!(s.v_inv.mul(&s.v).unwrap().is_identity());
    }

    #[test]
    fn snf_example_with_torsion() {
        let m = Matrix::from_i64(z(), &[&[2, 0], &[0, 3]]);
        assert_eq!(smith_normal_form(&m).diagonal, vec![int(1), int(6)]);
        assert_eq!(cokernel(&m).to_string(), "Z/6");
        let m = Matrix::from_i64(z(), &[&[2]]);
        assert_eq!(cokernel(&m).to_string(), "Z/2");
    }

    #[test]
    fn kernel_is_saturated() {
        let m = Matrix::from_i64(z(), &[&[2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        let v = k.dense_column(0);
        assert!(m.apply(&v).unwrap().iter().all(|x| x.is_zero()));
        let g = v[0].to_integer().gcd(&v[1].to_integer());
        assert!(g.is_one());
    }

    #[test]
    fn left_inverse_and_solve() {
        let k = Matrix::from_i64(z(), &[&[1, 0], &[2, 1], &[3, 5]]);
        let l = left_inverse(&k).unwrap();
        assert!(l.mul(&k).unwrap().is_identity());
        assert!(left_inverse(&Matrix::from_i64(z(), &[&[2]])).is_err());
        let a = Matrix::from_i64(z(), &[&[2, 0], &[0, 3]]);
        let b = Matrix::from_i64(z(), &[&[4], &[9]]);
        let x = solve(&a, &b).unwrap().unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        assert!(solve(&a, &Matrix::from_i64(z(), &[&[1], &[0]])).unwrap().is_none());
    }

    #[test]
    fn image_basis_spans_image() {
        let m = Matrix::from_i64(z(), &[&[2, 4], &[0, 0], &[2, 4]]);
        let b = image_basis(&m);
        assert_eq!(b.cols(), 1);
        assert!(solve(&b, &m).unwrap().is_some());
        assert!(solve(&m, &b).unwrap().is_some());
    }

    #[test]
    fn field_rank_and_kernel() {
        let f2 = RingSpec::fp(2).unwrap();
        let m = Matrix::from_i64(f2, &[&[2, 1], &[0, 1]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(kernel_basis(&m).cols(), 1);
        assert_eq!(cokernel(&Matrix::from_i64(RingSpec::Rationals, &[&[2]])).to_string(), "0");
    }

    #[test]
    fn diagonal_normalization() {
        let d = normalize_diagonal(vec![BigInt::from(4), BigInt::from(6), BigInt::from(1)]);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(12)]);
    }
}
