use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ring::{int, RingSpec, Scalar};
use crate::error::{Error, Result};

/// Sparse column-major matrix over a ring from [`RingSpec`].
///
/// Column `j` lists its nonzero entries as `(row, value)` sorted by row.
/// Values are always stored reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, Scalar)>>,
}

impl Matrix {
    pub fn zeros(ring: RingSpec, rows: usize, cols: usize) -> Self {
        Matrix { ring, rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(ring: RingSpec, n: usize) -> Self {
        let columns = (0..n).map(|j| vec![(j, Scalar::from_integer(1.into()))]).collect();
        Matrix { ring, rows: n, cols: n, columns }
    }

    pub fn from_rows(ring: RingSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_sized(ring, nrows, ncols, rows)
    }

    pub fn from_rows_sized(ring: RingSpec, nrows: usize, ncols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        if rows.len() != nrows {
            return Err(Error::dim(format!("expected {nrows} rows, got {}", rows.len())));
        }
        let mut columns = vec![Vec::new(); ncols];
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::dim(format!("row {i} has {} entries, expected {ncols}", row.len())));
            }
            for (j, v) in row.into_iter().enumerate() {
                let v = ring.reduce(&v)?;
                if !v.is_zero() {
                    columns[j].push((i, v));
                }
            }
        }
        Ok(Matrix { ring, rows: nrows, cols: ncols, columns })
    }

    /// Convenience constructor from small integer rows.
    pub fn from_i64(ring: RingSpec, rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        Self::from_rows_sized(ring, rows.len(), ncols, data).expect("well-formed integer matrix")
    }

    /// Builds a matrix from unsorted column entries; repeated positions are summed.
    pub fn from_col_entries(ring: RingSpec, rows: usize, cols: Vec<Vec<(usize, Scalar)>>) -> Result<Self> {
        let ncols = cols.len();
        let mut columns = Vec::with_capacity(ncols);
        for col in cols {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (i, v) in col {
                if i >= rows {
                    return Err(Error::dim(format!("row index {i} out of range {rows}")));
                }
                let e = acc.entry(i).or_insert_with(Scalar::zero);
                *e += v;
            }
            let mut out = Vec::with_capacity(acc.len());
            for (i, v) in acc {
                let v = ring.reduce(&v)?;
                if !v.is_zero() {
                    out.push((i, v));
                }
            }
            columns.push(out);
        }
        Ok(Matrix { ring, rows, cols: ncols, columns })
    }

    pub fn from_dense_cols(ring: RingSpec, rows: usize, cols: &[Vec<Scalar>]) -> Result<Self> {
        let entries = cols
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
            .collect();
        Self::from_col_entries(ring, rows, entries)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self.columns[j].binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => self.columns[j][k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.columns.iter().enumerate().all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1 == int(1))
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.clone();
            }
        }
        out
    }

    pub fn dense_column(&self, j: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.rows];
        for (i, v) in &self.columns[j] {
            out[*i] = v.clone();
        }
        out
    }

    fn same_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.columns[*k] {
                        *acc.entry(*i).or_insert_with(Scalar::zero) += a * b;
                    }
                }
                acc.into_iter()
                    .map(|(i, v)| (i, ring.red(v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Ok(Matrix { ring, rows: self.rows, cols: other.cols, columns })
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, a) in &self.columns[j] {
                out[*i] += a * x;
            }
        }
        Ok(out.into_iter().map(|x| self.ring.red(x)).collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.shape() != other.shape() {
            return Err(Error::dim("cannot add matrices of different shapes"));
        }
        let cols = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().chain(b.iter()).cloned().collect())
            .collect();
        Matrix::from_col_entries(self.ring, self.rows, cols)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let ring = self.ring;
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(i, v)| (*i, ring.red(v * c)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Matrix { ring, rows: self.rows, cols: self.cols, columns }
    }

    pub fn transpose(&self) -> Matrix {
        let mut columns = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                columns[*i].push((j, v.clone()));
            }
        }
        Matrix { ring: self.ring, rows: self.cols, cols: self.rows, columns }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::dim("hstack of matrices with different row counts"));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(Matrix { ring: self.ring, rows: self.rows, cols: self.cols + other.cols, columns })
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::dim("vstack of matrices with different column counts"));
        }
        let off = self.rows;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().cloned().chain(b.iter().map(|(i, v)| (i + off, v.clone()))).collect())
            .collect();
        Ok(Matrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, columns })
    }

    /// Assembles a block matrix; `blocks[r][c]` must have `row_sizes[r]` rows and `col_sizes[c]` columns,
    /// `None` standing for a zero block.
    pub fn from_blocks(
        ring: RingSpec,
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[Vec<Option<&Matrix>>],
    ) -> Result<Matrix> {
        let rows: usize = row_sizes.iter().sum();
        let mut columns = Vec::new();
        for (c, &w) in col_sizes.iter().enumerate() {
            for j in 0..w {
                let mut col = Vec::new();
                let mut off = 0;
                for (r, &h) in row_sizes.iter().enumerate() {
                    if let Some(b) = blocks[r][c] {
                        if b.shape() != (h, w) {
                            return Err(Error::dim(format!(
                                "block ({r},{c}) has shape {:?}, expected {:?}",
                                b.shape(),
                                (h, w)
                            )));
                        }
                        if b.ring != ring {
                            return Err(Error::RingMismatch(ring, b.ring));
                        }
                        col.extend(b.columns[j].iter().map(|(i, v)| (i + off, v.clone())));
                    }
                    off += h;
                }
                columns.push(col);
            }
        }
        Ok(Matrix { ring, rows, cols: columns.len(), columns })
    }

    pub fn block_diag(&self, other: &Matrix) -> Result<Matrix> {
        Matrix::from_blocks(
            self.ring,
            &[self.rows, other.rows],
            &[self.cols, other.cols],
            &[vec![Some(self), None], vec![None, Some(other)]],
        )
    }

    /// Kronecker product, with row index `i * other.rows + k` and column index `j * other.cols + l`.
    pub fn kronecker(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        let ring = self.ring;
        let mut columns = Vec::with_capacity(self.cols * other.cols);
        for a in &self.columns {
            for b in &other.columns {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (i, x) in a {
                    for (k, y) in b {
                        col.push((i * other.rows + k, ring.red(x * y)));
                    }
                }
                col.retain(|(_, v)| !v.is_zero());
                columns.push(col);
            }
        }
        Ok(Matrix { ring, rows: self.rows * other.rows, cols: columns.len(), columns })
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let columns = idx.iter().map(|&j| self.columns[j].clone()).collect();
        Matrix { ring: self.ring, rows: self.rows, cols: idx.len(), columns }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let mut v: Vec<(usize, Scalar)> =
                    c.iter().filter(|(i, _)| pos[*i] != usize::MAX).map(|(i, v)| (pos[*i], v.clone())).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect();
        Matrix { ring: self.ring, rows: idx.len(), cols: self.cols, columns }
    }

    /// Reinterprets the entries in another ring (e.g. reduction Z to F_p, or Z into Q).
    pub fn change_ring(&self, ring: RingSpec) -> Result<Matrix> {
        let cols = self.columns.clone();
        Matrix::from_col_entries(ring, self.rows, cols)
    }

    pub fn map_entries(&self, f: impl Fn(&Scalar) -> Scalar) -> Result<Matrix> {
        let cols = self.columns.iter().map(|c| c.iter().map(|(i, v)| (*i, f(v))).collect()).collect();
        Matrix::from_col_entries(self.ring, self.rows, cols)
    }

    /// Entries as integers; fails over Q for non-integral entries.
    pub fn integer_rows(&self) -> Result<Vec<Vec<BigInt>>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                if !v.is_integer() {
                    return Err(Error::Parse(format!("entry {v} is not integral")));
                }
                out[*i][j] = v.to_integer();
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let z = RingSpec::Integers;
        let a = Matrix::from_i64(z, &[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(z, &[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), Matrix::from_i64(z, &[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), Matrix::from_i64(z, &[&[1, 3], &[2, 4]]));
        assert!(a.mul(&Matrix::zeros(z, 3, 1)).is_err());
    }

    #[test]
    fn reduction_in_prime_field() {
        let f3 = RingSpec::fp(3).unwrap();
        let a = Matrix::from_i64(f3, &[&[4, -1], &[3, 6]]);
        assert_eq!(a.to_rows(), vec![vec![int(1), int(2)], vec![int(0), int(0)]]);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn kronecker_layout() {
        let z = RingSpec::Integers;
        let a = Matrix::from_i64(z, &[&[1, 2]]);
        let b = Matrix::from_i64(z, &[&[1], &[3]]);
        let k = a.kronecker(&b).unwrap();
        assert_eq!(k, Matrix::from_i64(z, &[&[1, 2], &[3, 6]]));
    }

    #[test]
    fn blocks_and_stacks() {
        let z = RingSpec::Integers;
        let a = Matrix::from_i64(z, &[&[1]]);
        let b = Matrix::from_i64(z, &[&[2, 3]]);
        let d = a.block_diag(&b).unwrap();
        assert_eq!(d, Matrix::from_i64(z, &[&[1, 0, 0], &[0, 2, 3]]));
        assert_eq!(a.hstack(&a).unwrap(), Matrix::from_i64(z, &[&[1, 1]]));
        assert_eq!(b.vstack(&b).unwrap().rows(), 2);
        assert_eq!(d.select_rows(&[1]).select_cols(&[2]), Matrix::from_i64(z, &[&[3]]));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Matrix::identity(RingSpec::Integers, 2);
        let b = Matrix::identity(RingSpec::Rationals, 2);
        assert!(matches!(a.mul(&b), Err(Error::RingMismatch(_, _))));
    }
}
