use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: data[index],
        }),
        None => Ok(()),
    }
}

/// Euclidean norm with scaling so that huge or tiny entries neither overflow
/// nor underflow.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * sum.sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A dense real vector of length at least one with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Dimension("vector must have length >= 1".into()));
        }
        check_finite(&data)?;
        Ok(DenseVector(data))
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "vector length must be >= 1");
        DenseVector(vec![0.0; len])
    }

    /// Unit vector along coordinate `i`.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = 1.0;
        v
    }

    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        DenseVector(data)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        dot(&self.0, &other.0)
    }

    pub fn scaled(&self, c: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "add: length mismatch");
        DenseVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "sub: length mismatch");
        DenseVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Returns the vector scaled to unit length, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<DenseVector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        DenseVector::new(v)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl fmt::Debug for DenseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// Dense real matrix stored column-major, so `vec(M)` is the storage order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        DenseMatrix::from_col_major(raw.rows, raw.cols, raw.data)
    }
}

impl From<DenseMatrix> for RawMatrix {
    fn from(m: DenseMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl DenseMatrix {
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut data = vec![0.0; m * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[i + j * m] = v;
            }
        }
        Self::from_col_major(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// The m×n "identity": ones on the main diagonal, zeros elsewhere.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[DenseVector]) -> Result<Self> {
        let n = columns.len();
        let m = columns.first().map_or(0, DenseVector::len);
        if columns.iter().any(|c| c.len() != m) {
            return Err(Error::Dimension("columns differ in length".into()));
        }
        let data = columns.iter().flat_map(|c| c.iter().copied()).collect();
        Self::from_col_major(m, n, data)
    }

    /// `u vᵗ`.
    pub fn outer(u: &DenseVector, v: &DenseVector) -> Self {
        let (m, n) = (u.len(), v.len());
        let mut data = Vec::with_capacity(m * n);
        for j in 0..n {
            data.extend(u.iter().map(|ui| ui * v[j]));
        }
        DenseMatrix {
            rows: m,
            cols: n,
            data,
        }
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

    /// Column-major entries, i.e. `vec(M)`.
    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_vector(&self, j: usize) -> DenseVector {
        DenseVector::from_vec_unchecked(self.column(j).to_vec())
    }

    pub fn row_vector(&self, i: usize) -> DenseVector {
        DenseVector::from_vec_unchecked((0..self.cols).map(|j| self[(i, j)]).collect())
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, v: &DenseVector) -> DenseVector {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let vj = v[j];
            if vj == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.column(j)) {
                *o += a * vj;
            }
        }
        DenseVector::from_vec_unchecked(out)
    }

    /// `Mᵗ v`.
    pub fn tr_matvec(&self, v: &DenseVector) -> DenseVector {
        assert_eq!(self.rows, v.len(), "tr_matvec: dimension mismatch");
        DenseVector::from_vec_unchecked(
            (0..self.cols)
                .map(|j| dot(self.column(j), v.as_slice()))
                .collect(),
        )
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for k in 0..self.cols {
                let b = other[(k, j)];
                if b == 0.0 {
                    continue;
                }
                let a = self.column(k);
                for (o, aik) in out.column_mut(j).iter_mut().zip(a) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "add: shape mismatch");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "sub: shape mismatch");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// `tr(Mᵗ B)`, the entrywise inner product.
    pub fn frobenius_inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "inner: shape mismatch");
        dot(&self.data, &other.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:>12.5e}", self[(i, j)]))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}
