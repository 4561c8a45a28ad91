use serde::{Deserialize, Serialize};

use super::matrix::{dot, norm2, DenseMatrix, DenseVector};
use super::qr::complete_orthonormal_basis;
use crate::error::{Error, Result};

/// Relative threshold below which σ_min/σ_max marks a matrix rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// Full singular value decomposition `M = U Σ Vᵗ` with orthogonal `U` (m×m)
/// and `V` (n×n) and nonincreasing singular values.
///
/// Signs are fixed so that the largest-magnitude entry of each right singular
/// vector is positive (lowest index wins ties). Left singular vectors that
/// have no partner (the extra columns of `U` when m > n, or columns spanning
/// a numerically null direction) are normalized by the same rule applied to
/// themselves; the same holds for the extra columns of `V` when n > m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdResult {
    pub left_vectors: DenseMatrix,
    pub singular_values: DenseVector,
    pub right_vectors: DenseMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values[self.singular_values.len() - 1]
    }

    /// Left singular vector `i` (column of U).
    pub fn left(&self, i: usize) -> DenseVector {
        self.left_vectors.column_vector(i)
    }

    /// Right singular vector `i` (column of V).
    pub fn right(&self, i: usize) -> DenseVector {
        self.right_vectors.column_vector(i)
    }

    /// `U Σ Vᵗ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let (m, n) = (self.left_vectors.rows(), self.right_vectors.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            out = out.add(&DenseMatrix::outer(&self.left(k), &self.right(k)).scaled(s));
        }
        out
    }

    pub fn check_full_column_rank(&self) -> Result<()> {
        let n = self.right_vectors.rows();
        if self.left_vectors.rows() < n {
            return Err(Error::Dimension(
                "full column rank needs rows >= cols".into(),
            ));
        }
        let smax = self.sigma_max();
        let smin = self.sigma_min();
        if smax == 0.0 || smin <= RANK_TOLERANCE * smax {
            let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
            return Err(Error::RankDeficient { ratio });
        }
        Ok(())
    }
}

/// One-sided (Hestenes) Jacobi on a tall matrix. Returns the rotated columns
/// `W = A V` (mutually orthogonal) and the accumulated rotation `V`.
fn hestenes(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.column(p), w.column(p));
                let beta = dot(w.column(q), w.column(q));
                let gamma = dot(w.column(p), w.column(q));
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= f64::EPSILON * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::FactorizationFailure { sweeps: MAX_SWEEPS })
}

fn rotate(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = c * xp - s * xq;
        m[(i, q)] = s * xp + c * xq;
    }
}

fn sign_of_dominant(col: &[f64]) -> f64 {
    let mut best = 0usize;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn flip_column(m: &mut DenseMatrix, j: usize) {
    for v in m.column_mut(j) {
        *v = -*v;
    }
}

/// Tall case (m ≥ n): returns U (m×m), σ (n), V (n×n) before sign fixing.
fn svd_tall(a: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let (m, n) = a.shape();
    let (w, v_raw) = hestenes(a)?;
    let norms: Vec<f64> = (0..n).map(|j| norm2(w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut v = DenseMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        v.column_mut(k).copy_from_slice(v_raw.column(j));
    }

    // Columns whose singular value sits at round-off level carry no reliable
    // direction; their left vectors come from the orthogonal complement.
    let null_cut = sigma[0] * (m.max(n) as f64) * f64::EPSILON;
    let trusted: Vec<usize> = (0..n)
        .filter(|&k| sigma[k] > 0.0 && sigma[k] > null_cut)
        .collect();
    let mut u = DenseMatrix::zeros(m, m);
    if trusted.is_empty() {
        u = DenseMatrix::identity(m);
    } else {
        let mut basis = DenseMatrix::zeros(m, trusted.len());
        for (c, &k) in trusted.iter().enumerate() {
            let src = w.column(order[k]);
            for (dst, s) in basis.column_mut(c).iter_mut().zip(src) {
                *dst = s / sigma[k];
            }
        }
        let full = complete_orthonormal_basis(&basis);
        let mut next_complement = trusted.len();
        let mut trusted_iter = 0usize;
        for k in 0..m {
            if trusted_iter < trusted.len() && trusted[trusted_iter] == k {
                u.column_mut(k).copy_from_slice(full.column(trusted_iter));
                trusted_iter += 1;
            } else {
                u.column_mut(k).copy_from_slice(full.column(next_complement));
                next_complement += 1;
            }
        }
    }
    Ok((u, sigma, v))
}

/// Singular value decomposition by one-sided Jacobi rotations.
pub fn svd(mat: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = mat.shape();
    let (mut u, sigma, mut v) = if m >= n {
        svd_tall(mat)?
    } else {
        let (ut, s, vt) = svd_tall(&mat.transpose())?;
        (vt, s, ut)
    };
    let k = m.min(n);
    for i in 0..k {
        if sign_of_dominant(v.column(i)) < 0.0 {
            flip_column(&mut v, i);
            flip_column(&mut u, i);
        }
    }
    for i in k..m {
        if sign_of_dominant(u.column(i)) < 0.0 {
            flip_column(&mut u, i);
        }
    }
    for i in k..n {
        if sign_of_dominant(v.column(i)) < 0.0 {
            flip_column(&mut v, i);
        }
    }
    Ok(SvdResult {
        left_vectors: u,
        singular_values: DenseVector::from_vec_unchecked(sigma),
        right_vectors: v,
    })
}

/// Sum of singular values (nuclear / trace norm), computed from the SVD.
pub fn nuclear_norm_oracle(mat: &DenseMatrix) -> Result<f64> {
    Ok(svd(mat)?.singular_values.iter().sum())
}

/// Largest singular value (matrix 2-norm).
pub fn spectral_norm(mat: &DenseMatrix) -> Result<f64> {
    Ok(svd(mat)?.sigma_max())
}
