use super::matrix::{dot, norm2, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Householder QR factorization of a tall matrix (rows ≥ cols).
///
/// Reflector `k` is `I − τₖ wₖ wₖᵗ` acting on rows `k..m`.
#[derive(Debug, Clone)]
pub(crate) struct HouseholderQr {
    rows: usize,
    cols: usize,
    /// R in the upper triangle; reflector tails are kept separately.
    r: DenseMatrix,
    reflectors: Vec<Vec<f64>>,
    taus: Vec<f64>,
}

impl HouseholderQr {
    pub(crate) fn new(a: &DenseMatrix) -> Self {
        let (m, n) = a.shape();
        assert!(m >= n, "Householder QR needs rows >= cols");
        let mut r = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        let mut taus = Vec::with_capacity(n);
        for k in 0..n {
            let x: Vec<f64> = r.column(k)[k..].to_vec();
            let xnorm = norm2(&x);
            let mut w = x;
            let tau = if xnorm == 0.0 {
                0.0
            } else {
                let alpha = if w[0] >= 0.0 { -xnorm } else { xnorm };
                w[0] -= alpha;
                let ww = dot(&w, &w);
                if ww == 0.0 {
                    0.0
                } else {
                    2.0 / ww
                }
            };
            if tau != 0.0 {
                for j in k..n {
                    let col = &mut r.column_mut(j)[k..];
                    let s = tau * dot(&w, col);
                    for (c, wi) in col.iter_mut().zip(&w) {
                        *c -= s * wi;
                    }
                }
            }
            for i in k + 1..m {
                r[(i, k)] = 0.0;
            }
            reflectors.push(w);
            taus.push(tau);
        }
        HouseholderQr {
            rows: m,
            cols: n,
            r,
            reflectors,
            taus,
        }
    }

    /// Overwrites `b` with `Qᵗ b`.
    pub(crate) fn apply_qt(&self, b: &mut [f64]) {
        for (k, (w, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate() {
            if tau == 0.0 {
                continue;
            }
            let seg = &mut b[k..];
            let s = tau * dot(w, seg);
            for (bi, wi) in seg.iter_mut().zip(w) {
                *bi -= s * wi;
            }
        }
    }

    /// Overwrites `b` with `Q b`.
    pub(crate) fn apply_q(&self, b: &mut [f64]) {
        for (k, (w, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate().rev() {
            if tau == 0.0 {
                continue;
            }
            let seg = &mut b[k..];
            let s = tau * dot(w, seg);
            for (bi, wi) in seg.iter_mut().zip(w) {
                *bi -= s * wi;
            }
        }
    }

    /// The full m×m orthogonal factor.
    pub(crate) fn q_full(&self) -> DenseMatrix {
        let m = self.rows;
        let mut q = DenseMatrix::identity(m);
        for j in 0..m {
            self.apply_q(q.column_mut(j));
        }
        q
    }

    /// Least-squares solve by back substitution on R. Fails on an exactly
    /// singular R; callers are expected to have screened the rank already.
    pub(crate) fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.rows);
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let n = self.cols;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s = qtb[i] - (i + 1..n).map(|j| self.r[(i, j)] * x[j]).sum::<f64>();
            let d = self.r[(i, i)];
            if d == 0.0 {
                return Err(Error::RankDeficient { ratio: 0.0 });
            }
            x[i] = s / d;
        }
        Ok(x)
    }
}

/// Extends `k` orthonormal columns (m×k) to a full m×m orthogonal matrix whose
/// first `k` columns are exactly the given ones.
pub(crate) fn complete_orthonormal_basis(columns: &DenseMatrix) -> DenseMatrix {
    let (_, k) = columns.shape();
    let qr = HouseholderQr::new(columns);
    let mut q = qr.q_full();
    for j in 0..k {
        q.column_mut(j).copy_from_slice(columns.column(j));
    }
    q
}

/// Solves `min ‖b − A x‖₂` by Householder QR after checking full column rank
/// (rank-deficient when σ_min ≤ tolerance · σ_max).
pub fn qr_least_squares(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Dimension(format!(
            "least squares needs rows >= cols, got {m}x{n}"
        )));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {m} rows",
            b.len()
        )));
    }
    let svd = super::svd(a)?;
    svd.check_full_column_rank()?;
    let x = HouseholderQr::new(a).solve(b.as_slice())?;
    Ok(DenseVector::from_vec_unchecked(x))
}
