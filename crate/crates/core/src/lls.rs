//! The full-column-rank least-squares problem `min ‖b − A x‖₂`, its solution,
//! and the three quantities κ, ν, θ that drive its conditioning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, DenseMatrix, DenseVector, HouseholderQr, SvdResult};

/// Solutions with ‖x‖₂ at or below this are treated as zero.
pub const ZERO_SOLUTION_THRESHOLD: f64 = 1e-300;

/// A validated problem `(A, b)` with the SVD of `A` cached.
#[derive(Debug, Clone)]
pub struct LlsProblem {
    a: DenseMatrix,
    b: DenseVector,
    svd: SvdResult,
    norm_b: f64,
}

impl LlsProblem {
    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseVector {
        &self.b
    }

    pub fn svd(&self) -> &SvdResult {
        &self.svd
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn sigma_min(&self) -> f64 {
        self.svd.sigma_min()
    }

    /// ‖A‖₂.
    pub fn norm_a(&self) -> f64 {
        self.svd.sigma_max()
    }

    pub fn norm_b(&self) -> f64 {
        self.norm_b
    }

    /// Same matrix, different right-hand side; reuses the cached SVD.
    pub fn with_rhs(&self, b: DenseVector) -> Result<LlsProblem> {
        check_rhs(&self.a, &b)?;
        Ok(LlsProblem {
            a: self.a.clone(),
            norm_b: b.norm(),
            b,
            svd: self.svd.clone(),
        })
    }

    /// `(AᵗA)⁻¹ d` through the cached SVD: `V Σ⁻² Vᵗ d`. The normal-equations
    /// matrix is never formed.
    pub fn gram_inverse_apply(&self, d: &DenseVector) -> DenseVector {
        let v = &self.svd.right_vectors;
        let mut c = v.tr_matvec(d);
        for (ci, s) in (0..c.len()).zip(self.svd.singular_values.iter()) {
            c[ci] /= s * s;
        }
        v.matvec(&c)
    }
}

fn check_rhs(a: &DenseMatrix, b: &DenseVector) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    if b.is_zero() {
        return Err(Error::ZeroRhs);
    }
    Ok(())
}

/// Validates `(A, b)` and caches the SVD of `A`.
pub fn build_problem(a: DenseMatrix, b: DenseVector) -> Result<LlsProblem> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Dimension(format!(
            "least squares needs rows >= cols, got {m}x{n}"
        )));
    }
    check_rhs(&a, &b)?;
    let svd = svd(&a)?;
    svd.check_full_column_rank()?;
    let norm_b = b.norm();
    Ok(LlsProblem { a, b, svd, norm_b })
}

/// Solution `x`, residual `r = b − A x`, and projection `A x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlsSolution {
    pub x: DenseVector,
    pub r: DenseVector,
    pub projection: DenseVector,
}

/// Solves the problem by Householder QR.
pub fn solve(p: &LlsProblem) -> Result<LlsSolution> {
    let x = HouseholderQr::new(p.a()).solve(p.b().as_slice())?;
    let x = DenseVector::from_vec_unchecked(x);
    if x.norm() <= ZERO_SOLUTION_THRESHOLD {
        return Err(Error::ZeroSolution);
    }
    let projection = p.a().matvec(&x);
    let r = p.b().sub(&projection);
    Ok(LlsSolution { x, r, projection })
}

/// κ, ν, tan θ, sec θ and the norms they are built from. θ itself is never
/// formed; only its tangent and secant are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// ‖A‖₂ / σ_min.
    pub kappa: f64,
    /// ‖A x‖₂ / (‖x‖₂ σ_min), between 1 and κ.
    pub nu: f64,
    /// ‖r‖₂ / ‖A x‖₂.
    pub tan_theta: f64,
    /// ‖b‖₂ / ‖A x‖₂.
    pub sec_theta: f64,
    pub sigma_min: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    pub norm_x: f64,
    pub norm_r: f64,
    pub norm_ax: f64,
}

pub fn geometry(p: &LlsProblem, s: &LlsSolution) -> Geometry {
    let sigma_min = p.sigma_min();
    let norm_a = p.norm_a();
    let norm_x = s.x.norm();
    let norm_r = s.r.norm();
    let norm_ax = s.projection.norm();
    let norm_b = p.norm_b();
    Geometry {
        kappa: norm_a / sigma_min,
        nu: norm_ax / (norm_x * sigma_min),
        tan_theta: norm_r / norm_ax,
        sec_theta: norm_b / norm_ax,
        sigma_min,
        norm_a,
        norm_b,
        norm_x,
        norm_r,
        norm_ax,
    }
}

/// Convenience: build, solve and measure in one call.
pub fn analyze_problem(a: DenseMatrix, b: DenseVector) -> Result<(LlsProblem, LlsSolution, Geometry)> {
    let p = build_problem(a, b)?;
    let s = solve(&p)?;
    let g = geometry(&p, &s);
    Ok((p, s, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn family(alpha: f64, beta: f64, phi: f64) -> (DenseMatrix, DenseVector) {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, alpha], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![beta * phi.cos(), beta * phi.sin(), 1.0]).unwrap();
        (a, b)
    }

    #[test]
    fn build_accepts_and_rejects() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ones = DenseVector::new(vec![1.0; 3]).unwrap();
        assert!(build_problem(a, ones.clone()).is_ok());

        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![3.0, 0.0]]).unwrap();
        assert!(matches!(
            build_problem(a, ones.clone()),
            Err(Error::RankDeficient { .. })
        ));

        let wide = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let b2 = DenseVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(build_problem(wide, b2), Err(Error::Dimension(_))));

        let a = DenseMatrix::identity(3);
        assert!(matches!(
            build_problem(a, DenseVector::zeros(3)),
            Err(Error::ZeroRhs)
        ));
    }

    #[test]
    fn example_family_solution_and_geometry() {
        let (alpha, beta, phi) = (0.1, 1.0, PI / 10.0);
        let (a, b) = family(alpha, beta, phi);
        let (p, s, g) = analyze_problem(a, b).unwrap();
        assert!((p.sigma_min() - 0.1).abs() < 1e-16);
        assert!((s.x[0] - beta * phi.cos()).abs() < 1e-15);
        assert!((s.x[1] - beta / alpha * phi.sin()).abs() < 1e-14);
        assert_eq!(s.r.as_slice(), &[0.0, 0.0, 1.0]);
        assert!((g.kappa - 10.0).abs() < 1e-13);
        assert!((g.tan_theta - 1.0).abs() < 1e-14);
        let nu = 1.0 / ((alpha * phi.cos()).powi(2) + phi.sin().powi(2)).sqrt();
        assert!((g.nu - nu).abs() < 1e-13);
        // 10 (ν + 1) ≈ 40.93
        assert!((g.kappa * (g.nu * g.tan_theta + 1.0) - 40.929).abs() < 2e-3);
    }

    #[test]
    fn zero_residual_orthonormal() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![3.0, 4.0, 0.0]).unwrap();
        let (_, s, g) = analyze_problem(a, b).unwrap();
        assert!(s.r.is_zero());
        assert_eq!(g.tan_theta, 0.0);
        assert_eq!(g.sec_theta, 1.0);
        assert!((g.kappa - 1.0).abs() < 1e-15);
        assert!((g.nu - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_solution_is_an_error() {
        // b orthogonal to col(A) gives x = 0.
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![0.0, 0.0, 2.0]).unwrap();
        let p = build_problem(a, b).unwrap();
        assert!(matches!(solve(&p), Err(Error::ZeroSolution)));
    }

    #[test]
    fn gram_inverse_matches_direct_solve() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0], vec![1.0, 1.0]]).unwrap();
        let b = DenseVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let p = build_problem(a.clone(), b).unwrap();
        let d = DenseVector::new(vec![0.3, -0.7]).unwrap();
        let y = p.gram_inverse_apply(&d);
        let back = a.transpose().matmul(&a).matvec(&y);
        assert!(back.sub(&d).norm() < 1e-14);
    }
}
