//! Frobenius and nuclear norms of `u₁v₁ᵗ + u₂v₂ᵗ` from a 2×2 representation,
//! without forming the m×n matrix.
//!
//! With orthonormal bases `w₁, w₂` for span(u₁, u₂) and `x₁, x₂` for
//! span(v₁, v₂), write `u₁ = α₁w₁`, `u₂ = α₂w₁ + βw₂`, `v₁ = γ₁x₁`,
//! `v₂ = γ₂x₁ + δx₂`. The matrix then acts as the 2×2 block
//!
//! ```text
//!     C = [ α₁γ₁ + α₂γ₂   α₂δ ]
//!         [ βγ₂           βδ  ]
//! ```
//!
//! so `‖G‖_F² = tr(M)` and `‖G‖_* = √(tr(M) + 2√det(M))` with `M = CᵗC` and
//! `√det(M) = α₁γ₁βδ`. The latter is the angle form
//! `√(a² + b² + 2ab cos(θ_u − θ_v))` with `cos(θ_u − θ_v)` expanded by the
//! difference formula.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, DenseMatrix, DenseVector};

/// The four vectors of `u₁v₁ᵗ + u₂v₂ᵗ`. Zero vectors are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank2Outer {
    pub u1: DenseVector,
    pub v1: DenseVector,
    pub u2: DenseVector,
    pub v2: DenseVector,
}

impl Rank2Outer {
    pub fn new(u1: DenseVector, v1: DenseVector, u2: DenseVector, v2: DenseVector) -> Result<Self> {
        if u1.len() != u2.len() || v1.len() != v2.len() {
            return Err(Error::Dimension(format!(
                "rank-2 factors have inconsistent lengths: u ({}, {}), v ({}, {})",
                u1.len(),
                u2.len(),
                v1.len(),
                v2.len()
            )));
        }
        Ok(Rank2Outer { u1, v1, u2, v2 })
    }

    /// The explicit m×n matrix. Only used for checks and small problems.
    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::outer(&self.u1, &self.v1).add(&DenseMatrix::outer(&self.u2, &self.v2))
    }

    /// The pairs swapped: `u₂v₂ᵗ + u₁v₁ᵗ`.
    pub fn swapped(&self) -> Rank2Outer {
        Rank2Outer {
            u1: self.u2.clone(),
            v1: self.v2.clone(),
            u2: self.u1.clone(),
            v2: self.v1.clone(),
        }
    }

    /// cos θ_u and cos θ_v (angles between the u-pair and the v-pair), or
    /// `None` for a pair that contains a zero vector.
    pub fn cosines(&self) -> (Option<f64>, Option<f64>) {
        (cosine(&self.u1, &self.u2), cosine(&self.v1, &self.v2))
    }
}

fn cosine(a: &DenseVector, b: &DenseVector) -> Option<f64> {
    let (na, nb) = (a.norm(), b.norm());
    (na > 0.0 && nb > 0.0).then(|| (a.dot(b) / na / nb).clamp(-1.0, 1.0))
}

/// Coefficients of the orthonormalized pairs and the 2×2 matrix `M = CᵗC`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramRepresentation {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta: f64,
    pub m: [[f64; 2]; 2],
}

impl GramRepresentation {
    /// The block `C` with `M = CᵗC`.
    pub fn block(&self) -> [[f64; 2]; 2] {
        [
            [
                self.alpha1 * self.gamma1 + self.alpha2 * self.gamma2,
                self.alpha2 * self.delta,
            ],
            [self.beta * self.gamma2, self.beta * self.delta],
        ]
    }

    /// `√det(M) = α₁γ₁βδ ≥ 0`.
    pub fn sqrt_det(&self) -> f64 {
        self.alpha1 * self.gamma1 * self.beta * self.delta
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Eigenvalues of M, largest first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let t = self.trace();
        let half_gap = (0.25 * (self.m[0][0] - self.m[1][1]).powi(2) + self.m[0][1].powi(2)).sqrt();
        let hi = 0.5 * t + half_gap;
        let d = self.sqrt_det();
        // λ₊λ₋ = det(M) = d² avoids cancellation in the small eigenvalue.
        let lo = if hi > 0.0 { d * d / hi } else { 0.0 };
        (hi, lo)
    }
}

/// Splits `second = along · (first/‖first‖) + across · w` with `w ⟂ first`,
/// `across ≥ 0`. The orthogonal part is computed as the norm of the residual
/// vector (with one reorthogonalization pass) rather than from
/// `√(‖second‖² − along²)`, which loses all accuracy for nearly parallel pairs.
fn split(first: &[f64], second: &[f64]) -> (f64, f64, f64) {
    let nf = norm2(first);
    let unit: Vec<f64> = first.iter().map(|v| v / nf).collect();
    let mut along = dot(&unit, second);
    let mut resid: Vec<f64> = second.iter().zip(&unit).map(|(s, e)| s - along * e).collect();
    let corr = dot(&unit, &resid);
    for (r, e) in resid.iter_mut().zip(&unit) {
        *r -= corr * e;
    }
    along += corr;
    (nf, along, norm2(&resid))
}

/// Gram–Schmidt reduction of a rank-2 outer product to its 2×2 representation.
/// Requires nonzero `u₁` and `v₁`.
pub fn gram_reduce(t: &Rank2Outer) -> Result<GramRepresentation> {
    if t.u1.is_zero() {
        return Err(Error::Degenerate("u1 is the zero vector"));
    }
    if t.v1.is_zero() {
        return Err(Error::Degenerate("v1 is the zero vector"));
    }
    let (alpha1, alpha2, beta) = split(t.u1.as_slice(), t.u2.as_slice());
    let (gamma1, gamma2, delta) = split(t.v1.as_slice(), t.v2.as_slice());
    let c11 = alpha1 * gamma1 + alpha2 * gamma2;
    let c12 = alpha2 * delta;
    let c21 = beta * gamma2;
    let c22 = beta * delta;
    let m = [
        [c11 * c11 + c21 * c21, c11 * c12 + c21 * c22],
        [c11 * c12 + c21 * c22, c12 * c12 + c22 * c22],
    ];
    Ok(GramRepresentation {
        alpha1,
        alpha2,
        beta,
        gamma1,
        gamma2,
        delta,
        m,
    })
}

/// If the sum collapses to a single outer product, its norm `‖u‖‖v‖`.
fn rank1_collapse(t: &Rank2Outer) -> Option<f64> {
    let first_zero = t.u1.is_zero() || t.v1.is_zero();
    let second_zero = t.u2.is_zero() || t.v2.is_zero();
    match (first_zero, second_zero) {
        (true, true) => Some(0.0),
        (true, false) => Some(t.u2.norm() * t.v2.norm()),
        (false, true) => Some(t.u1.norm() * t.v1.norm()),
        (false, false) => None,
    }
}

fn hypot4(c: [[f64; 2]; 2], extra: f64) -> f64 {
    let entries = [c[0][0], c[0][1], c[1][0], c[1][1]];
    let scale = entries.iter().fold(extra.abs().sqrt(), |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = entries.iter().map(|v| (v / scale).powi(2)).sum::<f64>() + extra / (scale * scale);
    scale * sum.sqrt()
}

/// Nuclear (trace) norm of `u₁v₁ᵗ + u₂v₂ᵗ`: `√(tr M + 2√det M)`.
pub fn rank2_nuclear_norm(t: &Rank2Outer) -> f64 {
    if let Some(v) = rank1_collapse(t) {
        return v;
    }
    let g = gram_reduce(t).expect("nonzero u1 and v1 checked above");
    hypot4(g.block(), 2.0 * g.sqrt_det())
}

/// Frobenius norm of `u₁v₁ᵗ + u₂v₂ᵗ`: `√tr M`.
pub fn rank2_frobenius_norm(t: &Rank2Outer) -> f64 {
    if let Some(v) = rank1_collapse(t) {
        return v;
    }
    let g = gram_reduce(t).expect("nonzero u1 and v1 checked above");
    hypot4(g.block(), 0.0)
}

/// Both norms from the angle form of the closed expressions, using
/// normalized dot products clamped to [−1, 1] and `sin = √(1 − cos²)`.
/// Kept as a cross-check; it is less accurate than the Gram route when a
/// pair is nearly parallel.
pub fn rank2_norms_from_angles(t: &Rank2Outer) -> (f64, f64) {
    if let Some(v) = rank1_collapse(t) {
        return (v, v);
    }
    let a = t.u1.norm() * t.v1.norm();
    let b = t.u2.norm() * t.v2.norm();
    let (cu, cv) = t.cosines();
    let (cu, cv) = (cu.unwrap_or(0.0), cv.unwrap_or(0.0));
    let su = (1.0 - cu * cu).max(0.0).sqrt();
    let sv = (1.0 - cv * cv).max(0.0).sqrt();
    let base = a * a + b * b;
    let nuclear = (base + 2.0 * a * b * (cu * cv + su * sv)).max(0.0).sqrt();
    let frobenius = (base + 2.0 * a * b * cu * cv).max(0.0).sqrt();
    (nuclear, frobenius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn orthogonal_unit_pairs() {
        let t = Rank2Outer::new(v(&[1.0, 0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 1.0]))
            .unwrap();
        let g = gram_reduce(&t).unwrap();
        assert_eq!(
            (g.alpha1, g.alpha2, g.beta, g.gamma1, g.gamma2, g.delta),
            (1.0, 0.0, 1.0, 1.0, 0.0, 1.0)
        );
        assert_eq!(g.m, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(rank2_nuclear_norm(&t), 2.0);
        assert_eq!(rank2_frobenius_norm(&t), 2f64.sqrt());
    }

    #[test]
    fn coincident_pairs() {
        let s = 1.0 / 2f64.sqrt();
        let u = v(&[s, s, 0.0]);
        let w = v(&[0.6, 0.8]);
        let t = Rank2Outer::new(u.clone(), w.clone(), u, w).unwrap();
        let g = gram_reduce(&t).unwrap();
        assert!(g.beta.abs() < 1e-16 && g.delta.abs() < 1e-16);
        assert!((g.m[0][0] - 4.0).abs() < 1e-14);
        assert!(g.m[0][1].abs() < 1e-15 && g.m[1][1].abs() < 1e-15);
        assert!((rank2_nuclear_norm(&t) - 2.0).abs() < 1e-15);
        assert!((rank2_frobenius_norm(&t) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rank1_collapse_cases() {
        let t = Rank2Outer::new(v(&[3.0, 4.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 0.0]), v(&[1.0, 1.0, 1.0]))
            .unwrap();
        assert_eq!(rank2_nuclear_norm(&t), 5.0);
        assert_eq!(rank2_frobenius_norm(&t), 5.0);
        let t = Rank2Outer::new(v(&[0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[3.0, 4.0]), v(&[0.0, 2.0, 0.0]))
            .unwrap();
        assert_eq!(rank2_nuclear_norm(&t), 10.0);
        assert!(matches!(gram_reduce(&t), Err(Error::Degenerate(_))));
    }

    #[test]
    fn orthogonal_u_pair_drops_frobenius_cross_term() {
        let t = Rank2Outer::new(v(&[2.0, 0.0]), v(&[1.0, 1.0]), v(&[0.0, 3.0]), v(&[1.0, 2.0])).unwrap();
        let a = 2.0 * 2f64.sqrt();
        let b = 3.0 * 5f64.sqrt();
        assert!((rank2_frobenius_norm(&t) - (a * a + b * b).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn inconsistent_lengths() {
        assert!(Rank2Outer::new(v(&[1.0, 0.0]), v(&[1.0]), v(&[1.0]), v(&[1.0])).is_err());
    }

    #[test]
    fn angle_form_agrees_on_generic_input() {
        let t = Rank2Outer::new(v(&[1.0, 2.0, -1.0]), v(&[0.5, 1.0]), v(&[0.3, -1.0, 2.0]), v(&[2.0, -0.4]))
            .unwrap();
        let (nuc, fro) = rank2_norms_from_angles(&t);
        assert!((nuc / rank2_nuclear_norm(&t) - 1.0).abs() < 1e-13);
        assert!((fro / rank2_frobenius_norm(&t) - 1.0).abs() < 1e-13);
    }
}
