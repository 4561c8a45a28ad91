//! Condition numbers of the least-squares solution.
//!
//! With perturbations measured by `‖ΔA‖₂/φ_A`, `‖Δb‖₂/φ_B` and `‖Δx‖₂/φ_X`:
//!
//! * `χ_x(b) = φ_B / (φ_X σ_min)`;
//! * `χ_x(A) = (φ_A/φ_X) max_{‖Δx‖₂=1} ‖u₁v₁ᵗ + u₂v₂ᵗ‖_*` where the rank-2
//!   matrix is the transposed Jacobian applied to Δx (see [`rank2_map`]);
//! * `χ_x(A)` lies between the lower and upper limits returned by
//!   [`chi_a_bounds`], and the upper exceeds the lower by at most √2.

mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, DenseMatrix, DenseVector};
use crate::lls::{Geometry, LlsProblem, LlsSolution};
use crate::rank2::{rank2_nuclear_norm, Rank2Outer};

pub(crate) use sphere::random_unit_vectors;

/// Denominators of the scaled perturbation norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactors {
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_x: f64,
}

impl ScaleFactors {
    pub fn new(phi_a: f64, phi_b: f64, phi_x: f64) -> Result<Self> {
        for (name, v) in [("phi_A", phi_a), ("phi_B", phi_b), ("phi_X", phi_x)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "scale factor {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(ScaleFactors { phi_a, phi_b, phi_x })
    }

    /// Relative norms: `(‖A‖₂, ‖b‖₂, ‖x‖₂)`.
    pub fn relative(p: &LlsProblem, s: &LlsSolution) -> Self {
        ScaleFactors {
            phi_a: p.norm_a(),
            phi_b: p.norm_b(),
            phi_x: s.x.norm(),
        }
    }

    pub fn unit() -> Self {
        ScaleFactors {
            phi_a: 1.0,
            phi_b: 1.0,
            phi_x: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 8,
            max_iterations: 500,
            step_tolerance: 1e-12,
            value_tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if !(self.step_tolerance > 0.0 && self.value_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Result of the sphere maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactChiA {
    pub value: f64,
    /// Unit Δx attaining `value`.
    pub maximizer: DenseVector,
    /// False when no restart met the convergence tests; `value` is then the
    /// best found, not a certified maximum.
    pub certified: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub chi_b: f64,
    pub chi_a_lower: f64,
    pub chi_a_upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_a_exact: Option<ExactChiA>,
    pub scales: ScaleFactors,
}

/// `χ_x(b) = φ_B / (φ_X σ_min)`; with relative scales this is `ν sec θ`.
pub fn chi_b(p: &LlsProblem, sc: &ScaleFactors) -> f64 {
    sc.phi_b / (sc.phi_x * p.sigma_min())
}

/// The transposed Jacobian of x with respect to A applied to `dx`, as the
/// rank-2 matrix `u₁v₁ᵗ + u₂v₂ᵗ` with `u₁ = r`, `v₁ = (AᵗA)⁻¹dx`,
/// `u₂ = −A(AᵗA)⁻¹dx`, `v₂ = x`.
pub fn rank2_map(p: &LlsProblem, s: &LlsSolution, dx: &DenseVector) -> Result<Rank2Outer> {
    if dx.len() != p.cols() {
        return Err(Error::Dimension(format!(
            "direction has length {}, problem has {} unknowns",
            dx.len(),
            p.cols()
        )));
    }
    let v1 = p.gram_inverse_apply(dx);
    let u2 = p.a().matvec(&v1).scaled(-1.0);
    Rank2Outer::new(s.r.clone(), v1, u2, s.x.clone())
}

/// Lower (Malyshev) and upper (Björck) limits on `χ_x(A)`:
/// `(φ_A/(φ_X σ)) √((‖r‖/σ)² + ‖x‖²)` and `(φ_A/(φ_X σ)) (‖r‖/σ + ‖x‖)`.
pub fn chi_a_bounds(g: &Geometry, sc: &ScaleFactors) -> (f64, f64) {
    let sigma = g.sigma_min;
    let coeff = sc.phi_a / (sc.phi_x * sigma);
    let first = g.norm_r / sigma;
    let second = g.norm_x;
    (coeff * first.hypot(second), coeff * (first + second))
}

/// Unscaled sphere objective in the right-singular basis: for `c = Vᵗ dx`,
/// `‖u₁v₁ᵗ + u₂v₂ᵗ‖_*` with `v₁ = V Σ⁻² c` and `u₂ = −U Σ⁻¹ c`.
///
/// Because `u₁ = r ⟂ u₂`, the nuclear norm reduces to
/// `√(‖r‖²‖w‖² + ‖x‖²‖z‖² + 2‖r‖‖z‖√(‖x‖²‖w‖² − (wᵗy)²))` with
/// `w = Σ⁻²c`, `z = Σ⁻¹c`, `y = Vᵗx`.
struct ReducedObjective {
    sigma: Vec<f64>,
    y: Vec<f64>,
    norm_r: f64,
    norm_x: f64,
}

struct ObjectiveParts {
    value: f64,
    grad: Vec<f64>,
    z_norm: f64,
}

impl ReducedObjective {
    fn new(p: &LlsProblem, s: &LlsSolution) -> Self {
        ReducedObjective {
            sigma: p.svd().singular_values.as_slice().to_vec(),
            y: p.svd().right_vectors.tr_matvec(&s.x).into_vec(),
            norm_r: s.r.norm(),
            norm_x: s.x.norm(),
        }
    }

    fn eval(&self, c: &[f64]) -> ObjectiveParts {
        let (r, x) = (self.norm_r, self.norm_x);
        let mut w2 = 0.0;
        let mut z2 = 0.0;
        let mut py = 0.0;
        for ((ci, si), yi) in c.iter().zip(&self.sigma).zip(&self.y) {
            let s2 = si * si;
            w2 += ci * ci / (s2 * s2);
            z2 += ci * ci / s2;
            py += ci * yi / s2;
        }
        let sdet = (x * x * w2 - py * py).max(0.0);
        let zn = z2.sqrt();
        let root = sdet.sqrt();
        let f2 = r * r * w2 + x * x * z2 + 2.0 * r * zn * root;
        let f = f2.max(0.0).sqrt();

        let mut grad = Vec::with_capacity(c.len());
        for ((ci, si), yi) in c.iter().zip(&self.sigma).zip(&self.y) {
            let s2 = si * si;
            let dw2 = 2.0 * ci / (s2 * s2);
            let dz2 = 2.0 * ci / s2;
            let dpy = yi / s2;
            let mut d = r * r * dw2 + x * x * dz2;
            if zn > 0.0 {
                d += r * root * dz2 / zn;
            }
            if root > 0.0 {
                d += r * zn * (x * x * dw2 - 2.0 * py * dpy) / root;
            }
            grad.push(if f > 0.0 { d / (2.0 * f) } else { 0.0 });
        }
        ObjectiveParts {
            value: f,
            grad,
            z_norm: zn,
        }
    }
}

/// `(φ_A/φ_X) ‖rank2_map(dx)‖_*` for one unit direction.
pub fn chi_a_objective(p: &LlsProblem, s: &LlsSolution, sc: &ScaleFactors, dx: &DenseVector) -> Result<f64> {
    let t = rank2_map(p, s, dx)?;
    Ok(sc.phi_a / sc.phi_x * rank2_nuclear_norm(&t))
}

fn starts_for(p: &LlsProblem, cfg: &OptimizerConfig, extra: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = p.cols();
    // In the right-singular basis the σ_min direction is the last coordinate.
    let mut starts = vec![DenseVector::basis(n, n - 1).into_vec()];
    starts.extend(extra.iter().cloned());
    starts.extend(random_unit_vectors(n, cfg.restarts - 1, cfg.seed));
    starts
}

/// The exact `χ_x(A)` by maximizing the rank-2 nuclear norm over unit Δx.
///
/// Starts at the right singular vector for σ_min, plus `restarts − 1`
/// seeded random directions. The returned value is re-evaluated at the
/// maximizer through [`rank2_map`] and the closed-form nuclear norm.
pub fn chi_a_exact(
    p: &LlsProblem,
    s: &LlsSolution,
    sc: &ScaleFactors,
    cfg: &OptimizerConfig,
) -> Result<ExactChiA> {
    cfg.validate()?;
    let obj = ReducedObjective::new(p, s);
    let f = |c: &[f64]| {
        let parts = obj.eval(c);
        (parts.value, parts.grad)
    };
    let best = sphere::maximize(&f, &starts_for(p, cfg, &[]), cfg);
    let c = DenseVector::from_vec_unchecked(best.point);
    let maximizer = p.svd().right_vectors.matvec(&c);
    let value = chi_a_objective(p, s, sc, &maximizer)?;
    Ok(ExactChiA {
        value,
        maximizer,
        certified: best.converged,
        iterations: best.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub value: f64,
    /// Unit direction y of Δx at which the joint supremum is attained.
    pub direction: DenseVector,
    pub certified: bool,
}

/// Joint condition number for `max(‖ΔA‖₂/φ_A, ‖Δb‖₂/φ_B)`.
///
/// By duality the supremum of `‖J_A vec(ΔA) + J_b Δb‖₂` over the joint unit
/// ball equals `max_{‖y‖=1} φ_A ‖J_Aᵗ y‖_* + φ_B ‖J_bᵗ y‖₂`, a sphere
/// problem in n dimensions. Starts include the σ_min direction and the
/// maximizer of the A-only problem.
pub fn chi_joint_estimate(
    p: &LlsProblem,
    s: &LlsSolution,
    sc: &ScaleFactors,
    cfg: &OptimizerConfig,
) -> Result<JointEstimate> {
    cfg.validate()?;
    let obj = ReducedObjective::new(p, s);
    let fa = |c: &[f64]| {
        let parts = obj.eval(c);
        (parts.value, parts.grad)
    };
    let a_only = sphere::maximize(&fa, &starts_for(p, cfg, &[]), cfg);

    let sigma = obj.sigma.clone();
    let f = |c: &[f64]| {
        let parts = obj.eval(c);
        let value = sc.phi_a * parts.value + sc.phi_b * parts.z_norm;
        let grad = parts
            .grad
            .iter()
            .zip(c.iter().zip(&sigma))
            .map(|(ga, (ci, si))| {
                let gz = if parts.z_norm > 0.0 {
                    ci / (si * si) / parts.z_norm
                } else {
                    0.0
                };
                sc.phi_a * ga + sc.phi_b * gz
            })
            .collect();
        (value, grad)
    };
    let best = sphere::maximize(&f, &starts_for(p, cfg, &[a_only.point]), cfg);
    let c = DenseVector::from_vec_unchecked(best.point);
    let direction = p.svd().right_vectors.matvec(&c);

    let t = rank2_map(p, s, &direction)?;
    let jb = p.gram_inverse_apply(&direction);
    let jb_norm = p.a().matvec(&jb).norm();
    let value = (sc.phi_a * rank2_nuclear_norm(&t) + sc.phi_b * jb_norm) / sc.phi_x;
    Ok(JointEstimate {
        value,
        direction,
        certified: best.converged,
    })
}

/// A matrix `B` with `‖B‖₂ = 1` attaining `tr(AᵗB) = ‖A‖_*`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub b: DenseMatrix,
    pub value: f64,
}

/// `B = U D Vᵗ` with `D` the m×n "identity"; `value = tr(AᵗB)`.
pub fn dual_norm_certificate(a: &DenseMatrix) -> Result<DualCertificate> {
    let f = svd(a)?;
    let (m, n) = a.shape();
    let mut b = DenseMatrix::zeros(m, n);
    for k in 0..m.min(n) {
        b = b.add(&DenseMatrix::outer(&f.left(k), &f.right(k)));
    }
    let value = a.frobenius_inner(&b);
    Ok(DualCertificate { b, value })
}

/// χ_x(b), the two limits on χ_x(A), and optionally the exact χ_x(A).
pub fn condition_report(
    p: &LlsProblem,
    s: &LlsSolution,
    g: &Geometry,
    sc: &ScaleFactors,
    exact: Option<&OptimizerConfig>,
) -> Result<ConditionReport> {
    let (lower, upper) = chi_a_bounds(g, sc);
    let chi_a_exact = exact.map(|cfg| chi_a_exact(p, s, sc, cfg)).transpose()?;
    Ok(ConditionReport {
        chi_b: chi_b(p, sc),
        chi_a_lower: lower,
        chi_a_upper: upper,
        chi_a_exact,
        scales: *sc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lls::analyze_problem;
    use std::f64::consts::PI;

    fn family(alpha: f64, beta: f64, phi: f64) -> (LlsProblem, LlsSolution, Geometry) {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, alpha], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![beta * phi.cos(), beta * phi.sin(), 1.0]).unwrap();
        analyze_problem(a, b).unwrap()
    }

    fn orthonormal_zero_residual() -> (LlsProblem, LlsSolution, Geometry) {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![3.0, 4.0, 0.0]).unwrap();
        analyze_problem(a, b).unwrap()
    }

    #[test]
    fn chi_b_cases() {
        let (p, s, _) = orthonormal_zero_residual();
        let sc = ScaleFactors::relative(&p, &s);
        assert!((chi_b(&p, &sc) - 1.0).abs() < 1e-15);

        let (p, s, g) = family(0.1, 1.0, PI / 10.0);
        let sc = ScaleFactors::relative(&p, &s);
        let v = chi_b(&p, &sc);
        assert!((v - g.nu * g.sec_theta).abs() < 1e-12 * v);
        assert!((v - 4.37402).abs() < 1e-5, "{v}");
        assert!((chi_b(&p, &ScaleFactors::unit()) - 10.0).abs() < 1e-13);
    }

    #[test]
    fn bounds_for_example_and_zero_residual() {
        let (p, s, g) = family(0.1, 1.0, PI / 10.0);
        let (lo, hi) = chi_a_bounds(&g, &ScaleFactors::relative(&p, &s));
        assert!((hi - 40.928).abs() < 2e-3, "{hi}");
        assert!((lo - 32.505).abs() < 2e-3, "{lo}");
        let (p, s, g) = orthonormal_zero_residual();
        let (lo, hi) = chi_a_bounds(&g, &ScaleFactors::relative(&p, &s));
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank2_map_structure() {
        let (p, s, _) = family(0.1, 1.0, PI / 10.0);
        let dx = DenseVector::new(vec![0.6, 0.8]).unwrap();
        let t = rank2_map(&p, &s, &dx).unwrap();
        assert!(t.u1.dot(&t.u2).abs() <= 1e-12 * t.u1.norm() * t.u2.norm());
        // Entry (3,1) is Δx₁ and entry (1,1) is −β cos φ Δx₁.
        let g = t.to_matrix();
        assert!((g[(2, 0)] - 0.6).abs() < 1e-14);
        assert!((g[(0, 0)] + (PI / 10.0).cos() * 0.6).abs() < 1e-14);
        assert!(rank2_map(&p, &s, &DenseVector::zeros(3)).is_err());
    }

    #[test]
    fn zero_residual_rank1() {
        let (p, s, _) = orthonormal_zero_residual();
        let dx = DenseVector::new(vec![1.0, 0.0]).unwrap();
        let t = rank2_map(&p, &s, &dx).unwrap();
        assert!(t.u1.is_zero());
        assert!((rank2_nuclear_norm(&t) - s.x.norm()).abs() < 1e-14);
    }

    #[test]
    fn reduced_objective_matches_rank2_route() {
        let (p, s, _) = family(0.3, 0.7, 0.9);
        let obj = ReducedObjective::new(&p, &s);
        for dx in random_unit_vectors(2, 20, 3) {
            let dxv = DenseVector::new(dx).unwrap();
            let c = p.svd().right_vectors.tr_matvec(&dxv);
            let reduced = obj.eval(c.as_slice()).value;
            let direct = rank2_nuclear_norm(&rank2_map(&p, &s, &dxv).unwrap());
            assert!((reduced / direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_gradient_matches_finite_differences() {
        let (p, s, _) = family(0.3, 0.7, 0.9);
        let obj = ReducedObjective::new(&p, &s);
        let c = [0.6, -0.8];
        let parts = obj.eval(&c);
        for i in 0..2 {
            let h = 1e-6;
            let mut cp = c;
            let mut cm = c;
            cp[i] += h;
            cm[i] -= h;
            let fd = (obj.eval(&cp).value - obj.eval(&cm).value) / (2.0 * h);
            assert!((fd - parts.grad[i]).abs() < 1e-6 * parts.value, "{fd} vs {}", parts.grad[i]);
        }
    }

    #[test]
    fn exact_reproduces_example() {
        let (p, s, _) = family(0.1, 1.0, PI / 10.0);
        let sc = ScaleFactors::relative(&p, &s);
        let e = chi_a_exact(&p, &s, &sc, &OptimizerConfig::default()).unwrap();
        assert!(e.certified);
        assert!((e.value - 35.193).abs() < 1e-3, "{}", e.value);
        assert!((e.maximizer.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_zero_residual_is_kappa() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![1.0, 1.0, 0.0]).unwrap();
        let (p, s, g) = analyze_problem(a, b).unwrap();
        let sc = ScaleFactors::relative(&p, &s);
        let e = chi_a_exact(&p, &s, &sc, &OptimizerConfig::default()).unwrap();
        // Zero residual: lower = upper = κ.
        assert!((e.value - g.kappa).abs() < 1e-12 * g.kappa);
        assert!((e.maximizer[1].abs() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_config_rejected() {
        let (p, s, _) = family(0.1, 1.0, PI / 10.0);
        let sc = ScaleFactors::relative(&p, &s);
        let cfg = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(matches!(chi_a_exact(&p, &s, &sc, &cfg), Err(Error::InvalidConfig(_))));
        assert!(ScaleFactors::new(1.0, 0.0, 1.0).is_err());
        assert!(ScaleFactors::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn joint_estimate_zero_residual_orthonormal() {
        let (p, s, _) = orthonormal_zero_residual();
        let sc = ScaleFactors::relative(&p, &s);
        let j = chi_joint_estimate(&p, &s, &sc, &OptimizerConfig::default()).unwrap();
        assert!((1.0..=2.0 + 1e-12).contains(&j.value), "{}", j.value);
    }

    #[test]
    fn dual_certificate_small_cases() {
        let c = dual_norm_certificate(&DenseMatrix::identity(3)).unwrap();
        assert!(c.b.sub(&DenseMatrix::identity(3)).frobenius_norm() < 1e-15);
        assert!((c.value - 3.0).abs() < 1e-15);
        let a = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = dual_norm_certificate(&a).unwrap();
        assert!(c.b.sub(&DenseMatrix::identity(2)).frobenius_norm() < 1e-15);
        assert!((c.value - 4.0).abs() < 1e-15);
    }
}
