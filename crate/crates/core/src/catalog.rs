//! Condition numbers and error-bound coefficients from the literature,
//! evaluated on one problem so they can be compared side by side.

use serde::{Deserialize, Serialize};

use crate::conditioning::{chi_a_bounds, ScaleFactors};
use crate::error::{Error, Result};
use crate::lls::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogName {
    BjorckUpper,
    MalyshevLower,
    /// Also Malyshev's Frobenius-data value: both share the same radical,
    /// scaled by ‖A‖_F.
    GeurtsFrobenius,
    GrattonJoint,
    #[serde(rename = "higham_2002")]
    Higham2002,
    GvlTextbook,
    AttainableReference,
}

impl CatalogName {
    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::BjorckUpper => "bjorck_upper",
            CatalogName::MalyshevLower => "malyshev_lower",
            CatalogName::GeurtsFrobenius => "geurts_frobenius",
            CatalogName::GrattonJoint => "gratton_joint",
            CatalogName::Higham2002 => "higham_2002",
            CatalogName::GvlTextbook => "gvl_textbook",
            CatalogName::AttainableReference => "attainable_reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormRegime {
    Spectral,
    Frobenius,
    JointFrobenius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Exact,
    Approx,
    Overestimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCatalogEntry {
    pub name: CatalogName,
    /// Condition number, or the coefficient of ε for bound-style entries.
    pub value: f64,
    pub norm_regime: NormRegime,
    pub status: BoundStatus,
    /// `value · ε` for the overestimate entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_at_eps: Option<f64>,
}

/// Weights of the joint Frobenius norm `‖[α ΔA, β Δb]‖_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrattonWeights {
    pub alpha_w: f64,
    pub beta_w: f64,
}

impl GrattonWeights {
    pub fn new(alpha_w: f64, beta_w: f64) -> Result<Self> {
        if !(alpha_w.is_finite() && alpha_w > 0.0 && beta_w.is_finite() && beta_w > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "weights must be positive and finite, got ({alpha_w}, {beta_w})"
            )));
        }
        Ok(GrattonWeights { alpha_w, beta_w })
    }
}

impl Default for GrattonWeights {
    fn default() -> Self {
        GrattonWeights {
            alpha_w: 1.0,
            beta_w: 1.0,
        }
    }
}

/// `‖A‖_F/σ · √(‖r‖²/(σ²‖x‖²) + 1)`.
pub fn geurts_frobenius(g: &Geometry, norm_a_fro: f64) -> f64 {
    let s = g.sigma_min;
    norm_a_fro / s * (g.norm_r / (s * g.norm_x)).hypot(1.0)
}

/// `(1/σ) √(‖r‖²/(α²σ²) + ‖x‖²/α² + 1/β²)`.
pub fn gratton_joint(g: &Geometry, w: &GrattonWeights) -> f64 {
    let s = g.sigma_min;
    let t1 = g.norm_r / (w.alpha_w * s);
    let t2 = g.norm_x / w.alpha_w;
    let t3 = 1.0 / w.beta_w;
    t1.hypot(t2).hypot(t3) / s
}

/// `κ (2 + (κ + 1) ‖r‖/(‖A‖‖x‖))`.
pub fn higham_2002(g: &Geometry) -> f64 {
    g.kappa * (2.0 + (g.kappa + 1.0) * g.norm_r / (g.norm_a * g.norm_x))
}

/// `2 sec θ κ + tan θ κ²`.
pub fn gvl_textbook(g: &Geometry) -> f64 {
    2.0 * g.sec_theta * g.kappa + g.tan_theta * g.kappa * g.kappa
}

/// `κ (ν tan θ + 1) + ν sec θ`: the Björck upper limit plus χ_x(b).
pub fn attainable_reference(g: &Geometry) -> f64 {
    g.kappa * (g.nu * g.tan_theta + 1.0) + g.nu * g.sec_theta
}

/// Textbook bound coefficient over the attainable reference.
pub fn overestimate_ratio(g: &Geometry) -> f64 {
    gvl_textbook(g) / attainable_reference(g)
}

/// Evaluates every catalog entry. `norm_a_fro` is ‖A‖_F; `eps` scales the
/// overestimate coefficients into `bound_at_eps`.
pub fn evaluate_catalog(
    g: &Geometry,
    norm_a_fro: f64,
    sc: &ScaleFactors,
    w: &GrattonWeights,
    eps: f64,
) -> Result<Vec<BoundCatalogEntry>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    let (lower, upper) = chi_a_bounds(g, sc);
    let entry = |name, value, norm_regime, status| BoundCatalogEntry {
        name,
        value,
        norm_regime,
        status,
        bound_at_eps: (status == BoundStatus::Overestimate).then_some(value * eps),
    };
    use BoundStatus::*;
    use CatalogName::*;
    use NormRegime::*;
    Ok(vec![
        entry(BjorckUpper, upper, Spectral, Approx),
        entry(MalyshevLower, lower, Spectral, Approx),
        entry(GeurtsFrobenius, geurts_frobenius(g, norm_a_fro), Frobenius, Exact),
        entry(GrattonJoint, gratton_joint(g, w), JointFrobenius, Exact),
        entry(Higham2002, higham_2002(g), Spectral, Overestimate),
        entry(GvlTextbook, gvl_textbook(g), Spectral, Overestimate),
        entry(AttainableReference, attainable_reference(g), Spectral, Approx),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, DenseVector};
    use crate::lls::analyze_problem;

    fn family_geometry(alpha: f64, beta: f64, phi: f64) -> Geometry {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, alpha], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![beta * phi.cos(), beta * phi.sin(), 1.0]).unwrap();
        analyze_problem(a, b).unwrap().2
    }

    #[test]
    fn orthonormal_zero_residual() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = DenseVector::new(vec![3.0, 4.0, 0.0]).unwrap();
        let fro = a.frobenius_norm();
        let (p, s, g) = analyze_problem(a, b).unwrap();
        let sc = ScaleFactors::relative(&p, &s);
        let cat = evaluate_catalog(&g, fro, &sc, &GrattonWeights::default(), 1e-8).unwrap();
        let get = |n: CatalogName| cat.iter().find(|e| e.name == n).unwrap().value;
        assert!((get(CatalogName::GeurtsFrobenius) - 2f64.sqrt()).abs() < 1e-15);
        assert!((get(CatalogName::GvlTextbook) - 2.0).abs() < 1e-15);
        assert!((get(CatalogName::AttainableReference) - 2.0).abs() < 1e-15);
        assert!((overestimate_ratio(&g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn example_bounds_and_statuses() {
        let g = family_geometry(0.1, 1.0, std::f64::consts::PI / 10.0);
        let sc = ScaleFactors {
            phi_a: g.norm_a,
            phi_b: g.norm_b,
            phi_x: g.norm_x,
        };
        let cat = evaluate_catalog(&g, 1.01f64.sqrt(), &sc, &GrattonWeights::default(), 1e-8).unwrap();
        assert_eq!(cat.len(), 7);
        assert!((cat[0].value - 40.928).abs() < 2e-3);
        assert!((cat[1].value - 32.505).abs() < 2e-3);
        for e in &cat {
            assert_eq!(e.bound_at_eps.is_some(), e.status == BoundStatus::Overestimate);
        }
        assert!(evaluate_catalog(&g, 1.0, &sc, &GrattonWeights::default(), 0.0).is_err());
    }

    #[test]
    fn ratio_sweep_matches_closed_form() {
        // ratio = [(1 + 2α√(1+β²))/(α²β)] / [(1 + β + α√(1+β²))/(αβ)]
        for alpha in [0.1, 0.01, 0.001] {
            let g = family_geometry(alpha, 1.0, std::f64::consts::FRAC_PI_2);
            let r2 = 2f64.sqrt();
            let closed = ((1.0 + 2.0 * alpha * r2) / (alpha * alpha)) / ((2.0 + alpha * r2) / alpha);
            assert!((overestimate_ratio(&g) / closed - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gratton_weights_validation() {
        assert!(GrattonWeights::new(0.0, 1.0).is_err());
        assert!(GrattonWeights::new(1.0, f64::INFINITY).is_err());
        assert!(GrattonWeights::new(2.0, 0.5).is_ok());
    }

    #[test]
    fn names_serialize_snake_case() {
        let s = serde_json::to_string(&CatalogName::Higham2002).unwrap();
        assert_eq!(s, "\"higham_2002\"");
        assert_eq!(CatalogName::Higham2002.as_str(), "higham_2002");
        let s = serde_json::to_string(&NormRegime::JointFrobenius).unwrap();
        assert_eq!(s, "\"joint-frobenius\"");
    }
}
