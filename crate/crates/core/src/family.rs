//! The three-parameter example problem
//!
//! ```text
//!     A = [1 0; 0 α; 0 0],  b = (β cos φ, β sin φ, 1),  ΔA = ε e₃e₂ᵗ
//! ```
//!
//! whose κ, ν and θ can be set independently, together with its closed forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::lls::{build_problem, LlsProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub epsilon: f64,
}

impl Default for ExampleSpec {
    fn default() -> Self {
        ExampleSpec {
            alpha: 0.1,
            beta: 1.0,
            phi: PI / 10.0,
            epsilon: 1e-8,
        }
    }
}

/// Values the example predicts analytically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub kappa: f64,
    pub nu: f64,
    pub tan_theta: f64,
    pub sec_theta: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    /// κ(ν tan θ + 1).
    pub chi_a_upper: f64,
    /// κ √((ν tan θ)² + 1).
    pub chi_a_lower: f64,
    /// ν sec θ.
    pub chi_b: f64,
    /// Coefficient of ε in `‖Δx‖/‖x‖ = ε/(αβ√((α cos φ)² + sin² φ)) + O(ε²)`.
    pub relative_change_coefficient: f64,
    /// Second component of `x + Δx` under ΔA: `(ε + αβ sin φ)/(α² + ε²)`.
    pub perturbed_x2: f64,
}

#[derive(Debug, Clone)]
pub struct PaperExample {
    pub spec: ExampleSpec,
    pub problem: LlsProblem,
    pub delta_a: DenseMatrix,
    pub closed_forms: ClosedForms,
    /// Parameter ranges that were violated (warnings, not errors).
    pub warnings: Vec<String>,
}

impl ExampleSpec {
    /// Soft checks of `0 < α < 1`, `0 < β`, `0 < ε ≪ α`.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            w.push(format!("alpha = {} outside (0, 1)", self.alpha));
        }
        if self.beta <= 0.0 {
            w.push(format!("beta = {} is not positive", self.beta));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            w.push(format!("epsilon = {} is not positive", self.epsilon));
        } else if self.epsilon > 1e-3 * self.alpha.abs() {
            w.push(format!(
                "epsilon = {} is not small relative to alpha = {}",
                self.epsilon, self.alpha
            ));
        }
        w
    }

    pub fn closed_forms(&self) -> ClosedForms {
        let (a, b, phi, e) = (self.alpha, self.beta, self.phi, self.epsilon);
        let radical = ((a * phi.cos()).powi(2) + phi.sin().powi(2)).sqrt();
        let kappa = 1.0 / a;
        let nu = 1.0 / radical;
        let tan_theta = 1.0 / b;
        let sec_theta = (1.0 + tan_theta * tan_theta).sqrt();
        ClosedForms {
            kappa,
            nu,
            tan_theta,
            sec_theta,
            x: vec![b * phi.cos(), b / a * phi.sin()],
            r: vec![0.0, 0.0, 1.0],
            chi_a_upper: kappa * (nu * tan_theta + 1.0),
            chi_a_lower: kappa * (nu * tan_theta).hypot(1.0),
            chi_b: nu * sec_theta,
            relative_change_coefficient: 1.0 / (a * b * radical),
            perturbed_x2: (e + a * b * phi.sin()) / (a * a + e * e),
        }
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, self.alpha], vec![0.0, 0.0]])
            .expect("finite parameters")
    }

    pub fn rhs(&self) -> DenseVector {
        DenseVector::new(vec![self.beta * self.phi.cos(), self.beta * self.phi.sin(), 1.0])
            .expect("finite parameters")
    }

    pub fn delta_a(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(3, 2);
        d[(2, 1)] = self.epsilon;
        d
    }

    pub fn build(&self) -> Result<PaperExample> {
        for (k, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("phi", self.phi),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{k} must be finite")));
            }
        }
        Ok(PaperExample {
            spec: *self,
            problem: build_problem(self.matrix(), self.rhs())?,
            delta_a: self.delta_a(),
            closed_forms: self.closed_forms(),
            warnings: self.warnings(),
        })
    }

    /// Parses `alpha=0.1,beta=1,phi=pi/10,eps=1e-8`; unspecified keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<ExampleSpec> {
        let mut spec = ExampleSpec::default();
        for (idx, item) in text.split(',').enumerate() {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                column: idx + 1,
                message: format!("expected key=value, got '{item}'"),
            })?;
            let value = parse_angle_or_number(value.trim()).map_err(|message| Error::Parse {
                line: 1,
                column: idx + 1,
                message,
            })?;
            match key.trim() {
                "alpha" | "a" => spec.alpha = value,
                "beta" | "b" => spec.beta = value,
                "phi" | "p" => spec.phi = value,
                "eps" | "epsilon" | "e" => spec.epsilon = value,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        column: idx + 1,
                        message: format!("unknown example key '{other}'"),
                    })
                }
            }
        }
        Ok(spec)
    }
}

/// Accepts plain numbers and rational multiples of π: `pi`, `pi/10`,
/// `3pi/10`, `3*pi/10`, `-pi/4`, `0.5pi`.
pub fn parse_angle_or_number(s: &str) -> std::result::Result<f64, String> {
    if let Ok(v) = s.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("'{s}' is not finite"))
        };
    }
    let lower = s.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return Err(format!("cannot parse '{s}' as a number or multiple of pi"));
    };
    let coeff_text = lower[..pos].trim_end_matches('*').trim();
    let rest = lower[pos + 2..].trim();
    let coeff = match coeff_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t
            .parse::<f64>()
            .map_err(|_| format!("bad coefficient '{t}' in '{s}'"))?,
    };
    let denom = if rest.is_empty() {
        1.0
    } else if let Some(d) = rest.strip_prefix('/') {
        d.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad denominator '{d}' in '{s}'"))?
    } else {
        return Err(format!("unexpected '{rest}' after pi in '{s}'"));
    };
    if denom == 0.0 {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(coeff * PI / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lls::{geometry, solve};

    #[test]
    fn parse_pi_expressions() {
        assert_eq!(parse_angle_or_number("pi/10").unwrap(), PI / 10.0);
        assert_eq!(parse_angle_or_number("3pi/10").unwrap(), 3.0 * PI / 10.0);
        assert_eq!(parse_angle_or_number("3*pi/10").unwrap(), 3.0 * PI / 10.0);
        assert_eq!(parse_angle_or_number("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle_or_number("pi").unwrap(), PI);
        assert_eq!(parse_angle_or_number("0.25").unwrap(), 0.25);
        assert!(parse_angle_or_number("pi/0").is_err());
        assert!(parse_angle_or_number("e^2").is_err());
        assert!(parse_angle_or_number("pi*2").is_err());
    }

    #[test]
    fn parse_spec() {
        let s = ExampleSpec::parse("alpha=0.1,beta=1,phi=pi/10").unwrap();
        assert_eq!(s, ExampleSpec::default());
        let s = ExampleSpec::parse("alpha=0.5, phi=0, eps=1e-9").unwrap();
        assert_eq!((s.alpha, s.phi, s.epsilon), (0.5, 0.0, 1e-9));
        assert!(matches!(
            ExampleSpec::parse("alpha=0.1,gamma=2"),
            Err(Error::Parse { column: 2, .. })
        ));
        assert!(ExampleSpec::parse("alpha").is_err());
    }

    #[test]
    fn closed_forms_match_solver() {
        let ex = ExampleSpec::default().build().unwrap();
        assert!(ex.warnings.is_empty());
        let s = solve(&ex.problem).unwrap();
        let g = geometry(&ex.problem, &s);
        let cf = &ex.closed_forms;
        assert!((cf.kappa - 10.0).abs() < 1e-12 && (g.kappa - cf.kappa).abs() < 1e-12);
        assert!((cf.tan_theta - 1.0).abs() < 1e-15 && (g.tan_theta - 1.0).abs() < 1e-14);
        assert!((g.nu - cf.nu).abs() < 1e-12);
        for (a, b) in s.x.iter().zip(&cf.x) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_zero_collapses_radical() {
        let spec = ExampleSpec {
            alpha: 0.5,
            beta: 1.0,
            phi: 0.0,
            epsilon: 1e-8,
        };
        let cf = spec.closed_forms();
        assert_eq!(cf.nu, 2.0);
        assert_eq!(cf.x, vec![1.0, 0.0]);
    }

    #[test]
    fn warnings_not_errors() {
        let spec = ExampleSpec {
            alpha: 2.0,
            beta: 1.0,
            phi: 0.3,
            epsilon: 0.5,
        };
        let ex = spec.build().unwrap();
        assert_eq!(ex.warnings.len(), 2);
    }
}
