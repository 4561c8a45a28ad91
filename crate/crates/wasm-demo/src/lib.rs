//! Browser bindings for the three-parameter example: full analysis, the
//! condition-number objective around the unit circle, and the textbook
//! overestimate as α shrinks. Every export returns a JSON string.

use llscond::conditioning::{
    chi_a_bounds, chi_a_objective, chi_b, OptimizerConfig, ScaleFactors,
};
use llscond::family::ExampleSpec;
use llscond::lls::{geometry, solve};
use llscond::report::{analyze, AnalysisOptions, AnalysisReport};
use llscond::{catalog, DenseVector, Error};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn spec(alpha: f64, beta: f64, phi: f64) -> ExampleSpec {
    ExampleSpec {
        alpha,
        beta,
        phi,
        ..ExampleSpec::default()
    }
}

pub fn example_report(alpha: f64, beta: f64, phi: f64, exact: bool, seed: u64) -> Result<AnalysisReport, Error> {
    let ex = spec(alpha, beta, phi).build()?;
    let opts = AnalysisOptions {
        exact,
        optimizer: OptimizerConfig {
            seed,
            ..OptimizerConfig::default()
        },
        ..AnalysisOptions::default()
    };
    analyze(&ex.problem, "example", &opts, Some(&ex))
}

/// Condition-number objective at Δx = (cos t, sin t) for `samples` values of
/// t in [0, π) (the objective is even, so half the circle suffices), with the
/// two limits for reference.
pub fn circle_profile(alpha: f64, beta: f64, phi: f64, samples: usize) -> Result<Value, Error> {
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least 2 samples".into()));
    }
    let ex = spec(alpha, beta, phi).build()?;
    let p = &ex.problem;
    let s = solve(p)?;
    let g = geometry(p, &s);
    let sc = ScaleFactors::relative(p, &s);
    let (lower, upper) = chi_a_bounds(&g, &sc);
    let mut angle = Vec::with_capacity(samples);
    let mut value = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = std::f64::consts::PI * k as f64 / samples as f64;
        let dx = DenseVector::new(vec![t.cos(), t.sin()])?;
        angle.push(t);
        value.push(chi_a_objective(p, &s, &sc, &dx)?);
    }
    let (best, arg) = value
        .iter()
        .zip(&angle)
        .fold((f64::MIN, 0.0), |acc, (&v, &t)| if v > acc.0 { (v, t) } else { acc });
    Ok(json!({
        "angle": angle,
        "value": value,
        "lower": lower,
        "upper": upper,
        "chi_b": chi_b(p, &sc),
        "sampled_max": best,
        "sampled_argmax": arg,
    }))
}

/// Textbook-to-attainable ratio and κ/2 for `points` log-spaced α in
/// [`alpha_min`, `alpha_max`].
pub fn overestimate_curve(beta: f64, phi: f64, alpha_min: f64, alpha_max: f64, points: usize) -> Result<Value, Error> {
    if !(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < alpha_min < alpha_max < 1, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidConfig("need at least 2 points".into()));
    }
    let (lo, hi) = (alpha_min.ln(), alpha_max.ln());
    let mut alpha = Vec::with_capacity(points);
    let mut ratio = Vec::with_capacity(points);
    let mut half_kappa = Vec::with_capacity(points);
    for k in 0..points {
        let a = (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp();
        let ex = spec(a, beta, phi).build()?;
        let s = solve(&ex.problem)?;
        let g = geometry(&ex.problem, &s);
        alpha.push(a);
        ratio.push(catalog::overestimate_ratio(&g));
        half_kappa.push(g.kappa / 2.0);
    }
    Ok(json!({ "alpha": alpha, "ratio": ratio, "half_kappa": half_kappa }))
}

fn to_js(r: Result<Value, Error>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn analyze_example(alpha: f64, beta: f64, phi: f64, exact: bool) -> Result<String, JsError> {
    let rep = example_report(alpha, beta, phi, exact, 0)
        .and_then(|r| serde_json::to_value(r).map_err(|e| Error::InvalidConfig(e.to_string())));
    to_js(rep)
}

#[wasm_bindgen]
pub fn objective_profile(alpha: f64, beta: f64, phi: f64, samples: usize) -> Result<String, JsError> {
    to_js(circle_profile(alpha, beta, phi, samples))
}

#[wasm_bindgen]
pub fn overestimate_sweep(beta: f64, phi: f64, alpha_min: f64, alpha_max: f64, points: usize) -> Result<String, JsError> {
    to_js(overestimate_curve(beta, phi, alpha_min, alpha_max, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn report_carries_exact_value() {
        let rep = example_report(0.1, 1.0, PI / 10.0, true, 0).unwrap();
        let exact = rep.condition.chi_a_exact.unwrap().value;
        assert!((exact - 35.193).abs() < 2e-3);
    }

    #[test]
    fn profile_peak_sits_between_limits() {
        let v = circle_profile(0.1, 1.0, PI / 10.0, 2000).unwrap();
        let best = v["sampled_max"].as_f64().unwrap();
        let lower = v["lower"].as_f64().unwrap();
        let upper = v["upper"].as_f64().unwrap();
        assert!(lower <= best && best <= upper);
        // A fine grid on the circle lands close to the optimizer's value.
        assert!((best - 35.193).abs() < 0.01, "{best}");
        assert_eq!(v["value"].as_array().unwrap().len(), 2000);
    }

    #[test]
    fn sweep_tends_to_half_kappa() {
        let v = overestimate_curve(1.0, PI / 2.0, 1e-3, 1e-1, 5).unwrap();
        let r = v["ratio"].as_array().unwrap();
        let h = v["half_kappa"].as_array().unwrap();
        let first = r[0].as_f64().unwrap() / h[0].as_f64().unwrap();
        let last = r[4].as_f64().unwrap() / h[4].as_f64().unwrap();
        assert!((first - 1.0).abs() < 0.01 && last > first);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(overestimate_curve(1.0, 0.3, 0.5, 0.1, 5).is_err());
        assert!(circle_profile(0.1, 1.0, 0.3, 1).is_err());
        assert!(example_report(f64::NAN, 1.0, 0.3, false, 0).is_err());
    }
}
