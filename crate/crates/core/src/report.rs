//! Report assembly and rendering.
//!
//! Every report is a serde structure. Text and CSV output are produced by
//! walking its JSON form, so every number shown in text is also in the JSON
//! (text uses 6 significant digits, CSV and JSON round-trip exactly).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{evaluate_catalog, overestimate_ratio, BoundCatalogEntry, GrattonWeights};
use crate::conditioning::{condition_report, ConditionReport, OptimizerConfig, ScaleFactors};
use crate::error::{Error, Result};
use crate::family::{ClosedForms, ExampleSpec, PaperExample};
use crate::io::format_exact;
use crate::linalg::RANK_TOLERANCE;
use crate::lls::{geometry, solve, Geometry, LlsProblem};
use crate::perturb::{perturbed_solve, run_trials, TrialConfig, TrialSummary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown format '{other}' (expected text, json or csv)"
            ))),
        }
    }
}

/// Which scale factors to measure perturbations with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScaleChoice {
    /// `(‖A‖₂, ‖b‖₂, ‖x‖₂)`.
    #[default]
    Relative,
    Custom(ScaleFactors),
}

impl FromStr for ScaleChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("default") {
            return Ok(ScaleChoice::Relative);
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "scales must be 'A,B,X' or 'default', got '{s}'"
            )));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad scale factor '{p}'")))?;
        }
        Ok(ScaleChoice::Custom(ScaleFactors::new(v[0], v[1], v[2])?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub scales: ScaleChoice,
    /// Run the sphere maximization for the exact χ_x(A).
    pub exact: bool,
    pub optimizer: OptimizerConfig,
    pub gratton: GrattonWeights,
    /// Perturbation size used to turn bound coefficients into bounds.
    pub eps: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            scales: ScaleChoice::Relative,
            exact: false,
            optimizer: OptimizerConfig::default(),
            gratton: GrattonWeights::default(),
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub rows: usize,
    pub cols: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    pub rank_tolerance: f64,
    pub eps: f64,
    pub scales: String,
}

impl Provenance {
    fn new(opts: &AnalysisOptions) -> Self {
        Provenance {
            version: VERSION.to_string(),
            seed: opts.optimizer.seed,
            restarts: opts.optimizer.restarts,
            max_iterations: opts.optimizer.max_iterations,
            step_tolerance: opts.optimizer.step_tolerance,
            value_tolerance: opts.optimizer.value_tolerance,
            rank_tolerance: RANK_TOLERANCE,
            eps: opts.eps,
            scales: match opts.scales {
                ScaleChoice::Relative => "default".into(),
                ScaleChoice::Custom(_) => "custom".into(),
            },
        }
    }
}

/// Parameters and closed forms of the built-in example, reported next to the
/// computed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleInfo {
    pub spec: ExampleSpec,
    pub closed_forms: ClosedForms,
    pub warnings: Vec<String>,
}

impl ExampleInfo {
    pub fn from_example(ex: &PaperExample) -> Self {
        ExampleInfo {
            spec: ex.spec,
            closed_forms: ex.closed_forms.clone(),
            warnings: ex.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub problem: ProblemInfo,
    pub geometry: Geometry,
    pub condition: ConditionReport,
    pub catalog: Vec<BoundCatalogEntry>,
    pub overestimate_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleInfo>,
    pub provenance: Provenance,
}

fn resolve_scales(choice: ScaleChoice, p: &LlsProblem, s: &crate::lls::LlsSolution) -> ScaleFactors {
    match choice {
        ScaleChoice::Relative => ScaleFactors::relative(p, s),
        ScaleChoice::Custom(sc) => sc,
    }
}

/// Geometry, χ_x(b), limits (and optionally the exact value) of χ_x(A), and
/// the literature catalog for one problem.
pub fn analyze(
    p: &LlsProblem,
    source: &str,
    opts: &AnalysisOptions,
    example: Option<&PaperExample>,
) -> Result<AnalysisReport> {
    opts.optimizer.validate()?;
    let s = solve(p)?;
    let g = geometry(p, &s);
    let sc = resolve_scales(opts.scales, p, &s);
    let condition = condition_report(p, &s, &g, &sc, opts.exact.then_some(&opts.optimizer))?;
    let catalog = evaluate_catalog(&g, p.a().frobenius_norm(), &sc, &opts.gratton, opts.eps)?;
    Ok(AnalysisReport {
        problem: ProblemInfo {
            rows: p.rows(),
            cols: p.cols(),
            source: source.to_string(),
        },
        geometry: g,
        condition,
        catalog,
        overestimate_ratio: overestimate_ratio(&g),
        example: example.map(ExampleInfo::from_example),
        provenance: Provenance::new(opts),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub problem: ProblemInfo,
    pub geometry: Geometry,
    pub catalog: Vec<BoundCatalogEntry>,
    pub overestimate_ratio: f64,
    pub gratton_weights: GrattonWeights,
    pub eps: f64,
    pub version: String,
}

pub fn catalog_report(p: &LlsProblem, source: &str, opts: &AnalysisOptions) -> Result<CatalogReport> {
    let s = solve(p)?;
    let g = geometry(p, &s);
    let sc = resolve_scales(opts.scales, p, &s);
    Ok(CatalogReport {
        problem: ProblemInfo {
            rows: p.rows(),
            cols: p.cols(),
            source: source.to_string(),
        },
        geometry: g,
        catalog: evaluate_catalog(&g, p.a().frobenius_norm(), &sc, &opts.gratton, opts.eps)?,
        overestimate_ratio: overestimate_ratio(&g),
        gratton_weights: opts.gratton,
        eps: opts.eps,
        version: VERSION.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub problem: ProblemInfo,
    pub summary: TrialSummary,
    pub version: String,
}

pub fn perturb_report(p: &LlsProblem, source: &str, cfg: &TrialConfig) -> Result<PerturbReport> {
    let s = solve(p)?;
    Ok(PerturbReport {
        problem: ProblemInfo {
            rows: p.rows(),
            cols: p.cols(),
            source: source.to_string(),
        },
        summary: run_trials(p, &s, cfg)?,
        version: VERSION.to_string(),
    })
}

/// Values computed by the library for the example, for side-by-side display
/// with the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleComputed {
    pub kappa: f64,
    pub nu: f64,
    pub tan_theta: f64,
    pub sec_theta: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub chi_a_upper: f64,
    pub chi_a_lower: f64,
    pub chi_b: f64,
    /// Observed `(‖Δx‖/‖x‖)/ε` under the example's ΔA.
    pub relative_change_coefficient: f64,
    pub perturbed_x2: f64,
    pub overestimate_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub spec: ExampleSpec,
    pub closed_forms: ClosedForms,
    pub computed: ExampleComputed,
    pub warnings: Vec<String>,
    pub version: String,
}

pub fn example_report(spec: &ExampleSpec) -> Result<ExampleReport> {
    let ex = spec.build()?;
    let p = &ex.problem;
    let s = solve(p)?;
    let g = geometry(p, &s);
    let sc = ScaleFactors::relative(p, &s);
    let (lower, upper) = crate::conditioning::chi_a_bounds(&g, &sc);
    let dx = perturbed_solve(p, &s, &ex.delta_a, &crate::linalg::DenseVector::zeros(3))?;
    Ok(ExampleReport {
        spec: *spec,
        closed_forms: ex.closed_forms.clone(),
        computed: ExampleComputed {
            kappa: g.kappa,
            nu: g.nu,
            tan_theta: g.tan_theta,
            sec_theta: g.sec_theta,
            x: s.x.as_slice().to_vec(),
            r: s.r.as_slice().to_vec(),
            chi_a_upper: upper,
            chi_a_lower: lower,
            chi_b: crate::conditioning::chi_b(p, &sc),
            relative_change_coefficient: dx.norm() / s.x.norm() / spec.epsilon,
            perturbed_x2: s.x[1] + dx[1],
            overestimate_ratio: overestimate_ratio(&g),
        },
        warnings: ex.warnings,
        version: VERSION.to_string(),
    })
}

/// Six significant digits, switching to exponent form outside [1e-4, 1e6).
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    // The exponent must come from the rounded value: 0.99999999 prints as 1.00000.
    let sci = format!("{v:.5e}");
    let e: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

fn render_text_value(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            if !key.is_empty() {
                let _ = writeln!(out, "{pad}{key}:");
            }
            let next = if key.is_empty() { indent } else { indent + 1 };
            for (k, child) in map {
                render_text_value(out, k, child, next);
            }
        }
        Value::Array(items) if items.iter().all(|i| i.is_number()) => {
            let nums: Vec<String> = items
                .iter()
                .map(|i| format_sig6(i.as_f64().unwrap_or(f64::NAN)))
                .collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", nums.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, item) in items.iter().enumerate() {
                render_text_value(out, &format!("[{i}]"), item, indent + 1);
            }
        }
        Value::Number(n) => {
            let text = if n.is_f64() {
                format_sig6(n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            };
            let _ = writeln!(out, "{pad}{key}: {text}");
        }
        Value::String(s) => {
            let _ = writeln!(out, "{pad}{key}: {s}");
        }
        Value::Bool(b) => {
            let _ = writeln!(out, "{pad}{key}: {b}");
        }
        Value::Null => {
            let _ = writeln!(out, "{pad}{key}: null");
        }
    }
}

/// Leaves of a JSON value keyed by JSON pointer.
pub fn flatten_json(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: String, v: &Value, out: &mut Vec<(String, Value)>) {
        match v {
            Value::Object(map) => {
                for (k, c) in map {
                    walk(format!("{prefix}/{k}"), c, out);
                }
            }
            Value::Array(items) => {
                for (i, c) in items.iter().enumerate() {
                    walk(format!("{prefix}/{i}"), c, out);
                }
            }
            leaf => out.push((prefix, leaf.clone())),
        }
    }
    let mut out = Vec::new();
    walk(String::new(), v, &mut out);
    out
}

/// Renders any report in the requested format.
pub fn render<T: Serialize>(report: &T, format: OutputFormat) -> Result<String> {
    let value = serde_json::to_value(report).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            render_text_value(&mut s, "", &value, 0);
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Error::InvalidConfig(e.to_string());
            w.write_record(["key", "value"]).map_err(io_err)?;
            for (k, leaf) in flatten_json(&value) {
                let text = match &leaf {
                    Value::Number(n) if n.is_f64() => format_exact(n.as_f64().unwrap_or(f64::NAN)),
                    Value::Number(n) => n.to_string(),
                    Value::String(s) => s.clone(),
                    Value::Bool(b) => b.to_string(),
                    Value::Null => String::new(),
                    _ => unreachable!("flatten yields leaves only"),
                };
                w.write_record([k.as_str(), text.as_str()]).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(e.to_string()))?
        }
    })
}

/// Machine-readable error body for JSON mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: String,
    pub kind: String,
    pub exit_code: i32,
}

impl ErrorReport {
    pub fn new(err: &Error) -> Self {
        let (kind, exit_code) = match err.class() {
            crate::error::ErrorClass::Validation => ("validation", 2),
            crate::error::ErrorClass::Numerical => ("numerical", 3),
        };
        ErrorReport {
            error: err.to_string(),
            kind: kind.into(),
            exit_code,
        }
    }
}
