//! Empirical checks of the analytic condition numbers: perturbed re-solves,
//! finite-difference estimates, worst-case perturbations, and randomized
//! error-bound trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::conditioning::{chi_a_bounds, chi_b, dual_norm_certificate, rank2_map, ScaleFactors};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, svd, DenseMatrix, DenseVector, HouseholderQr, RANK_TOLERANCE};
use crate::lls::{geometry, LlsProblem, LlsSolution};

/// Default slack on the first-order bound before a trial counts as a violation.
pub const DEFAULT_SLACK: f64 = 1e-3;

/// `Δx` such that `x + Δx = argmin ‖(b + Δb) − (A + ΔA) u‖₂`.
pub fn perturbed_solve(
    p: &LlsProblem,
    s: &LlsSolution,
    da: &DenseMatrix,
    db: &DenseVector,
) -> Result<DenseVector> {
    if da.shape() != p.a().shape() || db.len() != p.rows() {
        return Err(Error::Dimension(format!(
            "perturbation shapes {:?}/{} do not match problem {:?}",
            da.shape(),
            db.len(),
            p.a().shape()
        )));
    }
    let a2 = p.a().add(da);
    let f = svd(&a2)?;
    let (smax, smin) = (f.sigma_max(), f.sigma_min());
    if smax == 0.0 || smin <= RANK_TOLERANCE * smax {
        return Err(Error::PerturbedRankDeficient {
            ratio: if smax == 0.0 { 0.0 } else { smin / smax },
        });
    }
    let b2 = p.b().add(db);
    let x2 = HouseholderQr::new(&a2).solve(b2.as_slice())?;
    Ok(DenseVector::new(x2)?.sub(&s.x))
}

/// Largest observed `(‖Δx‖/‖x‖)/(‖Δb‖/‖b‖)` over right-hand-side probes of
/// size `eps` (relative to ‖b‖): the left singular vector for σ_min (the
/// maximizing direction) plus `random_probes` seeded random directions.
pub fn finite_difference_chi_b(
    p: &LlsProblem,
    s: &LlsSolution,
    eps: f64,
    random_probes: usize,
    seed: u64,
) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    let m = p.rows();
    let n = p.cols();
    let norm_x = s.x.norm();
    let step = eps * p.norm_b();
    let mut probes = vec![p.svd().left(n - 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_probes {
        let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(u) = DenseVector::new(v)?.normalized() {
            probes.push(u);
        }
    }
    let zero = DenseMatrix::zeros(m, n);
    let mut best = 0.0_f64;
    for dir in probes {
        let db = dir.scaled(step);
        let dx = perturbed_solve(p, s, &zero, &db)?;
        best = best.max((dx.norm() / norm_x) / eps);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub da: DenseMatrix,
    /// Observed `‖Δx‖/‖x‖` divided by `eps`.
    pub achieved_ratio: f64,
    pub direction: DenseVector,
}

/// Builds `ΔA` with `‖ΔA‖₂ = eps‖A‖₂` that maximizes the first-order change
/// of x along `direction` (default: right singular vector for σ_min).
///
/// Along a unit `y`, `yᵗΔx ≈ tr(Gᵗ ΔA)` with `G` the rank-2 map of `y`, so
/// the dual certificate of `G` scaled by `eps‖A‖₂` is the best ΔA.
pub fn worst_case_perturbation(
    p: &LlsProblem,
    s: &LlsSolution,
    eps: f64,
    direction: Option<&DenseVector>,
) -> Result<WorstCase> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    let n = p.cols();
    let y = match direction {
        Some(d) => d
            .normalized()
            .ok_or_else(|| Error::InvalidConfig("direction must be nonzero".into()))?,
        None => p.svd().right(n - 1),
    };
    let g = rank2_map(p, s, &y)?.to_matrix();
    let cert = dual_norm_certificate(&g)?;
    let da = cert.b.scaled(eps * p.norm_a());
    let dx = perturbed_solve(p, s, &da, &DenseVector::zeros(p.rows()))?;
    Ok(WorstCase {
        da,
        achieved_ratio: dx.norm() / s.x.norm() / eps,
        direction: y,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTrial {
    pub da: DenseMatrix,
    pub db: DenseVector,
    /// `max(‖ΔA‖₂/‖A‖₂, ‖Δb‖₂/‖b‖₂)`.
    pub eps: f64,
    pub dx_observed: DenseVector,
    /// `χ_A,upper ‖ΔA‖/‖A‖ + χ_b ‖Δb‖/‖b‖`.
    pub bound_predicted: f64,
    /// Observed `‖Δx‖/‖x‖` over `bound_predicted` (0 for a zero perturbation).
    pub ratio: f64,
}

/// Re-solves with one explicit perturbation and compares against the
/// first-order bound with relative scales.
pub fn evaluate_trial(
    p: &LlsProblem,
    s: &LlsSolution,
    da: DenseMatrix,
    db: DenseVector,
) -> Result<PerturbationTrial> {
    let g = geometry(p, s);
    let sc = ScaleFactors::relative(p, s);
    let (_, upper) = chi_a_bounds(&g, &sc);
    let cb = chi_b(p, &sc);
    let ea = spectral_norm(&da)? / p.norm_a();
    let eb = db.norm() / p.norm_b();
    let dx = perturbed_solve(p, s, &da, &db)?;
    let observed = dx.norm() / s.x.norm();
    let bound = upper * ea + cb * eb;
    let ratio = if bound > 0.0 { observed / bound } else { 0.0 };
    Ok(PerturbationTrial {
        da,
        db,
        eps: ea.max(eb),
        dx_observed: dx,
        bound_predicted: bound,
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub eps: f64,
    pub seed: u64,
    pub slack: f64,
}

impl TrialConfig {
    pub fn new(trials: usize, eps: f64, seed: u64) -> Self {
        TrialConfig {
            trials,
            eps,
            seed,
            slack: DEFAULT_SLACK,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.slack.is_finite() && self.slack >= 0.0) {
            return Err(Error::InvalidConfig("slack must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub eps_used: f64,
    pub slack: f64,
    /// Trials whose ratio exceeded `1 + slack`.
    pub violations: usize,
    /// Trials that could not be evaluated (e.g. the perturbed matrix lost rank).
    pub failures: usize,
    /// False when `max_ratio > 1 + slack`: second-order terms are visible and
    /// `eps` is outside the regime where the first-order bound applies.
    pub first_order_regime: bool,
    pub seed: u64,
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    let data = (0..m * n).map(|_| StandardNormal.sample(rng)).collect();
    DenseMatrix::from_col_major(m, n, data).expect("finite normal samples")
}

/// Runs `cfg.trials` random perturbations with `‖ΔA‖₂/‖A‖₂` and
/// `‖Δb‖₂/‖b‖₂` drawn uniformly in `(0, eps]`. Deterministic in `cfg.seed`.
pub fn run_trials(p: &LlsProblem, s: &LlsSolution, cfg: &TrialConfig) -> Result<TrialSummary> {
    cfg.validate()?;
    let (m, n) = p.a().shape();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ratios = Vec::with_capacity(cfg.trials);
    let mut failures = 0usize;
    for _ in 0..cfg.trials {
        let raw_a = random_matrix(&mut rng, m, n);
        let raw_b: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ta: f64 = 1.0 - rng.random::<f64>();
        let tb: f64 = 1.0 - rng.random::<f64>();
        let na = spectral_norm(&raw_a)?;
        let raw_b = DenseVector::new(raw_b)?;
        let nb = raw_b.norm();
        if na == 0.0 || nb == 0.0 {
            failures += 1;
            continue;
        }
        let da = raw_a.scaled(ta * cfg.eps * p.norm_a() / na);
        let db = raw_b.scaled(tb * cfg.eps * p.norm_b() / nb);
        match evaluate_trial(p, s, da, db) {
            Ok(t) => ratios.push(t.ratio),
            Err(_) => failures += 1,
        }
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let mean_ratio = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let violations = ratios.iter().filter(|&&r| r > 1.0 + cfg.slack).count();
    Ok(TrialSummary {
        trials: cfg.trials,
        max_ratio,
        mean_ratio,
        eps_used: cfg.eps,
        slack: cfg.slack,
        violations,
        failures,
        first_order_regime: max_ratio <= 1.0 + cfg.slack,
        seed: cfg.seed,
    })
}
