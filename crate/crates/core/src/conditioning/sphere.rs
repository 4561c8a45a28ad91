//! Multi-start Riemannian gradient ascent on the unit sphere.
//!
//! Steps move along the tangent projection of the gradient and retract by
//! renormalizing. Step lengths start from a Barzilai–Borwein estimate and are
//! cut back until an Armijo increase is observed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::OptimizerConfig;
use crate::linalg::{dot, norm2};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
/// Largest angle (radians, approximately) a single step may sweep.
const MAX_ANGLE: f64 = 0.5;

#[derive(Debug, Clone)]
pub(crate) struct SphereRun {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

fn tangent(grad: &[f64], x: &[f64]) -> Vec<f64> {
    let radial = dot(grad, x);
    grad.iter().zip(x).map(|(g, xi)| g - radial * xi).collect()
}

/// Unit vectors drawn from a seeded normal generator.
pub(crate) fn random_unit_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            normalize(&mut v);
            v
        })
        .collect()
}

/// Ascent from one start. `objective` returns the value and Euclidean gradient.
pub(crate) fn ascend<F>(objective: &F, start: &[f64], cfg: &OptimizerConfig) -> SphereRun
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = start.to_vec();
    normalize(&mut x);
    let (mut fx, g) = objective(&x);
    let mut rg = tangent(&g, &x);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut last_step = f64::NAN;

    for iter in 0..cfg.max_iterations {
        let gnorm = norm2(&rg);
        if gnorm <= cfg.value_tolerance * fx.abs().max(f64::MIN_POSITIVE) {
            return SphereRun {
                point: x,
                value: fx,
                converged: true,
                iterations: iter,
            };
        }

        let mut t = match &prev {
            Some((s, y)) => {
                let sy = dot(s, y);
                let ss = dot(s, s);
                if sy < 0.0 {
                    ss / -sy
                } else {
                    2.0 * last_step
                }
            }
            None => 0.1 / gnorm,
        };
        if !t.is_finite() || t <= 0.0 {
            t = 0.1 / gnorm;
        }
        t = t.min(MAX_ANGLE / gnorm);

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut trial: Vec<f64> = x.iter().zip(&rg).map(|(xi, gi)| xi + t * gi).collect();
            normalize(&mut trial);
            let (ft, gt) = objective(&trial);
            if ft.is_finite() && ft >= fx + ARMIJO * t * gnorm * gnorm {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= 0.5;
        }

        let Some((xn, fn_, gn)) = accepted else {
            // No ascent at working precision: a stationary point.
            return SphereRun {
                point: x,
                value: fx,
                converged: true,
                iterations: iter,
            };
        };

        let rgn = tangent(&gn, &xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let step = norm2(&s);
        let y: Vec<f64> = rgn.iter().zip(&rg).map(|(a, b)| a - b).collect();
        prev = Some((s, y));
        last_step = t;
        x = xn;
        fx = fn_;
        rg = rgn;
        if step <= cfg.step_tolerance {
            return SphereRun {
                point: x,
                value: fx,
                converged: true,
                iterations: iter + 1,
            };
        }
    }
    SphereRun {
        point: x,
        value: fx,
        converged: false,
        iterations: cfg.max_iterations,
    }
}

/// Runs [`ascend`] from every start and keeps the best value; ties go to the
/// lowest start index.
pub(crate) fn maximize<F>(objective: &F, starts: &[Vec<f64>], cfg: &OptimizerConfig) -> SphereRun
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    starts
        .iter()
        .map(|s| ascend(objective, s, cfg))
        .reduce(|best, run| if run.value > best.value { run } else { best })
        .expect("at least one start")
}
