#![allow(dead_code)]

use llscond::lls::{analyze_problem, Geometry};
use llscond::{DenseMatrix, DenseVector, LlsProblem, LlsSolution};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn to_na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_col_major())
}

pub fn from_na(a: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_col_major(a.nrows(), a.ncols(), a.as_slice().to_vec()).unwrap()
}

/// m×m orthogonal matrix from the QR factors of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let g = DMatrix::from_vec(m, m, gaussian(rng, m * m));
    g.qr().q()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_col_major(m, n, gaussian(rng, m * n)).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector {
    DenseVector::new(gaussian(rng, n)).unwrap()
}

/// `A = U diag(σ) Vᵗ` with σ log-spaced from 1 down to 1/κ.
pub fn matrix_with_condition(rng: &mut ChaCha8Rng, m: usize, n: usize, kappa: f64) -> DenseMatrix {
    let u = random_orthogonal(rng, m);
    let v = random_orthogonal(rng, n);
    let mut s = DMatrix::zeros(m, n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        s[(i, i)] = kappa.powf(-t);
    }
    from_na(&(u * s * v.transpose()))
}

/// Random problem with prescribed κ and residual-to-fit ratio `tan θ`
/// (`tan_theta = 0` gives a consistent system; ignored when m = n).
pub struct Generated {
    pub problem: LlsProblem,
    pub solution: LlsSolution,
    pub geometry: Geometry,
}

pub fn problem_with(rng: &mut ChaCha8Rng, m: usize, n: usize, kappa: f64, tan_theta: f64) -> Generated {
    let a = matrix_with_condition(rng, m, n, kappa);
    let x0 = random_vector(rng, n);
    let ax = a.matvec(&x0);
    let na = to_na(&a);
    let q = na.clone().qr().q();
    let w = nalgebra::DVector::from_vec(gaussian(rng, m));
    let perp = &w - &q * (q.transpose() * &w);
    let mut b = ax.clone();
    let pn = perp.norm();
    if pn > 1e-12 && tan_theta > 0.0 {
        let scale = tan_theta * ax.norm() / pn;
        let r = DenseVector::new(perp.iter().map(|v| v * scale).collect()).unwrap();
        b = b.add(&r);
    }
    let (problem, solution, geometry) = analyze_problem(a, b).unwrap();
    Generated {
        problem,
        solution,
        geometry,
    }
}

/// Random shape with m ≤ `max_m`, n ≤ min(m, `max_n`), κ log-uniform in
/// [1, `max_kappa`] and tan θ log-uniform in [1e-3, 1e2] (or 0 w.p. 1/8).
pub fn random_problem(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize, max_kappa: f64) -> Generated {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(n..=max_m.max(n));
    let kappa = max_kappa.powf(rng.random::<f64>());
    let tan_theta = if rng.random_range(0..8) == 0 {
        0.0
    } else {
        10f64.powf(rng.random_range(-3.0..2.0))
    };
    problem_with(rng, m, n, kappa, tan_theta)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
