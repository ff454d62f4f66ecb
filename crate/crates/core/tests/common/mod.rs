//! Test-only oracles, independent of the library's filter code path.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A linear-Gaussian problem with a simulated measurement stream.
pub struct LinearProblem {
    pub transition: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub observation: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub x0: DVector<f64>,
    pub p0: DMatrix<f64>,
    pub times: Vec<f64>,
    pub measurements: Vec<Option<DVector<f64>>>,
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Random stable transition (operator norm ≤ 0.98), PSD `Q` of random rank,
/// PD `R`, and `steps` samples with roughly `dropout` of them missing.
pub fn random_linear_problem(seed: u64, n: usize, m: usize, steps: usize, dropout: f64) -> LinearProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix(&mut rng, n, n);
    let norm = a.clone().svd(false, false).singular_values.max();
    let transition = a * (0.98 / norm.max(0.98));

    let rank = rng.random_range(1..=n);
    let b = gaussian_matrix(&mut rng, n, rank) * 0.3;
    let q = &b * b.transpose();
    let c = gaussian_matrix(&mut rng, m, m) * 0.5;
    let r = &c * c.transpose() + DMatrix::identity(m, m) * 0.05;
    let observation = gaussian_matrix(&mut rng, m, n);
    let d = gaussian_matrix(&mut rng, n, n);
    let p0 = &d * d.transpose() + DMatrix::identity(n, n);
    let x0 = gaussian_vector(&mut rng, n);

    let r_chol = r.clone().cholesky().unwrap().l();
    let mut x = x0.clone() + p0.clone().cholesky().unwrap().l() * gaussian_vector(&mut rng, n);
    let mut times = Vec::with_capacity(steps);
    let mut measurements = Vec::with_capacity(steps);
    for k in 0..steps {
        x = &transition * &x + &b * gaussian_vector(&mut rng, rank);
        let z = &observation * &x + &r_chol * gaussian_vector(&mut rng, m);
        times.push(k as f64);
        measurements.push((rng.random::<f64>() >= dropout).then_some(z));
    }
    LinearProblem {
        transition,
        q,
        observation,
        r,
        x0,
        p0,
        times,
        measurements,
    }
}

/// Textbook Kalman filter with explicit inverse, no symmetrization.
pub fn classic_kalman(problem: &LinearProblem) -> Vec<(DVector<f64>, DMatrix<f64>)> {
    let f = &problem.transition;
    let h = &problem.observation;
    let n = f.nrows();
    let mut x = problem.x0.clone();
    let mut p = problem.p0.clone();
    let mut out = Vec::with_capacity(problem.measurements.len());
    for z in &problem.measurements {
        x = f * &x;
        p = f * &p * f.transpose() + &problem.q;
        if let Some(z) = z {
            let s = h * &p * h.transpose() + &problem.r;
            let k = &p * h.transpose() * s.try_inverse().expect("S invertible");
            x = &x + &k * (z - h * &x);
            p = (DMatrix::identity(n, n) - &k * h) * &p;
        }
        out.push((x.clone(), p.clone()));
    }
    out
}

/// Windowed mean recomputed from scratch at every index (partial edges,
/// missing values excluded, carry-forward on empty windows).
pub fn brute_force_sma(series: &[Option<DVector<f64>>], w: usize) -> Vec<Option<DVector<f64>>> {
    let mut prev = None;
    (0..series.len())
        .map(|t| {
            let lo = (t + 1).saturating_sub(w);
            let present: Vec<&DVector<f64>> = series[lo..=t].iter().flatten().collect();
            if let Some(first) = present.first() {
                let mut acc = DVector::zeros(first.len());
                for v in &present {
                    acc += *v;
                }
                prev = Some(acc / present.len() as f64);
            }
            prev.clone()
        })
        .collect()
}
