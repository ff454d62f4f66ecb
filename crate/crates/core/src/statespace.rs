//! Numeric carriers shared by the filter: Gaussian beliefs and the process
//! and measurement model descriptions.
//!
//! Dimensions are runtime values. The filter is meant for small dense
//! problems (state and measurement dimension up to about 8), so plain
//! `nalgebra` dynamic matrices are used throughout.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Tolerance used when checking covariance symmetry and semi-definiteness.
pub const COV_TOLERANCE: f64 = 1e-9;

/// Replaces `m` with `(m + mᵀ) / 2`.
pub fn symmetrize(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Largest absolute difference between `m[(i, j)]` and `m[(j, i)]`.
pub fn max_asymmetry(m: &Matrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &Matrix) -> f64 {
    let mut sym = m.clone();
    symmetrize(&mut sym);
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

fn check_square(m: &Matrix, n: usize, context: &'static str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension {
            context,
            expected: format!("{n}x{n}"),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

fn check_covariance(m: &Matrix, context: &'static str) -> Result<()> {
    if !all_finite(m.iter()) {
        return Err(Error::InvalidConfig(format!("{context} has non-finite entries")));
    }
    if max_asymmetry(m) > COV_TOLERANCE {
        return Err(Error::InvalidConfig(format!("{context} is not symmetric")));
    }
    if min_eigenvalue(m) < -COV_TOLERANCE {
        return Err(Error::InvalidConfig(format!(
            "{context} is not positive semi-definite"
        )));
    }
    Ok(())
}

/// Gaussian belief over the hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    pub mean: Vector,
    pub cov: Matrix,
}

impl StateEstimate {
    /// Builds a belief, validating shape, finiteness, symmetry and PSD-ness.
    /// The stored covariance is symmetrized.
    pub fn new(mean: Vector, mut cov: Matrix) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::InvalidConfig("state dimension must be at least 1".into()));
        }
        if !all_finite(mean.iter()) {
            return Err(Error::InvalidConfig("state mean has non-finite entries".into()));
        }
        check_square(&cov, mean.len(), "state covariance")?;
        check_covariance(&cov, "state covariance")?;
        symmetrize(&mut cov);
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn trace(&self) -> f64 {
        self.cov.trace()
    }
}

type VecFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type JacFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// State transition `x_t = f(x_{t-1}) + w_t`, `w_t ~ N(0, q)`.
///
/// `f` and `jacobian_f` must be pure functions: the filter may call them any
/// number of times and from any thread.
#[derive(Clone)]
pub struct ProcessModel {
    name: String,
    dim: usize,
    f: VecFn,
    jacobian_f: JacFn,
    q: Matrix,
    dt: f64,
}

impl ProcessModel {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        jacobian_f: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
        q: Matrix,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        let dim = q.nrows();
        if dim == 0 {
            return Err(Error::InvalidConfig("state dimension must be at least 1".into()));
        }
        check_square(&q, dim, "process noise")?;
        check_covariance(&q, "process noise")?;
        Ok(Self {
            name: name.into(),
            dim,
            f: Arc::new(f),
            jacobian_f: Arc::new(jacobian_f),
            q,
            dt,
        })
    }

    /// Linear model `f(x) = transition · x`.
    pub fn linear(transition: Matrix, q: Matrix, dt: f64) -> Result<Self> {
        check_square(&transition, q.nrows(), "transition matrix")?;
        let jac = transition.clone();
        Self::new(
            "linear",
            move |x: &Vector| &transition * x,
            move |_: &Vector| jac.clone(),
            q,
            dt,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn f(&self, x: &Vector) -> Vector {
        (self.f)(x)
    }

    pub fn jacobian(&self, x: &Vector) -> Matrix {
        (self.jacobian_f)(x)
    }
}

impl fmt::Debug for ProcessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProcessModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("dt", &self.dt)
            .field("q", &self.q)
            .finish_non_exhaustive()
    }
}

/// Observation `z_t = h(x_t) + v_t`, `v_t ~ N(0, r)`.
#[derive(Clone)]
pub struct MeasurementModel {
    name: String,
    state_dim: usize,
    dim: usize,
    h: VecFn,
    jacobian_h: JacFn,
    r: Matrix,
}

impl MeasurementModel {
    /// `r` must be symmetric positive definite.
    pub fn new(
        name: impl Into<String>,
        state_dim: usize,
        h: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        jacobian_h: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
        r: Matrix,
    ) -> Result<Self> {
        let dim = r.nrows();
        if dim == 0 || state_dim == 0 {
            return Err(Error::InvalidConfig("dimensions must be at least 1".into()));
        }
        check_square(&r, dim, "measurement noise")?;
        check_covariance(&r, "measurement noise")?;
        if r.clone().cholesky().is_none() {
            return Err(Error::InvalidConfig(
                "measurement noise must be positive definite".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            state_dim,
            dim,
            h: Arc::new(h),
            jacobian_h: Arc::new(jacobian_h),
            r,
        })
    }

    /// Linear model `h(x) = observation · x`.
    pub fn linear(observation: Matrix, r: Matrix) -> Result<Self> {
        if observation.nrows() != r.nrows() {
            return Err(Error::Dimension {
                context: "observation matrix",
                expected: format!("{} rows", r.nrows()),
                actual: format!("{} rows", observation.nrows()),
            });
        }
        let state_dim = observation.ncols();
        let jac = observation.clone();
        Self::new(
            "linear",
            state_dim,
            move |x: &Vector| &observation * x,
            move |_: &Vector| jac.clone(),
            r,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn h(&self, x: &Vector) -> Vector {
        (self.h)(x)
    }

    pub fn jacobian(&self, x: &Vector) -> Matrix {
        (self.jacobian_h)(x)
    }
}

impl fmt::Debug for MeasurementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementModel")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("dim", &self.dim)
            .field("r", &self.r)
            .finish_non_exhaustive()
    }
}

fn check_step(dt: f64, q_scale: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    if !(q_scale >= 0.0 && q_scale.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "q_scale must be non-negative, got {q_scale}"
        )));
    }
    Ok(())
}

/// Constant-velocity model on `[position, velocity]`:
/// `f([p, v]) = [p + v·dt, v]`, `q = q_scale · I₂`.
pub fn make_constant_velocity_model(dt: f64, q_scale: f64) -> Result<ProcessModel> {
    check_step(dt, q_scale)?;
    ProcessModel::new(
        "constant-velocity",
        move |x: &Vector| Vector::from_vec(vec![x[0] + x[1] * dt, x[1]]),
        move |_: &Vector| Matrix::from_row_slice(2, 2, &[1.0, dt, 0.0, 1.0]),
        Matrix::identity(2, 2) * q_scale,
        dt,
    )
}

/// Euler-stepped pendulum on `[angle, angular velocity]`:
/// `f([p, v]) = [p + v·dt, v − sin(p)·dt]`.
pub fn make_pendulum_model(dt: f64, q_scale: f64) -> Result<ProcessModel> {
    check_step(dt, q_scale)?;
    ProcessModel::new(
        "pendulum",
        move |x: &Vector| Vector::from_vec(vec![x[0] + x[1] * dt, x[1] - x[0].sin() * dt]),
        move |x: &Vector| Matrix::from_row_slice(2, 2, &[1.0, dt, -x[0].cos() * dt, 1.0]),
        Matrix::identity(2, 2) * q_scale,
        dt,
    )
}

/// Identity observation of an `m`-dimensional state with `r = r_scale · I_m`.
pub fn make_identity_measurement(m: usize, r_scale: f64) -> Result<MeasurementModel> {
    if m == 0 {
        return Err(Error::InvalidConfig("measurement dimension must be at least 1".into()));
    }
    if !(r_scale > 0.0 && r_scale.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "r_scale must be positive, got {r_scale}"
        )));
    }
    MeasurementModel::new(
        "identity",
        m,
        |x: &Vector| x.clone(),
        move |_: &Vector| Matrix::identity(m, m),
        Matrix::identity(m, m) * r_scale,
    )
}
