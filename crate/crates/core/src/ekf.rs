//! Extended Kalman filter: prediction, measurement update, dropout-aware
//! stepping and whole-series filtering.
//!
//! The covariance update uses the plain `(I − K H) P` form followed by
//! symmetrization. The state Jacobian is evaluated at the previous posterior
//! mean and the measurement Jacobian at the predicted mean.

use crate::error::{Error, Result};
use crate::gazeio::TimedSeries;
use crate::statespace::{
    symmetrize, Matrix, MeasurementModel, ProcessModel, StateEstimate, Vector,
};

/// Initial covariance scale used when the caller does not supply `p0`.
pub const DEFAULT_P0_SCALE: f64 = 10.0;

/// Initial belief plus the two models driving the filter.
#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub initial: StateEstimate,
    pub process: ProcessModel,
    pub measurement: MeasurementModel,
}

impl FilterConfig {
    pub fn new(
        x0: Vector,
        p0: Matrix,
        process: ProcessModel,
        measurement: MeasurementModel,
    ) -> Result<Self> {
        let initial = StateEstimate::new(x0, p0)?;
        if process.dim() != initial.dim() {
            return Err(Error::Dimension {
                context: "process model",
                expected: format!("state dimension {}", initial.dim()),
                actual: format!("{}", process.dim()),
            });
        }
        if measurement.state_dim() != initial.dim() {
            return Err(Error::Dimension {
                context: "measurement model",
                expected: format!("state dimension {}", initial.dim()),
                actual: format!("{}", measurement.state_dim()),
            });
        }
        Ok(Self {
            initial,
            process,
            measurement,
        })
    }

    /// Initializes from the first present measurement, lifted into state
    /// space through the pseudo-inverse of the measurement Jacobian at the
    /// origin. For identity `h` this is `x0 = z0`; unobserved components
    /// start at zero. `p0 = p0_scale · I`.
    pub fn from_first_measurement(
        series: &TimedSeries,
        process: ProcessModel,
        measurement: MeasurementModel,
        p0_scale: f64,
    ) -> Result<Self> {
        let n = process.dim();
        let z0 = series
            .samples
            .iter()
            .find_map(|(_, z)| z.as_ref())
            .ok_or_else(|| Error::InsufficientData("series has no measurements".into()))?;
        let h0 = measurement.jacobian(&Vector::zeros(n));
        let pinv = h0
            .pseudo_inverse(1e-12)
            .map_err(|_| Error::Singular("measurement Jacobian pseudo-inverse"))?;
        let x0 = pinv * z0;
        Self::new(x0, Matrix::identity(n, n) * p0_scale, process, measurement)
    }
}

/// Outcome of one predict(-and-maybe-update) step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub prior: StateEstimate,
    pub posterior: StateEstimate,
    pub innovation: Option<Vector>,
    pub gain: Option<Matrix>,
    pub updated: bool,
}

fn check_dim(len: usize, expected: usize, context: &'static str) -> Result<()> {
    if len != expected {
        return Err(Error::Dimension {
            context,
            expected: expected.to_string(),
            actual: len.to_string(),
        });
    }
    Ok(())
}

/// Propagates the belief through the process model:
/// mean ← f(mean), cov ← F·P·Fᵀ + Q.
pub fn predict(state: &StateEstimate, model: &ProcessModel) -> Result<StateEstimate> {
    check_dim(state.dim(), model.dim(), "predict state")?;
    let mean = model.f(&state.mean);
    check_dim(mean.len(), model.dim(), "process function output")?;
    let jac = model.jacobian(&state.mean);
    if mean.iter().chain(jac.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "process model",
            state: state.mean.iter().copied().collect(),
        });
    }
    let mut cov = &jac * &state.cov * jac.transpose() + model.q();
    symmetrize(&mut cov);
    Ok(StateEstimate { mean, cov })
}

/// `S = H·P·Hᵀ + R` with `H` evaluated at the belief mean.
pub fn innovation_covariance(state: &StateEstimate, model: &MeasurementModel) -> Matrix {
    let h = model.jacobian(&state.mean);
    let mut s = &h * &state.cov * h.transpose() + model.r();
    symmetrize(&mut s);
    s
}

/// Cholesky factor of `s`, rejecting matrices whose condition number leaves
/// no significant digits at double precision.
pub(crate) fn factor_spd(
    s: &Matrix,
    context: &'static str,
) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(context));
    }
    let eig = s.clone().symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo <= 0.0 || hi / lo > 1.0 / f64::EPSILON {
        return Err(Error::Singular(context));
    }
    s.clone().cholesky().ok_or(Error::Singular(context))
}

/// Corrects a predicted belief with measurement `z`.
///
/// Returns the posterior, the innovation `z − h(mean)` and the gain
/// `K = P·Hᵀ·S⁻¹`. The gain is obtained by a Cholesky solve on `S`.
pub fn update(
    state: &StateEstimate,
    model: &MeasurementModel,
    z: &Vector,
) -> Result<(StateEstimate, Vector, Matrix)> {
    check_dim(state.dim(), model.state_dim(), "update state")?;
    check_dim(z.len(), model.dim(), "measurement")?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "measurement",
            state: z.iter().copied().collect(),
        });
    }
    let h = model.jacobian(&state.mean);
    let predicted = model.h(&state.mean);
    check_dim(predicted.len(), model.dim(), "measurement function output")?;
    if predicted.iter().chain(h.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "measurement model",
            state: state.mean.iter().copied().collect(),
        });
    }
    let mut s = &h * &state.cov * h.transpose() + model.r();
    symmetrize(&mut s);
    let chol = factor_spd(&s, "innovation covariance")?;

    // S symmetric, so Kᵀ = S⁻¹·H·P.
    let gain = chol.solve(&(&h * &state.cov)).transpose();
    let innovation = z - predicted;
    let mean = &state.mean + &gain * &innovation;
    let n = state.dim();
    let mut cov = (Matrix::identity(n, n) - &gain * &h) * &state.cov;
    symmetrize(&mut cov);
    Ok((StateEstimate { mean, cov }, innovation, gain))
}

/// One filter step at time `t`. Always predicts; updates only when a
/// measurement is present, otherwise the posterior is the prediction.
pub fn step(
    state: &StateEstimate,
    config: &FilterConfig,
    z: Option<&Vector>,
    t: f64,
) -> Result<StepRecord> {
    let prior = predict(state, &config.process)?;
    match z {
        Some(z) => {
            let (posterior, innovation, gain) = update(&prior, &config.measurement, z)?;
            Ok(StepRecord {
                t,
                prior,
                posterior,
                innovation: Some(innovation),
                gain: Some(gain),
                updated: true,
            })
        }
        None => Ok(StepRecord {
            t,
            posterior: prior.clone(),
            prior,
            innovation: None,
            gain: None,
            updated: false,
        }),
    }
}

/// Filters a whole series, producing one record per sample.
pub fn run_filter(series: &TimedSeries, config: &FilterConfig) -> Result<Vec<StepRecord>> {
    series.check_monotonic()?;
    let mut records = Vec::with_capacity(series.len());
    let mut state = config.initial.clone();
    for (index, (t, z)) in series.samples.iter().enumerate() {
        let record = step(&state, config, z.as_ref(), *t).map_err(|e| Error::Step {
            index,
            source: Box::new(e),
        })?;
        state = record.posterior.clone();
        records.push(record);
    }
    Ok(records)
}

/// Central-difference Jacobian of `func` at `x`:
/// column `i` is `(func(x + eps·eᵢ) − func(x − eps·eᵢ)) / (2·eps)`.
pub fn numerical_jacobian<F>(func: F, x: &Vector, eps: f64) -> Result<Matrix>
where
    F: Fn(&Vector) -> Vector,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    let mut columns = Vec::with_capacity(x.len());
    let mut rows = None;
    for i in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[i] += eps;
        minus[i] -= eps;
        let (fp, fm) = (func(&plus), func(&minus));
        if fp.iter().chain(fm.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "numerical jacobian",
                state: x.iter().copied().collect(),
            });
        }
        let rows = *rows.get_or_insert(fp.len());
        check_dim(fp.len(), rows, "function output")?;
        check_dim(fm.len(), rows, "function output")?;
        columns.push((fp - fm) / (2.0 * eps));
    }
    Ok(Matrix::from_columns(&columns))
}
