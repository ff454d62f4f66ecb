//! Seed sweeps over independent filter runs.
//!
//! A single filter run is sequential; sweeps over seeds, windows and axes
//! are embarrassingly parallel. With the `parallel` feature (default) they
//! run on the rayon pool, otherwise [`Execution::Parallel`] falls back to a
//! plain loop. Results are returned in input order either way.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::baselines::{linear_fill, sma_filter, SmaConfig};
use crate::ekf::run_filter;
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, Mode};
use crate::gazeio::TimedSeries;
use crate::metrics::rmse;
use crate::statespace::Vector;
use crate::synthgen::{dropout_mask, generate_synthetic, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_items<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Maps `f` over a seed range, preserving order.
pub fn map_seeds<T, F>(exec: Execution, seeds: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => seeds.into_par_iter().map(f).collect(),
        _ => seeds.map(f).collect(),
    }
}

fn synth_of(config: &ExperimentConfig) -> Result<SynthConfig> {
    if config.mode != Mode::Synth {
        return Err(Error::InvalidConfig("sweeps need a synth config".into()));
    }
    config
        .synth
        .ok_or_else(|| Error::InvalidConfig("missing synth block".into()))
}

/// EKF and per-window SMA RMSE for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingTrial {
    pub seed: u64,
    pub ekf: [f64; 2],
    /// `(window, [pos, vel])` in the order the windows were given.
    pub sma: Vec<(usize, [f64; 2])>,
}

impl OrderingTrial {
    /// EKF strictly better than the SMA on both channels at every window.
    pub fn ekf_wins_everywhere(&self) -> bool {
        self.sma
            .iter()
            .all(|(_, s)| self.ekf[0] < s[0] && self.ekf[1] < s[1])
    }
}

pub fn ordering_trial(config: &ExperimentConfig, seed: u64, windows: &[usize]) -> Result<OrderingTrial> {
    let synth = SynthConfig {
        seed,
        ..synth_of(config)?
    };
    let data = generate_synthetic(&synth)?;
    let series = data.measurement_series()?;
    let filter = config.filter_config(&series, synth.dt)?;
    let records = run_filter(&series, &filter)?;
    let truth = data.truth_options();
    let means: Vec<Option<Vector>> = records.iter().map(|r| Some(r.posterior.mean.clone())).collect();
    let ekf = rmse(&truth, &means, &["pos", "vel"])?;
    let measurements = series.measurements();
    let sma = windows
        .iter()
        .map(|&w| {
            let out = sma_filter(&measurements, &SmaConfig { window: w, ..config.sma })?;
            let r = rmse(&truth, &out, &["pos", "vel"])?;
            Ok((w, [r.per_channel[0].1, r.per_channel[1].1]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderingTrial {
        seed,
        ekf: [ekf.per_channel[0].1, ekf.per_channel[1].1],
        sma,
    })
}

pub fn ordering_sweep(
    exec: Execution,
    config: &ExperimentConfig,
    seeds: Range<u64>,
    windows: &[usize],
) -> Result<Vec<OrderingTrial>> {
    map_seeds(exec, seeds, |seed| ordering_trial(config, seed, windows))
        .into_iter()
        .collect()
}

/// Dropout robustness for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BlinkTrial {
    pub seed: u64,
    pub dropped: usize,
    /// Every index has a posterior estimate.
    pub complete: bool,
    /// Covariance trace strictly increases through every dropout run.
    pub trace_grows: bool,
    pub ekf_pos_rmse: f64,
    /// Linear interpolation across gaps followed by the SMA.
    pub baseline_pos_rmse: f64,
}

/// Seed offset separating the dropout placement stream from the noise stream.
const DROPOUT_SEED_OFFSET: u64 = 0x5EED_0000;

pub fn blink_trial(
    config: &ExperimentConfig,
    seed: u64,
    fraction: f64,
    run_len: usize,
) -> Result<BlinkTrial> {
    let synth = SynthConfig {
        seed,
        ..synth_of(config)?
    };
    let data = generate_synthetic(&synth)?;
    let mask = dropout_mask(synth.n, fraction, run_len, seed.wrapping_add(DROPOUT_SEED_OFFSET))?;
    let values: Vec<Option<Vector>> = data
        .noisy
        .iter()
        .zip(&mask)
        .map(|(z, &keep)| keep.then(|| z.clone()))
        .collect();
    let series = TimedSeries::from_parts(&data.times, &values, &["pos", "vel"])?;
    let filter = config.filter_config(&series, synth.dt)?;
    let records = run_filter(&series, &filter)?;

    let complete = records.len() == synth.n
        && records
            .iter()
            .all(|r| r.posterior.mean.iter().all(|v| v.is_finite()));
    let mut trace_grows = true;
    for k in 1..records.len() {
        if !records[k].updated && records[k].posterior.trace() <= records[k - 1].posterior.trace() {
            trace_grows = false;
        }
    }

    let truth = data.truth_options();
    let means: Vec<Option<Vector>> = records.iter().map(|r| Some(r.posterior.mean.clone())).collect();
    let ekf = rmse(&truth, &means, &["pos", "vel"])?;
    let filled: Vec<Option<Vector>> = linear_fill(&data.times, &values)?.into_iter().map(Some).collect();
    let baseline = sma_filter(&filled, &config.sma)?;
    let base = rmse(&truth, &baseline, &["pos", "vel"])?;
    Ok(BlinkTrial {
        seed,
        dropped: mask.iter().filter(|p| !**p).count(),
        complete,
        trace_grows,
        ekf_pos_rmse: ekf.per_channel[0].1,
        baseline_pos_rmse: base.per_channel[0].1,
    })
}

pub fn blink_sweep(
    exec: Execution,
    config: &ExperimentConfig,
    seeds: Range<u64>,
    fraction: f64,
    run_len: usize,
) -> Result<Vec<BlinkTrial>> {
    map_seeds(exec, seeds, |seed| blink_trial(config, seed, fraction, run_len))
        .into_iter()
        .collect()
}
