//! Seeded synthetic data.
//!
//! The oscillator dataset samples `[sin(t), cos(t)]` on a regular grid and
//! adds independent Gaussian noise per channel. Randomness comes from
//! `ChaCha8Rng::seed_from_u64(seed)`; Gaussian draws are `rand_distr`'s
//! ziggurat `StandardNormal`, drawn position-then-velocity for each sample.
//! Versions are pinned by `Cargo.lock`, so a seed reproduces the same bytes.
//!
//! The same module renders a gaze-like trace (fixations, saccades, blinks)
//! for end-to-end runs of the gaze pipeline.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gazeio::{GazeSample, TimedSeries};
use crate::numfmt::sig;
use crate::statespace::Vector;

pub const DATASET_HEADER: &str = "t,pos_true,vel_true,pos_meas,vel_meas";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub dt: f64,
    pub sigma_pos: f64,
    pub sigma_vel: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 100,
            dt: 0.1,
            sigma_pos: 0.1,
            sigma_vel: 0.1,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        for (name, s) in [("sigma_pos", self.sigma_pos), ("sigma_vel", self.sigma_vel)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be non-negative, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub times: Vec<f64>,
    pub truth: Vec<Vector>,
    pub noisy: Vec<Vector>,
}

impl SynthDataset {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Noisy samples as a fully-present `[pos, vel]` measurement series.
    pub fn measurement_series(&self) -> Result<TimedSeries> {
        let values: Vec<Option<Vector>> = self.noisy.iter().cloned().map(Some).collect();
        TimedSeries::from_parts(&self.times, &values, &["pos", "vel"])
    }

    pub fn truth_options(&self) -> Vec<Option<Vector>> {
        self.truth.iter().cloned().map(Some).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{DATASET_HEADER}")?;
        for k in 0..self.len() {
            let (tr, ns) = (&self.truth[k], &self.noisy[k]);
            writeln!(
                out,
                "{},{},{},{},{}",
                sig(self.times[k]),
                sig(tr[0]),
                sig(tr[1]),
                sig(ns[0]),
                sig(ns[1])
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(source: R) -> Result<Self> {
        let mut lines = source.lines();
        let header = lines.next().transpose().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if header.as_deref().map(str::trim) != Some(DATASET_HEADER) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{DATASET_HEADER}`"),
            });
        }
        let mut data = SynthDataset {
            times: Vec::new(),
            truth: Vec::new(),
            noisy: Vec::new(),
        };
        for (i, line) in lines.enumerate() {
            let line_no = i as u64 + 2;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .trim()
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 5 fields, found {}", fields.len()),
                });
            }
            data.times.push(fields[0]);
            data.truth.push(Vector::from_vec(vec![fields[1], fields[2]]));
            data.noisy.push(Vector::from_vec(vec![fields[3], fields[4]]));
        }
        Ok(data)
    }
}

pub fn generate_synthetic(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut data = SynthDataset {
        times: Vec::with_capacity(config.n),
        truth: Vec::with_capacity(config.n),
        noisy: Vec::with_capacity(config.n),
    };
    for k in 0..config.n {
        let t = k as f64 * config.dt;
        let truth = Vector::from_vec(vec![t.sin(), t.cos()]);
        let e_pos: f64 = rng.sample(StandardNormal);
        let e_vel: f64 = rng.sample(StandardNormal);
        let noisy = &truth + Vector::from_vec(vec![config.sigma_pos * e_pos, config.sigma_vel * e_vel]);
        data.times.push(t);
        data.truth.push(truth);
        data.noisy.push(noisy);
    }
    Ok(data)
}

/// Presence mask with `round(n·fraction / run_len)` dropout runs of exactly
/// `run_len` samples. Runs never touch each other and never cover index 0.
pub fn dropout_mask(n: usize, fraction: f64, run_len: usize, seed: u64) -> Result<Vec<bool>> {
    if run_len == 0 || !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(
            "dropout needs run_len ≥ 1 and fraction in [0, 1)".into(),
        ));
    }
    let runs = (n as f64 * fraction / run_len as f64).round() as usize;
    let mut mask = vec![true; n];
    if runs == 0 {
        return Ok(mask);
    }
    if n < run_len + 2 || runs * (run_len + 1) + 1 > n {
        return Err(Error::InvalidConfig(format!(
            "cannot place {runs} runs of {run_len} in {n} samples"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed = 0;
    let mut attempts = 0usize;
    while placed < runs {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidConfig("dropout placement did not converge".into()));
        }
        let start = rng.random_range(1..=n - run_len);
        let lo = start - 1;
        let hi = (start + run_len).min(n - 1);
        if mask[lo..=hi].iter().all(|&p| p) {
            mask[start..start + run_len].iter_mut().for_each(|p| *p = false);
            placed += 1;
        }
    }
    Ok(mask)
}

/// Parameters for [`render_gaze_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeTraceConfig {
    pub n: usize,
    pub rate_hz: f64,
    pub width: f64,
    pub height: f64,
    /// Fixational jitter standard deviation, pixels.
    pub jitter_px: f64,
    pub blinks: usize,
    pub seed: u64,
}

impl Default for GazeTraceConfig {
    fn default() -> Self {
        Self {
            n: 500,
            rate_hz: 100.0,
            width: 1920.0,
            height: 1080.0,
            jitter_px: 4.0,
            blinks: 4,
            seed: 7,
        }
    }
}

fn round_px(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Renders a gaze-like trace: fixations of 150–400 ms with jitter and slow
/// drift, 40–60 ms cosine-profile saccades between them, and `blinks`
/// non-overlapping blink runs of 6–12 samples.
pub fn render_gaze_trace(config: &GazeTraceConfig) -> Result<Vec<GazeSample>> {
    let n = config.n;
    if n < 40 || config.blinks * 14 + 20 > n || config.rate_hz.partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(Error::InvalidConfig("gaze trace too short for its blinks".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let margin = 0.1;
    let target = |rng: &mut ChaCha8Rng| {
        (
            config.width * rng.random_range(margin..1.0 - margin),
            config.height * rng.random_range(margin..1.0 - margin),
        )
    };
    let per_ms = config.rate_hz / 1000.0;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut here = target(&mut rng);
    while points.len() < n {
        let fix_len = ((rng.random_range(150.0..400.0) * per_ms) as usize).max(1);
        let (mut dx, mut dy) = (0.0, 0.0);
        for _ in 0..fix_len {
            dx += 0.3 * rng.sample::<f64, _>(StandardNormal);
            dy += 0.3 * rng.sample::<f64, _>(StandardNormal);
            let jx: f64 = rng.sample(StandardNormal);
            let jy: f64 = rng.sample(StandardNormal);
            points.push((
                here.0 + dx + config.jitter_px * jx,
                here.1 + dy + config.jitter_px * jy,
            ));
        }
        let start = (here.0 + dx, here.1 + dy);
        let next = target(&mut rng);
        let sac_len = ((rng.random_range(40.0..60.0) * per_ms) as usize).max(2);
        for k in 1..=sac_len {
            let s = 0.5 - 0.5 * (std::f64::consts::PI * k as f64 / sac_len as f64).cos();
            points.push((start.0 + (next.0 - start.0) * s, start.1 + (next.1 - start.1) * s));
        }
        here = next;
    }
    points.truncate(n);

    let mut blink = vec![false; n];
    let mut placed = 0;
    let mut attempts = 0;
    while placed < config.blinks {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidConfig("blink placement did not converge".into()));
        }
        let len = rng.random_range(6..=12usize);
        let start = rng.random_range(10..n - 10 - len);
        if blink[start - 2..start + len + 2].iter().all(|b| !b) {
            blink[start..start + len].iter_mut().for_each(|b| *b = true);
            placed += 1;
        }
    }

    Ok(points
        .into_iter()
        .zip(blink)
        .enumerate()
        .map(|(k, ((x, y), b))| {
            let t = k as f64 / config.rate_hz;
            if b {
                GazeSample::blink(t)
            } else {
                GazeSample::fixation(t, round_px(x), round_px(y))
            }
        })
        .collect())
}
