//! End-to-end experiments: synthetic oscillator and gaze traces, each
//! filtered by the EKF and the SMA baseline and scored by RMSE.
//!
//! All defaults for values the filter cannot infer (noise scales, window,
//! sample count, step, seed, initial belief) live in [`defaults`].

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::baselines::{sma_filter, SmaConfig};
use crate::ekf::{numerical_jacobian, run_filter, FilterConfig, StepRecord};
use crate::error::{Error, Result};
use crate::gazeio::{blink_count, ingest_gaze_csv, to_per_axis_series, Axis, TimedSeries};
use crate::metrics::{rmse, RmseReport};
use crate::numfmt::{sig, sig_opt};
use crate::statespace::{
    make_constant_velocity_model, make_identity_measurement, make_pendulum_model, Matrix,
    MeasurementModel, ProcessModel, Vector,
};
use crate::sweep::{map_items, Execution};
use crate::synthgen::{generate_synthetic, SynthConfig, SynthDataset};

/// Defaults for every quantity the model leaves open.
pub mod defaults {
    /// Synthetic runs: sample count.
    pub const SYNTH_N: usize = 100;
    /// Synthetic runs: time step in radians of the oscillator per sample.
    pub const SYNTH_DT: f64 = 0.1;
    /// Synthetic runs: measurement noise standard deviation per channel.
    pub const SYNTH_SIGMA: f64 = 0.1;
    /// Process noise scale for synthetic runs, picked by
    /// `cargo run --example tune_q` over seeds 1000..1100.
    pub const SYNTH_Q_SCALE: f64 = 0.01;
    /// Measurement noise scale for synthetic runs, `SYNTH_SIGMA²`.
    pub const SYNTH_R_SCALE: f64 = 0.01;
    /// Process noise scale for gaze traces (pixel units).
    pub const GAZE_Q_SCALE: f64 = 100.0;
    /// Measurement noise scale for gaze traces (pixel units).
    pub const GAZE_R_SCALE: f64 = 25.0;
    /// Initial covariance scale, `P0 = P0_SCALE · I`.
    pub const P0_SCALE: f64 = crate::ekf::DEFAULT_P0_SCALE;
    /// SMA window.
    pub const WINDOW: usize = crate::baselines::DEFAULT_WINDOW;
    /// Seed used when none is given.
    pub const SEED: u64 = 42;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Synth,
    Gaze,
}

/// Filter knobs. `x0`/`p0` override the first-measurement initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub q_scale: f64,
    pub r_scale: f64,
    pub p0_scale: f64,
    pub x0: Option<Vec<f64>>,
    pub p0: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub synth: Option<SynthConfig>,
    pub input_path: Option<PathBuf>,
    pub filter: FilterParams,
    pub sma: SmaConfig,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// Leading samples excluded from RMSE (counted as skipped).
    pub burn_in: usize,
}

impl ExperimentConfig {
    pub fn defaults(mode: Mode) -> Self {
        let (q_scale, r_scale) = match mode {
            Mode::Synth => (defaults::SYNTH_Q_SCALE, defaults::SYNTH_R_SCALE),
            Mode::Gaze => (defaults::GAZE_Q_SCALE, defaults::GAZE_R_SCALE),
        };
        Self {
            mode,
            synth: (mode == Mode::Synth).then_some(SynthConfig {
                n: defaults::SYNTH_N,
                dt: defaults::SYNTH_DT,
                sigma_pos: defaults::SYNTH_SIGMA,
                sigma_vel: defaults::SYNTH_SIGMA,
                seed: defaults::SEED,
            }),
            input_path: None,
            filter: FilterParams {
                q_scale,
                r_scale,
                p0_scale: defaults::P0_SCALE,
                x0: None,
                p0: None,
            },
            sma: SmaConfig::with_window(defaults::WINDOW),
            output_path: None,
            seed: defaults::SEED,
            burn_in: 0,
        }
    }

    /// Deep-merges a (possibly partial) JSON object over `self`.
    pub fn merge_json(&self, patch: &Value) -> Result<Self> {
        let mut base = serde_json::to_value(self)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        merge_values(&mut base, patch);
        serde_json::from_value(base).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Propagates the top-level seed into the synthetic config and checks
    /// mode consistency.
    pub fn resolve(mut self) -> Result<Self> {
        match self.mode {
            Mode::Synth => {
                if self.input_path.is_some() {
                    return Err(Error::InvalidConfig("synth mode takes no input path".into()));
                }
                let synth = self.synth.get_or_insert_with(SynthConfig::default);
                synth.seed = self.seed;
                synth.validate()?;
            }
            Mode::Gaze => {
                if self.synth.is_some() {
                    return Err(Error::InvalidConfig("gaze mode takes no synth block".into()));
                }
                match &self.input_path {
                    Some(p) if !p.as_os_str().is_empty() => {}
                    _ => return Err(Error::InvalidConfig("gaze mode requires --input".into())),
                }
            }
        }
        if self.sma.window == 0 {
            return Err(Error::InvalidConfig("SMA window must be at least 1".into()));
        }
        Ok(self)
    }

    pub(crate) fn filter_config(&self, series: &TimedSeries, dt: f64) -> Result<FilterConfig> {
        let process = make_constant_velocity_model(dt, self.filter.q_scale)?;
        let measurement = make_identity_measurement(2, self.filter.r_scale)?;
        let mut config = FilterConfig::from_first_measurement(
            series,
            process.clone(),
            measurement.clone(),
            self.filter.p0_scale,
        )?;
        if self.filter.x0.is_some() || self.filter.p0.is_some() {
            let x0 = match &self.filter.x0 {
                Some(x) => Vector::from_column_slice(x),
                None => config.initial.mean.clone(),
            };
            let p0 = match &self.filter.p0 {
                Some(rows) => matrix_from_rows(rows)?,
                None => config.initial.cov.clone(),
            };
            config = FilterConfig::new(x0, p0, process, measurement)?;
        }
        Ok(config)
    }
}

fn merge_values(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge_values(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidConfig("p0 must be square".into()));
    }
    Ok(Matrix::from_row_iterator(n, n, rows.iter().flatten().copied()))
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub t: f64,
    pub reference: Option<[f64; 2]>,
    pub measured: Option<[f64; 2]>,
    pub ekf: [f64; 2],
    pub sma: Option<[f64; 2]>,
    pub updated: bool,
}

pub const PLOT_HEADER: &str =
    "t,ref_pos,ref_vel,meas_pos,meas_vel,ekf_pos,ekf_vel,sma_pos,sma_vel,updated";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotTable {
    pub rows: Vec<PlotRow>,
}

fn pair(v: &Vector) -> [f64; 2] {
    [v[0], v[1]]
}

impl PlotTable {
    pub fn build(
        records: &[StepRecord],
        measurements: &[Option<Vector>],
        sma_output: &[Option<Vector>],
        reference: &[Option<Vector>],
    ) -> Result<Self> {
        let n = records.len();
        for (name, len) in [
            ("measurements", measurements.len()),
            ("sma output", sma_output.len()),
            ("reference", reference.len()),
        ] {
            if len != n {
                return Err(Error::Dimension {
                    context: "plot table",
                    expected: format!("{n} rows"),
                    actual: format!("{len} {name}"),
                });
            }
        }
        let rows = (0..n)
            .map(|k| PlotRow {
                t: records[k].t,
                reference: reference[k].as_ref().map(pair),
                measured: measurements[k].as_ref().map(pair),
                ekf: pair(&records[k].posterior.mean),
                sma: sma_output[k].as_ref().map(pair),
                updated: records[k].updated,
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{PLOT_HEADER}")?;
        for r in &self.rows {
            let [rp, rv] = r.reference.map_or([None, None], |[a, b]| [Some(a), Some(b)]);
            let [mp, mv] = r.measured.map_or([None, None], |[a, b]| [Some(a), Some(b)]);
            let [sp, sv] = r.sma.map_or([None, None], |[a, b]| [Some(a), Some(b)]);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                sig(r.t),
                sig_opt(rp),
                sig_opt(rv),
                sig_opt(mp),
                sig_opt(mv),
                sig(r.ekf[0]),
                sig(r.ekf[1]),
                sig_opt(sp),
                sig_opt(sv),
                u8::from(r.updated)
            )?;
        }
        Ok(())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_csv(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Builds the comparison table and writes it to `path`.
pub fn emit_plot_table(
    records: &[StepRecord],
    measurements: &[Option<Vector>],
    sma_output: &[Option<Vector>],
    reference: &[Option<Vector>],
    path: &Path,
) -> Result<PlotTable> {
    let table = PlotTable::build(records, measurements, sma_output, reference)?;
    table.write_to(path)?;
    Ok(table)
}

fn posterior_means(records: &[StepRecord]) -> Vec<Option<Vector>> {
    records.iter().map(|r| Some(r.posterior.mean.clone())).collect()
}

fn burned(reference: &[Option<Vector>], burn_in: usize) -> Vec<Option<Vector>> {
    reference
        .iter()
        .enumerate()
        .map(|(k, v)| if k < burn_in { None } else { v.clone() })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SynthOutcome {
    pub dataset: SynthDataset,
    pub records: Vec<StepRecord>,
    pub sma: Vec<Option<Vector>>,
    pub ekf_rmse: RmseReport,
    pub sma_rmse: RmseReport,
    pub table: PlotTable,
}

/// Generates the oscillator data, runs both filters and scores them against
/// the noiseless truth.
pub fn experiment_synth(config: &ExperimentConfig) -> Result<SynthOutcome> {
    if config.mode != Mode::Synth {
        return Err(Error::InvalidConfig("experiment_synth needs synth mode".into()));
    }
    let synth = config
        .synth
        .ok_or_else(|| Error::InvalidConfig("missing synth block".into()))?;
    let synth = SynthConfig {
        seed: config.seed,
        ..synth
    };
    let dataset = generate_synthetic(&synth)?;
    let series = dataset.measurement_series()?;
    let filter = config.filter_config(&series, synth.dt)?;
    let records = run_filter(&series, &filter)?;
    let measurements = series.measurements();
    let sma = sma_filter(&measurements, &config.sma)?;
    let truth = dataset.truth_options();
    let scored = burned(&truth, config.burn_in);
    let channels = ["pos", "vel"];
    let ekf_rmse = rmse(&scored, &posterior_means(&records), &channels)?;
    let sma_rmse = rmse(&scored, &sma, &channels)?;
    let table = PlotTable::build(&records, &measurements, &sma, &truth)?;
    Ok(SynthOutcome {
        dataset,
        records,
        sma,
        ekf_rmse,
        sma_rmse,
        table,
    })
}

#[derive(Debug, Clone)]
pub struct AxisOutcome {
    pub axis: Axis,
    pub series: TimedSeries,
    pub records: Vec<StepRecord>,
    pub sma: Vec<Option<Vector>>,
    pub ekf_rmse: RmseReport,
    pub sma_rmse: RmseReport,
    pub prediction_only: usize,
    pub table: PlotTable,
}

#[derive(Debug, Clone)]
pub struct GazeOutcome {
    pub samples: usize,
    pub blinks: usize,
    pub dt: f64,
    pub axes: Vec<AxisOutcome>,
}

impl GazeOutcome {
    pub fn summary_json(&self) -> Value {
        let axes: serde_json::Map<String, Value> = self
            .axes
            .iter()
            .map(|a| {
                (
                    a.axis.label().to_string(),
                    json!({
                        "prediction_only_steps": a.prediction_only,
                        "ekf_rmse": a.ekf_rmse.to_json(),
                        "sma_rmse": a.sma_rmse.to_json(),
                    }),
                )
            })
            .collect();
        json!({
            "reference": "raw",
            "samples": self.samples,
            "blinks": self.blinks,
            "dt": self.dt,
            "axes": axes,
        })
    }
}

/// Median positive spacing of the sample timestamps.
fn sample_interval(series: &TimedSeries) -> Result<f64> {
    let times = series.times();
    let mut diffs: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.is_empty() {
        return Err(Error::InsufficientData("need at least 2 samples".into()));
    }
    diffs.sort_by(f64::total_cmp);
    Ok(diffs[diffs.len() / 2])
}

/// Runs both filters on each axis of a gaze trace. RMSE is reported against
/// the raw measurements, which are the only reference a real trace has.
pub fn experiment_gaze(config: &ExperimentConfig) -> Result<GazeOutcome> {
    if config.mode != Mode::Gaze {
        return Err(Error::InvalidConfig("experiment_gaze needs gaze mode".into()));
    }
    let path = config
        .input_path
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("gaze mode requires an input path".into()))?;
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let samples = ingest_gaze_csv(std::io::BufReader::new(file))?;
    let blinks = blink_count(&samples);

    let mut prepared = Vec::new();
    for axis in [Axis::X, Axis::Y] {
        prepared.push((axis, to_per_axis_series(&samples, axis)?));
    }
    let dt = sample_interval(&prepared[0].1)?;

    let axes = map_items(Execution::default(), &prepared, |(axis, series)| {
        let filter = config.filter_config(series, dt)?;
        let records = run_filter(series, &filter)?;
        let measurements = series.measurements();
        let sma = sma_filter(&measurements, &config.sma)?;
        let label = axis.label();
        let channels = [format!("{label}_pos"), format!("{label}_vel")];
        let channels = [channels[0].as_str(), channels[1].as_str()];
        let scored = burned(&measurements, config.burn_in);
        let ekf_rmse = rmse(&scored, &posterior_means(&records), &channels)?;
        let sma_rmse = rmse(&scored, &sma, &channels)?;
        let table = PlotTable::build(&records, &measurements, &sma, &measurements)?;
        Ok(AxisOutcome {
            axis: *axis,
            prediction_only: records.iter().filter(|r| !r.updated).count(),
            series: series.clone(),
            records,
            sma,
            ekf_rmse,
            sma_rmse,
            table,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(GazeOutcome {
        samples: samples.len(),
        blinks,
        dt,
        axes,
    })
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `plot.csv`, `dataset.csv`, `summary.json` and
/// `resolved_config.json` into `dir`.
pub fn write_synth_outputs(outcome: &SynthOutcome, config: &ExperimentConfig, dir: &Path) -> Result<()> {
    prepare_dir(dir)?;
    outcome.table.write_to(&dir.join("plot.csv"))?;
    let path = dir.join("dataset.csv");
    let mut buf = Vec::new();
    outcome.dataset.write_csv(&mut buf).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    write_json(
        &dir.join("summary.json"),
        &json!({
            "reference": "truth",
            "ekf_rmse": outcome.ekf_rmse.to_json(),
            "sma_rmse": outcome.sma_rmse.to_json(),
        }),
    )?;
    write_config(config, dir)
}

/// Writes `plot_x.csv`, `plot_y.csv`, `summary.json` and
/// `resolved_config.json` into `dir`.
pub fn write_gaze_outputs(outcome: &GazeOutcome, config: &ExperimentConfig, dir: &Path) -> Result<()> {
    prepare_dir(dir)?;
    for axis in &outcome.axes {
        axis.table
            .write_to(&dir.join(format!("plot_{}.csv", axis.axis.label())))?;
    }
    write_json(&dir.join("summary.json"), &outcome.summary_json())?;
    write_config(config, dir)
}

fn write_config(config: &ExperimentConfig, dir: &Path) -> Result<()> {
    let value = serde_json::to_value(config).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    write_json(&dir.join("resolved_config.json"), &value)
}

/// Aligned text table of RMSE reports, one line per (filter, channel).
pub fn format_rmse_table(reports: &[(&str, &RmseReport)]) -> String {
    let mut out = format!("{:<8}{:<10}{:>14}{:>8}{:>8}\n", "filter", "channel", "rmse", "n", "skip");
    for (name, report) in reports {
        for (channel, value) in &report.per_channel {
            out.push_str(&format!(
                "{:<8}{:<10}{:>14.6}{:>8}{:>8}\n",
                name, channel, value, report.n_samples, report.skipped
            ));
        }
    }
    out
}

/// Result of comparing one model's analytic Jacobian with central
/// differences.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianCheck {
    pub model: String,
    pub points: usize,
    pub max_rel_error: f64,
    pub passed: bool,
}

pub const JACOBIAN_EPS: f64 = 1e-6;
pub const JACOBIAN_REL_TOL: f64 = 1e-5;

/// Elementwise `|a − n| / max(|a|, 1)`, maximised over entries.
fn rel_error(analytic: &Matrix, numeric: &Matrix) -> f64 {
    analytic
        .iter()
        .zip(numeric.iter())
        .map(|(a, n)| (a - n).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn check_model(
    name: String,
    dim: usize,
    f: impl Fn(&Vector) -> Vector,
    jac: impl Fn(&Vector) -> Matrix,
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<JacobianCheck> {
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let x = Vector::from_fn(dim, |_, _| rng.random_range(-10.0..=10.0));
        let numeric = numerical_jacobian(&f, &x, JACOBIAN_EPS)?;
        worst = worst.max(rel_error(&jac(&x), &numeric));
    }
    Ok(JacobianCheck {
        model: name,
        points,
        max_rel_error: worst,
        passed: worst <= JACOBIAN_REL_TOL,
    })
}

fn check_process(model: &ProcessModel, points: usize, rng: &mut ChaCha8Rng) -> Result<JacobianCheck> {
    check_model(
        format!("{} (dt={})", model.name(), model.dt()),
        model.dim(),
        |x| model.f(x),
        |x| model.jacobian(x),
        points,
        rng,
    )
}

fn check_measurement(
    model: &MeasurementModel,
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<JacobianCheck> {
    check_model(
        format!("{} measurement (m={})", model.name(), model.dim()),
        model.state_dim(),
        |x| model.h(x),
        |x| model.jacobian(x),
        points,
        rng,
    )
}

/// Checks every built-in model's analytic Jacobian at `points` states drawn
/// uniformly from `[-10, 10]ⁿ`.
pub fn jacobian_check(points: usize, seed: u64) -> Result<Vec<JacobianCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for dt in [1.0, 0.1] {
        out.push(check_process(&make_constant_velocity_model(dt, 0.0)?, points, &mut rng)?);
        out.push(check_process(&make_pendulum_model(dt, 0.0)?, points, &mut rng)?);
    }
    for m in [1, 2] {
        out.push(check_measurement(&make_identity_measurement(m, 1.0)?, points, &mut rng)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overrides_nested_fields_only() {
        let base = ExperimentConfig::defaults(Mode::Synth);
        let merged = base
            .merge_json(&json!({"sma": {"window": 9}, "synth": {"n": 7}, "seed": 5}))
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(merged.sma.window, 9);
        assert_eq!(merged.sma.edge_policy, base.sma.edge_policy);
        let synth = merged.synth.unwrap();
        assert_eq!((synth.n, synth.dt, synth.seed), (7, defaults::SYNTH_DT, 5));
        assert!(base.merge_json(&json!({"sma": {"window": "x"}})).is_err());
    }

    #[test]
    fn resolve_checks_mode() {
        assert!(ExperimentConfig::defaults(Mode::Gaze).resolve().is_err());
        let mut gaze = ExperimentConfig::defaults(Mode::Gaze);
        gaze.input_path = Some("trace.csv".into());
        assert!(gaze.clone().resolve().is_ok());
        gaze.synth = Some(SynthConfig::default());
        assert!(gaze.resolve().is_err());
    }

    #[test]
    fn synth_defaults_favor_ekf() {
        let config = ExperimentConfig::defaults(Mode::Synth).resolve().unwrap();
        let out = experiment_synth(&config).unwrap();
        for ch in ["pos", "vel"] {
            assert!(out.ekf_rmse.get(ch).unwrap() < out.sma_rmse.get(ch).unwrap(), "{ch}");
        }
        assert_eq!(out.table.rows.len(), defaults::SYNTH_N);
    }

    #[test]
    fn synth_noiseless_converges() {
        let mut config = ExperimentConfig::defaults(Mode::Synth);
        config.synth = Some(SynthConfig {
            sigma_pos: 0.0,
            sigma_vel: 0.0,
            ..config.synth.unwrap()
        });
        config.filter.r_scale = 1e-6;
        config.burn_in = 10;
        let out = experiment_synth(&config.resolve().unwrap()).unwrap();
        assert!(out.ekf_rmse.get("pos").unwrap() < 0.05);
        assert_eq!(out.ekf_rmse.skipped, 10);
    }

    #[test]
    fn synth_single_sample() {
        let mut config = ExperimentConfig::defaults(Mode::Synth);
        config.synth.as_mut().unwrap().n = 1;
        let out = experiment_synth(&config.resolve().unwrap()).unwrap();
        assert_eq!(out.ekf_rmse.n_samples, 1);
        assert_eq!(out.table.rows.len(), 1);
    }

    #[test]
    fn plot_table_rejects_misaligned_inputs() {
        let config = ExperimentConfig::defaults(Mode::Synth).resolve().unwrap();
        let out = experiment_synth(&config).unwrap();
        let short = &out.sma[..3];
        let meas = out.dataset.measurement_series().unwrap().measurements();
        assert!(PlotTable::build(&out.records, &meas, short, &out.dataset.truth_options()).is_err());
    }

    #[test]
    fn builtin_jacobians_pass() {
        for check in jacobian_check(100, 1).unwrap() {
            assert!(check.passed, "{check:?}");
        }
    }
}
