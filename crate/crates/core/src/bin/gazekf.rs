use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use gazekf::experiment::{
    experiment_gaze, experiment_synth, format_rmse_table, jacobian_check, write_gaze_outputs,
    write_synth_outputs, ExperimentConfig, Mode, JACOBIAN_REL_TOL,
};
use gazekf::Error;

#[derive(Parser)]
#[command(name = "gazekf", version, about = "EKF smoothing of noisy gaze traces with an SMA baseline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter a synthetic sine/cosine trace and score EKF and SMA against truth.
    Synth {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        sigma_pos: Option<f64>,
        #[arg(long)]
        sigma_vel: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Filter a `t,x,y[,blink]` gaze CSV per axis.
    Gaze {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare analytic Jacobians of the built-in models with central differences.
    JacobianCheck {
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    q_scale: Option<f64>,
    #[arg(long)]
    r_scale: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// Leading samples excluded from RMSE.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Output directory for tables, summary and resolved config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config; CLI flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self, mode: Mode, apply: impl FnOnce(&mut ExperimentConfig)) -> Result<ExperimentConfig, Error> {
        let mut config = ExperimentConfig::defaults(mode);
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let patch: Value = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
            if let Some(m) = patch.get("mode") {
                let wanted = serde_json::to_value(mode).expect("mode serializes");
                if m != &wanted {
                    return Err(Error::InvalidConfig(format!(
                        "config mode {m} does not match subcommand {wanted}"
                    )));
                }
            }
            config = config.merge_json(&patch)?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(q) = self.q_scale {
            config.filter.q_scale = q;
        }
        if let Some(r) = self.r_scale {
            config.filter.r_scale = r;
        }
        if let Some(w) = self.window {
            config.sma.window = w;
        }
        if let Some(b) = self.burn_in {
            config.burn_in = b;
        }
        if let Some(out) = &self.out {
            config.output_path = Some(out.clone());
        }
        apply(&mut config);
        config.resolve()
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Synth {
            n,
            dt,
            sigma_pos,
            sigma_vel,
            common,
        } => {
            let config = common.resolve(Mode::Synth, |c| {
                let synth = c.synth.get_or_insert_with(Default::default);
                if let Some(n) = n {
                    synth.n = n;
                }
                if let Some(dt) = dt {
                    synth.dt = dt;
                }
                if let Some(s) = sigma_pos {
                    synth.sigma_pos = s;
                }
                if let Some(s) = sigma_vel {
                    synth.sigma_vel = s;
                }
            })?;
            let outcome = experiment_synth(&config)?;
            if let Some(dir) = &config.output_path {
                write_synth_outputs(&outcome, &config, dir)?;
            }
            println!("reference = truth");
            print!(
                "{}",
                format_rmse_table(&[("ekf", &outcome.ekf_rmse), ("sma", &outcome.sma_rmse)])
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Gaze { input, common } => {
            let config = common.resolve(Mode::Gaze, |c| {
                if let Some(p) = input {
                    c.input_path = Some(p);
                }
            })?;
            let outcome = experiment_gaze(&config)?;
            if let Some(dir) = &config.output_path {
                write_gaze_outputs(&outcome, &config, dir)?;
            }
            println!("reference = raw (not ground truth)");
            println!("samples {}  blinks {}  dt {}", outcome.samples, outcome.blinks, outcome.dt);
            for axis in &outcome.axes {
                println!("axis {}  prediction-only steps {}", axis.axis.label(), axis.prediction_only);
                print!(
                    "{}",
                    format_rmse_table(&[("ekf", &axis.ekf_rmse), ("sma", &axis.sma_rmse)])
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::JacobianCheck { points, seed } => {
            let checks = jacobian_check(points, seed)?;
            let mut ok = true;
            println!("{:<36}{:>8}{:>16}  result", "model", "points", "max rel err");
            for c in &checks {
                ok &= c.passed;
                println!(
                    "{:<36}{:>8}{:>16.3e}  {}",
                    c.model,
                    c.points,
                    c.max_rel_error,
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
            if !ok {
                eprintln!("jacobian-check: analytic Jacobian differs by more than {JACOBIAN_REL_TOL:e}");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
