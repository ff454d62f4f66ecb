//! Grid search for the synthetic-experiment process noise scale.
//!
//! Scores each candidate by mean EKF RMSE (position + velocity) over seeds
//! 1000..1100 at the default synthetic configuration. The seeds are disjoint
//! from the ones used by the acceptance suite.
//!
//!     cargo run --release --example tune_q

use gazekf::experiment::{ExperimentConfig, Mode};
use gazekf::sweep::{ordering_sweep, Execution};

fn main() -> gazekf::Result<()> {
    let grid = [1e-4, 3e-4, 1e-3, 3e-3, 5e-3, 1e-2, 2e-2, 3e-2, 1e-1, 3e-1];
    let mut best = (f64::INFINITY, 0.0);
    println!("{:>10} {:>10} {:>10} {:>10}", "q_scale", "pos", "vel", "sum");
    for q in grid {
        let mut config = ExperimentConfig::defaults(Mode::Synth);
        config.filter.q_scale = q;
        let trials = ordering_sweep(Execution::default(), &config, 1000..1100, &[])?;
        let n = trials.len() as f64;
        let pos = trials.iter().map(|t| t.ekf[0]).sum::<f64>() / n;
        let vel = trials.iter().map(|t| t.ekf[1]).sum::<f64>() / n;
        println!("{q:>10.0e} {pos:>10.4} {vel:>10.4} {:>10.4}", pos + vel);
        if pos + vel < best.0 {
            best = (pos + vel, q);
        }
    }
    println!("best q_scale = {}", best.1);
    Ok(())
}
