//! Regenerates the bundled gaze trace at `data/sample_gaze.csv`.
//!
//! 500 samples at 100 Hz on a 1920x1080 screen, seed 7: fixations with
//! jitter and drift, cosine-profile saccades and four blinks.
//!
//!     cargo run --example render_sample_trace [-- <output path>]

use std::path::PathBuf;

use gazekf::gazeio::{blink_count, emit_gaze_csv};
use gazekf::synthgen::{render_gaze_trace, GazeTraceConfig};

fn main() -> anyhow::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/sample_gaze.csv"));
    let trace = render_gaze_trace(&GazeTraceConfig::default())?;
    let mut buf = Vec::new();
    emit_gaze_csv(&trace, &mut buf)?;
    std::fs::write(&path, buf)?;
    println!(
        "wrote {} samples ({} blink) to {}",
        trace.len(),
        blink_count(&trace),
        path.display()
    );
    Ok(())
}
