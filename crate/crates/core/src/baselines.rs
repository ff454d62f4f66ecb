//! Simple moving average comparison filter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statespace::Vector;

pub const DEFAULT_WINDOW: usize = 5;

/// How the first `window − 1` outputs are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    /// Average over the available prefix.
    #[default]
    Partial,
    /// Emit nothing until the first full window at index `window − 1`.
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmaConfig {
    pub window: usize,
    pub edge_policy: EdgePolicy,
}

impl Default for SmaConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            edge_policy: EdgePolicy::Partial,
        }
    }
}

impl SmaConfig {
    pub fn with_window(window: usize) -> Self {
        Self {
            window,
            ..Self::default()
        }
    }
}

/// Trailing moving average over index windows `[t − w + 1, t]`.
///
/// Missing entries are excluded from both the sum and the count. When every
/// entry in a window is missing the previous output is carried forward
/// (`None` if there is none yet). Under [`EdgePolicy::Hold`] the first
/// `w − 1` outputs are `None`.
pub fn sma_filter(series: &[Option<Vector>], config: &SmaConfig) -> Result<Vec<Option<Vector>>> {
    let w = config.window;
    if w == 0 {
        return Err(Error::InvalidConfig("SMA window must be at least 1".into()));
    }
    if series.is_empty() {
        return Err(Error::InsufficientData("SMA input is empty".into()));
    }
    let m = match series.iter().flatten().next() {
        Some(v) => v.len(),
        None => return Ok(vec![None; series.len()]),
    };
    if let Some(bad) = series.iter().flatten().find(|v| v.len() != m) {
        return Err(Error::Dimension {
            context: "SMA input",
            expected: m.to_string(),
            actual: bad.len().to_string(),
        });
    }

    let mut sum = Vector::zeros(m);
    let mut count = 0usize;
    let mut last: Option<Vector> = None;
    let mut out = Vec::with_capacity(series.len());
    for (t, entry) in series.iter().enumerate() {
        if let Some(v) = entry {
            sum += v;
            count += 1;
        }
        if t >= w {
            if let Some(old) = &series[t - w] {
                sum -= old;
                count -= 1;
            }
        }
        if count > 0 {
            last = Some(&sum / count as f64);
        }
        let emit = match config.edge_policy {
            EdgePolicy::Partial => true,
            EdgePolicy::Hold => t + 1 >= w,
        };
        out.push(if emit { last.clone() } else { None });
    }
    Ok(out)
}

/// Fills missing entries by linear interpolation in time between the
/// neighbouring present entries. Leading and trailing gaps take the nearest
/// present value.
pub fn linear_fill(times: &[f64], series: &[Option<Vector>]) -> Result<Vec<Vector>> {
    if times.len() != series.len() {
        return Err(Error::Dimension {
            context: "linear fill",
            expected: times.len().to_string(),
            actual: series.len().to_string(),
        });
    }
    let present: Vec<usize> = (0..series.len()).filter(|&i| series[i].is_some()).collect();
    let (Some(&first), Some(&last)) = (present.first(), present.last()) else {
        return Err(Error::InsufficientData("no present values to interpolate".into()));
    };
    let mut out = Vec::with_capacity(series.len());
    let mut next_idx = 0usize;
    for i in 0..series.len() {
        if let Some(v) = &series[i] {
            out.push(v.clone());
            next_idx += 1;
            continue;
        }
        let value = if i < first {
            series[first].clone().unwrap()
        } else if i > last {
            series[last].clone().unwrap()
        } else {
            let (lo, hi) = (present[next_idx - 1], present[next_idx]);
            let a = series[lo].as_ref().unwrap();
            let b = series[hi].as_ref().unwrap();
            let frac = (times[i] - times[lo]) / (times[hi] - times[lo]);
            a + (b - a) * frac
        };
        out.push(value);
    }
    Ok(out)
}
