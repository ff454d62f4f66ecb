//! Per-channel RMSE and the normalized innovation squared (NIS) statistic.

use serde_json::{Map, Value};

use crate::ekf::{factor_spd, innovation_covariance, StepRecord};
use crate::error::{Error, Result};
use crate::statespace::{Matrix, MeasurementModel, Vector};

/// RMSE per channel over the indices where both series are present.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    pub per_channel: Vec<(String, f64)>,
    pub n_samples: usize,
    pub skipped: usize,
}

impl RmseReport {
    pub fn get(&self, channel: &str) -> Option<f64> {
        self.per_channel
            .iter()
            .find(|(name, _)| name == channel)
            .map(|(_, v)| *v)
    }

    fn sorted(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.per_channel.iter().map(|(n, x)| (n.as_str(), *x)).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Flat JSON object: one key per channel plus `n_samples` and `skipped`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (name, value) in &self.per_channel {
            map.insert(name.clone(), Value::from(*value));
        }
        map.insert("n_samples".into(), Value::from(self.n_samples));
        map.insert("skipped".into(), Value::from(self.skipped));
        Value::Object(map)
    }

    /// Column order: channel names sorted, then `n_samples`, `skipped`.
    pub fn csv_header(&self) -> String {
        let mut cols: Vec<&str> = self.sorted().into_iter().map(|(n, _)| n).collect();
        cols.extend(["n_samples", "skipped"]);
        cols.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let mut cols: Vec<String> = self.sorted().into_iter().map(|(_, v)| format!("{v}")).collect();
        cols.push(self.n_samples.to_string());
        cols.push(self.skipped.to_string());
        cols.join(",")
    }
}

/// `sqrt(mean((truth − estimate)²))` per channel, skipping indices where
/// either side is missing.
pub fn rmse(
    truth: &[Option<Vector>],
    estimate: &[Option<Vector>],
    channels: &[&str],
) -> Result<RmseReport> {
    if truth.len() != estimate.len() {
        return Err(Error::Dimension {
            context: "rmse inputs",
            expected: truth.len().to_string(),
            actual: estimate.len().to_string(),
        });
    }
    let m = channels.len();
    let mut sums = vec![0.0; m];
    let mut n = 0usize;
    for (a, b) in truth.iter().zip(estimate) {
        let (Some(a), Some(b)) = (a, b) else { continue };
        if a.len() != m || b.len() != m {
            return Err(Error::Dimension {
                context: "rmse sample",
                expected: m.to_string(),
                actual: format!("{} and {}", a.len(), b.len()),
            });
        }
        for (k, sum) in sums.iter_mut().enumerate() {
            let d = a[k] - b[k];
            *sum += d * d;
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::InsufficientData(
            "no index has both truth and estimate present".into(),
        ));
    }
    let per_channel = channels
        .iter()
        .zip(&sums)
        .map(|(name, s)| (name.to_string(), (s / n as f64).sqrt()))
        .collect();
    Ok(RmseReport {
        per_channel,
        n_samples: n,
        skipped: truth.len() - n,
    })
}

/// `νᵀ·S⁻¹·ν`.
pub fn normalized_innovation_squared(innovation: &Vector, s: &Matrix) -> Result<f64> {
    let chol = factor_spd(s, "innovation covariance")?;
    Ok(innovation.dot(&chol.solve(innovation)))
}

/// NIS for every updated step, with `S = H·P_prior·Hᵀ + R`.
pub fn nis(records: &[StepRecord], measurement: &MeasurementModel) -> Result<Vec<f64>> {
    records
        .iter()
        .filter(|r| r.updated)
        .map(|r| {
            let innovation = r
                .innovation
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("updated step without innovation".into()))?;
            let s = innovation_covariance(&r.prior, measurement);
            normalized_innovation_squared(innovation, &s)
        })
        .collect()
}
