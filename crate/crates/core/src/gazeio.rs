//! Gaze trace ingestion.
//!
//! Input schema is `t,x,y[,blink]` with a header row. Blank or `nan`
//! coordinates, or `blink = 1`, mark a blink sample.

use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statespace::Vector;

/// One row of a gaze trace. `x` and `y` are both `None` exactly when
/// `blink` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeSample {
    pub t: f64,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub blink: bool,
}

impl GazeSample {
    pub fn fixation(t: f64, x: f64, y: f64) -> Self {
        Self {
            t,
            x: Some(x),
            y: Some(y),
            blink: false,
        }
    }

    pub fn blink(t: f64) -> Self {
        Self {
            t,
            x: None,
            y: None,
            blink: true,
        }
    }

    pub fn coord(&self, axis: Axis) -> Option<f64> {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Ordered measurement stream. A `None` measurement is a dropout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimedSeries {
    pub samples: Vec<(f64, Option<Vector>)>,
    pub channel_names: Vec<String>,
}

impl TimedSeries {
    pub fn new(samples: Vec<(f64, Option<Vector>)>, channel_names: Vec<String>) -> Result<Self> {
        let series = Self {
            samples,
            channel_names,
        };
        series.check_monotonic()?;
        let m = series.channel_names.len();
        for (_, z) in &series.samples {
            if let Some(z) = z {
                if z.len() != m {
                    return Err(Error::Dimension {
                        context: "series measurement",
                        expected: m.to_string(),
                        actual: z.len().to_string(),
                    });
                }
            }
        }
        Ok(series)
    }

    /// Builds a series from parallel time and measurement slices.
    pub fn from_parts(
        times: &[f64],
        values: &[Option<Vector>],
        channel_names: &[&str],
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension {
                context: "series parts",
                expected: times.len().to_string(),
                actual: values.len().to_string(),
            });
        }
        Self::new(
            times.iter().copied().zip(values.iter().cloned()).collect(),
            channel_names.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.samples.iter().filter(|(_, z)| z.is_none()).count()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }

    pub fn measurements(&self) -> Vec<Option<Vector>> {
        self.samples.iter().map(|(_, z)| z.clone()).collect()
    }

    pub fn check_monotonic(&self) -> Result<()> {
        for (index, pair) in self.samples.windows(2).enumerate() {
            let (prev, next) = (pair[0].0, pair[1].0);
            if next.partial_cmp(&prev) != Some(Ordering::Greater) {
                return Err(Error::NonMonotonic {
                    index: index + 1,
                    prev,
                    next,
                });
            }
        }
        Ok(())
    }
}

fn parse_coord(field: &str, line: u64, name: &str) -> Result<Option<f64>> {
    if field.is_empty() || field.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(Error::Parse {
            line,
            message: format!("non-numeric {name} value {field:?}"),
        }),
    }
}

/// Parses a `t,x,y[,blink]` gaze CSV. Errors carry 1-based line numbers.
pub fn ingest_gaze_csv<R: Read>(source: R) -> Result<Vec<GazeSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(&e))?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header `t,x,y[,blink]`".into(),
            })
        }
    };
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    let has_blink = match names.as_slice() {
        [t, x, y] if t == "t" && x == "x" && y == "y" => false,
        [t, x, y, b] if t == "t" && x == "x" && y == "y" && b == "blink" => true,
        _ => {
            return Err(Error::Parse {
                line: header.position().map_or(1, |p| p.line()),
                message: format!("expected header `t,x,y[,blink]`, found `{}`", names.join(",")),
            })
        }
    };
    let width = if has_blink { 4 } else { 3 };

    let mut samples: Vec<GazeSample> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width && !(has_blink && rec.len() == 3) {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let t = rec[0]
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("non-numeric timestamp {:?}", &rec[0]),
            })?;
        if let Some(prev) = samples.last() {
            if t.partial_cmp(&prev.t) != Some(Ordering::Greater) {
                return Err(Error::Parse {
                    line,
                    message: format!("timestamp {t} does not increase (previous {})", prev.t),
                });
            }
        }
        let x = parse_coord(&rec[1], line, "x")?;
        let y = parse_coord(&rec[2], line, "y")?;
        let flagged = match rec.get(3).unwrap_or("") {
            "" | "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("blink flag must be 0 or 1, found {other:?}"),
                })
            }
        };
        samples.push(match (x, y, flagged) {
            (Some(x), Some(y), false) => GazeSample::fixation(t, x, y),
            _ => GazeSample::blink(t),
        });
    }
    Ok(samples)
}

fn csv_error(e: &csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Writes samples in the `t,x,y,blink` schema accepted by [`ingest_gaze_csv`].
pub fn emit_gaze_csv<W: Write>(samples: &[GazeSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,x,y,blink")?;
    for s in samples {
        match (s.x, s.y) {
            (Some(x), Some(y)) if !s.blink => writeln!(out, "{},{},{},0", s.t, x, y)?,
            _ => writeln!(out, "{},,,1", s.t)?,
        }
    }
    Ok(())
}

/// Converts one axis of a gaze trace into `[position, velocity]`
/// measurements. Velocity is the backward difference to the most recent
/// non-blink sample; the first non-blink sample gets velocity 0.
pub fn to_per_axis_series(samples: &[GazeSample], axis: Axis) -> Result<TimedSeries> {
    let usable = samples.iter().filter(|s| s.coord(axis).is_some()).count();
    if usable < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 non-blink samples, found {usable}"
        )));
    }
    let mut last: Option<(f64, f64)> = None;
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let z = match s.coord(axis) {
            Some(pos) if !s.blink => {
                let vel = match last {
                    Some((t0, p0)) => (pos - p0) / (s.t - t0),
                    None => 0.0,
                };
                last = Some((s.t, pos));
                Some(Vector::from_vec(vec![pos, vel]))
            }
            _ => None,
        };
        out.push((s.t, z));
    }
    let label = axis.label();
    TimedSeries::new(out, vec![format!("{label}_pos"), format!("{label}_vel")])
}

pub fn blink_count(samples: &[GazeSample]) -> usize {
    samples.iter().filter(|s| s.blink).count()
}
