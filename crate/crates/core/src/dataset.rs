//! Recorded trajectories: CSV ingestion, acceleration estimation and the
//! per-pair TTC pipeline.
//!
//! Files use the header `vehicle_id,t,x,y,vx,vy`, one sample per line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{SearchConfig, VehicleState};
use crate::scenarios::{ground_truth, ttc_pair, Scenario, TtcRow, TtcSeries};
use crate::ttc_first::TtcOutcome;
use crate::vec2::Vec2;

/// Allowed deviation between consecutive timesteps, and between matching
/// timestamps of two vehicles (s).
pub const TIME_TOL: f64 = 1e-6;

const COLUMNS: [&str; 6] = ["vehicle_id", "t", "x", "y", "vx", "vy"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("vehicle {vehicle_id}: non-uniform timestep at t = {t}")]
    NonUniformTimestep { vehicle_id: String, t: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("the two vehicles share no timestamps")]
    NoTemporalOverlap,
    #[error(transparent)]
    Search(#[from] crate::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub vehicle_id: String,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl TrajectorySample {
    pub fn position(&self) -> Vec2<f64> {
        Vec2::new(self.x, self.y)
    }

    pub fn velocity(&self) -> Vec2<f64> {
        Vec2::new(self.vx, self.vy)
    }
}

pub type Trajectories = BTreeMap<String, Vec<TrajectorySample>>;

/// Loads a trajectory file, grouping samples by vehicle and sorting each
/// group by time.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Trajectories, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    read_csv(file).map_err(|e| match e {
        DatasetError::Csv(err) if err.is_io_error() => match err.into_kind() {
            csv::ErrorKind::Io(source) => DatasetError::Io { path: path.to_path_buf(), source },
            _ => unreachable!(),
        },
        other => other,
    })
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<R: Read>(input: R) -> Result<Trajectories, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let mut index = [0usize; 6];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))?;
    }

    let mut out = Trajectories::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DatasetError::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| {
            let raw = &record[index[k]];
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::Parse { line, message: format!("bad {} value `{raw}`", COLUMNS[k]) })
        };
        let sample = TrajectorySample {
            vehicle_id: record[index[0]].to_string(),
            t: field(1)?,
            x: field(2)?,
            y: field(3)?,
            vx: field(4)?,
            vy: field(5)?,
        };
        out.entry(sample.vehicle_id.clone()).or_default().push(sample);
    }

    for (id, samples) in out.iter_mut() {
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        check_uniform(id, samples)?;
    }
    Ok(out)
}

fn check_uniform(id: &str, samples: &[TrajectorySample]) -> Result<(), DatasetError> {
    let Some(step) = samples.get(1).map(|s| s.t - samples[0].t) else {
        return Ok(());
    };
    for w in samples.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 || (dt - step).abs() > TIME_TOL {
            return Err(DatasetError::NonUniformTimestep { vehicle_id: id.to_string(), t: w[1].t });
        }
    }
    Ok(())
}

/// Writes samples in file order: vehicles by id, then by time. Values use
/// the shortest representation that parses back exactly.
pub fn write_samples<W: Write>(out: W, data: &Trajectories) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for s in data.values().flatten() {
        w.write_record([
            s.vehicle_id.clone(),
            s.t.to_string(),
            s.x.to_string(),
            s.y.to_string(),
            s.vx.to_string(),
            s.vy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Forward-difference acceleration `(v[k+1] - v[k]) / (t[k+1] - t[k])`.
/// The final sample repeats the last interval's value.
pub fn estimate_acceleration(samples: &[TrajectorySample]) -> Result<Vec<(f64, Vec2<f64>)>, DatasetError> {
    if samples.len() < 2 {
        return Err(DatasetError::TooFewSamples { needed: 2, got: samples.len() });
    }
    let mut out: Vec<(f64, Vec2<f64>)> = samples
        .windows(2)
        .map(|w| (w[0].t, (w[1].velocity() - w[0].velocity()) / (w[1].t - w[0].t)))
        .collect();
    let last = out[out.len() - 1].1;
    out.push((samples[samples.len() - 1].t, last));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAnalysis {
    pub series: TtcSeries,
    pub count_below_critical_1d: usize,
    pub count_below_critical_2d: usize,
    pub critical: f64,
}

/// Number of finite values strictly below `critical`.
pub fn count_below(values: impl IntoIterator<Item = TtcOutcome<f64>>, critical: f64) -> usize {
    values.into_iter().filter(|o| o.time().is_some_and(|t| t < critical)).count()
}

/// Both TTC measures at every timestamp the two vehicles share.
pub fn analyze_pair(
    samples_i: &[TrajectorySample],
    samples_j: &[TrajectorySample],
    cfg: &SearchConfig<f64>,
    critical: f64,
) -> Result<PairAnalysis, DatasetError> {
    let acc_i = estimate_acceleration(samples_i)?;
    let acc_j = estimate_acceleration(samples_j)?;

    let mut shared = Vec::new();
    let (mut a, mut b) = (0, 0);
    while a < samples_i.len() && b < samples_j.len() {
        let (ti, tj) = (samples_i[a].t, samples_j[b].t);
        if (ti - tj).abs() <= TIME_TOL {
            shared.push((a, b));
            a += 1;
            b += 1;
        } else if ti < tj {
            a += 1;
        } else {
            b += 1;
        }
    }
    if shared.is_empty() {
        return Err(DatasetError::NoTemporalOverlap);
    }

    let rows = shared
        .par_iter()
        .map(|&(a, b)| {
            let (si, sj) = (&samples_i[a], &samples_j[b]);
            let t = si.t;
            let vi = VehicleState::new(si.position(), si.velocity(), acc_i[a].1, t)?;
            let vj = VehicleState::new(sj.position(), sj.velocity(), acc_j[b].1, t)?;
            let (ttc1, ttc2) = ttc_pair(&vi, &vj, cfg)?;
            Ok(TtcRow { t, ttc1, ttc2 })
        })
        .collect::<Result<Vec<_>, crate::Error>>()?;

    Ok(PairAnalysis {
        count_below_critical_1d: count_below(rows.iter().map(|r| r.ttc1), critical),
        count_below_critical_2d: count_below(rows.iter().map(|r| r.ttc2), critical),
        series: TtcSeries { rows },
        critical,
    })
}

/// Ground-truth motion of a scenario as trajectory samples, with vehicle
/// ids `i` and `j`.
pub fn scenario_samples(sc: &Scenario, cfg: &SearchConfig<f64>) -> Trajectories {
    let mut out = Trajectories::new();
    for (t, si, sj) in ground_truth(sc, cfg) {
        for (id, s) in [("i", si), ("j", sj)] {
            out.entry(id.to_string()).or_default().push(TrajectorySample {
                vehicle_id: id.to_string(),
                t,
                x: s.p.x,
                y: s.p.y,
                vx: s.v.x,
                vy: s.v.y,
            });
        }
    }
    out
}
