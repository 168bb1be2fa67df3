//! Scripted two-vehicle encounters and the rolling TTC series computed
//! along them.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::format_sig;
use crate::kinematics::{build_trajectory, SearchConfig, TrajectoryModel, VehicleState};
use crate::star::second_order_ttc;
use crate::ttc_first::{first_order_ttc, TtcOutcome};
use crate::vec2::Vec2;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0}; built-in scenarios are 1 to 5")]
    UnknownScenario(u32),
    #[error(transparent)]
    Search(#[from] crate::Error),
    #[error("writing series: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: u32,
    pub state_i: VehicleState<f64>,
    pub state_j: VehicleState<f64>,
    /// Length of the simulated run (s).
    pub sim_duration: f64,
    /// Spacing of the TTC evaluations (s).
    pub step: f64,
    /// Search horizon used for every TTC evaluation (s).
    pub prediction_horizon: f64,
}

fn vehicle(p: (f64, f64), v: (f64, f64), a: (f64, f64)) -> VehicleState<f64> {
    VehicleState { p: p.into(), v: v.into(), a: a.into(), t0: 0.0 }
}

/// The five built-in encounters.
///
/// 1. Both vehicles turn left past each other.
/// 2. A slow vehicle crosses the path of one turning right.
/// 3. A left turn meets a vehicle turning across its path.
/// 4. A vehicle accelerating along a street meets one turning left into it.
/// 5. Same initial conditions as 4.
pub fn builtin(id: u32) -> Result<Scenario, ScenarioError> {
    let (state_i, state_j) = match id {
        1 => (vehicle((-1.5, 20.0), (0.0, -1.0), (0.1, -0.1)), vehicle((1.5, 0.0), (0.0, 1.0), (-0.1, 0.1))),
        2 => (vehicle((10.0, 0.0), (0.1, 0.0), (0.0, 0.0)), vehicle((0.0, -10.0), (0.0, 1.0), (0.1, -0.1))),
        3 => (vehicle((10.0, 10.0), (-1.0, 0.0), (-0.1, -0.1)), vehicle((0.0, 0.0), (0.0, 1.0), (-0.1, 0.1))),
        4 | 5 => (vehicle((-15.0, 5.0), (1.0, 0.0), (0.1, 0.0)), vehicle((0.0, 0.0), (0.0, 1.0), (-0.1, 0.1))),
        other => return Err(ScenarioError::UnknownScenario(other)),
    };
    Ok(Scenario { id, state_i, state_j, sim_duration: 10.0, step: 0.1, prediction_horizon: 20.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtcRow {
    pub t: f64,
    pub ttc1: TtcOutcome<f64>,
    pub ttc2: TtcOutcome<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TtcSeries {
    pub rows: Vec<TtcRow>,
}

impl TtcSeries {
    /// Writes `t,ttc1,ttc2` rows with 9 significant digits and `inf` for no
    /// collision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "ttc1", "ttc2"])?;
        for row in &self.rows {
            w.write_record([
                format_sig(row.t, 9),
                format_sig(row.ttc1.or_infinity(), 9),
                format_sig(row.ttc2.or_infinity(), 9),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Motion that a vehicle actually follows: its predicted maneuver, held at
/// the end point once the prediction runs out.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruth {
    model: TrajectoryModel<f64>,
}

impl GroundTruth {
    /// Ground truth covering at least `duration` seconds.
    pub fn new(state: &VehicleState<f64>, cfg: &SearchConfig<f64>, duration: f64) -> Self {
        let cfg = cfg.with_horizon(cfg.horizon.max(duration));
        Self { model: build_trajectory(state, &cfg) }
    }

    /// State `tau` seconds after the start.
    pub fn state_after(&self, tau: f64) -> VehicleState<f64> {
        let end = self.model.t_travel();
        if tau <= end {
            return self.model.state_after(tau);
        }
        let p = self.model.position_after(end);
        VehicleState { p, v: Vec2::zero(), a: Vec2::zero(), t0: self.model.t0() + tau }
    }
}

/// Evaluation times `0, step, ..., duration`.
pub fn time_grid(duration: f64, step: f64) -> Vec<f64> {
    let n = (duration / step).round() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

/// Ground-truth states of both vehicles at every evaluation time.
pub fn ground_truth(sc: &Scenario, cfg: &SearchConfig<f64>) -> Vec<(f64, VehicleState<f64>, VehicleState<f64>)> {
    let gi = GroundTruth::new(&sc.state_i, cfg, sc.sim_duration);
    let gj = GroundTruth::new(&sc.state_j, cfg, sc.sim_duration);
    time_grid(sc.sim_duration, sc.step)
        .into_iter()
        .map(|t| (t, gi.state_after(t), gj.state_after(t)))
        .collect()
}

/// Both TTC measures at one snapshot, with the search horizon taken from
/// `cfg`.
pub fn ttc_pair(
    state_i: &VehicleState<f64>,
    state_j: &VehicleState<f64>,
    cfg: &SearchConfig<f64>,
) -> Result<(TtcOutcome<f64>, TtcOutcome<f64>), crate::Error> {
    let ttc1 = first_order_ttc(state_i, state_j, cfg.phi);
    let ttc2 = second_order_ttc(state_i, state_j, cfg)?.outcome;
    Ok((ttc1, ttc2))
}

/// Rolling TTC series: at each step the vehicles' current states feed both
/// measures, predicting `prediction_horizon` seconds ahead.
pub fn run_series(sc: &Scenario, cfg: &SearchConfig<f64>) -> Result<TtcSeries, ScenarioError> {
    let search = cfg.with_horizon(sc.prediction_horizon);
    let rows = ground_truth(sc, cfg)
        .into_iter()
        .map(|(t, si, sj)| {
            let (ttc1, ttc2) = ttc_pair(&si, &sj, &search)?;
            Ok(TtcRow { t, ttc1, ttc2 })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    Ok(TtcSeries { rows })
}
