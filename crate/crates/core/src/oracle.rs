//! Fixed-step reference simulation.
//!
//! Samples the closed-form clearance on a uniform time grid and reports the
//! first grid time at which the vehicles touch. Deliberately naive: it is the
//! baseline the search is measured against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{build_trajectory, SearchConfig, VehicleState};
use crate::regions::effective_horizon;
use crate::scalar::Scalar;
use crate::ttc_first::TtcOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig<T> {
    pub dt: T,
    pub phi: T,
    pub horizon: T,
    /// Same classification cutoff the search uses, so both see one model.
    pub lateral_threshold: T,
}

impl<T: Scalar> OracleConfig<T> {
    pub fn new(dt: T, phi: T, horizon: T) -> Self {
        Self { dt, phi, horizon, lateral_threshold: T::lit(1e-3) }
    }

    /// Oracle matching the model parameters of `cfg`.
    pub fn matching(cfg: &SearchConfig<T>, dt: T) -> Self {
        Self { dt, phi: cfg.phi, horizon: cfg.horizon, lateral_threshold: cfg.lateral_threshold }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.dt <= self.horizon) {
            return Err(Error::InvalidConfig(format!("dt ({}) exceeds horizon ({})", self.dt, self.horizon)));
        }
        if !(self.phi > T::zero()) {
            return Err(Error::InvalidConfig(format!("phi must be > 0, got {}", self.phi)));
        }
        Ok(())
    }
}

/// First grid time `k dt` with `d <= phi`, scanning up to the searchable
/// horizon.
pub fn simulate_ttc<T: Scalar>(state_i: &VehicleState<T>, state_j: &VehicleState<T>, ocfg: &OracleConfig<T>) -> Result<TtcOutcome<T>> {
    ocfg.validate()?;
    let cfg = SearchConfig {
        phi: ocfg.phi,
        horizon: ocfg.horizon,
        lateral_threshold: ocfg.lateral_threshold,
        ..SearchConfig::default()
    };
    let ti = build_trajectory(state_i, &cfg);
    let tj = build_trajectory(state_j, &cfg);
    let limit = effective_horizon(&ti, &tj, &cfg);
    let steps = (limit / ocfg.dt).floor().to_u64().unwrap_or(0);
    let phi_sq = ocfg.phi * ocfg.phi;
    for k in 0..=steps {
        let t = T::lit(k as f64) * ocfg.dt;
        let d = ti.position_after(t) - tj.position_after(t);
        if d.norm_sq() <= phi_sq {
            return Ok(TtcOutcome::Collision { t });
        }
    }
    Ok(TtcOutcome::NoCollision)
}
