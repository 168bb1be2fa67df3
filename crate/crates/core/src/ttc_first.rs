//! First-order time-to-collision under constant-velocity prediction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kinematics::VehicleState;
use crate::roots::quadratic;
use crate::scalar::Scalar;

/// Result of a TTC computation; times are durations after the common `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TtcOutcome<T> {
    Collision { t: T },
    NoCollision,
}

impl<T: Scalar> TtcOutcome<T> {
    pub fn time(&self) -> Option<T> {
        match *self {
            Self::Collision { t } => Some(t),
            Self::NoCollision => None,
        }
    }

    pub fn is_collision(&self) -> bool {
        matches!(self, Self::Collision { .. })
    }

    /// The collision time, or `+inf`.
    pub fn or_infinity(&self) -> T {
        self.time().unwrap_or_else(T::infinity)
    }
}

impl<T: Scalar> fmt::Display for TtcOutcome<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Collision { t } => write!(f, "{t}"),
            Self::NoCollision => f.write_str("inf"),
        }
    }
}

/// Earliest `t >= 0` at which the straight-line extrapolations come within
/// `phi` of each other.
pub fn first_order_ttc<T: Scalar>(state_i: &VehicleState<T>, state_j: &VehicleState<T>, phi: T) -> TtcOutcome<T> {
    let dp = state_i.p - state_j.p;
    let dv = state_i.v - state_j.v;
    let dist_sq = dp.norm_sq();
    if dist_sq <= phi * phi {
        return TtcOutcome::Collision { t: T::zero() };
    }
    let speed_sq = dv.norm_sq();
    if speed_sq < T::lit(1e-18) {
        return TtcOutcome::NoCollision;
    }
    let b = dp.dot(dv);
    let z = b * b - speed_sq * (dist_sq - phi * phi);
    if z < T::zero() {
        return TtcOutcome::NoCollision;
    }
    if z == T::zero() {
        let t = -b / speed_sq;
        return if t >= T::zero() { TtcOutcome::Collision { t } } else { TtcOutcome::NoCollision };
    }
    // |dp + dv t|^2 = phi^2
    let roots = quadratic(speed_sq, T::lit(2.0) * b, dist_sq - phi * phi);
    match roots.smallest_positive() {
        Some(t) => TtcOutcome::Collision { t },
        None => TtcOutcome::NoCollision,
    }
}
