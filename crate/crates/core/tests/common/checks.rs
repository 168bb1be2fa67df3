//! Property checks shared by the proptest suites and the acceptance run.
//!
//! Each returns `None` when the drawn case is outside the property's
//! domain, otherwise the verdict.

use super::*;
use ttc_core::regions::hitting_times;
use ttc_core::{build_trajectory, first_order_ttc, second_order_ttc, TrajectoryModel, TtcOutcome};

pub type Verdict = Option<Result<(), String>>;

fn verdict(ok: bool, msg: impl FnOnce() -> String) -> Verdict {
    Some(if ok { Ok(()) } else { Err(msg()) })
}

/// Central differences of position and velocity against the closed-form
/// velocity and acceleration.
pub fn finite_difference(s: &VehicleState, frac: f64) -> Verdict {
    let cfg = SearchConfig::default();
    let traj = build_trajectory(s, &cfg);
    let tau = frac * traj.t_travel();
    let h = 1e-4;
    if !(tau > h && tau + h < traj.t_travel()) {
        return None;
    }
    // stay clear of the stop, where the velocity has a kink
    if let TrajectoryModel::Circular(c) = traj {
        if c.clamped_rate(tau + h) == 0.0 {
            return None;
        }
    }
    let dp = (traj.position_after(tau + h) - traj.position_after(tau - h)) / (2.0 * h);
    let v = traj.velocity_after(tau);
    let dv = (traj.velocity_after(tau + h) - traj.velocity_after(tau - h)) / (2.0 * h);
    let a = traj.acceleration_after(tau);
    let ok = (dp - v).norm() <= 1e-6 * (1.0 + v.norm()) && (dv - a).norm() <= 1e-6 * (1.0 + a.norm());
    verdict(ok, || format!("at {tau}: dp {dp:?} v {v:?}, dv {dv:?} a {a:?}"))
}

/// A circular prediction stays on its circle, with speed `r |rate|`.
pub fn radius_preserved(s: &VehicleState, frac: f64) -> Verdict {
    let cfg = SearchConfig::default();
    let TrajectoryModel::Circular(c) = build_trajectory(s, &cfg) else { return None };
    let traj = TrajectoryModel::Circular(c);
    let tau = frac * c.t_travel;
    let d = (traj.position_after(tau) - c.c).norm();
    let speed = traj.velocity_after(tau).norm();
    let ok = (d - c.r).abs() <= 1e-9 * (1.0 + c.r) && (speed - c.r * c.angular_rate(tau).abs()).abs() <= 1e-9 * (1.0 + speed);
    verdict(ok, || format!("r {} distance {d} speed {speed}", c.r))
}

/// Outcomes agree when both are finite and close, or both are infinite.
pub fn same_outcome(a: TtcOutcome, b: TtcOutcome, tol: f64) -> bool {
    match (a.time(), b.time()) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * (1.0 + x.abs()),
        (None, None) => true,
        _ => false,
    }
}

pub fn rigid_first_order(si: &VehicleState, sj: &VehicleState, angle: f64, shift: Vec2) -> Verdict {
    let a = first_order_ttc(si, sj, PHI);
    let b = first_order_ttc(&rigid(si, angle, shift), &rigid(sj, angle, shift), PHI);
    verdict(same_outcome(a, b, 1e-9), || format!("{a:?} vs {b:?}"))
}

/// Only a tangential touch may flip between contact and no contact.
pub fn rigid_second_order(si: &VehicleState, sj: &VehicleState, angle: f64, shift: Vec2) -> Verdict {
    let cfg = SearchConfig::default();
    let a = second_order_ttc(si, sj, &cfg).unwrap().outcome;
    let b = second_order_ttc(&rigid(si, angle, shift), &rigid(sj, angle, shift), &cfg).unwrap().outcome;
    if same_outcome(a, b, 1e-6) {
        return Some(Ok(()));
    }
    let m = min_clearance(si, sj, &cfg, 1e-3);
    verdict(a.time().is_some() != b.time().is_some() && m.abs() < 1e-4, || {
        format!("{a:?} vs {b:?}, min clearance {m}")
    })
}

/// Adding a common velocity leaves the first-order TTC unchanged.
pub fn galilean(si: &VehicleState, sj: &VehicleState, w: Vec2) -> Verdict {
    let (mut bi, mut bj) = (*si, *sj);
    bi.v = bi.v + w;
    bj.v = bj.v + w;
    let a = first_order_ttc(si, sj, PHI);
    let b = first_order_ttc(&bi, &bj, PHI);
    verdict(same_outcome(a, b, 1e-9), || format!("{a:?} vs {b:?}"))
}

/// The rebuilt prediction is the same kind of path, still moving forward.
fn same_kind(old: &TrajectoryModel, new: &TrajectoryModel, delta: f64) -> bool {
    match (old, new) {
        (TrajectoryModel::Linear(_), TrajectoryModel::Linear(_)) => true,
        (TrajectoryModel::Circular(c), TrajectoryModel::Circular(_)) => c.angular_rate(delta) * c.omega0 > 0.0,
        _ => false,
    }
}

pub const TIME_SHIFT_TOL: f64 = 1e-5;

/// Re-estimating from the snapshot `frac * ttc` seconds later predicts the
/// same contact, shifted by the elapsed time.
pub fn time_shift(si: &VehicleState, sj: &VehicleState, frac: f64) -> Verdict {
    let cfg = SearchConfig::default();
    let t = second_order_ttc(si, sj, &cfg).unwrap().outcome.time()?;
    let ti = build_trajectory(si, &cfg);
    let tj = build_trajectory(sj, &cfg);
    let delta = frac * t;
    // the later snapshot must still be inside both domains, and rebuilding
    // with the remaining horizon must cover the predicted contact
    if !(delta < ti.t_travel() && delta < tj.t_travel()) {
        return None;
    }
    let later = cfg.with_horizon(cfg.horizon - delta);
    let (ni, nj) = (ti.state_after(delta), tj.state_after(delta));
    let ri = build_trajectory(&ni, &later);
    let rj = build_trajectory(&nj, &later);
    if t - delta > ri.t_travel().min(rj.t_travel()) {
        return None;
    }
    // near the point where a turn's rate crosses zero the snapshot is
    // nearly at rest and is reclassified as a straight line
    if !(same_kind(&ti, &ri, delta) && same_kind(&tj, &rj, delta)) {
        return None;
    }
    let shifted = second_order_ttc(&ni, &nj, &later).unwrap().outcome;
    Some(match shifted.time() {
        None => Err(format!("contact at {t} lost after shifting by {delta}")),
        Some(t2) if (t2 - (t - delta)).abs() > TIME_SHIFT_TOL => Err(format!("t {t} delta {delta} got {t2}")),
        Some(_) => Ok(()),
    })
}

/// The entry time is the first moment the path reaches the region
/// boundary, and the path stays inside until the exit.
pub fn entry_boundary(s: &VehicleState, frac: f64, radius: f64) -> Verdict {
    let cfg = SearchConfig { region_radius: radius, ..SearchConfig::default() };
    let traj = build_trajectory(s, &cfg);
    let horizon = traj.t_travel();
    let tq = frac * horizon;
    let q = traj.position_after(tq);
    let (Some(enter), Some(exit)) = hitting_times(&traj, q, &cfg, horizon) else {
        return Some(Err(format!("point reached at {tq} has no window")));
    };
    // first visit: a later return to q is not part of the window
    if enter > tq + 1e-9 {
        return Some(Err(format!("entry {enter} after the point is reached at {tq}")));
    }
    let dist = |tau: f64| (traj.position_after(tau) - q).norm();
    let tol = 1e-6 * (1.0 + radius);
    if dist(0.0) <= radius {
        if enter != 0.0 {
            return Some(Err(format!("starts inside but entry is {enter}")));
        }
    } else if (dist(enter) - radius).abs() > tol {
        return Some(Err(format!("entry distance {} for radius {radius}", dist(enter))));
    }
    if exit < horizon && (dist(exit) - radius).abs() > tol {
        return Some(Err(format!("exit distance {} for radius {radius}", dist(exit))));
    }
    for k in 0..200 {
        let f = k as f64 / 200.0;
        if enter > 0.0 && dist(enter * f) < radius - 1e-9 {
            return Some(Err(format!("inside at {} before entry {enter}", enter * f)));
        }
        let inside = enter + (exit - enter) * f;
        if dist(inside) > radius + 1e-6 {
            return Some(Err(format!("outside at {inside} within [{enter}, {exit}]")));
        }
    }
    Some(Ok(()))
}
