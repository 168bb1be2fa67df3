//! Second-order time-to-collision by region-gated search.
//!
//! Candidate points are ranked by the earliest time either vehicle reaches
//! them. Each candidate defines a search interval (the overlap of both
//! vehicles' occupancy windows) that is integrated with an adaptive
//! Dormand–Prince scheme. Within every accepted step the clearance is
//! scanned by conservative advancement: with `A` bounding the relative
//! acceleration, `d(t + s) >= d + d' s - A s^2 / 2`, so stepping by the
//! largest `s` keeping that bound above `phi` never jumps over a contact.
//!
//! Candidates are not independent (windows of nearby points overlap), so the
//! earliest contact over all candidates is reported rather than the first
//! one encountered. Candidates whose windows open after the best contact
//! found so far are skipped.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{dopri5, Control, Dopri5Options};
use crate::intersections::{candidate_points, CandidateKind};
use crate::kinematics::{build_trajectory, CircularPath, SearchConfig, TrajectoryModel, VehicleState};
use crate::regions::{assemble_candidates, effective_horizon, CollisionCandidate};
use crate::roots::quadratic;
use crate::scalar::Scalar;
use crate::ttc_first::TtcOutcome;
use crate::vec2::Vec2;

/// Time span searched for one candidate, relative to `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchInterval<T> {
    pub start: T,
    pub end: T,
    pub candidate: CollisionCandidate<T>,
}

/// Point at which a candidate search stopped because the vehicles were
/// separating and provably could not touch before `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyExit<T> {
    pub at: T,
    pub end: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport<T> {
    pub outcome: TtcOutcome<T>,
    pub candidates_examined: usize,
    pub integrator_steps: usize,
    /// Seconds spent in [`second_order_ttc`].
    pub wall_time: f64,
    pub early_exits: Vec<EarlyExit<T>>,
}

/// Outcome of searching one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSearch<T> {
    pub event: Option<T>,
    pub steps: usize,
    pub early_exit: Option<EarlyExit<T>>,
}

/// Overlap of the two occupancy windows, if any.
pub fn search_interval<T: Scalar>(candidate: &CollisionCandidate<T>) -> Option<SearchInterval<T>> {
    let start = candidate.enter_i?.max(candidate.enter_j?);
    let end = candidate.exit_i?.min(candidate.exit_j?);
    (start <= end).then_some(SearchInterval { start, end, candidate: *candidate })
}

struct Pair<'a, T> {
    ti: &'a TrajectoryModel<T>,
    tj: &'a TrajectoryModel<T>,
    phi: T,
}

impl<T: Scalar> Pair<'_, T> {
    fn gap(&self, tau: T) -> T {
        (self.ti.position_after(tau) - self.tj.position_after(tau)).norm() - self.phi
    }

    /// Clearance `d - phi` and its rate of change.
    fn clearance(&self, tau: T) -> (T, T) {
        let dp = self.ti.position_after(tau) - self.tj.position_after(tau);
        let dv = self.ti.velocity_after(tau) - self.tj.velocity_after(tau);
        let d = dp.norm();
        let rate = if d > T::zero() { dp.dot(dv) / d } else { T::zero() };
        (d - self.phi, rate)
    }

    fn accel_bound(&self, a: T, b: T) -> T {
        self.ti.acceleration_bound(a, b) + self.tj.acceleration_bound(a, b)
    }

    /// Largest `s` for which `g + rate s - accel s^2 / 2 > 0` holds on `[0, s)`.
    fn safe_step(g: T, rate: T, accel: T) -> T {
        let root = (rate * rate + T::lit(2.0) * accel * g).sqrt();
        if rate < T::zero() {
            T::lit(2.0) * g / (root - rate)
        } else if accel > T::zero() {
            (rate + root) / accel
        } else {
            T::infinity()
        }
    }

    /// First contact in `[lo, hi]`, given no contact before `lo`.
    fn scan(&self, lo: T, hi: T, refine_tol: T) -> Option<T> {
        let mut t = lo;
        loop {
            let (g, rate) = self.clearance(t);
            if g <= T::zero() {
                return Some(t);
            }
            if t >= hi {
                return None;
            }
            let s = Self::safe_step(g, rate, self.accel_bound(t, hi));
            if s >= hi - t {
                return None;
            }
            if s >= refine_tol {
                t = t + s;
                continue;
            }
            // the bound has nearly closed: look just ahead for the crossing
            let probe = (t + refine_tol).min(hi);
            if self.gap(probe) <= T::zero() {
                return Some(self.bisect(t, probe, refine_tol));
            }
            t = probe;
        }
    }

    /// Shrinks `[lo, hi]` with `gap(lo) > 0 >= gap(hi)` to width `tol`;
    /// returns the right end, where contact holds.
    fn bisect(&self, mut lo: T, mut hi: T, tol: T) -> T {
        while hi - lo > tol {
            let mid = lo + (hi - lo) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.gap(mid) <= T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

enum Stop<T> {
    Contact(T),
    Separating(T),
}

fn integrator_options<T: Scalar>(cfg: &SearchConfig<T>, len: T) -> Dopri5Options<T> {
    let first = T::lit(0.1).min(len / T::lit(10.0)).max(T::lit(1e-9));
    Dopri5Options::new(cfg.integrator_rel_tol, cfg.integrator_abs_tol, first)
}

fn positions<T: Scalar>(ti: &TrajectoryModel<T>, tj: &TrajectoryModel<T>, tau: T) -> [T; 4] {
    let (a, b) = (ti.position_after(tau), tj.position_after(tau));
    [a.x, a.y, b.x, b.y]
}

fn velocities<T: Scalar>(ti: &TrajectoryModel<T>, tj: &TrajectoryModel<T>, tau: T) -> [T; 4] {
    let (a, b) = (ti.velocity_after(tau), tj.velocity_after(tau));
    [a.x, a.y, b.x, b.y]
}

/// Searches `interval` for the first time the centres come within `phi`.
///
/// Positions of both vehicles are integrated from their velocities; after
/// each accepted step the closed-form clearance over that step is scanned
/// and any crossing is refined by bisection to `cfg.refine_tol`. The search
/// stops early once the vehicles separate and the acceleration bound rules
/// out a later contact within the interval.
pub fn integrate_with_event<T: Scalar>(
    traj_i: &TrajectoryModel<T>,
    traj_j: &TrajectoryModel<T>,
    interval: &SearchInterval<T>,
    cfg: &SearchConfig<T>,
) -> Result<EventSearch<T>> {
    let pair = Pair { ti: traj_i, tj: traj_j, phi: cfg.phi };
    let (a, b) = (interval.start, interval.end);
    let none = EventSearch { event: None, steps: 0, early_exit: None };
    if pair.gap(a) <= T::zero() {
        return Ok(EventSearch { event: Some(a), ..none });
    }
    if b <= a {
        return Ok(none);
    }
    let opts = integrator_options(cfg, b - a);
    // integrating displacements from the interval start keeps the state small,
    // so the absolute tolerance governs the error rather than the position scale
    let run = dopri5(
        |t, _: &[T; 4]| velocities(traj_i, traj_j, t),
        a,
        [T::zero(); 4],
        b,
        &opts,
        |t0, t1, _| {
            if let Some(t) = pair.scan(t0, t1, cfg.refine_tol) {
                return Control::Stop(Stop::Contact(t));
            }
            if t1 < b {
                let (g, rate) = pair.clearance(t1);
                let rest = b - t1;
                let accel = pair.accel_bound(t1, b);
                if rate >= T::zero() && g + rate * rest - T::lit(0.5) * accel * rest * rest > T::zero() {
                    return Control::Stop(Stop::Separating(t1));
                }
            }
            Control::Continue
        },
    )?;
    let steps = run.accepted;
    Ok(match run.stopped {
        Some(Stop::Contact(t)) => EventSearch { event: Some(t), steps, early_exit: None },
        Some(Stop::Separating(at)) => EventSearch { event: None, steps, early_exit: Some(EarlyExit { at, end: b }) },
        None => EventSearch { event: None, steps, early_exit: None },
    })
}

/// Integrated positions `[x_i, y_i, x_j, y_j]` after every accepted step over
/// `[start, end]`, without event detection.
pub fn integration_trace<T: Scalar>(
    traj_i: &TrajectoryModel<T>,
    traj_j: &TrajectoryModel<T>,
    start: T,
    end: T,
    cfg: &SearchConfig<T>,
) -> Result<Vec<(T, [T; 4])>> {
    let mut trace = Vec::new();
    let base = positions(traj_i, traj_j, start);
    dopri5(
        |t, _: &[T; 4]| velocities(traj_i, traj_j, t),
        start,
        [T::zero(); 4],
        end,
        &integrator_options(cfg, end - start),
        |_, t, y| {
            trace.push((t, std::array::from_fn(|k| base[k] + y[k])));
            Control::<()>::Continue
        },
    )?;
    Ok(trace)
}

/// Second-order TTC of a vehicle pair sharing the snapshot time `t0`.
pub fn second_order_ttc<T: Scalar>(
    state_i: &VehicleState<T>,
    state_j: &VehicleState<T>,
    cfg: &SearchConfig<T>,
) -> Result<StarReport<T>> {
    let clock = Instant::now();
    cfg.validate()?;
    state_i.validate()?;
    state_j.validate()?;
    let t0_tol = T::lit(1e-9) * (T::one() + state_i.t0.abs());
    if (state_i.t0 - state_j.t0).abs() > t0_tol {
        return Err(Error::StartTimeMismatch(state_i.t0.to_f64_lossy(), state_j.t0.to_f64_lossy()));
    }
    let mut report = StarReport {
        outcome: TtcOutcome::NoCollision,
        candidates_examined: 0,
        integrator_steps: 0,
        wall_time: 0.0,
        early_exits: Vec::new(),
    };
    let finish = |mut r: StarReport<T>| {
        r.wall_time = clock.elapsed().as_secs_f64();
        Ok(r)
    };
    if (state_i.p - state_j.p).norm() <= cfg.phi {
        report.outcome = TtcOutcome::Collision { t: T::zero() };
        return finish(report);
    }
    let ti = build_trajectory(state_i, cfg);
    let tj = build_trajectory(state_j, cfg);
    let horizon = effective_horizon(&ti, &tj, cfg);
    if horizon <= T::zero() {
        return finish(report);
    }
    let points = match candidate_points(&ti, &tj, cfg.phi) {
        Ok(p) => p,
        // neither vehicle moves and they do not overlap
        Err(Error::BothStationary) => return finish(report),
        Err(e) => return Err(e),
    };
    if points.iter().any(|p| p.kind == CandidateKind::CoincidentGeometry) {
        report.candidates_examined = 1;
        if let Some(t) = coincident_chase(&ti, &tj, cfg.phi, horizon) {
            report.outcome = TtcOutcome::Collision { t };
        }
        return finish(report);
    }

    let candidates = assemble_candidates(&ti, &tj, &points, cfg);
    let mut best = T::infinity();
    for cand in &candidates {
        if cand.sort_key >= best {
            break;
        }
        report.candidates_examined += 1;
        let Some(mut interval) = search_interval(cand) else { continue };
        if interval.start >= best {
            continue;
        }
        interval.end = interval.end.min(best);
        let found = integrate_with_event(&ti, &tj, &interval, cfg)?;
        report.integrator_steps += found.steps;
        report.early_exits.extend(found.early_exit);
        if let Some(t) = found.event {
            best = best.min(t);
        }
    }
    if best.is_finite() {
        report.outcome = TtcOutcome::Collision { t: best };
    }
    finish(report)
}

/// Contact time for two vehicles on the same circle or the same line, where
/// the separation along the path is a quadratic in time.
fn coincident_chase<T: Scalar>(ti: &TrajectoryModel<T>, tj: &TrajectoryModel<T>, phi: T, horizon: T) -> Option<T> {
    match (ti, tj) {
        (TrajectoryModel::Circular(a), TrajectoryModel::Circular(b)) => circle_chase(a, b, phi, horizon),
        (TrajectoryModel::Linear(a), TrajectoryModel::Linear(b)) => {
            let e = a.direction()?;
            let h = (b.p0 - a.p0).cross(e);
            let w_sq = phi * phi - h * h;
            if w_sq < T::zero() {
                return None;
            }
            let w = w_sq.sqrt();
            let x0 = (a.p0 - b.p0).dot(e);
            let x1 = (a.v0 - b.v0).dot(e);
            let x2 = T::lit(0.5) * (a.a0 - b.a0).dot(e);
            first_level_crossing(x2, x1, x0, &[w, -w], horizon)
        }
        _ => None,
    }
}

fn circle_chase<T: Scalar>(a: &CircularPath<T>, b: &CircularPath<T>, phi: T, horizon: T) -> Option<T> {
    let r = (a.r + b.r) * T::lit(0.5);
    let ratio = phi / (T::lit(2.0) * r);
    if ratio >= T::one() {
        return Some(T::zero());
    }
    // contact when the angular separation is within beta of a multiple of 2 pi
    let beta = T::lit(2.0) * ratio.asin();
    let ua = a.p0 - a.c;
    let ub = b.p0 - b.c;
    let d0 = ub.cross(ua).atan2(ub.dot(ua));
    let d1 = a.omega0 - b.omega0;
    let d2 = (a.a_f - b.a_f) / (T::lit(2.0) * r);
    let eval = |t: T| d0 + d1 * t + d2 * t * t;
    let mut lo = eval(T::zero()).min(eval(horizon));
    let mut hi = eval(T::zero()).max(eval(horizon));
    if d2 != T::zero() {
        let vertex = -d1 / (T::lit(2.0) * d2);
        if vertex > T::zero() && vertex < horizon {
            lo = lo.min(eval(vertex));
            hi = hi.max(eval(vertex));
        }
    }
    let tau = T::TAU();
    let k_lo = ((lo - beta) / tau).floor().to_i64()? - 1;
    let k_hi = ((hi + beta) / tau).ceil().to_i64()? + 1;
    let mut levels = Vec::new();
    for k in k_lo..=k_hi {
        let base = tau * T::lit(k as f64);
        levels.push(base + beta);
        levels.push(base - beta);
    }
    first_level_crossing(d2, d1, d0, &levels, horizon)
}

/// Smallest `t` in `(0, horizon]` with `c2 t^2 + c1 t + c0` equal to one of
/// `levels`.
fn first_level_crossing<T: Scalar>(c2: T, c1: T, c0: T, levels: &[T], horizon: T) -> Option<T> {
    levels
        .iter()
        .flat_map(|&l| {
            let roots = quadratic(c2, c1, c0 - l);
            roots.as_slice().to_vec()
        })
        .filter(|&t| t > T::zero() && t <= horizon)
        .fold(None, |acc: Option<T>, t| Some(acc.map_or(t, |a| a.min(t))))
}

/// Closed-form clearance `|p_i - p_j| - phi` at `tau` after `t0`.
pub fn clearance_at<T: Scalar>(traj_i: &TrajectoryModel<T>, traj_j: &TrajectoryModel<T>, phi: T, tau: T) -> T {
    let d: Vec2<T> = traj_i.position_after(tau) - traj_j.position_after(tau);
    d.norm() - phi
}
