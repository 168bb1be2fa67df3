//! Independent reference implementation used to check the library.
//!
//! Written straight from the motion equations with no shared code: the
//! circle is evaluated as `c + R(theta)(p - c)`, travel times are found by
//! scanning and bisection, and contact times by dense sampling.
#![allow(dead_code)]

pub mod checks;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
pub use ttc_core::{SearchConfig, Vec2, VehicleState};

pub const PHI: f64 = 5.0;

pub fn proptest_config(seed: u64) -> Config {
    Config {
        cases: 1000,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn state(p: (f64, f64), v: (f64, f64), a: (f64, f64)) -> VehicleState {
    VehicleState { p: Vec2::new(p.0, p.1), v: Vec2::new(v.0, v.1), a: Vec2::new(a.0, a.1), t0: 0.0 }
}

/// Random snapshot with the evaluation ranges: position in (-20, 20)^2,
/// velocity in (-1, 1)^2, acceleration in (-0.1, 0.1)^2.
pub fn arb_state() -> impl Strategy<Value = VehicleState> {
    (
        -20.0..20.0f64,
        -20.0..20.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -0.1..0.1f64,
        -0.1..0.1f64,
    )
        .prop_map(|(px, py, vx, vy, ax, ay)| state((px, py), (vx, vy), (ax, ay)))
}

/// Snapshot that is certainly turning: speed at least 0.2 and lateral
/// acceleration at least 0.01 in magnitude.
pub fn arb_turning_state() -> impl Strategy<Value = VehicleState> {
    (
        -20.0..20.0f64,
        -20.0..20.0f64,
        0.2..1.4f64,
        -std::f64::consts::PI..std::f64::consts::PI,
        -0.1..0.1f64,
        0.01..0.1f64,
        any::<bool>(),
    )
        .prop_map(|(px, py, speed, heading, a_f, a_s, left)| {
            let u = Vec2::from_angle(heading);
            let a_s = if left { a_s } else { -a_s };
            let a = u * a_f + u.perp() * a_s;
            state((px, py), (u.x * speed, u.y * speed), (a.x, a.y))
        })
}

#[derive(Debug, Clone, Copy)]
pub enum RefPath {
    Line { p: Vec2, dir: Vec2, speed: f64, accel: f64 },
    Arc { c: Vec2, u: Vec2, omega0: f64, k: f64 },
}

/// Reference prediction for one vehicle.
#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub path: RefPath,
    pub travel: f64,
}

impl Reference {
    pub fn new(s: &VehicleState, cfg: &SearchConfig) -> Self {
        let speed = s.v.norm();
        if speed == 0.0 {
            let accel = s.a.norm();
            let dir = if accel > 0.0 { s.a / accel } else { Vec2::new(1.0, 0.0) };
            return Self { path: RefPath::Line { p: s.p, dir, speed: 0.0, accel }, travel: cfg.horizon };
        }
        let dir = s.v / speed;
        let normal = Vec2::new(-dir.y, dir.x);
        let a_f = s.a.x * dir.x + s.a.y * dir.y;
        let a_s = s.a.x * normal.x + s.a.y * normal.y;
        if a_s.abs() < cfg.lateral_threshold {
            let travel = if a_f < 0.0 { (speed / -a_f).min(cfg.horizon) } else { cfg.horizon };
            return Self { path: RefPath::Line { p: s.p, dir, speed, accel: a_f }, travel };
        }
        let r = speed * speed / a_s.abs();
        let c = s.p + normal * (r * a_s.signum());
        let omega0 = a_s / speed;
        let path = RefPath::Arc { c, u: s.p - c, omega0, k: a_f / (2.0 * r) };
        let mut me = Self { path, travel: cfg.horizon };
        me.travel = me.scan_travel(cfg.horizon);
        me
    }

    fn theta(&self, tau: f64) -> f64 {
        match self.path {
            RefPath::Line { .. } => 0.0,
            RefPath::Arc { omega0, k, .. } => {
                let w = omega0 + k * tau;
                let w = if omega0 > 0.0 { w.max(0.0) } else { w.min(0.0) };
                w * tau
            }
        }
    }

    /// First time the swept angle reaches a full turn or the rotation stops.
    fn scan_travel(&self, horizon: f64) -> f64 {
        let RefPath::Arc { omega0, k, .. } = self.path else { return horizon };
        let stop = if k != 0.0 && omega0.signum() != k.signum() { -omega0 / k } else { f64::INFINITY };
        let full = |t: f64| self.theta(t).abs() >= std::f64::consts::TAU;
        let dt = 1e-3;
        let mut t = 0.0;
        while t < horizon && t < stop {
            if full(t + dt) {
                let (mut lo, mut hi) = (t, t + dt);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if full(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return hi.min(horizon).min(stop);
            }
            t += dt;
        }
        horizon.min(stop)
    }

    pub fn position(&self, tau: f64) -> Vec2 {
        match self.path {
            RefPath::Line { p, dir, speed, accel } => p + dir * (speed * tau + 0.5 * accel * tau * tau),
            RefPath::Arc { c, u, .. } => {
                let th = self.theta(tau);
                c + Vec2::new(th.cos() * u.x - th.sin() * u.y, th.sin() * u.x + th.cos() * u.y)
            }
        }
    }

    pub fn centre_radius(&self) -> Option<(Vec2, f64)> {
        match self.path {
            RefPath::Arc { c, u, .. } => Some((c, u.norm())),
            RefPath::Line { .. } => None,
        }
    }
}

/// Window searched for a pair: the shorter travel time, capped by the horizon.
pub fn window(ri: &Reference, rj: &Reference, cfg: &SearchConfig) -> f64 {
    ri.travel.min(rj.travel).min(cfg.horizon)
}

pub fn clearance(ri: &Reference, rj: &Reference, tau: f64) -> f64 {
    (ri.position(tau) - rj.position(tau)).norm() - PHI
}

/// First contact by dense sampling and bisection, or `None`.
pub fn brute_force_ttc(si: &VehicleState, sj: &VehicleState, cfg: &SearchConfig, dt: f64) -> Option<f64> {
    let ri = Reference::new(si, cfg);
    let rj = Reference::new(sj, cfg);
    let end = window(&ri, &rj, cfg);
    let phi = cfg.phi;
    let gap = |t: f64| (ri.position(t) - rj.position(t)).norm() - phi;
    if gap(0.0) <= 0.0 {
        return Some(0.0);
    }
    let n = (end / dt).ceil() as usize;
    let mut prev = 0.0;
    for k in 1..=n {
        let t = (k as f64 * dt).min(end);
        if gap(t) <= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev = t;
    }
    None
}

/// Smallest sampled clearance over the pair's window.
pub fn min_clearance(si: &VehicleState, sj: &VehicleState, cfg: &SearchConfig, dt: f64) -> f64 {
    let ri = Reference::new(si, cfg);
    let rj = Reference::new(sj, cfg);
    let end = window(&ri, &rj, cfg);
    let n = (end / dt).ceil() as usize;
    (0..=n)
        .map(|k| clearance(&ri, &rj, (k as f64 * dt).min(end)))
        .fold(f64::INFINITY, f64::min)
}

/// First-order contact time straight from the constant-velocity quadratic.
pub fn first_order_reference(si: &VehicleState, sj: &VehicleState, phi: f64) -> Option<f64> {
    let dp = si.p - sj.p;
    let dv = si.v - sj.v;
    let c = dp.norm_sq() - phi * phi;
    if c <= 0.0 {
        return Some(0.0);
    }
    let a = dv.norm_sq();
    let b = 2.0 * dp.dot(dv);
    let disc = b * b - 4.0 * a * c;
    if a == 0.0 || disc < 0.0 || b >= 0.0 {
        return None;
    }
    Some((-b - disc.sqrt()) / (2.0 * a))
}

/// Rotation by `angle` followed by translation by `shift`.
pub fn rigid(s: &VehicleState, angle: f64, shift: Vec2) -> VehicleState {
    VehicleState { p: s.p.rotated(angle) + shift, v: s.v.rotated(angle), a: s.a.rotated(angle), t0: s.t0 }
}

/// Turns a check verdict into a proptest result; out-of-domain cases pass.
pub fn prop_verdict(v: checks::Verdict) -> Result<(), TestCaseError> {
    match v {
        Some(Err(msg)) => Err(TestCaseError::fail(msg)),
        _ => Ok(()),
    }
}

/// Seeded draw with the evaluation ranges, for loops outside proptest.
pub fn random_state<R: rand::Rng>(rng: &mut R, p_range: f64) -> VehicleState {
    let mut c = |r: f64| rng.random_range(-r..r);
    state((c(p_range), c(p_range)), (c(1.0), c(1.0)), (c(0.1), c(0.1)))
}

/// Seeded draw of a snapshot that is certainly turning.
pub fn random_turning_state<R: rand::Rng>(rng: &mut R) -> VehicleState {
    let p = Vec2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
    let speed = rng.random_range(0.2..1.4);
    let u = Vec2::from_angle(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    let a_f = rng.random_range(-0.1..0.1);
    let a_s = rng.random_range(0.01..0.1) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let a = u * a_f + u.perp() * a_s;
    VehicleState { p, v: u * speed, a, t0: 0.0 }
}
