//! Closed-form predicted trajectories built from a single vehicle snapshot.
//!
//! A vehicle whose lateral acceleration is negligible travels on a straight
//! line with constant longitudinal acceleration. Otherwise it follows a
//! circle whose radius is fixed by the initial speed and lateral
//! acceleration, with the angular displacement driven by the longitudinal
//! acceleration. The angular rate used for the position is clamped at zero so
//! the phase never changes sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::quadratic;
use crate::scalar::{sgn, Scalar};
use crate::vec2::Vec2;

/// Snapshot `(p, v, a)` of one vehicle at time `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState<T> {
    pub p: Vec2<T>,
    pub v: Vec2<T>,
    pub a: Vec2<T>,
    pub t0: T,
}

impl<T: Scalar> VehicleState<T> {
    pub fn new(p: Vec2<T>, v: Vec2<T>, a: Vec2<T>, t0: T) -> Result<Self> {
        let s = Self { p, v, a, t0 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() {
            return Err(Error::NonFinite("position"));
        }
        if !self.v.is_finite() {
            return Err(Error::NonFinite("velocity"));
        }
        if !self.a.is_finite() {
            return Err(Error::NonFinite("acceleration"));
        }
        if !self.t0.is_finite() {
            return Err(Error::NonFinite("start time"));
        }
        Ok(())
    }
}

/// Parameters shared by the search and the trajectory classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig<T> {
    /// Vehicle footprint diameter (m); contact when centres are within it.
    pub phi: T,
    /// Slack on the contact test `d <= phi + contact_tol` (m).
    pub contact_tol: T,
    /// Minimum half-width of the search region around a candidate point (m).
    pub region_radius: T,
    /// Search horizon (s).
    pub horizon: T,
    /// Lateral accelerations below this are treated as straight-line motion (m/s^2).
    pub lateral_threshold: T,
    pub integrator_rel_tol: T,
    /// Absolute position tolerance of the integrator (m).
    pub integrator_abs_tol: T,
    /// Width to which a collision time is refined (s).
    pub refine_tol: T,
}

impl<T: Scalar> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            phi: T::lit(5.0),
            contact_tol: T::tol(1e-6),
            region_radius: T::lit(10.0),
            horizon: T::lit(100.0),
            lateral_threshold: T::lit(1e-3),
            integrator_rel_tol: T::tol(1e-8),
            integrator_abs_tol: T::tol(1e-9),
            refine_tol: T::tol(1e-9),
        }
    }
}

impl<T: Scalar> SearchConfig<T> {
    /// Sets the footprint diameter and keeps the region radius at twice it.
    pub fn with_phi(mut self, phi: T) -> Self {
        self.phi = phi;
        self.region_radius = phi * T::lit(2.0);
        self
    }

    pub fn with_horizon(mut self, horizon: T) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("phi", self.phi),
            ("contact_tol", self.contact_tol),
            ("region_radius", self.region_radius),
            ("horizon", self.horizon),
            ("lateral_threshold", self.lateral_threshold),
            ("integrator_rel_tol", self.integrator_rel_tol),
            ("integrator_abs_tol", self.integrator_abs_tol),
            ("refine_tol", self.refine_tol),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > T::zero()) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if self.region_radius < self.phi {
            return Err(Error::InvalidConfig(format!(
                "region_radius ({}) must be >= phi ({})",
                self.region_radius, self.phi
            )));
        }
        Ok(())
    }
}

/// Longitudinal and lateral components `(a_f, a_s)` of the acceleration.
///
/// `a_s > 0` means the vehicle is turning left.
pub fn decompose_acceleration<T: Scalar>(state: &VehicleState<T>) -> Result<(T, T)> {
    let unit = state.v.normalized().ok_or(Error::ZeroVelocity)?;
    let lateral = unit.perp();
    Ok((state.a.dot(unit), state.a.dot(lateral)))
}

/// Straight-line prediction `p0 + v0 tau + a0 tau^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPath<T> {
    pub p0: Vec2<T>,
    pub v0: Vec2<T>,
    pub a0: Vec2<T>,
    pub t0: T,
    pub t_travel: T,
}

impl<T: Scalar> LinearPath<T> {
    /// Direction of travel: along `v0`, or along `a0` when starting from rest.
    /// `None` for a vehicle that never moves.
    pub fn direction(&self) -> Option<Vec2<T>> {
        self.v0.normalized().or_else(|| self.a0.normalized())
    }

    /// Initial speed and acceleration along [`Self::direction`].
    pub(crate) fn along_track(&self) -> Option<(Vec2<T>, T, T)> {
        let d = self.direction()?;
        Some((d, self.v0.dot(d), self.a0.dot(d)))
    }

    fn position(&self, tau: T) -> Vec2<T> {
        self.p0 + self.v0 * tau + self.a0 * (T::lit(0.5) * tau * tau)
    }

    fn velocity(&self, tau: T) -> Vec2<T> {
        self.v0 + self.a0 * tau
    }
}

/// Circular prediction around centre `c` with radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularPath<T> {
    pub c: Vec2<T>,
    pub r: T,
    /// Initial angular rate (rad/s); positive is counter-clockwise.
    pub omega0: T,
    /// Initial phase of `p0 - c`, in `(-pi, pi]`.
    pub alpha0: T,
    pub a_f: T,
    pub a_s: T,
    pub t0: T,
    pub t_travel: T,
    pub p0: Vec2<T>,
}

impl<T: Scalar> CircularPath<T> {
    pub fn is_counter_clockwise(&self) -> bool {
        self.omega0 > T::zero()
    }

    /// `+1` for counter-clockwise travel, `-1` otherwise.
    pub(crate) fn orientation(&self) -> T {
        sgn(self.omega0)
    }

    /// Angular rate used in the position equation, clamped so it never
    /// changes sign.
    pub fn clamped_rate(&self, tau: T) -> T {
        let w = self.omega0 + self.a_f / (T::lit(2.0) * self.r) * tau;
        if self.omega0 > T::zero() {
            w.max(T::zero())
        } else {
            w.min(T::zero())
        }
    }

    /// Instantaneous angular rate `omega0 + (a_f / r) tau`.
    pub fn angular_rate(&self, tau: T) -> T {
        self.omega0 + self.a_f / self.r * tau
    }

    /// Signed angle swept after `tau` seconds.
    pub fn swept_angle(&self, tau: T) -> T {
        self.clamped_rate(tau) * tau
    }

    fn radius_vector(&self, theta: T) -> Vec2<T> {
        let u = self.p0 - self.c;
        let (s, c) = theta.sin_cos();
        Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
    }

    fn position(&self, tau: T) -> Vec2<T> {
        let theta = self.swept_angle(tau);
        let u = self.p0 - self.c;
        // p0 + (R(theta) - I) u, with cos - 1 written as -2 sin^2(theta/2)
        let s = theta.sin();
        let h = (theta * T::lit(0.5)).sin();
        let cm1 = -T::lit(2.0) * h * h;
        self.p0 + Vec2::new(cm1 * u.x - s * u.y, s * u.x + cm1 * u.y)
    }

    fn velocity(&self, tau: T) -> Vec2<T> {
        if tau > T::zero() && self.clamped_rate(tau) == T::zero() {
            return Vec2::zero();
        }
        let ru = self.radius_vector(self.swept_angle(tau));
        ru.perp() * self.angular_rate(tau)
    }

    fn acceleration(&self, tau: T) -> Vec2<T> {
        if tau > T::zero() && self.clamped_rate(tau) == T::zero() {
            return Vec2::zero();
        }
        let ru = self.radius_vector(self.swept_angle(tau));
        let rate = self.angular_rate(tau);
        ru.perp() * (self.a_f / self.r) - ru * (rate * rate)
    }
}

/// Predicted motion of one vehicle, valid on `[t0, t0 + t_travel]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryModel<T> {
    Linear(LinearPath<T>),
    Circular(CircularPath<T>),
}

impl<T: Scalar> TrajectoryModel<T> {
    pub fn t0(&self) -> T {
        match self {
            Self::Linear(l) => l.t0,
            Self::Circular(c) => c.t0,
        }
    }

    pub fn t_travel(&self) -> T {
        match self {
            Self::Linear(l) => l.t_travel,
            Self::Circular(c) => c.t_travel,
        }
    }

    pub fn start(&self) -> Vec2<T> {
        match self {
            Self::Linear(l) => l.p0,
            Self::Circular(c) => c.p0,
        }
    }

    fn check(&self, t: T) -> Result<T> {
        let tau = t - self.t0();
        let end = self.t_travel();
        let slack = T::epsilon() * T::lit(16.0) * (T::one() + t.abs() + end);
        if !(tau >= -slack && tau <= end + slack) {
            return Err(Error::OutOfHorizon {
                t: t.to_f64_lossy(),
                start: self.t0().to_f64_lossy(),
                end: (self.t0() + end).to_f64_lossy(),
            });
        }
        Ok(tau.max(T::zero()).min(end))
    }

    pub fn position_at(&self, t: T) -> Result<Vec2<T>> {
        let tau = self.check(t)?;
        Ok(self.position_after(tau))
    }

    pub fn velocity_at(&self, t: T) -> Result<Vec2<T>> {
        let tau = self.check(t)?;
        Ok(self.velocity_after(tau))
    }

    pub fn acceleration_at(&self, t: T) -> Result<Vec2<T>> {
        let tau = self.check(t)?;
        Ok(self.acceleration_after(tau))
    }

    /// Position `tau` seconds after `t0`, without domain checks.
    #[inline]
    pub fn position_after(&self, tau: T) -> Vec2<T> {
        match self {
            Self::Linear(l) => l.position(tau),
            Self::Circular(c) => c.position(tau),
        }
    }

    #[inline]
    pub fn velocity_after(&self, tau: T) -> Vec2<T> {
        match self {
            Self::Linear(l) => l.velocity(tau),
            Self::Circular(c) => c.velocity(tau),
        }
    }

    #[inline]
    pub fn acceleration_after(&self, tau: T) -> Vec2<T> {
        match self {
            Self::Linear(l) => l.a0,
            Self::Circular(c) => c.acceleration(tau),
        }
    }

    /// Snapshot of the predicted motion `tau` seconds after `t0`.
    ///
    /// The acceleration is expressed so that rebuilding a trajectory from the
    /// snapshot continues the same path: its longitudinal part is the model's
    /// `a_f` and its lateral part reproduces the current angular rate. For
    /// straight lines and counter-clockwise turns this is the kinematic
    /// acceleration; for clockwise turns the sign of the tangential part
    /// differs from it.
    pub fn state_after(&self, tau: T) -> VehicleState<T> {
        let p = self.position_after(tau);
        let v = self.velocity_after(tau);
        let a = match self {
            Self::Linear(l) => l.a0,
            Self::Circular(c) => match v.normalized() {
                None => Vec2::zero(),
                Some(u) => u * c.a_f + u.perp() * (c.angular_rate(tau) * v.norm()),
            },
        };
        VehicleState { p, v, a, t0: self.t0() + tau }
    }

    pub fn state_at(&self, t: T) -> Result<VehicleState<T>> {
        let tau = self.check(t)?;
        Ok(self.state_after(tau))
    }

    /// Upper bound on `|acceleration|` over `[tau_a, tau_b]`.
    pub fn acceleration_bound(&self, tau_a: T, tau_b: T) -> T {
        match self {
            Self::Linear(l) => l.a0.norm(),
            Self::Circular(c) => {
                // |a|^2 = a_f^2 + (r rate^2)^2 and |rate| is extremal at an end
                let wa = c.angular_rate(tau_a).abs();
                let wb = c.angular_rate(tau_b).abs();
                let w = wa.max(wb);
                c.a_f.hypot(c.r * w * w)
            }
        }
    }
}

/// Classifies the snapshot and builds its predicted trajectory.
///
/// Straight-line predictions keep only the acceleration component along the
/// velocity, so the vehicle stays on its line; a vehicle at rest accelerates
/// along its acceleration vector.
pub fn build_trajectory<T: Scalar>(state: &VehicleState<T>, cfg: &SearchConfig<T>) -> TrajectoryModel<T> {
    let speed = state.v.norm();
    let linear = |a0: Vec2<T>| {
        let mut path = LinearPath {
            p0: state.p,
            v0: state.v,
            a0,
            t0: state.t0,
            t_travel: T::zero(),
        };
        path.t_travel = linear_travel_time(&path, cfg.horizon);
        TrajectoryModel::Linear(path)
    };
    let Ok((a_f, a_s)) = decompose_acceleration(state) else {
        return linear(state.a);
    };
    let unit = state.v / speed;
    if a_s.abs() < cfg.lateral_threshold {
        return linear(unit * a_f);
    }
    let lateral = unit.perp();
    let r = speed * speed / a_s.abs();
    let omega0 = a_s / speed;
    let c = state.p + lateral * (r * sgn(a_s));
    let cos_arg = ((state.p.x - c.x) / r).max(-T::one()).min(T::one());
    let mut alpha0 = sgn(state.p.y - c.y) * cos_arg.acos();
    if alpha0 <= -T::PI() {
        alpha0 = T::PI();
    }
    let mut path = CircularPath {
        c,
        r,
        omega0,
        alpha0,
        a_f,
        a_s,
        t0: state.t0,
        t_travel: T::zero(),
        p0: state.p,
    };
    path.t_travel = circular_travel_time(&path, cfg.horizon);
    TrajectoryModel::Circular(path)
}

/// Duration for which the prediction is valid: one full cycle or the moment
/// the vehicle stops for circles, the stop time or the horizon for lines.
pub fn travel_time<T: Scalar>(traj: &TrajectoryModel<T>, cfg: &SearchConfig<T>) -> T {
    match traj {
        TrajectoryModel::Linear(l) => linear_travel_time(l, cfg.horizon),
        TrajectoryModel::Circular(c) => circular_travel_time(c, cfg.horizon),
    }
}

fn linear_travel_time<T: Scalar>(path: &LinearPath<T>, horizon: T) -> T {
    let speed = path.v0.norm();
    let accel = path.a0.norm();
    if speed > T::zero() && accel > T::zero() {
        // a0 = -k v0 for some k > 0
        let anti = path.a0.dot(path.v0) < T::zero();
        let collinear = path.a0.cross(path.v0).abs() <= T::lit(1e-12) * speed * accel;
        if anti && collinear {
            return (speed / accel).min(horizon);
        }
    }
    horizon
}

fn circular_travel_time<T: Scalar>(path: &CircularPath<T>, horizon: T) -> T {
    let two_pi = T::TAU();
    let w0 = path.omega0;
    if path.a_f == T::zero() {
        return (two_pi / w0.abs()).min(horizon);
    }
    let half = path.a_f / (T::lit(2.0) * path.r);
    let mut best = horizon;
    for target in [two_pi, -two_pi] {
        if let Some(t) = quadratic(half, w0, -target).smallest_positive() {
            best = best.min(t);
        }
    }
    if sgn(path.a_f) != sgn(w0) {
        let stop = -T::lit(2.0) * path.r * w0 / path.a_f;
        if stop > T::zero() {
            best = best.min(stop);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(p: (f64, f64), v: (f64, f64), a: (f64, f64)) -> VehicleState<f64> {
        VehicleState::new(p.into(), v.into(), a.into(), 0.0).unwrap()
    }

    fn circle(omega0: f64, a_f: f64, r: f64) -> CircularPath<f64> {
        // start at (r, 0) around the origin
        let mut c = CircularPath {
            c: Vec2::zero(),
            r,
            omega0,
            alpha0: 0.0,
            a_f,
            a_s: omega0.signum() * (omega0 * r).powi(2) / r,
            t0: 0.0,
            t_travel: 0.0,
            p0: Vec2::new(r, 0.0),
        };
        c.t_travel = circular_travel_time(&c, 1e9);
        c
    }

    #[test]
    fn decomposition_examples() {
        let (af, as_) = decompose_acceleration(&state((0., 0.), (0., 1.), (-0.1, 0.1))).unwrap();
        assert_relative_eq!(af, 0.1, epsilon = 1e-15);
        assert_relative_eq!(as_, 0.1, epsilon = 1e-15);

        let (af, as_) = decompose_acceleration(&state((0., 0.), (1., 0.), (1., 0.))).unwrap();
        assert_eq!((af, as_), (1.0, 0.0));

        let (af, as_) = decompose_acceleration(&state((0., 0.), (1., 0.), (0., 0.))).unwrap();
        assert_eq!((af, as_), (0.0, 0.0));
    }

    #[test]
    fn decomposition_rejects_zero_velocity() {
        let s = state((0., 0.), (0., 0.), (1., 0.));
        assert_eq!(decompose_acceleration(&s), Err(Error::ZeroVelocity));
    }

    #[test]
    fn builds_left_turn_circle() {
        let cfg = SearchConfig::default();
        let t = build_trajectory(&state((1.5, 0.), (0., 1.), (-0.1, 0.1)), &cfg);
        let TrajectoryModel::Circular(c) = t else { panic!("expected circle") };
        assert_relative_eq!(c.c.x, -8.5, epsilon = 1e-12);
        assert_relative_eq!(c.c.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.r, 10.0, epsilon = 1e-12);
        assert_relative_eq!(c.omega0, 0.1, epsilon = 1e-12);
        assert_relative_eq!(c.a_f, 0.1, epsilon = 1e-12);
        assert_relative_eq!(c.a_s, 0.1, epsilon = 1e-12);
        assert_relative_eq!(c.alpha0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unaccelerated_and_subthreshold_are_linear() {
        let cfg = SearchConfig::default();
        let t = build_trajectory(&state((10., 0.), (0.1, 0.), (0., 0.)), &cfg);
        let TrajectoryModel::Linear(l) = t else { panic!("expected line") };
        assert_eq!(l.a0, Vec2::zero());

        let t = build_trajectory(&state((0., 0.), (2., 0.), (0., 2e-4)), &cfg);
        let TrajectoryModel::Linear(l) = t else { panic!("expected line") };
        // lateral residue dropped
        assert_eq!(l.a0, Vec2::new(0.0, 0.0));
    }

    #[test]
    fn stationary_vehicle_is_linear_along_acceleration() {
        let cfg = SearchConfig::default();
        let t = build_trajectory(&state((0., 0.), (0., 0.), (0., 0.3)), &cfg);
        let TrajectoryModel::Linear(l) = t else { panic!("expected line") };
        assert_eq!(l.direction(), Some(Vec2::new(0.0, 1.0)));
        assert_eq!(l.t_travel, cfg.horizon);

        let t = build_trajectory(&state((2., 3.), (0., 0.), (0., 0.)), &cfg);
        assert_eq!(t.position_at(50.0).unwrap(), Vec2::new(2.0, 3.0));
    }

    #[test]
    fn travel_time_examples() {
        let c = circle(0.1, 0.0, 10.0);
        assert_relative_eq!(c.t_travel, std::f64::consts::TAU / 0.1, epsilon = 1e-12);

        // smallest positive root of 0.005 t^2 + 0.1 t - 2 pi = 0
        let c = circle(0.1, 0.1, 10.0);
        let expected = (-0.1 + (0.01 + 0.02 * std::f64::consts::TAU).sqrt()) / 0.01;
        assert_relative_eq!(c.t_travel, expected, epsilon = 1e-12);
        assert!((c.t_travel - 26.835).abs() < 1e-2);

        let cfg = SearchConfig::default();
        let t = build_trajectory(&state((0., 0.), (2., 0.), (-0.5, 0.)), &cfg);
        assert_relative_eq!(t.t_travel(), 4.0, epsilon = 1e-15);

        // capped at the horizon
        let cfg = SearchConfig::default().with_horizon(30.0);
        let t = build_trajectory(&state((1.5, 0.), (0., 1.), (-0.1, 0.0 + 0.1)), &cfg);
        assert!(t.t_travel() <= 30.0);
    }

    #[test]
    fn decelerating_turn_stops_when_rate_reaches_zero() {
        let c = circle(0.1, -0.1, 10.0);
        assert_relative_eq!(c.t_travel, 20.0, epsilon = 1e-12);
        let m = TrajectoryModel::Circular(c);
        assert_eq!(m.velocity_at(20.0).unwrap(), Vec2::zero());
        assert_eq!(m.acceleration_at(20.0).unwrap(), Vec2::zero());
    }

    #[test]
    fn closed_form_positions() {
        let l = TrajectoryModel::Linear(LinearPath {
            p0: Vec2::zero(),
            v0: Vec2::new(1.0, 0.0),
            a0: Vec2::zero(),
            t0: 0.0,
            t_travel: 100.0,
        });
        assert_eq!(l.position_at(3.0).unwrap(), Vec2::new(3.0, 0.0));

        let cfg = SearchConfig::default();
        let m = build_trajectory(&state((1.5, 0.), (0., 1.), (-0.1, 0.0)), &cfg);
        let p = m.position_at(std::f64::consts::PI / 0.2).unwrap();
        assert_relative_eq!(p.x, -8.5, epsilon = 1e-9);
        assert_relative_eq!(p.y, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let cfg = SearchConfig::default();
        let m = build_trajectory(&state((0., 0.), (2., 0.), (-0.5, 0.)), &cfg);
        assert!(matches!(m.position_at(4.5), Err(Error::OutOfHorizon { .. })));
        assert!(matches!(m.position_at(-0.1), Err(Error::OutOfHorizon { .. })));
        assert!(m.position_at(4.0).is_ok());
    }

    #[test]
    fn start_state_is_reproduced() {
        let cfg = SearchConfig::default();
        let s = state((3.25, -7.5), (0.3, -0.8), (0.07, 0.05));
        let m = build_trajectory(&s, &cfg);
        assert!(matches!(m, TrajectoryModel::Circular(_)));
        assert_eq!(m.position_at(0.0).unwrap(), s.p);
        let v = m.velocity_at(0.0).unwrap();
        assert!((v - s.v).norm() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let cfg = SearchConfig::<f64>::default();
        assert!(cfg.validate().is_ok());
        let bad = SearchConfig { region_radius: 1.0, ..cfg };
        assert!(bad.validate().is_err());
        let bad = SearchConfig { horizon: 0.0, ..cfg };
        assert!(bad.validate().is_err());
        let bad = SearchConfig { refine_tol: f64::NAN, ..cfg };
        assert!(bad.validate().is_err());
    }
}
