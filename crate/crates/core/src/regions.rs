//! Search regions around candidate points and the times each vehicle spends
//! inside them.
//!
//! A vehicle's progress along its path is a quadratic in time: arc length
//! `s(tau)` on a line, swept angle `psi(tau)` on a circle. A region is an
//! interval of that progress parameter, so entry and exit times are roots of
//! quadratics. Circular paths can revisit a region after wrapping around, and
//! the clamped circular model can reverse, so a region may be visited more
//! than once; every visit is reported.
//!
//! The region used for a candidate covers the disk of radius
//! `region_radius` around the point and, in addition, the stretch of path
//! that lies within `phi` of the other vehicle's path. Any contact must
//! happen inside that stretch, which is what makes the search complete for
//! shallow crossing angles where the stretch outgrows the disk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intersections::{CandidatePoint, Locus};
use crate::kinematics::{CircularPath, SearchConfig, TrajectoryModel};
use crate::roots::quadratic;
use crate::scalar::Scalar;
use crate::vec2::Vec2;

/// A candidate point together with both vehicles' occupancy windows.
///
/// `point` anchors vehicle `i`'s region and `point_j` anchors vehicle `j`'s;
/// they differ when two nearby candidate points are paired crosswise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionCandidate<T> {
    pub point: CandidatePoint<T>,
    pub point_j: Vec2<T>,
    pub enter_i: Option<T>,
    pub exit_i: Option<T>,
    pub enter_j: Option<T>,
    pub exit_j: Option<T>,
    pub sort_key: T,
}

impl<T: Scalar> CollisionCandidate<T> {
    /// Candidate with explicit windows; the sort key is the earlier entry.
    pub fn new(point: CandidatePoint<T>, window_i: (T, T), window_j: (T, T)) -> Self {
        Self {
            point,
            point_j: point.q,
            enter_i: Some(window_i.0),
            exit_i: Some(window_i.1),
            enter_j: Some(window_j.0),
            exit_j: Some(window_j.1),
            sort_key: window_i.0.min(window_j.0),
        }
    }
}

/// Length of the time window that can be searched: `min(t_i, t_j, horizon)`.
pub fn effective_horizon<T: Scalar>(traj_i: &TrajectoryModel<T>, traj_j: &TrajectoryModel<T>, cfg: &SearchConfig<T>) -> T {
    traj_i.t_travel().min(traj_j.t_travel()).min(cfg.horizon).max(T::zero())
}

fn wrap_tau<T: Scalar>(x: T) -> T {
    let tau = T::TAU();
    let w = x % tau;
    let w = if w < T::zero() { w + tau } else { w };
    if w >= tau {
        T::zero()
    } else {
        w
    }
}

/// Angle swept when moving from `from` to `to` in the vehicle's direction of
/// rotation, in `[0, 2 pi)`.
pub fn directed_angle<T: Scalar>(traj: &CircularPath<T>, from: Vec2<T>, to: Vec2<T>) -> Result<T> {
    let tol = T::lit(1e-6) * traj.r;
    for x in [from, to] {
        let offset = ((x - traj.c).norm() - traj.r).abs();
        if offset > tol {
            return Err(Error::OffCircle { offset: offset.to_f64_lossy() });
        }
    }
    let a = from - traj.c;
    let b = to - traj.c;
    // counter-clockwise angle from a to b
    let theta = wrap_tau(a.cross(b).atan2(a.dot(b)));
    if traj.is_counter_clockwise() || theta == T::zero() {
        Ok(theta)
    } else {
        Ok(T::TAU() - theta)
    }
}

/// Distance travelled along the circle from `p` to `q`.
pub fn arc_distance<T: Scalar>(traj: &CircularPath<T>, p: Vec2<T>, q: Vec2<T>) -> Result<T> {
    Ok(traj.r * directed_angle(traj, p, q)?)
}

/// Stretch of a path, in the path's own parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Span<T> {
    Empty,
    All,
    /// Arc length interval along a line, measured from the start point.
    Interval(T, T),
    /// Counter-clockwise arc starting at absolute angle `start`.
    Arc { start: T, len: T },
}

/// How a vehicle advances along its locus.
#[derive(Debug, Clone, Copy)]
enum Track<T> {
    /// `s(tau) = b tau + c tau^2` along `dir` from `origin`.
    Line { origin: Vec2<T>, dir: Vec2<T>, b: T, c: T },
    /// Absolute angle `alpha0 + orient * psi(tau)`, `psi = b tau + c tau^2`.
    Circle { centre: Vec2<T>, r: T, alpha0: T, orient: T, b: T, c: T },
    Fixed(Vec2<T>),
}

impl<T: Scalar> Track<T> {
    fn of(traj: &TrajectoryModel<T>) -> Self {
        let half = T::lit(0.5);
        match traj {
            TrajectoryModel::Linear(l) => match l.along_track() {
                Some((dir, speed, accel)) => Self::Line { origin: l.p0, dir, b: speed, c: half * accel },
                None => Self::Fixed(l.p0),
            },
            TrajectoryModel::Circular(p) => {
                let orient = p.orientation();
                Self::Circle {
                    centre: p.c,
                    r: p.r,
                    alpha0: (p.p0 - p.c).angle(),
                    orient,
                    b: p.omega0.abs(),
                    c: orient * p.a_f / (T::lit(2.0) * p.r),
                }
            }
        }
    }

    fn locus(&self) -> Locus<T> {
        match *self {
            Self::Line { origin, dir, .. } => Locus::Line { origin, dir },
            Self::Circle { centre, r, .. } => Locus::Circle { c: centre, r },
            Self::Fixed(p) => Locus::Point(p),
        }
    }

    /// Stretch within chordal distance `radius` of the point of the path
    /// nearest to `q`.
    fn disk_span(&self, q: Vec2<T>, radius: T) -> Span<T> {
        match *self {
            Self::Line { origin, dir, .. } => {
                let s = (q - origin).dot(dir);
                Span::Interval(s - radius, s + radius)
            }
            Self::Circle { centre, r, .. } => {
                if radius >= T::lit(2.0) * r {
                    return Span::All;
                }
                let beta = (q - centre).angle();
                let delta = T::lit(2.0) * (radius / (T::lit(2.0) * r)).asin();
                Span::Arc { start: beta - delta, len: delta + delta }
            }
            Self::Fixed(p) => {
                if (p - q).norm() <= radius {
                    Span::All
                } else {
                    Span::Empty
                }
            }
        }
    }

    /// Component of the proximity zone (points within `reach` of `other`)
    /// that contains the path point nearest to `q`.
    fn zone_span(&self, q: Vec2<T>, other: &Locus<T>, reach: T) -> Span<T> {
        match *self {
            Self::Line { origin, dir, .. } => {
                let s_q = (q - origin).dot(dir);
                let parts = line_zone(origin, dir, other, reach);
                parts
                    .into_iter()
                    .find(|&(lo, hi)| lo <= s_q && s_q <= hi)
                    .map_or(Span::Empty, |(lo, hi)| {
                        if lo == T::neg_infinity() && hi == T::infinity() {
                            Span::All
                        } else {
                            Span::Interval(lo, hi)
                        }
                    })
            }
            Self::Circle { centre, r, .. } => {
                let beta = (q - centre).angle();
                let tol = T::tol(1e-12);
                match circle_zone(centre, r, other, reach) {
                    Zone::All => Span::All,
                    Zone::Arcs(arcs) => arcs
                        .into_iter()
                        .flatten()
                        .find(|&(start, len)| {
                            let off = wrap_tau(beta - start);
                            off <= len + tol || off >= T::TAU() - tol
                        })
                        .map_or(Span::Empty, |(start, len)| Span::Arc { start, len }),
                }
            }
            Self::Fixed(p) => {
                if other.distance_to(p) <= reach {
                    Span::All
                } else {
                    Span::Empty
                }
            }
        }
    }

    /// Smallest stretch containing both spans, which must each contain the
    /// path point nearest to `q` (or be empty).
    fn hull(&self, q: Vec2<T>, a: Span<T>, b: Span<T>) -> Span<T> {
        match (a, b) {
            (Span::All, _) | (_, Span::All) => Span::All,
            (Span::Empty, x) | (x, Span::Empty) => x,
            (Span::Interval(a0, a1), Span::Interval(b0, b1)) => Span::Interval(a0.min(b0), a1.max(b1)),
            (Span::Arc { start: s1, len: l1 }, Span::Arc { start: s2, len: l2 }) => {
                let Self::Circle { centre, .. } = *self else {
                    return Span::All;
                };
                let beta = (q - centre).angle();
                // offsets relative to beta, each interval containing zero
                let rel = |start: T, len: T| {
                    let mut off = wrap_tau(beta - start);
                    if off > len {
                        off = off - T::TAU();
                    }
                    (-off, len - off)
                };
                let (lo1, hi1) = rel(s1, l1);
                let (lo2, hi2) = rel(s2, l2);
                let lo = lo1.min(lo2);
                let hi = hi1.max(hi2);
                if hi - lo >= T::TAU() {
                    Span::All
                } else {
                    Span::Arc { start: beta + lo, len: hi - lo }
                }
            }
            _ => Span::All,
        }
    }

    /// Time windows in `[0, horizon]` during which the vehicle is inside
    /// `span`, ascending and disjoint.
    fn visits(&self, span: Span<T>, horizon: T) -> Vec<(T, T)> {
        match span {
            Span::Empty => Vec::new(),
            Span::All => vec![(T::zero(), horizon)],
            Span::Interval(lo, hi) => match *self {
                Self::Line { b, c, .. } => level_set(b, c, lo, hi, horizon),
                _ => Vec::new(),
            },
            Span::Arc { start, len } => match *self {
                Self::Circle { alpha0, orient, b, c, .. } => {
                    let tau = T::TAU();
                    let psi_lo = if orient > T::zero() {
                        wrap_tau(start - alpha0)
                    } else {
                        wrap_tau(alpha0 - start - len)
                    };
                    let mut out = Vec::new();
                    for k in [-1.0, 0.0, 1.0] {
                        let lo = psi_lo + tau * T::lit(k);
                        out.extend(level_set(b, c, lo, lo + len, horizon));
                    }
                    merge(out)
                }
                _ => Vec::new(),
            },
        }
    }
}

enum Zone<T> {
    All,
    Arcs([Option<(T, T)>; 2]),
}

/// Parameter intervals of the line `origin + s dir` within `reach` of `other`.
fn line_zone<T: Scalar>(origin: Vec2<T>, dir: Vec2<T>, other: &Locus<T>, reach: T) -> Vec<(T, T)> {
    match *other {
        Locus::Line { origin: o2, dir: d2 } => {
            let n = d2.perp();
            let a = n.dot(origin - o2);
            let b = n.dot(dir);
            if b.abs() <= T::tol(1e-14) {
                return if a.abs() <= reach { vec![(T::neg_infinity(), T::infinity())] } else { Vec::new() };
            }
            let s1 = (-reach - a) / b;
            let s2 = (reach - a) / b;
            vec![(s1.min(s2), s1.max(s2))]
        }
        Locus::Circle { c, r } => ring_on_line(origin, dir, c, r, reach),
        Locus::Point(p) => ring_on_line(origin, dir, p, T::zero(), reach),
    }
}

fn ring_on_line<T: Scalar>(origin: Vec2<T>, dir: Vec2<T>, c: Vec2<T>, r: T, reach: T) -> Vec<(T, T)> {
    let s0 = (c - origin).dot(dir);
    let h_sq = (c - origin - dir * s0).norm_sq();
    let inner = (r - reach).max(T::zero());
    let upper = (r + reach) * (r + reach) - h_sq;
    if upper < T::zero() {
        return Vec::new();
    }
    let lower = inner * inner - h_sq;
    let w_out = upper.sqrt();
    if lower <= T::zero() {
        return vec![(s0 - w_out, s0 + w_out)];
    }
    let w_in = lower.sqrt();
    vec![(s0 - w_out, s0 - w_in), (s0 + w_in, s0 + w_out)]
}

/// Arcs `(start, len)` of the circle `(c, r)` within `reach` of `other`.
fn circle_zone<T: Scalar>(c: Vec2<T>, r: T, other: &Locus<T>, reach: T) -> Zone<T> {
    let two = T::lit(2.0);
    // distance condition written as cos(angle - beta) in [lo, hi]
    let (beta, lo, hi) = match *other {
        Locus::Line { origin, dir } => {
            let n = dir.perp();
            let g = n.dot(c - origin);
            (n.angle(), (-reach - g) / r, (reach - g) / r)
        }
        Locus::Circle { c: c2, r: r2 } => match ring_cos_range(c, r, c2, r2, reach) {
            Some(v) => v,
            None => {
                return if (r - r2).abs() <= reach { Zone::All } else { Zone::Arcs([None, None]) };
            }
        },
        Locus::Point(p) => match ring_cos_range(c, r, p, T::zero(), reach) {
            Some(v) => v,
            None => {
                return if r <= reach { Zone::All } else { Zone::Arcs([None, None]) };
            }
        },
    };
    if lo > T::one() || hi < -T::one() || lo > hi {
        return Zone::Arcs([None, None]);
    }
    let g1 = hi.min(T::one()).acos();
    let g2 = lo.max(-T::one()).acos();
    let full_top = hi >= T::one();
    let full_bottom = lo <= -T::one();
    match (full_top, full_bottom) {
        (true, true) => Zone::All,
        (true, false) => Zone::Arcs([Some((beta - g2, two * g2)), None]),
        (false, true) => Zone::Arcs([Some((beta + g1, T::TAU() - two * g1)), None]),
        (false, false) => Zone::Arcs([Some((beta + g1, g2 - g1)), Some((beta - g2, g2 - g1))]),
    }
}

/// For points `c + r u(angle)` the distance to the ring `(c2, r2)` is within
/// `reach` iff `cos(angle - beta)` lies in the returned range. `None` when
/// the centres coincide and the distance is the same everywhere.
fn ring_cos_range<T: Scalar>(c: Vec2<T>, r: T, c2: Vec2<T>, r2: T, reach: T) -> Option<(T, T, T)> {
    let delta = c - c2;
    let d = delta.norm();
    if d <= T::tol(1e-12) * (T::one() + r + r2) {
        return None;
    }
    let inner = (r2 - reach).max(T::zero());
    let outer = r2 + reach;
    let base = d * d + r * r;
    let den = T::lit(2.0) * r * d;
    Some((delta.angle(), (inner * inner - base) / den, (outer * outer - base) / den))
}

/// `{tau in [0, t_end] : lo <= b tau + c tau^2 <= hi}` as disjoint intervals.
fn level_set<T: Scalar>(b: T, c: T, lo: T, hi: T, t_end: T) -> Vec<(T, T)> {
    let q = |t: T| b * t + c * t * t;
    let inside = |t: T| {
        let v = q(t);
        lo <= v && v <= hi
    };
    if t_end <= T::zero() {
        return if inside(T::zero()) { vec![(T::zero(), T::zero())] } else { Vec::new() };
    }
    let mut cuts = vec![T::zero(), t_end];
    for level in [lo, hi] {
        if level.is_finite() {
            for &r in quadratic(c, b, -level).as_slice() {
                if r > T::zero() && r < t_end {
                    cuts.push(r);
                }
            }
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cut points"));
    let mut out: Vec<(T, T)> = Vec::new();
    for w in cuts.windows(2) {
        let (x, y) = (w[0], w[1]);
        if y <= x {
            continue;
        }
        if inside((x + y) * T::lit(0.5)) {
            match out.last_mut() {
                Some(last) if last.1 >= x => last.1 = y,
                _ => out.push((x, y)),
            }
        }
    }
    out
}

fn merge<T: Scalar>(mut v: Vec<(T, T)>) -> Vec<(T, T)> {
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite windows"));
    let mut out: Vec<(T, T)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// First entry into and the following exit from the disk of radius
/// `cfg.region_radius` around `q`, within `[0, horizon]`.
///
/// Points off the path are replaced by the nearest path point. The entry is
/// `0` when the vehicle starts inside; the exit is capped at `horizon`.
pub fn hitting_times<T: Scalar>(traj: &TrajectoryModel<T>, q: Vec2<T>, cfg: &SearchConfig<T>, horizon: T) -> (Option<T>, Option<T>) {
    let track = Track::of(traj);
    let span = track.disk_span(q, cfg.region_radius);
    match track.visits(span, horizon).first() {
        Some(&(a, b)) => (Some(a), Some(b)),
        None => (None, None),
    }
}

/// Sorts by `sort_key`, keeping the original order on ties.
pub fn sort_candidates<T: Scalar>(candidates: &mut [CollisionCandidate<T>]) {
    candidates.sort_by(|a, b| a.sort_key.partial_cmp(&b.sort_key).expect("finite sort keys"));
}

/// Builds the candidates for a trajectory pair, sorted by earliest entry.
///
/// Every ordered pair of points is considered (the first anchors vehicle
/// `i`, the second vehicle `j`), and every combination of visits yields one
/// candidate. Windows that never overlap are kept; the search discards them.
pub fn assemble_candidates<T: Scalar>(
    traj_i: &TrajectoryModel<T>,
    traj_j: &TrajectoryModel<T>,
    points: &[CandidatePoint<T>],
    cfg: &SearchConfig<T>,
) -> Vec<CollisionCandidate<T>> {
    let horizon = effective_horizon(traj_i, traj_j, cfg);
    let ti = Track::of(traj_i);
    let tj = Track::of(traj_j);
    let (li, lj) = (ti.locus(), tj.locus());
    let reach = cfg.phi + cfg.contact_tol + T::tol(1e-12) * (T::one() + cfg.phi);

    let windows = |track: &Track<T>, other: &Locus<T>, q: Vec2<T>| {
        let disk = track.disk_span(q, cfg.region_radius);
        let zone = track.zone_span(q, other, reach);
        track.visits(track.hull(q, disk, zone), horizon)
    };
    let per_i: Vec<_> = points.iter().map(|p| windows(&ti, &lj, p.q)).collect();
    let per_j: Vec<_> = points.iter().map(|p| windows(&tj, &li, p.q)).collect();

    let mut out: Vec<CollisionCandidate<T>> = Vec::new();
    for (a, pa) in points.iter().enumerate() {
        for (b, pb) in points.iter().enumerate() {
            for &wi in &per_i[a] {
                for &wj in &per_j[b] {
                    let dup = out.iter().any(|c| {
                        c.enter_i == Some(wi.0) && c.exit_i == Some(wi.1) && c.enter_j == Some(wj.0) && c.exit_j == Some(wj.1)
                    });
                    if dup {
                        continue;
                    }
                    let mut cand = CollisionCandidate::new(*pa, wi, wj);
                    cand.point_j = pb.q;
                    out.push(cand);
                }
            }
        }
    }
    sort_candidates(&mut out);
    out
}
