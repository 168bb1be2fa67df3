//! Candidate collision points between two predicted paths.
//!
//! Paths that cross yield their crossing points. Paths that miss each other
//! by no more than `phi` yield the midpoint of their closest points, since a
//! grazing contact can still happen there. Identical circles or lines are
//! flagged so the caller can solve the one-dimensional chase directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{CircularPath, LinearPath, TrajectoryModel};
use crate::scalar::Scalar;
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateKind {
    TransversalIntersection,
    NearestApproach,
    CoincidentGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidatePoint<T> {
    pub q: Vec2<T>,
    pub kind: CandidateKind,
}

impl<T> CandidatePoint<T> {
    fn new(q: Vec2<T>, kind: CandidateKind) -> Self {
        Self { q, kind }
    }
}

/// Geometric support of a predicted path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locus<T> {
    /// Points `origin + s * dir` with `|dir| = 1`.
    Line { origin: Vec2<T>, dir: Vec2<T> },
    Circle { c: Vec2<T>, r: T },
    /// A vehicle that never moves.
    Point(Vec2<T>),
}

impl<T: Scalar> Locus<T> {
    pub fn of(traj: &TrajectoryModel<T>) -> Self {
        match traj {
            TrajectoryModel::Linear(l) => match l.direction() {
                Some(dir) => Self::Line { origin: l.p0, dir },
                None => Self::Point(l.p0),
            },
            TrajectoryModel::Circular(c) => Self::Circle { c: c.c, r: c.r },
        }
    }

    /// Euclidean distance from `x` to the locus.
    pub fn distance_to(&self, x: Vec2<T>) -> T {
        match *self {
            Self::Line { origin, dir } => (x - origin).cross(dir).abs(),
            Self::Circle { c, r } => ((x - c).norm() - r).abs(),
            Self::Point(p) => (x - p).norm(),
        }
    }
}

/// Relative tolerance used to decide tangency, parallelism and coincidence.
fn geom_eps<T: Scalar>() -> T {
    T::tol(1e-12).sqrt().min(T::lit(1e-9))
}

/// Candidate points between two circular paths.
pub fn circle_circle_points<T: Scalar>(
    traj_i: &CircularPath<T>,
    traj_j: &CircularPath<T>,
    phi: T,
) -> Vec<CandidatePoint<T>> {
    let u_ref = (traj_i.p0 - traj_i.c) / traj_i.r;
    let out = circle_pair(traj_i.c, traj_i.r, traj_j.c, traj_j.r, phi, u_ref);
    match out.first() {
        Some(p) if p.kind == CandidateKind::CoincidentGeometry => {
            vec![CandidatePoint::new(traj_i.p0, CandidateKind::CoincidentGeometry)]
        }
        _ => out,
    }
}

fn scale<T: Scalar>(a: T, b: T) -> T {
    T::one() + a.abs() + b.abs()
}

/// Circle `(ci, ri)` against circle `(cj, rj)`; either radius may be zero.
/// `u_ref` picks the representative point when the circles are concentric.
fn circle_pair<T: Scalar>(
    ci: Vec2<T>,
    ri: T,
    cj: Vec2<T>,
    rj: T,
    phi: T,
    u_ref: Vec2<T>,
) -> Vec<CandidatePoint<T>> {
    let delta = cj - ci;
    let d = delta.norm();
    let eps = geom_eps::<T>() * scale(ri, rj);
    if d <= eps {
        if (ri - rj).abs() <= eps {
            return vec![CandidatePoint::new(ci, CandidateKind::CoincidentGeometry)];
        }
        if (ri - rj).abs() <= phi {
            // concentric rings closer than phi: every direction is equally near
            let mid = ci + u_ref * ((ri + rj) * T::lit(0.5));
            return vec![CandidatePoint::new(mid, CandidateKind::NearestApproach)];
        }
        return Vec::new();
    }
    if d > ri + rj + phi || d < (ri - rj).abs() - phi {
        return Vec::new();
    }
    let e = delta / d;
    let half = T::lit(0.5);
    if d > ri + rj {
        let mid = (ci + e * ri + (cj - e * rj)) * half;
        return vec![CandidatePoint::new(mid, CandidateKind::NearestApproach)];
    }
    if d < (ri - rj).abs() {
        // one circle inside the other; nearest points lie on the same ray
        let dir = if ri > rj { e } else { -e };
        let mid = (ci + dir * ri + (cj + dir * rj)) * half;
        return vec![CandidatePoint::new(mid, CandidateKind::NearestApproach)];
    }
    // radical line: m = ci + lambda (cj - ci)
    let lambda = (ri * ri - rj * rj + d * d) / (T::lit(2.0) * d * d);
    let m = ci + delta * lambda;
    let along = lambda * d;
    let h_sq = ri * ri - along * along;
    let h = h_sq.max(T::zero()).sqrt();
    if h <= eps {
        return vec![CandidatePoint::new(m, CandidateKind::TransversalIntersection)];
    }
    let k = e.perp() * h;
    vec![
        CandidatePoint::new(m + k, CandidateKind::TransversalIntersection),
        CandidatePoint::new(m - k, CandidateKind::TransversalIntersection),
    ]
}

/// Candidate points between two straight-line paths.
///
/// Lines are handled in parametric form, so vertical paths need no special
/// treatment. A stationary vehicle acts as a single point.
pub fn line_line_points<T: Scalar>(
    traj_i: &LinearPath<T>,
    traj_j: &LinearPath<T>,
    phi: T,
) -> Result<Vec<CandidatePoint<T>>> {
    match (traj_i.direction(), traj_j.direction()) {
        (None, None) => Err(Error::BothStationary),
        (Some(di), Some(dj)) => Ok(line_pair(traj_i.p0, di, traj_j.p0, dj, phi)),
        (Some(d), None) => Ok(line_point(traj_i.p0, d, traj_j.p0, phi)),
        (None, Some(d)) => Ok(line_point(traj_j.p0, d, traj_i.p0, phi)),
    }
}

fn line_pair<T: Scalar>(pi: Vec2<T>, di: Vec2<T>, pj: Vec2<T>, dj: Vec2<T>, phi: T) -> Vec<CandidatePoint<T>> {
    let cross = di.cross(dj);
    let w = pj - pi;
    if cross.abs() > geom_eps::<T>() {
        let s = w.cross(dj) / cross;
        return vec![CandidatePoint::new(pi + di * s, CandidateKind::TransversalIntersection)];
    }
    let offset = w.cross(di).abs();
    if offset <= geom_eps::<T>() * (T::one() + w.norm()) {
        return vec![CandidatePoint::new(pi, CandidateKind::CoincidentGeometry)];
    }
    if offset > phi {
        return Vec::new();
    }
    let foot = pj + dj * (pi - pj).dot(dj);
    vec![CandidatePoint::new((pi + foot) * T::lit(0.5), CandidateKind::NearestApproach)]
}

fn line_point<T: Scalar>(origin: Vec2<T>, dir: Vec2<T>, p: Vec2<T>, phi: T) -> Vec<CandidatePoint<T>> {
    line_circle(origin, dir, p, T::zero(), phi)
}

/// Candidate points between a straight-line path and a circular one.
pub fn circle_line_points<T: Scalar>(
    traj_line: &LinearPath<T>,
    traj_circle: &CircularPath<T>,
    phi: T,
) -> Vec<CandidatePoint<T>> {
    match traj_line.direction() {
        Some(dir) => line_circle(traj_line.p0, dir, traj_circle.c, traj_circle.r, phi),
        None => {
            let u_ref = (traj_circle.p0 - traj_circle.c) / traj_circle.r;
            circle_pair(traj_line.p0, T::zero(), traj_circle.c, traj_circle.r, phi, u_ref)
        }
    }
}

fn line_circle<T: Scalar>(origin: Vec2<T>, dir: Vec2<T>, c: Vec2<T>, r: T, phi: T) -> Vec<CandidatePoint<T>> {
    let s0 = (c - origin).dot(dir);
    let foot = origin + dir * s0;
    let off = c - foot;
    let h = off.norm();
    let eps = geom_eps::<T>() * scale(r, h);
    if h <= r {
        let w = (r * r - h * h).max(T::zero()).sqrt();
        if w <= eps {
            return vec![CandidatePoint::new(foot, CandidateKind::TransversalIntersection)];
        }
        return vec![
            CandidatePoint::new(foot - dir * w, CandidateKind::TransversalIntersection),
            CandidatePoint::new(foot + dir * w, CandidateKind::TransversalIntersection),
        ];
    }
    if h > r + phi {
        return Vec::new();
    }
    // circle point closest to the line, on the ray from c towards the foot
    let near = c - off * (r / h);
    vec![CandidatePoint::new((near + foot) * T::lit(0.5), CandidateKind::NearestApproach)]
}

/// Candidate points for any pair of predicted paths.
///
/// Returns [`Error::BothStationary`] when neither vehicle moves.
pub fn candidate_points<T: Scalar>(
    traj_i: &TrajectoryModel<T>,
    traj_j: &TrajectoryModel<T>,
    phi: T,
) -> Result<Vec<CandidatePoint<T>>> {
    use TrajectoryModel::{Circular, Linear};
    Ok(match (traj_i, traj_j) {
        (Circular(a), Circular(b)) => circle_circle_points(a, b, phi),
        (Linear(a), Linear(b)) => line_line_points(a, b, phi)?,
        (Linear(l), Circular(c)) | (Circular(c), Linear(l)) => circle_line_points(l, c, phi),
    })
}
