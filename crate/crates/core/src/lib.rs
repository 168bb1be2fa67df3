//! Time-to-collision for pairs of vehicles.
//!
//! The first-order measure extrapolates both vehicles at constant velocity.
//! The second-order measure predicts each vehicle on a straight line or a
//! circle built from its velocity and acceleration, then locates the first
//! contact with a region-gated adaptive search ([`second_order_ttc`]). A
//! fixed-step [`oracle`] serves as ground truth, [`evaluation`] compares the
//! two on random trials, [`scenarios`] reproduces scripted encounters and
//! [`dataset`] runs the pipeline over recorded trajectories.
//!
//! Geometry and search code is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the precision to `f64`.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod integrator;
pub mod intersections;
pub mod kinematics;
pub mod oracle;
pub mod regions;
pub mod roots;
pub mod scalar;
pub mod scenarios;
pub mod star;
pub mod ttc_first;
pub mod vec2;

mod format;

pub use error::{Error, Result};
pub use format::format_sig;
pub use kinematics::{build_trajectory, decompose_acceleration, travel_time};
pub use oracle::simulate_ttc;
pub use scalar::Scalar;
pub use star::second_order_ttc;
pub use ttc_first::first_order_ttc;

pub type Vec2 = vec2::Vec2<f64>;
pub type VehicleState = kinematics::VehicleState<f64>;
pub type TrajectoryModel = kinematics::TrajectoryModel<f64>;
pub type SearchConfig = kinematics::SearchConfig<f64>;
pub type TtcOutcome = ttc_first::TtcOutcome<f64>;
pub type StarReport = star::StarReport<f64>;
pub type OracleConfig = oracle::OracleConfig<f64>;
pub type CandidatePoint = intersections::CandidatePoint<f64>;
pub type CollisionCandidate = regions::CollisionCandidate<f64>;

/// Single-precision variants.
pub mod f32 {
    pub type Vec2 = crate::vec2::Vec2<f32>;
    pub type VehicleState = crate::kinematics::VehicleState<f32>;
    pub type TrajectoryModel = crate::kinematics::TrajectoryModel<f32>;
    pub type SearchConfig = crate::kinematics::SearchConfig<f32>;
    pub type TtcOutcome = crate::ttc_first::TtcOutcome<f32>;
    pub type StarReport = crate::star::StarReport<f32>;
}
