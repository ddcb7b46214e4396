//! Rerouting polygonal lines around open obstacles in normed space.
//!
//! Given a region `U`, a finite family of pairwise separated open obstacles
//! and a polyline from `x` to `y`, [`reroute::assemble_route`] builds a new
//! polyline from `x` to `y` that avoids every obstacle. Each edge that dips
//! into an obstacle is replaced by straight bridge pieces and detours running
//! inside a thin collar around the obstacle boundary.
//!
//! Everything is generic over the [`Scalar`] type; the aliases at the crate
//! root fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collar;
pub mod crossing;
pub mod error;
pub mod geom;
pub mod instances;
pub mod obstacle;
pub mod plot;
pub mod reroute;
mod roots;
pub mod scalar;
pub mod schedule;
pub mod validate;
pub mod verify;

pub use error::{Error, Result};
pub use geom::Region;
pub use scalar::Scalar;

pub type Point = geom::Point<f64>;
pub type Segment = geom::Segment<f64>;
pub type Polyline = geom::Polyline<f64>;
pub type NormSpec = geom::NormSpec<f64>;
pub type AaBox = obstacle::AaBox<f64>;
pub type Obstacle = obstacle::Obstacle<f64>;
pub type Shape = obstacle::Shape<f64>;
pub type Instance = obstacle::Instance<f64>;
pub type TolerancePolicy = obstacle::TolerancePolicy<f64>;
pub type SegmentProfile = crossing::SegmentProfile<f64>;
pub type EdgeSchedule = schedule::EdgeSchedule<f64>;
pub type Collar = collar::Collar<f64>;
pub type CollarRoute = collar::CollarRoute<f64>;
pub type RouteResult = reroute::RouteResult<f64>;
pub type ValidationReport = validate::ValidationReport<f64>;
pub type VerifyReport = verify::VerifyReport<f64>;
