//! Tour planning and dynamic target service for a vehicle with bounded
//! speed and bounded acceleration.

pub mod bounds;
pub mod dtrp;
pub mod error;
pub mod etsp;
pub mod geometry;
pub mod harness;
pub mod planners;
pub mod space;
pub mod vehicle;

pub use error::{Error, Result};
pub use space::{PointSet, Workspace};
pub use vehicle::VehicleParams;
