//! Large-deviation rates, optimal exploration paths and exact simulation for
//! the configuration model of random graphs.
//!
//! * [`rates`]: static rate formulas for component degree configurations,
//!   D-regular components and component sizes.
//! * [`lln`]: generating functions and the fluid limit of the exploration.
//! * [`path`]: optimal segments, local rates and path costs.
//! * [`sim`]: uniform matchings and the edge-exploration algorithm.
//! * [`estimate`]: parallel Monte Carlo estimates of component events.
//!
//! Rates are nonnegative and in nats per vertex.

pub mod error;
pub mod estimate;
pub mod fluid;
pub mod io;
pub mod lln;
pub mod path;
pub mod profile;
pub mod quadrature;
pub mod rates;
pub mod roots;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use fluid::{uniform_grid, FluidPath, TauMarkers};
pub use path::{LocalVelocity, PathSegmentSpec, StatePoint};
pub use profile::{DegreeDistribution, Masses, SubProfile};
pub use sim::{DegreeSequence, ExplorationRecord};
