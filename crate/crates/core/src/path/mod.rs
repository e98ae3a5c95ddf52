//! Optimal paths and path costs.

mod cost;
mod local_rate;
mod segment;
mod skorokhod;
mod state;
mod time_change;
mod trajectory;

pub use cost::{cost_closed_form, h_tilde, k_tilde, lagrangian_cost, pace_residual, path_cost, PACE_TOL};
pub use local_rate::{lagrangian_general, local_rate_l, VELOCITY_SLACK};
pub use segment::{b_alpha, beta_general, minimizer_path, varsigma, Minimizer, PathSegmentSpec, SegmentCase};
pub use skorokhod::skorokhod_map;
pub use state::{LocalVelocity, StatePoint};
pub use time_change::normalize_time_change;
pub use trajectory::{EndpointChart, Trajectory};
