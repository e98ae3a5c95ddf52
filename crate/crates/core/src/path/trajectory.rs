use super::state::{LocalVelocity, StatePoint};

/// Coordinates near a square-root endpoint: `t = t1 + ς̃ (1 − α²)` with `α`
/// running from 1 at `t1` down to `beta` at the end of the segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointChart {
    pub t1: f64,
    pub varsigma_tilde: f64,
    pub beta: f64,
}

impl EndpointChart {
    pub fn alpha_at(&self, t: f64) -> f64 {
        (1.0 - (t - self.t1) / self.varsigma_tilde).max(0.0).sqrt()
    }

    pub fn time_at(&self, alpha: f64) -> f64 {
        self.t1 + self.varsigma_tilde * (1.0 - alpha * alpha)
    }
}

/// A fluid path that can report its state and velocity at any time.
pub trait Trajectory {
    /// State and velocity at time `t`.
    fn sample(&self, t: f64) -> (StatePoint, LocalVelocity);

    /// Interior times where the path is only piecewise smooth.
    fn breakpoints(&self, _t1: f64, _t2: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Chart for a square-root singularity at the right end, if any.
    fn endpoint_chart(&self) -> Option<EndpointChart> {
        None
    }

    /// State and velocity at chart coordinate `alpha`. Implementations with
    /// a chart should override this to avoid the cancellation in
    /// `1 − (t − t1)/ς̃` as `alpha → 0`.
    fn sample_alpha(&self, alpha: f64) -> (StatePoint, LocalVelocity) {
        let chart = self.endpoint_chart().expect("sample_alpha needs an endpoint chart");
        self.sample(chart.time_at(alpha))
    }
}
