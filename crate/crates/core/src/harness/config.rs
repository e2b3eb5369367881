//! Every threshold used by the sweeps, in one place.

use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Largest allowed `max / min` of a statistic over the `n`-grid.
    pub saturation_factor: f64,
    /// Largest allowed ratio between consecutive grid points.
    pub growth_limit: f64,
    /// Largest allowed ratio of the last grid point to the one before.
    pub final_step_limit: f64,
    /// Relative agreement of exact and float paths.
    pub exact_float_rel: f64,
    /// Accepted log-log slope for the binary point-mass bound.
    pub slope_binary: (f64, f64),
    /// Accepted slope for larger alphabets, where the grid is coarse.
    pub slope_general: (f64, f64),
    /// Relative tolerance of `bound / sqrt(pi n / 2)` around one.
    pub stirling_tolerance: f64,
    /// Smallest `n` at which the Stirling comparison is enforced.
    pub stirling_min_n: usize,
    /// Geometric-series truncation tail.
    pub series_tail: f64,
    /// Pointwise ratios skip points whose denominator is below this
    /// multiple of `||f||_inf`.
    pub ratio_floor: f64,
}

pub const THRESHOLDS: Thresholds = Thresholds {
    saturation_factor: 10.0,
    growth_limit: 1.10,
    final_step_limit: 1.25,
    exact_float_rel: 1e-11,
    slope_binary: (0.45, 0.55),
    slope_general: (0.4, 0.6),
    stirling_tolerance: 0.05,
    stirling_min_n: 16,
    series_tail: 1e-12,
    ratio_floor: 1e-12,
};

impl Thresholds {
    pub fn profile(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("saturation_factor".to_string(), self.saturation_factor),
            ("growth_limit".to_string(), self.growth_limit),
            ("final_step_limit".to_string(), self.final_step_limit),
            ("exact_float_rel".to_string(), self.exact_float_rel),
            ("slope_binary_lo".to_string(), self.slope_binary.0),
            ("slope_binary_hi".to_string(), self.slope_binary.1),
            ("slope_general_lo".to_string(), self.slope_general.0),
            ("slope_general_hi".to_string(), self.slope_general.1),
            ("stirling_tolerance".to_string(), self.stirling_tolerance),
            ("stirling_min_n".to_string(), self.stirling_min_n as f64),
            ("series_tail".to_string(), self.series_tail),
            ("ratio_floor".to_string(), self.ratio_floor),
        ])
    }
}
