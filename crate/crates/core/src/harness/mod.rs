//! Dimension sweeps, constant estimation and the identity suite.

mod campaigns;
mod config;
mod family;
mod report;
mod verify;

pub use self::campaigns::{
    geometric_polynomial, geometric_series_check, geometric_series_check_exact, least_squares_slope,
    lemma_ratios, nevo_stein_ratios, prop_main_sum, prop_main_sweep, ratio_sweep, weak_type_growth,
    LemmaRatios, PropMainRow, RatioNorm, LEMMA1_ALPHAS, LEMMA_LABELS,
};
pub use self::config::{Thresholds, THRESHOLDS};
pub use self::family::{member_rng, random_set, unit_interval, FamilyMember, Instance, TestFamily, GENERATOR_ID};
pub use self::report::{MemberRow, PerN, SweepReport, STATISTIC_LABEL, TOOL_VERSION};
pub use self::verify::{
    chain_bound_excess, full_reduction_excess, monotonicity_excess, odd_majorization_excess, run_check,
    sublinearity_excess, verify_suite, Check, CheckOutcome, VerifyConfig, CHECKS, SBP_GRID,
    TELESCOPING_ORDERS,
};
