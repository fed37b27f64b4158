//! Growth-exponent regression, Frechet goodness of fit, and verdict reports.

pub mod frechet;
pub mod ks;
pub mod report;
pub mod scaling;

pub use frechet::{frechet_cdf, frechet_gof, frechet_quantile, limit_scale_prediction, FrechetFit};
pub use ks::{ks_one_sample, ks_two_sample, median};
pub use report::{build_report, VerdictReport};
pub use scaling::{
    compare_levels, estimate_scaling_exponent, ols, scaled_medians, verdict, LevelComparison,
    ScalingReport, Tolerances, Verdict,
};
