//! Third-order series for δ_n and ε_n, for the mean and the median statistic.

mod coefficients;
mod polys;
mod series;

pub use coefficients::{
    coefficients_for, exp_family_coefficients, exp_family_components, median_coefficients, median_coefficients_with,
    median_components, natural_prior, CoefficientSet, PriorJet,
};
pub use polys::{f1_poly, f2_poly, g1_poly, g2_coefficients, g2_poly, power_mean_edgeworth};
pub use series::{joint_series, rate_series, Method, RatePair, RateResult};

use crate::models::ModelError;
use crate::numkernel::NumError;
use crate::priors::PriorError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("series order must be 1, 2 or 3, got {0}")]
    InvalidOrder(u8),
    #[error("sample size must be at least 1")]
    InvalidSampleSize,
    #[error("prior mass of the alternative is {0}; it must lie strictly inside (0, 1)")]
    DegenerateLambda(f64),
    #[error("null boundary {0} is outside the model's parameter interval")]
    OutsideInterval(f64),
    #[error("location density at the median must be positive, got {0}")]
    NonPositiveDensityAtMedian(f64),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Num(#[from] NumError),
}
