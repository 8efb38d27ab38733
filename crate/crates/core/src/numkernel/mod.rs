//! Special functions, root finding and quadrature shared by every other module.

mod quadrature;
mod roots;
mod special;

pub use quadrature::{integrate, integrate_with_breaks, IntegralValue, QuadratureConfig, QuadratureError, Scheme};
pub use roots::{brent, RootError};
pub use special::{
    gamma_upper_quantile, ln_gamma, log_binomial, reg_gamma_pair, reg_inc_beta, reg_inc_beta_pair, reg_lower_gamma,
    reg_upper_gamma, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("probability must lie strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("binomial coefficient C({n}, {k}) requires k <= n")]
    InvalidBinomial { n: u64, k: u64 },
    #[error(transparent)]
    Root(#[from] RootError),
}
