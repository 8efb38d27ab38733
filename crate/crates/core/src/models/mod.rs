//! Data models, their level-α tests and power functions.

mod expfam;
mod location;
mod setup;

pub use expfam::{
    cornish_fisher_critical, power_mean_test, power_mean_test_pair, ump_critical_value, ExpFamily, ExponentialRate,
    NormalMean, Orientation,
};
pub use location::{
    median_cdf_edgeworth, median_cdf_edgeworth_with, median_cdf_exact, median_pdf_exact, median_sf_exact,
    power_median_test, power_median_test_pair, reiss_coefficients, reiss_coefficients_with, CauchyLocation,
    F23Form, GumbelLocation, LocationModel, MedianCdfMode, NormalLocation, Parity, ReissCoefficients,
};
pub use setup::{Statistic, TestSetup};

use crate::numkernel::NumError;
use rand::RngCore;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid test setup: {0}")]
    InvalidSetup(String),
    #[error("statistic {got:?} cannot be used with this model (needs {needed:?})")]
    WrongStatistic { needed: Statistic, got: Statistic },
    #[error("model {0} has no exact mean-statistic distribution; use the Cornish-Fisher critical value")]
    MissingExactCdf(&'static str),
    #[error("parameter {theta} lies outside the model's parameter interval")]
    OutsideInterval { theta: f64 },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// A data model paired with the statistic it is tested by.
#[derive(Debug, Clone)]
pub enum ModelRef {
    /// Tested by the standardized sample mean (UMP test).
    ExpFamily(Arc<dyn ExpFamily>),
    /// Tested by the sample median.
    Location(Arc<dyn LocationModel>),
}

impl ModelRef {
    pub fn statistic(&self) -> Statistic {
        match self {
            ModelRef::ExpFamily(_) => Statistic::MeanUmp,
            ModelRef::Location(_) => Statistic::Median,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelRef::ExpFamily(m) => m.name(),
            ModelRef::Location(m) => m.name(),
        }
    }

    /// Checks that `setup` is usable with this model.
    pub fn check(&self, setup: &TestSetup) -> Result<(), ModelError> {
        if setup.statistic != self.statistic() {
            return Err(ModelError::WrongStatistic { needed: self.statistic(), got: setup.statistic });
        }
        if let ModelRef::ExpFamily(m) = self {
            let t0 = m.orientation().to_natural(setup.theta0);
            let (lo, hi) = m.theta_interval();
            if !(t0 > lo && t0 < hi) {
                return Err(ModelError::OutsideInterval { theta: setup.theta0 });
            }
        }
        Ok(())
    }

    /// Exact power at `theta` (user parameterization) as `(β, 1 − β)`.
    ///
    /// Both members are computed directly so neither loses precision in its tail.
    pub fn power_pair(&self, theta: f64, setup: &TestSetup) -> Result<(f64, f64), ModelError> {
        match self {
            ModelRef::ExpFamily(m) => power_mean_test_pair(m.as_ref(), theta, setup),
            ModelRef::Location(m) => power_median_test_pair(m.as_ref(), theta, setup, MedianCdfMode::Exact),
        }
    }

    /// One observation at `theta` (user parameterization).
    pub fn sample(&self, theta: f64, rng: &mut dyn RngCore) -> f64 {
        match self {
            ModelRef::ExpFamily(m) => m.sample(m.orientation().to_natural(theta), rng),
            ModelRef::Location(m) => theta + m.sample_noise(rng),
        }
    }
}

pub(crate) use expfam::power_at_natural;
pub(crate) use location::median_cdf_pair;
