//! Studies built on the rate routines: spiky and flat prior limits, the
//! honesty threshold n_α(τ), and the gap between the mean and median tests.

use crate::exact::{exact_rates_for, ExactError};
use crate::expansions::{coefficients_for, rate_series, CoefficientSet, ExpansionError, RatePair};
use crate::models::{ModelRef, Parity, TestSetup};
use crate::numkernel::{std_normal_pdf, std_normal_quantile, NumError, QuadratureConfig};
use crate::priors::{scale_prior, Prior, PriorError};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{0} must lie in [0, 1], got {1}")]
    InvalidProbability(&'static str, f64),
    #[error("{0}")]
    InvalidInput(String),
    #[error("zero denominator in the {0} limit")]
    ZeroDenominator(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Limits of (δ_n, ε_n) as the prior scale τ goes to 0 and to ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikyLimits {
    pub delta_limit_tau0: f64,
    pub eps_limit_tau0: f64,
    pub delta_limit_tauinf: f64,
    pub eps_limit_tauinf: f64,
}

/// `p_minus`, `p_plus` are the rejection probabilities just below and just above θ0;
/// `lambda_null` is the prior mass of the null.
pub fn spiky_limits(p_minus: f64, p_plus: f64, lambda_null: f64) -> Result<SpikyLimits, AnalysisError> {
    for (name, v) in [("p_minus", p_minus), ("p_plus", p_plus), ("lambda_null", lambda_null)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(AnalysisError::InvalidProbability(name, v));
        }
    }
    let l = lambda_null;
    let dd = l * p_minus + (1.0 - l) * p_plus;
    if dd <= 0.0 {
        return Err(AnalysisError::ZeroDenominator("delta"));
    }
    let ed = l * (1.0 - p_minus) + (1.0 - l) * (1.0 - p_plus);
    if ed <= 0.0 {
        return Err(AnalysisError::ZeroDenominator("epsilon"));
    }
    Ok(SpikyLimits {
        delta_limit_tau0: l * p_minus / dd,
        eps_limit_tau0: (1.0 - l) * (1.0 - p_plus) / ed,
        delta_limit_tauinf: 0.0,
        eps_limit_tauinf: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikyRow {
    pub tau: f64,
    pub delta: f64,
    pub epsilon: f64,
}

/// Exact rates under `scale_prior(base, τ)` for every τ in the grid, in grid order.
pub fn empirical_spiky_check(
    model: &ModelRef,
    base: &Prior,
    setup: &TestSetup,
    tau_grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<SpikyRow>, AnalysisError> {
    tau_grid
        .par_iter()
        .map(|&tau| {
            let prior = scale_prior(base, tau)?;
            let r = exact_rates_for(model, &prior, setup, quad)?;
            Ok(SpikyRow { tau, delta: r.delta.value, epsilon: r.epsilon.value })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    /// Quadrature of the exact power.
    Exact,
    /// Third-order series.
    Series3,
}

/// δ_n and ε_n for one setup by the chosen route.
pub fn rates_by(
    model: &ModelRef,
    prior: &Prior,
    setup: &TestSetup,
    method: RateMethod,
    quad: &QuadratureConfig,
) -> Result<RatePair, AnalysisError> {
    match method {
        RateMethod::Exact => Ok(exact_rates_for(model, prior, setup, quad)?),
        RateMethod::Series3 => {
            let c = coefficients_for(model, prior, setup.theta0, setup.alpha, setup.n)?;
            Ok(rate_series(&c, setup.n, 3)?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct HonestyQuery {
    pub model: ModelRef,
    pub base_prior: Prior,
    pub theta0: f64,
    pub tau: f64,
    pub alpha: f64,
    pub method: RateMethod,
    pub n_max: u64,
}

/// Smallest n in `1..=n_max` with δ_n ≤ α under the τ-scaled prior, scanning every n.
pub fn n_alpha(q: &HonestyQuery, quad: &QuadratureConfig) -> Result<Option<u64>, AnalysisError> {
    if q.n_max < 1 {
        return Err(AnalysisError::InvalidInput("n_max must be at least 1".into()));
    }
    let prior = scale_prior(&q.base_prior, q.tau)?;
    let base_setup = TestSetup::new(q.model.statistic(), q.theta0, q.alpha, 1)
        .map_err(|e| AnalysisError::InvalidInput(e.to_string()))?;
    // series coefficients depend on n at most through parity
    let mut cache: [Option<CoefficientSet>; 2] = [None, None];
    for n in 1..=q.n_max {
        let setup = base_setup.with_n(n);
        let delta = match q.method {
            RateMethod::Exact => exact_rates_for(&q.model, &prior, &setup, quad)?.delta.value,
            RateMethod::Series3 => {
                let slot = match Parity::of(n) {
                    Parity::Even => 0,
                    Parity::Odd => 1,
                };
                if cache[slot].is_none() {
                    cache[slot] = Some(coefficients_for(&q.model, &prior, q.theta0, q.alpha, n)?);
                }
                rate_series(cache[slot].as_ref().unwrap(), n, 3)?.delta.value
            }
        };
        if delta <= q.alpha {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// n_α over a τ grid, evaluated concurrently, returned in grid order.
pub fn n_alpha_grid(q: &HonestyQuery, taus: &[f64], quad: &QuadratureConfig) -> Result<Vec<(f64, Option<u64>)>, AnalysisError> {
    taus.par_iter()
        .map(|&tau| Ok((tau, n_alpha(&HonestyQuery { tau, ..q.clone() }, quad)?)))
        .collect()
}

/// Log-spaced τ values from 0.2 to 5 (25 points).
pub fn default_tau_grid() -> Vec<f64> {
    let (lo, hi, k) = (0.2f64.ln(), 5.0f64.ln(), 25);
    (0..k).map(|i| (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp()).collect()
}

/// First-order gap and second-order lower bound between the median and mean tests
/// for the normal model with a prior of density `g0` at θ0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticGap {
    pub c1_gap: f64,
    pub c2_gap_lower: f64,
}

pub fn statistic_gap(g0: f64, alpha: f64) -> Result<StatisticGap, AnalysisError> {
    if !(g0 > 0.0 && g0.is_finite()) {
        return Err(AnalysisError::InvalidInput(format!("g0 must be positive, got {g0}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidProbability("alpha", alpha));
    }
    let z = std_normal_quantile(1.0 - alpha)?;
    let core = std_normal_pdf(z) - alpha * z;
    Ok(StatisticGap {
        c1_gap: g0 * core * ((2.0 * PI).sqrt() - 2.0),
        c2_gap_lower: g0 * g0 * z * core * (2.0 * PI - 4.0),
    })
}
