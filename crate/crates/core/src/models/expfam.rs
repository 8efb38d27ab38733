//! One-parameter exponential families `b(x) exp(θx − a(θ))` and the UMP test on the sample mean.

use super::{ModelError, Statistic, TestSetup};
use crate::numkernel::{brent, reg_gamma_pair, std_normal_cdf, std_normal_quantile, NumError};
use rand::RngCore;
use rand_distr::{Distribution, Exp, StandardNormal};
use std::fmt::Debug;

/// How the user-facing parameter relates to the natural parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// User parameter is the natural parameter.
    Natural,
    /// Natural parameter is the negated user parameter (e.g. an exponential rate).
    Negated,
}

impl Orientation {
    pub fn to_natural(self, theta: f64) -> f64 {
        match self {
            Orientation::Natural => theta,
            Orientation::Negated => -theta,
        }
    }

    pub fn from_natural(self, theta: f64) -> f64 {
        self.to_natural(theta)
    }
}

/// A one-parameter exponential family. All methods take the natural parameter.
pub trait ExpFamily: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    /// Open natural-parameter interval.
    fn theta_interval(&self) -> (f64, f64);
    fn orientation(&self) -> Orientation {
        Orientation::Natural
    }
    /// Mean `a'(θ)`.
    fn mu(&self, theta: f64) -> f64;
    /// Standard deviation `√a''(θ)`.
    fn sigma(&self, theta: f64) -> f64;
    /// `a'''(θ)/σ³`.
    fn rho3(&self, theta: f64) -> f64;
    /// `a''''(θ)/σ⁴`.
    fn rho4(&self, theta: f64) -> f64;
    /// Exact CDF of `√n(X̄ − μ(θ))/σ(θ)` at `t`, when available.
    fn mean_statistic_cdf(&self, _theta: f64, _n: u64, _t: f64) -> Option<f64> {
        None
    }
    /// Exact survival function of the same statistic.
    fn mean_statistic_sf(&self, theta: f64, n: u64, t: f64) -> Option<f64> {
        self.mean_statistic_cdf(theta, n, t).map(|c| 1.0 - c)
    }
    /// One observation.
    fn sample(&self, theta: f64, rng: &mut dyn RngCore) -> f64;
}

/// `N(θ, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalMean;

impl ExpFamily for NormalMean {
    fn name(&self) -> &'static str {
        "normal-mean"
    }
    fn theta_interval(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn mu(&self, theta: f64) -> f64 {
        theta
    }
    fn sigma(&self, _theta: f64) -> f64 {
        1.0
    }
    fn rho3(&self, _theta: f64) -> f64 {
        0.0
    }
    fn rho4(&self, _theta: f64) -> f64 {
        0.0
    }
    fn mean_statistic_cdf(&self, _theta: f64, _n: u64, t: f64) -> Option<f64> {
        Some(std_normal_cdf(t))
    }
    fn mean_statistic_sf(&self, _theta: f64, _n: u64, t: f64) -> Option<f64> {
        Some(std_normal_cdf(-t))
    }
    fn sample(&self, theta: f64, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        theta + z
    }
}

/// Exponential observations with rate `λ`; natural parameter `θ = −λ < 0`.
///
/// The user-facing parameter is the rate, so testing `H0: θ ≤ θ0` in natural
/// terms is testing `H0: λ ≥ λ0` in rate terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialRate;

impl ExponentialRate {
    fn pivot(n: u64, t: f64) -> f64 {
        let nf = n as f64;
        nf + t * nf.sqrt()
    }
}

impl ExpFamily for ExponentialRate {
    fn name(&self) -> &'static str {
        "exp-rate"
    }
    fn theta_interval(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, 0.0)
    }
    fn orientation(&self) -> Orientation {
        Orientation::Negated
    }
    fn mu(&self, theta: f64) -> f64 {
        -1.0 / theta
    }
    fn sigma(&self, theta: f64) -> f64 {
        -1.0 / theta
    }
    fn rho3(&self, _theta: f64) -> f64 {
        2.0
    }
    fn rho4(&self, _theta: f64) -> f64 {
        6.0
    }
    // λ·ΣXᵢ ~ Gamma(n, 1) whatever the rate.
    fn mean_statistic_cdf(&self, _theta: f64, n: u64, t: f64) -> Option<f64> {
        Some(reg_gamma_pair(n as f64, Self::pivot(n, t)).0)
    }
    fn mean_statistic_sf(&self, _theta: f64, n: u64, t: f64) -> Option<f64> {
        Some(reg_gamma_pair(n as f64, Self::pivot(n, t)).1)
    }
    fn sample(&self, theta: f64, rng: &mut dyn RngCore) -> f64 {
        Exp::new(-theta).expect("rate must be positive").sample(rng)
    }
}

fn require_mean(setup: &TestSetup) -> Result<(), ModelError> {
    setup.validate()?;
    if setup.statistic != Statistic::MeanUmp {
        return Err(ModelError::WrongStatistic { needed: Statistic::MeanUmp, got: setup.statistic });
    }
    Ok(())
}

/// Exact critical value `k` with `P_θ0(√n(X̄ − μ0)/σ0 > k) = α`.
pub fn ump_critical_value(model: &dyn ExpFamily, setup: &TestSetup) -> Result<f64, ModelError> {
    require_mean(setup)?;
    let t0 = model.orientation().to_natural(setup.theta0);
    let (lo, hi) = model.theta_interval();
    if !(t0 > lo && t0 < hi) {
        return Err(ModelError::OutsideInterval { theta: setup.theta0 });
    }
    let n = setup.n;
    let sf = |k: f64| model.mean_statistic_sf(t0, n, k);
    if sf(0.0).is_none() {
        return Err(ModelError::MissingExactCdf(model.name()));
    }
    let h = |k: f64| sf(k).unwrap_or(f64::NAN) - setup.alpha;
    let z = setup.z_alpha()?;
    let (mut lo, mut hi) = (z - 1.0, z + 1.0);
    let mut step = 1.0;
    while h(lo) < 0.0 {
        lo -= step;
        step *= 2.0;
    }
    step = 1.0;
    while h(hi) > 0.0 {
        hi += step;
        step *= 2.0;
    }
    Ok(brent(h, lo, hi, 1e-14, 500).map_err(NumError::from)?)
}

/// Cornish-Fisher approximation to the critical value from the null skewness and kurtosis.
pub fn cornish_fisher_critical(rho30: f64, rho40: f64, alpha: f64, n: u64) -> Result<f64, ModelError> {
    if n < 1 {
        return Err(ModelError::InvalidSetup("n must be at least 1".into()));
    }
    let z = std_normal_quantile(1.0 - alpha)?;
    let nf = n as f64;
    let z2 = z * z;
    let z3 = z2 * z;
    Ok(z + (z2 - 1.0) * rho30 / (6.0 * nf.sqrt())
        + ((z3 - 3.0 * z) * rho40 / 24.0 - (2.0 * z3 - 5.0 * z) * rho30 * rho30 / 36.0) / nf)
}

/// Exact power `(β, 1 − β)` of the UMP mean test at `theta` (user parameterization).
pub fn power_mean_test_pair(model: &dyn ExpFamily, theta: f64, setup: &TestSetup) -> Result<(f64, f64), ModelError> {
    let k = ump_critical_value(model, setup)?;
    let o = model.orientation();
    let (t0, t) = (o.to_natural(setup.theta0), o.to_natural(theta));
    let (lo, hi) = model.theta_interval();
    if !(t > lo && t < hi) {
        return Err(ModelError::OutsideInterval { theta });
    }
    Ok(power_at_natural(model, t, t0, setup.n, k))
}

pub(crate) fn power_at_natural(model: &dyn ExpFamily, t: f64, t0: f64, n: u64, k: f64) -> (f64, f64) {
    let nf = n as f64;
    let shifted = (nf.sqrt() * (model.mu(t0) - model.mu(t)) + k * model.sigma(t0)) / model.sigma(t);
    let beta = model.mean_statistic_sf(t, n, shifted).expect("exact cdf checked by caller");
    let comp = model.mean_statistic_cdf(t, n, shifted).expect("exact cdf checked by caller");
    (beta, comp)
}

/// Exact power of the UMP mean test at `theta` (user parameterization).
pub fn power_mean_test(model: &dyn ExpFamily, theta: f64, setup: &TestSetup) -> Result<f64, ModelError> {
    power_mean_test_pair(model, theta, setup).map(|p| p.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::gamma_upper_quantile;

    fn setup(theta0: f64, alpha: f64, n: u64) -> TestSetup {
        TestSetup::new(Statistic::MeanUmp, theta0, alpha, n).unwrap()
    }

    #[test]
    fn normal_critical_value_is_z() {
        for n in [1, 7, 100] {
            let k = ump_critical_value(&NormalMean, &setup(0.0, 0.05, n)).unwrap();
            assert!((k - 1.644_853_626_951_472_7).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_critical_values() {
        let k = ump_critical_value(&ExponentialRate, &setup(1.0, 0.05, 1)).unwrap();
        assert!((k - 1.995_732_273_553_991).abs() < 1e-9);
        // Gamma(30, 30) quantile route
        let g = gamma_upper_quantile(30.0, 30.0, 0.05).unwrap();
        let k = ump_critical_value(&ExponentialRate, &setup(1.0, 0.05, 30)).unwrap();
        assert!((k - 30f64.sqrt() * (g - 1.0)).abs() < 1e-9);
        assert!((k - 1.741_935_239_509_352_3).abs() < 1e-9);
        // the critical value does not depend on the null rate
        let k2 = ump_critical_value(&ExponentialRate, &setup(3.5, 0.05, 30)).unwrap();
        assert!((k - k2).abs() < 1e-12);
    }

    #[test]
    fn exponential_critical_value_approaches_z() {
        let z = 1.644_853_626_951_472_7;
        let mut prev = f64::INFINITY;
        for n in [10, 100, 1000, 10000] {
            let k = ump_critical_value(&ExponentialRate, &setup(1.0, 0.05, n)).unwrap();
            assert!((k - z).abs() < prev);
            prev = (k - z).abs();
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn cornish_fisher_values() {
        let z = 1.644_853_626_951_472_7;
        assert!((cornish_fisher_critical(0.0, 0.0, 0.05, 3).unwrap() - z).abs() < 1e-12);
        let v = cornish_fisher_critical(2.0, 6.0, 0.05, 1).unwrap();
        assert!((v - 2.017_152_766_502_259_5).abs() < 1e-12);
        let far = cornish_fisher_critical(2.0, 6.0, 0.05, 1_000_000_000).unwrap();
        assert!((far - z).abs() < 1e-4);
    }

    #[test]
    fn cornish_fisher_tracks_exact_exponential_critical_value() {
        // Error of the two-term expansion is O(n^{-3/2}).
        for n in [25u64, 100, 400] {
            let k = ump_critical_value(&ExponentialRate, &setup(1.0, 0.05, n)).unwrap();
            let cf = cornish_fisher_critical(2.0, 6.0, 0.05, n).unwrap();
            assert!((k - cf).abs() * (n as f64).powf(1.5) < 1.0, "n={n}");
        }
    }

    #[test]
    fn power_at_null_is_alpha() {
        for n in [1, 5, 30] {
            let s = setup(0.0, 0.05, n);
            assert!((power_mean_test(&NormalMean, 0.0, &s).unwrap() - 0.05).abs() < 1e-8);
            let s = setup(1.0, 0.05, n);
            assert!((power_mean_test(&ExponentialRate, 1.0, &s).unwrap() - 0.05).abs() < 1e-8);
        }
    }

    #[test]
    fn normal_power_closed_form() {
        let p = power_mean_test(&NormalMean, 0.5, &setup(0.0, 0.05, 4)).unwrap();
        assert!((p - 0.259_511_022_841_444_07).abs() < 1e-12);
    }

    #[test]
    fn exponential_power_direction_and_limits() {
        let s = setup(1.0, 0.05, 10);
        // smaller rates are the alternative
        let lo = power_mean_test(&ExponentialRate, 0.5, &s).unwrap();
        let hi = power_mean_test(&ExponentialRate, 2.0, &s).unwrap();
        assert!(lo > 0.05 && hi < 0.05);
        assert!(power_mean_test(&ExponentialRate, 1e-6, &s).unwrap() > 1.0 - 1e-9);
        assert!(power_mean_test(&NormalMean, 40.0, &setup(0.0, 0.05, 4)).unwrap() > 1.0 - 1e-12);
        assert!(power_mean_test(&ExponentialRate, -1.0, &s).is_err());
    }

    #[test]
    fn built_in_constants() {
        for t in [-3.0, -1.0, -0.2] {
            assert_eq!(ExponentialRate.rho3(t), 2.0);
            assert_eq!(ExponentialRate.rho4(t), 6.0);
        }
        assert_eq!(ExponentialRate.sigma(-1.0), 1.0);
        assert_eq!(NormalMean.sigma(0.3), 1.0);
        assert_eq!(NormalMean.rho3(0.3), 0.0);
    }

    #[test]
    fn wrong_statistic_rejected() {
        let s = TestSetup::new(Statistic::Median, 0.0, 0.05, 5).unwrap();
        assert!(matches!(ump_critical_value(&NormalMean, &s), Err(ModelError::WrongStatistic { .. })));
    }
}
