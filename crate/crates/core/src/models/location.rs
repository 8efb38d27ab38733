//! Location families `f(x − θ)` with median 0 and the sample-median test.

use super::{ModelError, Statistic, TestSetup};
use crate::numkernel::{log_binomial, reg_inc_beta_pair, std_normal_cdf, std_normal_pdf, std_normal_sf};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{LN_2, PI};
use std::fmt::Debug;

/// Standard member of a location family. Its median must be 0 and `f(0) > 0`.
pub trait LocationModel: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    fn f0(&self) -> f64 {
        self.pdf(0.0)
    }
    fn f0_prime(&self) -> f64;
    fn f0_second(&self) -> f64;
    fn sample_noise(&self, rng: &mut dyn RngCore) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NormalLocation;

impl LocationModel for NormalLocation {
    fn name(&self) -> &'static str {
        "normal"
    }
    fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        std_normal_sf(x)
    }
    fn f0_prime(&self) -> f64 {
        0.0
    }
    fn f0_second(&self) -> f64 {
        -std_normal_pdf(0.0)
    }
    fn sample_noise(&self, rng: &mut dyn RngCore) -> f64 {
        StandardNormal.sample(rng)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CauchyLocation;

impl LocationModel for CauchyLocation {
    fn name(&self) -> &'static str {
        "cauchy"
    }
    fn pdf(&self, x: f64) -> f64 {
        1.0 / (PI * (1.0 + x * x))
    }
    fn cdf(&self, x: f64) -> f64 {
        self.sf(-x)
    }
    fn sf(&self, x: f64) -> f64 {
        if x > 0.0 {
            (1.0 / x).atan() / PI
        } else {
            0.5 - x.atan() / PI
        }
    }
    fn f0_prime(&self) -> f64 {
        0.0
    }
    fn f0_second(&self) -> f64 {
        -2.0 / PI
    }
    fn sample_noise(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.random();
        (PI * (u - 0.5)).tan()
    }
}

/// Gumbel (maximum) distribution shifted so that its median is 0. Skewed, `f'(0) ≠ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GumbelLocation;

impl GumbelLocation {
    // F(x) = exp(-exp(-(x + m))) with m = -ln ln 2, so exp(-m) = ln 2.
    fn shift() -> f64 {
        -LN_2.ln()
    }
    fn e(x: f64) -> f64 {
        (-(x + Self::shift())).exp()
    }
}

impl LocationModel for GumbelLocation {
    fn name(&self) -> &'static str {
        "gumbel"
    }
    fn pdf(&self, x: f64) -> f64 {
        // log form: e·exp(−e) is inf·0 far in the left tail
        (-(x + Self::shift()) - Self::e(x)).exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        (-Self::e(x)).exp()
    }
    fn sf(&self, x: f64) -> f64 {
        -(-Self::e(x)).exp_m1()
    }
    fn f0(&self) -> f64 {
        0.5 * LN_2
    }
    fn f0_prime(&self) -> f64 {
        self.f0() * (LN_2 - 1.0)
    }
    fn f0_second(&self) -> f64 {
        self.f0() * ((LN_2 - 1.0).powi(2) - LN_2)
    }
    fn sample_noise(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.random();
        -(-u.ln()).ln() - Self::shift()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Fractional part of n/2.
    pub fn frac_half(self) -> f64 {
        match self {
            Parity::Even => 0.0,
            Parity::Odd => 0.5,
        }
    }
}

/// Which closed form to use for the linear coefficient of the second-order term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum F23Form {
    /// `1/4 − (1 − 2{n/2})²/2`; −1/4 for even n, 1/4 for odd n.
    #[default]
    Derived,
    /// `1/4 − (1/2 − {n/2})²`; 0 for even n. Does not match the exact
    /// distribution for even n and is kept only for comparison.
    Alternate,
}

/// Coefficients of `F_n(t) ≈ Φ(t) + φ(t)R₁(t)/√n + φ(t)R₂(t)/n` with
/// `R₁ = f11 t² + f12` and `R₂ = f21 t⁵ + f22 t³ + f23 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReissCoefficients {
    pub f11: f64,
    pub f12: f64,
    pub f21: f64,
    pub f22: f64,
    pub f23: f64,
    pub parity: Parity,
}

impl ReissCoefficients {
    pub fn r1(&self, t: f64) -> f64 {
        self.f11 * t * t + self.f12
    }

    pub fn r2(&self, t: f64) -> f64 {
        let t2 = t * t;
        ((self.f21 * t2 + self.f22) * t2 + self.f23) * t
    }
}

pub fn reiss_coefficients(model: &dyn LocationModel, n: u64) -> ReissCoefficients {
    reiss_coefficients_with(model, Parity::of(n), F23Form::Derived)
}

pub fn reiss_coefficients_with(model: &dyn LocationModel, parity: Parity, form: F23Form) -> ReissCoefficients {
    let f0 = model.f0();
    let fp = model.f0_prime();
    let fpp = model.f0_second();
    let fr = parity.frac_half();
    let r = fp / (f0 * f0);
    let f23 = match form {
        F23Form::Derived => 0.25 - 0.5 * (1.0 - 2.0 * fr).powi(2),
        F23Form::Alternate => 0.25 - (0.5 - fr).powi(2),
    };
    ReissCoefficients {
        f11: fp / (4.0 * f0 * f0),
        f12: -(1.0 - 2.0 * fr),
        f21: -r * r / 32.0,
        f22: 0.25 + (0.5 - fr) * fp / (2.0 * f0 * f0) + fpp / (24.0 * f0 * f0 * f0),
        f23,
        parity,
    }
}

fn median_index(n: u64) -> u64 {
    n / 2
}

fn standardize(model: &dyn LocationModel, n: u64, t: f64) -> f64 {
    t / (2.0 * model.f0() * (n as f64).sqrt())
}

/// Density of `2f(0)√n(T_n − θ)` where `T_n = X_(⌊n/2⌋+1)`.
pub fn median_pdf_exact(model: &dyn LocationModel, n: u64, t: f64) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let k = median_index(n);
    let u = standardize(model, n, t);
    let fu = model.pdf(u);
    if fu <= 0.0 {
        return 0.0;
    }
    let (cdf, sf) = (model.cdf(u), model.sf(u));
    let mut log_d = (n as f64).ln() + log_binomial(n - 1, k).expect("k <= n - 1") + fu.ln()
        - (2.0 * model.f0() * (n as f64).sqrt()).ln();
    if k > 0 {
        log_d += k as f64 * cdf.ln();
    }
    if n - k - 1 > 0 {
        log_d += (n - k - 1) as f64 * sf.ln();
    }
    log_d.exp()
}

pub(crate) fn median_cdf_pair(model: &dyn LocationModel, n: u64, t: f64) -> (f64, f64) {
    assert!(n >= 1, "n must be at least 1");
    let k = median_index(n);
    let u = standardize(model, n, t);
    reg_inc_beta_pair((k + 1) as f64, (n - k) as f64, model.cdf(u), model.sf(u))
}

/// CDF of `2f(0)√n(T_n − θ)`, as an incomplete beta function.
pub fn median_cdf_exact(model: &dyn LocationModel, n: u64, t: f64) -> f64 {
    median_cdf_pair(model, n, t).0
}

/// Survival function of `2f(0)√n(T_n − θ)`.
pub fn median_sf_exact(model: &dyn LocationModel, n: u64, t: f64) -> f64 {
    median_cdf_pair(model, n, t).1
}

/// Two-term Edgeworth-type approximation of the median CDF.
pub fn median_cdf_edgeworth(model: &dyn LocationModel, n: u64, t: f64) -> f64 {
    median_cdf_edgeworth_with(&reiss_coefficients(model, n), n, t)
}

pub fn median_cdf_edgeworth_with(coef: &ReissCoefficients, n: u64, t: f64) -> f64 {
    let nf = n as f64;
    std_normal_cdf(t) + std_normal_pdf(t) * (coef.r1(t) / nf.sqrt() + coef.r2(t) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedianCdfMode {
    Exact,
    Edgeworth,
}

/// Power `(β, 1 − β)` of the test rejecting when `√n(T_n − θ0) > z_α/(2f(0))`.
pub fn power_median_test_pair(
    model: &dyn LocationModel,
    theta: f64,
    setup: &TestSetup,
    mode: MedianCdfMode,
) -> Result<(f64, f64), ModelError> {
    setup.validate()?;
    if setup.statistic != Statistic::Median {
        return Err(ModelError::WrongStatistic { needed: Statistic::Median, got: setup.statistic });
    }
    let z = setup.z_alpha()?;
    let n = setup.n;
    let t = z - 2.0 * model.f0() * (n as f64).sqrt() * (theta - setup.theta0);
    Ok(match mode {
        MedianCdfMode::Exact => {
            let (c, s) = median_cdf_pair(model, n, t);
            (s, c)
        }
        MedianCdfMode::Edgeworth => {
            let c = median_cdf_edgeworth(model, n, t);
            (1.0 - c, c)
        }
    })
}

pub fn power_median_test(
    model: &dyn LocationModel,
    theta: f64,
    setup: &TestSetup,
    mode: MedianCdfMode,
) -> Result<f64, ModelError> {
    power_median_test_pair(model, theta, setup, mode).map(|p| p.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{integrate, QuadratureConfig};

    fn models() -> [&'static dyn LocationModel; 3] {
        [&NormalLocation, &CauchyLocation, &GumbelLocation]
    }

    #[test]
    fn medians_are_zero_and_derivatives_match() {
        for m in models() {
            assert!((m.cdf(0.0) - 0.5).abs() < 1e-15, "{}", m.name());
            assert!((m.f0() - m.pdf(0.0)).abs() < 1e-15);
            let h = 1e-4;
            let d1 = (m.pdf(h) - m.pdf(-h)) / (2.0 * h);
            let d2 = (m.pdf(h) - 2.0 * m.pdf(0.0) + m.pdf(-h)) / (h * h);
            assert!((d1 - m.f0_prime()).abs() < 1e-7, "{}", m.name());
            assert!((d2 - m.f0_second()).abs() < 1e-6, "{}", m.name());
            assert!((m.cdf(1.3) + m.sf(1.3) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pdf_single_and_three_observations() {
        assert!((median_pdf_exact(&NormalLocation, 1, 0.0) - 0.5).abs() < 1e-15);
        assert!((median_pdf_exact(&NormalLocation, 3, 0.0) - 0.433_012_701_892_219_3).abs() < 1e-14);
    }

    #[test]
    fn cdf_single_observation_and_symmetry() {
        let f0 = NormalLocation.f0();
        for t in [-1.0, 0.2, 2.5] {
            let v = median_cdf_exact(&NormalLocation, 1, t);
            assert!((v - std_normal_cdf(t / (2.0 * f0))).abs() < 1e-14);
        }
        for n in [1, 3, 11, 51] {
            assert!((median_cdf_exact(&NormalLocation, n, 0.0) - 0.5).abs() < 1e-13);
            assert!((median_cdf_exact(&CauchyLocation, n, 0.0) - 0.5).abs() < 1e-13);
        }
        assert!(median_cdf_exact(&NormalLocation, 10, 50.0) > 1.0 - 1e-14);
    }

    #[test]
    fn pdf_integrates_to_cdf_difference() {
        let cfg = QuadratureConfig::adaptive(1e-11);
        for m in models() {
            for n in [2u64, 7, 20] {
                let r = integrate(|t| median_pdf_exact(m, n, t), -1.0, 0.7, &cfg).unwrap();
                let d = median_cdf_exact(m, n, 0.7) - median_cdf_exact(m, n, -1.0);
                assert!((r.value - d).abs() < 1e-9, "{} n={n}", m.name());
            }
        }
    }

    #[test]
    fn reiss_values_for_symmetric_models() {
        let c = reiss_coefficients(&NormalLocation, 10);
        assert_eq!((c.f11, c.f12, c.f21), (0.0, -1.0, 0.0));
        assert!((c.f22 - (0.25 - PI / 12.0)).abs() < 1e-15);
        assert_eq!(c.f23, -0.25);
        assert_eq!(reiss_coefficients(&NormalLocation, 11).f12, 0.0);
        assert_eq!(reiss_coefficients(&NormalLocation, 11).f23, 0.25);
        let c = reiss_coefficients(&CauchyLocation, 4);
        assert!((c.f22 - (0.25 - PI * PI / 12.0)).abs() < 1e-15);
        let alt = reiss_coefficients_with(&NormalLocation, Parity::Even, F23Form::Alternate);
        assert_eq!(alt.f23, 0.0);
        assert_eq!(reiss_coefficients_with(&NormalLocation, Parity::Odd, F23Form::Alternate).f23, 0.25);
    }

    #[test]
    fn edgeworth_at_zero_for_odd_symmetric() {
        for n in [5, 21] {
            assert!((median_cdf_edgeworth(&NormalLocation, n, 0.0) - 0.5).abs() < 1e-15);
        }
        let exact = median_cdf_exact(&NormalLocation, 100, 1.0);
        assert!((median_cdf_edgeworth(&NormalLocation, 100, 1.0) - exact).abs() < 0.005);
    }

    #[test]
    fn median_power_limits() {
        let s = TestSetup::new(Statistic::Median, 0.0, 0.5, 7).unwrap();
        assert!((power_median_test(&NormalLocation, 0.0, &s, MedianCdfMode::Exact).unwrap() - 0.5).abs() < 1e-13);
        let s = TestSetup::new(Statistic::Median, 0.0, 0.05, 7).unwrap();
        assert!(power_median_test(&CauchyLocation, 1e4, &s, MedianCdfMode::Exact).unwrap() > 1.0 - 1e-9);
        assert!((power_median_test(&GumbelLocation, 0.0, &s, MedianCdfMode::Exact).unwrap() - 0.05).abs() < 0.03);
    }
}
