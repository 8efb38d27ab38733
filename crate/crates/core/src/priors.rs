//! Proper prior densities with two derivatives, tail masses and the scale family.

use crate::numkernel::{
    integrate_with_breaks, ln_gamma, reg_gamma_pair, reg_inc_beta_pair, std_normal_cdf, std_normal_pdf,
    QuadratureConfig, QuadratureError,
};
use rand::{RngCore, SeedableRng};
use rand_distr::{Cauchy, Distribution, FisherF, Gamma, Normal, StudentT};
use std::f64::consts::PI;
use std::fmt::{self, Debug};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorError {
    #[error("invalid {kind} prior: {reason}")]
    InvalidParameter { kind: &'static str, reason: String },
    #[error("prior mass of the alternative is {lambda}; it must lie strictly inside (0, 1)")]
    Degenerate { lambda: f64 },
    #[error("prior failed validation: {}", .0.join("; "))]
    ValidationFailed(Vec<String>),
    #[error("prior {0} has no sampler")]
    NoSampler(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A density with its first two derivatives.
pub trait PriorDensity: Send + Sync + Debug {
    fn density(&self, theta: f64) -> f64;
    fn d1(&self, theta: f64) -> f64;
    fn d2(&self, theta: f64) -> f64;
    fn support(&self) -> (f64, f64);
    fn cdf(&self, _theta: f64) -> Option<f64> {
        None
    }
    fn sample(&self, _rng: &mut dyn RngCore) -> Option<f64> {
        None
    }
    fn label(&self) -> String;
    /// Rough centre and spread of the mass, used to place quadrature breakpoints.
    fn location_scale(&self) -> (f64, f64);
}

/// Shared handle to an immutable prior.
#[derive(Clone)]
pub struct Prior(Arc<dyn PriorDensity>);

impl Debug for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prior({})", self.0.label())
    }
}

impl Prior {
    pub fn from_density<D: PriorDensity + 'static>(d: D) -> Self {
        Prior(Arc::new(d))
    }

    pub fn g(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if theta < lo || theta > hi {
            0.0
        } else {
            self.0.density(theta)
        }
    }

    pub fn g1(&self, theta: f64) -> f64 {
        self.0.d1(theta)
    }

    pub fn g2(&self, theta: f64) -> f64 {
        self.0.d2(theta)
    }

    pub fn support(&self) -> (f64, f64) {
        self.0.support()
    }

    pub fn cdf(&self, theta: f64) -> Option<f64> {
        self.0.cdf(theta)
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<f64, PriorError> {
        self.0.sample(rng).ok_or_else(|| PriorError::NoSampler(self.label()))
    }

    pub fn has_sampler(&self) -> bool {
        // Probing with a throwaway generator is cheap and keeps the trait small.
        let mut probe = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        self.0.sample(&mut probe).is_some()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    pub fn location_scale(&self) -> (f64, f64) {
        self.0.location_scale()
    }

    /// `θ ↦ g(θ/τ)/τ`.
    pub fn scaled(&self, tau: f64) -> Result<Prior, PriorError> {
        scale_prior(self, tau)
    }

    /// The law of `−θ`.
    pub fn reflected(&self) -> Prior {
        Prior::from_density(Reflected { base: self.clone() })
    }
}

/// Built-in prior families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    /// `N(0, τ²)`
    Normal { tau: f64 },
    /// `θ/τ ~ t_m`
    StudentT { dof: f64, tau: f64 },
    /// `θ/τ ~ Cauchy`
    Cauchy { tau: f64 },
    /// Gamma with shape `r` and rate `r − 1` (mode at 1).
    GammaMode1 { r: f64 },
    /// `θ/τ ~ F(2r, 2s)` with `τ = r(s+1)/(s(r−1))` (mode at 1).
    FMode1 { r: f64, s: f64 },
}

pub fn builtin_prior(kind: PriorKind) -> Result<Prior, PriorError> {
    let positive = |kind: &'static str, name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(PriorError::InvalidParameter { kind, reason: format!("{name} must be positive and finite, got {v}") })
        }
    };
    let above_one = |kind: &'static str, name: &str, v: f64| {
        if v > 1.0 && v.is_finite() {
            Ok(())
        } else {
            Err(PriorError::InvalidParameter { kind, reason: format!("{name} must exceed 1, got {v}") })
        }
    };
    Ok(match kind {
        PriorKind::Normal { tau } => {
            positive("normal", "tau", tau)?;
            Prior::from_density(NormalPrior { tau })
        }
        PriorKind::StudentT { dof, tau } => {
            positive("t", "dof", dof)?;
            positive("t", "tau", tau)?;
            Prior::from_density(StudentTPrior::new(dof, tau))
        }
        PriorKind::Cauchy { tau } => {
            positive("cauchy", "tau", tau)?;
            Prior::from_density(CauchyPrior { tau })
        }
        PriorKind::GammaMode1 { r } => {
            above_one("gamma-mode1", "r", r)?;
            Prior::from_density(GammaMode1 { r, log_norm: r * (r - 1.0).ln() - ln_gamma(r) })
        }
        PriorKind::FMode1 { r, s } => {
            above_one("f-mode1", "r", r)?;
            positive("f-mode1", "s", s)?;
            Prior::from_density(FMode1::new(r, s))
        }
    })
}

/// `g_τ(θ) = g(θ/τ)/τ`.
pub fn scale_prior(base: &Prior, tau: f64) -> Result<Prior, PriorError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(PriorError::InvalidParameter { kind: "scaled", reason: format!("tau must be positive, got {tau}") });
    }
    Ok(Prior::from_density(Scaled { base: base.clone(), tau }))
}

fn mass_config() -> QuadratureConfig {
    QuadratureConfig::adaptive(1e-12)
}

/// Prior mass of the alternative `{θ > θ0}`.
pub fn lambda_alt(prior: &Prior, theta0: f64) -> Result<f64, PriorError> {
    let (lo, hi) = prior.support();
    let lambda = if theta0 <= lo {
        1.0
    } else if theta0 >= hi {
        0.0
    } else if let Some(c) = prior.cdf(theta0) {
        1.0 - c
    } else {
        let (c, s) = prior.location_scale();
        let mut pts = vec![theta0];
        for p in [c - s, c, c + s] {
            if p > theta0 && p < hi {
                pts.push(p);
            }
        }
        pts.push(hi);
        integrate_with_breaks(|t| prior.g(t), &pts, &mass_config())?.value
    };
    if lambda > 0.0 && lambda < 1.0 {
        Ok(lambda)
    } else {
        Err(PriorError::Degenerate { lambda })
    }
}

// ---- built-in densities ----

#[derive(Debug, Clone, Copy)]
struct NormalPrior {
    tau: f64,
}

impl PriorDensity for NormalPrior {
    fn density(&self, t: f64) -> f64 {
        std_normal_pdf(t / self.tau) / self.tau
    }
    fn d1(&self, t: f64) -> f64 {
        -t / (self.tau * self.tau) * self.density(t)
    }
    fn d2(&self, t: f64) -> f64 {
        let v = self.tau * self.tau;
        (t * t / (v * v) - 1.0 / v) * self.density(t)
    }
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        Some(std_normal_cdf(t / self.tau))
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(Normal::new(0.0, self.tau).ok()?.sample(rng))
    }
    fn label(&self) -> String {
        format!("normal:{}", self.tau)
    }
    fn location_scale(&self) -> (f64, f64) {
        (0.0, self.tau)
    }
}

#[derive(Debug, Clone, Copy)]
struct StudentTPrior {
    m: f64,
    tau: f64,
    log_c: f64,
}

impl StudentTPrior {
    fn new(m: f64, tau: f64) -> Self {
        let log_c = ln_gamma(0.5 * (m + 1.0)) - ln_gamma(0.5 * m) - 0.5 * (m * PI).ln();
        Self { m, tau, log_c }
    }
    fn base(&self, x: f64) -> f64 {
        (self.log_c - 0.5 * (self.m + 1.0) * (x * x / self.m).ln_1p()).exp()
    }
    // d/dx log t(x)
    fn score(&self, x: f64) -> f64 {
        -(self.m + 1.0) * x / (self.m + x * x)
    }
    fn score_prime(&self, x: f64) -> f64 {
        let q = self.m + x * x;
        -(self.m + 1.0) * (self.m - x * x) / (q * q)
    }
}

impl PriorDensity for StudentTPrior {
    fn density(&self, t: f64) -> f64 {
        self.base(t / self.tau) / self.tau
    }
    fn d1(&self, t: f64) -> f64 {
        let x = t / self.tau;
        self.base(x) * self.score(x) / (self.tau * self.tau)
    }
    fn d2(&self, t: f64) -> f64 {
        let x = t / self.tau;
        let s = self.score(x);
        self.base(x) * (s * s + self.score_prime(x)) / self.tau.powi(3)
    }
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        let x = t / self.tau;
        let q = self.m + x * x;
        // P(|T| > |x|) = I_{m/(m+x²)}(m/2, 1/2)
        let two_tail = reg_inc_beta_pair(0.5 * self.m, 0.5, self.m / q, x * x / q).0;
        Some(if x <= 0.0 { 0.5 * two_tail } else { 1.0 - 0.5 * two_tail })
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(self.tau * StudentT::new(self.m).ok()?.sample(rng))
    }
    fn label(&self) -> String {
        format!("t:{}:{}", self.m, self.tau)
    }
    fn location_scale(&self) -> (f64, f64) {
        (0.0, self.tau)
    }
}

#[derive(Debug, Clone, Copy)]
struct CauchyPrior {
    tau: f64,
}

impl PriorDensity for CauchyPrior {
    fn density(&self, t: f64) -> f64 {
        let x = t / self.tau;
        1.0 / (PI * self.tau * (1.0 + x * x))
    }
    fn d1(&self, t: f64) -> f64 {
        let x = t / self.tau;
        let q = 1.0 + x * x;
        -2.0 * x / (PI * q * q) / (self.tau * self.tau)
    }
    fn d2(&self, t: f64) -> f64 {
        let x = t / self.tau;
        let q = 1.0 + x * x;
        (6.0 * x * x - 2.0) / (PI * q * q * q) / self.tau.powi(3)
    }
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        let x = t / self.tau;
        Some(if x < 0.0 { (-1.0 / x).atan() / PI } else { 0.5 + x.atan() / PI })
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(Cauchy::new(0.0, self.tau).ok()?.sample(rng))
    }
    fn label(&self) -> String {
        format!("cauchy:{}", self.tau)
    }
    fn location_scale(&self) -> (f64, f64) {
        (0.0, self.tau)
    }
}

#[derive(Debug, Clone, Copy)]
struct GammaMode1 {
    r: f64,
    log_norm: f64,
}

impl GammaMode1 {
    fn rate(&self) -> f64 {
        self.r - 1.0
    }
    fn score(&self, t: f64) -> f64 {
        (self.r - 1.0) / t - self.rate()
    }
}

impl PriorDensity for GammaMode1 {
    fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (self.log_norm + (self.r - 1.0) * t.ln() - self.rate() * t).exp()
    }
    fn d1(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.density(t) * self.score(t)
    }
    fn d2(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let s = self.score(t);
        self.density(t) * (s * s - (self.r - 1.0) / (t * t))
    }
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        Some(reg_gamma_pair(self.r, self.rate() * t.max(0.0)).0)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(Gamma::new(self.r, 1.0 / self.rate()).ok()?.sample(rng))
    }
    fn label(&self) -> String {
        format!("gamma-mode1:{}", self.r)
    }
    fn location_scale(&self) -> (f64, f64) {
        (self.r / self.rate(), self.r.sqrt() / self.rate())
    }
}

#[derive(Debug, Clone, Copy)]
struct FMode1 {
    r: f64,
    s: f64,
    tau: f64,
    log_norm: f64,
}

impl FMode1 {
    fn new(r: f64, s: f64) -> Self {
        let tau = r * (s + 1.0) / (s * (r - 1.0));
        let log_beta = ln_gamma(r) + ln_gamma(s) - ln_gamma(r + s);
        Self { r, s, tau, log_norm: r * (r / s).ln() - log_beta }
    }
    // density of F(2r, 2s) at x > 0
    fn base(&self, x: f64) -> f64 {
        let (r, s) = (self.r, self.s);
        (self.log_norm + (r - 1.0) * x.ln() - (r + s) * (r * x / s).ln_1p()).exp()
    }
    fn score(&self, x: f64) -> f64 {
        let (r, s) = (self.r, self.s);
        (r - 1.0) / x - (r + s) * (r / s) / (1.0 + r * x / s)
    }
    fn score_prime(&self, x: f64) -> f64 {
        let (r, s) = (self.r, self.s);
        let q = 1.0 + r * x / s;
        -(r - 1.0) / (x * x) + (r + s) * (r / s) * (r / s) / (q * q)
    }
}

impl PriorDensity for FMode1 {
    fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.base(t / self.tau) / self.tau
    }
    fn d1(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let x = t / self.tau;
        self.base(x) * self.score(x) / (self.tau * self.tau)
    }
    fn d2(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let x = t / self.tau;
        let sc = self.score(x);
        self.base(x) * (sc * sc + self.score_prime(x)) / self.tau.powi(3)
    }
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        let rx = self.r * t / self.tau;
        let d = rx + self.s;
        Some(reg_inc_beta_pair(self.r, self.s, rx / d, self.s / d).0)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(self.tau * FisherF::new(2.0 * self.r, 2.0 * self.s).ok()?.sample(rng))
    }
    fn label(&self) -> String {
        format!("f-mode1:{}:{}", self.r, self.s)
    }
    fn location_scale(&self) -> (f64, f64) {
        (1.0, self.tau)
    }
}

#[derive(Debug, Clone)]
struct Scaled {
    base: Prior,
    tau: f64,
}

impl PriorDensity for Scaled {
    fn density(&self, t: f64) -> f64 {
        self.base.g(t / self.tau) / self.tau
    }
    fn d1(&self, t: f64) -> f64 {
        self.base.g1(t / self.tau) / (self.tau * self.tau)
    }
    fn d2(&self, t: f64) -> f64 {
        self.base.g2(t / self.tau) / self.tau.powi(3)
    }
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (lo * self.tau, hi * self.tau)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        self.base.cdf(t / self.tau)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        self.base.0.sample(rng).map(|x| x * self.tau)
    }
    fn label(&self) -> String {
        format!("{}*{}", self.base.label(), self.tau)
    }
    fn location_scale(&self) -> (f64, f64) {
        let (c, s) = self.base.location_scale();
        (c * self.tau, s * self.tau)
    }
}

#[derive(Debug, Clone)]
struct Reflected {
    base: Prior,
}

impl PriorDensity for Reflected {
    fn density(&self, t: f64) -> f64 {
        self.base.g(-t)
    }
    fn d1(&self, t: f64) -> f64 {
        -self.base.g1(-t)
    }
    fn d2(&self, t: f64) -> f64 {
        self.base.g2(-t)
    }
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (-hi, -lo)
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        self.base.cdf(-t).map(|c| 1.0 - c)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        self.base.0.sample(rng).map(|x| -x)
    }
    fn label(&self) -> String {
        format!("reflect({})", self.base.label())
    }
    fn location_scale(&self) -> (f64, f64) {
        let (c, s) = self.base.location_scale();
        (-c, s)
    }
}

// ---- user-supplied densities ----

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A prior given as three callables plus its support.
#[derive(Clone)]
pub struct CustomPrior {
    pub label: String,
    pub g: ScalarFn,
    pub g1: ScalarFn,
    pub g2: ScalarFn,
    pub support: (f64, f64),
    /// Rough centre and spread of the mass.
    pub location_scale: (f64, f64),
}

impl Debug for CustomPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomPrior({})", self.label)
    }
}

impl CustomPrior {
    pub fn new<G, G1, G2>(label: &str, g: G, g1: G1, g2: G2, support: (f64, f64)) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        G1: Fn(f64) -> f64 + Send + Sync + 'static,
        G2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.to_string(),
            g: Arc::new(g),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            support,
            location_scale: (0.0, 1.0),
        }
    }

    pub fn with_location_scale(mut self, center: f64, scale: f64) -> Self {
        self.location_scale = (center, scale);
        self
    }

    /// Validates normalization and derivative consistency, then builds the prior.
    pub fn build(self) -> Result<Prior, PriorError> {
        let prior = Prior::from_density(self);
        validate_prior(&prior)?;
        Ok(prior)
    }

    /// Builds without any validation. The caller vouches for normalization and derivatives.
    pub fn build_unchecked(self) -> Prior {
        Prior::from_density(self)
    }
}

impl PriorDensity for CustomPrior {
    fn density(&self, t: f64) -> f64 {
        (self.g)(t)
    }
    fn d1(&self, t: f64) -> f64 {
        (self.g1)(t)
    }
    fn d2(&self, t: f64) -> f64 {
        (self.g2)(t)
    }
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn location_scale(&self) -> (f64, f64) {
        self.location_scale
    }
}

/// Checks `g ≥ 0`, `∫g = 1 ± 1e-6` and that `g1`, `g2` match central differences of `g`.
pub fn validate_prior(prior: &Prior) -> Result<(), PriorError> {
    let mut problems = Vec::new();
    let (lo, hi) = prior.support();
    if !(lo < hi) {
        return Err(PriorError::ValidationFailed(vec![format!("empty support ({lo}, {hi})")]));
    }
    let (c, s) = prior.location_scale();
    let mut pts = vec![lo];
    for k in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        let p = c + k * s;
        if p > lo && p < hi && p > *pts.last().unwrap() {
            pts.push(p);
        }
    }
    pts.push(hi);
    match integrate_with_breaks(|t| prior.g(t), &pts, &QuadratureConfig::adaptive(1e-9)) {
        Ok(v) if (v.value - 1.0).abs() <= 1e-6 => {}
        Ok(v) => problems.push(format!("density integrates to {} instead of 1", v.value)),
        Err(e) => problems.push(format!("normalization check failed: {e}")),
    }
    let grid_lo = (c - 5.0 * s).max(lo + 0.02 * s);
    let grid_hi = (c + 5.0 * s).min(hi - 0.02 * s);
    let h = 1e-4 * s;
    for i in 0..=40 {
        let t = grid_lo + (grid_hi - grid_lo) * i as f64 / 40.0;
        let g = prior.g(t);
        if g.is_nan() || g < 0.0 {
            problems.push(format!("density is negative or undefined at {t}"));
            continue;
        }
        let (gm, gp) = (prior.g(t - h), prior.g(t + h));
        let fd1 = (gp - gm) / (2.0 * h);
        let fd2 = (gp - 2.0 * g + gm) / (h * h);
        let (g1, g2) = (prior.g1(t), prior.g2(t));
        if (fd1 - g1).abs() > 1e-5 * g1.abs().max(1.0) {
            problems.push(format!("first derivative {g1} disagrees with finite difference {fd1} at {t}"));
        }
        if (fd2 - g2).abs() > 1e-5 * g2.abs().max(1.0) {
            problems.push(format!("second derivative {g2} disagrees with finite difference {fd2} at {t}"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(PriorError::ValidationFailed(problems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtins() -> Vec<Prior> {
        [
            PriorKind::Normal { tau: 1.0 },
            PriorKind::Normal { tau: 0.3 },
            PriorKind::StudentT { dof: 3.0, tau: 1.0 },
            PriorKind::StudentT { dof: 7.5, tau: 2.0 },
            PriorKind::Cauchy { tau: 1.0 },
            PriorKind::GammaMode1 { r: 2.0 },
            PriorKind::GammaMode1 { r: 5.0 },
            PriorKind::FMode1 { r: 2.0, s: 2.0 },
            PriorKind::FMode1 { r: 3.0, s: 5.0 },
        ]
        .into_iter()
        .map(|k| builtin_prior(k).unwrap())
        .collect()
    }

    #[test]
    fn builtins_validate() {
        for p in all_builtins() {
            validate_prior(&p).unwrap_or_else(|e| panic!("{p:?}: {e}"));
        }
    }

    #[test]
    fn closed_form_cdfs_match_quadrature() {
        for p in all_builtins() {
            let (c, s) = p.location_scale();
            for t in [c - s, c, c + 0.5 * s, c + 3.0 * s] {
                let (lo, _) = p.support();
                if t <= lo {
                    continue;
                }
                let q = integrate_with_breaks(|x| p.g(x), &[lo, t], &QuadratureConfig::adaptive(1e-11)).unwrap();
                assert!((q.value - p.cdf(t).unwrap()).abs() < 1e-9, "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn normal_values_at_zero() {
        let p = builtin_prior(PriorKind::Normal { tau: 1.0 }).unwrap();
        let c = 1.0 / (2.0 * PI).sqrt();
        assert!((p.g(0.0) - c).abs() < 1e-16);
        assert_eq!(p.g1(0.0), 0.0);
        assert!((p.g2(0.0) + c).abs() < 1e-16);
        let p = builtin_prior(PriorKind::Normal { tau: 2.0 }).unwrap();
        assert!((p.g2(0.0) + c / 8.0).abs() < 1e-16);
    }

    #[test]
    fn student_t_second_derivative_at_zero() {
        // g''(0) = -c_m (m+1)/(m τ³)
        let (m, tau) = (4.0, 1.7);
        let p = builtin_prior(PriorKind::StudentT { dof: m, tau }).unwrap();
        let c_m = (ln_gamma(2.5) - ln_gamma(2.0) - 0.5 * (m * PI).ln()).exp();
        assert!((p.g(0.0) - c_m / tau).abs() < 1e-15);
        assert!((p.g2(0.0) + c_m * (m + 1.0) / (m * tau.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn cauchy_values_at_zero() {
        let p = builtin_prior(PriorKind::Cauchy { tau: 1.0 }).unwrap();
        assert!((p.g(0.0) - 1.0 / PI).abs() < 1e-16);
        assert_eq!(p.g1(0.0), 0.0);
        assert!((p.g2(0.0) + 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn gamma_mode_one_values() {
        let p = builtin_prior(PriorKind::GammaMode1 { r: 2.0 }).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((p.g(1.0) - e1).abs() < 1e-15);
        assert!(p.g1(1.0).abs() < 1e-15);
        assert!((p.g2(1.0) + e1).abs() < 1e-15);
        let r: f64 = 3.5;
        let p = builtin_prior(PriorKind::GammaMode1 { r }).unwrap();
        let g1 = (r - 1.0).powf(r) * (-(r - 1.0)).exp() / ln_gamma(r).exp();
        assert!((p.g(1.0) - g1).abs() < 1e-14);
        assert!((p.g2(1.0) + (r - 1.0) * g1).abs() < 1e-13);
    }

    #[test]
    fn f_mode_one_has_mode_at_one() {
        for (r, s) in [(2.0, 2.0), (3.0, 5.0), (1.5, 0.7)] {
            let p = builtin_prior(PriorKind::FMode1 { r, s }).unwrap();
            assert!(p.g1(1.0).abs() < 1e-14, "r={r} s={s}");
            assert!(p.g2(1.0) < 0.0);
        }
    }

    #[test]
    fn parameter_domains_rejected() {
        for k in [
            PriorKind::Normal { tau: 0.0 },
            PriorKind::StudentT { dof: -1.0, tau: 1.0 },
            PriorKind::Cauchy { tau: f64::NAN },
            PriorKind::GammaMode1 { r: 1.0 },
            PriorKind::FMode1 { r: 0.5, s: 1.0 },
            PriorKind::FMode1 { r: 2.0, s: 0.0 },
        ] {
            assert!(builtin_prior(k).is_err(), "{k:?}");
        }
    }

    #[test]
    fn lambda_alt_values() {
        let p = builtin_prior(PriorKind::Normal { tau: 1.0 }).unwrap();
        assert_eq!(lambda_alt(&p, 0.0).unwrap(), 0.5);
        let p = builtin_prior(PriorKind::GammaMode1 { r: 2.0 }).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((lambda_alt(&p, 1.0).unwrap() - 2.0 * e1).abs() < 1e-15);
        assert!((lambda_alt(&p.reflected(), -1.0).unwrap() - (1.0 - 2.0 * e1)).abs() < 1e-15);
        assert!(lambda_alt(&p, 1e-4).unwrap() > 1.0 - 1e-7);
        assert!(matches!(lambda_alt(&p, 0.0), Err(PriorError::Degenerate { .. })));
        assert!(matches!(lambda_alt(&p, -3.0), Err(PriorError::Degenerate { .. })));
    }

    #[test]
    fn lambda_alt_by_quadrature_for_custom_priors() {
        let p = CustomPrior::new("logistic", logistic, logistic_d1, logistic_d2, (f64::NEG_INFINITY, f64::INFINITY))
            .build()
            .unwrap();
        // P(θ > 1) = 1/(1+e)
        assert!((lambda_alt(&p, 1.0).unwrap() - 1.0 / (1.0 + 1f64.exp())).abs() < 1e-10);
    }

    fn logistic(x: f64) -> f64 {
        let e = (-x.abs()).exp();
        e / ((1.0 + e) * (1.0 + e))
    }
    fn logistic_d1(x: f64) -> f64 {
        let f = 1.0 / (1.0 + (-x).exp());
        logistic(x) * (1.0 - 2.0 * f)
    }
    fn logistic_d2(x: f64) -> f64 {
        let f = 1.0 / (1.0 + (-x).exp());
        logistic(x) * ((1.0 - 2.0 * f).powi(2) - 2.0 * f * (1.0 - f))
    }

    #[test]
    fn custom_validation_catches_mistakes() {
        let err = CustomPrior::new("halfmass", |x| 0.5 * std_normal_pdf(x), |_| 0.0, |_| 0.0, (f64::NEG_INFINITY, f64::INFINITY))
            .build()
            .unwrap_err();
        match err {
            PriorError::ValidationFailed(v) => {
                assert!(v.iter().any(|m| m.contains("integrates")));
                assert!(v.iter().any(|m| m.contains("derivative")));
            }
            other => panic!("{other:?}"),
        }
        // explicit opt-out keeps the broken density
        let p = CustomPrior::new("halfmass", |x| 0.5 * std_normal_pdf(x), |_| 0.0, |_| 0.0, (f64::NEG_INFINITY, f64::INFINITY))
            .build_unchecked();
        assert!((p.g(0.0) - 0.5 * std_normal_pdf(0.0)).abs() < 1e-16);
    }

    #[test]
    fn scaling_identities() {
        let base = builtin_prior(PriorKind::Normal { tau: 1.0 }).unwrap();
        let same = scale_prior(&base, 1.0).unwrap();
        for t in [-2.0, 0.0, 0.7] {
            assert_eq!(same.g(t), base.g(t));
            assert_eq!(same.g2(t), base.g2(t));
        }
        let two = scale_prior(&base, 2.0).unwrap();
        assert!((two.g(0.0) - 0.199_471_140_200_716_35).abs() < 1e-16);
        for tau in [0.1, 10.0] {
            let p = scale_prior(&base, tau).unwrap();
            validate_prior(&p).unwrap();
        }
        for t in [0.5, -1.5] {
            assert!(scale_prior(&base, 1e-3).unwrap().g(t) < 1e-100);
            assert!(scale_prior(&base, 1e3).unwrap().g(t) < 1e-3);
        }
        assert!(scale_prior(&base, 0.0).is_err());
    }

    #[test]
    fn samplers_exist_for_builtins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in all_builtins() {
            assert!(p.has_sampler());
            let x = p.sample(&mut rng).unwrap();
            assert!(x.is_finite());
        }
        let custom = CustomPrior::new("n", std_normal_pdf, |x| -x * std_normal_pdf(x), |x| (x * x - 1.0) * std_normal_pdf(x), (f64::NEG_INFINITY, f64::INFINITY))
            .build()
            .unwrap();
        assert!(!custom.has_sampler());
    }
}
