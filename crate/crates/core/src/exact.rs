//! δ_n and ε_n by quadrature of the joint probabilities against the prior.

use crate::expansions::{natural_prior, Method, RatePair, RateResult};
use crate::models::{median_cdf_pair, power_at_natural, ump_critical_value, ExpFamily, LocationModel, ModelError, ModelRef, TestSetup};
use crate::numkernel::{integrate_with_breaks, IntegralValue, QuadratureConfig, QuadratureError};
use crate::priors::{lambda_alt, Prior, PriorError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("{which} is zero, so the corresponding rate is undefined")]
    ZeroDenominator { which: &'static str },
    #[error("quadrature for {part} failed: {source}")]
    Quadrature { part: &'static str, source: QuadratureError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// `A_n = P(θ ≤ θ0, reject)`, `Ã_n = P(θ > θ0, accept)`, `B_n = P(reject)`, `B̃_n = 1 − B_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbabilities {
    pub a: IntegralValue,
    pub a_tilde: IntegralValue,
    pub b: f64,
    pub b_tilde: f64,
    pub lambda_alt: f64,
}

impl JointProbabilities {
    fn assemble(a: IntegralValue, a_tilde: IntegralValue, lambda_alt: f64) -> Self {
        let b = a.value + lambda_alt - a_tilde.value;
        Self { a, a_tilde, b, b_tilde: 1.0 - b, lambda_alt }
    }
}

fn sorted_points(lo: f64, hi: f64, candidates: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = candidates.into_iter().filter(|p| p.is_finite() && *p > lo && *p < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn breakpoints(prior: &Prior, center: f64, width: f64) -> Vec<f64> {
    let (c, s) = prior.location_scale();
    let mut v: Vec<f64> = [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0].iter().map(|k| c + k * s).collect();
    v.extend([-8.0, -3.0, -1.0, 1.0, 3.0, 8.0].iter().map(|k| center + k * width));
    v
}

fn quad<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    extra: &[f64],
    cfg: &QuadratureConfig,
    part: &'static str,
) -> Result<IntegralValue, ExactError> {
    if !(lo < hi) {
        return Ok(IntegralValue { value: 0.0, error_bound: 0.0 });
    }
    let pts = sorted_points(lo, hi, extra.iter().copied());
    integrate_with_breaks(f, &pts, cfg).map_err(|source| ExactError::Quadrature { part, source })
}

/// Joint probabilities by quadrature over the parameter.
///
/// The integration range is split at θ0 so the null/alternative boundary is never inside a panel.
pub fn exact_joint(
    model: &ModelRef,
    prior: &Prior,
    setup: &TestSetup,
    cfg: &QuadratureConfig,
) -> Result<JointProbabilities, ExactError> {
    model.check(setup)?;
    match model {
        ModelRef::ExpFamily(m) => mean_joint(m.as_ref(), prior, setup, cfg),
        ModelRef::Location(m) => median_joint(m.as_ref(), prior, setup, cfg),
    }
}

fn mean_joint(
    model: &dyn ExpFamily,
    prior: &Prior,
    setup: &TestSetup,
    cfg: &QuadratureConfig,
) -> Result<JointProbabilities, ExactError> {
    let k = ump_critical_value(model, setup)?;
    let t0 = model.orientation().to_natural(setup.theta0);
    let pn = natural_prior(model, prior);
    let lambda = lambda_alt(&pn, t0)?;
    let (mlo, mhi) = model.theta_interval();
    let (plo, phi) = pn.support();
    let (lo, hi) = (mlo.max(plo), mhi.min(phi));
    let n = setup.n;
    let width = 1.0 / (model.sigma(t0) * (n as f64).sqrt());
    let extra = breakpoints(&pn, t0, width);
    let a = quad(
        |t| {
            let g = pn.g(t);
            if g == 0.0 {
                0.0
            } else {
                power_at_natural(model, t, t0, n, k).0 * g
            }
        },
        lo,
        t0,
        &extra,
        cfg,
        "A",
    )?;
    let at = quad(
        |t| {
            let g = pn.g(t);
            if g == 0.0 {
                0.0
            } else {
                power_at_natural(model, t, t0, n, k).1 * g
            }
        },
        t0,
        hi,
        &extra,
        cfg,
        "A_tilde",
    )?;
    Ok(JointProbabilities::assemble(a, at, lambda))
}

/// Mean-test joint probabilities integrated in `x = σ0√n(θ − θ0) − z_α` instead of θ.
///
/// Mathematically identical to [`exact_joint`]; used as an independent cross-check.
pub fn exact_joint_transformed(
    model: &dyn ExpFamily,
    prior: &Prior,
    setup: &TestSetup,
    cfg: &QuadratureConfig,
) -> Result<JointProbabilities, ExactError> {
    let k = ump_critical_value(model, setup)?;
    let z = setup.z_alpha()?;
    let t0 = model.orientation().to_natural(setup.theta0);
    let pn = natural_prior(model, prior);
    let lambda = lambda_alt(&pn, t0)?;
    let n = setup.n;
    let scale = model.sigma(t0) * (n as f64).sqrt();
    let to_theta = |x: f64| t0 + (x + z) / scale;
    let to_x = |t: f64| scale * (t - t0) - z;
    let (mlo, mhi) = model.theta_interval();
    let (plo, phi) = pn.support();
    let (lo, hi) = (to_x(mlo.max(plo)), to_x(mhi.min(phi)));
    let (c, s) = pn.location_scale();
    let mut extra: Vec<f64> = [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0].iter().map(|j| to_x(c + j * s)).collect();
    extra.extend([-8.0, -3.0, -1.0, 1.0, 3.0, 8.0].iter().map(|j| -z + j));
    let integrand = |x: f64, upper: bool| {
        let t = to_theta(x);
        let g = pn.g(t);
        if g == 0.0 {
            return 0.0;
        }
        let (b, nb) = power_at_natural(model, t, t0, n, k);
        (if upper { nb } else { b }) * g / scale
    };
    let a = quad(|x| integrand(x, false), lo, -z, &extra, cfg, "A")?;
    let at = quad(|x| integrand(x, true), -z, hi, &extra, cfg, "A_tilde")?;
    Ok(JointProbabilities::assemble(a, at, lambda))
}


/// δ = A/B and ε = Ã/B̃ with first-order propagated error bounds.
pub fn exact_rates(joint: &JointProbabilities) -> Result<RatePair, ExactError> {
    let JointProbabilities { a, a_tilde, b, b_tilde, lambda_alt } = *joint;
    let delta = if a.value == 0.0 {
        RateResult { value: 0.0, error: Some(a.error_bound / b.max(f64::MIN_POSITIVE)), method: Method::Quadrature, clamped: false }
    } else {
        if !(b > 0.0) {
            return Err(ExactError::ZeroDenominator { which: "B" });
        }
        // δ = A/(A + λ − Ã)
        let err = ((lambda_alt - a_tilde.value).abs() * a.error_bound + a.value * a_tilde.error_bound) / (b * b);
        RateResult { value: (a.value / b).clamp(0.0, 1.0), error: Some(err), method: Method::Quadrature, clamped: false }
    };
    let epsilon = if a_tilde.value == 0.0 {
        RateResult {
            value: 0.0,
            error: Some(a_tilde.error_bound / b_tilde.max(f64::MIN_POSITIVE)),
            method: Method::Quadrature,
            clamped: false,
        }
    } else {
        if !(b_tilde > 0.0) {
            return Err(ExactError::ZeroDenominator { which: "B_tilde" });
        }
        // ε = Ã/(1 − A − λ + Ã)
        let err = ((1.0 - a.value - lambda_alt).abs() * a_tilde.error_bound + a_tilde.value * a.error_bound)
            / (b_tilde * b_tilde);
        RateResult {
            value: (a_tilde.value / b_tilde).clamp(0.0, 1.0),
            error: Some(err),
            method: Method::Quadrature,
            clamped: false,
        }
    };
    Ok(RatePair { delta, epsilon })
}

/// [`exact_joint`] followed by [`exact_rates`].
pub fn exact_rates_for(
    model: &ModelRef,
    prior: &Prior,
    setup: &TestSetup,
    cfg: &QuadratureConfig,
) -> Result<RatePair, ExactError> {
    exact_rates(&exact_joint(model, prior, setup, cfg)?)
}

fn median_joint(
    model: &dyn LocationModel,
    prior: &Prior,
    setup: &TestSetup,
    cfg: &QuadratureConfig,
) -> Result<JointProbabilities, ExactError> {
    let z = setup.z_alpha()?;
    let t0 = setup.theta0;
    let lambda = lambda_alt(prior, t0)?;
    let n = setup.n;
    let s = 2.0 * model.f0() * (n as f64).sqrt();
    let (lo, hi) = prior.support();
    let extra = breakpoints(prior, t0, 1.0 / s);
    // (β, 1 − β) at θ
    let power = |t: f64| {
        let (cdf, sf) = median_cdf_pair(model, n, z - s * (t - t0));
        (sf, cdf)
    };
    let a = quad(
        |t| {
            let g = prior.g(t);
            if g == 0.0 {
                0.0
            } else {
                power(t).0 * g
            }
        },
        lo,
        t0,
        &extra,
        cfg,
        "A",
    )?;
    let at = quad(
        |t| {
            let g = prior.g(t);
            if g == 0.0 {
                0.0
            } else {
                power(t).1 * g
            }
        },
        t0,
        hi,
        &extra,
        cfg,
        "A_tilde",
    )?;
    Ok(JointProbabilities::assemble(a, at, lambda))
}
