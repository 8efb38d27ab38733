//! Coefficients of the third-order series for δ_n and ε_n.

use super::ExpansionError;
use crate::models::{
    reiss_coefficients_with, ExpFamily, F23Form, LocationModel, Orientation, Parity, ReissCoefficients, ModelRef, Statistic,
};
use crate::numkernel::{std_normal_pdf, std_normal_quantile};
use crate::priors::{lambda_alt, Prior};

/// `A_n = Σ aᵢ n^{-i/2}`, `Ã_n = Σ ãᵢ n^{-i/2}`, `bᵢ = ãᵢ − aᵢ`,
/// `δ_n = Σ cᵢ n^{-i/2}`, `ε_n = Σ dᵢ n^{-i/2}` (all to third order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub a: [f64; 3],
    pub a_tilde: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub d: [f64; 3],
    pub lambda_alt: f64,
    pub statistic: Statistic,
    pub parity: Option<Parity>,
}

impl CoefficientSet {
    /// Builds the δ and ε coefficients from the joint-probability coefficients.
    pub fn compose(
        a: [f64; 3],
        a_tilde: [f64; 3],
        lambda_alt: f64,
        statistic: Statistic,
        parity: Option<Parity>,
    ) -> Result<Self, ExpansionError> {
        if !(lambda_alt > 0.0 && lambda_alt < 1.0) {
            return Err(ExpansionError::DegenerateLambda(lambda_alt));
        }
        let b = [a_tilde[0] - a[0], a_tilde[1] - a[1], a_tilde[2] - a[2]];
        let l = lambda_alt;
        let m = 1.0 - lambda_alt;
        let c = [
            a[0] / l,
            a[0] * b[0] / (l * l) + a[1] / l,
            a[2] / l + (a[0] * b[1] + a[1] * b[0]) / (l * l) + a[0] * b[0] * b[0] / (l * l * l),
        ];
        let at = a_tilde;
        let d = [
            at[0] / m,
            at[1] / m - at[0] * b[0] / (m * m),
            at[2] / m - (at[1] * b[0] + at[0] * b[1]) / (m * m) + at[0] * b[0] * b[0] / (m * m * m),
        ];
        Ok(Self { a, a_tilde, b, c, d, lambda_alt, statistic, parity })
    }
}

struct Normal {
    z: f64,
    p: f64,
}

impl Normal {
    fn at(alpha: f64) -> Result<Self, ExpansionError> {
        let z = std_normal_quantile(1.0 - alpha)?;
        Ok(Self { z, p: std_normal_pdf(z) })
    }
}

/// Prior value and derivatives at the null boundary, in the frame the integrals are taken in.
#[derive(Debug, Clone, Copy)]
pub struct PriorJet {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

/// `(a, ã)` for the UMP mean test from the null-boundary prior jet and cumulants.
pub fn exp_family_components(
    jet: PriorJet,
    sigma0: f64,
    rho30: f64,
    rho40: f64,
    alpha: f64,
) -> Result<([f64; 3], [f64; 3]), ExpansionError> {
    let Normal { z, p } = Normal::at(alpha)?;
    let PriorJet { g, g1, g2 } = jet;
    let s = sigma0;
    let (r3, r4) = (rho30, rho40);
    let q = 1.0 - alpha;
    let z2 = z * z;
    let z3 = z2 * z;
    let rr = r3 * r3;

    let h11 = z2 + 2.0;
    let h12 = -(z3 + 3.0 * z);
    let h21 = -(r3 / 3.0) * (z2 + 1.0);
    let h22 = (r3 / 3.0) * (z3 + 2.0 * z);
    let h31 = 5.0 * rr * z2 / 18.0 + rr / 9.0 - r4 * z2 / 8.0 - r4 / 24.0;
    let h32 = -5.0 * z3 * rr / 18.0 - 11.0 * z * rr / 36.0 + z3 * r4 / 8.0 + z * r4 / 8.0;

    let a = [
        g / s * (p - alpha * z),
        r3 * g / (6.0 * s) * (alpha + 2.0 * alpha * z2 - 2.0 * z * p) - g1 / (2.0 * s * s) * (alpha * (z2 + 1.0) - z * p),
        (h11 * p + alpha * h12) * g2 / (6.0 * s.powi(3))
            + (h21 * p + alpha * h22) * g1 / (s * s)
            + (h31 * p + alpha * h32) * g / s,
    ];
    let at = [
        g / s * (p + q * z),
        g1 / (2.0 * s * s) * (q * (z2 + 1.0) + z * p) - r3 * g / (6.0 * s) * (q * (1.0 + 2.0 * z2) + 2.0 * z * p),
        g2 / (6.0 * s.powi(3)) * (h11 * p - q * h12)
            - g1 / (s * s) * (-h21 * p + q * h22)
            - g / s * (-h31 * p + q * h32),
    ];
    Ok((a, at))
}

/// `(a, ã)` for the median test from the null-boundary prior jet and the model's expansion coefficients.
pub fn median_components(
    jet: PriorJet,
    f0: f64,
    reiss: &ReissCoefficients,
    alpha: f64,
) -> Result<([f64; 3], [f64; 3]), ExpansionError> {
    let Normal { z, p } = Normal::at(alpha)?;
    let PriorJet { g, g1, g2 } = jet;
    let ReissCoefficients { f11, f12, f21, f22, f23, .. } = *reiss;
    let q = 1.0 - alpha;
    let z2 = z * z;
    let z3 = z2 * z;
    let second = f21 * (z2 * z2 + 4.0 * z2 + 8.0) * p + f22 * (z2 + 2.0) * p + f23 * p;

    let a = [
        g / (2.0 * f0) * (p - alpha * z),
        g1 / (8.0 * f0 * f0) * (z * p - alpha * (z2 + 1.0)) - g / (2.0 * f0) * (f11 * (z * p + alpha) + f12 * alpha),
        g2 / (48.0 * f0.powi(3)) * ((z2 + 2.0) * p - alpha * (z3 + 3.0 * z))
            - g1 / (4.0 * f0 * f0) * (f11 * (alpha * z - 2.0 * p) + f12 * (alpha * z - p))
            - g / (2.0 * f0) * second,
    ];
    let at = [
        g / (2.0 * f0) * (q * z + p),
        g1 / (8.0 * f0 * f0) * (q * (z2 + 1.0) + z * p) + g / (2.0 * f0) * (f11 * (q - z * p) + f12 * q),
        g2 / (48.0 * f0.powi(3)) * ((z2 + 2.0) * p + q * (z3 + 3.0 * z))
            + g1 / (4.0 * f0 * f0) * (f11 * (q * z + 2.0 * p) + f12 * (q * z + p))
            - g / (2.0 * f0) * second,
    ];
    Ok((a, at))
}

/// Prior expressed in the model's natural parameter (reflected when the user parameter is negated).
pub fn natural_prior(model: &dyn ExpFamily, prior: &Prior) -> Prior {
    match model.orientation() {
        Orientation::Natural => prior.clone(),
        Orientation::Negated => prior.reflected(),
    }
}

/// Series coefficients for the UMP mean test of `θ ≤ theta0` (user parameterization).
pub fn exp_family_coefficients(
    model: &dyn ExpFamily,
    prior: &Prior,
    theta0: f64,
    alpha: f64,
) -> Result<CoefficientSet, ExpansionError> {
    check_alpha(alpha)?;
    let t0 = model.orientation().to_natural(theta0);
    let (lo, hi) = model.theta_interval();
    if !(t0 > lo && t0 < hi) {
        return Err(ExpansionError::OutsideInterval(theta0));
    }
    let prior_n = natural_prior(model, prior);
    let jet = PriorJet { g: prior_n.g(t0), g1: prior_n.g1(t0), g2: prior_n.g2(t0) };
    let sigma0 = model.sigma(t0);
    if !(sigma0 > 0.0) {
        return Err(ExpansionError::OutsideInterval(theta0));
    }
    let lambda = lambda_alt(&prior_n, t0)?;
    let (a, at) = exp_family_components(jet, sigma0, model.rho3(t0), model.rho4(t0), alpha)?;
    CoefficientSet::compose(a, at, lambda, Statistic::MeanUmp, None)
}

/// Series coefficients for the median test; they depend on `n` only through its parity.
pub fn median_coefficients(
    model: &dyn LocationModel,
    prior: &Prior,
    theta0: f64,
    alpha: f64,
    n: u64,
) -> Result<CoefficientSet, ExpansionError> {
    median_coefficients_with(model, prior, theta0, alpha, Parity::of(n), F23Form::Derived)
}

pub fn median_coefficients_with(
    model: &dyn LocationModel,
    prior: &Prior,
    theta0: f64,
    alpha: f64,
    parity: Parity,
    form: F23Form,
) -> Result<CoefficientSet, ExpansionError> {
    check_alpha(alpha)?;
    let f0 = model.f0();
    if !(f0 > 0.0) {
        return Err(ExpansionError::NonPositiveDensityAtMedian(f0));
    }
    let reiss = reiss_coefficients_with(model, parity, form);
    let jet = PriorJet { g: prior.g(theta0), g1: prior.g1(theta0), g2: prior.g2(theta0) };
    let lambda = lambda_alt(prior, theta0)?;
    let (a, at) = median_components(jet, f0, &reiss, alpha)?;
    CoefficientSet::compose(a, at, lambda, Statistic::Median, Some(parity))
}

/// Dispatches on the model's statistic; `n` only matters for the median (parity).
pub fn coefficients_for(model: &ModelRef, prior: &Prior, theta0: f64, alpha: f64, n: u64) -> Result<CoefficientSet, ExpansionError> {
    match model {
        ModelRef::ExpFamily(m) => exp_family_coefficients(m.as_ref(), prior, theta0, alpha),
        ModelRef::Location(m) => median_coefficients(m.as_ref(), prior, theta0, alpha, n),
    }
}

fn check_alpha(alpha: f64) -> Result<(), ExpansionError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ExpansionError::InvalidAlpha(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CauchyLocation, ExponentialRate, GumbelLocation, NormalLocation, NormalMean};
    use crate::numkernel::{integrate, std_normal_cdf, QuadratureConfig};
    use crate::priors::{builtin_prior, PriorKind};

    const Z05: f64 = 1.644_853_626_951_472_7;

    fn std_normal_prior() -> Prior {
        builtin_prior(PriorKind::Normal { tau: 1.0 }).unwrap()
    }

    #[test]
    fn normal_normal_first_coefficients() {
        let c = exp_family_coefficients(&NormalMean, &std_normal_prior(), 0.0, 0.05).unwrap();
        assert!((c.c[0] - 0.016_670_169_437_766_6).abs() < 1e-15);
        assert!((c.d[0] - 1.329_073_483_162_942_5).abs() < 1e-14);
        assert!(c.c[0] < c.d[0]);
        assert_eq!(c.a[1], 0.0);
        let g0 = std_normal_pdf(0.0);
        let p = std_normal_pdf(Z05);
        let c2 = 4.0 * Z05 * g0 * g0 * (p - 0.05 * Z05);
        assert!((c.c[1] - c2).abs() < 1e-15);
        assert!((c.c[1] - 0.021_877_985_610_485_04).abs() < 1e-15);
        assert!((c.c[2] - 0.026_575_733_981_118_07).abs() < 1e-15);
    }

    #[test]
    fn composition_identities() {
        let c = exp_family_coefficients(&ExponentialRate, &builtin_prior(PriorKind::GammaMode1 { r: 2.0 }).unwrap(), 1.0, 0.1)
            .unwrap();
        for i in 0..3 {
            assert_eq!(c.b[i], c.a_tilde[i] - c.a[i]);
        }
        let again = CoefficientSet::compose(c.a, c.a_tilde, c.lambda_alt, c.statistic, None).unwrap();
        for i in 0..3 {
            assert!((again.c[i] - c.c[i]).abs() <= 1e-13 && (again.d[i] - c.d[i]).abs() <= 1e-13);
        }
        assert!((c.lambda_alt - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-15);
        assert!(CoefficientSet::compose(c.a, c.a_tilde, 1.0, c.statistic, None).is_err());
    }

    // Independent route: integrate the expanded joint-probability integrands
    // term by term. With θ = θ0 + (x + z)/(s√n) the power is
    // Φ(x) + φ(x)P₁(x)/√n + φ(x)P₂(x)/n and the prior is
    // g + g'(x+z)/(s√n) + g''(x+z)²/(2s²n).
    fn by_quadrature(
        jet: PriorJet,
        s: f64,
        alpha: f64,
        p1: &dyn Fn(f64) -> f64,
        p2: &dyn Fn(f64) -> f64,
    ) -> ([f64; 3], [f64; 3]) {
        let z = std_normal_quantile(1.0 - alpha).unwrap();
        let cfg = QuadratureConfig::adaptive(1e-11);
        let q = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| integrate(f, a, b, &cfg).unwrap().value;
        let ninf = f64::NEG_INFINITY;
        let inf = f64::INFINITY;
        let phi = std_normal_pdf;
        let cdf = std_normal_cdf;
        let PriorJet { g, g1, g2 } = jet;
        let a1 = g / s * q(&|x| cdf(x), ninf, -z);
        let a2 = (g * q(&|x| phi(x) * p1(x), ninf, -z) + g1 / s * q(&|x| cdf(x) * (x + z), ninf, -z)) / s;
        let a3 = (g * q(&|x| phi(x) * p2(x), ninf, -z)
            + g1 / s * q(&|x| phi(x) * p1(x) * (x + z), ninf, -z)
            + g2 / (2.0 * s * s) * q(&|x| cdf(x) * (x + z).powi(2), ninf, -z))
            / s;
        let t1 = g / s * q(&|x| cdf(-x), -z, inf);
        let t2 = (-g * q(&|x| phi(x) * p1(x), -z, inf) + g1 / s * q(&|x| cdf(-x) * (x + z), -z, inf)) / s;
        let t3 = (-g * q(&|x| phi(x) * p2(x), -z, inf)
            - g1 / s * q(&|x| phi(x) * p1(x) * (x + z), -z, inf)
            + g2 / (2.0 * s * s) * q(&|x| cdf(-x) * (x + z).powi(2), -z, inf))
            / s;
        ([a1, a2, a3], [t1, t2, t3])
    }

    #[test]
    fn exp_family_closed_forms_match_term_by_term_quadrature() {
        use super::super::polys::{g1_poly, g2_poly};
        let jets = [
            PriorJet { g: 0.4, g1: 0.0, g2: -0.4 },
            PriorJet { g: 0.37, g1: 0.21, g2: -0.55 },
            PriorJet { g: 1.3, g1: -0.8, g2: 2.1 },
        ];
        for jet in jets {
            for (s, r3, r4) in [(1.0, 0.0, 0.0), (1.0, 2.0, 6.0), (0.7, -0.9, 1.7)] {
                for alpha in [0.01, 0.05, 0.2] {
                    let z = std_normal_quantile(1.0 - alpha).unwrap();
                    let (a, at) = exp_family_components(jet, s, r3, r4, alpha).unwrap();
                    let (qa, qt) = by_quadrature(jet, s, alpha, &|x| g1_poly(x, r3, z), &|x| g2_poly(x, r3, r4, z));
                    for i in 0..3 {
                        assert!((a[i] - qa[i]).abs() < 1e-9, "a{} {jet:?} s={s} r3={r3} α={alpha}: {} vs {}", i + 1, a[i], qa[i]);
                        assert!((at[i] - qt[i]).abs() < 1e-9, "ã{} {jet:?} s={s} r3={r3} α={alpha}: {} vs {}", i + 1, at[i], qt[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn median_closed_forms_match_term_by_term_quadrature() {
        // For the median, β = 1 − F_n(−x) ≈ Φ(x) − φ(x)R₁(x)/√n + φ(x)R₂(x)/n with s = 2f(0).
        let models: [&dyn LocationModel; 3] = [&NormalLocation, &CauchyLocation, &GumbelLocation];
        let jet = PriorJet { g: 0.33, g1: 0.12, g2: -0.41 };
        for m in models {
            for parity in [Parity::Even, Parity::Odd] {
                let r = reiss_coefficients_with(m, parity, F23Form::Derived);
                for alpha in [0.02, 0.1] {
                    let (a, at) = median_components(jet, m.f0(), &r, alpha).unwrap();
                    let (qa, qt) = by_quadrature(jet, 2.0 * m.f0(), alpha, &|x| -r.r1(x), &|x| r.r2(x));
                    for i in 0..3 {
                        assert!((a[i] - qa[i]).abs() < 1e-9, "{} {parity:?} a{}", m.name(), i + 1);
                        assert!((at[i] - qt[i]).abs() < 1e-9, "{} {parity:?} ã{}", m.name(), i + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn median_normal_normal_values() {
        let c = median_coefficients(&NormalLocation, &std_normal_prior(), 0.0, 0.05, 21).unwrap();
        assert!((c.a[0] - 0.010_446_479_513_898_833).abs() < 1e-15);
        assert!((c.c[0] - 0.020_892_959_027_797_665).abs() < 1e-15);
        let mean = exp_family_coefficients(&NormalMean, &std_normal_prior(), 0.0, 0.05).unwrap();
        assert!((c.c[0] - mean.c[0] - 0.004_222_789_590_031_064).abs() < 1e-15);
        let g0 = std_normal_pdf(0.0);
        assert!((c.b[0] - Z05 * g0 / (2.0 * g0)).abs() < 1e-15);
    }

    #[test]
    fn median_parity_only_moves_parity_terms() {
        let p = std_normal_prior();
        let odd = median_coefficients(&NormalLocation, &p, 0.0, 0.05, 11).unwrap();
        let even = median_coefficients(&NormalLocation, &p, 0.0, 0.05, 12).unwrap();
        assert_eq!(odd.a[0], even.a[0]);
        assert_eq!(odd.parity, Some(Parity::Odd));
        // odd n, f'(0) = 0, g'(0) = 0: nothing left in a₂
        assert_eq!(odd.a[1], 0.0);
        assert!(even.a[1] != 0.0);
        assert_eq!(
            median_coefficients(&NormalLocation, &p, 0.0, 0.05, 13).unwrap(),
            odd
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let p = builtin_prior(PriorKind::GammaMode1 { r: 2.0 }).unwrap();
        assert!(exp_family_coefficients(&ExponentialRate, &p, -1.0, 0.05).is_err());
        assert!(exp_family_coefficients(&NormalMean, &std_normal_prior(), 0.0, 1.0).is_err());
        // all prior mass in the null region
        assert!(exp_family_coefficients(&NormalMean, &p, 0.0, 0.05).is_err());
    }
}
