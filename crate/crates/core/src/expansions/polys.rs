//! Polynomials of the Edgeworth power expansion and the Cornish-Fisher critical-value expansion.
//!
//! With `θ = θ0 + (x + z)/(σ0√n)` the power of the UMP mean test is
//! `Φ(x) + φ(x)g₁(x)/√n + φ(x)g₂(x)/n + O(n^{-3/2})`, and the standardized
//! critical value seen from θ is `−x + f₁(x)/√n + f₂(x)/n + O(n^{-3/2})`.

use crate::models::{ExpFamily, ModelError, TestSetup};
use crate::numkernel::{std_normal_cdf, std_normal_pdf};

pub fn g1_poly(x: f64, rho30: f64, z: f64) -> f64 {
    rho30 * (x * x / 6.0 + z * x / 2.0 + z * z / 3.0)
}

/// Coefficients of g₂ in increasing powers of x.
pub fn g2_coefficients(rho30: f64, rho40: f64, z: f64) -> [f64; 6] {
    let r3 = rho30 * rho30;
    let r4 = rho40;
    let z2 = z * z;
    let z3 = z2 * z;
    let z4 = z2 * z2;
    [
        -(z3 / 9.0 - z / 36.0) * r3 + (z3 / 8.0 - z / 24.0) * r4,
        (-z4 / 18.0 - 13.0 * z2 / 72.0 + 1.0 / 36.0) * r3 + (z2 / 4.0 - 1.0 / 24.0) * r4,
        -(z3 / 6.0 + z / 12.0) * r3 + z * r4 / 6.0,
        -(13.0 * z2 / 72.0 + 1.0 / 72.0) * r3 + r4 / 24.0,
        -z * r3 / 12.0,
        -r3 / 72.0,
    ]
}

pub fn g2_poly(x: f64, rho30: f64, rho40: f64, z: f64) -> f64 {
    g2_coefficients(rho30, rho40, z).iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn f1_poly(x: f64, rho30: f64, z: f64) -> f64 {
    let f11 = -z * rho30 / 2.0;
    let f10 = -(2.0 * z * z + 1.0) * rho30 / 6.0;
    f11 * x + f10
}

pub fn f2_poly(x: f64, rho30: f64, rho40: f64, z: f64) -> f64 {
    let r3 = rho30 * rho30;
    let z2 = z * z;
    let z3 = z2 * z;
    let f20 = (z3 + 2.0 * z) * r3 / 9.0 - (z3 + z) * rho40 / 8.0;
    let f21 = (7.0 * z2 / 24.0 + 1.0 / 12.0) * r3 - z2 * rho40 / 4.0;
    let f22 = 0.0;
    let f23 = rho40 / 12.0 - r3 / 8.0;
    ((f23 * x + f22) * x + f21) * x + f20
}

/// Two-term Edgeworth approximation to the UMP mean-test power at `theta` (user parameterization).
pub fn power_mean_edgeworth(model: &dyn ExpFamily, theta: f64, setup: &TestSetup) -> Result<f64, ModelError> {
    setup.validate()?;
    let z = setup.z_alpha()?;
    let o = model.orientation();
    let (t0, t) = (o.to_natural(setup.theta0), o.to_natural(theta));
    let nf = setup.n as f64;
    let x = model.sigma(t0) * nf.sqrt() * (t - t0) - z;
    let (r3, r4) = (model.rho3(t0), model.rho4(t0));
    Ok(std_normal_cdf(x) + std_normal_pdf(x) * (g1_poly(x, r3, z) / nf.sqrt() + g2_poly(x, r3, r4, z) / nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cornish_fisher_critical;

    const Z05: f64 = 1.644_853_626_951_472_7;

    #[test]
    fn vanish_without_cumulants() {
        for x in [-2.0, 0.0, 1.3] {
            assert_eq!(g1_poly(x, 0.0, Z05), 0.0);
            assert_eq!(g2_poly(x, 0.0, 0.0, Z05), 0.0);
            assert_eq!(f1_poly(x, 0.0, Z05), 0.0);
            assert_eq!(f2_poly(x, 0.0, 0.0, Z05), 0.0);
        }
    }

    #[test]
    fn constant_and_plug_in_values() {
        assert!((g1_poly(0.0, 2.0, Z05) - 1.803_695_636_063_609_7).abs() < 1e-14);
        let z = 1.2;
        let want = -z * 2.0 / 2.0 - (2.0 * z * z + 1.0) * 2.0 / 6.0;
        assert!((f1_poly(1.0, 2.0, z) - want).abs() < 1e-15);
    }

    #[test]
    fn power_polynomials_vanish_at_the_null_boundary() {
        // β(θ0) = α exactly, so every correction term is zero at x = −z.
        for (r3, r4, z) in [(2.0, 6.0, Z05), (0.7, -0.4, 2.3), (-1.1, 3.0, 0.4)] {
            assert!(g1_poly(-z, r3, z).abs() < 1e-13);
            assert!(g2_poly(-z, r3, r4, z).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_value_polynomials_reproduce_cornish_fisher() {
        for n in [100u64, 1000, 10000] {
            let nf = n as f64;
            let kt = Z05 + f1_poly(-Z05, 2.0, Z05) / nf.sqrt() + f2_poly(-Z05, 2.0, 6.0, Z05) / nf;
            let cf = cornish_fisher_critical(2.0, 6.0, 0.05, n).unwrap();
            assert!((kt - cf).abs() <= nf.powf(-1.5), "n={n}: {kt} vs {cf}");
        }
    }
}
