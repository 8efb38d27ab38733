use super::{CoefficientSet, ExpansionError};

/// How a rate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series { order: u8 },
    Quadrature,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub value: f64,
    /// Error bound (quadrature) or standard error (simulation); `None` for series.
    pub error: Option<f64>,
    pub method: Method,
    /// True when a series value left [0, 1] and was clamped.
    pub clamped: bool,
}

/// False discovery rate δ_n and false acceptance rate ε_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub delta: RateResult,
    pub epsilon: RateResult,
}

fn partial_sum(coef: &[f64; 3], n: u64, order: u8) -> f64 {
    let r = 1.0 / (n as f64).sqrt();
    let mut s = 0.0;
    let mut pw = r;
    for c in coef.iter().take(order as usize) {
        s += c * pw;
        pw *= r;
    }
    s
}

fn check(n: u64, order: u8) -> Result<(), ExpansionError> {
    if !(1..=3).contains(&order) {
        return Err(ExpansionError::InvalidOrder(order));
    }
    if n < 1 {
        return Err(ExpansionError::InvalidSampleSize);
    }
    Ok(())
}

/// Truncated series for δ_n and ε_n, clamped to [0, 1].
pub fn rate_series(coeffs: &CoefficientSet, n: u64, order: u8) -> Result<RatePair, ExpansionError> {
    check(n, order)?;
    let wrap = |raw: f64| {
        let v = raw.clamp(0.0, 1.0);
        RateResult { value: v, error: None, method: Method::Series { order }, clamped: v != raw }
    };
    Ok(RatePair { delta: wrap(partial_sum(&coeffs.c, n, order)), epsilon: wrap(partial_sum(&coeffs.d, n, order)) })
}

/// Truncated series for the joint probabilities `(A_n, Ã_n)`, unclamped.
pub fn joint_series(coeffs: &CoefficientSet, n: u64, order: u8) -> Result<(f64, f64), ExpansionError> {
    check(n, order)?;
    Ok((partial_sum(&coeffs.a, n, order), partial_sum(&coeffs.a_tilde, n, order)))
}
