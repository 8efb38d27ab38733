use super::ModelError;
use crate::numkernel::std_normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Standardized sample mean with the exact UMP critical value.
    MeanUmp,
    /// Sample median `X_(⌊n/2⌋+1)`.
    Median,
}

/// One-sided test of `H0: θ ≤ θ0` against `H1: θ > θ0` at level `alpha` with `n` observations.
///
/// `theta0` is in the user parameterization of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSetup {
    pub statistic: Statistic,
    pub theta0: f64,
    pub alpha: f64,
    pub n: u64,
}

impl TestSetup {
    pub fn new(statistic: Statistic, theta0: f64, alpha: f64, n: u64) -> Result<Self, ModelError> {
        let s = Self { statistic, theta0, alpha, n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut problems = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            problems.push(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.n < 1 {
            problems.push("n must be at least 1".to_string());
        }
        if !self.theta0.is_finite() {
            problems.push(format!("theta0 must be finite, got {}", self.theta0));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ModelError::InvalidSetup(problems.join("; ")))
        }
    }

    /// Upper α quantile of the standard normal.
    pub fn z_alpha(&self) -> Result<f64, ModelError> {
        Ok(std_normal_quantile(1.0 - self.alpha)?)
    }

    pub fn with_n(&self, n: u64) -> Self {
        Self { n, ..*self }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values_and_lists_them_all() {
        let err = TestSetup::new(Statistic::MeanUmp, f64::NAN, 1.5, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha") && msg.contains("n must") && msg.contains("theta0"));
        assert!(TestSetup::new(Statistic::Median, 0.0, 0.05, 3).is_ok());
    }
}
