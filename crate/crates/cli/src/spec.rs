//! Parsing of compact model and prior strings plus option validation.

use crate::args::{ModelArgs, StatisticArg};
use freqfdr::models::{
    CauchyLocation, ExponentialRate, GumbelLocation, ModelRef, NormalLocation, NormalMean, Statistic,
};
use freqfdr::numkernel::QuadratureConfig;
use freqfdr::priors::{builtin_prior, Prior, PriorKind};
use std::sync::Arc;

/// Collects every configuration problem before giving up.
#[derive(Debug, Default)]
pub struct Problems(pub Vec<String>);

impl Problems {
    pub fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    pub fn alphas(&mut self, name: &str, alphas: &[f64]) {
        if alphas.is_empty() {
            self.push(format!("{name} must not be empty"));
        }
        for &a in alphas {
            if !(a > 0.0 && a < 1.0) {
                self.push(format!("{name} value {a} is outside (0, 1)"));
            }
        }
    }

    pub fn sizes(&mut self, name: &str, ns: &[u64]) {
        if ns.is_empty() {
            self.push(format!("{name} must not be empty"));
        }
        if ns.contains(&0) {
            self.push(format!("{name} values must be at least 1"));
        }
    }

    pub fn positive(&mut self, name: &str, xs: &[f64]) {
        if xs.is_empty() {
            self.push(format!("{name} must not be empty"));
        }
        for &x in xs {
            if !(x > 0.0 && x.is_finite()) {
                self.push(format!("{name} value {x} must be positive and finite"));
            }
        }
    }

    pub fn quad(&mut self, tol: f64) -> QuadratureConfig {
        if !(tol > 0.0 && tol.is_finite()) {
            self.push(format!("tol {tol} must be positive"));
            return QuadratureConfig::default();
        }
        QuadratureConfig::adaptive(tol)
    }
}

pub fn parse_prior(spec: &str) -> Result<Prior, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Result<Vec<f64>, _> = parts[1..].iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|_| format!("prior '{spec}': parameters must be numbers"))?;
    let kind = match (parts[0], nums.as_slice()) {
        ("normal", [tau]) => PriorKind::Normal { tau: *tau },
        ("t", [dof, tau]) => PriorKind::StudentT { dof: *dof, tau: *tau },
        ("cauchy", [tau]) => PriorKind::Cauchy { tau: *tau },
        ("gamma-mode1", [r]) => PriorKind::GammaMode1 { r: *r },
        ("f-mode1", [r, s]) => PriorKind::FMode1 { r: *r, s: *s },
        ("normal" | "t" | "cauchy" | "gamma-mode1" | "f-mode1", _) => {
            return Err(format!("prior '{spec}': wrong number of parameters"))
        }
        _ => return Err(format!("unknown prior '{}' (expected normal, t, cauchy, gamma-mode1 or f-mode1)", parts[0])),
    };
    builtin_prior(kind).map_err(|e| format!("prior '{spec}': {e}"))
}

pub struct Resolved {
    pub model: ModelRef,
    pub prior: Prior,
    pub theta0: f64,
}

impl Resolved {
    pub fn statistic(&self) -> Statistic {
        self.model.statistic()
    }
}

fn parse_model(name: &str, stat: Option<StatisticArg>) -> Result<ModelRef, String> {
    use StatisticArg::*;
    match (name, stat) {
        ("normal-mean", None | Some(Mean)) | ("normal", None | Some(Mean)) => Ok(ModelRef::ExpFamily(Arc::new(NormalMean))),
        ("normal", Some(Median)) => Ok(ModelRef::Location(Arc::new(NormalLocation))),
        ("exp-rate", None | Some(Mean)) => Ok(ModelRef::ExpFamily(Arc::new(ExponentialRate))),
        ("cauchy", None | Some(Median)) => Ok(ModelRef::Location(Arc::new(CauchyLocation))),
        ("gumbel", None | Some(Median)) => Ok(ModelRef::Location(Arc::new(GumbelLocation))),
        ("normal-mean" | "exp-rate", Some(Median)) => Err(format!("model {name} supports only the mean statistic")),
        ("cauchy" | "gumbel", Some(Mean)) => Err(format!("model {name} supports only the median statistic")),
        _ => Err(format!("unknown model '{name}' (expected normal-mean, normal, exp-rate, cauchy or gumbel)")),
    }
}

/// Resolves the model, prior and θ0, recording problems instead of stopping at the first.
pub fn resolve(args: &ModelArgs, problems: &mut Problems) -> Option<Resolved> {
    let model = parse_model(&args.model, args.statistic).map_err(|e| problems.push(e)).ok();
    let prior = parse_prior(&args.prior).map_err(|e| problems.push(e)).ok();
    let default_theta0 = if args.model == "exp-rate" { 1.0 } else { 0.0 };
    let theta0 = args.theta0.unwrap_or(default_theta0);
    if !theta0.is_finite() {
        problems.push(format!("theta0 {theta0} must be finite"));
    }
    let (model, prior) = (model?, prior?);
    if let ModelRef::ExpFamily(m) = &model {
        let (lo, hi) = m.theta_interval();
        let t0 = m.orientation().to_natural(theta0);
        if !(t0 > lo && t0 < hi) {
            problems.push(format!("theta0 {theta0} is outside the parameter range of model {}", m.name()));
        }
        if args.model == "exp-rate" && prior.support().0 < 0.0 {
            problems.push(format!("prior '{}' puts mass on negative rates; use gamma-mode1 or f-mode1", args.prior));
        }
    }
    Some(Resolved { model, prior, theta0 })
}

/// `start:end:step`, inclusive of `end` up to rounding.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err(format!("grid '{spec}' must look like start:end:step"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("grid '{spec}': '{s}' is not a number"));
    let (a, b, h) = (parse(a)?, parse(b)?, parse(h)?);
    if !(h > 0.0) || !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(format!("grid '{spec}' needs start <= end and a positive step"));
    }
    let count = ((b - a) / h + 1e-9).floor() as u64 + 1;
    if count > 100_000 {
        return Err(format!("grid '{spec}' has more than 100000 points"));
    }
    // round away the accumulated binary noise (0.1 + 0.2 and friends)
    Ok((0..count).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect())
}
