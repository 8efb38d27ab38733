//! Monte-Carlo simulation of m simultaneous experiments and the groupwise FDR.
//!
//! Every experiment draws from its own ChaCha8 stream: the key comes from the
//! seed, the stream id is the replication index and the block counter starts
//! at `experiment << 32`. Results therefore do not depend on how experiments
//! are spread over worker threads.

use crate::exact::{exact_rates_for, ExactError};
use crate::models::{ump_critical_value, ExpFamily, ModelError, ModelRef, TestSetup};
use crate::numkernel::QuadratureConfig;
use crate::priors::Prior;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("prior {0} cannot be sampled")]
    NoSampler(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub model: ModelRef,
    pub prior: Prior,
    pub setup: TestSetup,
    /// Experiments per replication.
    pub m: u64,
    pub seed: u64,
    pub replications: u64,
    /// Worker threads; 0 uses all available cores. Never changes results.
    pub workers: usize,
}

/// Counts from one replication of m experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    /// Rejections with θ in the null.
    pub v: u64,
    /// Rejections with θ in the alternative.
    pub s: u64,
    /// Acceptances with θ in the alternative.
    pub false_accepts: u64,
    /// All acceptances.
    pub accepts: u64,
}

impl Tally {
    pub fn rejections(&self) -> u64 {
        self.v + self.s
    }

    /// `V / (R ∨ 1)`.
    pub fn fdr(&self) -> f64 {
        self.v as f64 / self.rejections().max(1) as f64
    }

    /// Delta-method standard error of `V/R` given R.
    pub fn fdr_se(&self) -> f64 {
        let r = self.rejections();
        if r == 0 {
            return 0.0;
        }
        let f = self.fdr();
        (f * (1.0 - f) / r as f64).sqrt()
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            v: self.v + o.v,
            s: self.s + o.s,
            false_accepts: self.false_accepts + o.false_accepts,
            accepts: self.accepts + o.accepts,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub replication: u64,
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub m: u64,
    /// Mean over replications of `V/(R ∨ 1)`.
    pub fdr_hat: f64,
    /// Pooled `ΣV / ΣR`.
    pub delta_hat: f64,
    /// Pooled false-acceptance frequency.
    pub eps_hat: f64,
    /// Between-replication standard error, or the delta-method one for a single replication.
    pub se_fdr: f64,
    pub se_delta: f64,
    pub rejections: u64,
    pub per_replication: Vec<ReplicationRecord>,
}

fn validate(cfg: &SimConfig) -> Result<(), SimError> {
    let mut v = Vec::new();
    if cfg.m < 1 {
        v.push("m must be at least 1".to_string());
    }
    if cfg.replications < 1 {
        v.push("replications must be at least 1".to_string());
    }
    if let Err(e) = cfg.setup.validate() {
        v.push(e.to_string());
    }
    if let Err(e) = cfg.model.check(&cfg.setup) {
        v.push(e.to_string());
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(SimError::InvalidConfig(v))
    }
}

/// Rejection rule for one experiment's sample.
enum Rule {
    Mean { mu0: f64, sigma0: f64, k: f64 },
    Median { theta0: f64, cut: f64 },
}

impl Rule {
    fn new(model: &ModelRef, setup: &TestSetup) -> Result<Self, SimError> {
        Ok(match model {
            ModelRef::ExpFamily(m) => {
                let fam: &dyn ExpFamily = m.as_ref();
                let t0 = fam.orientation().to_natural(setup.theta0);
                Rule::Mean { mu0: fam.mu(t0), sigma0: fam.sigma(t0), k: ump_critical_value(fam, setup)? }
            }
            ModelRef::Location(m) => Rule::Median { theta0: setup.theta0, cut: setup.z_alpha()? / (2.0 * m.f0()) },
        })
    }

    fn rejects(&self, xs: &mut [f64]) -> bool {
        let nf = xs.len() as f64;
        match *self {
            Rule::Mean { mu0, sigma0, k } => {
                let mean = xs.iter().sum::<f64>() / nf;
                nf.sqrt() * (mean - mu0) / sigma0 > k
            }
            Rule::Median { theta0, cut } => {
                let idx = xs.len() / 2;
                let (_, med, _) = xs.select_nth_unstable_by(idx, f64::total_cmp);
                nf.sqrt() * (*med - theta0) > cut
            }
        }
    }
}

fn null_side(model: &ModelRef, theta: f64, theta0: f64) -> bool {
    match model {
        ModelRef::ExpFamily(m) => {
            let o = m.orientation();
            o.to_natural(theta) <= o.to_natural(theta0)
        }
        ModelRef::Location(_) => theta <= theta0,
    }
}

fn experiment_rng(base: &ChaCha8Rng, replication: u64, experiment: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(replication);
    rng.set_word_pos((experiment as u128) << 32);
    rng
}

fn run_replication(cfg: &SimConfig, rule: &Rule, base: &ChaCha8Rng, replication: u64) -> Tally {
    let n = cfg.setup.n as usize;
    (0..cfg.m)
        .into_par_iter()
        .fold(
            || (Tally::default(), vec![0.0; n]),
            |(mut t, mut xs), i| {
                let mut rng = experiment_rng(base, replication, i);
                let theta = cfg.prior.sample(&mut rng).expect("sampler checked before the run");
                for x in xs.iter_mut() {
                    *x = cfg.model.sample(theta, &mut rng);
                }
                let null = null_side(&cfg.model, theta, cfg.setup.theta0);
                if rule.rejects(&mut xs) {
                    if null {
                        t.v += 1;
                    } else {
                        t.s += 1;
                    }
                } else {
                    t.accepts += 1;
                    if !null {
                        t.false_accepts += 1;
                    }
                }
                (t, xs)
            },
        )
        .map(|(t, _)| t)
        .reduce(Tally::default, Tally::merge)
}

/// Runs `replications` independent sets of `m` experiments.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult, SimError> {
    validate(cfg)?;
    if !cfg.prior.has_sampler() {
        return Err(SimError::NoSampler(cfg.prior.label()));
    }
    let rule = Rule::new(&cfg.model, &cfg.setup)?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let records: Vec<ReplicationRecord> = pool.install(|| {
        (0..cfg.replications)
            .map(|r| ReplicationRecord { replication: r, tally: run_replication(cfg, &rule, &base, r) })
            .collect()
    });
    Ok(summarize(cfg.m, records))
}

fn summarize(m: u64, records: Vec<ReplicationRecord>) -> SimResult {
    let reps = records.len() as f64;
    let total = records.iter().fold(Tally::default(), |acc, r| acc.merge(r.tally));
    let fdrs: Vec<f64> = records.iter().map(|r| r.tally.fdr()).collect();
    let fdr_hat = fdrs.iter().sum::<f64>() / reps;
    let se_fdr = if records.len() >= 2 {
        let var = fdrs.iter().map(|f| (f - fdr_hat).powi(2)).sum::<f64>() / (reps - 1.0);
        (var / reps).sqrt()
    } else {
        records[0].tally.fdr_se()
    };
    let r = total.rejections();
    let delta_hat = if r == 0 { 0.0 } else { total.v as f64 / r as f64 };
    let se_delta = if r == 0 { 0.0 } else { (delta_hat * (1.0 - delta_hat) / r as f64).sqrt() };
    let eps_hat = if total.accepts == 0 { 0.0 } else { total.false_accepts as f64 / total.accepts as f64 };
    SimResult { m, fdr_hat, delta_hat, eps_hat, se_fdr, se_delta, rejections: r, per_replication: records }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: u64,
    pub fdr_hat: f64,
    pub se_fdr: f64,
    pub delta_n: f64,
    pub gap: f64,
}

/// One simulation per m with the same seed, so experiment i sees the same draws in every row.
pub fn convergence_sweep(cfg: &SimConfig, m_grid: &[u64], quad: &QuadratureConfig) -> Result<Vec<SweepRow>, SimError> {
    if m_grid.is_empty() {
        return Err(SimError::InvalidConfig(vec!["m grid must not be empty".into()]));
    }
    let delta_n = exact_rates_for(&cfg.model, &cfg.prior, &cfg.setup, quad)?.delta.value;
    m_grid
        .iter()
        .map(|&m| {
            let r = simulate(&SimConfig { m, ..cfg.clone() })?;
            Ok(SweepRow { m, fdr_hat: r.fdr_hat, se_fdr: r.se_fdr, delta_n, gap: (r.fdr_hat - delta_n).abs() })
        })
        .collect()
}
