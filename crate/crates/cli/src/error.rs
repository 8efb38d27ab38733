use freqfdr::analysis::AnalysisError;
use freqfdr::exact::ExactError;
use freqfdr::expansions::ExpansionError;
use freqfdr::models::ModelError;
use freqfdr::mtsim::SimError;
use freqfdr::numkernel::{NumError, QuadratureError, RootError};
use freqfdr::priors::PriorError;
use serde_json::json;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    NonConvergence,
    Runtime,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub messages: Vec<String>,
}

impl CliError {
    pub fn config(messages: Vec<String>) -> Self {
        CliError { kind: Kind::Config, messages }
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError { kind: Kind::Runtime, messages: vec![msg.into()] }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.kind {
            Kind::Config => 2,
            Kind::NonConvergence => 3,
            Kind::Runtime => 1,
        })
    }

    /// Machine-readable record written to stderr.
    pub fn record(&self) -> String {
        let kind = match self.kind {
            Kind::Config => "config",
            Kind::NonConvergence => "non_convergence",
            Kind::Runtime => "runtime",
        };
        json!({ "error": { "kind": kind, "messages": self.messages } }).to_string()
    }
}

/// Whether a library error bottoms out in a solver that ran out of iterations.
pub trait NonConvergence {
    fn non_convergence(&self) -> bool;
}

impl NonConvergence for QuadratureError {
    fn non_convergence(&self) -> bool {
        matches!(self, QuadratureError::NotConverged { .. })
    }
}

impl NonConvergence for RootError {
    fn non_convergence(&self) -> bool {
        matches!(self, RootError::NotConverged { .. })
    }
}

impl NonConvergence for NumError {
    fn non_convergence(&self) -> bool {
        matches!(self, NumError::Root(r) if r.non_convergence())
    }
}

impl NonConvergence for ModelError {
    fn non_convergence(&self) -> bool {
        matches!(self, ModelError::Num(e) if e.non_convergence())
    }
}

impl NonConvergence for PriorError {
    fn non_convergence(&self) -> bool {
        matches!(self, PriorError::Quadrature(e) if e.non_convergence())
    }
}

impl NonConvergence for ExpansionError {
    fn non_convergence(&self) -> bool {
        match self {
            ExpansionError::Prior(e) => e.non_convergence(),
            ExpansionError::Model(e) => e.non_convergence(),
            ExpansionError::Num(e) => e.non_convergence(),
            _ => false,
        }
    }
}

impl NonConvergence for ExactError {
    fn non_convergence(&self) -> bool {
        match self {
            ExactError::Quadrature { source, .. } => source.non_convergence(),
            ExactError::Model(e) => e.non_convergence(),
            ExactError::Prior(e) => e.non_convergence(),
            ExactError::ZeroDenominator { .. } => false,
        }
    }
}

impl NonConvergence for SimError {
    fn non_convergence(&self) -> bool {
        match self {
            SimError::Model(e) => e.non_convergence(),
            SimError::Exact(e) => e.non_convergence(),
            _ => false,
        }
    }
}

impl NonConvergence for AnalysisError {
    fn non_convergence(&self) -> bool {
        match self {
            AnalysisError::Exact(e) => e.non_convergence(),
            AnalysisError::Expansion(e) => e.non_convergence(),
            AnalysisError::Prior(e) => e.non_convergence(),
            AnalysisError::Num(e) => e.non_convergence(),
            _ => false,
        }
    }
}

macro_rules! from_lib {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let kind = if e.non_convergence() { Kind::NonConvergence } else { Kind::Runtime };
                CliError { kind, messages: vec![e.to_string()] }
            }
        }
    )*};
}

from_lib!(ExactError, ExpansionError, AnalysisError, PriorError, ModelError);

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(v) => CliError::config(v),
            SimError::NoSampler(_) => CliError::config(vec![e.to_string()]),
            e => {
                let kind = if e.non_convergence() { Kind::NonConvergence } else { Kind::Runtime };
                CliError { kind, messages: vec![e.to_string()] }
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}
