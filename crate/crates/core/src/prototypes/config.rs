use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::flag_mean::FlagPrototype;
use crate::error::{Error, Result};
use crate::grassmann::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FlagMedian,
    FlagMean,
    L2Median,
    #[serde(rename = "gd-flag-median")]
    GradientDescent,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::FlagMedian,
        Method::FlagMean,
        Method::L2Median,
        Method::GradientDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FlagMedian => "flag-median",
            Method::FlagMean => "flag-mean",
            Method::L2Median => "l2-median",
            Method::GradientDescent => "gd-flag-median",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method {s:?} (expected one of flag-median, flag-mean, l2-median, gd-flag-median)"
                ))
            })
    }
}

/// Starting iterate of an iterative solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `orthonormalize(U[-0.5, 0.5)^{n×r})` from the seeded stream.
    Random {
        seed: u64,
    },
    /// Leading `r` columns of the indexed data point.
    Datapoint {
        index: usize,
    },
    Explicit(Subspace),
}

impl Init {
    pub fn describe(&self) -> String {
        match self {
            Init::Random { .. } => "random".into(),
            Init::Datapoint { index } => format!("datapoint:{index}"),
            Init::Explicit(_) => "explicit".into(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Init::Random { seed } => Some(*seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Prototype dimension.
    pub r: usize,
    /// Singularity guard added to FlagIRLS radicands (and used as the
    /// distance floor of the other solvers).
    pub eps: f64,
    /// Convergence threshold on consecutive objective values.
    pub delta: f64,
    pub max_iters: usize,
    pub init: Init,
    /// Gradient-descent step size.
    pub step_size: f64,
    /// Fraction of the Weiszfeld tangent taken per ℓ2-median update
    /// (1 = full step).
    pub weiszfeld_step: f64,
}

impl SolverConfig {
    pub fn new(r: usize) -> Self {
        SolverConfig {
            r,
            eps: 1e-7,
            delta: 1e-11,
            max_iters: 1000,
            init: Init::Random { seed: 0 },
            step_size: 0.01,
            weiszfeld_step: 1.0,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if self.r < 1 {
            return bad("r must be at least 1");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        if !(self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if !(self.weiszfeld_step > 0.0) {
            return bad("weiszfeld_step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    ObjectiveIncreased,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub prototype: Subspace,
    /// Full ordered basis for methods that produce one (flag mean and
    /// FlagIRLS).
    pub flag: Option<FlagPrototype>,
    /// Objective at the initial point and at every kept iterate.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
}

impl SolverResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }

    pub fn summary(
        &self,
        method: Method,
        cfg: &SolverConfig,
        prototype_path: &str,
    ) -> SolverSummary {
        SolverSummary {
            method,
            r: cfg.r,
            eps: cfg.eps,
            delta: cfg.delta,
            max_iters: cfg.max_iters,
            step_size: cfg.step_size,
            weiszfeld_step: cfg.weiszfeld_step,
            init: cfg.init.describe(),
            seed: cfg.init.seed(),
            iterations: self.iterations,
            termination: self.termination,
            objective_trace: self.objective_trace.clone(),
            prototype_path: prototype_path.to_string(),
        }
    }
}

/// JSON form of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub method: Method,
    pub r: usize,
    pub eps: f64,
    pub delta: f64,
    pub max_iters: usize,
    pub step_size: f64,
    pub weiszfeld_step: f64,
    pub init: String,
    pub seed: Option<u64>,
    pub iterations: usize,
    pub termination: Termination,
    pub objective_trace: Vec<f64>,
    pub prototype_path: String,
}
