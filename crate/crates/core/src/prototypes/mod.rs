//! Subspace prototypes: flag mean, flag median (FlagIRLS), ℓ2-median
//! (Riemannian Weiszfeld) and a gradient-descent baseline for the flag
//! median objective.
//!
//! The iterative solvers share one driver: they record the objective at
//! every kept iterate, stop when consecutive values differ by less than
//! `delta`, roll back to the previous iterate when the objective increases,
//! and give up after `max_iters` updates.

mod config;
mod flag_mean;
mod flag_median;
mod gradient;
mod l2_median;
mod objective;

pub use config::{Init, Method, SolverConfig, SolverResult, SolverSummary, Termination};
pub use flag_mean::{flag_mean, weighted_flag_mean, FlagPrototype};
pub use flag_median::{flag_median, flag_median_step, flag_median_weights};
pub use gradient::{flag_median_gd, flag_median_gradient};
pub use l2_median::{l2_median, weiszfeld_step};
pub use objective::{objective_chordal_sq_sum, objective_chordal_sum, objective_geodesic_sum};

use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::Subspace;

/// Runs the selected solver. Flag-mean results are wrapped as a single-step
/// result whose trace holds the squared-chordal objective.
pub fn solve(method: Method, data: &SubspaceDataset, cfg: &SolverConfig) -> Result<SolverResult> {
    match method {
        Method::FlagMedian => flag_median(data, cfg),
        Method::FlagMean => {
            cfg.validate()?;
            let flag = flag_mean(data, cfg.r)?;
            let prototype = flag.point();
            let value = objective_chordal_sq_sum(data, &prototype)?;
            Ok(SolverResult {
                prototype,
                flag: Some(flag),
                objective_trace: vec![value],
                iterations: 0,
                termination: Termination::Converged,
            })
        }
        Method::L2Median => l2_median(data, cfg),
        Method::GradientDescent => flag_median_gd(data, cfg),
    }
}

pub(crate) fn check_nonempty(data: &SubspaceDataset) -> Result<usize> {
    data.ambient_dim().ok_or(Error::EmptyDataset)
}

/// Resolves the configured initial iterate for a solver working in `R^n`.
pub(crate) fn initial_point(data: &SubspaceDataset, cfg: &SolverConfig) -> Result<Subspace> {
    let n = check_nonempty(data)?;
    let r = cfg.r;
    if r > n {
        return Err(Error::DimensionMismatch(format!(
            "prototype dimension {r} exceeds ambient dimension {n}"
        )));
    }
    match &cfg.init {
        Init::Random { seed } => {
            crate::synth::sample_point(&mut crate::rng::stream(*seed, "solver_init"), n, r)
        }
        Init::Datapoint { index } => {
            let point = data.points().get(*index).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "init datapoint {index} out of range for {} points",
                    data.len()
                ))
            })?;
            point.leading(r)
        }
        Init::Explicit(s) => {
            if s.ambient_dim() != n || s.sub_dim() != r {
                return Err(Error::DimensionMismatch(format!(
                    "explicit init is Gr({},{}), solver needs Gr({r},{n})",
                    s.sub_dim(),
                    s.ambient_dim()
                )));
            }
            Ok(s.clone())
        }
    }
}

/// Shared iteration driver.
///
/// `step` maps the current iterate to the next; `objective` scores an
/// iterate. An update whose objective rises by at least `delta` is discarded
/// and ends the run; a change smaller than `delta` in either direction ends
/// it as converged (keeping the new iterate only if it did not increase).
pub(crate) fn iterate<S, F>(
    start: Subspace,
    cfg: &SolverConfig,
    mut step: S,
    objective: F,
) -> Result<(Subspace, Vec<f64>, usize, Termination)>
where
    S: FnMut(&Subspace) -> Result<Subspace>,
    F: Fn(&Subspace) -> Result<f64>,
{
    let mut current = start;
    let mut value = objective(&current)?;
    let mut trace = vec![value];
    for it in 1..=cfg.max_iters {
        let next = step(&current)?;
        let next_value = objective(&next)?;
        if (value - next_value).abs() < cfg.delta {
            if next_value <= value {
                trace.push(next_value);
                current = next;
            }
            return Ok((current, trace, it, Termination::Converged));
        }
        if next_value > value {
            return Ok((current, trace, it, Termination::ObjectiveIncreased));
        }
        trace.push(next_value);
        current = next;
        value = next_value;
    }
    Ok((current, trace, cfg.max_iters, Termination::IterationCap))
}
