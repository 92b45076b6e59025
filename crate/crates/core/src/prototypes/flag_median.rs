use std::cell::RefCell;

use super::flag_mean::{weighted_flag_mean, FlagPrototype};
use super::objective::{objective_chordal_sum, radicands};
use super::{initial_point, iterate, SolverConfig, SolverResult};
use crate::dataset::SubspaceDataset;
use crate::error::Result;
use crate::grassmann::Subspace;

/// FlagIRLS weights at `Y`:
/// `w_i = (1 / (m_i − tr(YᵀX_iX_iᵀY) + ε))^{1/4}`, with the radicand
/// clamped at zero before `ε` is added.
pub fn flag_median_weights(data: &SubspaceDataset, y: &Subspace, eps: f64) -> Result<Vec<f64>> {
    Ok(radicands(data, y)?
        .into_iter()
        .map(|rad| (rad + eps).recip().powf(0.25))
        .collect())
}

/// One FlagIRLS update: the weighted flag mean under the weights at `Y`.
pub fn flag_median_step(data: &SubspaceDataset, y: &Subspace, eps: f64) -> Result<FlagPrototype> {
    let weights = flag_median_weights(data, y, eps)?;
    weighted_flag_mean(data, &weights, y.sub_dim())
}

/// Flag median by FlagIRLS (iteratively reweighted flag means).
pub fn flag_median(data: &SubspaceDataset, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let start = initial_point(data, cfg)?;
    let flags: RefCell<Vec<FlagPrototype>> = RefCell::new(Vec::new());
    let (prototype, trace, iterations, termination) = iterate(
        start,
        cfg,
        |y| {
            let flag = flag_median_step(data, y, cfg.eps)?;
            let next = flag.point();
            flags.borrow_mut().push(flag);
            Ok(next)
        },
        |y| objective_chordal_sum(data, y),
    )?;
    // Kept updates form a prefix of the computed ones.
    let kept = trace.len() - 1;
    let flag = if kept == 0 {
        FlagPrototype::from_subspace(&prototype)
    } else {
        flags.into_inner().swap_remove(kept - 1)
    };
    Ok(SolverResult {
        prototype,
        flag: Some(flag),
        objective_trace: trace,
        iterations,
        termination,
    })
}
