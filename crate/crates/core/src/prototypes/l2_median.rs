use nalgebra::DMatrix;

use super::objective::{check_equal_dims, objective_geodesic_sum};
use super::{initial_point, iterate, SolverConfig, SolverResult};
use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::{self, Subspace};

/// One Riemannian Weiszfeld update from `Y`:
/// `Y ← Exp_Y(α · Σ_i Log_Y(X_i)/d_i / Σ_i 1/d_i)` with `d_i` the geodesic
/// distance floored at `eps`.
pub fn weiszfeld_step(
    data: &SubspaceDataset,
    y: &Subspace,
    eps: f64,
    alpha: f64,
) -> Result<Subspace> {
    let mut tangent = DMatrix::zeros(y.ambient_dim(), y.sub_dim());
    let mut total_weight = 0.0;
    for (index, x) in data.points().iter().enumerate() {
        let w = grassmann::geodesic_distance(x, y)?.max(eps).recip();
        let log = grassmann::log_map(y, x).map_err(|e| match e {
            Error::LogUndefined { .. } => Error::LogUndefined { index: Some(index) },
            other => other,
        })?;
        tangent += log * w;
        total_weight += w;
    }
    tangent *= alpha / total_weight;
    grassmann::exp_map(y, &tangent)
}

/// ℓ2-median (geodesic geometric median) by a Weiszfeld-type iteration.
/// All data points must have dimension `cfg.r`.
pub fn l2_median(data: &SubspaceDataset, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    super::check_nonempty(data)?;
    check_equal_dims(data, cfg.r)?;
    let start = initial_point(data, cfg)?;
    let (prototype, trace, iterations, termination) = iterate(
        start,
        cfg,
        |y| weiszfeld_step(data, y, cfg.eps, cfg.weiszfeld_step),
        |y| objective_geodesic_sum(data, y),
    )?;
    Ok(SolverResult {
        prototype,
        flag: None,
        objective_trace: trace,
        iterations,
        termination,
    })
}
