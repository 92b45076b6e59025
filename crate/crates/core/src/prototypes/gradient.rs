use nalgebra::DMatrix;

use super::objective::{objective_chordal_sum, radicands};
use super::{initial_point, iterate, SolverConfig, SolverResult};
use crate::dataset::SubspaceDataset;
use crate::error::Result;
use crate::grassmann::{self, Subspace};

/// Euclidean gradient of the flag median objective at the representative
/// `Y`: `Σ_i −X_iX_iᵀY / sqrt(m_i − tr(YᵀX_iX_iᵀY) + ε)`.
pub fn flag_median_gradient(
    data: &SubspaceDataset,
    y: &Subspace,
    eps: f64,
) -> Result<DMatrix<f64>> {
    let rads = radicands(data, y)?;
    let mut grad = DMatrix::zeros(y.ambient_dim(), y.sub_dim());
    for (x, rad) in data.points().iter().zip(rads) {
        let xb = x.basis();
        let pull = xb * (xb.transpose() * y.basis());
        grad -= pull / (rad + eps).sqrt();
    }
    Ok(grad)
}

/// Grassmannian gradient descent on the flag median objective with a QR
/// retraction and fixed step size.
pub fn flag_median_gd(data: &SubspaceDataset, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let start = initial_point(data, cfg)?;
    let (prototype, trace, iterations, termination) = iterate(
        start,
        cfg,
        |y| {
            let grad = flag_median_gradient(data, y, cfg.eps)?;
            let horizontal = grassmann::project_horizontal(y, &grad);
            Subspace::orthonormalize(&(y.basis() - horizontal * cfg.step_size))
        },
        |y| objective_chordal_sum(data, y),
    )?;
    Ok(SolverResult {
        prototype,
        flag: None,
        objective_trace: trace,
        iterations,
        termination,
    })
}
