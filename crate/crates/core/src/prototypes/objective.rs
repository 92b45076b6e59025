use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::{self, Subspace};

fn check_ambient(data: &SubspaceDataset, y: &Subspace) -> Result<()> {
    match data.ambient_dim() {
        Some(n) if n != y.ambient_dim() => Err(Error::DimensionMismatch(format!(
            "data lives in R^{n}, candidate in R^{}",
            y.ambient_dim()
        ))),
        _ => Ok(()),
    }
}

/// Per-point `m_i − tr(YᵀX_iX_iᵀY)` with `m_i = min(r, k_i)`, clamped at 0.
pub(crate) fn radicands(data: &SubspaceDataset, y: &Subspace) -> Result<Vec<f64>> {
    check_ambient(data, y)?;
    Ok(data
        .points()
        .iter()
        .map(|x| grassmann::chordal_radicand(x, y).max(0.0))
        .collect())
}

/// Flag median objective `Σ_i ‖sin θ([X_i],[Y])‖₂`.
pub fn objective_chordal_sum(data: &SubspaceDataset, y: &Subspace) -> Result<f64> {
    Ok(radicands(data, y)?.into_iter().map(f64::sqrt).sum())
}

/// Flag mean objective `Σ_i ‖sin θ([X_i],[Y])‖₂²`.
pub fn objective_chordal_sq_sum(data: &SubspaceDataset, y: &Subspace) -> Result<f64> {
    Ok(radicands(data, y)?.into_iter().sum())
}

/// ℓ2-median objective `Σ_i ‖θ([X_i],[Y])‖₂`; every point must share `Y`'s
/// dimension.
pub fn objective_geodesic_sum(data: &SubspaceDataset, y: &Subspace) -> Result<f64> {
    check_ambient(data, y)?;
    check_equal_dims(data, y.sub_dim())?;
    data.points()
        .iter()
        .map(|x| grassmann::geodesic_distance(x, y))
        .sum()
}

pub(crate) fn check_equal_dims(data: &SubspaceDataset, r: usize) -> Result<()> {
    match data
        .points()
        .iter()
        .enumerate()
        .find(|(_, x)| x.sub_dim() != r)
    {
        Some((index, x)) => Err(Error::UnequalDimensions {
            index,
            found: x.sub_dim(),
            expected: r,
        }),
        None => Ok(()),
    }
}
