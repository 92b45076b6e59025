use nalgebra::DMatrix;

use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::linalg::SortedSvd;

/// Ordered left singular vectors of a (weighted) concatenation of data
/// bases. Column prefixes form the nested flag
/// `span{y1} ⊂ span{y1, y2} ⊂ …`; the leading `r` columns are the point on
/// `Gr(r, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagPrototype {
    full_basis: DMatrix<f64>,
    singular_values: Vec<f64>,
    r: usize,
}

impl FlagPrototype {
    pub(crate) fn from_subspace(s: &Subspace) -> Self {
        FlagPrototype {
            full_basis: s.basis().clone(),
            singular_values: Vec::new(),
            r: s.sub_dim(),
        }
    }

    pub fn full_basis(&self) -> &DMatrix<f64> {
        &self.full_basis
    }

    /// Singular values matching the columns of [`full_basis`](Self::full_basis), descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// The designated point of `Gr(r, n)`.
    pub fn point(&self) -> Subspace {
        self.flag_member(self.r)
            .expect("r ≤ basis width by construction")
    }

    /// Span of the first `j` ordered vectors.
    pub fn flag_member(&self, j: usize) -> Result<Subspace> {
        if j == 0 || j > self.full_basis.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "flag has members of dimension 1..={}, asked for {j}",
                self.full_basis.ncols()
            )));
        }
        Subspace::new(self.full_basis.columns(0, j).into_owned())
    }
}

/// Flag mean: leading `r` left singular vectors of `[X_1 | … | X_p]`.
pub fn flag_mean(data: &SubspaceDataset, r: usize) -> Result<FlagPrototype> {
    let ones = vec![1.0; data.len()];
    weighted_flag_mean(data, &ones, r)
}

/// Flag mean of the column-scaled concatenation `[w_1X_1 | … | w_pX_p]`.
pub fn weighted_flag_mean(
    data: &SubspaceDataset,
    weights: &[f64],
    r: usize,
) -> Result<FlagPrototype> {
    let n = data.ambient_dim().ok_or(Error::EmptyDataset)?;
    if weights.len() != data.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} points",
            weights.len(),
            data.len()
        )));
    }
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w > 0.0 && w.is_finite()))
    {
        return Err(Error::InvalidWeight { index, value });
    }
    if r == 0 || r > n {
        return Err(Error::DimensionMismatch(format!(
            "prototype dimension {r} not in 1..={n}"
        )));
    }
    let total: usize = data.dims().iter().sum();
    let mut stacked = DMatrix::zeros(n, total);
    let mut col = 0;
    for (x, &w) in data.points().iter().zip(weights) {
        let k = x.sub_dim();
        stacked.columns_mut(col, k).copy_from(&(x.basis() * w));
        col += k;
    }
    let svd = SortedSvd::new(&stacked);
    let rank = svd.rank();
    if r > rank {
        return Err(Error::RankDeficient { rank, required: r });
    }
    Ok(FlagPrototype {
        singular_values: svd.singular_values.iter().copied().collect(),
        full_basis: svd.u,
        r,
    })
}
