//! Experiment instrumentation: distance matrices, test-point verification
//! of candidate minimizers, the outlier-robustness comparison and classical
//! MDS.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::{chordal_distance, geodesic_distance, Subspace};
use crate::prototypes::{
    flag_mean, flag_median, l2_median, objective_chordal_sq_sum, objective_chordal_sum,
    objective_geodesic_sum, Init, SolverConfig,
};
use crate::rng;
use crate::synth::{self, OutlierParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Chordal,
    Geodesic,
}

impl Metric {
    pub fn distance(self, x: &Subspace, y: &Subspace) -> Result<f64> {
        match self {
            Metric::Chordal => chordal_distance(x, y),
            Metric::Geodesic => geodesic_distance(x, y),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chordal" => Ok(Metric::Chordal),
            "geodesic" => Ok(Metric::Geodesic),
            _ => Err(Error::InvalidArgument(format!(
                "unknown metric {s:?} (expected chordal or geodesic)"
            ))),
        }
    }
}

/// Symmetric matrix of pairwise subspace distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub metric: Metric,
    values: DMatrix<f64>,
}

impl DistanceMatrix {
    pub fn build(points: &[Subspace], metric: Metric) -> Result<Self> {
        let p = points.len();
        let mut values = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in i + 1..p {
                let d = metric.distance(&points[i], &points[j])?;
                values[(i, j)] = d;
                values[(j, i)] = d;
            }
        }
        Ok(DistanceMatrix { metric, values })
    }

    /// Wraps an arbitrary symmetric, nonnegative, zero-diagonal matrix.
    pub fn from_matrix(values: DMatrix<f64>, metric: Metric) -> Result<Self> {
        let p = values.nrows();
        if values.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "distance matrix is {}x{}",
                p,
                values.ncols()
            )));
        }
        for i in 0..p {
            if values[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let (a, b) = (values[(i, j)], values[(j, i)]);
                if !(a >= 0.0) || (a - b).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "entries ({i},{j}) and ({j},{i}) are not a symmetric nonnegative pair"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { metric, values })
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

/// Objective used when probing a candidate with test points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Flag median objective, sum of chordal distances.
    ChordalSum,
    /// Flag mean objective, sum of squared chordal distances.
    ChordalSqSum,
    /// ℓ2-median objective, sum of geodesic distances.
    GeodesicSum,
}

impl Objective {
    pub fn evaluate(self, data: &SubspaceDataset, y: &Subspace) -> Result<f64> {
        match self {
            Objective::ChordalSum => objective_chordal_sum(data, y),
            Objective::ChordalSqSum => objective_chordal_sq_sum(data, y),
            Objective::GeodesicSum => objective_geodesic_sum(data, y),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::ChordalSum => "chordal_sum",
            Objective::ChordalSqSum => "chordal_sq_sum",
            Objective::GeodesicSum => "geodesic_sum",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chordal_sum" | "chordal-sum" => Ok(Objective::ChordalSum),
            "chordal_sq_sum" | "chordal-sq-sum" | "chordal_sq" => Ok(Objective::ChordalSqSum),
            "geodesic_sum" | "geodesic-sum" => Ok(Objective::GeodesicSum),
            _ => Err(Error::InvalidArgument(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub verified: bool,
    pub violations: usize,
    pub candidate_value: f64,
    pub min_test_value: f64,
}

pub const DEFAULT_TEST_POINTS: usize = 100;
pub const DEFAULT_TEST_SCALE: f64 = 1e-5;

/// Probes `candidate` with `n_test_points` random nearby points
/// `orthonormalize(Y + scale · U)`, `U` i.i.d. `U[-0.5, 0.5)`. The candidate
/// is verified when no test point has a strictly smaller objective.
pub fn verify_local_min(
    data: &SubspaceDataset,
    candidate: &Subspace,
    objective: Objective,
    n_test_points: usize,
    scale: f64,
    seed: u64,
) -> Result<Verification> {
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "test-point scale must be positive, got {scale}"
        )));
    }
    let candidate_value = objective.evaluate(data, candidate)?;
    let mut stream = rng::stream(seed, "verify_local_min");
    let mut violations = 0;
    let mut min_test_value = f64::INFINITY;
    for _ in 0..n_test_points {
        let test = synth::perturb(&mut stream, candidate, scale)?;
        let v = objective.evaluate(data, &test)?;
        min_test_value = min_test_value.min(v);
        if v < candidate_value {
            violations += 1;
        }
    }
    Ok(Verification {
        verified: violations == 0,
        violations,
        candidate_value,
        min_test_value,
    })
}

/// Chordal distance from each prototype to the true cluster center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub seed: u64,
    pub flag_median: f64,
    pub l2_median: f64,
    pub flag_mean: f64,
}

/// Builds the inlier/outlier dataset for `seed`, runs all three prototypes
/// (the two iterative ones from the same random start) and measures how far
/// each lands from the inlier center.
pub fn outlier_robustness(
    params: OutlierParams,
    solver: &SolverConfig,
    seed: u64,
) -> Result<RobustnessRow> {
    if params.inliers < 1 {
        return Err(Error::InvalidArgument(
            "at least one inlier is required".into(),
        ));
    }
    let (data, center) = synth::outlier_dataset_with(params, seed)?;
    let mut cfg = solver.clone();
    cfg.r = params.k;
    cfg.init = Init::Random { seed };
    let median = flag_median(&data, &cfg)?.prototype;
    let l2 = l2_median(&data, &cfg)?.prototype;
    let mean = flag_mean(&data, params.k)?.point();
    Ok(RobustnessRow {
        seed,
        flag_median: chordal_distance(&median, &center)?,
        l2_median: chordal_distance(&l2, &center)?,
        flag_mean: chordal_distance(&mean, &center)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsEmbedding {
    /// `p × out_dim` coordinates.
    pub coords: DMatrix<f64>,
    /// Eigenvalues of the doubly centered matrix used for each column.
    pub eigenvalues: Vec<f64>,
    /// Set when fewer than `out_dim` eigenvalues were positive and zero
    /// columns were appended.
    pub padded: bool,
}

/// Classical (Torgerson) MDS: eigenvectors of `B = −½ J (D∘D) J` scaled by
/// the square roots of their eigenvalues, descending. Each column's
/// largest-magnitude entry is made positive.
pub fn classical_mds(d: &DistanceMatrix, out_dim: usize) -> Result<MdsEmbedding> {
    let p = d.size();
    if out_dim == 0 || out_dim > p {
        return Err(Error::InvalidArgument(format!(
            "embedding dimension {out_dim} not in 1..={p}"
        )));
    }
    let sq = d.values.component_mul(&d.values);
    let j = DMatrix::<f64>::identity(p, p) - DMatrix::from_element(p, p, 1.0 / p as f64);
    let b = (&j * sq * &j) * -0.5;
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let largest = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = p as f64 * f64::EPSILON * largest;

    let mut coords = DMatrix::zeros(p, out_dim);
    let mut eigenvalues = Vec::with_capacity(out_dim);
    let mut padded = false;
    for (col, &idx) in order.iter().take(out_dim).enumerate() {
        let lambda = eig.eigenvalues[idx];
        eigenvalues.push(lambda);
        if lambda <= tol {
            padded = true;
            continue;
        }
        let mut v = eig.eigenvectors.column(idx).into_owned() * lambda.sqrt();
        let pivot = v
            .iter()
            .copied()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            v.neg_mut();
        }
        coords.set_column(col, &v);
    }
    Ok(MdsEmbedding {
        coords,
        eigenvalues,
        padded,
    })
}

/// Kruskal stress-1 of an embedding against the target distances.
pub fn stress(d: &DistanceMatrix, coords: &DMatrix<f64>) -> f64 {
    let p = d.size();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p {
        for j in i + 1..p {
            let e = (coords.row(i) - coords.row(j)).norm();
            let t = d.values[(i, j)];
            num += (t - e).powi(2);
            den += t * t;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Pairwise Euclidean distances between embedding rows.
pub fn embedded_distances(coords: &DMatrix<f64>) -> DMatrix<f64> {
    let p = coords.nrows();
    DMatrix::from_fn(p, p, |i, j| (coords.row(i) - coords.row(j)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_embed_exactly() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0]);
        let d = DistanceMatrix::from_matrix(d, Metric::Geodesic).unwrap();
        let mds = classical_mds(&d, 1).unwrap();
        let e = embedded_distances(&mds.coords);
        assert!((e - d.values()).abs().max() < 1e-12);
        assert!(!mds.padded);
        let two = classical_mds(&d, 2).unwrap();
        assert!(two.padded);
        assert!(two.coords.column(1).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_distances_embed_at_origin() {
        let d = DistanceMatrix::from_matrix(DMatrix::zeros(4, 4), Metric::Chordal).unwrap();
        let mds = classical_mds(&d, 2).unwrap();
        assert!(mds.coords.iter().all(|&x| x == 0.0));
        assert!(mds.padded);
    }

    #[test]
    fn mds_rejects_large_out_dim() {
        let d = DistanceMatrix::from_matrix(DMatrix::zeros(2, 2), Metric::Chordal).unwrap();
        assert!(classical_mds(&d, 3).is_err());
    }

    #[test]
    fn from_matrix_validates() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(asym, Metric::Chordal).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(diag, Metric::Chordal).is_err());
    }

    #[test]
    fn distance_matrix_matches_pairwise_calls() {
        let ds = synth::mixed_dim_dataset(8).unwrap();
        let m = DistanceMatrix::build(ds.points(), Metric::Chordal).unwrap();
        for i in 0..ds.len() {
            assert_eq!(m.values()[(i, i)], 0.0);
            for j in 0..ds.len() {
                if i != j {
                    let d = chordal_distance(&ds.points()[i], &ds.points()[j]).unwrap();
                    assert_eq!(
                        m.values()[(i, j)],
                        if i < j { d } else { m.values()[(j, i)] }
                    );
                }
                assert!((m.values()[(i, j)] - m.values()[(j, i)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn far_candidate_is_not_verified() {
        let (ds, _) = synth::outlier_dataset(1).unwrap();
        let far = synth::uniform_point(20, 3, 999).unwrap();
        let v = verify_local_min(&ds, &far, Objective::ChordalSum, 100, 1e-2, 0).unwrap();
        assert!(v.violations > 0);
        assert!(!v.verified);
    }
}
