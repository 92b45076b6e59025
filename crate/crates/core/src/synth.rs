//! Seeded synthetic datasets.
//!
//! Every point is sampled the same way: draw an `n × k` matrix with entries
//! i.i.d. uniform on `[-0.5, 0.5)`, then keep the `Q` factor of its QR
//! decomposition. Clustered points add such a matrix, scaled by a noise
//! level, to a fixed center basis before orthonormalizing.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::{Provenance, SubspaceDataset};
use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::rng::{self, Stream};

/// `n × k` matrix of i.i.d. `U[-0.5, 0.5)` entries, filled row by row.
pub fn uniform_matrix(rng: &mut Stream, n: usize, k: usize) -> DMatrix<f64> {
    let data: Vec<f64> = (0..n * k).map(|_| rng.random_range(-0.5..0.5)).collect();
    DMatrix::from_row_slice(n, k, &data)
}

/// Uniformly sampled point of `Gr(k, n)` drawn from an existing stream.
pub fn sample_point(rng: &mut Stream, n: usize, k: usize) -> Result<Subspace> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("no Gr({k},{n})")));
    }
    Subspace::orthonormalize(&uniform_matrix(rng, n, k))
}

pub fn uniform_point(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    sample_point(&mut rng::stream(seed, "uniform_point"), n, k)
}

/// `orthonormalize(center + noise_scale · U)` drawn from an existing stream.
pub fn perturb(rng: &mut Stream, center: &Subspace, noise_scale: f64) -> Result<Subspace> {
    let z = uniform_matrix(rng, center.ambient_dim(), center.sub_dim());
    Subspace::orthonormalize(&(center.basis() + z * noise_scale))
}

pub fn perturbed_cluster(
    center: &Subspace,
    count: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<SubspaceDataset> {
    if !(noise_scale >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise scale must be nonnegative, got {noise_scale}"
        )));
    }
    let points = (0..count)
        .map(|i| {
            let mut s = rng::substream(seed, "perturbed_cluster", i as u64);
            perturb(&mut s, center, noise_scale)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubspaceDataset::new(points)?.with_provenance(Provenance {
        generator: "perturbed_cluster".into(),
        params: params(json!({
            "n": center.ambient_dim(),
            "k": center.sub_dim(),
            "count": count,
            "noise_scale": noise_scale,
        })),
        seed: Some(seed),
    }))
}

/// Ten points of `Gr(3, 20)` followed by ten points of `Gr(5, 20)`.
pub fn mixed_dim_dataset(seed: u64) -> Result<SubspaceDataset> {
    let mut points = Vec::with_capacity(20);
    for (i, k) in std::iter::repeat_n(3, 10)
        .chain(std::iter::repeat_n(5, 10))
        .enumerate()
    {
        let mut s = rng::substream(seed, "mixed_dim_dataset", i as u64);
        points.push(sample_point(&mut s, 20, k)?);
    }
    Ok(SubspaceDataset::new(points)?.with_provenance(Provenance {
        generator: "mixed_dim_dataset".into(),
        params: params(json!({ "n": 20, "dims": [[3, 10], [5, 10]] })),
        seed: Some(seed),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierParams {
    pub n: usize,
    pub k: usize,
    pub inliers: usize,
    pub outliers: usize,
    pub noise_scale: f64,
}

impl Default for OutlierParams {
    fn default() -> Self {
        OutlierParams {
            n: 20,
            k: 3,
            inliers: 180,
            outliers: 20,
            noise_scale: 0.01,
        }
    }
}

pub const INLIER: usize = 0;
pub const OUTLIER: usize = 1;

/// A tight cluster around a random center plus uniformly random outliers.
/// Inliers come first and carry label [`INLIER`]; outliers carry
/// [`OUTLIER`]. Returns the dataset and the cluster center.
pub fn outlier_dataset_with(p: OutlierParams, seed: u64) -> Result<(SubspaceDataset, Subspace)> {
    let center = sample_point(&mut rng::stream(seed, "outlier_dataset/center"), p.n, p.k)?;
    let mut points = Vec::with_capacity(p.inliers + p.outliers);
    for i in 0..p.inliers {
        let mut s = rng::substream(seed, "outlier_dataset/inlier", i as u64);
        points.push(perturb(&mut s, &center, p.noise_scale)?);
    }
    for i in 0..p.outliers {
        let mut s = rng::substream(seed, "outlier_dataset/outlier", i as u64);
        points.push(sample_point(&mut s, p.n, p.k)?);
    }
    let labels = std::iter::repeat_n(INLIER, p.inliers)
        .chain(std::iter::repeat_n(OUTLIER, p.outliers))
        .collect();
    let ds = SubspaceDataset::new(points)?
        .with_labels(labels)?
        .with_provenance(Provenance {
            generator: "outlier_dataset".into(),
            params: params(serde_json::to_value(p)?),
            seed: Some(seed),
        });
    Ok((ds, center))
}

/// 180 inliers around a random `Gr(3, 20)` center (noise 0.01) and 20
/// uniform outliers.
pub fn outlier_dataset(seed: u64) -> Result<(SubspaceDataset, Subspace)> {
    outlier_dataset_with(OutlierParams::default(), seed)
}

/// Labeled multi-class benchmark for clustering.
///
/// Each class has a uniformly random center on `Gr(k, n)`. Within a class,
/// a fraction of the points are contaminated: they keep the class label but
/// are drawn uniformly from the Grassmannian instead of around the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub n: usize,
    pub k: usize,
    pub classes: usize,
    pub per_class: usize,
    pub outlier_fraction: f64,
    pub noise_scale: f64,
}

impl Default for ClassParams {
    fn default() -> Self {
        ClassParams {
            n: 20,
            k: 3,
            classes: 5,
            per_class: 20,
            outlier_fraction: 0.2,
            noise_scale: 1.0,
        }
    }
}

pub fn class_dataset(p: ClassParams, seed: u64) -> Result<SubspaceDataset> {
    if !(0.0..=1.0).contains(&p.outlier_fraction) {
        return Err(Error::InvalidArgument(format!(
            "outlier fraction {} outside [0, 1]",
            p.outlier_fraction
        )));
    }
    let outliers_per_class = (p.per_class as f64 * p.outlier_fraction).round() as usize;
    let mut points = Vec::with_capacity(p.classes * p.per_class);
    let mut labels = Vec::with_capacity(p.classes * p.per_class);
    for c in 0..p.classes {
        let center = sample_point(
            &mut rng::substream(seed, "class_dataset/center", c as u64),
            p.n,
            p.k,
        )?;
        for j in 0..p.per_class {
            let idx = (c * p.per_class + j) as u64;
            let point = if j < p.per_class - outliers_per_class {
                perturb(
                    &mut rng::substream(seed, "class_dataset/inlier", idx),
                    &center,
                    p.noise_scale,
                )?
            } else {
                sample_point(
                    &mut rng::substream(seed, "class_dataset/outlier", idx),
                    p.n,
                    p.k,
                )?
            };
            points.push(point);
            labels.push(c);
        }
    }
    Ok(SubspaceDataset::new(points)?
        .with_labels(labels)?
        .with_provenance(Provenance {
            generator: "class_dataset".into(),
            params: params(serde_json::to_value(p)?),
            seed: Some(seed),
        }))
}

/// Subspace representative of a stack of frames (one vectorized frame per
/// column): the first `k` columns of `Q` from the QR decomposition of the
/// stack.
pub fn ingest_frame_stack(frames: &DMatrix<f64>, k: usize) -> Result<Subspace> {
    let (n, t) = frames.shape();
    if k == 0 || k > n.min(t) {
        return Err(Error::InvalidArgument(format!(
            "cannot take {k} columns from a {n}x{t} frame stack"
        )));
    }
    // Without pivoting, the leading k columns of Q depend only on the
    // leading k frames.
    Subspace::orthonormalize(&frames.columns(0, k).into_owned())
}

fn params(v: serde_json::Value) -> serde_json::Map<String, serde_json::Value> {
    match v {
        serde_json::Value::Object(m) => m,
        _ => serde_json::Map::new(),
    }
}
