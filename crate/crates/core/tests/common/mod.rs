#![allow(dead_code)]

use flagirls::grassmann::Subspace;
use flagirls::{linalg, rng, synth, SubspaceDataset};
use nalgebra::DMatrix;

pub fn orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut s = rng::stream(seed, "test_orthogonal");
    linalg::thin_q(&synth::uniform_matrix(&mut s, n, n)).unwrap()
}

pub fn point(n: usize, k: usize, seed: u64) -> Subspace {
    synth::uniform_point(n, k, seed).unwrap()
}

/// `p` random points of `Gr(k_i, n)` with `k_i` cycling through `dims`.
pub fn dataset(n: usize, dims: &[usize], p: usize, seed: u64) -> SubspaceDataset {
    let mut s = rng::stream(seed, "test_dataset");
    let points = (0..p)
        .map(|i| synth::sample_point(&mut s, n, dims[i % dims.len()]).unwrap())
        .collect();
    SubspaceDataset::new(points).unwrap()
}

pub fn max_angle(x: &Subspace, y: &Subspace) -> f64 {
    flagirls::principal_angles(x, y).unwrap().max()
}

pub fn line(v: &[f64]) -> Subspace {
    Subspace::orthonormalize(&DMatrix::from_column_slice(v.len(), 1, v)).unwrap()
}
