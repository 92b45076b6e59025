//! Subspace LBG clustering and purity scoring.
//!
//! Fixed-size Lloyd rounds: assign every point to its nearest center by
//! chordal distance (ties go to the lowest center index), then replace each
//! center by the chosen prototype of its members. Centers start at distinct
//! random data points. An emptied center is reseeded at the point currently
//! worst served by its own center.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::dataset::SubspaceDataset;
use crate::error::{Error, Result};
use crate::grassmann::{chordal_distance, Subspace};
use crate::io;
use crate::prototypes::{self, Init, Method, SolverConfig};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct LbgConfig {
    pub codebook_size: usize,
    pub method: Method,
    pub seed: u64,
    pub max_rounds: usize,
    /// Stop when the relative change in distortion drops below this.
    pub rel_tol: f64,
    /// Prototype dimension and solver tolerances for center updates. Its
    /// `init` is ignored; iterative solvers restart from the current center.
    pub solver: SolverConfig,
}

impl LbgConfig {
    pub fn new(codebook_size: usize, method: Method, r: usize, seed: u64) -> Self {
        LbgConfig {
            codebook_size,
            method,
            seed,
            max_rounds: 50,
            rel_tol: 1e-6,
            solver: SolverConfig::new(r),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Codebook {
    pub centers: Vec<Subspace>,
    pub assignments: Vec<usize>,
    /// Sum of chordal distances from each point to its assigned center.
    pub distortion: f64,
    /// Distortion after every assignment step.
    pub distortion_trace: Vec<f64>,
    pub rounds: usize,
    pub method: Method,
}

#[derive(Debug, Serialize, Deserialize)]
struct CodebookFile {
    method: Method,
    codebook_size: usize,
    r: usize,
    centers: Vec<String>,
    assignments: Vec<usize>,
    distortion: f64,
    distortion_trace: Vec<f64>,
    rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity: Option<f64>,
}

impl Codebook {
    /// Writes `center_XX.csv` files and `codebook.json` (assignments,
    /// distortion trace and, when labels are given, purity).
    pub fn save(&self, dir: &Path, labels: Option<&[usize]>) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut names = Vec::with_capacity(self.centers.len());
        for (j, c) in self.centers.iter().enumerate() {
            let name = format!("center_{j:02}.csv");
            io::write_subspace(&dir.join(&name), c)?;
            names.push(name);
        }
        let purity = labels
            .map(|l| cluster_purity(&self.assignments, l))
            .transpose()?;
        let file = CodebookFile {
            method: self.method,
            codebook_size: self.centers.len(),
            r: self.centers.first().map_or(0, Subspace::sub_dim),
            centers: names,
            assignments: self.assignments.clone(),
            distortion: self.distortion,
            distortion_trace: self.distortion_trace.clone(),
            rounds: self.rounds,
            purity,
        };
        let path = dir.join("codebook.json");
        fs::write(&path, serde_json::to_string_pretty(&file)? + "\n")
            .map_err(|e| Error::io(&path, e))
    }
}

/// Nearest center for every point, with the distance to it.
pub fn assign(data: &SubspaceDataset, centers: &[Subspace]) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut labels = Vec::with_capacity(data.len());
    let mut dists = Vec::with_capacity(data.len());
    for x in data.points() {
        let mut best = (0, f64::INFINITY);
        for (j, c) in centers.iter().enumerate() {
            let d = chordal_distance(x, c)?;
            if d < best.1 {
                best = (j, d);
            }
        }
        labels.push(best.0);
        dists.push(best.1);
    }
    Ok((labels, dists))
}

pub fn lbg_cluster(data: &SubspaceDataset, cfg: &LbgConfig) -> Result<Codebook> {
    let p = data.len();
    if p == 0 {
        return Err(Error::EmptyDataset);
    }
    if cfg.codebook_size == 0 {
        return Err(Error::InvalidArgument(
            "codebook size must be positive".into(),
        ));
    }
    if cfg.codebook_size > p {
        return Err(Error::TooManyCenters {
            requested: cfg.codebook_size,
            available: p,
        });
    }
    let r = cfg.solver.r;
    if let Some((i, x)) = data
        .points()
        .iter()
        .enumerate()
        .find(|(_, x)| x.sub_dim() < r)
    {
        return Err(Error::InvalidArgument(format!(
            "point {i} has dimension {} < r = {r}; centers are seeded from data points",
            x.sub_dim()
        )));
    }
    if cfg.method == Method::L2Median {
        crate::prototypes::objective_geodesic_sum(data, &data.points()[0].leading(r)?)?;
    }

    let mut stream = rng::stream(cfg.seed, "lbg_init");
    let mut centers = index::sample(&mut stream, p, cfg.codebook_size)
        .into_iter()
        .map(|i| data.points()[i].leading(r))
        .collect::<Result<Vec<_>>>()?;

    let mut trace = Vec::new();
    let mut rounds = 0;
    loop {
        let (assignments, dists) = assign(data, &centers)?;
        let distortion: f64 = dists.iter().sum();
        let previous = trace.last().copied();
        trace.push(distortion);
        let settled = match previous {
            Some(prev) if prev > 0.0 => ((prev - distortion) / prev).abs() < cfg.rel_tol,
            Some(_) => true,
            None => false,
        };
        if settled || rounds == cfg.max_rounds {
            return Ok(Codebook {
                centers,
                assignments,
                distortion,
                distortion_trace: trace,
                rounds,
                method: cfg.method,
            });
        }
        centers = update_centers(data, &centers, &assignments, &dists, cfg)?;
        rounds += 1;
    }
}

fn update_centers(
    data: &SubspaceDataset,
    centers: &[Subspace],
    assignments: &[usize],
    dists: &[f64],
    cfg: &LbgConfig,
) -> Result<Vec<Subspace>> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for (i, &a) in assignments.iter().enumerate() {
        members[a].push(i);
    }
    let mut reseeded: Vec<usize> = Vec::new();
    let mut next = Vec::with_capacity(centers.len());
    for (j, idx) in members.iter().enumerate() {
        if idx.is_empty() {
            let far = (0..dists.len())
                .filter(|i| !reseeded.contains(i))
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if dists[b] >= dists[i] => Some(b),
                    _ => Some(i),
                })
                .expect("codebook size ≤ p leaves a candidate");
            reseeded.push(far);
            next.push(data.points()[far].leading(cfg.solver.r)?);
            continue;
        }
        let subset = data.select(idx);
        let solver = cfg
            .solver
            .clone()
            .with_init(Init::Explicit(centers[j].clone()));
        next.push(prototypes::solve(cfg.method, &subset, &solver)?.prototype);
    }
    Ok(next)
}

/// Fraction of points whose cluster's majority label equals their own:
/// `Σ_clusters max_label_count / total`.
pub fn cluster_purity(assignments: &[usize], labels: &[usize]) -> Result<f64> {
    if assignments.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} assignments for {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    if assignments.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for (&a, &l) in assignments.iter().zip(labels) {
        *counts.entry((a, l)).or_default() += 1;
    }
    let mut best: HashMap<usize, usize> = HashMap::new();
    for (&(a, _), &c) in &counts {
        let e = best.entry(a).or_default();
        *e = (*e).max(c);
    }
    Ok(best.values().sum::<usize>() as f64 / assignments.len() as f64)
}
