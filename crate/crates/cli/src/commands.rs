//! Thin wrappers over the library operations. Every command writes its
//! results into an output directory and leaves its inputs untouched.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use flagirls::analysis::{
    classical_mds, stress, verify_local_min, DistanceMatrix, Metric, Objective,
};
use flagirls::clustering::{lbg_cluster, LbgConfig};
use flagirls::synth::{self, ClassParams, OutlierParams};
use flagirls::{
    io, prototypes, rng, Init, Method, Provenance, SolverConfig, SubspaceDataset, Termination,
};
use serde_json::json;

use crate::{write_json, write_text, OutArg, Outcome, SolverArgs};

fn load(path: &Path) -> anyhow::Result<SubspaceDataset> {
    let (ds, corrected) = SubspaceDataset::load(path)?;
    if !corrected.is_empty() {
        eprintln!(
            "warning: re-orthonormalized {} basis file(s) in {}: {:?}",
            corrected.len(),
            path.display(),
            corrected
        );
    }
    Ok(ds)
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// `random` or `datapoint:<i>`.
pub fn parse_init(spec: &str, seed: u64) -> anyhow::Result<Init> {
    if spec == "random" {
        return Ok(Init::Random { seed });
    }
    if let Some(i) = spec.strip_prefix("datapoint:") {
        let index = i
            .parse()
            .with_context(|| format!("bad datapoint index in {spec:?}"))?;
        return Ok(Init::Datapoint { index });
    }
    bail!("unknown init {spec:?} (expected random or datapoint:<i>)")
}

#[derive(Debug, Args)]
pub struct PrototypeArgs {
    /// Dataset directory (manifest.json plus basis CSV files).
    pub dataset: PathBuf,
    #[arg(long, default_value = "flag-median")]
    pub method: Method,
    /// Prototype dimension.
    #[arg(long)]
    pub r: usize,
    /// `random` or `datapoint:<i>`.
    #[arg(long, default_value = "random")]
    pub init: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

pub fn prototype(a: &PrototypeArgs) -> anyhow::Result<Outcome> {
    let data = load(&a.dataset)?;
    let mut cfg = SolverConfig::new(a.r).with_init(parse_init(&a.init, a.seed)?);
    a.solver.apply(&mut cfg);
    let res = prototypes::solve(a.method, &data, &cfg)?;
    let out = &a.out.out;
    create_dir(out)?;
    io::write_subspace(&out.join("prototype.csv"), &res.prototype)?;
    if let Some(flag) = &res.flag {
        io::write_matrix(&out.join("flag_basis.csv"), flag.full_basis())?;
    }
    write_json(
        &out.join("result.json"),
        &res.summary(a.method, &cfg, "prototype.csv"),
    )?;
    eprintln!(
        "{}: {:?} after {} iterations, objective {}",
        a.method,
        res.termination,
        res.iterations,
        res.final_objective()
    );
    Ok(match res.termination {
        Termination::IterationCap => Outcome::IterationCap,
        _ => Outcome::Ok,
    })
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub codebook_size: usize,
    #[arg(long, default_value = "flag-median")]
    pub method: Method,
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub max_rounds: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

pub fn cluster(a: &ClusterArgs) -> anyhow::Result<Outcome> {
    let data = load(&a.dataset)?;
    let mut cfg = LbgConfig::new(a.codebook_size, a.method, a.r, a.seed);
    cfg.max_rounds = a.max_rounds;
    a.solver.apply(&mut cfg.solver);
    let book = lbg_cluster(&data, &cfg)?;
    book.save(&a.out.out, data.labels())?;
    eprintln!(
        "{} centers, {} rounds, distortion {}",
        book.centers.len(),
        book.rounds,
        book.distortion
    );
    Ok(Outcome::Ok)
}

#[derive(Debug, Args)]
pub struct MdsArgs {
    pub dataset: PathBuf,
    /// `chordal` or `geodesic`.
    #[arg(long, default_value = "geodesic")]
    pub metric: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Extra basis CSV files (e.g. prototypes) embedded after the data.
    #[arg(long)]
    pub extra: Vec<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

/// Header `name,x1,…,xk` followed by one row per point.
pub(crate) fn coords_csv(names: &[String], coords: &nalgebra::DMatrix<f64>) -> String {
    let mut text = String::from("point");
    for j in 0..coords.ncols() {
        text.push_str(&format!(",x{}", j + 1));
    }
    text.push('\n');
    for (i, name) in names.iter().enumerate() {
        text.push_str(name);
        for j in 0..coords.ncols() {
            text.push_str(&format!(",{}", coords[(i, j)]));
        }
        text.push('\n');
    }
    text
}

pub fn mds(a: &MdsArgs) -> anyhow::Result<Outcome> {
    let data = load(&a.dataset)?;
    let metric: Metric = a.metric.parse()?;
    let mut points = data.points().to_vec();
    let mut names: Vec<String> = (0..points.len()).map(|i| format!("point_{i:04}")).collect();
    for path in &a.extra {
        points.push(io::read_subspace(path)?.subspace);
        names.push(
            path.file_stem()
                .map_or_else(|| "extra".into(), |s| s.to_string_lossy().into_owned()),
        );
    }
    let d = DistanceMatrix::build(&points, metric)?;
    let emb = classical_mds(&d, a.dim)?;
    let out = &a.out.out;
    create_dir(out)?;
    io::write_matrix(&out.join("distances.csv"), d.values())?;
    write_text(&out.join("mds.csv"), &coords_csv(&names, &emb.coords))?;
    write_json(
        &out.join("mds.json"),
        &json!({
            "metric": metric,
            "dim": a.dim,
            "points": points.len(),
            "eigenvalues": emb.eigenvalues,
            "padded": emb.padded,
            "stress": stress(&d, &emb.coords),
        }),
    )?;
    if emb.padded {
        eprintln!(
            "warning: fewer than {} positive eigenvalues; zero columns appended",
            a.dim
        );
    }
    Ok(Outcome::Ok)
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = crate::OUT_DIR_ENV, default_value = crate::DEFAULT_OUT)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Independent uniformly random points of Gr(k, n).
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        count: usize,
    },
    /// Noisy copies of a random center (written as center.csv).
    Cluster {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
    },
    /// Ten points of Gr(3, 20) followed by ten of Gr(5, 20).
    Mixed,
    /// A tight labeled cluster plus uniform outliers (center in center.csv).
    Outlier {
        #[arg(long, default_value_t = 180)]
        inliers: usize,
        #[arg(long, default_value_t = 20)]
        outliers: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
    },
    /// Labeled classes with same-label uniform outliers.
    Classes {
        #[arg(long, default_value_t = 5)]
        classes: usize,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 0.2)]
        outlier_fraction: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
}

pub fn synth(a: &SynthArgs) -> anyhow::Result<Outcome> {
    let seed = a.seed;
    let out = &a.out;
    let (data, center) = match &a.kind {
        SynthKind::Uniform { n, k, count } => {
            let points = (0..*count)
                .map(|i| {
                    synth::sample_point(
                        &mut rng::substream(seed, "uniform_dataset", i as u64),
                        *n,
                        *k,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut params = serde_json::Map::new();
            params.insert("n".into(), json!(n));
            params.insert("k".into(), json!(k));
            params.insert("count".into(), json!(count));
            let ds = SubspaceDataset::new(points)?.with_provenance(Provenance {
                generator: "uniform".into(),
                params,
                seed: Some(seed),
            });
            (ds, None)
        }
        SynthKind::Cluster { n, k, count, noise } => {
            let center = synth::uniform_point(*n, *k, seed)?;
            (
                synth::perturbed_cluster(&center, *count, *noise, seed)?,
                Some(center),
            )
        }
        SynthKind::Mixed => (synth::mixed_dim_dataset(seed)?, None),
        SynthKind::Outlier {
            inliers,
            outliers,
            noise,
        } => {
            let p = OutlierParams {
                inliers: *inliers,
                outliers: *outliers,
                noise_scale: *noise,
                ..OutlierParams::default()
            };
            let (ds, c) = synth::outlier_dataset_with(p, seed)?;
            (ds, Some(c))
        }
        SynthKind::Classes {
            classes,
            per_class,
            outlier_fraction,
            noise,
        } => {
            let p = ClassParams {
                classes: *classes,
                per_class: *per_class,
                outlier_fraction: *outlier_fraction,
                noise_scale: *noise,
                ..ClassParams::default()
            };
            (synth::class_dataset(p, seed)?, None)
        }
    };
    data.save(out)?;
    if let Some(c) = center {
        io::write_subspace(&out.join("center.csv"), &c)?;
    }
    eprintln!("wrote {} points to {}", data.len(), out.display());
    Ok(Outcome::Ok)
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub dataset: PathBuf,
    /// Basis CSV of the candidate minimizer.
    #[arg(long)]
    pub candidate: PathBuf,
    /// `chordal_sum`, `chordal_sq_sum` or `geodesic_sum`.
    #[arg(long, default_value = "chordal_sum")]
    pub objective: String,
    #[arg(long, default_value_t = flagirls::analysis::DEFAULT_TEST_POINTS)]
    pub test_points: usize,
    #[arg(long, default_value_t = flagirls::analysis::DEFAULT_TEST_SCALE)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArg,
}

pub fn verify(a: &VerifyArgs) -> anyhow::Result<Outcome> {
    let data = load(&a.dataset)?;
    let candidate = io::read_subspace(&a.candidate)?.subspace;
    let objective: Objective = a.objective.parse()?;
    let v = verify_local_min(&data, &candidate, objective, a.test_points, a.scale, a.seed)?;
    create_dir(&a.out.out)?;
    write_json(
        &a.out.out.join("verify.json"),
        &json!({
            "objective": objective,
            "test_points": a.test_points,
            "scale": a.scale,
            "seed": a.seed,
            "verified": v.verified,
            "violations": v.violations,
            "candidate_value": v.candidate_value,
            "min_test_value": v.min_test_value,
        }),
    )?;
    eprintln!(
        "verified: {} ({} of {} test points lower)",
        v.verified, v.violations, a.test_points
    );
    Ok(Outcome::Ok)
}
