//! Bundled synthetic experiments. Each one regenerates its data from seeds,
//! writes CSV tables and trace files into `<out>/<name>/`, and finishes with
//! `summary.json` holding the resolved configuration, headline numbers and
//! pass/fail checks.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::Args;
use flagirls::analysis::{
    classical_mds, outlier_robustness, stress, verify_local_min, DistanceMatrix, Metric, Objective,
    RobustnessRow,
};
use flagirls::clustering::{cluster_purity, lbg_cluster, LbgConfig};
use flagirls::prototypes::{flag_mean, flag_median, flag_median_gd, l2_median};
use flagirls::synth::{self, ClassParams, OutlierParams};
use flagirls::{io, Init, Method, SolverConfig, Termination};
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::coords_csv;
use crate::{solver_json, write_json, write_text, OutArg, Outcome, SolverArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    Fig1Convergence,
    Table1Iterations,
    Table2Robustness,
    LbgPurity,
    MdsEmbedding,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::Fig1Convergence,
        ExperimentName::Table1Iterations,
        ExperimentName::Table2Robustness,
        ExperimentName::LbgPurity,
        ExperimentName::MdsEmbedding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentName::Fig1Convergence => "fig1_convergence",
            ExperimentName::Table1Iterations => "table1_iterations",
            ExperimentName::Table2Robustness => "table2_robustness",
            ExperimentName::LbgPurity => "lbg_purity",
            ExperimentName::MdsEmbedding => "mds_embedding",
        }
    }

    pub fn default_seeds(self) -> Vec<u64> {
        let count = match self {
            ExperimentName::Fig1Convergence => 100,
            ExperimentName::Table1Iterations => 20,
            ExperimentName::Table2Robustness => 5,
            ExperimentName::LbgPurity => 10,
            ExperimentName::MdsEmbedding => 1,
        };
        (0..count).collect()
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match ExperimentName::ALL.into_iter().find(|e| e.name() == s) {
            Some(e) => Ok(e),
            None => {
                let names: Vec<&str> = ExperimentName::ALL.iter().map(|e| e.name()).collect();
                bail!(
                    "unknown experiment {s:?}; valid names: {}",
                    names.join(", ")
                )
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// fig1_convergence, table1_iterations, table2_robustness, lbg_purity
    /// or mds_embedding.
    pub name: String,
    /// Trial seeds as a comma list (`1,2,5`) or half-open range (`0..20`).
    #[arg(long)]
    pub seeds: Option<String>,
    /// Seed of the shared dataset for experiments that reuse one dataset
    /// across trials.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

pub fn parse_seeds(text: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad seed range {text:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad seed range {text:?}"))?;
        return Ok((a..b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad seed {s:?}")))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub seeds: Vec<u64>,
    pub data_seed: u64,
    pub overrides: SolverArgs,
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, output_dir: PathBuf) -> Self {
        ExperimentSpec {
            name,
            seeds: name.default_seeds(),
            data_seed: 0,
            overrides: SolverArgs::default(),
            output_dir,
        }
    }

    pub fn dir(&self) -> PathBuf {
        self.output_dir.join(self.name.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentName,
    pub seeds: Vec<u64>,
    pub data_seed: u64,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn command(a: &ExperimentArgs) -> anyhow::Result<Outcome> {
    let name: ExperimentName = a.name.parse()?;
    let mut spec = ExperimentSpec::new(name, a.out.out.clone());
    if let Some(s) = &a.seeds {
        spec.seeds = parse_seeds(s)?;
    }
    spec.data_seed = a.data_seed;
    spec.overrides = a.solver.clone();
    let report = run_experiment(&spec)?;
    for c in &report.checks {
        println!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(if report.pass {
        Outcome::Ok
    } else {
        Outcome::ChecksFailed
    })
}

pub fn run_experiment(spec: &ExperimentSpec) -> anyhow::Result<ExperimentReport> {
    if spec.seeds.is_empty() {
        bail!("an experiment needs at least one seed");
    }
    let dir = spec.dir();
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let (config, results, checks) = match spec.name {
        ExperimentName::Fig1Convergence => fig1(spec)?,
        ExperimentName::Table1Iterations => table1(spec)?,
        ExperimentName::Table2Robustness => table2(spec)?,
        ExperimentName::LbgPurity => lbg(spec)?,
        ExperimentName::MdsEmbedding => mds(spec)?,
    };
    let report = ExperimentReport {
        experiment: spec.name,
        seeds: spec.seeds.clone(),
        data_seed: spec.data_seed,
        pass: checks.iter().all(|c| c.pass),
        config,
        results,
        checks,
    };
    write_json(&dir.join("summary.json"), &report)?;
    Ok(report)
}

type Parts = (Value, Value, Vec<Check>);

fn solver(spec: &ExperimentSpec, r: usize, base: impl FnOnce(&mut SolverConfig)) -> SolverConfig {
    let mut cfg = SolverConfig::new(r);
    base(&mut cfg);
    spec.overrides.apply(&mut cfg);
    cfg
}

/// Column of per-index means over traces of different lengths; a finished
/// run keeps contributing its final value.
pub fn mean_trace(traces: &[Vec<f64>], len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let sum: f64 = traces.iter().map(|t| t[i.min(t.len() - 1)]).sum();
            sum / traces.len() as f64
        })
        .collect()
}

fn trace_csv(trace: &[f64]) -> String {
    let rows: Vec<Vec<f64>> = trace
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i as f64, *v])
        .collect();
    io::table_to_csv(&["iteration", "mean_objective"], &rows)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::ObjectiveIncreased => "objective_increased",
        Termination::IterationCap => "iteration_cap",
    }
}

fn fig1(spec: &ExperimentSpec) -> anyhow::Result<Parts> {
    let data = synth::mixed_dim_dataset(spec.data_seed)?;
    let base = solver(spec, 3, |_| {});
    let mut irls = Vec::new();
    let mut gd = Vec::new();
    let mut rows = String::from("seed,flagirls_iterations,flagirls_termination,flagirls_objective,gd_iterations,gd_termination,gd_objective,flagirls_verified\n");
    let mut verified = 0;
    for &seed in &spec.seeds {
        let cfg = base.clone().with_init(Init::Random { seed });
        let a = flag_median(&data, &cfg)?;
        let b = flag_median_gd(&data, &cfg)?;
        let v = verify_local_min(&data, &a.prototype, Objective::ChordalSum, 100, 1e-5, seed)?;
        verified += usize::from(v.verified);
        rows.push_str(&format!(
            "{seed},{},{},{},{},{},{},{}\n",
            a.iterations,
            termination_name(a.termination),
            a.final_objective(),
            b.iterations,
            termination_name(b.termination),
            b.final_objective(),
            v.verified
        ));
        irls.push(a.objective_trace);
        gd.push(b.objective_trace);
    }
    let len = irls.iter().chain(&gd).map(Vec::len).max().unwrap_or(1);
    let irls_mean = mean_trace(&irls, len);
    let gd_mean = mean_trace(&gd, len);
    let dir = spec.dir();
    write_text(&dir.join("trace_flagirls.csv"), &trace_csv(&irls_mean))?;
    write_text(&dir.join("trace_gd.csv"), &trace_csv(&gd_mean))?;
    write_text(&dir.join("trials.csv"), &rows)?;

    let worst = (1..len)
        .map(|i| (i, irls_mean[i] - gd_mean[i]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::NEG_INFINITY));
    let trials = spec.seeds.len();
    let checks = vec![
        Check::new(
            "flagirls_below_gd",
            worst.1 <= 0.0,
            format!(
                "largest FlagIRLS minus GD mean objective {} at iteration {}",
                worst.1, worst.0
            ),
        ),
        Check::new(
            "flagirls_verified",
            verified == trials,
            format!("{verified}/{trials} FlagIRLS results passed 100 test points"),
        ),
    ];
    let results = json!({
        "trials": trials,
        "trace_length": len,
        "flagirls_mean_trace": irls_mean,
        "gd_mean_trace": gd_mean,
        "verified": verified,
    });
    Ok((
        json!({ "dataset": "mixed_dim_dataset", "solver": solver_json(&base) }),
        results,
        checks,
    ))
}

fn table1(spec: &ExperimentSpec) -> anyhow::Result<Parts> {
    let center = synth::uniform_point(100, 6, spec.data_seed)?;
    let data = synth::perturbed_cluster(&center, 200, 0.01, spec.data_seed)?;
    // A damped Weiszfeld step; the full step converges within a handful of
    // iterations on this tight cluster.
    let base = solver(spec, 6, |c| c.weiszfeld_step = 0.01);
    let mut rows = String::from(
        "seed,flagirls_iterations,flagirls_termination,l2_iterations,l2_termination\n",
    );
    let (mut fi, mut li) = (Vec::new(), Vec::new());
    for &seed in &spec.seeds {
        let cfg = base.clone().with_init(Init::Random { seed });
        let a = flag_median(&data, &cfg)?;
        let b = l2_median(&data, &cfg)?;
        rows.push_str(&format!(
            "{seed},{},{},{},{}\n",
            a.iterations,
            termination_name(a.termination),
            b.iterations,
            termination_name(b.termination)
        ));
        fi.push(a.iterations as f64);
        li.push(b.iterations as f64);
    }
    write_text(&spec.dir().join("iterations.csv"), &rows)?;
    let (fm, lm) = (mean(&fi), mean(&li));
    let checks = vec![
        Check::new(
            "flagirls_mean_at_most_10",
            fm <= 10.0,
            format!("FlagIRLS mean iterations {fm}"),
        ),
        Check::new(
            "l2_mean_at_least_200",
            lm >= 200.0,
            format!("l2-median mean iterations {lm}"),
        ),
        Check::new(
            "l2_at_least_10x_flagirls",
            lm >= 10.0 * fm,
            format!("ratio {}", lm / fm),
        ),
    ];
    let results = json!({
        "flagirls_mean": fm,
        "flagirls_std": std_dev(&fi),
        "l2_mean": lm,
        "l2_std": std_dev(&li),
    });
    let config = json!({
        "dataset": { "generator": "perturbed_cluster", "n": 100, "k": 6, "count": 200, "noise_scale": 0.01 },
        "solver": solver_json(&base),
    });
    Ok((config, results, checks))
}

fn table2(spec: &ExperimentSpec) -> anyhow::Result<Parts> {
    let params = OutlierParams::default();
    let base = solver(spec, params.k, |_| {});
    let rows: Vec<RobustnessRow> = spec
        .seeds
        .iter()
        .map(|&s| outlier_robustness(params, &base, s))
        .collect::<Result<_, _>>()?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.seed as f64, r.flag_median, r.l2_median, r.flag_mean])
        .collect();
    write_text(
        &spec.dir().join("robustness.csv"),
        &io::table_to_csv(&["seed", "flag_median", "l2_median", "flag_mean"], &table),
    )?;
    let med = mean(&rows.iter().map(|r| r.flag_median).collect::<Vec<_>>());
    let l2 = mean(&rows.iter().map(|r| r.l2_median).collect::<Vec<_>>());
    let fmean = mean(&rows.iter().map(|r| r.flag_mean).collect::<Vec<_>>());
    let checks = vec![
        Check::new(
            "median_l2_mean_ordering",
            med < l2 && l2 < fmean,
            format!("flag median {med}, l2-median {l2}, flag mean {fmean}"),
        ),
        Check::new(
            "mean_at_least_3x_median",
            fmean >= 3.0 * med,
            format!("ratio {}", fmean / med),
        ),
    ];
    let results = json!({ "flag_median": med, "l2_median": l2, "flag_mean": fmean, "rows": rows });
    Ok((
        json!({ "dataset": params, "solver": solver_json(&base) }),
        results,
        checks,
    ))
}

pub const LBG_SIZES: [usize; 4] = [8, 12, 16, 20];

fn lbg(spec: &ExperimentSpec) -> anyhow::Result<Parts> {
    let params = ClassParams::default();
    let base = solver(spec, params.k, |_| {});
    let mut trials = String::from("seed,codebook_size,flag_median_purity,flag_mean_purity\n");
    let mut sums = vec![(0.0, 0.0); LBG_SIZES.len()];
    for &seed in &spec.seeds {
        let data = synth::class_dataset(params, seed)?;
        let labels = data.labels().context("class dataset is labeled")?;
        for (j, &size) in LBG_SIZES.iter().enumerate() {
            let mut purity = [0.0; 2];
            for (m, method) in [Method::FlagMedian, Method::FlagMean]
                .into_iter()
                .enumerate()
            {
                let mut cfg = LbgConfig::new(size, method, params.k, seed);
                cfg.solver = base.clone();
                let book = lbg_cluster(&data, &cfg)?;
                purity[m] = cluster_purity(&book.assignments, labels)?;
            }
            trials.push_str(&format!("{seed},{size},{},{}\n", purity[0], purity[1]));
            sums[j].0 += purity[0];
            sums[j].1 += purity[1];
        }
    }
    let t = spec.seeds.len() as f64;
    let means: Vec<(f64, f64)> = sums.iter().map(|(a, b)| (a / t, b / t)).collect();
    let table: Vec<Vec<f64>> = LBG_SIZES
        .iter()
        .zip(&means)
        .map(|(&s, m)| vec![s as f64, m.0, m.1])
        .collect();
    let dir = spec.dir();
    write_text(&dir.join("trials.csv"), &trials)?;
    write_text(
        &dir.join("purity.csv"),
        &io::table_to_csv(&["codebook_size", "flag_median", "flag_mean"], &table),
    )?;
    let checks = LBG_SIZES
        .iter()
        .zip(&means)
        .map(|(s, m)| {
            Check::new(
                &format!("median_purity_at_least_mean_size_{s}"),
                m.0 >= m.1,
                format!("flag median {} vs flag mean {}", m.0, m.1),
            )
        })
        .collect();
    let results = json!({
        "sizes": LBG_SIZES,
        "flag_median": means.iter().map(|m| m.0).collect::<Vec<_>>(),
        "flag_mean": means.iter().map(|m| m.1).collect::<Vec<_>>(),
    });
    Ok((
        json!({ "dataset": params, "solver": solver_json(&base) }),
        results,
        checks,
    ))
}

fn mds(spec: &ExperimentSpec) -> anyhow::Result<Parts> {
    let seed = spec.seeds[0];
    let params = OutlierParams::default();
    let base = solver(spec, params.k, |_| {}).with_init(Init::Random { seed });
    let (data, _) = synth::outlier_dataset_with(params, seed)?;
    let labels = data.labels().context("outlier dataset is labeled")?;
    let mut points = data.points().to_vec();
    let mut names: Vec<String> = labels
        .iter()
        .map(|&l| {
            if l == synth::INLIER {
                "inlier"
            } else {
                "outlier"
            }
            .to_string()
        })
        .collect();
    points.push(flag_median(&data, &base)?.prototype);
    points.push(l2_median(&data, &base)?.prototype);
    points.push(flag_mean(&data, params.k)?.point());
    names.extend(["flag_median", "l2_median", "flag_mean"].map(String::from));

    let d = DistanceMatrix::build(&points, Metric::Geodesic)?;
    let emb = classical_mds(&d, 2)?;
    let stresses = (1..=5)
        .map(|k| Ok(stress(&d, &classical_mds(&d, k)?.coords)))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let dir = spec.dir();
    io::write_matrix(&dir.join("distances.csv"), d.values())?;
    write_text(&dir.join("mds.csv"), &coords_csv(&names, &emb.coords))?;
    let stress_rows: Vec<Vec<f64>> = stresses
        .iter()
        .enumerate()
        .map(|(i, s)| vec![(i + 1) as f64, *s])
        .collect();
    write_text(
        &dir.join("stress.csv"),
        &io::table_to_csv(&["dim", "stress"], &stress_rows),
    )?;
    let monotone = stresses.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let checks = vec![Check::new(
        "stress_nonincreasing",
        monotone,
        format!("stress by dimension {stresses:?}"),
    )];
    let results =
        json!({ "points": points.len(), "eigenvalues": emb.eigenvalues, "stress": stresses });
    Ok((
        json!({ "dataset": params, "metric": "geodesic", "solver": solver_json(&base) }),
        results,
        checks,
    ))
}
