mod common;

use common::{dataset, line, max_angle, orthogonal, point};
use flagirls::grassmann::project_horizontal;
use flagirls::prototypes::{
    flag_mean, flag_median, flag_median_gd, flag_median_gradient, flag_median_step, l2_median,
    objective_chordal_sq_sum, objective_chordal_sum, objective_geodesic_sum, solve,
    weighted_flag_mean,
};
use flagirls::{
    chordal_distance, geodesic_distance, rng, synth, Init, Method, SolverConfig, Subspace,
    SubspaceDataset, Termination,
};
use nalgebra::{DMatrix, SymmetricEigen};

fn rotated(data: &SubspaceDataset, q: &DMatrix<f64>) -> SubspaceDataset {
    SubspaceDataset::new(
        data.points()
            .iter()
            .map(|x| x.transform(q).unwrap())
            .collect(),
    )
    .unwrap()
}

#[test]
fn objectives_agree_with_pairwise_distances() {
    for t in 0..100u64 {
        let data = dataset(9, &[1, 2, 3, 4], 6, t);
        for r in 1..=3 {
            let y = point(9, r, 700 + t);
            let chord: Vec<f64> = data
                .points()
                .iter()
                .map(|x| chordal_distance(x, &y).unwrap())
                .collect();
            let sum: f64 = chord.iter().sum();
            let sq: f64 = chord.iter().map(|d| d * d).sum();
            assert!((objective_chordal_sum(&data, &y).unwrap() - sum).abs() < 1e-9);
            assert!((objective_chordal_sq_sum(&data, &y).unwrap() - sq).abs() < 1e-9);
        }
        let eq = dataset(9, &[2], 6, t);
        let y = point(9, 2, t);
        let geo: f64 = eq
            .points()
            .iter()
            .map(|x| geodesic_distance(x, &y).unwrap())
            .sum();
        assert!((objective_geodesic_sum(&eq, &y).unwrap() - geo).abs() < 1e-9);
    }
}

#[test]
fn rank_one_flag_mean_is_top_eigenvector() {
    for t in 0..50u64 {
        let data = dataset(7, &[1, 2, 3], 5, t);
        let mut sum = DMatrix::zeros(7, 7);
        for x in data.points() {
            sum += x.projector();
        }
        let eig = SymmetricEigen::new(sum);
        let top = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(top).into_owned();
        let oracle =
            Subspace::orthonormalize(&DMatrix::from_column_slice(7, 1, v.as_slice())).unwrap();
        let mean = flag_mean(&data, 1).unwrap().point();
        assert!(max_angle(&mean, &oracle) < 1e-8, "dataset {t}");
    }
}

#[test]
fn two_line_flag_mean_is_bisector() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let data = SubspaceDataset::new(vec![line(&[1.0, 0.0]), line(&[h, h])]).unwrap();
    let mean = flag_mean(&data, 1).unwrap().point();
    let a = 22.5f64.to_radians();
    assert!(max_angle(&mean, &line(&[a.cos(), a.sin()])) < 1e-12);
}

#[test]
fn weighted_mean_invariances() {
    let data = dataset(8, &[2, 3], 6, 4);
    let plain = flag_mean(&data, 2).unwrap().point();
    for c in [0.001, 1.0, 37.0] {
        let w = vec![c; 6];
        assert!(max_angle(&weighted_flag_mean(&data, &w, 2).unwrap().point(), &plain) < 1e-9);
    }
    let w = [0.3, 1.0, 2.5, 0.7, 4.0, 1.1];
    let base = weighted_flag_mean(&data, &w, 2).unwrap().point();
    let perm = [3, 0, 5, 1, 4, 2];
    let pdata = data.select(&perm);
    let pw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
    assert!(max_angle(&weighted_flag_mean(&pdata, &pw, 2).unwrap().point(), &base) < 1e-9);

    let a = line(&[1.0, 0.2, -0.4]);
    let b = line(&[0.1, 1.0, 0.3]);
    let pair = SubspaceDataset::new(vec![a, b.clone()]).unwrap();
    let heavy = weighted_flag_mean(&pair, &[1.0, 1e6], 1).unwrap().point();
    assert!(max_angle(&heavy, &b) < 1e-3);
}

#[test]
fn flag_irls_step_is_permutation_invariant() {
    let data = dataset(10, &[2, 3, 4], 9, 12);
    let y = point(10, 2, 99);
    let perm = [8, 3, 1, 0, 7, 5, 2, 6, 4];
    let a = flag_median_step(&data, &y, 1e-7).unwrap().point();
    let b = flag_median_step(&data.select(&perm), &y, 1e-7)
        .unwrap()
        .point();
    assert!(max_angle(&a, &b) < 1e-9);
    let m1 = flag_mean(&data, 3).unwrap().point();
    let m2 = flag_mean(&data.select(&perm), 3).unwrap().point();
    assert!(max_angle(&m1, &m2) < 1e-9);
}

/// Objective along a retraction curve, evaluated through principal angles.
fn directional_fd(data: &SubspaceDataset, y: &Subspace, dir: &DMatrix<f64>, h: f64) -> f64 {
    let plus = Subspace::orthonormalize(&(y.basis() + dir * h)).unwrap();
    let minus = Subspace::orthonormalize(&(y.basis() - dir * h)).unwrap();
    (objective_chordal_sum(data, &plus).unwrap() - objective_chordal_sum(data, &minus).unwrap())
        / (2.0 * h)
}

#[test]
fn gradient_matches_finite_differences() {
    let data = dataset(12, &[2, 3, 4], 8, 31);
    let y = point(12, 3, 32);
    // A tiny eps keeps the guarded gradient within 1e-9 of the exact one.
    let grad = project_horizontal(&y, &flag_median_gradient(&data, &y, 1e-16).unwrap());
    for t in 0..20u64 {
        let mut s = rng::stream(t, "gd_direction");
        let mut dir = project_horizontal(&y, &synth::uniform_matrix(&mut s, 12, 3));
        dir /= dir.norm();
        let analytic = grad.dot(&dir);
        let numeric = directional_fd(&data, &y, &dir, 1e-6);
        let rel = (analytic - numeric).abs() / analytic.abs().max(1e-12);
        assert!(rel < 1e-5, "direction {t}: {analytic} vs {numeric}");
    }
}

fn equivariance_case(method: Method, data: &SubspaceDataset, r: usize, seed: u64) {
    let n = data.ambient_dim().unwrap();
    let q = orthogonal(n, seed);
    let init = point(n, r, seed + 1);
    let mut cfg = SolverConfig::new(r).with_init(Init::Explicit(init.clone()));
    cfg.max_iters = 200;
    let a = solve(method, data, &cfg).unwrap().prototype;
    let cfg_q = cfg
        .clone()
        .with_init(Init::Explicit(init.transform(&q).unwrap()));
    let b = solve(method, &rotated(data, &q), &cfg_q).unwrap().prototype;
    let angle = max_angle(&a.transform(&q).unwrap(), &b);
    assert!(angle < 1e-8, "{method}: {angle}");
}

#[test]
fn solvers_are_rotation_equivariant() {
    for seed in 0..5u64 {
        let center = point(10, 2, seed);
        let cluster = synth::perturbed_cluster(&center, 12, 0.2, seed).unwrap();
        for method in Method::ALL {
            equivariance_case(method, &cluster, 2, seed);
        }
    }
}

#[test]
fn solvers_ignore_representatives() {
    let center = point(10, 2, 77);
    let data = synth::perturbed_cluster(&center, 10, 0.2, 77).unwrap();
    let swapped = SubspaceDataset::new(
        data.points()
            .iter()
            .enumerate()
            .map(|(i, x)| Subspace::new(x.basis() * orthogonal(2, i as u64)).unwrap())
            .collect(),
    )
    .unwrap();
    let cfg = SolverConfig::new(2).with_init(Init::Random { seed: 5 });
    for method in Method::ALL {
        let a = solve(method, &data, &cfg).unwrap().prototype;
        let b = solve(method, &swapped, &cfg).unwrap().prototype;
        assert!(max_angle(&a, &b) < 1e-8, "{method}");
    }
}

#[test]
fn flag_mean_beats_test_points_on_gr_1_3() {
    for t in 0..5u64 {
        let data = dataset(3, &[1], 5, 400 + t);
        let mean = flag_mean(&data, 1).unwrap().point();
        let best = objective_chordal_sq_sum(&data, &mean).unwrap();
        let mut s = rng::stream(t, "gr13_test_points");
        for _ in 0..1000 {
            let test = synth::perturb(&mut s, &mean, 1e-3).unwrap();
            assert!(objective_chordal_sq_sum(&data, &test).unwrap() >= best);
        }
    }
}

#[test]
fn flag_median_is_stationary_at_convergence() {
    for seed in 0..10u64 {
        let data = synth::mixed_dim_dataset(seed).unwrap();
        let cfg = SolverConfig::new(3).with_init(Init::Random { seed });
        let res = flag_median(&data, &cfg).unwrap();
        assert_eq!(res.termination, Termination::Converged, "seed {seed}");
        let next = flag_median_step(&data, &res.prototype, cfg.eps)
            .unwrap()
            .point();
        assert!(max_angle(&next, &res.prototype) < 1e-5, "seed {seed}");
    }
}

#[test]
fn traces_are_monotone() {
    for seed in 0..10u64 {
        let data = synth::mixed_dim_dataset(seed).unwrap();
        let cfg = SolverConfig::new(3).with_init(Init::Random { seed });
        for res in [
            flag_median(&data, &cfg).unwrap(),
            flag_median_gd(&data, &cfg).unwrap(),
        ] {
            assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0]));
            assert!(res.objective_trace.len() <= res.iterations + 1);
        }
        let center = point(12, 3, seed);
        let eq = synth::perturbed_cluster(&center, 15, 0.1, seed).unwrap();
        let res = l2_median(&eq, &cfg).unwrap();
        assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn repeated_point_recovered_by_every_solver() {
    let x = point(6, 2, 3);
    let data = SubspaceDataset::new(vec![x.clone(), x.clone(), x.clone()]).unwrap();
    for seed in 0..5u64 {
        let cfg = SolverConfig::new(2).with_init(Init::Random { seed });
        assert!(chordal_distance(&flag_median(&data, &cfg).unwrap().prototype, &x).unwrap() < 1e-6);
        assert!(chordal_distance(&l2_median(&data, &cfg).unwrap().prototype, &x).unwrap() < 1e-6);
    }
}
