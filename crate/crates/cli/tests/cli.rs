use std::path::Path;
use std::process::{Command, Output};

use flagirls::{io, principal_angles, synth, SubspaceDataset};

fn flagirls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagirls"))
        .args(args)
        .env_remove(flagirls_cli::OUT_DIR_ENV)
        .output()
        .unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn flag_mean_of_one_point_is_the_point() {
    let tmp = tempfile::tempdir().unwrap();
    let x = synth::uniform_point(6, 2, 3).unwrap();
    let data = tmp.path().join("one");
    SubspaceDataset::new(vec![x.clone()])
        .unwrap()
        .save(&data)
        .unwrap();
    let out = tmp.path().join("out");
    let o = flagirls(&[
        "prototype",
        &s(&data),
        "--method",
        "flag-mean",
        "--r",
        "2",
        "--out",
        &s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let proto = io::read_subspace(&out.join("prototype.csv"))
        .unwrap()
        .subspace;
    assert!(principal_angles(&proto, &x).unwrap().max() < 1e-9);
}

#[test]
fn exit_codes_follow_termination() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("mixed");
    assert_eq!(
        flagirls(&["synth", "mixed", "--seed", "4", "--out", &s(&data)])
            .status
            .code(),
        Some(0)
    );
    let before = std::fs::read(data.join("manifest.json")).unwrap();

    let out = tmp.path().join("median");
    let o = flagirls(&[
        "prototype",
        &s(&data),
        "--r",
        "3",
        "--seed",
        "1",
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out.join("result.json"))["termination"], "converged");

    let o = flagirls(&[
        "prototype",
        &s(&data),
        "--method",
        "l2-median",
        "--r",
        "3",
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));

    let capped = tmp.path().join("capped");
    let o = flagirls(&[
        "prototype",
        &s(&data),
        "--method",
        "gd-flag-median",
        "--r",
        "3",
        "--max-iters",
        "3",
        "--out",
        &s(&capped),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        json(&capped.join("result.json"))["termination"],
        "iteration_cap"
    );
    assert!(capped.join("prototype.csv").exists());

    assert_eq!(std::fs::read(data.join("manifest.json")).unwrap(), before);
}

#[test]
fn unknown_experiment_lists_names() {
    let o = flagirls(&["experiment", "fig9", "--out", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for name in [
        "fig1_convergence",
        "table1_iterations",
        "table2_robustness",
        "lbg_purity",
        "mds_embedding",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn malformed_dataset_names_file_and_row() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("bad");
    SubspaceDataset::new(vec![synth::uniform_point(4, 1, 0).unwrap()])
        .unwrap()
        .save(&data)
        .unwrap();
    std::fs::write(data.join("point_0000.csv"), "1\n0\nx\n0\n").unwrap();
    let o = flagirls(&[
        "prototype",
        &s(&data),
        "--r",
        "1",
        "--out",
        &s(&tmp.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("point_0000.csv") && err.contains("row 3"),
        "{err}"
    );
}

#[test]
fn single_center_purity_is_majority_share() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("classes");
    assert_eq!(
        flagirls(&["synth", "classes", "--seed", "2", "--out", &s(&data)])
            .status
            .code(),
        Some(0)
    );
    let out = tmp.path().join("book");
    let o = flagirls(&[
        "cluster",
        &s(&data),
        "--codebook-size",
        "1",
        "--method",
        "flag-mean",
        "--r",
        "3",
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out.join("codebook.json"))["purity"], 0.2);
}

#[test]
fn flag_mean_output_verifies_under_squared_objective() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("outlier");
    flagirls(&["synth", "outlier", "--seed", "7", "--out", &s(&data)]);
    let proto = tmp.path().join("mean");
    flagirls(&[
        "prototype",
        &s(&data),
        "--method",
        "flag-mean",
        "--r",
        "3",
        "--out",
        &s(&proto),
    ]);
    let out = tmp.path().join("verify");
    let o = flagirls(&[
        "verify",
        &s(&data),
        "--candidate",
        &s(&proto.join("prototype.csv")),
        "--objective",
        "chordal_sq_sum",
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out.join("verify.json"))["verified"], true);
}
