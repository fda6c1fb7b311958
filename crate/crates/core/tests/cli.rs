use std::path::{Path, PathBuf};

use projmob::cli::{run, MetricFile, Outcome};
use projmob::constructions::catalog_entry;
use projmob::enumerate::{figure1_table, figure1_tsv};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("projmob")
        .chain(args.iter().copied())
        .map(std::ffi::OsString::from))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}\n{}", out.stdout, out.stderr))
}

fn temp(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("projmob-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DEGENERATE: &str = r#"{"name": "deg", "coordinates": ["x", "y"],
  "metric": [["1"], ["1", "1"]], "sample_box": [[0, 1], [0, 1]]}"#;

const ASYMMETRIC: &str = r#"{"name": "asym", "coordinates": ["x", "y"],
  "metric": [["1", "x"], ["0", "1"]], "sample_box": [[0, 1], [0, 1]]}"#;

const PERTURBED: &str = r#"{"name": "pert", "coordinates": ["x1", "x2", "x3"],
  "metric": [["1 + x2^2/10"], ["0", "1"], ["0", "0", "1"]],
  "sample_box": [[-1, 1], [-1, 1], [-1, 1]],
  "solutions": [{"name": "fake", "components": [["x1"], ["0", "1"], ["0", "0", "1"]]}]}"#;

#[test]
fn check_reports_the_einstein_metric() {
    let out = cli(&["check", "catalog:example14"]);
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["einstein"], true);
    assert!((v["scal"].as_f64().unwrap() - 20.0).abs() < 1e-8);
    assert!((v["b"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(v["signature"]["plus"], 1);
    assert_eq!(v["signature"]["minus"], 4);
    assert_eq!(v["schema"], 1);
}

#[test]
fn exit_codes() {
    let deg = temp("deg", DEGENERATE);
    let out = cli(&["check", path(&deg)]);
    assert_eq!(out.code, 2);
    assert_eq!(json(&out)["nondegenerate"], false);

    let asym = temp("asym", ASYMMETRIC);
    let out = cli(&["check", path(&asym)]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["symmetric"], false);

    let bad = temp("bad", "{ not json");
    assert_eq!(cli(&["check", path(&bad)]).code, 1);
    assert_eq!(cli(&["check", "/nonexistent/metric.json"]).code, 1);
    assert_eq!(cli(&["check", "catalog:nope"]).code, 1);
    assert_eq!(cli(&["frobnicate"]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["geodesic-test", "catalog:flat3"]).code, 1);
}

#[test]
fn perturbed_metric_is_not_einstein_and_fake_solution_fails() {
    let p = temp("pert", PERTURBED);
    let v = json(&cli(&["check", path(&p)]));
    assert_eq!(v["einstein"], false);
    assert_eq!(v["einstein_witness"].as_array().unwrap().len(), 3);
    let out = cli(&["verify", path(&p), "--solution", "fake"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn output_is_deterministic() {
    let p = temp("det", PERTURBED);
    for args in [
        vec!["check", path(&p)],
        vec!["mobility", "catalog:flat3"],
        vec!["verify", "catalog:example14", "--seed", "7"],
        vec!["cone", "catalog:example14"],
    ] {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn verify_known_solutions() {
    let out = cli(&["verify", "catalog:example14", "--solution", "L1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(cli(&["verify", "catalog:example14", "--solution", "L9"]).code, 1);
    let v = json(&cli(&["verify", "catalog:null_cone", "--vector", "v", "--vector", "V"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn cone_of_example14_matches_the_catalog_cone() {
    let out = cli(&["cone", "catalog:example14"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let file = MetricFile::from_json(&out.stdout).unwrap();
    let loaded = file.load().unwrap();
    let want = catalog_entry("example36").unwrap().metric;
    for p in want.chart().sample_points(8, 3) {
        let a = loaded.metric.values_at(p.coords()).unwrap();
        let b = want.values_at(p.coords()).unwrap();
        assert!((a - b).amax() < 1e-12);
    }
    let p = temp("cone14", &out.stdout);
    let v = json(&cli(&["check", path(&p)]));
    assert_eq!(v["einstein"], true);
    assert!(v["scal"].as_f64().unwrap().abs() < 1e-8);
    let (plus, minus) = (
        v["signature"]["plus"].as_u64().unwrap(),
        v["signature"]["minus"].as_u64().unwrap(),
    );
    assert_eq!((plus.min(minus), plus.max(minus)), (2, 4));
    let v = json(&cli(&["verify", path(&p)]));
    assert_eq!(v["pass"], true, "lifted solutions solve the cone equation");
}

#[test]
fn cone_of_the_sphere_is_flat() {
    let out = cli(&["cone", "catalog:sphere3"]);
    let p = temp("cone-s3", &out.stdout);
    let v = json(&cli(&["check", path(&p)]));
    assert_eq!(v["constant_curvature"], true);
    assert!(v["sectional_curvature"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn product_of_flat_factors() {
    let out = cli(&["product", "catalog:flat2", "catalog:cone_sphere3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let p = temp("prod", &out.stdout);
    let v = json(&cli(&["check", path(&p)]));
    assert_eq!(v["dimension"], 6);
    assert_eq!(v["constant_curvature"], true);
    assert_eq!(cli(&["product", "catalog:sphere2", "catalog:sphere3"]).code, 1);
}

#[test]
fn mobility_of_flat_space_is_exact() {
    let v = json(&cli(&["mobility", "catalog:flat3"]));
    assert_eq!(v["dimension"], 10);
    assert_eq!(v["label"], "exact");
    let v = json(&cli(&["mobility", "catalog:example36", "--bundle", "par02"]));
    assert_eq!(v["dimension"], 4);
}

#[test]
fn enumerate_and_figure() {
    let v = json(&cli(&["enumerate", "--dim", "5", "--signature", "lorentzian"]));
    assert_eq!(v["values"], serde_json::json!([2, 4, 21]));
    let v = json(&cli(&[
        "enumerate",
        "--dim",
        "5",
        "--signature",
        "lorentzian",
        "--regime",
        "projective",
    ]));
    assert_eq!(v["values"], serde_json::json!([1, 3, 20]));
    assert_eq!(cli(&["enumerate", "--dim", "2"]).code, 1);
    let out = cli(&["figure1", "--from", "3", "--to", "15"]);
    assert_eq!(out.stdout, figure1_tsv(&figure1_table(3, 15).unwrap()));
}

#[test]
fn catalog_listing_and_emit() {
    let out = cli(&["catalog"]);
    assert!(out.stdout.lines().any(|l| l == "example14"));
    let out = cli(&["catalog", "--emit", "sphere2"]);
    let loaded = MetricFile::from_json(&out.stdout).unwrap().load().unwrap();
    let want = catalog_entry("sphere2").unwrap();
    assert_eq!(loaded.solutions.len(), want.solutions.len());
    let p = [1.0, 0.4];
    assert!((loaded.metric.values_at(&p).unwrap() - want.metric.values_at(&p).unwrap()).amax() < 1e-15);
}

#[test]
fn geodesic_test_through_the_cli() {
    let v = json(&cli(&[
        "geodesic-test",
        "catalog:sphere2",
        "--solution",
        "dX0^2",
        "--seeds",
        "5",
    ]));
    assert_eq!(v["pass"], true);
}
