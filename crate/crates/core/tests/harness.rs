mod common;

use std::fs;
use std::path::Path;

use clustbench::harness::{
    emit_reports, run_benchmark, run_dataset, BenchmarkConfig, BenchmarkReport, IndexReport, TRUTH_METHOD,
};
use clustbench::indexes::IndexName;
use common::{blobs, gaussian, write_csv};
use tempfile::TempDir;

fn config(dir: &Path, body: &str) -> BenchmarkConfig {
    let path = dir.join("bench.toml");
    fs::write(&path, body).unwrap();
    BenchmarkConfig::from_file(&path).unwrap()
}

fn two_blobs(dir: &Path, name: &str, seed: u64) {
    let (data, truth) = blobs(&[vec![0.0, 0.0], vec![10.0, 0.0]], 30, seed);
    write_csv(&dir.join(name), &data, Some(&truth));
}

fn method<'a>(reports: &'a [IndexReport], id: &str) -> &'a IndexReport {
    reports.iter().find(|r| r.method == id).unwrap()
}

#[test]
fn pool_counts_methods_and_ensemble() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 1);
    let cfg = config(
        tmp.path(),
        "methods = [\"kmeans\"]\n[ensemble]\nper_algorithm = 1\n[[datasets]]\npath = \"b.csv\"\ntruth_column = \"class\"\n",
    );
    let run = run_dataset(&cfg, 0).unwrap();
    assert_eq!(run.ensemble_size, 4);
    assert_eq!(run.k, 2);
    assert_eq!(run.pools[IndexName::AveWithin.position()].size, 5);
    let methods: Vec<&str> = run.reports.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, ["kmeans", TRUTH_METHOD]);
}

#[test]
fn blob_benchmark_recovers_truth() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 2);
    let cfg = config(
        tmp.path(),
        "master_seed = 3\n[ensemble]\nper_algorithm = 10\n[[datasets]]\npath = \"b.csv\"\ntruth_column = 0\nscale = \"none\"\n",
    );
    let outcome = run_benchmark(&cfg);
    assert!(!outcome.is_partial());
    let run = &outcome.runs[0];
    assert_eq!(run.reports.len(), 6);
    for r in &run.reports {
        let e = r.external.unwrap();
        assert_eq!((e.ari, e.vi, e.bcubed_f), (1.0, 0.0, 1.0), "{}", r.method);
    }
    // the truth partition equals every method's partition, so the rows agree
    let truth = method(&run.reports, TRUTH_METHOD);
    let kmeans = method(&run.reports, "kmeans");
    assert_eq!(truth.calibrated, kmeans.calibrated);
    assert_eq!(truth.dmode, kmeans.dmode);
    assert!(truth.calibrated.get(IndexName::AveWithin).unwrap() > 0.0);
    assert!(truth.dmode.is_some());
}

#[test]
fn pooled_calibrated_values_are_standardized() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 4);
    let cfg = config(
        tmp.path(),
        "[ensemble]\nper_algorithm = 5\n[[datasets]]\npath = \"b.csv\"\ntruth_column = 0\nk = 3\n",
    );
    let run = run_dataset(&cfg, 0).unwrap();
    for i in IndexName::ALL {
        let pooled: Vec<f64> = run
            .ensemble_calibrated
            .iter()
            .map(|v| v.get(i))
            .chain(
                run.reports
                    .iter()
                    .filter(|r| !r.is_truth())
                    .map(|r| r.calibrated.get(i)),
            )
            .flatten()
            .collect();
        let m = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / m;
        let sd = (pooled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9, "{i}: {mean} {sd}");
    }
}

#[test]
fn dataset_without_truth_skips_reference() {
    let tmp = TempDir::new().unwrap();
    write_csv(&tmp.path().join("g.csv"), &gaussian(40, 2, 5), None);
    let cfg = config(
        tmp.path(),
        "methods = [\"pam\", \"average\"]\n[ensemble]\nper_algorithm = 3\n[[datasets]]\npath = \"g.csv\"\nk = 3\n",
    );
    let run = run_dataset(&cfg, 0).unwrap();
    assert_eq!(run.reports.len(), 2);
    assert!(run.reports.iter().all(|r| r.external.is_none()));
    assert!(run.notes.iter().any(|n| n.contains("no ground truth")));
}

#[test]
fn k_comes_from_truth_when_not_given() {
    let tmp = TempDir::new().unwrap();
    let (data, truth) = blobs(&[vec![0.0, 0.0], vec![9.0, 0.0], vec![0.0, 9.0]], 12, 6);
    write_csv(&tmp.path().join("t.csv"), &data, Some(&truth));
    let cfg = config(
        tmp.path(),
        "methods = [\"complete\"]\n[ensemble]\nper_algorithm = 2\n[[datasets]]\npath = \"t.csv\"\ntruth_column = \"class\"\n",
    );
    assert_eq!(run_dataset(&cfg, 0).unwrap().k, 3);
}

#[test]
fn external_partitions_join_the_pool() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 7);
    let labels: String = (0..60).map(|i| format!("{}\n", if i < 30 { 2 } else { 1 })).collect();
    fs::write(tmp.path().join("mine.txt"), labels).unwrap();
    let cfg = config(
        tmp.path(),
        "methods = [\"single\", \"external:mine\"]\n[ensemble]\nper_algorithm = 2\n\
         [[datasets]]\npath = \"b.csv\"\ntruth_column = \"class\"\nexternal = { mine = \"mine.txt\" }\n",
    );
    let run = run_dataset(&cfg, 0).unwrap();
    assert_eq!(run.pools[0].size, 10);
    let mine = method(&run.reports, "external:mine");
    assert_eq!(mine.external.unwrap().ari, 1.0);
    assert_eq!(mine.seed, None);
    assert!(method(&run.reports, "single").seed.is_some());
}

#[test]
fn failing_dataset_is_isolated() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 8);
    let cfg = config(
        tmp.path(),
        "methods = [\"kmeans\", \"pam\"]\n[ensemble]\nper_algorithm = 2\n\
         [[datasets]]\npath = \"missing.csv\"\nk = 2\n[[datasets]]\npath = \"b.csv\"\ntruth_column = 0\n",
    );
    let outcome = run_benchmark(&cfg);
    assert!(outcome.is_partial());
    assert_eq!(outcome.failures.len(), 1);
    assert_eq!(outcome.failures[0].dataset, "missing");
    assert_eq!(outcome.runs.len(), 1);
    assert_eq!(outcome.runs[0].dataset, "b");
}

#[test]
fn report_files_and_rerun_bytes() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 9);
    write_csv(&tmp.path().join("g.csv"), &gaussian(30, 3, 10), None);
    let cfg = config(
        tmp.path(),
        "methods = [\"kmeans\", \"single\"]\n[ensemble]\nper_algorithm = 3\n\
         [[datasets]]\npath = \"b.csv\"\ntruth_column = \"class\"\n[[datasets]]\npath = \"g.csv\"\nk = 2\n",
    );
    let emit = |out: &str| {
        let report = BenchmarkReport::assemble(&cfg, run_benchmark(&cfg));
        let dir = tmp.path().join(out);
        (report.clone(), emit_reports(&report, &dir).unwrap())
    };
    let (report, files) = emit("a");
    let names: Vec<String> = files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into())
        .collect();
    for expected in [
        "dataset_b.csv",
        "dataset_g.csv",
        "parallel_coordinates.csv",
        "summary.csv",
        "pca_map.csv",
        "report.json",
    ] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
    }

    // two methods, 16 calibrated columns, one dataset of the two with a truth row
    let long = fs::read_to_string(tmp.path().join("a/parallel_coordinates.csv")).unwrap();
    let rows = long.lines().count() - 1;
    assert!(rows <= (2 + 1 + 2) * 16, "{rows}");
    assert!(!long.contains("NA"));

    let wide = fs::read_to_string(tmp.path().join("a/dataset_b.csv")).unwrap();
    assert_eq!(wide.lines().count(), 4);
    assert!(wide.lines().nth(3).unwrap().starts_with("truth,2,"));

    assert_eq!(report.summaries.len(), 2);
    assert_eq!(report.summaries[0].reports, 2);

    let (_, again) = emit("b");
    for (x, y) in files.iter().zip(&again) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/report.json")).unwrap()).unwrap();
    assert_eq!(json["seeds"]["master_seed"], 0);
    assert_eq!(json["config"]["methods"][1], "single");
    assert!(json["runs"][0]["ensemble_seed"].is_u64());
}

#[test]
fn empty_method_list_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    two_blobs(tmp.path(), "b.csv", 11);
    let mut cfg = config(
        tmp.path(),
        "[ensemble]\nper_algorithm = 1\n[[datasets]]\npath = \"b.csv\"\ntruth_column = 0\n",
    );
    let outcome = run_benchmark(&cfg);
    cfg.methods.clear();
    let report = BenchmarkReport::assemble(&cfg, outcome);
    let out = tmp.path().join("out");
    assert!(emit_reports(&report, &out).is_err());
    assert!(!out.exists());
}
