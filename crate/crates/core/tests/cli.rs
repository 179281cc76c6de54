use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bbcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbcd"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Compare with `tests/golden/<name>`; `BBCD_UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("BBCD_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(actual, expected, "{name} drifted from its golden file");
}

const SCENARIO_1: [&str; 10] = [
    "--n1", "10", "--n2", "10", "--p1", "0.5", "--p2", "0.9", "--t", "0.8",
];

fn with(sub: &str, base: &[&str], extra: &[&str]) -> Vec<String> {
    std::iter::once(sub)
        .chain(base.iter().copied())
        .chain(extra.iter().copied())
        .map(str::to_owned)
        .collect()
}

fn run(args: Vec<String>) -> Output {
    bbcd(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn moments_report_negative_correlation() {
    let out = run(with("moments", &SCENARIO_1, &[]));
    assert!(out.status.success());
    assert!(json(&out)["moments"]["corr"].as_f64().unwrap() < 0.0);
    golden("moments_scenario1.json", &stdout(&out));
}

#[test]
fn sample_csv_is_stable_and_echoes_seed() {
    let out = run(with(
        "sample",
        &SCENARIO_1,
        &[
            "--seed",
            "7",
            "--n-samples",
            "25",
            "--burn-in",
            "100",
            "--thin",
            "2",
        ],
    ));
    assert!(out.status.success());
    let meta: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["rng"], "chacha8");
    assert_eq!(meta["config"]["thin"], 2);
    let text = stdout(&out);
    assert!(text.starts_with("x,y\n"));
    assert_eq!(text.lines().count(), 26);
    golden("sample_scenario1_seed7.csv", &text);
}

#[test]
fn sample_without_seed_records_entropy_seed() {
    let out = run(with(
        "sample",
        &SCENARIO_1,
        &["--n-samples", "5", "--output-format", "json"],
    ));
    let report = json(&out);
    assert_eq!(report["metadata"]["seed_source"], "entropy");
    let seed = report["metadata"]["seed"].as_u64().unwrap().to_string();
    let replay = run(with(
        "sample",
        &SCENARIO_1,
        &[
            "--n-samples",
            "5",
            "--output-format",
            "json",
            "--seed",
            &seed,
        ],
    ));
    assert_eq!(json(&replay)["pairs"], report["pairs"]);
}

#[test]
fn gibbs_sample_round_trips_through_fit() {
    let out = run(with(
        "sample",
        &SCENARIO_1,
        &["--seed", "2024", "--n-samples", "5000"],
    ));
    let path = scratch("scenario1.csv");
    std::fs::write(&path, &out.stdout).unwrap();
    let path = path.to_str().unwrap();

    let fit = run(vec![
        "fit".into(),
        "--input".into(),
        path.into(),
        "--n-max".into(),
        "25".into(),
        "--equal-n".into(),
    ]);
    assert!(fit.status.success(), "{}", stdout(&fit));
    let r = json(&fit);
    assert_eq!(r["n1"], 10);
    assert_eq!(r["method"], "mle_profiled_n");
    assert!((r["p1"].as_f64().unwrap() - 0.5).abs() <= 0.05);
    assert!((r["p2"].as_f64().unwrap() - 0.9).abs() <= 0.02);
    assert!((r["t"].as_f64().unwrap() - 0.8).abs() <= 0.05);
    assert!(r["correlation"]["bbcd"].is_f64() && r["correlation"]["data"].is_f64());
    for key in ["n2", "log_lik", "converged"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }

    let fixed = run(vec![
        "fit".into(),
        "--input".into(),
        path.into(),
        "--n1".into(),
        "10".into(),
        "--n2".into(),
        "10".into(),
    ]);
    golden("fit_scenario1_seed2024.json", &stdout(&fixed));

    let gof = run(vec![
        "gof".into(),
        "--input".into(),
        path.into(),
        "--n1".into(),
        "10".into(),
        "--n2".into(),
        "10".into(),
    ]);
    let g = json(&gof);
    for key in ["statistic", "dof", "p_value", "pooled_cells"] {
        assert!(g.get(key).is_some(), "missing {key}");
    }
    assert!(g["p_value"].as_f64().unwrap() > 0.0);
}

#[test]
fn independence_pmf_is_product_of_binomials() {
    let out = bbcd(&[
        "pmf", "--n1", "6", "--n2", "4", "--p1", "0.3", "--p2", "0.6", "--t", "1", "--x", "2",
        "--y", "3",
    ]);
    let pmf = json(&out)["pmf"].as_f64().unwrap();
    let want = 15.0 * 0.09 * 0.7f64.powi(4) * 4.0 * 0.216 * 0.4;
    assert!((pmf - want).abs() < 1e-12);
}

#[test]
fn table_streams_csv() {
    let out = bbcd(&[
        "table", "--n1", "2", "--n2", "1", "--p1", "0.5", "--p2", "0.5", "--t", "2",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,prob"));
    let total: f64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-14);
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn frequency_input_matches_pairs() {
    let pairs = scratch("pairs.csv");
    let freq = scratch("freq.csv");
    std::fs::write(&pairs, "x,y\n0,0\n0,0\n1,2\n2,1\n1,1\n0,2\n2,2\n1,0\n0,1\n").unwrap();
    std::fs::write(
        &freq,
        "x,y,count\n0,0,2\n1,2,1\n2,1,1\n1,1,1\n0,2,1\n2,2,1\n1,0,1\n0,1,1\n",
    )
    .unwrap();
    let a = bbcd(&[
        "fit",
        "--input",
        pairs.to_str().unwrap(),
        "--n1",
        "3",
        "--n2",
        "3",
    ]);
    let b = bbcd(&[
        "fit",
        "--input",
        freq.to_str().unwrap(),
        "--n1",
        "3",
        "--n2",
        "3",
        "--freq",
    ]);
    let (a, b) = (json(&a), json(&b));
    for key in ["p1", "p2", "t", "log_lik"] {
        assert_eq!(a[key], b[key], "{key}");
    }
}

#[test]
fn limit_ladder_decreases() {
    let out = bbcd(&[
        "limit", "--n1", "20", "--n2", "20", "--p1", "0.085", "--p2", "0.1", "--t", "0.5",
        "--ladder", "10,20,40",
    ]);
    let r = json(&out);
    assert!((r["lambda1"].as_f64().unwrap() - 1.7).abs() < 1e-12);
    let tv: Vec<f64> = r["ladder"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["tv"].as_f64().unwrap())
        .collect();
    assert_eq!(tv.len(), 3);
    assert!(tv[0] > tv[1] && tv[1] > tv[2]);
}

#[test]
fn errors_are_machine_readable() {
    let bad = scratch("bad.csv");
    std::fs::write(&bad, "x,y\n0,0\n1,a\n").unwrap();
    let out = bbcd(&[
        "fit",
        "--input",
        bad.to_str().unwrap(),
        "--n1",
        "3",
        "--n2",
        "3",
    ]);
    assert!(!out.status.success());
    let e = json(&out);
    assert_eq!(e["error"]["code"], "parse");
    assert!(e["error"]["message"].as_str().unwrap().contains("line 3"));

    let empty = scratch("empty.csv");
    std::fs::write(&empty, "x,y\n").unwrap();
    let out = bbcd(&[
        "fit",
        "--input",
        empty.to_str().unwrap(),
        "--n1",
        "3",
        "--n2",
        "3",
    ]);
    assert_eq!(json(&out)["error"]["message"], "no observations");

    let out = bbcd(&["moments", "--n1", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["code"], "config");

    let out = bbcd(&[
        "moments", "--n1", "3", "--n2", "3", "--p1", "1.5", "--p2", "0.5", "--t", "1",
    ]);
    assert_eq!(json(&out)["error"]["code"], "domain");

    let out = bbcd(&[
        "table",
        "--n1",
        "300",
        "--n2",
        "300",
        "--p1",
        "0.5",
        "--p2",
        "0.5",
        "--t",
        "1",
        "--mem-cap",
        "1000",
    ]);
    assert_eq!(json(&out)["error"]["code"], "capacity");

    let out = bbcd(&[
        "fit",
        "--input",
        "/nonexistent/data.csv",
        "--n1",
        "3",
        "--n2",
        "3",
    ]);
    assert_eq!(json(&out)["error"]["code"], "io");
}

#[test]
fn supplied_parameters_skip_the_fit() {
    let data = scratch("gof.csv");
    let mut text = String::from("x,y\n");
    for i in 0..60 {
        text.push_str(&format!("{},{}\n", i % 3, (i / 3) % 4));
    }
    std::fs::write(&data, text).unwrap();
    let out = bbcd(&[
        "gof",
        "--input",
        data.to_str().unwrap(),
        "--n1",
        "2",
        "--n2",
        "3",
        "--p1",
        "0.5",
        "--p2",
        "0.5",
        "--t",
        "1",
        "--n-estimated",
        "0",
    ]);
    let r = json(&out);
    let groups = r["pooled_cells"].as_array().unwrap().len() as u64;
    assert_eq!(r["dof"].as_u64().unwrap(), groups - 1);
}
