use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn egdss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egdss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = egdss(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--out", "json"]);
    let text = ok(&full);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "json round trip");
    v
}

fn failure(args: &[&str]) -> String {
    let out = egdss(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("egdss-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn f(v: &Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[k]).as_f64().unwrap()
}

#[test]
fn fit_embedded_matches_library() {
    for name in ["jute10", "jute20"] {
        let v = json(&["fit", "--data", name]);
        let lib = egdss_core::fit_mle(&egdss_core::datasets::embedded(name).unwrap()).unwrap();
        assert_eq!(f(&v, &["result", "lambda_hat"]), lib.lambda_hat.get());
        assert!(v["result"]["converged"].as_bool().unwrap());
        assert_eq!(v["inputs"][0]["n"], 30);
        assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
        assert!(v.get("seed").is_none());
    }
}

#[test]
fn fit_rejects_bad_line() {
    let path = temp_file("neg.txt", "1.5, 2\n3\n-1\n");
    let err = failure(&["fit", "--data", path.to_str().unwrap()]);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("input"), "{err}");
    let err = failure(&["fit", "--data", "missing-file-xyz"]);
    assert!(err.contains("missing-file-xyz"), "{err}");
}

#[test]
fn file_input_with_comments() {
    let path = temp_file("ok.txt", "# header\n1.2, 0.7 3.1\n\n2.2\t0.4 # tail\n");
    let v = json(&["fit", "--data", path.to_str().unwrap()]);
    assert_eq!(v["inputs"][0]["n"], 5);
}

#[test]
fn reliability_values() {
    let cases = [((0.5, 1.5), 0.8391), ((2.0, 2.0), 0.5), ((1.0, 0.5), 0.2551)];
    for ((a, b), want) in cases {
        let v = json(&["reliability", "--lambda1", &a.to_string(), "--lambda2", &b.to_string()]);
        let r = f(&v, &["result", "r_closed_form"]);
        assert!((r - want).abs() < 5e-5, "({a}, {b}): {r}");
        assert!(f(&v, &["result", "abs_diff"]) < 1e-10);
    }
    let text = ok(&["reliability", "--lambda1", "0.5", "--lambda2", "1.5"]);
    assert!(text.contains("0.839063"), "{text}");
    let err = failure(&["reliability", "--lambda1", "-1", "--lambda2", "1"]);
    assert!(err.contains("parameters"), "{err}");
    failure(&["reliability", "--lambda1", "0", "--lambda2", "1"]);
}

#[test]
fn estimate_r_on_jute_data() {
    let v = json(&["estimate-r", "--strength", "jute10", "--stress", "jute20"]);
    let e = &v["result"]["estimate"];
    assert!((f(e, &["r_hat"]) - 0.5319).abs() <= 5e-4);
    assert!((f(e, &["ci_low"]) - 0.3936).abs() <= 5e-3);
    assert!((f(e, &["ci_high"]) - 0.6702).abs() <= 5e-3);

    let same = json(&["estimate-r", "--strength", "jute10", "--stress", "jute10"]);
    assert!((f(&same, &["result", "estimate", "r_hat"]) - 0.5).abs() < 1e-15);

    let wide = json(&["estimate-r", "--strength", "jute10", "--stress", "jute20", "--level", "0.99"]);
    let w = &wide["result"]["estimate"];
    assert!(f(w, &["ci_low"]) < f(e, &["ci_low"]));
    assert!(f(w, &["ci_high"]) > f(e, &["ci_high"]));

    let path = temp_file("stress.txt", "1\n0\n");
    let err = failure(&["estimate-r", "--strength", "jute10", "--stress", path.to_str().unwrap()]);
    assert!(err.contains("stress input") && err.contains("line 2"), "{err}");
    failure(&["estimate-r", "--strength", "jute10", "--stress", "jute20", "--level", "1.5"]);
}

#[test]
fn gof_reports_statistics() {
    let v = json(&["gof", "--data", "jute10"]);
    assert!((f(&v, &["result", "ks_stat"]) - 0.1393).abs() < 1e-3);
    assert!((f(&v, &["result", "cvm_stat"]) - 0.13151).abs() < 1e-4);
    let v = json(&["gof", "--data", "jute20"]);
    assert!((f(&v, &["result", "ks_stat"]) - 0.20661).abs() < 1e-3);
    assert!((f(&v, &["result", "cvm_stat"]) - 0.41935).abs() < 1e-4);

    let path = temp_file("ties.txt", "2 2 2 2 2\n");
    let v = json(&["gof", "--data", path.to_str().unwrap()]);
    let p = f(&v, &["result", "ks_p"]);
    assert!((0.0..=1.0).contains(&p));
}

const SIM: [&str; 11] = [
    "simulate", "--lambda1", "0.5", "--lambda2", "1.5", "--sizes", "10,25", "--reps", "100", "--seed", "42",
];

#[test]
fn simulate_csv_is_deterministic() {
    let mut args = SIM.to_vec();
    args.extend(["--out", "csv"]);
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,m,mean_l1,bias_l1,mse_l1,mean_l2,bias_l2,mse_l2,r_ci_low,r_ci_high,failures"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("10,10,") && rows[1].starts_with("25,25,"));
}

#[test]
fn simulate_thread_count_does_not_matter() {
    let mut one = SIM.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = SIM.to_vec();
    four.extend(["--threads", "4"]);
    let a = json(&one);
    let b = json(&four);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["seed"], 42);
}

#[test]
fn simulate_rejects_bad_spec() {
    let err = failure(&["simulate", "--lambda1", "1", "--lambda2", "1", "--sizes", "10", "--reps", "0"]);
    assert!(err.contains("simulation setup"), "{err}");
    failure(&["simulate", "--lambda1", "1", "--lambda2", "1", "--sizes", "1", "--reps", "5"]);
    failure(&["simulate", "--lambda1", "1", "--lambda2", "1", "--sizes", "ten", "--reps", "5"]);
    failure(&["simulate", "--lambda1", "0", "--lambda2", "1", "--sizes", "10", "--reps", "5"]);
    failure(&["--threads", "0", "simulate", "--lambda1", "1", "--lambda2", "1", "--sizes", "10"]);
}

#[test]
fn unequal_sizes() {
    let v = json(&["simulate", "--lambda1", "1", "--lambda2", "1.5", "--sizes", "10x20", "--reps", "50"]);
    let row = &v["result"]["rows"][0];
    assert_eq!((row["n"].as_u64(), row["m"].as_u64()), (Some(10), Some(20)));
}

#[test]
fn repro_data_table() {
    let v = json(&["repro", "--table", "4"]);
    assert!(v.get("seed").is_none());
    let rows = v["result"]["comparisons"].as_array().unwrap();
    let get = |q: &str| rows.iter().find(|r| r["quantity"] == q).unwrap();
    for name in ["jute10", "jute20"] {
        for (q, tol) in [("ks", 1e-3), ("ks_p", 2e-2), ("cvm", 1e-3), ("cvm_p", 3e-2)] {
            let q = format!("{name} {q}");
            assert!(f(get(&q), &["abs_diff"]) <= tol, "{q}");
        }
    }
    assert!(f(get("r_hat"), &["abs_diff"]) <= 5e-4);
}

#[test]
fn repro_simulation_table() {
    let v = json(&["repro", "--table", "1", "--seed", "7"]);
    assert_eq!(v["seed"], 7);
    let rows = v["result"]["comparisons"].as_array().unwrap();
    assert_eq!(rows.len(), 6 * 8);
    for r in rows.iter().filter(|r| r.get("mc_se").is_some()) {
        assert!(f(r, &["abs_diff"]) <= 3.0 * f(r, &["mc_se"]), "{r}");
    }
}

#[test]
fn repro_rejects_unknown_table() {
    let out = egdss(&["repro", "--table", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Usage:"), "{err}");
}

#[test]
fn csv_for_scalar_commands() {
    let text = ok(&["reliability", "--lambda1", "2", "--lambda2", "2", "--out", "csv"]);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == "r_closed_form").unwrap();
    assert_eq!(values[i].parse::<f64>().unwrap(), 0.5);
}
