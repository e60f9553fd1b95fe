use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eopk(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eopk"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn eopk")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Header and rows of a CSV file.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn coeffs_unity_has_positive_a() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(
        dir.path(),
        &["--tau", "1.0", "--weight", "unity", "--nmax", "8", "coeffs"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(&dir.path().join("coeffs.json"));
    assert_eq!(j["schema"], 1);
    assert_eq!(j["weight"], "unity");
    let a = floats(&j["five_term"]["a"]);
    assert!(a[3..=7].iter().all(|&x| x > 0.0), "{a:?}");
    assert_eq!(floats(&j["h"]).len(), 8);
    // symmetric weight: no b
    assert!(floats(&j["five_term"]["b"]).iter().all(|b| b.abs() < 1e-9));

    let (header, rows) = read_csv(&dir.path().join("coeffs.csv"));
    assert_eq!(header, ["n", "h", "a", "b", "c", "p", "q", "r", "s"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[1][1], "", "h_1 does not exist");
    let moments = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(moments.starts_with("k,nu,nuhat,hankel,hankel_hat\n"));
}

#[test]
fn coeffs_asymmetric_weight_has_b() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["--weight", "exp_pp:0.3", "coeffs"]);
    assert!(o.status.success());
    let j = read_json(&dir.path().join("coeffs.json"));
    let b = floats(&j["five_term"]["b"]);
    assert!(b.iter().any(|x| x.abs() > 1e-3), "{b:?}");
}

#[test]
fn coeffs_nmax_zero_is_only_h0() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["--nmax", "0", "coeffs"]);
    assert!(o.status.success());
    let j = read_json(&dir.path().join("coeffs.json"));
    let h = floats(&j["h"]);
    assert_eq!(h.len(), 1);
    assert!((h[0] - 1.0).abs() < 1e-12);
    assert!(j["five_term"].is_null() && j["seven_term"].is_null());
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    assert!(eopk(dir.path(), &["coeffs"]).status.success());
    let (_, rows) = read_csv(&dir.path().join("coeffs.csv"));
    let h2 = &rows[2][1];
    let mantissa = h2.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{h2}");
}

#[test]
fn kernel_grid_is_symmetric_with_unit_trace_per_member() {
    let dir = tempfile::tempdir().unwrap();
    for (w, n) in [("unity", 6usize), ("exp_pp:0.3", 5)] {
        let o = eopk(
            dir.path(),
            &["--weight", w, "kernel", "--n", &n.to_string(), "--grid", "512"],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let (header, rows) = read_csv(&dir.path().join("kernel.csv"));
        assert_eq!(header, ["t_x", "t_y", "k"]);
        let m = 512;
        assert_eq!(rows.len(), m * m);
        let k: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
        for i in 0..m {
            for j in 0..i {
                assert_eq!(k[i * m + j], k[j * m + i]);
            }
        }
        // periodic trapezoid on gamma: spectrally accurate
        let trace: f64 = (0..m).map(|i| k[i * m + i]).sum::<f64>() / m as f64;
        assert!((trace - (n - 1) as f64).abs() < 1e-4, "{w}: trace {trace}");
    }
}

#[test]
fn small_kernel_orders_use_the_sum() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["kernel", "--n", "1", "--grid", "8"]);
    assert!(o.status.success());
    let (_, rows) = read_csv(&dir.path().join("kernel.csv"));
    // K_1 = w pi_0^2 = 1 for the unit weight
    assert!(rows.iter().all(|r| (r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn kernel_order_beyond_family_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["--nmax", "6", "kernel", "--n", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert!(!dir.path().join("kernel.csv").exists());
}

#[test]
fn zeros_follow_the_count_law() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["--weight", "exp_pp:0.3", "zeros"]);
    assert!(o.status.success());
    let (_, rows) = read_csv(&dir.path().join("zeros.csv"));
    for n in 2..=8usize {
        let of = |kind: &str| rows.iter().filter(|r| r[0] == n.to_string() && r[1] == kind).count();
        assert_eq!(of("gamma"), if n % 2 == 0 { n } else { n - 1 }, "degree {n}");
        assert_eq!(of("real"), n % 2, "degree {n}");
    }
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() < 1e-9);
    }
}

#[test]
fn verify_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("0 failed"), "{stdout}");
    let j = read_json(&dir.path().join("verify.json"));
    assert_eq!(j["schema"], 1);
    assert_eq!(j["passed"], true);
}

#[test]
fn verify_perturb_fails_appendix_b() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["verify", "--perturb"]);
    assert_eq!(o.status.code(), Some(1));
    let j = read_json(&dir.path().join("verify.json"));
    let failed: Vec<&str> = j["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.starts_with("appendix_b")), "{failed:?}");
}

#[test]
fn symmetric_suite_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = eopk(dir.path(), &["--weight", "exp_p:0.5", "--symmetric-suite", "verify"]);
    assert_eq!(o.status.code(), Some(0));
    let j = read_json(&dir.path().join("verify.json"));
    let sym = j["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["criterion"] == 10)
        .count();
    assert!(sym > 10);

    let o = eopk(dir.path(), &["--weight", "exp_pp:0.3", "verify", "--symmetric-suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| eopk(dir.path(), args).status.code();
    assert_eq!(code(&["--weight", "exp_q:1", "coeffs"]), Some(2));
    assert_eq!(code(&["--nmax", "21", "coeffs"]), Some(2));
    assert_eq!(code(&["--tau=-1", "coeffs"]), Some(2));
    assert_eq!(code(&["--perturb", "coeffs"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    // four nodes cannot separate degree 4 from lower members
    assert_eq!(code(&["--quad", "4", "coeffs"]), Some(3));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        assert!(eopk(&out, &["--weight", "prod(exp_p:0.2,exp_pp:0.1)", "coeffs"])
            .status
            .success());
        assert!(eopk(&out, &["--seed", "7", "verify"]).status.code().is_some());
        seen.push(["coeffs.json", "coeffs.csv", "verify.json"].map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    assert_eq!(seen[0], seen[1]);
}
