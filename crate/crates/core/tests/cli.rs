use std::process::{Command, Output};

fn horoxt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horoxt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn rho_table_has_expected_shape() {
    let out = horoxt(&["density", "rho", "--from", "-6", "--to", "4", "--step", "0.01"]);
    assert!(out.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 1001);
    let vals: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    let at1 = vals.iter().find(|(x, _)| (x - 1.0).abs() < 1e-9).unwrap().1;
    assert!((at1 - 3.0 / std::f64::consts::PI.powi(2) * (-1.0f64).exp()).abs() < 1e-9);
    // one interior maximum: increasing then decreasing
    let k = vals.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap().0;
    assert!(k > 0 && k < vals.len() - 1);
    assert!(vals[..=k].windows(2).all(|w| w[0].1 <= w[1].1));
    assert!(vals[k..].windows(2).all(|w| w[0].1 >= w[1].1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# horoxt "));
    assert!(text.contains("# config: "));
    assert!(!text.contains('\r'));
}

#[test]
fn single_point_densities() {
    let out = horoxt(&["density", "psi", "--at", "0.5"]);
    let v: f64 = data_rows(&out)[0][1].parse().unwrap();
    assert!((v - 0.303_963_550_9).abs() < 1e-10);
    let a = data_rows(&horoxt(&["density", "omega", "--ell", "0", "--at", "0"]));
    let b = data_rows(&horoxt(&["density", "rho", "--at", "0"]));
    assert_eq!(a, b);
    let out = horoxt(&["density", "psi_rt", "--at", "0.5", "--t", "1"]);
    assert!(out.status.success());
    let out = horoxt(&["density", "psi_rt", "--at", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(horoxt(&["density", "gamma", "--at", "1"]).status.code(), Some(2));
    assert_eq!(horoxt(&["density", "psi"]).status.code(), Some(2));
    assert_eq!(horoxt(&["density", "psi", "--at", "-1"]).status.code(), Some(2));
    assert_eq!(horoxt(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(horoxt(&["simulate", "hits", "--g0", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_three() {
    let out = horoxt(&["simulate", "hits", "--T", "1e12"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("capacity"));
}

#[test]
fn identity_orbit_hits() {
    let out = horoxt(&["simulate", "hits", "--R", "0", "--T", "1", "--oracle"]);
    assert!(out.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r[0], "1");
    assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
    assert_eq!((r[6].as_str(), r[7].as_str()), ("1", "1"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# oracle: {\"matched\":true"));
}

#[test]
fn sup_record_is_json() {
    let out = horoxt(&["simulate", "sup", "--T", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sup_height"].as_f64().unwrap(), 0.0);
    assert!(v["argmax"].is_number());
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (k, threads) in ["1", "4", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_horoxt"))
            .args(["verify", "firsthit", "--n", "2000", "--seed", "5", "--out"])
            .arg(&path)
            .env("HOROXT_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.code() == Some(0) || status.code() == Some(1));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);

    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let out = Command::new(env!("CARGO_BIN_EXE_horoxt"))
            .args(["simulate", "hits", "--random", "--seed", "3", "--T", "500", "--out"])
            .arg(p)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn verify_suites_report_checks() {
    let out = horoxt(&["verify", "constants"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["target"].is_number() && c["observed"].is_number() && c["tolerance"].is_number());
    }
    let out = horoxt(&["verify", "oracle", "--n", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let out = horoxt(&["verify", "farey", "--Q", "2000"]);
    assert_eq!(out.status.code(), Some(0));
}
