use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use krylovlab::{ExperimentConfig, ExperimentKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_krylovlab"))
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

const SMALL_RMT: &str =
    "kind=rmt-sweep\ndim=8\nensemble=3\nx_grid=0,1\nt_points=20\nt_max=4\ntau_points=5\ntau_max=1\n";

#[test]
fn selftest_passes() {
    let out = bin().arg("selftest").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn config_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("big.cfg", "L=99\n"), ("typo.cfg", "dimm=4\n"), ("bad.cfg", "ensemble=x\n")] {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        let out = bin().arg("run").arg(&p).arg("--out").arg(dir.path().join("o")).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
    let out = bin().args(["run", "/nonexistent/config"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rmt_sweep_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rmt.cfg");
    fs::write(&cfg, SMALL_RMT).unwrap();
    let runs: Vec<_> = ["1", "2", "2"]
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let out = dir.path().join(format!("out{i}"));
            let status = bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--workers", w]).status().unwrap();
            assert!(status.success());
            tree(&out)
        })
        .collect();
    let csv = |t: &BTreeMap<String, Vec<u8>>| {
        t.iter().filter(|(k, _)| k.ends_with(".csv")).map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>()
    };
    assert_eq!(csv(&runs[0]), csv(&runs[1]));
    assert_eq!(runs[1], runs[2]);
    let names: Vec<&String> = runs[0].keys().collect();
    assert_eq!(names, ["bn_vs_x.csv", "ck_vs_x.csv", "config.resolved", "oqsl_summary_vs_x.csv", "oqsl_vs_x.csv"]);

    let other = dir.path().join("seeded");
    assert!(bin().arg("run").arg(&cfg).arg("--out").arg(&other).args(["--seed", "99"]).status().unwrap().success());
    assert_ne!(tree(&other)["bn_vs_x.csv"], runs[0]["bn_vs_x.csv"]);
    let resolved = String::from_utf8(tree(&other)["config.resolved"].clone()).unwrap();
    assert!(resolved.contains("seed=99"));
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse(SMALL_RMT).unwrap();
    krylovlab::run(&cfg, dir.path()).unwrap();
    let oqsl = fs::read_to_string(dir.path().join("oqsl_vs_x.csv")).unwrap();
    let mut lines = oqsl.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# krylovlab-v") && comment.contains("seed=") && comment.contains("lanczos_tol="));
    assert_eq!(lines.next().unwrap(), "param,tau,geodesic,speed,tau_qsl,tau_ref,stationary_norm,count1,count2,D_K");
    assert_eq!(lines.count(), 2 * 5);
    let summary = fs::read_to_string(dir.path().join("oqsl_summary_vs_x.csv")).unwrap();
    for row in summary.lines().skip(2) {
        let f: Vec<&str> = row.split(',').collect();
        let members: usize = f[1].parse().unwrap();
        let aborted: usize = f[2].parse().unwrap();
        assert_eq!(members + aborted, 3);
    }
    let echoed = ExperimentConfig::load(&dir.path().join("config.resolved")).unwrap();
    assert_eq!(echoed, cfg);
}

#[test]
fn anni_and_scrambling_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg =
        ExperimentConfig::parse("L=4\ng_grid=0.1,0.5\nt_points=10\nt_max=2\ntau_points=4\nsnapshots=0,3").unwrap();
    cfg.kind = ExperimentKind::AnniSweep;
    krylovlab::run(&cfg, &dir.path().join("anni")).unwrap();
    let names: Vec<String> = tree(&dir.path().join("anni")).into_keys().collect();
    assert!(names.contains(&"bn_vs_g.csv".to_string()) && names.contains(&"oqsl_vs_g.csv".to_string()));

    cfg.kind = ExperimentKind::ScramblingProbe;
    let out = dir.path().join("scr");
    krylovlab::run(&cfg, &out).unwrap();
    let files = tree(&out);
    for name in ["influence_vs_n.csv", "ipr_vs_n.csv", "opee_vs_n.csv", "ipr_vs_t.csv", "opee_vs_t.csv"] {
        assert!(files.contains_key(name), "{name}");
    }
    let density = String::from_utf8(files["density_g0.5_n3.csv"].clone()).unwrap();
    let rows: Vec<&str> = density.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    let lengths: Vec<usize> = rows.iter().map(|r| r.split(',').count() - 1).collect();
    // C(4, k) 3^k
    assert_eq!(lengths, vec![1, 12, 54, 108, 81]);
    assert!(density.contains("n_sites=4"));
    let infl = String::from_utf8(files["influence_vs_n.csv"].clone()).unwrap();
    // K_0 of the mid-chain probe has only single-site strings
    let first: Vec<&str> = infl.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(first[..2], ["0.1", "0"]);
    assert!((first[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}
