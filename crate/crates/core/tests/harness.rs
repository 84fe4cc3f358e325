use std::path::{Path, PathBuf};
use std::process::Command;

use semiclass_lab::harness::output::Table;
use semiclass_lab::harness::{
    load_config, run_batch, run_experiment, run_gamma_identity, run_theorem2, BumpParams, ExperimentConfig,
    ExperimentName,
};
use semiclass_lab::speed_profiles::SpeedProfile;
use semiclass_lab::LabError;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiclass-lab"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semiclass-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

#[test]
fn list_prints_every_experiment() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ExperimentName::ALL {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(name.as_str())), "{name:?} missing");
    }
    assert_eq!(ExperimentName::ALL.len(), 9);
}

#[test]
fn inadmissible_profile_exits_with_config_code() {
    let dir = scratch("bad");
    let cfg = r#"{"name": "oracle", "grid": {"n": 64, "period": 1.0},
        "speed": {"c0": 1.0, "perturbation": {"shape": "cosine", "amplitude": 0.2, "wavenumber": 1.0}, "c1": 0.85, "c2": 1.15}}"#;
    std::fs::write(dir.join("bad.json"), cfg).unwrap();
    let out = bin().arg("run").arg(dir.join("bad.json")).arg("--out").arg(dir.join("out")).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.join("out").join("oracle").join("trajectory.csv").exists());

    std::fs::write(dir.join("broken.json"), "{\"name\": ").unwrap();
    let out = bin().arg("run").arg(dir.join("broken.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn n_override_changes_the_grid() {
    let dir = scratch("override");
    let out = bin()
        .args(["run"])
        .arg(configs().join("gamma_identity.json"))
        .arg("--out")
        .arg(&dir)
        .args(["--n-override", "32", "--workers", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("gamma_identity").join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("gamma_identity") && stdout.contains("PASS"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failed_verdict_exits_with_code_two() {
    let dir = scratch("fail");
    let mut cfg = load_config(&configs().join("gamma_identity.json")).unwrap().remove(0);
    cfg.tolerances.product_tol = 0.0;
    cfg.tolerances.gamma_tol = -1.0;
    std::fs::write(dir.join("strict.json"), serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = bin().arg("run").arg(dir.join("strict.json")).arg("--out").arg(dir.join("out")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn shipped_configs_load_and_validate() {
    let all = load_config(&configs().join("all.json")).unwrap();
    assert_eq!(all.len(), 9);
    for cfg in &all {
        cfg.validate().unwrap();
        let single = load_config(&configs().join(format!("{}.json", cfg.name.as_str()))).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].canonical_json().unwrap(), cfg.canonical_json().unwrap());
    }
}

#[test]
fn batch_validates_before_running() {
    let good = load_config(&configs().join("gamma_identity.json")).unwrap().remove(0);
    let mut bad = good.clone();
    bad.t_sweep = vec![0.5, 0.25];
    bad.name = ExperimentName::CommutatorScaling;
    let err = run_batch(&[good, bad], None, 2).unwrap_err();
    assert!(matches!(&err, LabError::Config(m) if m.starts_with("commutator_scaling")), "{err}");
}

#[test]
fn batch_order_and_digests_are_stable() {
    let base = load_config(&configs().join("gamma_identity.json")).unwrap().remove(0);
    let mut seminorm = load_config(&configs().join("seminorm_scaling.json")).unwrap().remove(0);
    seminorm.params.seminorm_indices = Some(vec![(0, 0)]);
    let cfgs = vec![base.clone(), seminorm, base];
    let a = run_batch(&cfgs, None, 2).unwrap();
    let b = run_batch(&cfgs, None, 1).unwrap();
    let names: Vec<ExperimentName> = a.iter().map(|r| r.as_ref().unwrap().name).collect();
    assert_eq!(names, [ExperimentName::GammaIdentity, ExperimentName::SeminormScaling, ExperimentName::GammaIdentity]);
    for (x, y) in a.iter().zip(&b) {
        let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
        assert_eq!(x.inputs_digest, y.inputs_digest);
        assert_eq!(x.values, y.values);
    }
    assert_eq!(a[0].as_ref().unwrap().inputs_digest, a[2].as_ref().unwrap().inputs_digest);
    assert_ne!(a[0].as_ref().unwrap().inputs_digest, a[1].as_ref().unwrap().inputs_digest);
}

#[test]
fn oracle_rejects_variable_speed() {
    let cfg = ExperimentConfig::new(ExperimentName::Oracle, 64, 1.0, SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15));
    assert!(matches!(run_experiment(&cfg, None), Err(LabError::Config(_))));
}

#[test]
fn constant_speed_growth_rate_vanishes() {
    let mut cfg = ExperimentConfig::new(ExperimentName::Theorem1, 64, 1.0, SpeedProfile::constant(0.95, 0.85, 1.15));
    cfg.params.t_final = Some(0.25);
    let report = run_experiment(&cfg, None).unwrap();
    assert!(report.passed, "{:?}", report.criteria);
    let rate = report.value("max_abs_rate").unwrap();
    assert!(rate < 1e-8, "{rate}");
}

#[test]
fn identities_hold_and_tables_match_report() {
    let dir = scratch("identities");
    let cfg = load_config(&configs().join("gamma_identity.json")).unwrap().remove(0);
    let report = run_gamma_identity(&cfg, Some(&dir)).unwrap();
    assert!(report.passed, "{:?}", report.criteria);
    let table = Table::parse(&std::fs::read_to_string(dir.join("gamma_identity").join("identities.csv")).unwrap());
    let measured = table.column("measured").unwrap();
    assert_eq!(measured[0], report.value("gamma_plancherel").unwrap());
    assert!(report.value("duality_ratio").unwrap() <= 1.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

/// Constant speed: the local exponent must be `−1/c` and the band collapses toward it.
#[test]
fn constant_speed_local_exponent() {
    let mut cfg = ExperimentConfig::new(ExperimentName::Theorem2, 1024, 1.0, SpeedProfile::constant(1.0, 0.85, 1.15));
    cfg.t_sweep = vec![0.03125, 0.0625, 0.125, 0.25];
    cfg.params.bump = Some(BumpParams { center: 0.5, radius: 0.125 });
    cfg.tolerances.exponent_rel_tol = 0.05;
    let report = run_theorem2(&cfg, None).unwrap();
    assert!(report.passed, "{:?}", report.criteria);
    let rel = report.value("exponent_rel_error").unwrap();
    assert!(rel <= 0.05, "{rel}");
    assert!(report.value("s_minus").unwrap() < -1.0 && report.value("s_plus").unwrap() > -1.0);
}
