use std::path::Path;
use std::process::Command;

fn warpspec(config: &str, sub: &str, dir: &Path) -> (i32, String) {
    let cfg = dir.join("experiment.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_warpspec"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env("WARPSPEC_THREADS", "1")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn transform_identity_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = warpspec(
        r#"
        [warp]
        family = "identity"
        [time]
        min = -10.0
        max = 10.0
        n = 512
        [signal]
        kind = "gaussian"
        [transform]
        flavor = "multiplicative"
        method = "direct-quadrature"
        [tolerances]
        roundtrip = 1e-10
        "#,
        "transform",
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let r = report(dir.path());
    assert_eq!(r["pass"], true);
    let rt = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "roundtrip").unwrap();
    assert_eq!(rt["tolerance"], 1e-10);
    assert!(rt["value"].as_f64().unwrap() < 1e-10);
    assert!(dir.path().join("out/spectrum.csv").exists());
}

#[test]
fn distribution_linear_scale() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = warpspec(
        r#"
        [warp]
        family = "linear-scale"
        params = [2.0]
        [test_function]
        kind = "gaussian"
        [distribution]
        expected = 0.5
        "#,
        "distribution",
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let r = report(dir.path());
    assert!((r["scalars"]["parseval_re"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = warpspec("[warp]\nfamily = \"spiral\"\n", "transform", dir.path());
    assert_eq!(code, 2);
    let (code, _) = warpspec("[warp]\nfamily = \"identity\"\nbogus = 1\n", "transform", dir.path());
    assert_eq!(code, 2);
    let (code, _) = warpspec("[tolerances]\nnot_a_check = 1.0\n", "transform", dir.path());
    assert_eq!(code, 2);
}

#[test]
fn failed_check_exits_1_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = warpspec(
        r#"
        [warp]
        family = "sin-perturbed"
        params = [0.3, 1.0]
        [time]
        min = -10.0
        max = 10.0
        n = 256
        [signal]
        kind = "gaussian"
        [tolerances]
        roundtrip = 1e-30
        "#,
        "transform",
        dir.path(),
    );
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL"));
    assert_eq!(report(dir.path())["pass"], false);
}
