//! Behavioral tests for the command-line interface: exit codes, output
//! schemas, config echo round-trips, and the documented error paths.

use std::fs;
use std::path::Path;
use std::process::Command;

use twomode_cli::config::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twomode"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const RABI_CONFIG: &str = r#"
[model]
n_particles = 10

[model.omega]
kind = "constant"
value = 0.8

[propagation]
t_start = 0.0
t_end = 4.0
dt = 5e-4
record_stride = 200
"#;

#[test]
fn evolve_rabi_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "rabi.toml", RABI_CONFIG);
    let out = dir.path().join("rabi.csv");
    let status = bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "t,jx,jy,jz,var_jz,norm,energy",
        "CSV schema"
    );
    let mut checked = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (t, jz) = (cols[0], cols[3]);
        let expected = -5.0 * (2.0 * 0.8 * t).cos();
        assert!(
            (jz - expected).abs() < 1e-6,
            "jz({t}) = {jz}, expected {expected}"
        );
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn config_echo_reparses_to_equivalent_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "rabi.toml", RABI_CONFIG);
    let out = dir.path().join("rabi.csv");
    bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();

    let text = fs::read_to_string(&out).unwrap();
    let echo = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("# config: ")
        .expect("first line carries the config echo");
    let parsed: ExperimentConfig = serde_json::from_str(echo).unwrap();
    let re_serialized = serde_json::to_string(&parsed).unwrap();
    assert_eq!(echo, re_serialized, "echo must round-trip");

    // the echoed config can drive an identical rerun
    let json_value: serde_json::Value = serde_json::from_str(echo).unwrap();
    let toml_text = toml::to_string(&json_value).unwrap();
    let config2 = write_config(dir.path(), "echoed.toml", &toml_text);
    let out2 = dir.path().join("rabi2.csv");
    let status = bin()
        .args(["evolve", "--config"])
        .arg(&config2)
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let rerun = fs::read_to_string(&out2).unwrap();
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&text), body(&rerun));
}

#[test]
fn invalid_config_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.toml",
        r#"
[model]
n_particles = 0

[model.omega]
kind = "constant"
value = 1.0

[propagation]
t_start = 0.0
t_end = 1.0
dt = 1e-3
"#,
    );
    let out = dir.path().join("never.csv");
    let output = bin()
        .args(["evolve", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("n_particles"),
        "message names the field: {stderr}"
    );
    assert!(!out.exists(), "no output file on config error");
}

#[test]
fn missing_config_flag_exits_1() {
    let output = bin().arg("evolve").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn mode_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "mismatch.toml",
        &format!("mode = \"sweep\"\n{RABI_CONFIG}"),
    );
    let output = bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("mode"));
}

#[test]
fn norm_drift_abort_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    // dt far too large for the Hamiltonian scale
    let config = write_config(
        dir.path(),
        "drift.toml",
        r#"
[model]
n_particles = 20

[model.omega]
kind = "constant"
value = 40.0

[propagation]
t_start = 0.0
t_end = 10.0
dt = 0.05
"#,
    );
    let out = dir.path().join("drift.csv");
    let output = bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("norm drift"));
    assert!(!out.exists(), "aborted run must not leave partial output");
}

#[test]
fn verify_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let output = bin()
        .arg("verify")
        .arg("--out")
        .arg(&out)
        .arg("--seedless")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 7);
    assert!(!stdout.contains("FAIL"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["data"].as_array().unwrap().len() >= 7);
}

#[test]
fn hex_float_mode_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "hex.toml",
        &format!("{RABI_CONFIG}\n[output]\nhex_floats = true\n"),
    );
    let out = dir.path().join("hex.csv");
    bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let first_row = text
        .lines()
        .find(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .unwrap();
    assert!(first_row.split(',').all(|c| c.starts_with("0x")));
    // jz(0) = -5.0 exactly
    let jz = first_row.split(',').nth(3).unwrap();
    assert_eq!(
        u64::from_str_radix(jz.trim_start_matches("0x"), 16).unwrap(),
        (-5.0_f64).to_bits()
    );
}

#[test]
fn compare_emits_deviation_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "rabi.toml", RABI_CONFIG);
    let out = dir.path().join("cmp.csv");
    let status = bin()
        .args(["compare", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,q_u,q_v,q_w,c_u,c_v,c_w,dev_u,dev_v,dev_w");
    // linear case: scaled quantum matches Bloch tightly
    for line in text.lines().skip(2) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[7] < 1e-6 && cols[8] < 1e-6 && cols[9] < 1e-6);
    }
}

#[test]
fn extract_params_is_json_with_validity_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "well.toml",
        r#"
[well]
kind = "double-gaussian"
depth = 6.0
separation = 4.0
sigma = 0.6
x_min = -8.0
x_max = 8.0
n_points = 2049
mass = 1.0
g_1d = 0.2
convergence_tolerance = 1e-4
"#,
    );
    let out = dir.path().join("params.json");
    let status = bin()
        .args(["extract-params", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let params = &report["data"]["parameters"];
    assert!(params["omega"].as_f64().unwrap() < 0.0);
    assert!(params["u0"].as_f64().unwrap() > 0.0);
    assert!(params["validity"]["density_overlap"].as_f64().unwrap() < 0.3);
}

#[test]
fn gp_formulation_matches_bloch_for_linear_dynamics() {
    let dir = tempfile::tempdir().unwrap();
    let bloch_cfg = write_config(dir.path(), "bloch.toml", RABI_CONFIG);
    let gp_cfg = write_config(
        dir.path(),
        "gp.toml",
        &format!("{RABI_CONFIG}\n[meanfield]\nformulation = \"gp\"\n"),
    );
    let out_bloch = dir.path().join("bloch.csv");
    let out_gp = dir.path().join("gp.csv");
    for (cfg, out) in [(&bloch_cfg, &out_bloch), (&gp_cfg, &out_gp)] {
        let status = bin()
            .args(["meanfield", "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let parse = |p: &Path| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
            .map(|l| {
                l.split(',')
                    .map(|c| c.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let (rows_b, rows_g) = (parse(&out_bloch), parse(&out_gp));
    assert_eq!(rows_b.len(), rows_g.len());
    for (b, g) in rows_b.iter().zip(rows_g.iter()) {
        for k in 1..4 {
            assert!(
                (b[k] - g[k]).abs() < 1e-8,
                "bloch/gp mismatch at t={}",
                b[0]
            );
        }
    }
}
