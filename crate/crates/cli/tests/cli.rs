//! End-to-end tests of the `jdisc` binary: exit codes, report determinism,
//! and dump round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_jdisc")
}

fn stock_config(dir: &Path, extra_solver: &str) -> PathBuf {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "structure": {{
    "dim": 1,
    "domain_radius": 4.0,
    "normalized": true,
    "entries": [[ {{ "zb1": [1.0, 0.0] }} ]]
  }},
  "wedge": {{
    "rho": [ {{ "z1": [0.5, 0.0], "zb1": [0.5, 0.0] }} ],
    "tau": 0.0,
    "big_c": 1.0,
    "delta": 0.3
  }},
  "solver": {{ "lambda": 0.05, "c": [0.0], "t": [1.0]{extra_solver} }},
  "grid": {{ "n_r": 12, "n_theta": 32 }},
  "cover": {{ "sample_count": 5, "scale": 0.1 }},
  "psh": {{ "u": {{ "z1 zb1": [1.0, 0.0] }}, "radius": 0.05, "samples": 6, "lambda": 0.05 }},
  "seed": 42,
  "out_dir": "out"
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jdisc-cli-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_disc_succeeds_and_writes_artifacts() {
    let dir = tmp_dir("solve");
    let config = stock_config(&dir, "");
    let out = run(&[
        "solve-disc",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("out/solve-disc-report.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(parsed["passed"], serde_json::Value::Bool(true));
    // the dump reloads and reproduces its residual block
    let dump_text = std::fs::read_to_string(dir.join("out/disc.csv")).unwrap();
    let loaded = jdisc_cli::parse_disc_dump(&dump_text).unwrap();
    let cfg = jdisc_cli::RunConfig::from_file(&config).unwrap();
    let structure = cfg.structure.to_field().unwrap();
    let recomputed = loaded.recompute_residuals(&structure);
    assert!((recomputed.cauchy_riemann - loaded.stored.cauchy_riemann).abs() < 1e-12);
    assert!((recomputed.attachment - loaded.stored.attachment).abs() < 1e-12);
    assert!((recomputed.containment - loaded.stored.containment).abs() < 1e-12);
}

#[test]
fn solve_disc_at_lambda_zero_dumps_the_model_disc() {
    let dir = tmp_dir("model");
    let config = stock_config(&dir, "");
    let text = std::fs::read_to_string(&config).unwrap();
    std::fs::write(&config, text.replace("\"lambda\": 0.05", "\"lambda\": 0.0")).unwrap();
    let out = run(&[
        "solve-disc",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success());
    let dump = std::fs::read_to_string(dir.join("out/disc.csv")).unwrap();
    let loaded = jdisc_cli::parse_disc_dump(&dump).unwrap();
    // rebuild the model disc through the library and compare values
    let cfg = jdisc_cli::RunConfig::from_file(&config).unwrap();
    let structure = cfg.structure.to_field().unwrap();
    let grid = jdisc::grid::DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let solver = jdisc::bishop::BishopSolver::new(grid, structure);
    let model = solver.model_disc(&loaded.params);
    let diff = loaded.z[0].sub(&model.z[0]).sup_norm();
    assert!(diff < 1e-12, "dumped disc differs from the model by {diff}");
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let dir = tmp_dir("determinism");
    let config = stock_config(&dir, "");
    let normalize = |path: &Path| -> String {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        v["meta"]["timestamp"] = serde_json::Value::Null;
        serde_json::to_string_pretty(&v).unwrap()
    };
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let st = run(&[
            "cover",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(st.status.success());
    }
    assert_eq!(
        normalize(&out_a.join("cover-report.json")),
        normalize(&out_b.join("cover-report.json")),
        "identical config and seed must produce byte-identical reports"
    );
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tmp_dir("config-error");
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{ "structure": { "dim": 1, "entries": [[{}]], "oops": 1 } }"#)
        .unwrap();
    let out = run(&["verify-structure", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("structure"), "diagnostic lacks a path: {stderr}");

    // missing file is also a config error
    let out = run(&["verify-structure", "--config", dir.join("nope.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certification_failure_exits_with_code_one() {
    let dir = tmp_dir("cert-fail");
    let path = dir.join("config.json");
    // u = −|z|² is not psh: the hessian certification must fail
    std::fs::write(
        &path,
        r#"{
  "structure": { "dim": 1, "domain_radius": 4.0, "normalized": true,
                 "entries": [[ { "zb1": [1.0, 0.0] } ]] },
  "psh": { "u": { "z1 zb1": [-1.0, 0.0] }, "radius": 0.05, "samples": 6 },
  "seed": 1,
  "out_dir": "out"
}"#,
    )
    .unwrap();
    let out = run(&[
        "hessian",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("out/hessian-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
    assert_eq!(report["data"]["verdict"], "not psh");
}

#[test]
fn solver_failures_exit_with_code_three() {
    let dir = tmp_dir("solver-fail");
    // λ far above the threshold trips the solver precondition
    let config = stock_config(&dir, r#", "lambda_threshold": 0.1"#);
    let text = std::fs::read_to_string(&config).unwrap();
    let text = text.replace("\"lambda\": 0.05", "\"lambda\": 0.09e1");
    std::fs::write(&config, text).unwrap();
    let out = run(&[
        "solve-disc",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_override_changes_sampling() {
    let dir = tmp_dir("seed");
    let config = stock_config(&dir, "");
    let hits_of = |seed: &str, out: &Path| -> serde_json::Value {
        let st = run(&[
            "cover",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--quiet",
        ]);
        assert!(st.status.success());
        let v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(out.join("cover-report.json")).unwrap(),
        )
        .unwrap();
        v["data"]["hits"].clone()
    };
    let a = hits_of("1", &dir.join("a"));
    let b = hits_of("2", &dir.join("b"));
    assert_ne!(a, b, "different seeds must sample different targets");
}

#[test]
fn parsers_reject_adversarial_inputs_without_panicking() {
    // in-process companions to the fuzz targets
    let nasty = [
        "",
        "{",
        "{\"structure\": null}",
        "{\"structure\": {\"dim\": 99999999999999999999}}",
        "[1,2,3]",
        "\u{0}\u{1}\u{2}",
        "{\"structure\": {\"dim\": 1, \"entries\": [[{\"z1^999\": [1, 2]}]]}}",
        "{\"structure\": {\"dim\": 2, \"entries\": [[{\"1\": [1e400, -1e400]}]]}}",
    ];
    for text in nasty {
        let _ = jdisc_cli::RunConfig::from_json_str(text);
    }
    for key in ["", "^", "z", "zb^", "z1^99999999999999", "z18446744073709551616", "π", "z1 " ] {
        for dim in 1..4 {
            let _ = jdisc_cli::parse_monomial(key, dim);
        }
    }
    let dumps = [
        "",
        "# n = 1",
        "# n = 0\n# n_r = 4\n# n_theta = 16\n# lambda = 0\n# c = 0\n# t = 0\nring,k\n",
        "# n = 1\n# n_r = 4\n# n_theta = 16\n# lambda = NaN\n# c = 0\n# t = 1\nring,k,r,theta,re_z1,im_z1,re_dz1,im_dz1,re_dzb1,im_dzb1\n",
        "# n = 1\n# n_r = 999999\n# n_theta = 17\n# lambda = 0\n# c = 0\n# t = 1\nring,k\n0,0\n",
    ];
    for text in dumps {
        let _ = jdisc_cli::parse_disc_dump(text);
    }
}

#[test]
fn operators_selftest_passes_on_defaults() {
    let dir = tmp_dir("selftest");
    let config = stock_config(&dir, "");
    let out = run(&[
        "operators-selftest",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--grid",
        "24,64",
        "--quiet",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
