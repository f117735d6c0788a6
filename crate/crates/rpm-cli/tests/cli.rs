use std::path::Path;
use std::process::{Command, Output};

fn rpm_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpm-cli"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn help_lists_both_subcommands() {
    let out = rpm_cli(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sweep"));
    assert!(text.contains("dynamics"));
}

#[test]
fn sweep_prints_summary_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let out = rpm_cli(&[
        "sweep",
        "--theta-points",
        "3",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("3 points"), "{text}");
    assert!(text.contains("wrote CSV"), "{text}");
    assert!(text.contains("wrote plot"), "{text}");

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 1 + 2 * 3);
    assert!(csv_text.starts_with("theta_rad,singlet_yield,triplet_yield,source"));

    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<?xml"));
    assert_eq!(svg_text.matches("<circle").count(), 2 * 3);
}

#[test]
fn default_horizon_warns_about_unconverged_oracle() {
    let out = rpm_cli(&["sweep", "--theta-points", "3"]);
    assert!(out.status.success());
    assert!(
        stderr(&out).contains("warning"),
        "expected residual warning, got: {}",
        stderr(&out)
    );
}

#[test]
fn sampled_sweep_is_reproducible_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    let emit = |name: &str, seed: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let out = rpm_cli(&[
            "sweep",
            "--theta-points",
            "3",
            "--mode",
            "sampled",
            "--shots",
            "256",
            "--seed",
            seed,
            "--out-csv",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        std::fs::read(&path).unwrap()
    };
    let a = emit("a.csv", "9");
    let b = emit("b.csv", "9");
    let c = emit("c.csv", "10");
    assert_eq!(a, b, "same seed must be byte-identical");
    assert_ne!(a, c, "different seed must draw different samples");
}

#[test]
fn dynamics_reports_final_yields_and_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dyn.csv");
    let out = rpm_cli(&[
        "dynamics",
        "--theta",
        "1.5707963",
        "--steps",
        "6",
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("theta = 1.570796"), "{text}");
    assert!(text.contains("final yields"), "{text}");
    assert!(text.contains("deviation"), "{text}");
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 1 + 2 * 7); // header + both series
    assert!(csv_text.contains(",quantum"));
    assert!(csv_text.contains(",oracle"));
}

#[test]
fn config_file_steers_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "theta_points = 4\nsteps = 3\n# comment\n").unwrap();
    let out = rpm_cli(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("4 points"), "{text}");
    assert!(text.contains("3 steps"), "{text}");
}

#[test]
fn flags_beat_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "theta_points = 4\n").unwrap();
    let out = rpm_cli(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--theta-points",
        "2",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("2 points"));
}

#[test]
fn unknown_config_key_fails_with_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "steps = 3\nbogus = 1\n").unwrap();
    let out = rpm_cli(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("ParseError"), "{err}");
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn missing_config_file_fails_with_io_failure() {
    let out = rpm_cli(&["sweep", "--config", "/no/such/file.cfg"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("IoFailure"), "{}", stderr(&out));
}

#[test]
fn invalid_values_fail_with_validation_error() {
    let out = rpm_cli(&["dynamics", "--dt=-1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ValidationError"), "{}", stderr(&out));

    let out = rpm_cli(&["sweep", "--theta-points", "0"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ValidationError"), "{}", stderr(&out));
}

#[test]
fn unwritable_output_path_fails_with_io_failure() {
    let out = rpm_cli(&[
        "sweep",
        "--theta-points",
        "2",
        "--out-csv",
        "/no/such/dir/out.csv",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("IoFailure"), "{}", stderr(&out));
}

#[test]
fn config_can_set_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("from_cfg.csv");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("theta_points = 2\nout_csv = {}\n", csv.display()),
    )
    .unwrap();
    let out = rpm_cli(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(Path::new(&csv).exists());
}
