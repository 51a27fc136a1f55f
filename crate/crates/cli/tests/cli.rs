use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn butler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_butler"))
        .args(args)
        .current_dir(dir)
        .env_remove("BUTLER_OUT_DIR")
        .output()
        .unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref())
        .unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn assert_single_line_error(out: &Output) {
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "stderr: {err:?}");
    assert!(err.starts_with("butler: error: "), "{err}");
}

#[test]
fn design_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "design", "--freq", "5.2GHz", "--er", "4.9", "--h", "1.6mm", "--out",
    ];
    let a = butler(dir.path(), &[&args[..], &["a.json"]].concat());
    let b = butler(dir.path(), &[&args[..], &["b.json"]].concat());
    assert!(a.status.success());
    assert_eq!(
        read(dir.path().join("a.json")),
        read(dir.path().join("b.json"))
    );
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("wrote"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn butler_outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "butler",
        "--fidelity",
        "circuit",
        "--points",
        "21",
        "--format",
        "DB",
    ];
    assert!(butler(a.path(), &args).status.success());
    assert!(butler(b.path(), &args).status.success());
    for f in ["butler.s8p", "excitation.csv", "beams.csv"] {
        assert_eq!(read(a.path().join(f)), read(b.path().join(f)), "{f}");
    }
    let ts = butler_core::touchstone::read_file(a.path().join("butler.s8p")).unwrap();
    assert_eq!(ts.n_ports, 8);
    assert_eq!(ts.data.len(), 21);
    assert_eq!(
        read(a.path().join("excitation.csv")).lines().count(),
        1 + 21 * 16
    );
}

#[test]
fn port_1r_pattern_matches_golden_cut() {
    let dir = tempfile::tempdir().unwrap();
    assert!(butler(dir.path(), &["pattern", "--port", "1R"])
        .status
        .success());
    let golden =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/pattern_1R.csv");
    assert_eq!(read(dir.path().join("pattern_1R.csv")), read(golden));
}

#[test]
fn all_port_overlay_is_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let out = butler(dir.path(), &["pattern", "--port", "all"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("incoherent"), "{stdout}");
    assert!(dir.path().join("pattern_all_incoherent.csv").exists());
}

#[test]
fn air_substrate_has_unit_effective_permittivity() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        butler(dir.path(), &["design", "--er", "1", "--out", "r.json"])
            .status
            .success()
    );
    let rep: serde_json::Value = serde_json::from_str(&read(dir.path().join("r.json"))).unwrap();
    for line in rep["microstrip"].as_array().unwrap() {
        assert_eq!(line["eps_reff"].as_f64(), Some(1.0));
    }
    assert_eq!(rep["patch"]["eps_reff"].as_f64(), Some(1.0));
}

#[test]
fn config_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scenario.json"),
        r#"{"freq": "2.4GHz", "er": 2.2, "h": "0.8mm", "out_dir": "from_config"}"#,
    )
    .unwrap();
    let out = butler(dir.path(), &["--config", "scenario.json", "design"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("from_config/design_report.json"))).unwrap();
    assert_eq!(rep["inputs"]["frequency_hz"].as_f64(), Some(2.4e9));
    assert_eq!(rep["inputs"]["epsilon_r"].as_f64(), Some(2.2));

    let out = butler(
        dir.path(),
        &[
            "--config",
            "scenario.json",
            "design",
            "--er",
            "3.5",
            "--out",
            "o.json",
        ],
    );
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&read(dir.path().join("o.json"))).unwrap();
    assert_eq!(rep["inputs"]["epsilon_r"].as_f64(), Some(3.5));
    assert_eq!(rep["inputs"]["height_mm"].as_f64(), Some(0.8));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env_out");
    let out = Command::new(env!("CARGO_BIN_EXE_butler"))
        .args(["butler", "--points", "3"])
        .current_dir(dir.path())
        .env("BUTLER_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("butler.s8p").exists());
    assert!(target.join("beams.csv").exists());
}

#[test]
fn touchstone_convert_preserves_data() {
    let dir = tempfile::tempdir().unwrap();
    assert!(butler(
        dir.path(),
        &["butler", "--points", "4", "--fidelity", "circuit"]
    )
    .status
    .success());
    let out = butler(
        dir.path(),
        &[
            "touchstone",
            "convert",
            "butler.s8p",
            "ri.s8p",
            "--format",
            "RI",
            "--unit",
            "Hz",
        ],
    );
    assert!(out.status.success());
    let a = butler_core::touchstone::read_file(dir.path().join("butler.s8p")).unwrap();
    let b = butler_core::touchstone::read_file(dir.path().join("ri.s8p")).unwrap();
    assert!(read(dir.path().join("ri.s8p")).contains("\n# Hz S RI R 50\n"));
    for ((fa, sa), (fb, sb)) in a.data.iter().zip(&b.data) {
        assert!((fa - fb).abs() / fa < 1e-9);
        assert!(sa.max_abs_diff(sb) < 1e-9);
    }
    assert_single_line_error(&butler(
        dir.path(),
        &["touchstone", "convert", "butler.s8p", "x.s2p"],
    ));
}

#[test]
fn every_error_is_one_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.s2p"),
        "# GHz S MA R 50\n1.0 0.5 0 0.5\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"frequency\": 1}").unwrap();
    let cases: &[&[&str]] = &[
        &[],
        &["nonsense"],
        &["design", "--freq", "5.2 parsecs"],
        &["design", "--er", "-3"],
        &["design", "--h", "200mm"],
        &["design", "--r-edge", "20"],
        &["design", "--unknown-flag"],
        &["butler", "--fidelity", "exact"],
        &["butler", "--f-start", "6GHz", "--f-stop", "5GHz"],
        &["butler", "--points", "1"],
        &["butler", "--format", "XY"],
        &["butler", "--ports", "3Q"],
        &["pattern", "--port", "9"],
        &["pattern", "--element", "horn"],
        &["pattern", "--spacing", "-1mm"],
        &["touchstone", "convert", "missing.s2p", "out.s2p"],
        &["touchstone", "convert", "bad.s2p", "out.s2p"],
        &["--config", "bad.json", "design"],
        &["--config", "absent.json", "design"],
    ];
    for args in cases {
        let out = butler(dir.path(), args);
        assert_single_line_error(&out);
        assert!(out.stdout.is_empty() || !args.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--help"][..],
        &["--version"],
        &["design", "--help"],
        &["touchstone", "convert", "--help"],
    ] {
        let out = butler(dir.path(), args);
        assert!(out.status.success(), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn netlist_dump_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let out = butler(
        dir.path(),
        &[
            "butler",
            "--fidelity",
            "circuit",
            "--points",
            "2",
            "--netlist",
            "net.json",
        ],
    );
    assert!(out.status.success());
    let net = butler_core::Netlist::from_json(&read(dir.path().join("net.json"))).unwrap();
    let built = butler_core::build_butler_4x4(
        butler_core::Fidelity::Circuit,
        5.2e9,
        &butler_core::Substrate::fr4(),
    )
    .unwrap();
    assert_eq!(net, built);
}

#[test]
fn shipped_scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples/scenario.json");
    let out = butler(
        dir.path(),
        &[
            "--config",
            scenario.to_str().unwrap(),
            "butler",
            "--points",
            "3",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("out/butler.s8p").exists());
}
