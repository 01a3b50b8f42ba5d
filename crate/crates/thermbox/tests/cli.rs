//! End-to-end command-line checks: exit codes, file formats, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermbox"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn thermbox")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    /// Minimal default-box config plus a short weather file.
    fn with_defaults(self) -> Self {
        write(&self.path("box.conf"), "[box]\n");
        let out = run(&[
            "gen-weather",
            "--out",
            &self.arg("weather.csv"),
            "--days",
            "2",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        self
    }
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["run-bes", "run-fem", "compare", "gen-weather", "validate"] {
        let out = run(&[sub, "--help"]);
        assert_eq!(code(&out), 0, "{sub} --help");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn fem_output_is_deterministic() {
    let f = Fixture::new().with_defaults();
    for name in ["f1.csv", "f2.csv"] {
        let out = run(&[
            "run-fem",
            "--config",
            &f.arg("box.conf"),
            "--weather",
            &f.arg("weather.csv"),
            "--out",
            &f.arg(name),
            "--mesh",
            "10",
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(
        std::fs::read(f.path("f1.csv")).unwrap(),
        std::fs::read(f.path("f2.csv")).unwrap()
    );
}

#[test]
fn gen_weather_writes_expected_rows() {
    let f = Fixture::new();
    let out = run(&["gen-weather", "--out", &f.arg("w.csv"), "--days", "30"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(f.path("w.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,Te,Igh,Idh");
    assert_eq!(lines.count(), 720);
}

#[test]
fn gen_weather_is_deterministic() {
    let f = Fixture::new();
    run(&["gen-weather", "--out", &f.arg("a.csv")]);
    run(&["gen-weather", "--out", &f.arg("b.csv")]);
    let a = std::fs::read(f.path("a.csv")).unwrap();
    let b = std::fs::read(f.path("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn run_bes_produces_csv_and_is_deterministic() {
    let f = Fixture::new().with_defaults();
    for name in ["bes1.csv", "bes2.csv"] {
        let out = run(&[
            "run-bes",
            "--config",
            &f.arg("box.conf"),
            "--weather",
            &f.arg("weather.csv"),
            "--out",
            &f.arg(name),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(f.path("bes1.csv")).unwrap();
    assert_eq!(a, std::fs::read(f.path("bes2.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "hour,T_a,T_x,T_c1,T_c2,phi_vent,phi_trans_total"
    );
    assert_eq!(lines.count(), 48);
}

#[test]
fn run_bes_missing_weather_exits_2() {
    let f = Fixture::new().with_defaults();
    let out = run(&[
        "run-bes",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("nope.csv"),
        "--out",
        &f.arg("o.csv"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn run_bes_bad_config_exits_1() {
    let f = Fixture::new().with_defaults();
    write(&f.path("bad.conf"), "[box]\nwall_thickness = 0.7\n");
    let out = run(&[
        "run-bes",
        "--config",
        &f.arg("bad.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("o.csv"),
    ]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wall_thickness"), "{err}");
}

#[test]
fn run_bes_unstable_wall_exits_3_with_pole_report() {
    let f = Fixture::new().with_defaults();
    write(
        &f.path("deep.conf"),
        "[materials.softwood]\nconductivity = 0.15\ndensity = 550\nspecific_heat = 1600\n\n\
         [envelope.deep]\narea = 1.0\nconstruction = softwood:0.4\n",
    );
    let out = run(&[
        "run-bes",
        "--config",
        &f.arg("deep.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("o.csv"),
    ]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unstable") && err.contains("poles"), "{err}");
}

#[test]
fn run_fem_indivisible_mesh_exits_4() {
    let f = Fixture::new().with_defaults();
    let out = run(&[
        "run-fem",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("o.csv"),
        "--mesh",
        "7",
    ]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nearest valid"), "{err}");
}

#[test]
fn run_fem_small_mesh_succeeds() {
    let f = Fixture::new().with_defaults();
    let out = run(&[
        "run-fem",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("fem.csv"),
        "--mesh",
        "10",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(f.path("fem.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "hour,T_mean_core");
    assert_eq!(lines.count(), 48);
}

#[test]
fn run_fem_probes_and_snapshots() {
    let f = Fixture::new().with_defaults();
    let out = run(&[
        "run-fem",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("fem.csv"),
        "--mesh",
        "10",
        "--probe",
        "0.6,0.6,0.6",
        "--vtk-dir",
        &f.arg("snaps"),
        "--vtk-every",
        "24",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(f.path("fem.csv")).unwrap();
    assert!(text.starts_with("hour,T_mean_core,T_probe_0"));
    let snaps: Vec<_> = std::fs::read_dir(f.path("snaps")).unwrap().collect();
    assert_eq!(snaps.len(), 2, "hours 0 and 24 of a 48 h run");
}

#[test]
fn compare_identical_series_zero_metrics() {
    let f = Fixture::new();
    let csv = "hour,T_a\n0,20.0\n1,20.5\n2,21.0\n";
    write(&f.path("a.csv"), csv);
    write(&f.path("b.csv"), csv);
    let out = run(&[
        "compare",
        "--a",
        &f.arg("a.csv"),
        "--b",
        &f.arg("b.csv"),
        "--col-b",
        "T_a",
        "--warmup",
        "0",
        "--out",
        &f.arg("m.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(f.path("m.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["rmse"], 0.0);
    assert_eq!(json["max_abs"], 0.0);
    assert_eq!(json["n"], 3);
}

#[test]
fn compare_constant_offset_metrics() {
    let f = Fixture::new();
    write(&f.path("a.csv"), "hour,T_a\n0,20.5\n1,21.5\n");
    write(&f.path("b.csv"), "hour,T_a\n0,20.0\n1,21.0\n");
    let out = run(&[
        "compare",
        "--a",
        &f.arg("a.csv"),
        "--b",
        &f.arg("b.csv"),
        "--col-b",
        "T_a",
        "--warmup",
        "0",
        "--out",
        &f.arg("m.json"),
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(f.path("m.json")).unwrap()).unwrap();
    assert_eq!(json["rmse"], 0.5);
    assert_eq!(json["mbe"], 0.5);
}

#[test]
fn compare_misaligned_exits_5() {
    let f = Fixture::new();
    write(&f.path("a.csv"), "hour,T_a\n0,20.0\n2,21.0\n");
    write(&f.path("b.csv"), "hour,T_a\n0,20.0\n1,21.0\n");
    let out = run(&[
        "compare",
        "--a",
        &f.arg("a.csv"),
        "--b",
        &f.arg("b.csv"),
        "--col-b",
        "T_a",
        "--warmup",
        "0",
        "--out",
        &f.arg("m.json"),
    ]);
    assert_eq!(code(&out), 5);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("misaligned"), "{err}");
}

#[test]
fn validate_passes_on_fresh_build() {
    let out = run(&["validate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0 failed"), "{stdout}");
}

#[test]
fn validate_perturbation_hook_fails_identity_check() {
    let out = run(&["validate", "--perturb-u-identity", "0.001"]);
    assert_ne!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL u-identity"), "{stdout}");
}

#[test]
fn validate_dump_writes_reports() {
    let f = Fixture::new();
    let out = run(&["validate", "--dump-dir", &f.arg("dumps")]);
    assert_eq!(code(&out), 0);
    let entries: Vec<String> = std::fs::read_dir(f.path("dumps"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(entries.iter().any(|e| e.ends_with("_admittance.csv")));
    assert!(entries.iter().any(|e| e.ends_with("_fit.txt")));
}

#[test]
fn run_bes_with_setpoints_reports_plant_power() {
    let f = Fixture::new().with_defaults();
    write(
        &f.path("heated.conf"),
        "[box]\n\n[simulation]\nheat_setpoint = 18\n",
    );
    let out = run(&[
        "run-bes",
        "--config",
        &f.arg("heated.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("bes.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(f.path("bes.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "hour,T_a,T_x,T_c1,T_c2,phi_vent,phi_trans_total,P_heat"
    );
    // weather peaks at 15 degC dry-bulb, so the heater must run
    let any_heating = lines.any(|l| {
        l.rsplit(',').next().and_then(|v| v.parse::<f64>().ok()).is_some_and(|p| p > 0.0)
    });
    assert!(any_heating);
}

/// The full verification pipeline through the CLI on a small mesh: both
/// models, then metrics; loose bound since the coarse mesh differs more.
#[test]
fn pipeline_bes_fem_compare() {
    let f = Fixture::new();
    write(&f.path("box.conf"), "[box]\n");
    run(&["gen-weather", "--out", &f.arg("weather.csv"), "--days", "7"]);
    let out = run(&[
        "run-bes",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("bes.csv"),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "run-fem",
        "--config",
        &f.arg("box.conf"),
        "--weather",
        &f.arg("weather.csv"),
        "--out",
        &f.arg("fem.csv"),
        "--mesh",
        "10",
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "compare",
        "--a",
        &f.arg("bes.csv"),
        "--b",
        &f.arg("fem.csv"),
        "--warmup",
        "72",
        "--out",
        &f.arg("m.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(f.path("m.json")).unwrap()).unwrap();
    let rmse = json["rmse"].as_f64().unwrap();
    assert!(rmse < 0.5, "coarse-mesh pipeline rmse {rmse}");
    assert_eq!(json["n"], 7 * 24 - 72);
}
