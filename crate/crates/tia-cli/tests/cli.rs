use std::fs;
use std::process::{Command, Output};

fn tia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tia")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const COARSE: [&str; 4] = ["--L", "3", "--resolution", "18,2,6"];

#[test]
fn evaluate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let mut args = vec!["evaluate", "--block", "sine", "--a", "20", "--s", "0.5", "--f", "1.5", "--n", "4"];
    args.extend(["--t", "40", "--h", "200", "--ri", "120", "--bvp", "tunnel", "--p0", "0.01"]);
    args.extend(COARSE);
    args.extend(["--out", out.to_str().unwrap()]);
    let o = tia(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("block,h,a,f,"));
    assert!(text.contains(",5.00000000e-1,"), "s with nine significant digits");
    assert!(text.contains("\"18,2,6\""), "resolution is quoted");
    let rows = tia_core::sweep::read_rows(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].classification, Some(tia_core::statics::Classification::Locked));
    assert_eq!(rows[0].bvp, tia_core::loads::Bvp::Tunnel);
    assert_eq!(rows[0].s, Some(0.5));

    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("row.csv.json")).unwrap()).unwrap();
    assert_eq!(side["point"]["block"], "sine");
    assert_eq!(side["resolution"]["div_x"], 18);
    assert!(side["tolerances"]["equilibrium_residual"].is_number());
    assert!(side["code_version"].is_string());
}

#[test]
fn hex_evaluation_reports_mechanism() {
    let mut args = vec!["evaluate", "--block", "hex", "--bvp", "beam", "--L", "3", "--resolution", "8,2,8"];
    args.push("--n");
    args.push("4");
    let o = tia(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().nth(1).unwrap().starts_with("hex,"));
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(code(&tia(&["evaluate", "--bvp", "torsion"])), 2);
    assert_eq!(code(&tia(&["evaluate", "--resolution", "1,2"])), 2);
    assert_eq!(code(&tia(&["evaluate", "--p0", "-1"])), 2);
    assert_eq!(code(&tia(&["sweep", "--config", "/nonexistent/sweep.toml", "--out", "/tmp"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "amplitudes = []\n").unwrap();
    assert_eq!(code(&tia(&["sweep", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])), 2);
    assert_eq!(code(&tia(&["export", "--format", "stl", "--out", "x"])), 2);
}

#[test]
fn row_errors_exit_with_one() {
    // amplitude far beyond what the wall thickness admits
    let mut args = vec!["evaluate", "--a", "500"];
    args.extend(COARSE);
    let o = tia(&args);
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(!stdout.lines().nth(1).unwrap().ends_with(','), "error column is filled");
}

#[test]
fn sweep_writes_results_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "amplitudes = [15.0, 25.0]\nshifts = [0.0]\nfrequencies = [1.5]\nn_values = [4]\nthicknesses = [40.0]\nL = 3\nresolution = \"18,2,6\"\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = tia(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "2", "--out", out.to_str().unwrap(), "--bvp", "pipe,shaft"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(side["jobs"], 2);
    assert_eq!(side["config"]["bvps"], serde_json::json!(["pipe", "shaft"]));
}

#[test]
fn export_writes_one_object_per_body() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("tsb1.obj");
    let mut args = vec!["export", "--format", "obj", "--out", obj.to_str().unwrap(), "--resolution", "18,2,6"];
    let o = tia(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), 56);
    assert!(!text.contains("#@pressure"));

    let vtk = dir.path().join("tsb1.vtk");
    args = vec!["export", "--format", "vtk-ascii", "--out", vtk.to_str().unwrap(), "--pressures"];
    args.extend(COARSE);
    let o = tia(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&vtk).unwrap();
    assert!(text.starts_with("# vtk DataFile"));
    assert!(text.contains("pressure"));
}

#[test]
fn pressures_of_a_mechanism_are_a_row_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hex.obj");
    let args = [
        "export", "--format", "obj", "--out", out.to_str().unwrap(), "--pressures", "--block", "hex", "--bvp", "pipe",
        "--L", "3", "--resolution", "8,2,8",
    ];
    assert_eq!(code(&tia(&args)), 1);
}
