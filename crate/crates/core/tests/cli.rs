use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SLEIGH: &str = "model = sleigh\nintegrator = gni\nh = 0.01\nT = 1\nq0 = [0, 0, 0]\nv0 = [1, 0.5, 1]\n";

fn nhsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", SLEIGH);
    let out = nhsim(&["simulate", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,theta,x,y,v_theta,"));
    assert_eq!(text.lines().count(), 102);
    assert!(!text.contains('\r'));

    let csv = dir.path().join("run.csv");
    let out = nhsim(
        &["simulate", &cfg, "--out", csv.to_str().unwrap(), "--seed", "7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn config_out_key_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", &format!("{SLEIGH}out = from_config.csv\n"));
    let out = nhsim(&["simulate", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("from_config.csv").exists());
}

#[test]
fn zero_steps_writes_the_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", &SLEIGH.replace("T = 1", "N = 0"));
    let out = nhsim(&["simulate", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn converge_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", SLEIGH);
    let out = nhsim(
        &[
            "converge",
            &cfg,
            "--steps",
            "0.0025,0.005,0.01,0.02",
            "--oracle-refine",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,steps,error");
    assert!(lines[1].starts_with("2.0000000000000000e-2,"));
    assert!(lines[5].starts_with("# slope: 2.0"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("gni slope: 2.0"));
}

#[test]
fn compare_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", SLEIGH);
    let a = nhsim(&["compare", &cfg, "--oracle-refine", "10"], dir.path());
    let b = nhsim(&["compare", &cfg, "--oracle-refine", "10"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let header = String::from_utf8(a.stdout).unwrap().lines().next().unwrap().to_string();
    for group in [
        "gni_x",
        "rdp_x",
        "rk2_x",
        "oracle_x",
        "rk2_position_error",
        "gni_energy_error",
    ] {
        assert!(header.split(',').any(|c| c == group), "{group}");
    }
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "model = sleigh\nwhatever = 1\n");
    let out = nhsim(&["simulate", &bad], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2, column 1"));

    let inadmissible = write(
        dir.path(),
        "i.cfg",
        &SLEIGH.replace("v0 = [1, 0.5, 1]", "v0 = [1, 0.5, 0.9]"),
    );
    assert_eq!(nhsim(&["simulate", &inadmissible], dir.path()).status.code(), Some(2));
    assert_eq!(nhsim(&["simulate", "missing.cfg"], dir.path()).status.code(), Some(2));

    let cfg = write(dir.path(), "s.cfg", SLEIGH);
    let out = nhsim(&["converge", &cfg, "--steps", "0.02,0.01"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(nhsim(&["simulate"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3_after_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sb.cfg",
        "model = snakeboard\nh = 0.05\nN = 20\nr0 = [0, 0.5]\nu0 = [0, -1]\np0 = 0.3\n",
    );
    let csv = dir.path().join("partial.csv");
    let out = nhsim(&["simulate", &cfg, "--out", csv.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let text = fs::read_to_string(&csv).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("# error: at step"), "{last}");
    assert!(text.lines().count() > 2);
}
