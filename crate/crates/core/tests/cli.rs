use std::fs;
use std::process::Command;

use oscillator_spectra::cli::load_spectrum;
use oscillator_spectra::model::PotentialDescriptor;

fn oscspec(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_oscspec")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn solve_writes_a_round_trippable_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) =
        oscspec(&["solve", "--potential", "harmonic", "--omega0", "1", "--levels", "3", "--out", out, "--trajectories"]);
    assert_eq!(code, 0);
    assert!(stdout.lines().count() >= 4);
    let doc = load_spectrum(&dir.path().join("spectrum.json")).unwrap();
    assert_eq!(doc.levels.len(), 3);
    for (n, level) in doc.levels.iter().enumerate() {
        assert_eq!(level.n, n);
        assert_eq!(level.nodes, n);
        assert!((level.energy - (n as f64 + 0.5)).abs() < 1e-8);
    }
    assert_eq!(doc.grid.n_points, 24001);
    let csv = fs::read_to_string(dir.path().join("level_002.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# rescale_exponent="));
    assert_eq!(lines.next().unwrap(), "x,psi,dpsi,omega_sq");
    assert_eq!(lines.count(), 24001);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "potential = harmonic\nomega0 = 5\nlevels = 2\nxmin = -6\nxmax = 6\npoints = 6001\n").unwrap();
    let out = dir.path().join("out");
    let (code, _, _) =
        oscspec(&["solve", "--config", cfg.to_str().unwrap(), "--omega0", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc = load_spectrum(&out.join("spectrum.json")).unwrap();
    assert_eq!(doc.potential, PotentialDescriptor::Harmonic { omega0: 2.0 });
    assert_eq!(doc.levels.len(), 2);
    assert!((doc.levels[1].energy - 3.0).abs() < 1e-8);
}

#[test]
fn well_uses_its_own_interval() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = oscspec(&[
        "solve",
        "--potential",
        "well",
        "--well-width",
        "3.141592653589793",
        "--levels",
        "4",
        "--points",
        "8001",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc = load_spectrum(&dir.path().join("spectrum.json")).unwrap();
    assert_eq!(doc.grid.x_min, 0.0);
    for (level, e) in doc.levels.iter().zip([0.5, 2.0, 4.5, 8.0]) {
        assert!((level.energy - e).abs() < 1e-7);
    }
}

#[test]
fn tabulated_potential_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("v.csv");
    let mut text = String::from("x,V\n");
    for k in 0..=160 {
        let x = -8.0 + 0.1 * k as f64;
        text += &format!("{x},{}\n", 0.5 * x * x);
    }
    fs::write(&table, text).unwrap();
    let (code, stdout, stderr) =
        oscspec(&["solve", "--potential", "tabulated", "--file", table.to_str().unwrap(), "--levels", "2", "--points", "8001"]);
    assert_eq!(code, 0, "{stderr}");
    let energies: Vec<f64> =
        stdout.lines().skip(1).map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    assert!((energies[0] - 0.5).abs() < 1e-4 && (energies[1] - 1.5).abs() < 1e-4, "{energies:?}");
}

#[test]
fn sweep_csv() {
    let (code, stdout, _) = oscspec(&[
        "sweep", "--potential", "harmonic", "--omega0", "1", "--emin", "0.1", "--emax", "3", "--samples", "30", "--points",
        "4001",
    ]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "E,mismatch,node_count,level_count,error");
    assert_eq!(lines.count(), 30);
}

#[test]
fn verify_report_and_strict_paper_mode() {
    let (code, stdout, _) = oscspec(&["verify", "--omega0", "1", "--points", "8001"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "n,E,residual_faithful,residual_paper,turning_left,turning_right");
    assert_eq!(lines.len(), 7);
    let (code, _, _) = oscspec(&["verify", "--omega0", "1", "--convention", "paper", "--points", "8001"]);
    assert_eq!(code, 2);
}

#[test]
fn trajectory_reports_growth() {
    let (code, stdout, _) = oscspec(&[
        "trajectory", "--potential", "harmonic", "--omega0", "1", "--energy", "1.0", "--xmin", "-6", "--xmax", "6",
        "--points", "1201",
    ]);
    assert_eq!(code, 0);
    let growth_line = stdout.lines().find(|l| l.starts_with("# boundary_growth=")).unwrap();
    let growth: f64 = growth_line.trim_start_matches("# boundary_growth=").parse().unwrap();
    assert!(growth > 1e3);
    assert!(stdout.contains("x,psi,dpsi,omega_sq"));
}

#[test]
fn usage_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["solve", "--potential", "harmonic", "--omega0", "1", "--levels", "0"],
        &["solve", "--potential", "harmonic"],
        &["solve", "--potential", "harmonic", "--omega0", "1", "--convention", "other"],
        &["sweep", "--potential", "harmonic", "--omega0", "1", "--emin", "3", "--emax", "1"],
        &["verify"],
        &["trajectory", "--potential", "harmonic", "--omega0", "1"],
        &["trajectory", "--potential", "harmonic", "--omega0", "1", "--energy", "500"],
        &["solve", "--potential", "tabulated", "--file", "/nonexistent/v.csv"],
        &["solve", "--unknown-flag"],
        &["solve", "--config", "/nonexistent/run.cfg"],
    ];
    for args in cases {
        let (code, _, stderr) = oscspec(args);
        assert_eq!(code, 1, "{args:?}: {stderr}");
        assert!(!stderr.is_empty());
    }
}
