use std::path::Path;
use std::process::{Command, Output};

fn spinboson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinboson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

/// Data rows of a CSV, skipping comments and the column header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn modes_for_three_ions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "chain.n_ions = 3\n");
    let out = dir.path().join("out");
    let res = spinboson(&["modes", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let text = std::fs::read_to_string(out.join("modes.csv")).unwrap();
    assert!(text.starts_with("# spinboson format_version=1\n"));
    assert!(text.contains("# chain.n_ions=3\n"));
    assert!(text.lines().any(|l| l == "n,omega,m_at_ion"));
    let r = rows(&out.join("modes.csv"));
    assert_eq!(r.len(), 3);
    let omega: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    for (w, exact) in omega.iter().zip([1.0, 3f64.sqrt(), (29.0f64 / 5.0).sqrt()]) {
        assert!((w - exact).abs() < 1e-10);
    }
    assert!(out.join("manifest.txt").exists());
}

#[test]
fn single_ion_modes_and_jspec() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "chain.n_ions=1\n");
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert!(spinboson(&["modes", "--config", &cfg, "--out", out])
        .status
        .success());
    let r = rows(&Path::new(out).join("modes.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "1");
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[0][2].parse::<f64>().unwrap(), 1.0);

    let res = spinboson(&["jspec", "--config", &cfg, "--out", out]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("no intervals"));
}

#[test]
fn jspec_writes_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = spinboson(&["jspec", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert_eq!(rows(&out.join("jspec.csv")).len(), 49);
    let report = std::fs::read_to_string(out.join("jspec_fit.txt")).unwrap();
    assert!(report.starts_with("alpha="));
    assert!(report.contains(" exponent=") && report.contains(" window_lo="));
}

#[test]
fn evolve_without_tunneling_stays_polarized() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "chain.n_ions=10\nlaser.delta=0\nlaser.eta=0.3\nsolver.t_max=2\nsolver.h=0.01\n",
    );
    let out = dir.path().join("out");
    let res = spinboson(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let p = rows(&out.join("p_of_t.csv"));
    assert_eq!(p.len(), 201);
    assert!(p.iter().all(|r| r[1].parse::<f64>().unwrap() == 1.0));
    let k = std::fs::read_to_string(out.join("kernel.csv")).unwrap();
    assert!(k.lines().any(|l| l == "tau,K,Q1,Q2"));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("\nartifacts=p_of_t.csv,kernel.csv\n"));
    assert!(manifest.contains("\nsolver.h="));
}

#[test]
fn sweep_and_plan_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "chain.n_ions=24\nlaser.delta=3\nanalysis.alpha_grid=0.1,0.3,0.5\nanalysis.t_list=0,1\nanalysis.n_list=50\n",
    );
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert!(spinboson(&["sweep", "--config", &cfg, "--out", out])
        .status
        .success());
    let sweep = rows(&Path::new(out).join("sweep.csv"));
    assert_eq!(sweep.len(), 6);
    assert_eq!(sweep[0][3], "coherent");

    let cfg = write_config(dir.path(), "analysis.alpha_grid=1\nanalysis.n_list=50\n");
    assert!(spinboson(&["plan", "--config", &cfg, "--out", out])
        .status
        .success());
    let plan = rows(&Path::new(out).join("plan.csv"));
    assert_eq!(plan.len(), 1);
    assert_eq!(plan[0][2], "50");
    let ratio: f64 = plan[0][1].parse().unwrap();
    let khz: f64 = plan[0][3].parse().unwrap();
    assert_eq!(khz, ratio * 245.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "chain.n_ions=20\nlaser.delta=2\nlaser.alpha_target=0.2\nbath.temperature=1\n",
    );
    let mut outputs = Vec::new();
    // same output directory: it is part of the echoed configuration
    let out = dir.path().join("out");
    for threads in ["1", "3"] {
        let _ = std::fs::remove_dir_all(&out);
        let res = spinboson(&[
            "evolve",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(res.status.success());
        outputs.push(std::fs::read(out.join("p_of_t.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("chain.n_ion=5\n", "chain.n_ion"),
        ("laser.delta=fast\n", "laser.delta"),
        (
            "chain.n_ions=4\nchain.addressed_index=9\n",
            "chain.addressed_index",
        ),
    ] {
        let cfg = write_config(dir.path(), text);
        let res = spinboson(&[
            "modes",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(!res.status.success());
        let err = String::from_utf8_lossy(&res.stderr);
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn unknown_figure_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = spinboson(&["figure", "7", "--out", dir.path().to_str().unwrap()]);
    assert!(!res.status.success());
}

#[test]
fn figure_two_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2");
    let res = spinboson(&["figure", "2", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert_eq!(rows(&out.join("modes/modes.csv")).len(), 50);
    assert!(out.join("travelling_wave/jspec.csv").exists());
    assert!(out.join("standing_wave_linear/jspec.csv").exists());
}
