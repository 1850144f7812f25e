use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn adhestring(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adhestring"))
        .args(args)
        .env("ADHESTRING_OUT", out_root)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn default_config_succeeds_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "output = default\n");
    let out = adhestring(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["fields.csv", "energy.csv", "report.txt", "config.txt"] {
        assert!(dir.path().join("default").join(f).is_file(), "{f}");
    }
}

#[test]
fn cfl_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "courant = 1.5\n");
    let out = adhestring(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(adhestring(&["check", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn unbounded_growth_is_not_blowup() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grow.cfg", "nx = 101\nic = uniform:1.1,0.1\nT = 20\noutput = grow\n");
    let out = adhestring(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_prints_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "potential = quad:0.05  # ramp\nic = uniform:0.95,0\n");
    let out = adhestring(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("potential = quad:0.05\n") && text.contains("ic = uniform:0.95,0\n"));
    let again = write_config(dir.path(), "c2.cfg", &text);
    assert_eq!(adhestring(&["check", &again], dir.path()).stdout, text.as_bytes());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let body = "nx = 201\nT = 2\nic = c1mid:0.7,-1.2,6\ndiagnostics = energy,dissipation,singularities,weak\n";
    let a = write_config(dir.path(), "a.cfg", &format!("{body}output = a\n"));
    let b = write_config(dir.path(), "b.cfg", &format!("{body}output = b\n"));
    assert_eq!(adhestring(&["run", &a], dir.path()).status.code(), Some(0));
    assert_eq!(adhestring(&["run", &b], dir.path()).status.code(), Some(0));
    for f in ["fields.csv", "energy.csv", "singularities.csv", "residual_summary.csv"] {
        let x = fs::read(dir.path().join("a").join(f)).unwrap();
        let y = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn experiment_by_name_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = adhestring(&["experiment", "fig8_c1middle"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["fields.csv", "energy.csv", "singularities.csv", "report.txt"] {
        assert!(dir.path().join("fig8_c1middle").join(f).is_file(), "{f}");
    }
    let manifest = write_config(dir.path(), "experiments.manifest", "noncontinuous_dependence\nfig10_c1half\n");
    let out = adhestring(&["experiment", &manifest], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("noncontinuous_dependence: pass"), "{stdout}");
    assert!(dir.path().join("noncontinuous_dependence/comparison.csv").is_file());
}

#[test]
fn unknown_experiment_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(adhestring(&["experiment", "fig3"], dir.path()).status.code(), Some(2));
}

#[test]
fn picard_and_charsplit_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "p.cfg", "solver = picard\nnx = 101\nT = 0.5\npotential = mollified:0.05\noutput = p\n");
    let c = write_config(dir.path(), "c.cfg", "solver = charsplit\nnx = 101\nT = 1\noutput = c\n");
    for cfg in [p, c] {
        let out = adhestring(&["run", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
