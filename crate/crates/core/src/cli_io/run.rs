//! Executes configs and named experiments, writes their outputs and maps
//! outcomes to process exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::{Diagnostic, RunConfig, SolverKind};
use super::output;
use crate::diagnostics::{
    backward_cone_meets, check_dissipation, detect_singularities, dissipation_tolerance, entropy_residual,
    seeded_test_bank, summarize_entropy, verify_cone_condition, weak_residual, DetectorConfig,
};
use crate::error::{Error, Result};
use crate::experiments::{
    run_limit_study, run_scenario, write_comparison, write_figure, ExperimentSpec, FigureOptions, LimitStudy,
    Scenario,
};
use crate::solvers::{solve_characteristic_split, solve_dalembert_picard, solve_leapfrog, SolutionRecord, SolveOptions};

/// Environment variable that relocates relative output paths.
pub const OUTPUT_ROOT_ENV: &str = "ADHESTRING_OUT";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Io = 1,
    /// Malformed or invalid config, unknown scenario, unreadable data file.
    Config = 2,
    /// Non-finite values, or the Picard iteration failed to settle.
    Solver = 3,
    /// A run finished but an asserted diagnostic failed.
    Diagnostic = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

impl From<&Error> for ExitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io { .. } => ExitStatus::Io,
            Error::Blowup { .. } | Error::IterationLimit { .. } => ExitStatus::Solver,
            Error::Resolution(_) => ExitStatus::Diagnostic,
            Error::ParameterDomain(_)
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Parse { .. }
            | Error::UnknownScenario(_)
            | Error::Data { .. } => ExitStatus::Config,
        }
    }
}

/// Resolves `path` against `$ADHESTRING_OUT` when it is set; absolute
/// paths are left alone.
pub fn output_root(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => Path::new(&root).join(path),
        _ => path.to_path_buf(),
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// Human-readable result lines, also written to `report.txt`.
    pub lines: Vec<String>,
    /// Names of asserted diagnostics that failed.
    pub failures: Vec<String>,
}

impl RunSummary {
    pub fn status(&self) -> ExitStatus {
        if self.failures.is_empty() {
            ExitStatus::Success
        } else {
            ExitStatus::Diagnostic
        }
    }
}

fn solve(config: &RunConfig, stride: usize) -> Result<SolutionRecord<f64>> {
    let grid = config.grid()?;
    let ic = config.ic.build(config.length)?;
    let opts = SolveOptions { stride, source_rule: config.source, split_step: config.split_step };
    match config.solver {
        SolverKind::Leapfrog => solve_leapfrog(&grid, &config.potential, &ic, &opts),
        SolverKind::CharSplit => solve_characteristic_split(&grid, &config.potential, &ic, &opts),
        SolverKind::Picard => {
            solve_dalembert_picard(&grid, &config.potential, &ic, config.final_time, config.picard_iters, &opts)
        }
    }
}

/// Solves `config`, evaluates its diagnostics and writes everything under
/// the resolved output directory.
///
/// Only the dissipation check is asserted; the other diagnostics are
/// measurements and only reported.
pub fn execute(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let dir = output_root(&config.output);
    let d = &config.diagnostics;
    let wants = |k: Diagnostic| d.contains(&k);
    let detect = wants(Diagnostic::Singularities) || wants(Diagnostic::Cone);
    // space-time diagnostics need every level
    let full = detect || wants(Diagnostic::Entropy) || wants(Diagnostic::Weak);
    let record = solve(config, if full { 1 } else { config.stride })?;

    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    output::write_text(&config.serialize(), &dir.join("config.txt"))?;
    let every = if full { config.stride } else { 1 };
    output::write_field_snapshots(&record, every, &dir.join("fields.csv"))?;

    let mut lines = vec![format!("ic: {}", record.ic)];
    let mut failures = Vec::new();
    let mut residuals: Vec<(String, f64)> = Vec::new();
    let e0 = record.energy_series[0].total;
    let e_end = record.energy_series.last().map_or(e0, |e| e.total);
    lines.push(format!("energy: initial {e0:.10e}, final {e_end:.10e}"));

    if wants(Diagnostic::Energy) {
        output::write_energy(&record.energy_series, &dir.join("energy.csv"))?;
    }
    if wants(Diagnostic::Dissipation) {
        let rep = check_dissipation(&record, dissipation_tolerance(&record));
        lines.push(format!(
            "dissipation: {} (max increase {:.6e}, tolerance {:.6e})",
            if rep.passed() { "pass" } else { "fail" },
            rep.max_increase,
            rep.tolerance
        ));
        residuals.push(("energy_max_increase".into(), rep.max_increase));
        if !rep.passed() {
            failures.push("dissipation".into());
        }
    }
    let map = if detect {
        let cfg = DetectorConfig { jump_factor: config.jump_factor, kink_factor: config.kink_factor, ..Default::default() };
        let map = detect_singularities(&record, &cfg);
        output::write_singularities(&map, &dir.join("singularities.csv"))?;
        lines.push(format!("singularities: {} points, {} segments", map.points.len(), map.segments.len()));
        Some(map)
    } else {
        None
    };
    if let (true, Some(map)) = (wants(Diagnostic::Cone), &map) {
        let ic = config.ic.build(config.length)?;
        let kinks = ic.singular_points();
        let dx = record.dx();
        let mut reports = Vec::new();
        for p in &map.points {
            let inherited = backward_cone_meets(&kinks, config.length, p.t, p.x, 2.0 * dx);
            match verify_cone_condition(&record, p.t, p.x, 10.0 * dx) {
                Ok(r) => reports.push((r, inherited)),
                Err(Error::Resolution(_)) => {}
                Err(e) => return Err(e),
            }
        }
        output::write_cone_reports(&reports, &dir.join("cone_reports.csv"))?;
        let checked: Vec<_> = reports.iter().filter(|(_, inh)| !inh).collect();
        let ok = checked.iter().filter(|(r, _)| r.both()).count();
        lines.push(format!("cone: {ok} of {} points away from data kinks see both sides of the threshold", checked.len()));
        residuals.push(("cone_fraction_satisfied".into(), if checked.is_empty() { 1.0 } else { ok as f64 / checked.len() as f64 }));
    }
    if wants(Diagnostic::Entropy) {
        let res = entropy_residual(&record, &config.potential)?;
        let s = summarize_entropy(&res, map.as_ref(), 3);
        lines.push(format!("entropy: max |R| away from singularities {:.6e}", s.max_abs_smooth));
        residuals.push(("entropy_max_abs_smooth".into(), s.max_abs_smooth));
        residuals.push(("entropy_positive_part".into(), s.positive_part));
        residuals.push(("entropy_negative_part".into(), s.negative_part));
    }
    if wants(Diagnostic::Weak) {
        let bank = seeded_test_bank(config.seed, config.bank_size, config.final_time, config.length);
        let worst = weak_residual(&record, &config.potential, &bank)
            .iter()
            .map(|r| r.relative())
            .fold(0.0f64, f64::max);
        lines.push(format!("weak: max relative residual {worst:.6e} over {} bumps", bank.len()));
        residuals.push(("weak_max_relative".into(), worst));
    }
    if !residuals.is_empty() {
        output::write_residual_summary(&residuals, &dir.join("residual_summary.csv"))?;
    }
    let mut report = lines.join("\n");
    report.push('\n');
    output::write_text(&report, &dir.join("report.txt"))?;
    Ok(RunSummary { output_dir: dir, lines, failures })
}

/// [`execute`] reduced to an exit status, printing results to stdout and
/// errors to stderr.
pub fn run(config: &RunConfig) -> ExitStatus {
    match execute(config) {
        Ok(s) => {
            for l in &s.lines {
                println!("{l}");
            }
            println!("output: {}", s.output_dir.display());
            s.status()
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::from(&e)
        }
    }
}

/// Outcome of one named experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub name: String,
    pub output_dir: PathBuf,
    pub passed: bool,
    pub summary: String,
}

fn limit_study_defaults(study: LimitStudy) -> (Vec<f64>, f64) {
    match study {
        LimitStudy::Regularization => (vec![0.1, 0.01, 0.001], 5.0),
        LimitStudy::InitialData => (vec![0.1, 0.05, 0.01], 5.0),
        LimitStudy::NoncontinuousDependence => (vec![0.1, 0.05, 0.01], 20.0),
    }
}

/// Runs one scenario or limit study into `root/<name>`.
pub fn run_named_experiment(name: &str, root: &Path) -> Result<ExperimentOutcome> {
    let dir = root.join(name);
    if let Ok(scenario) = name.parse::<Scenario>() {
        let run = run_scenario(scenario, &FigureOptions::default())?;
        write_figure(&run, &dir)?;
        let failed: Vec<&str> = run.events.iter().filter(|e| !e.passed).map(|e| e.name).collect();
        let summary = format!(
            "dissipation {}, events {}",
            if run.dissipation.passed() { "pass" } else { "fail" },
            if failed.is_empty() { "pass".to_string() } else { format!("fail ({})", failed.join(", ")) }
        );
        return Ok(ExperimentOutcome { name: name.into(), output_dir: dir, passed: run.passed(), summary });
    }
    let study: LimitStudy = name.parse()?;
    let (eps, t) = limit_study_defaults(study);
    let report = run_limit_study(study, &ExperimentSpec::limit_study(study, eps, t))?;
    write_comparison(&report, &dir)?;
    let worst = report.entries.iter().map(|e| e.deviation_a.max(e.deviation_b)).fold(0.0f64, f64::max);
    let energy_ok = report.entries.iter().all(|e| {
        (e.energy_a - e.expected_energy_a).abs() <= 1e-9 * e.expected_energy_a.abs().max(1.0)
            && (e.energy_b - e.expected_energy_b).abs() <= 1e-9 * e.expected_energy_b.abs().max(1.0)
    });
    let passed = worst <= 1e-2 && energy_ok;
    let summary = format!("max deviation from closed forms {worst:.3e}, energies {}", if energy_ok { "match" } else { "differ" });
    Ok(ExperimentOutcome { name: name.into(), output_dir: dir, passed, summary })
}

/// Names listed in a manifest: one per line, `#` comments and blank lines skipped.
pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

/// `target` is a scenario/study name or a manifest file. Experiments run
/// in parallel, each in its own directory; outcomes come back in manifest order.
pub fn run_experiments(target: &str, root: &Path) -> Result<Vec<ExperimentOutcome>> {
    let path = Path::new(target);
    let names = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_manifest(&text)
    } else {
        vec![target.to_string()]
    };
    for n in &names {
        if n.parse::<Scenario>().is_err() && n.parse::<LimitStudy>().is_err() {
            return Err(Error::UnknownScenario(n.clone()));
        }
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = names.iter().map(|n| s.spawn(move || run_named_experiment(n, root))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    })
}
