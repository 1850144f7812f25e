//! Scripted runs: the spatially uniform limit studies that exhibit
//! non-uniqueness and non-continuous dependence, the ODE-reducible
//! regularity example, and the seven figure scenarios.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::cli_io::output;
use crate::diagnostics::{
    check_dissipation, detect_singularities, dissipation_tolerance, energy, CharacteristicMap, DetectorConfig,
    DissipationReport,
};
use crate::error::{Error, Result};
use crate::initial_conditions::{IcFamily, InitialCondition};
use crate::potentials::PotentialSpec;
use crate::scalar::{sup_distance, trapezoid};
use crate::solvers::{solve_leapfrog, Grid1D, SolutionRecord, SolveOptions, WaveState};

/// Which uniform-data construction a limit study reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitStudy {
    /// Same data `u ≡ 1`, two regularizations (`Tilde` vs `Bar`) with different limits.
    Regularization,
    /// One regularization (`Quad`), data `1 ∓ ε` converging to the same limit data.
    InitialData,
    /// Exact potential, data `(1 + ε, ε)` vs `(1 - ε, 0)`.
    NoncontinuousDependence,
}

impl LimitStudy {
    pub const ALL: [LimitStudy; 3] =
        [LimitStudy::Regularization, LimitStudy::InitialData, LimitStudy::NoncontinuousDependence];

    pub fn name(&self) -> &'static str {
        match self {
            LimitStudy::Regularization => "nonuniqueness_regularization",
            LimitStudy::InitialData => "nonuniqueness_initialdata",
            LimitStudy::NoncontinuousDependence => "noncontinuous_dependence",
        }
    }

    pub fn potentials(&self, eps: f64) -> (PotentialSpec<f64>, PotentialSpec<f64>) {
        match self {
            LimitStudy::Regularization => (PotentialSpec::Tilde(eps), PotentialSpec::Bar(eps)),
            LimitStudy::InitialData => (PotentialSpec::Quad(eps), PotentialSpec::Quad(eps)),
            LimitStudy::NoncontinuousDependence => (PotentialSpec::Exact, PotentialSpec::Exact),
        }
    }

    /// `(u0, u1)` constants of the two runs.
    pub fn data(&self, eps: f64) -> ((f64, f64), (f64, f64)) {
        match self {
            LimitStudy::Regularization => ((1.0, 0.0), (1.0, 0.0)),
            LimitStudy::InitialData => ((1.0 - eps, 0.0), (1.0 + eps, 0.0)),
            LimitStudy::NoncontinuousDependence => ((1.0 + eps, eps), (1.0 - eps, 0.0)),
        }
    }

    /// Closed-form displacement of run A and run B.
    pub fn exact(&self, eps: f64, t: f64) -> (f64, f64) {
        let r2 = 2f64.sqrt();
        match self {
            LimitStudy::Regularization => (1.0, (r2 * t).cos()),
            LimitStudy::InitialData => ((1.0 - eps) * ((2.0 - eps).sqrt() * t).cos(), 1.0 + eps),
            LimitStudy::NoncontinuousDependence => (eps * t + 1.0 + eps, (1.0 - eps) * (r2 * t).cos()),
        }
    }

    /// The `ε → 0` limits of [`Self::exact`].
    pub fn limit(&self, t: f64) -> (f64, f64) {
        self.exact(0.0, t)
    }

    /// Closed-form energies of run A and run B per unit length.
    pub fn energy_density(&self, eps: f64) -> (f64, f64) {
        match self {
            LimitStudy::Regularization => (1.0 + eps * eps - eps, 1.0),
            LimitStudy::InitialData => ((2.0 - eps) * (1.0 - eps).powi(2) / 2.0, (2.0 - eps) * (1.0 + eps) / 2.0),
            LimitStudy::NoncontinuousDependence => (1.0 + eps * eps / 2.0, (1.0 - eps).powi(2)),
        }
    }
}

impl fmt::Display for LimitStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LimitStudy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LimitStudy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Grid and parameter sweep of a limit study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub length: f64,
    pub nx: usize,
    pub courant: f64,
    pub final_time: f64,
    pub epsilon_sequence: Vec<f64>,
    /// Where [`write_comparison`] puts its files, if anywhere.
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Uniform solutions carry no spatial structure, so a coarse mesh with
    /// a small Courant number (`dt = 0.01`) is all the accuracy needs.
    pub fn limit_study(study: LimitStudy, epsilon_sequence: Vec<f64>, final_time: f64) -> Self {
        Self {
            name: study.name().to_string(),
            length: 10.0,
            nx: 101,
            courant: 0.1,
            final_time,
            epsilon_sequence,
            output: None,
        }
    }

    pub fn grid(&self) -> Result<Grid1D<f64>> {
        Grid1D::new(self.length, self.nx, self.courant, self.final_time)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        let eps = &self.epsilon_sequence;
        if eps.is_empty() {
            return Err(Error::Config("epsilon sequence is empty".into()));
        }
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 0.5)) {
            return Err(Error::ParameterDomain(format!("epsilon {e} outside (0, 0.5]")));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("epsilon sequence must be strictly decreasing".into()));
        }
        Ok(())
    }
}

/// Results for one `ε`. Deviations are sup norms over all nodes and levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEntry {
    pub epsilon: f64,
    /// Distance between runs A and B.
    pub sup_distance: f64,
    /// Each run against its closed form.
    pub deviation_a: f64,
    pub deviation_b: f64,
    /// Each run against the RK4 integration of the reduced ODE.
    pub oracle_deviation_a: f64,
    pub oracle_deviation_b: f64,
    /// Discrete initial energies and the closed-form values.
    pub energy_a: f64,
    pub energy_b: f64,
    pub expected_energy_a: f64,
    pub expected_energy_b: f64,
    /// Larger of the two runs' distances to the `ε → 0` limits.
    pub limit_distance: f64,
    /// `‖Δu0‖_{L²} + ‖Δu1‖_{L²}` between the two runs' data.
    pub initial_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub study: LimitStudy,
    pub entries: Vec<LimitEntry>,
    /// Run distance linearly extrapolated to `ε = 0` from the last two entries.
    pub extrapolated_limit_distance: f64,
    /// `energy_a - energy_b` per entry.
    pub energy_gap_series: Vec<f64>,
}

impl ComparisonReport {
    /// Whether `limit_distance` never grows after the first two entries,
    /// allowing `floor` of scheme error.
    pub fn limit_distance_monotone(&self, floor: f64) -> bool {
        let d: Vec<f64> = self.entries.iter().map(|e| e.limit_distance).collect();
        d.windows(2).skip(1).all(|w| w[1] <= w[0] + floor)
    }
}

/// Integrates `u'' = -Φ'(u)` with classical RK4 at step `dt / substeps`,
/// returning `u` at the `nt + 1` levels `k·dt`.
pub fn integrate_uniform_ode(
    potential: &PotentialSpec<f64>,
    u0: f64,
    u1: f64,
    dt: f64,
    nt: usize,
    substeps: usize,
) -> Vec<f64> {
    let h = dt / substeps as f64;
    let f = |u: f64, v: f64| (v, -potential.phi_prime(u));
    let (mut u, mut v) = (u0, u1);
    let mut out = Vec::with_capacity(nt + 1);
    out.push(u);
    for _ in 0..nt {
        for _ in 0..substeps {
            let k1 = f(u, v);
            let k2 = f(u + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
            let k3 = f(u + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
            let k4 = f(u + h * k3.0, v + h * k3.1);
            u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        out.push(u);
    }
    out
}

fn uniform_run(grid: &Grid1D<f64>, potential: PotentialSpec<f64>, data: (f64, f64)) -> Result<SolutionRecord<f64>> {
    let ic = InitialCondition::new(IcFamily::Uniform { u0: data.0, u1: data.1 }, grid.length)?;
    solve_leapfrog(grid, &potential, &ic, &SolveOptions::default())
}

/// Sup over levels and nodes of `|u - reference(level)|`.
fn deviation(record: &SolutionRecord<f64>, reference: impl Fn(usize, f64) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for (k, s) in record.snapshots.iter().enumerate() {
        let r = reference(k, s.t);
        worst = s.u.iter().fold(worst, |m, &u| m.max((u - r).abs()));
    }
    worst
}

fn l2_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    trapezoid(&sq, dx).sqrt()
}

/// Runs both constructions of `study` for every `ε` of `spec`.
pub fn run_limit_study(study: LimitStudy, spec: &ExperimentSpec) -> Result<ComparisonReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    let (dt, nt) = (grid.dt(), grid.nt());
    let mut entries = Vec::with_capacity(spec.epsilon_sequence.len());
    for &eps in &spec.epsilon_sequence {
        let (pa, pb) = study.potentials(eps);
        let (da, db) = study.data(eps);
        let ra = uniform_run(&grid, pa, da)?;
        let rb = uniform_run(&grid, pb, db)?;
        let oa = integrate_uniform_ode(&pa, da.0, da.1, dt, nt, 100);
        let ob = integrate_uniform_ode(&pb, db.0, db.1, dt, nt, 100);

        let mut sup = 0.0f64;
        for (sa, sb) in ra.snapshots.iter().zip(&rb.snapshots) {
            sup = sup.max(sup_distance(&sa.u, &sb.u));
        }
        let limit_distance = deviation(&ra, |_, t| study.limit(t).0).max(deviation(&rb, |_, t| study.limit(t).1));
        let (ea, eb) = study.energy_density(eps);
        let (s0a, s0b) = (&ra.snapshots[0], &rb.snapshots[0]);
        let dx = grid.dx();
        entries.push(LimitEntry {
            epsilon: eps,
            sup_distance: sup,
            deviation_a: deviation(&ra, |_, t| study.exact(eps, t).0),
            deviation_b: deviation(&rb, |_, t| study.exact(eps, t).1),
            oracle_deviation_a: deviation(&ra, |k, _| oa[k]),
            oracle_deviation_b: deviation(&rb, |k, _| ob[k]),
            energy_a: ra.energy_series[0].total,
            energy_b: rb.energy_series[0].total,
            expected_energy_a: ea * grid.length,
            expected_energy_b: eb * grid.length,
            limit_distance,
            initial_distance: l2_distance(&s0a.u, &s0b.u, dx) + l2_distance(&s0a.v, &s0b.v, dx),
        });
    }
    let extrapolated_limit_distance = match entries.as_slice() {
        [.., p, q] => q.sup_distance - q.epsilon * (p.sup_distance - q.sup_distance) / (p.epsilon - q.epsilon),
        [q] => q.sup_distance,
        [] => unreachable!("validated non-empty"),
    };
    let energy_gap_series = entries.iter().map(|e| e.energy_a - e.energy_b).collect();
    Ok(ComparisonReport { study, entries, extrapolated_limit_distance, energy_gap_series })
}

pub fn run_nonuniqueness_regularization(eps_sequence: &[f64], final_time: f64) -> Result<ComparisonReport> {
    let study = LimitStudy::Regularization;
    run_limit_study(study, &ExperimentSpec::limit_study(study, eps_sequence.to_vec(), final_time))
}

pub fn run_nonuniqueness_initialdata(eps_sequence: &[f64], final_time: f64) -> Result<ComparisonReport> {
    let study = LimitStudy::InitialData;
    run_limit_study(study, &ExperimentSpec::limit_study(study, eps_sequence.to_vec(), final_time))
}

pub fn run_noncontinuous_dependence(eps_sequence: &[f64], final_time: f64) -> Result<ComparisonReport> {
    let study = LimitStudy::NoncontinuousDependence;
    run_limit_study(study, &ExperimentSpec::limit_study(study, eps_sequence.to_vec(), final_time))
}

/// `report.txt` and `comparison.csv` for a limit study.
pub fn write_comparison(report: &ComparisonReport, dir: &Path) -> Result<()> {
    let mut csv = String::from(
        "epsilon,sup_distance,deviation_a,deviation_b,oracle_deviation_a,oracle_deviation_b,\
         energy_a,expected_energy_a,energy_b,expected_energy_b,limit_distance,initial_distance\n",
    );
    for e in &report.entries {
        let row = [
            e.epsilon,
            e.sup_distance,
            e.deviation_a,
            e.deviation_b,
            e.oracle_deviation_a,
            e.oracle_deviation_b,
            e.energy_a,
            e.expected_energy_a,
            e.energy_b,
            e.expected_energy_b,
            e.limit_distance,
            e.initial_distance,
        ];
        csv += &row.map(output::fmt_f64).join(",");
        csv.push('\n');
    }
    output::write_text(&csv, &dir.join("comparison.csv"))?;
    let mut text = format!("study: {}\n", report.study);
    let _ = writeln!(text, "extrapolated_limit_distance: {:.6e}", report.extrapolated_limit_distance);
    let _ = writeln!(text, "limit_distance_monotone: {}", report.limit_distance_monotone(1e-3));
    for (e, gap) in report.entries.iter().zip(&report.energy_gap_series) {
        let _ = writeln!(
            text,
            "eps={:e} sup_distance={:.6e} deviation=({:.3e}, {:.3e}) energy_gap={:.6e}",
            e.epsilon, e.sup_distance, e.deviation_a, e.deviation_b, gap
        );
    }
    output::write_text(&text, &dir.join("report.txt"))
}

/// Closed-form `(u, v)` of the uniform run with zero data displacement,
/// unit-rate velocity 2 and the exact potential: bonded oscillation until
/// `u` reaches 1, free flight afterwards.
pub fn regularity_example_solution(t: f64) -> (f64, f64) {
    let r2 = 2f64.sqrt();
    let t_star = std::f64::consts::PI / (4.0 * r2);
    if t <= t_star {
        (r2 * (r2 * t).sin(), 2.0 * (r2 * t).cos())
    } else {
        (r2 * t + 1.0 - std::f64::consts::FRAC_PI_4, r2)
    }
}

/// Record of [`regularity_example_solution`] sampled on every level of `grid`.
pub fn regularity_example_record(grid: &Grid1D<f64>) -> Result<SolutionRecord<f64>> {
    grid.validate()?;
    let potential = PotentialSpec::Exact;
    let dx = grid.dx();
    let mut snapshots = Vec::with_capacity(grid.nt() + 1);
    let mut energy_series = Vec::with_capacity(grid.nt() + 1);
    for n in 0..=grid.nt() {
        let t = grid.time(n);
        let (u, v) = regularity_example_solution(t);
        let s = WaveState::new(t, vec![u; grid.nx], vec![v; grid.nx], dx);
        energy_series.push(energy(&s, &potential, dx));
        snapshots.push(s);
    }
    Ok(SolutionRecord {
        grid: *grid,
        potential,
        ic: "Uniform { u0: 0.0, u1: 2.0 }".into(),
        stride: 1,
        snapshots,
        energy_series,
    })
}

/// The figure scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fig2C2,
    Fig4C1V11,
    Fig6C1V14,
    Fig8C1Middle,
    Fig10C1Half,
    Fig12C1Double,
    Fig14Moll,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Fig2C2,
        Scenario::Fig4C1V11,
        Scenario::Fig6C1V14,
        Scenario::Fig8C1Middle,
        Scenario::Fig10C1Half,
        Scenario::Fig12C1Double,
        Scenario::Fig14Moll,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig2C2 => "fig2_c2",
            Scenario::Fig4C1V11 => "fig4_c1_v11",
            Scenario::Fig6C1V14 => "fig6_c1_v14",
            Scenario::Fig8C1Middle => "fig8_c1middle",
            Scenario::Fig10C1Half => "fig10_c1half",
            Scenario::Fig12C1Double => "fig12_c1double",
            Scenario::Fig14Moll => "fig14_moll",
        }
    }

    pub fn length(&self) -> f64 {
        10.0
    }

    pub fn final_time(&self) -> f64 {
        match self {
            Scenario::Fig2C2 => 10.0,
            _ => 3.0,
        }
    }

    pub fn default_xi1(&self) -> f64 {
        match self {
            Scenario::Fig2C2 => 1.2,
            Scenario::Fig4C1V11 => 1.1,
            Scenario::Fig6C1V14 | Scenario::Fig14Moll => 1.4,
            Scenario::Fig8C1Middle | Scenario::Fig10C1Half => -1.2,
            Scenario::Fig12C1Double => 0.8,
        }
    }

    /// Initial data, with `xi1` replacing the scenario's velocity amplitude.
    pub fn ic_family(&self, xi1: Option<f64>) -> IcFamily<f64> {
        let xi1 = xi1.unwrap_or(self.default_xi1());
        let a = 6.0;
        match self {
            Scenario::Fig2C2 => IcFamily::C2Cubic { xi0: 0.006, xi1 },
            Scenario::Fig4C1V11 | Scenario::Fig6C1V14 => IcFamily::C1Arc { xi0: 0.7, xi1, a },
            Scenario::Fig8C1Middle => IcFamily::C1ArcShiftMiddle { xi0: 0.7, xi1, a },
            Scenario::Fig10C1Half => IcFamily::C1ArcShiftHalf { xi0: 0.7, xi1, a },
            Scenario::Fig12C1Double => IcFamily::C1ArcVelocity { xi0: 0.7, xi1, a },
            Scenario::Fig14Moll => IcFamily::MollifiedQuadratic { xi0: 0.5, xi1, eta: 0.3 },
        }
    }

    pub fn initial_condition(&self, xi1: Option<f64>) -> Result<InitialCondition<f64>> {
        InitialCondition::new(self.ic_family(xi1), self.length())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Scenario names in manifest order, one per line.
pub fn default_manifest() -> String {
    Scenario::ALL.iter().map(|s| format!("{s}\n")).collect()
}

/// Discretization of a figure run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub nx: usize,
    pub courant: f64,
    pub xi1: Option<f64>,
    pub detector: DetectorConfig,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { nx: 1001, courant: 0.9, xi1: None, detector: DetectorConfig::default() }
    }
}

/// A qualitative event and whether the run shows it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct FigureRun {
    pub scenario: Scenario,
    pub ic: InitialCondition<f64>,
    pub record: SolutionRecord<f64>,
    pub map: CharacteristicMap<f64>,
    pub dissipation: DissipationReport<f64>,
    pub events: Vec<EventCheck>,
}

impl FigureRun {
    pub fn passed(&self) -> bool {
        self.dissipation.passed() && self.events.iter().all(|e| e.passed)
    }
}

/// Some node goes above 1 and later drops back below 1.
fn reentry_event(record: &SolutionRecord<f64>) -> EventCheck {
    let nx = record.grid.nx;
    let mut first_above: Vec<Option<f64>> = vec![None; nx];
    let mut reentry = None;
    let mut max_u = f64::NEG_INFINITY;
    'scan: for s in &record.snapshots {
        for (i, &u) in s.u.iter().enumerate() {
            max_u = max_u.max(u);
            match first_above[i] {
                None if u > 1.0 => first_above[i] = Some(s.t),
                Some(t_up) if u < 1.0 => {
                    reentry = Some((t_up, s.t, record.grid.x(i)));
                    break 'scan;
                }
                _ => {}
            }
        }
    }
    EventCheck {
        name: "debonding_reversed",
        passed: reentry.is_some(),
        detail: match reentry {
            Some((t_up, t_down, x)) => format!("x={x:.3} above 1 at t={t_up:.3}, below 1 again at t={t_down:.3}"),
            None => format!("no re-entry; max u = {max_u:.4}"),
        },
    }
}

fn qualitative_events(scenario: Scenario, record: &SolutionRecord<f64>, map: &CharacteristicMap<f64>) -> Vec<EventCheck> {
    let half = record.grid.length / 2.0;
    let from_middle = || map.segments_from(0.0, half, 0.1, 0.3, 0.5);
    match scenario {
        Scenario::Fig2C2 => {
            let max_u = record.snapshots.iter().flat_map(|s| &s.u).fold(f64::NEG_INFINITY, |m, &u| m.max(u));
            vec![
                EventCheck { name: "debonds_above", passed: max_u > 1.0, detail: format!("max u = {max_u:.4}") },
                reentry_event(record),
            ]
        }
        Scenario::Fig8C1Middle => {
            let min_u = record.snapshots.iter().flat_map(|s| &s.u).fold(f64::INFINITY, |m, &u| m.min(u));
            vec![EventCheck { name: "debonds_below", passed: min_u < -1.0, detail: format!("min u = {min_u:.4}") }]
        }
        Scenario::Fig10C1Half => {
            // Complete debonding: the whole string beyond the threshold at once.
            let worst = record
                .snapshots
                .iter()
                .map(|s| s.u.iter().fold(f64::INFINITY, |m, &u| m.min(u.abs())))
                .fold(0.0f64, f64::max);
            vec![
                EventCheck {
                    name: "no_complete_debonding",
                    passed: worst <= 1.05,
                    detail: format!("max_t min_x |u| = {worst:.4}"),
                },
                EventCheck {
                    name: "characteristic_segments",
                    passed: map.segments.len() >= 2,
                    detail: format!("{} fitted segments", map.segments.len()),
                },
            ]
        }
        Scenario::Fig4C1V11 | Scenario::Fig6C1V14 => {
            let found = from_middle();
            vec![EventCheck {
                name: "characteristics_from_midpoint",
                passed: !found.is_empty(),
                detail: format!("{} segments of slope ±1 through (0, L/2)", found.len()),
            }]
        }
        Scenario::Fig12C1Double | Scenario::Fig14Moll => Vec::new(),
    }
}

/// Solves a scenario with the leapfrog scheme and runs the detector,
/// the dissipation check and the scenario's qualitative checks.
pub fn run_scenario(scenario: Scenario, opts: &FigureOptions) -> Result<FigureRun> {
    let ic = scenario.initial_condition(opts.xi1)?;
    let grid = Grid1D::new(scenario.length(), opts.nx, opts.courant, scenario.final_time())?;
    let potential = PotentialSpec::Exact;
    let record = solve_leapfrog(&grid, &potential, &ic, &SolveOptions::default())?;
    let map = detect_singularities(&record, &opts.detector);
    let dissipation = check_dissipation(&record, dissipation_tolerance(&record));
    let events = qualitative_events(scenario, &record, &map);
    Ok(FigureRun { scenario, ic, record, map, dissipation, events })
}

/// Writes `fields.csv` (every tenth snapshot), `energy.csv`,
/// `singularities.csv` and `report.txt` into `dir`.
pub fn write_figure(run: &FigureRun, dir: &Path) -> Result<()> {
    output::write_field_snapshots(&run.record, 10, &dir.join("fields.csv"))?;
    output::write_energy(&run.record.energy_series, &dir.join("energy.csv"))?;
    output::write_singularities(&run.map, &dir.join("singularities.csv"))?;
    let g = &run.record.grid;
    let d = &run.dissipation;
    let mut text = format!("scenario: {}\n", run.scenario);
    let _ = writeln!(text, "ic: {}", run.record.ic);
    let _ = writeln!(text, "grid: L={} nx={} courant={} T={} nt={}", g.length, g.nx, g.courant, g.final_time, g.nt());
    let _ = writeln!(
        text,
        "dissipation: {} (max increase {:.6e}, tolerance {:.6e}, E0 {:.6e})",
        if d.passed() { "pass" } else { "fail" },
        d.max_increase,
        d.tolerance,
        d.initial
    );
    let _ = writeln!(text, "singular points: {}, segments: {}", run.map.points.len(), run.map.segments.len());
    for e in &run.events {
        let _ = writeln!(text, "{}: {} ({})", e.name, if e.passed { "pass" } else { "fail" }, e.detail);
    }
    output::write_text(&text, &dir.join("report.txt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_matches_harmonic_oscillator() {
        let u = integrate_uniform_ode(&PotentialSpec::Exact, 0.5, 0.0, 0.01, 300, 10);
        let exact = 0.5 * (2f64.sqrt() * 3.0).cos();
        assert!((u[300] - exact).abs() < 1e-10);
    }

    #[test]
    fn regularity_solution_is_continuous_at_threshold() {
        let t_star = std::f64::consts::PI / (4.0 * 2f64.sqrt());
        let (a, va) = regularity_example_solution(t_star);
        let (b, vb) = regularity_example_solution(t_star + 1e-12);
        assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-11);
        assert!((va - vb).abs() < 1e-11);
    }

    #[test]
    fn epsilon_sequence_validation() {
        let s = |e: Vec<f64>| ExperimentSpec::limit_study(LimitStudy::Regularization, e, 1.0).validate();
        assert!(s(vec![0.1, 0.05]).is_ok());
        assert!(s(vec![0.05, 0.1]).is_err());
        assert!(s(vec![0.6]).is_err());
        assert!(s(vec![]).is_err());
    }

    #[test]
    fn initial_data_study_tracks_closed_forms() {
        let r = run_nonuniqueness_initialdata(&[0.05], 1.0).unwrap();
        let e = &r.entries[0];
        assert!(e.deviation_a < 1e-3 && e.deviation_b < 1e-12, "{e:?}");
        assert!((e.energy_b - 1.95 * 1.05 / 2.0 * 10.0).abs() < 1e-10);
        assert!((e.energy_a - e.expected_energy_a).abs() < 1e-10);
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("fig3".parse::<Scenario>().is_err());
        assert_eq!(default_manifest().lines().count(), 7);
    }
}
