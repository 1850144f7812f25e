//! `key = value` run configuration.
//!
//! ```text
//! # Example: uniform data 1 - ε under the quadratic-ramp regularization
//! potential = quad:0.05
//! ic = uniform:0.95,0
//! T = 5
//! ```

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::initial_conditions::{IcFamily, IcSpec};
use crate::potentials::PotentialSpec;
use crate::solvers::{Grid1D, SourceRule, SplitStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverKind {
    Leapfrog,
    CharSplit,
    Picard,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Leapfrog => "leapfrog",
            SolverKind::CharSplit => "charsplit",
            SolverKind::Picard => "picard",
        }
    }

    /// Courant number used when the config does not set one. The splitting
    /// scheme transports exactly only at 1.
    pub fn default_courant(&self) -> f64 {
        match self {
            SolverKind::CharSplit => 1.0,
            _ => 0.9,
        }
    }
}

/// Optional diagnostics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Diagnostic {
    /// Write `energy.csv`.
    Energy,
    /// Fail the run (exit 4) if energy grows beyond tolerance.
    Dissipation,
    /// Detect singular points and fit characteristic segments.
    Singularities,
    /// Cone condition at every detected point (implies detection).
    Cone,
    Entropy,
    /// Weak-form residuals on a seeded bank of bumps.
    Weak,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 6] = [
        Diagnostic::Energy,
        Diagnostic::Dissipation,
        Diagnostic::Singularities,
        Diagnostic::Cone,
        Diagnostic::Entropy,
        Diagnostic::Weak,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Diagnostic::Energy => "energy",
            Diagnostic::Dissipation => "dissipation",
            Diagnostic::Singularities => "singularities",
            Diagnostic::Cone => "cone",
            Diagnostic::Entropy => "entropy",
            Diagnostic::Weak => "weak",
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [SolverKind::Leapfrog, SolverKind::CharSplit, SolverKind::Picard]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown solver `{s}` (leapfrog, charsplit, picard)"))
    }
}

impl FromStr for Diagnostic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Diagnostic::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown diagnostic `{s}`"))
    }
}

fn source_rule_str(r: SourceRule) -> &'static str {
    match r {
        SourceRule::Nodal => "nodal",
        SourceRule::CrossingResolved => "resolved",
    }
}

fn split_step_str(s: SplitStep) -> &'static str {
    match s {
        SplitStep::Euler => "euler",
        SplitStep::Midpoint => "midpoint",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub length: f64,
    pub nx: usize,
    /// `None` means the solver's default.
    pub courant: Option<f64>,
    pub final_time: f64,
    pub potential: PotentialSpec<f64>,
    pub ic: IcSpec,
    pub solver: SolverKind,
    /// Snapshot stride of the written fields.
    pub stride: usize,
    pub diagnostics: BTreeSet<Diagnostic>,
    /// Seeds the weak-residual test bank.
    pub seed: u64,
    pub output: PathBuf,
    pub source: SourceRule,
    pub split_step: SplitStep,
    pub picard_iters: usize,
    pub bank_size: usize,
    pub jump_factor: f64,
    pub kink_factor: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            length: 10.0,
            nx: 1001,
            courant: None,
            final_time: 3.0,
            potential: PotentialSpec::Exact,
            ic: IcSpec::Family(IcFamily::C2Cubic { xi0: 0.006, xi1: 1.2 }),
            solver: SolverKind::Leapfrog,
            stride: 10,
            diagnostics: [Diagnostic::Energy, Diagnostic::Dissipation].into_iter().collect(),
            seed: 42,
            output: PathBuf::from("out/run"),
            source: SourceRule::CrossingResolved,
            split_step: SplitStep::Midpoint,
            picard_iters: 200,
            bank_size: 16,
            jump_factor: 8.0,
            kink_factor: 8.0,
        }
    }
}

const KEYS: [&str; 17] = [
    "L",
    "nx",
    "courant",
    "T",
    "potential",
    "ic",
    "solver",
    "stride",
    "diagnostics",
    "seed",
    "output",
    "source",
    "split_step",
    "picard_iters",
    "bank_size",
    "jump_factor",
    "kink_factor",
];

impl RunConfig {
    pub fn effective_courant(&self) -> f64 {
        self.courant.unwrap_or(self.solver.default_courant())
    }

    pub fn grid(&self) -> Result<Grid1D<f64>> {
        Grid1D::new(self.length, self.nx, self.effective_courant(), self.final_time)
    }

    /// Checks every field against its invariants; `line_of` maps a key to
    /// the line that set it (1 when unknown).
    fn validate_with(&self, line_of: &dyn Fn(&str) -> usize) -> Result<()> {
        let at = |key: &str, e: Error| Error::Parse { line: line_of(key), message: format!("{key}: {e}") };
        let positive = |key: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Parse { line: line_of(key), message: format!("{key} must be positive and finite, got {x}") })
            }
        };
        positive("L", self.length)?;
        positive("jump_factor", self.jump_factor)?;
        positive("kink_factor", self.kink_factor)?;
        if !(self.final_time.is_finite() && self.final_time >= 0.0) {
            return Err(Error::Parse { line: line_of("T"), message: format!("T must be non-negative, got {}", self.final_time) });
        }
        if let Some(c) = self.courant {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::Parse {
                    line: line_of("courant"),
                    message: format!("courant = {c} violates the CFL condition 0 < courant <= 1"),
                });
            }
        }
        if self.solver == SolverKind::CharSplit && self.effective_courant() != 1.0 {
            return Err(Error::Parse {
                line: line_of("courant"),
                message: "the charsplit solver needs courant = 1".into(),
            });
        }
        self.grid().map_err(|e| at("nx", e))?;
        self.potential.validate().map_err(|e| at("potential", e))?;
        if let IcSpec::Family(f) = &self.ic {
            crate::initial_conditions::InitialCondition::new(f.clone(), self.length).map_err(|e| at("ic", e))?;
        }
        for (key, n) in [("stride", self.stride), ("picard_iters", self.picard_iters), ("bank_size", self.bank_size)] {
            if n == 0 {
                return Err(Error::Parse { line: line_of(key), message: format!("{key} must be at least 1") });
            }
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::Parse { line: line_of("output"), message: "output must not be empty".into() });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(&|_| 1)
    }

    /// Canonical text: every key, in a fixed order; `courant` only when set.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("L", self.length.to_string());
        put("nx", self.nx.to_string());
        if let Some(c) = self.courant {
            put("courant", c.to_string());
        }
        put("T", self.final_time.to_string());
        put("potential", self.potential.to_string());
        put("ic", self.ic.to_string());
        put("solver", self.solver.as_str().into());
        put("stride", self.stride.to_string());
        put("diagnostics", self.diagnostics.iter().map(|d| d.as_str()).collect::<Vec<_>>().join(","));
        put("seed", self.seed.to_string());
        put("output", self.output.display().to_string());
        put("source", source_rule_str(self.source).into());
        put("split_step", split_step_str(self.split_step).into());
        put("picard_iters", self.picard_iters.to_string());
        put("bank_size", self.bank_size.to_string());
        put("jump_factor", self.jump_factor.to_string());
        put("kink_factor", self.kink_factor.to_string());
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn num<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("malformed value `{v}`: {e}"))
}

/// Parses and validates a config. Omitted keys take the defaults of
/// [`RunConfig::default`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<(&str, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let Some(key) = KEYS.iter().copied().find(|k| *k == key) else {
            return Err(err(format!("unknown key `{key}`")));
        };
        if let Some((_, first)) = seen.iter().find(|(k, _)| *k == key) {
            return Err(err(format!("duplicate key `{key}` (first set on line {first})")));
        }
        seen.push((key, line));
        let r: Result<(), String> = (|| {
            match key {
                "L" => cfg.length = num(value)?,
                "nx" => cfg.nx = num(value)?,
                "courant" => cfg.courant = Some(num(value)?),
                "T" => cfg.final_time = num(value)?,
                "potential" => cfg.potential = value.parse().map_err(|e: Error| e.to_string())?,
                "ic" => cfg.ic = IcSpec::parse(value).map_err(|e| e.to_string())?,
                "solver" => cfg.solver = value.parse()?,
                "stride" => cfg.stride = num(value)?,
                "diagnostics" => {
                    cfg.diagnostics = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_, String>>()?
                }
                "seed" => cfg.seed = num(value)?,
                "output" => cfg.output = PathBuf::from(value),
                "source" => {
                    cfg.source = match value {
                        "nodal" => SourceRule::Nodal,
                        "resolved" => SourceRule::CrossingResolved,
                        _ => return Err(format!("unknown source rule `{value}` (nodal, resolved)")),
                    }
                }
                "split_step" => {
                    cfg.split_step = match value {
                        "euler" => SplitStep::Euler,
                        "midpoint" => SplitStep::Midpoint,
                        _ => return Err(format!("unknown split step `{value}` (euler, midpoint)")),
                    }
                }
                "picard_iters" => cfg.picard_iters = num(value)?,
                "bank_size" => cfg.bank_size = num(value)?,
                "jump_factor" => cfg.jump_factor = num(value)?,
                "kink_factor" => cfg.kink_factor = num(value)?,
                _ => unreachable!("key list and match arms agree"),
            }
            Ok(())
        })();
        r.map_err(err)?;
    }
    let line_of = |key: &str| seen.iter().find(|(k, _)| *k == key).map_or(1, |(_, l)| *l);
    cfg.validate_with(&line_of)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.length, 10.0);
        assert_eq!(c.effective_courant(), 0.9);
        assert_eq!((c.nx, c.final_time, c.stride, c.seed), (1001, 3.0, 10, 42));
    }

    #[test]
    fn cfl_violation_reports_line() {
        match parse_config("# header\nnx = 201\ncourant = 1.5\n") {
            Err(Error::Parse { line: 3, message }) => assert!(message.contains("CFL")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quadratic_ramp_example() {
        let c = parse_config("potential = quad:0.05\nic = uniform:0.95,0 # data 1 - eps\n").unwrap();
        assert_eq!(c.potential, PotentialSpec::Quad(0.05));
        assert_eq!(c.ic, IcSpec::Family(IcFamily::Uniform { u0: 0.95, u1: 0.0 }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |text: &str| match parse_config(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("L = 10\nfoo = 1\n"), 2);
        assert_eq!(line("\n\nnx = ten\n"), 3);
        assert_eq!(line("nx = 101\nnx = 201\n"), 2);
        assert_eq!(line("solver = charsplit\ncourant = 0.5\n"), 2);
        assert_eq!(line("potential = quad:3\n"), 1);
        assert_eq!(line("L = 10\nic = c1:0.7,1.1,4\n"), 2);
        assert_eq!(line("no equals sign"), 1);
    }

    #[test]
    fn charsplit_defaults_to_unit_courant() {
        let c = parse_config("solver = charsplit").unwrap();
        assert_eq!(c.effective_courant(), 1.0);
        assert_eq!(c.courant, None);
    }

    #[test]
    fn canonical_form_round_trips() {
        let mut c = RunConfig::default();
        c.courant = Some(0.75);
        c.ic = IcSpec::File(PathBuf::from("data/ic.csv"));
        c.diagnostics = Diagnostic::ALL.into_iter().collect();
        let text = c.serialize();
        assert_eq!(parse_config(&text).unwrap(), c);
        assert_eq!(parse_config(&text).unwrap().serialize(), text);
    }
}
