//! Time integrators for the adhesive string with Neumann ends.
//!
//! * [`solve_leapfrog`]: three-level explicit scheme, the workhorse.
//! * [`solve_characteristic_split`]: exact transport of the first-order
//!   system on the periodic extension, split with the source ODE.
//! * [`solve_dalembert_picard`]: fixed point of the d'Alembert/Duhamel
//!   representation, used as an independent oracle on short times.

mod charsplit;
mod extension;
mod leapfrog;
mod picard;

pub use charsplit::{solve_characteristic_split, CharSplitSolver};
pub use extension::{extend_even_periodic, extend_odd_periodic, restrict_periodic, PeriodicAntiderivative};
pub use leapfrog::solve_leapfrog;
pub use picard::{picard_iterate, solve_dalembert_picard, PicardOutcome};

use crate::diagnostics::energy::{energy, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::scalar::Real;

/// Uniform discretization of `[0, L] × [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<F> {
    pub length: F,
    /// Number of nodes, both ends included.
    pub nx: usize,
    /// `λ = dt / dx`.
    pub courant: F,
    pub final_time: F,
}

impl<F: Real> Grid1D<F> {
    pub fn new(length: F, nx: usize, courant: F, final_time: F) -> Result<Self> {
        let g = Self { length, nx, courant, final_time };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 {
            return Err(Error::Config(format!("nx must be at least 8, got {}", self.nx)));
        }
        if !(self.length > F::zero()) || !self.length.is_finite() {
            return Err(Error::Config(format!("length must be positive, got {}", self.length)));
        }
        if !(self.courant > F::zero() && self.courant <= F::one()) {
            return Err(Error::Config(format!("courant ratio must lie in (0, 1], got {}", self.courant)));
        }
        if !(self.final_time >= F::zero()) || !self.final_time.is_finite() {
            return Err(Error::Config(format!("final time must be nonnegative, got {}", self.final_time)));
        }
        Ok(())
    }

    pub fn dx(&self) -> F {
        self.length / F::from_usize_lossy(self.nx - 1)
    }

    pub fn dt(&self) -> F {
        self.courant * self.dx()
    }

    /// `ceil(T / dt)`, ignoring a relative excess below 1e-9 so that
    /// `T = k dt` up to rounding gives exactly `k` steps.
    pub fn nt(&self) -> usize {
        let ratio = (self.final_time / self.dt()).as_f64();
        (ratio - 1e-9).ceil().max(0.0) as usize
    }

    pub fn x(&self, i: usize) -> F {
        if i + 1 == self.nx {
            self.length
        } else {
            F::from_usize_lossy(i) * self.dx()
        }
    }

    pub fn nodes(&self) -> Vec<F> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn time(&self, n: usize) -> F {
        F::from_usize_lossy(n) * self.dt()
    }

    /// Same grid with `nx - 1` (and hence the number of steps) doubled.
    pub fn refined(&self) -> Self {
        Self { nx: 2 * self.nx - 1, ..*self }
    }
}

/// Fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState<F> {
    pub t: F,
    pub u: Vec<F>,
    pub v: Vec<F>,
    /// Always recomputed from `u` by [`strain`].
    pub w: Vec<F>,
}

impl<F: Real> WaveState<F> {
    pub fn new(t: F, u: Vec<F>, v: Vec<F>, dx: F) -> Self {
        let w = strain(&u, dx);
        Self { t, u, v, w }
    }
}

/// `∂x u` by centered differences inside and second-order one-sided
/// differences at both ends.
pub fn strain<F: Real>(u: &[F], dx: F) -> Vec<F> {
    let n = u.len();
    if n < 3 {
        return vec![F::zero(); n];
    }
    let two_dx = F::lit(2.0) * dx;
    let (three, four) = (F::lit(3.0), F::lit(4.0));
    let mut w = Vec::with_capacity(n);
    w.push((-three * u[0] + four * u[1] - u[2]) / two_dx);
    for i in 1..n - 1 {
        w.push((u[i + 1] - u[i - 1]) / two_dx);
    }
    w.push((three * u[n - 1] - four * u[n - 2] + u[n - 3]) / two_dx);
    w
}

/// Complete output of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord<F> {
    pub grid: Grid1D<F>,
    pub potential: PotentialSpec<F>,
    /// Human-readable description of the initial data.
    pub ic: String,
    /// Time levels between stored snapshots; the last level is always stored.
    pub stride: usize,
    pub snapshots: Vec<WaveState<F>>,
    /// One entry per time level.
    pub energy_series: Vec<EnergyBreakdown<F>>,
}

impl<F: Real> SolutionRecord<F> {
    pub fn final_state(&self) -> &WaveState<F> {
        self.snapshots.last().expect("a record always holds the initial state")
    }

    pub fn dx(&self) -> F {
        self.grid.dx()
    }

    /// Time step between consecutive snapshots, when the stride is uniform.
    pub fn snapshot_dt(&self) -> F {
        self.grid.dt() * F::from_usize_lossy(self.stride)
    }

    /// Largest `|u|` over the stored history.
    pub fn max_abs_u(&self) -> F {
        self.snapshots
            .iter()
            .flat_map(|s| s.u.iter())
            .fold(F::zero(), |m, &v| m.max(v.abs()))
    }
}

/// How the leapfrog scheme samples `Φ'` within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceRule {
    /// `Φ'(uⁿᵢ)` at every node.
    Nodal,
    /// At nodes whose time path crosses a kink of `Φ'`, replace `Φ'(uⁿᵢ)` by
    /// its hat-weighted average along the piecewise-linear path through
    /// `uⁿ⁻¹, uⁿ, uⁿ⁺¹` (predictor-corrector). Elsewhere identical to `Nodal`.
    #[default]
    CrossingResolved,
}

/// Integrator for the source sub-step of the splitting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitStep {
    Euler,
    #[default]
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Snapshot stride in time levels, at least 1.
    pub stride: usize,
    pub source_rule: SourceRule,
    pub split_step: SplitStep,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { stride: 1, source_rule: SourceRule::default(), split_step: SplitStep::default() }
    }
}

impl SolveOptions {
    pub fn with_stride(stride: usize) -> Self {
        Self { stride, ..Self::default() }
    }
}

/// Accumulates snapshots and energies level by level.
pub(crate) struct Recorder<F> {
    record: SolutionRecord<F>,
    last_level: usize,
}

impl<F: Real> Recorder<F> {
    pub(crate) fn new(
        grid: Grid1D<F>,
        potential: PotentialSpec<F>,
        ic: String,
        stride: usize,
        last_level: usize,
    ) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Config("snapshot stride must be at least 1".into()));
        }
        Ok(Self {
            record: SolutionRecord {
                grid,
                potential,
                ic,
                stride,
                snapshots: Vec::new(),
                energy_series: Vec::with_capacity(last_level + 1),
            },
            last_level,
        })
    }

    pub(crate) fn push(&mut self, level: usize, u: &[F], v: &[F]) -> Result<()> {
        if u.iter().chain(v).any(|x| !x.is_finite()) {
            return Err(Error::Blowup { step: level });
        }
        let grid = self.record.grid;
        let state = WaveState::new(grid.time(level), u.to_vec(), v.to_vec(), grid.dx());
        self.record.energy_series.push(energy(&state, &self.record.potential, grid.dx()));
        if level % self.record.stride == 0 || level == self.last_level {
            self.record.snapshots.push(state);
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> SolutionRecord<F> {
        self.record
    }
}

pub(crate) fn check_finite<F: Real>(values: &[F], step: usize) -> Result<()> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Blowup { step })
    }
}
