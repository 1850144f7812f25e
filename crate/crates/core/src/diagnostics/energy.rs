use crate::potentials::PotentialSpec;
use crate::scalar::{trapezoid, Real};
use crate::solvers::{SolutionRecord, WaveState};

/// Energy components at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<F> {
    pub t: F,
    /// `∫ v²/2`.
    pub kinetic: F,
    /// `∫ w²/2`.
    pub elastic: F,
    /// `∫ Φ(u)`.
    pub adhesive: F,
    pub total: F,
}

/// Trapezoidal energy of a state.
pub fn energy<F: Real>(state: &WaveState<F>, potential: &PotentialSpec<F>, dx: F) -> EnergyBreakdown<F> {
    let half = F::lit(0.5);
    let sq = |a: &[F]| a.iter().map(|&x| half * x * x).collect::<Vec<_>>();
    let kinetic = trapezoid(&sq(&state.v), dx);
    let elastic = trapezoid(&sq(&state.w), dx);
    let phi: Vec<F> = state.u.iter().map(|&u| potential.phi(u)).collect();
    let adhesive = trapezoid(&phi, dx);
    EnergyBreakdown { t: state.t, kinetic, elastic, adhesive, total: kinetic + elastic + adhesive }
}

/// Outcome of [`check_dissipation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationReport<F> {
    pub initial: F,
    pub tolerance: F,
    /// `max_t E(t) - E(0)`; negative when energy only decreased.
    pub max_increase: F,
    pub time_of_max_increase: F,
    /// Largest `-(E(tₖ₊₁) - E(tₖ))/dt` and where it happens.
    pub max_dissipation_rate: F,
    pub time_of_max_dissipation: F,
}

impl<F: Real> DissipationReport<F> {
    pub fn passed(&self) -> bool {
        self.max_increase <= self.tolerance
    }

    /// `max(0, max_increase)`.
    pub fn violation(&self) -> F {
        self.max_increase.max(F::zero())
    }
}

/// Checks `E(t) ≤ E(0) + tol` over the energy series.
pub fn check_dissipation<F: Real>(record: &SolutionRecord<F>, tol: F) -> DissipationReport<F> {
    check_energy_series(&record.energy_series, tol)
}

/// Series form of [`check_dissipation`], for hand-built histories.
pub fn check_energy_series<F: Real>(series: &[EnergyBreakdown<F>], tol: F) -> DissipationReport<F> {
    let first = series.first().copied();
    let e0 = first.map_or(F::zero(), |e| e.total);
    let t0 = first.map_or(F::zero(), |e| e.t);
    let mut rep = DissipationReport {
        initial: e0,
        tolerance: tol,
        max_increase: F::zero(),
        time_of_max_increase: t0,
        max_dissipation_rate: F::zero(),
        time_of_max_dissipation: t0,
    };
    for e in series {
        let inc = e.total - e0;
        if inc > rep.max_increase {
            rep.max_increase = inc;
            rep.time_of_max_increase = e.t;
        }
    }
    for w in series.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt > F::zero() {
            let rate = (w[0].total - w[1].total) / dt;
            if rate > rep.max_dissipation_rate {
                rep.max_dissipation_rate = rate;
                rep.time_of_max_dissipation = w[1].t;
            }
        }
    }
    rep
}

/// Tolerance used by the acceptance checks: `1e-3 E(0) + 10 dt² E(0)`.
pub fn dissipation_tolerance<F: Real>(record: &SolutionRecord<F>) -> F {
    let e0 = record.energy_series.first().map_or(F::zero(), |e| e.total);
    let dt = record.grid.dt();
    (F::lit(1e-3) + F::lit(10.0) * dt * dt) * e0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(u: f64, v: f64, nx: usize) -> WaveState<f64> {
        WaveState::new(0.0, vec![u; nx], vec![v; nx], 10.0 / (nx - 1) as f64)
    }

    #[test]
    fn energies_of_uniform_states() {
        let dx = 10.0 / 100.0;
        let e = energy(&state(0.0, 0.0, 101), &PotentialSpec::Exact, dx);
        assert_eq!(e.total, 0.0);
        let e = energy(&state(1.0, 0.0, 101), &PotentialSpec::Exact, dx);
        assert!((e.total - 10.0).abs() < 1e-12 && e.adhesive == e.total);
        let eps = 0.1;
        let e = energy(&state(1.0 + eps, eps, 101), &PotentialSpec::Exact, dx);
        assert!((e.total - (eps * eps + 2.0) / 2.0 * 10.0).abs() < 1e-12);
        let e = energy(&state(1.0 - eps, 0.0, 101), &PotentialSpec::Exact, dx);
        assert!((e.total - (1.0 - eps) * (1.0 - eps) * 10.0).abs() < 1e-12);
    }

    #[test]
    fn increasing_series_fails() {
        let series: Vec<EnergyBreakdown<f64>> = (0..10)
            .map(|k| {
                let t = k as f64 * 0.1;
                EnergyBreakdown { t, kinetic: 1.0 + t, elastic: 0.0, adhesive: 0.0, total: 1.0 + t }
            })
            .collect();
        let r = check_energy_series(&series, 1e-3);
        assert!(!r.passed());
        assert!((r.violation() - 0.9).abs() < 1e-12);
        assert!((r.time_of_max_increase - 0.9).abs() < 1e-12);
    }

    #[test]
    fn decreasing_series_passes() {
        let series: Vec<EnergyBreakdown<f64>> = (0..10)
            .map(|k| {
                let t = k as f64 * 0.1;
                let e = if k < 5 { 2.0 } else { 1.0 };
                EnergyBreakdown { t, kinetic: e, elastic: 0.0, adhesive: 0.0, total: e }
            })
            .collect();
        let r = check_energy_series(&series, 1e-6);
        assert!(r.passed());
        assert!((r.max_dissipation_rate - 10.0).abs() < 1e-9);
        assert!((r.time_of_max_dissipation - 0.5).abs() < 1e-12);
    }
}
