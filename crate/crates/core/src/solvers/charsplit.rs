use super::extension::{extend_even_periodic, extend_odd_periodic, restrict_periodic};
use super::leapfrog::ic_label;
use super::{check_finite, Grid1D, Recorder, SolutionRecord, SolveOptions, SplitStep};
use crate::error::{Error, Result};
use crate::initial_conditions::InitialCondition;
use crate::potentials::PotentialSpec;
use crate::scalar::Real;

/// Splitting integrator for `Z = (z₁, z₂, z₃) = (∂t u, ∂x u, u)` on the
/// `2L`-periodic extension.
///
/// Transport: `r = z₁ - z₂` moves right by one node per step, `l = z₁ + z₂`
/// moves left, `z₃` stays. Source: the ODE `z₁' = -Φ'(z₃)`, `z₃' = z₁`;
/// `z₂` has no source component and the source sub-step never writes it.
#[derive(Debug, Clone)]
pub struct CharSplitSolver<F> {
    potential: PotentialSpec<F>,
    step: SplitStep,
    dt: F,
    z1: Vec<F>,
    z2: Vec<F>,
    z3: Vec<F>,
    scratch1: Vec<F>,
    scratch2: Vec<F>,
}

impl<F: Real> CharSplitSolver<F> {
    /// Requires `λ = 1` exactly so that transport maps nodes onto nodes.
    pub fn new(
        grid: &Grid1D<F>,
        potential: &PotentialSpec<F>,
        ic: &InitialCondition<F>,
        step: SplitStep,
    ) -> Result<Self> {
        grid.validate()?;
        potential.validate()?;
        if grid.courant != F::one() {
            return Err(Error::Config(format!(
                "characteristic splitting needs courant = 1 exactly, got {}",
                grid.courant
            )));
        }
        let (u0, u1) = ic.sample(&grid.nodes())?;
        let z3 = extend_even_periodic(&u0);
        let z1 = extend_even_periodic(&u1);
        // centered differences on the extension: zero at x = 0 and x = ±L
        let m = z3.len();
        let two_dx = F::lit(2.0) * grid.dx();
        let w: Vec<F> = (0..m).map(|j| (z3[(j + 1) % m] - z3[(j + m - 1) % m]) / two_dx).collect();
        // rebuild through the odd extension so the symmetry is exact
        let z2 = extend_odd_periodic(&restrict_periodic(&w, grid.nx));
        Ok(Self { potential: *potential, step, dt: grid.dt(), z1, z2, z3, scratch1: vec![F::zero(); m], scratch2: vec![F::zero(); m] })
    }

    pub fn z1(&self) -> &[F] {
        &self.z1
    }

    pub fn z2(&self) -> &[F] {
        &self.z2
    }

    pub fn z3(&self) -> &[F] {
        &self.z3
    }

    /// Exact free flow over one step.
    pub fn transport(&mut self) {
        let m = self.z1.len();
        let half = F::lit(0.5);
        // new z₁ = (r(x - dx) + l(x + dx)) / 2, new z₂ = (l(x + dx) - r(x - dx)) / 2
        for j in 0..m {
            let (a, b) = ((j + m - 1) % m, (j + 1) % m);
            let r = self.z1[a] - self.z2[a];
            let l = self.z1[b] + self.z2[b];
            self.scratch1[j] = half * (r + l);
            self.scratch2[j] = half * (l - r);
        }
        std::mem::swap(&mut self.z1, &mut self.scratch1);
        std::mem::swap(&mut self.z2, &mut self.scratch2);
    }

    /// One step of `z₁' = -Φ'(z₃)`, `z₃' = z₁`. Touches only `z₁` and `z₃`.
    pub fn apply_source(&mut self) {
        let (dt, pot) = (self.dt, &self.potential);
        let half = F::lit(0.5);
        match self.step {
            SplitStep::Euler => {
                for (z1, z3) in self.z1.iter_mut().zip(self.z3.iter_mut()) {
                    let v = *z1;
                    *z1 = v - dt * pot.phi_prime(*z3);
                    *z3 = *z3 + dt * v;
                }
            }
            SplitStep::Midpoint => {
                for (z1, z3) in self.z1.iter_mut().zip(self.z3.iter_mut()) {
                    let v_half = *z1 - half * dt * pot.phi_prime(*z3);
                    let u_half = *z3 + half * dt * *z1;
                    *z1 = *z1 - dt * pot.phi_prime(u_half);
                    *z3 = *z3 + dt * v_half;
                }
            }
        }
    }

    pub fn step(&mut self) {
        self.transport();
        self.apply_source();
    }

    /// `(u, v)` on the physical nodes.
    pub fn fields(&self, nx: usize) -> (Vec<F>, Vec<F>) {
        (restrict_periodic(&self.z3, nx), restrict_periodic(&self.z1, nx))
    }
}

/// Runs [`CharSplitSolver`] to the final time and records `u = z₃`,
/// `v = z₁` on `[0, L]`.
pub fn solve_characteristic_split<F: Real>(
    grid: &Grid1D<F>,
    potential: &PotentialSpec<F>,
    ic: &InitialCondition<F>,
    opts: &SolveOptions,
) -> Result<SolutionRecord<F>> {
    let mut solver = CharSplitSolver::new(grid, potential, ic, opts.split_step)?;
    let nt = grid.nt();
    let mut rec = Recorder::new(*grid, *potential, ic_label(ic), opts.stride, nt)?;
    let (u, v) = solver.fields(grid.nx);
    rec.push(0, &u, &v)?;
    for n in 1..=nt {
        solver.step();
        check_finite(solver.z3(), n)?;
        check_finite(solver.z1(), n)?;
        let (u, v) = solver.fields(grid.nx);
        rec.push(n, &u, &v)?;
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_conditions::IcFamily;

    #[test]
    fn rejects_non_unit_courant() {
        let g = Grid1D::new(10.0, 41, 0.9, 1.0).unwrap();
        let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.0, u1: 0.0 }, 10.0).unwrap();
        let err = CharSplitSolver::new(&g, &PotentialSpec::Exact, &ic, SplitStep::Euler).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn source_step_leaves_strain_untouched() {
        let g = Grid1D::new(10.0, 101, 1.0, 1.0).unwrap();
        let ic = InitialCondition::new(IcFamily::C2Cubic { xi0: 0.006, xi1: 1.2 }, 10.0).unwrap();
        let mut s = CharSplitSolver::new(&g, &PotentialSpec::Exact, &ic, SplitStep::Midpoint).unwrap();
        for _ in 0..g.nt() {
            s.transport();
            let before = s.z2().to_vec();
            s.apply_source();
            assert_eq!(before, s.z2());
        }
    }

    #[test]
    fn transport_of_even_data_stays_even() {
        let g = Grid1D::new(10.0, 41, 1.0, 3.0).unwrap();
        let ic = InitialCondition::new(IcFamily::C1Arc { xi0: 0.7, xi1: 0.3, a: 6.0 }, 10.0).unwrap();
        let mut s = CharSplitSolver::new(&g, &PotentialSpec::Exact, &ic, SplitStep::Euler).unwrap();
        for _ in 0..g.nt() {
            s.step();
        }
        let m = s.z3().len();
        let mid = g.nx - 1;
        for k in 1..mid {
            assert_eq!(s.z3()[mid + k], s.z3()[mid - k]);
            assert_eq!(s.z2()[mid + k], -s.z2()[mid - k]);
        }
        assert_eq!(m, 2 * mid);
    }
}
