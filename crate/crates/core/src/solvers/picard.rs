use super::extension::{extend_even_periodic, PeriodicAntiderivative};
use super::leapfrog::ic_label;
use super::{check_finite, Grid1D, Recorder, SolutionRecord, SolveOptions};
use crate::error::{Error, Result};
use crate::initial_conditions::InitialCondition;
use crate::potentials::PotentialSpec;
use crate::scalar::Real;

/// Sup-norm change between iterates below which the iteration stops.
pub const PICARD_TOLERANCE: f64 = 1e-10;

/// Converged fixed point of the representation formula.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome<F> {
    /// `u[n][i]` at `t = n dt`, `x = i dx`.
    pub u: Vec<Vec<F>>,
    pub iterations: usize,
    pub last_change: F,
}

/// The map `u ↦ (ũ₀(x+t) + ũ₀(x-t))/2 + ½∫ũ₁ - ½∬Φ'(ũ)` on grid levels,
/// with the free part precomputed.
struct RepresentationMap<'a, F> {
    potential: &'a PotentialSpec<F>,
    dx: F,
    dt: F,
    nx: usize,
    free: Vec<Vec<F>>,
}

/// Splits `h / dx` into an integer part and a fraction in `[0, 1)`.
fn node_offset<F: Real>(h: F, dx: F) -> (isize, F) {
    let q = h / dx;
    let k = q.floor();
    (k.as_f64() as isize, q - k)
}

/// `∫_{xᵢ-h}^{xᵢ+h}` for every physical node `i`, accumulated into `out`
/// with the given factor.
fn accumulate_windows<F: Real>(anti: &PeriodicAntiderivative<F>, h: F, dx: F, factor: F, out: &mut [F]) {
    let nx = out.len();
    let mid = (nx - 1) as isize;
    let (k, theta) = node_offset(h, dx);
    for (i, o) in out.iter_mut().enumerate() {
        let c = mid + i as isize;
        let upper = anti.at_index(c + k, theta);
        let lower = if theta > F::zero() {
            anti.at_index(c - k - 1, F::one() - theta)
        } else {
            anti.at_index(c - k, F::zero())
        };
        *o = *o + factor * (upper - lower);
    }
}

/// `x` folded into `[0, L]` by the even `2L`-periodic reflection.
fn fold<F: Real>(x: F, l: F) -> F {
    let period = F::lit(2.0) * l;
    let mut y = x - (x / period).floor() * period;
    if y > l {
        y = period - y;
    }
    y.max(F::zero()).min(l)
}

impl<'a, F: Real> RepresentationMap<'a, F> {
    fn new(grid: &Grid1D<F>, potential: &'a PotentialSpec<F>, ic: &InitialCondition<F>, levels: usize) -> Result<Self> {
        let (dx, dt, nx, l) = (grid.dx(), grid.dt(), grid.nx, grid.length);
        let nodes = grid.nodes();
        let (_, u1) = ic.sample(&nodes)?;
        let anti_u1 = PeriodicAntiderivative::new(extend_even_periodic(&u1), dx);
        let half = F::lit(0.5);
        let mut free = Vec::with_capacity(levels);
        for n in 0..levels {
            let t = grid.time(n);
            let mut row = Vec::with_capacity(nx);
            for &x in &nodes {
                let a = ic.eval(fold(x + t, l))?.0;
                let b = ic.eval(fold(x - t, l))?.0;
                row.push(half * (a + b));
            }
            accumulate_windows(&anti_u1, t, dx, half, &mut row);
            free.push(row);
        }
        Ok(Self { potential, dx, dt, nx, free })
    }

    fn source_antiderivative(&self, u: &[F]) -> PeriodicAntiderivative<F> {
        let g: Vec<F> = u.iter().map(|&v| self.potential.phi_prime(v)).collect();
        PeriodicAntiderivative::new(extend_even_periodic(&g), self.dx)
    }

    /// Level `n` of the image, given antiderivatives of `Φ'` on levels `< n`.
    fn level(&self, n: usize, anti: &[PeriodicAntiderivative<F>]) -> Vec<F> {
        let mut row = self.free[n].clone();
        let half = F::lit(0.5);
        // trapezoid in s: weight dt/2 at s = 0, dt inside; the s = t term has an empty window
        for (m, a) in anti.iter().enumerate().take(n) {
            let w = if m == 0 { half * self.dt } else { self.dt };
            let h = F::from_usize_lossy(n - m) * self.dt;
            accumulate_windows(a, h, self.dx, -half * w, &mut row);
        }
        row
    }
}

/// One application of the representation map to `current` (one row per
/// time level).
pub fn picard_iterate<F: Real>(
    grid: &Grid1D<F>,
    potential: &PotentialSpec<F>,
    ic: &InitialCondition<F>,
    current: &[Vec<F>],
) -> Result<Vec<Vec<F>>> {
    grid.validate()?;
    potential.validate()?;
    let map = RepresentationMap::new(grid, potential, ic, current.len())?;
    let anti: Vec<_> = current.iter().map(|u| map.source_antiderivative(u)).collect();
    Ok((0..current.len()).map(|n| map.level(n, &anti)).collect())
}

fn iterate_to_fixed_point<F: Real>(
    grid: &Grid1D<F>,
    potential: &PotentialSpec<F>,
    ic: &InitialCondition<F>,
    levels: usize,
    k_iters: usize,
) -> Result<PicardOutcome<F>> {
    let map = RepresentationMap::new(grid, potential, ic, levels)?;
    let mut u = vec![vec![F::zero(); map.nx]; levels];
    let mut anti: Vec<_> = u.iter().map(|row| map.source_antiderivative(row)).collect();
    // levels < `settled` reproduce themselves: level n only sees levels < n
    let mut settled = 0;
    let mut last_change = F::infinity();
    for iteration in 1..=k_iters {
        let mut change = F::zero();
        let mut first_changed = None;
        for n in settled..levels {
            let row = map.level(n, &anti);
            check_finite(&row, n)?;
            let d = row.iter().zip(&u[n]).fold(F::zero(), |m, (a, b)| m.max((*a - *b).abs()));
            if d > F::zero() && first_changed.is_none() {
                first_changed = Some(n);
            }
            change = change.max(d);
            u[n] = row;
        }
        last_change = change;
        match first_changed {
            None => settled = levels,
            Some(n) => {
                for m in n..levels {
                    anti[m] = map.source_antiderivative(&u[m]);
                }
                settled = n + 1;
            }
        }
        if change < F::lit(PICARD_TOLERANCE) {
            return Ok(PicardOutcome { u, iterations: iteration, last_change });
        }
    }
    Err(Error::IterationLimit { iterations: k_iters, last_change: last_change.as_f64() })
}

/// Fixed point of the d'Alembert/Duhamel representation on the even
/// `2L`-periodic extension, up to `t_max`, by Picard iteration from `u ≡ 0`.
///
/// Window integrals are exact for the piecewise-linear interpolant of
/// `Φ'(u)` on each level; the time integral is trapezoidal. `v` comes from
/// time differences (second order, one-sided at the last level) and `w`
/// from space differences.
pub fn solve_dalembert_picard<F: Real>(
    grid: &Grid1D<F>,
    potential: &PotentialSpec<F>,
    ic: &InitialCondition<F>,
    t_max: F,
    k_iters: usize,
    opts: &SolveOptions,
) -> Result<SolutionRecord<F>> {
    grid.validate()?;
    potential.validate()?;
    if !(t_max >= F::zero() && t_max <= grid.final_time) {
        return Err(Error::Config(format!("t_max = {t_max} must lie in [0, {}]", grid.final_time)));
    }
    if k_iters == 0 {
        return Err(Error::Config("Picard iteration count must be at least 1".into()));
    }
    let g = Grid1D { final_time: t_max, ..*grid };
    let nt = g.nt();
    let outcome = iterate_to_fixed_point(&g, potential, ic, nt + 1, k_iters)?;
    let u = outcome.u;
    let (_, u1) = ic.sample(&g.nodes())?;
    let dt = g.dt();
    let two_dt = F::lit(2.0) * dt;
    let mut rec = Recorder::new(g, *potential, ic_label(ic), opts.stride, nt)?;
    rec.push(0, &u[0], &u1)?;
    for n in 1..=nt {
        let v: Vec<F> = if n < nt {
            (0..g.nx).map(|i| (u[n + 1][i] - u[n - 1][i]) / two_dt).collect()
        } else if n >= 2 {
            let (three, four) = (F::lit(3.0), F::lit(4.0));
            (0..g.nx).map(|i| (three * u[n][i] - four * u[n - 1][i] + u[n - 2][i]) / two_dt).collect()
        } else {
            (0..g.nx).map(|i| (u[n][i] - u[n - 1][i]) / dt).collect()
        };
        rec.push(n, &u[n], &v)?;
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_conditions::IcFamily;

    #[test]
    fn fold_reflects_into_interval() {
        assert_eq!(fold(3.0, 10.0), 3.0);
        assert_eq!(fold(-3.0, 10.0), 3.0);
        assert_eq!(fold(12.0, 10.0), 8.0);
        assert_eq!(fold(23.0, 10.0), 3.0);
        assert_eq!(fold(-17.0, 10.0), 3.0);
    }

    #[test]
    fn first_iterate_from_zero_is_linear_part() {
        let g = Grid1D::<f64>::new(10.0, 41, 0.9, 0.5).unwrap();
        let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.0, u1: 2.0 }, 10.0).unwrap();
        let levels = g.nt() + 1;
        let zero = vec![vec![0.0; g.nx]; levels];
        let u1 = picard_iterate(&g, &PotentialSpec::Exact, &ic, &zero).unwrap();
        for (n, row) in u1.iter().enumerate() {
            let t = g.time(n);
            assert!(row.iter().all(|&u| (u - 2.0 * t).abs() < 1e-13), "level {n}");
        }
    }

    #[test]
    fn free_waves_follow_dalembert() {
        // Φ' ≡ 0 for |u| > 1: pure d'Alembert with ũ₁ = 0
        let g = Grid1D::<f64>::new(10.0, 101, 0.5, 2.0).unwrap();
        let ic = InitialCondition::new(IcFamily::C1ArcShiftHalf { xi0: 3.0, xi1: 0.0, a: 6.0 }, 10.0).unwrap();
        let rec = solve_dalembert_picard(&g, &PotentialSpec::Exact, &ic, 2.0, 5, &SolveOptions::default()).unwrap();
        let last = rec.final_state();
        for (i, &u) in last.u.iter().enumerate() {
            let x = g.x(i);
            let expect = 0.5 * (ic.eval(fold(x + last.t, 10.0)).unwrap().0 + ic.eval(fold(x - last.t, 10.0)).unwrap().0);
            assert!((u - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn iteration_limit_is_reported() {
        let g = Grid1D::new(10.0, 41, 0.9, 1.0).unwrap();
        let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.5, u1: 0.0 }, 10.0).unwrap();
        let err = solve_dalembert_picard(&g, &PotentialSpec::Exact, &ic, 1.0, 2, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::IterationLimit { iterations: 2, .. }));
    }
}
