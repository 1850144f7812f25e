use super::{check_finite, Grid1D, Recorder, SolutionRecord, SolveOptions, SourceRule};
use crate::error::Result;
use crate::initial_conditions::InitialCondition;
use crate::potentials::PotentialSpec;
use crate::scalar::Real;

/// Corrector passes of the crossing-resolved source.
const CORRECTOR_PASSES: usize = 2;

/// Three-level explicit scheme
/// `uⁿ⁺¹ᵢ = 2uⁿᵢ - uⁿ⁻¹ᵢ + λ²(uⁿᵢ₊₁ - 2uⁿᵢ + uⁿᵢ₋₁) - dt² Φ'(uⁿᵢ)`
/// with mirror ghosts `u₋₁ = u₁`, `u_nx = u_nx-2` and a second-order Taylor
/// first step.
///
/// With [`SourceRule::CrossingResolved`] the source at a node whose path
/// crosses a kink of `Φ'` during `[tⁿ⁻¹, tⁿ⁺¹]` is the exact hat-weighted
/// time average of `Φ'` along that path, which removes the first-order
/// phase error a nodal source commits at every debonding event.
pub fn solve_leapfrog<F: Real>(
    grid: &Grid1D<F>,
    potential: &PotentialSpec<F>,
    ic: &InitialCondition<F>,
    opts: &SolveOptions,
) -> Result<SolutionRecord<F>> {
    grid.validate()?;
    potential.validate()?;
    let nt = grid.nt();
    let mut rec = Recorder::new(*grid, *potential, ic_label(ic), opts.stride, nt)?;
    let (u0, u1) = ic.sample(&grid.nodes())?;
    let dx = grid.dx();
    let dt = grid.dt();
    let lam2 = grid.courant * grid.courant;
    let dt2 = dt * dt;
    let half = F::lit(0.5);
    let breaks = potential.breakpoints();
    let nx = grid.nx;

    if nt == 0 {
        rec.push(0, &u0, &u1)?;
        return Ok(rec.finish());
    }

    // uⁿ⁻¹, uⁿ, uⁿ⁺¹
    let mut prev = u0.clone();
    let mut cur: Vec<F> = (0..nx)
        .map(|i| {
            let acc = second_difference(&u0, i) / (dx * dx) - potential.phi_prime(u0[i]);
            u0[i] + dt * u1[i] + half * dt2 * acc
        })
        .collect();
    check_finite(&cur, 1)?;
    rec.push(0, &u0, &u1)?;

    let mut next = vec![F::zero(); nx];
    let mut vel = vec![F::zero(); nx];
    let mut crossing: Vec<usize> = Vec::new();
    let mut weights: Vec<(F, F)> = Vec::new();
    for n in 1..nt {
        for i in 0..nx {
            let lin = F::lit(2.0) * cur[i] - prev[i] + lam2 * second_difference(&cur, i);
            next[i] = lin - dt2 * potential.phi_prime(cur[i]);
        }
        crossing.clear();
        weights.clear();
        if opts.source_rule == SourceRule::CrossingResolved && !breaks.is_empty() {
            for i in 0..nx {
                if straddles(&breaks, prev[i], cur[i], next[i]) {
                    crossing.push(i);
                }
            }
            weights.resize(crossing.len(), (F::zero(), F::zero()));
            for _ in 0..CORRECTOR_PASSES {
                for (k, &i) in crossing.iter().enumerate() {
                    let (left, right) = hat_weighted_source(potential, &breaks, prev[i], cur[i], next[i]);
                    weights[k] = (left, right);
                    let lin = F::lit(2.0) * cur[i] - prev[i] + lam2 * second_difference(&cur, i);
                    next[i] = lin - dt2 * (left + right);
                }
            }
        }
        check_finite(&next, n + 1)?;

        // vⁿ by centered differences, corrected where the source was resolved
        for i in 0..nx {
            vel[i] = (next[i] - prev[i]) / (F::lit(2.0) * dt);
        }
        for (k, &i) in crossing.iter().enumerate() {
            let (left, right) = weights[k];
            vel[i] = vel[i] + half * dt * (right - left);
        }
        rec.push(n, &cur, &vel)?;

        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }

    // one-sided velocity at the last level: v = (uᴺ - uᴺ⁻¹)/dt + (dt/2) u_tt(uᴺ)
    for i in 0..nx {
        let acc = second_difference(&cur, i) / (dx * dx) - potential.phi_prime(cur[i]);
        vel[i] = (cur[i] - prev[i]) / dt + half * dt * acc;
    }
    rec.push(nt, &cur, &vel)?;
    Ok(rec.finish())
}

pub(crate) fn ic_label<F: Real>(ic: &InitialCondition<F>) -> String {
    format!("{:?}", ic.family)
}

/// `u_{i+1} - 2u_i + u_{i-1}` with mirror ghosts at both ends.
#[inline]
fn second_difference<F: Real>(u: &[F], i: usize) -> F {
    let n = u.len();
    let left = if i == 0 { u[1] } else { u[i - 1] };
    let right = if i + 1 == n { u[n - 2] } else { u[i + 1] };
    left - F::lit(2.0) * u[i] + right
}

fn straddles<F: Real>(breaks: &[F], a: F, b: F, c: F) -> bool {
    let lo = a.min(b).min(c);
    let hi = a.max(b).max(c);
    lo < hi && breaks.iter().any(|&k| lo <= k && k <= hi)
}

/// `(∫₀¹ r Φ'(uⁿ⁻¹ + r(uⁿ - uⁿ⁻¹)) dr, ∫₀¹ (1-r) Φ'(uⁿ + r(uⁿ⁺¹ - uⁿ)) dr)`.
///
/// Their sum is the hat-weighted average of `Φ'` over `[tⁿ⁻¹, tⁿ⁺¹]`; it
/// reduces to `Φ'(uⁿ)` when `Φ'` is affine along the path.
fn hat_weighted_source<F: Real>(pot: &PotentialSpec<F>, breaks: &[F], a: F, b: F, c: F) -> (F, F) {
    let left = weighted_path_integral(pot, breaks, a, b, |r| r);
    let right = weighted_path_integral(pot, breaks, b, c, |r| F::one() - r);
    (left, right)
}

/// `∫₀¹ weight(r) Φ'(a + r(b - a)) dr`, split at the kinks of `Φ'` and
/// integrated by two-point Gauss on each piece (exact for piecewise-linear
/// `Φ'` and linear weights).
fn weighted_path_integral<F: Real>(
    pot: &PotentialSpec<F>,
    breaks: &[F],
    a: F,
    b: F,
    weight: impl Fn(F) -> F,
) -> F {
    let mut cuts = [F::zero(); 8];
    let mut ncut = 0;
    cuts[ncut] = F::zero();
    ncut += 1;
    let span = b - a;
    if span != F::zero() {
        for &k in breaks {
            let r = (k - a) / span;
            if r > F::zero() && r < F::one() && ncut < cuts.len() - 1 {
                cuts[ncut] = r;
                ncut += 1;
            }
        }
    }
    cuts[1..ncut].sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts[ncut] = F::one();
    ncut += 1;

    let g = F::lit(0.5 / 3f64.sqrt());
    let half = F::lit(0.5);
    let mut total = F::zero();
    for w in cuts[..ncut].windows(2) {
        let (r0, r1) = (w[0], w[1]);
        let h = r1 - r0;
        if h <= F::zero() {
            continue;
        }
        let mid = half * (r0 + r1);
        for r in [mid - g * h, mid + g * h] {
            total = total + half * h * weight(r) * pot.phi_prime(a + r * span);
        }
    }
    total
}
