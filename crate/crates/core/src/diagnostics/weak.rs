use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::potentials::PotentialSpec;
use crate::scalar::Real;
use crate::solvers::SolutionRecord;

/// `ψ(r) = exp(1 - 1/(1 - r²))` on `|r| < 1`, zero outside.
fn psi<F: Real>(r: F) -> [F; 3] {
    let s = F::one() - r * r;
    if s <= F::zero() {
        return [F::zero(); 3];
    }
    let p = (F::one() - F::one() / s).exp();
    let two = F::lit(2.0);
    let d1 = -two * r / (s * s);
    let d2 = d1 * d1 - two / (s * s) - F::lit(8.0) * r * r / (s * s * s);
    [p, p * d1, p * d2]
}

/// Tensor-product bump `ψ((t - t_c)/r_t) ψ((x - x_c)/r_x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction<F> {
    pub t_center: F,
    pub x_center: F,
    pub t_radius: F,
    pub x_radius: F,
}

impl<F: Real> TestFunction<F> {
    /// `(φ, φ_t, φ_tt)` in time.
    fn time_part(&self, t: F) -> [F; 3] {
        let [p, d1, d2] = psi((t - self.t_center) / self.t_radius);
        [p, d1 / self.t_radius, d2 / (self.t_radius * self.t_radius)]
    }

    /// `(φ, φ_x)` in space.
    fn space_part(&self, x: F) -> [F; 2] {
        let [p, d1, _] = psi((x - self.x_center) / self.x_radius);
        [p, d1 / self.x_radius]
    }

    pub fn eval(&self, t: F, x: F) -> F {
        self.time_part(t)[0] * self.space_part(x)[0]
    }
}

/// Seeded bank of bumps whose supports end before `T`.
///
/// Radii: `r_t ∈ [0.1, 0.3] T`, `r_x ∈ [0.05, 0.2] L`; centers
/// `t_c ∈ [-r_t/2, T - r_t]`, `x_c ∈ [0, L]`.
pub fn seeded_test_bank<F: Real>(seed: u64, size: usize, final_time: F, length: F) -> Vec<TestFunction<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t_end, l) = (final_time.as_f64(), length.as_f64());
    (0..size)
        .map(|_| {
            let rt = rng.gen_range(0.1..=0.3) * t_end;
            let rx = rng.gen_range(0.05..=0.2) * l;
            let tc = rng.gen_range(-0.5 * rt..=t_end - rt);
            let xc = rng.gen_range(0.0..=l);
            TestFunction { t_center: F::lit(tc), x_center: F::lit(xc), t_radius: F::lit(rt), x_radius: F::lit(rx) }
        })
        .collect()
}

/// Left side of the weak form for one test function, with the scale it is
/// judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual<F> {
    pub value: F,
    /// The same integrals with every integrand replaced by its absolute
    /// value: the size of what the residual is a cancellation of.
    pub scale: F,
}

impl<F: Real> WeakResidual<F> {
    pub fn relative(&self) -> F {
        if self.scale > F::zero() {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

/// Evaluates
/// `∬ (u φ_tt + u_x φ_x + Φ'(u) φ) - ∫ u₁ φ(0,·) + ∫ u₀ φ_t(0,·)`
/// for every bump in `bank`.
///
/// Space integrals are trapezoidal, as is the time integral of the
/// `u φ_tt` and `u_x φ_x` terms. The `Φ'(u) φ` term is integrated in time
/// cell by cell along the linear interpolant of `u`, split where it crosses
/// a kink of `Φ'`: a plain trapezoid on the jump of `Φ'` at debonding would
/// cost a first-order error.
pub fn weak_residual<F: Real>(
    record: &SolutionRecord<F>,
    potential: &PotentialSpec<F>,
    bank: &[TestFunction<F>],
) -> Vec<WeakResidual<F>> {
    bank.iter().map(|phi| weak_residual_one(record, potential, phi)).collect()
}

fn weak_residual_one<F: Real>(record: &SolutionRecord<F>, potential: &PotentialSpec<F>, phi: &TestFunction<F>) -> WeakResidual<F> {
    let snaps = &record.snapshots;
    let grid = &record.grid;
    let dx = grid.dx();
    let nx = grid.nx;
    let half = F::lit(0.5);
    let breaks = potential.breakpoints();

    // nodes inside the spatial support, with trapezoid weights
    let xw: Vec<(usize, F, [F; 2])> = (0..nx)
        .filter_map(|i| {
            let x = grid.x(i);
            let sp = phi.space_part(x);
            if sp[0] == F::zero() && sp[1] == F::zero() {
                return None;
            }
            let w = if i == 0 || i + 1 == nx { half * dx } else { dx };
            Some((i, w, sp))
        })
        .collect();

    let mut term_tt = F::zero();
    let mut term_xx = F::zero();
    let mut term_src = F::zero();
    let mut scale = F::zero();
    let t_lo = phi.t_center - phi.t_radius;
    let t_hi = phi.t_center + phi.t_radius;

    for k in 0..snaps.len() {
        let t = snaps[k].t;
        // trapezoid weight of level k over the snapshot times
        let left = if k > 0 { snaps[k].t - snaps[k - 1].t } else { F::zero() };
        let right = if k + 1 < snaps.len() { snaps[k + 1].t - t } else { F::zero() };
        let wt = half * (left + right);
        let tp = phi.time_part(t);
        if t >= t_lo && t <= t_hi && wt > F::zero() {
            let s = &snaps[k];
            for &(i, wx, sp) in &xw {
                let (a, b) = (wt * wx * s.u[i] * tp[2] * sp[0], wt * wx * s.w[i] * tp[0] * sp[1]);
                term_tt = term_tt + a;
                term_xx = term_xx + b;
                scale = scale + a.abs() + b.abs();
            }
        }
        if k + 1 < snaps.len() {
            let t1 = snaps[k + 1].t;
            if t1 < t_lo || t > t_hi {
                continue;
            }
            let (a, b) = (&snaps[k], &snaps[k + 1]);
            for &(i, wx, sp) in &xw {
                let cell = source_cell(potential, &breaks, phi, t, t1, a.u[i], b.u[i]);
                term_src = term_src + wx * sp[0] * cell;
                scale = scale + (wx * sp[0] * cell).abs();
            }
        }
    }

    let (s0, mut init_u1, mut init_u0) = (&snaps[0], F::zero(), F::zero());
    let tp0 = phi.time_part(s0.t);
    for &(i, wx, sp) in &xw {
        let (a, b) = (wx * s0.v[i] * tp0[0] * sp[0], wx * s0.u[i] * tp0[1] * sp[0]);
        init_u1 = init_u1 + a;
        init_u0 = init_u0 + b;
        scale = scale + a.abs() + b.abs();
    }
    let value = term_tt + term_xx + term_src - init_u1 + init_u0;
    WeakResidual { value, scale }
}

/// `∫_{t0}^{t1} Φ'(u(t)) ψ((t - t_c)/r_t) dt` with `u` linear between `ua` and `ub`.
fn source_cell<F: Real>(pot: &PotentialSpec<F>, breaks: &[F], phi: &TestFunction<F>, t0: F, t1: F, ua: F, ub: F) -> F {
    let mut cuts = [F::zero(); 8];
    let mut n = 1;
    let du = ub - ua;
    if du != F::zero() {
        for &k in breaks {
            let r = (k - ua) / du;
            if r > F::zero() && r < F::one() && n < cuts.len() - 1 {
                cuts[n] = r;
                n += 1;
            }
        }
    }
    cuts[1..n].sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts[n] = F::one();
    n += 1;
    let g = F::lit(0.5 / 3f64.sqrt());
    let half = F::lit(0.5);
    let h = t1 - t0;
    let mut acc = F::zero();
    for w in cuts[..n].windows(2) {
        let len = w[1] - w[0];
        if len <= F::zero() {
            continue;
        }
        let mid = half * (w[0] + w[1]);
        for r in [mid - g * len, mid + g * len] {
            acc = acc + half * len * h * pot.phi_prime(ua + r * du) * phi.time_part(t0 + r * h)[0];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives_match_differences() {
        let h = 1e-5;
        for r in [-0.7f64, -0.2, 0.0, 0.35, 0.8] {
            let [_, d1, d2] = psi(r);
            let fd1 = (psi(r + h)[0] - psi(r - h)[0]) / (2.0 * h);
            let fd2 = (psi(r + h)[1] - psi(r - h)[1]) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7 * (1.0 + d1.abs()), "r={r}");
            assert!((d2 - fd2).abs() < 1e-6 * (1.0 + d2.abs()), "r={r}");
        }
        assert_eq!(psi(1.0f64), [0.0; 3]);
        assert_eq!(psi(0.0f64)[0], 1.0);
    }

    #[test]
    fn bank_is_seeded_and_within_bounds() {
        let a = seeded_test_bank::<f64>(7, 12, 2.0, 10.0);
        let b = seeded_test_bank::<f64>(7, 12, 2.0, 10.0);
        assert_eq!(a, b);
        assert_ne!(a, seeded_test_bank::<f64>(8, 12, 2.0, 10.0));
        for f in &a {
            assert!(f.t_center + f.t_radius <= 2.0 + 1e-12);
            assert!(f.t_radius >= 0.2 - 1e-12 && f.t_radius <= 0.6 + 1e-12);
            assert!(f.x_radius >= 0.5 - 1e-12 && f.x_radius <= 2.0 + 1e-12);
        }
    }
}
