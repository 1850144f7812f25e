//! Adhesion potentials: the exact discontinuous-stress law and its regularizations.
//!
//! Every potential is normalized so that debonding happens at `|u| = 1`.
//! The exact law is `Φ(u) = u²` for `|u| ≤ 1` and `Φ(u) = 1` beyond, so the
//! adhesive stress `Φ'(u) = 2u` drops to zero once the threshold is crossed.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adhesion potential selection.
///
/// Variants other than [`PotentialSpec::Exact`] are regularizations of the
/// exact law. The parameters are not checked on construction; call
/// [`PotentialSpec::validate`] (the solvers do) or go through
/// [`phi_eval`] / [`phi_prime_eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec<F> {
    /// `u²` up to the threshold, constant `1` beyond.
    Exact,
    /// Stress ramps down to zero over `[1-ε, 1]`; plateau `1 + ε² - ε`.
    Tilde(F),
    /// Stress ramps down to zero over `[1, 1+ε]`; plateau `1 + ε`.
    Bar(F),
    /// Softened stiffness `(2-ε)u` with a ramp over `[1, 1+ε]`; requires `ε < 2`.
    Quad(F),
    /// Exact law convolved with a C∞ bump of radius `δ`.
    Mollified(F),
}

impl<F: Real> PotentialSpec<F> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: F| Err(Error::ParameterDomain(format!("{what} = {v}")));
        match *self {
            PotentialSpec::Exact => Ok(()),
            PotentialSpec::Tilde(e) | PotentialSpec::Bar(e) => {
                if e > F::zero() && e.is_finite() {
                    Ok(())
                } else {
                    bad("epsilon must be positive", e)
                }
            }
            PotentialSpec::Quad(e) => {
                if e > F::zero() && e < F::lit(2.0) {
                    Ok(())
                } else {
                    bad("quad epsilon must lie in (0, 2)", e)
                }
            }
            PotentialSpec::Mollified(d) => {
                if d > F::zero() && d.is_finite() {
                    Ok(())
                } else {
                    bad("mollification radius must be positive", d)
                }
            }
        }
    }

    /// Width of the transition band beyond `|u| = 1` after which `Φ` is constant.
    pub fn effective_epsilon(&self) -> F {
        match *self {
            PotentialSpec::Exact | PotentialSpec::Tilde(_) => F::zero(),
            PotentialSpec::Bar(e) | PotentialSpec::Quad(e) | PotentialSpec::Mollified(e) => e,
        }
    }

    /// Values of `u` where `Φ'` is not smooth, in increasing order.
    ///
    /// Empty for the mollified potential.
    pub fn breakpoints(&self) -> Vec<F> {
        let one = F::one();
        match *self {
            PotentialSpec::Exact => vec![-one, one],
            PotentialSpec::Tilde(e) => vec![-one, -(one - e), one - e, one],
            PotentialSpec::Bar(e) | PotentialSpec::Quad(e) => vec![-(one + e), -one, one, one + e],
            PotentialSpec::Mollified(_) => Vec::new(),
        }
    }

    /// `Φ(u)`, assuming a valid specification.
    pub fn phi(&self, u: F) -> F {
        let one = F::one();
        let two = F::lit(2.0);
        let a = u.abs();
        match *self {
            PotentialSpec::Exact => {
                if a <= one {
                    a * a
                } else {
                    one
                }
            }
            PotentialSpec::Tilde(e) => {
                if a <= one - e {
                    a * a
                } else if a <= one {
                    (two * a - a * a) / e - (one - e) * (e + one / e)
                } else {
                    one + e * e - e
                }
            }
            PotentialSpec::Bar(e) => {
                if a <= one {
                    a * a
                } else if a <= one + e {
                    (two * (one + e) * a - a * a) / e - (one + one / e)
                } else {
                    one + e
                }
            }
            PotentialSpec::Quad(e) => {
                let k = two - e;
                if a <= one {
                    k / two * a * a
                } else if a <= one + e {
                    k / e * ((one + e) * (a - F::lit(0.5)) - a * a / two)
                } else {
                    k * (one + e) / two
                }
            }
            // evaluated on |u| so that evenness holds bit for bit
            PotentialSpec::Mollified(d) => mollified_phi(a, d),
        }
    }

    /// `Φ'(u)`, assuming a valid specification.
    ///
    /// At a branch boundary the first listed branch wins, so the exact law
    /// returns `2u` at `|u| = 1`: a node sitting on the threshold is still glued.
    pub fn phi_prime(&self, u: F) -> F {
        let one = F::one();
        let two = F::lit(2.0);
        let a = u.abs();
        let odd = |g: F| if u < F::zero() { -g } else { g };
        match *self {
            PotentialSpec::Exact => {
                if a <= one {
                    two * u
                } else {
                    F::zero()
                }
            }
            PotentialSpec::Tilde(e) => {
                if a <= one - e {
                    two * u
                } else if a <= one {
                    odd(two * (one - a) / e)
                } else {
                    F::zero()
                }
            }
            PotentialSpec::Bar(e) => {
                if a <= one {
                    two * u
                } else if a <= one + e {
                    odd(two * (one + e - a) / e)
                } else {
                    F::zero()
                }
            }
            PotentialSpec::Quad(e) => {
                let k = two - e;
                if a <= one {
                    k * u
                } else if a <= one + e {
                    odd(k / e * (one + e - a))
                } else {
                    F::zero()
                }
            }
            PotentialSpec::Mollified(d) => odd(mollified_phi_prime(a, d)),
        }
    }
}

/// `Φ(u)` for a validated potential.
pub fn phi_eval<F: Real>(spec: &PotentialSpec<F>, u: F) -> Result<F> {
    spec.validate()?;
    Ok(spec.phi(u))
}

/// `Φ'(u)` for a validated potential.
pub fn phi_prime_eval<F: Real>(spec: &PotentialSpec<F>, u: F) -> Result<F> {
    spec.validate()?;
    Ok(spec.phi_prime(u))
}

// ---------------------------------------------------------------------------
// Mollified potential.
//
// Φ_δ = Φ * ρ_δ with ρ_δ(s) = ψ(s/δ) / (δ Z), ψ(r) = exp(1 - 1/(1 - r²)).
// Inside the glued window Φ is a polynomial, so both Φ_δ and Φ'_δ reduce to
// partial moments of ψ over the part of [-1, 1] where |u - δr| ≤ 1.

const SIMPSON_INTERVALS: usize = 64;

fn bump(r: f64) -> f64 {
    let q = 1.0 - r * r;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Moments `∫ r^k ψ(r) dr`, k = 0, 1, 2, over `[lo, hi]` by composite Simpson.
fn bump_moments(lo: f64, hi: f64) -> [f64; 3] {
    if hi <= lo {
        return [0.0; 3];
    }
    let h = (hi - lo) / SIMPSON_INTERVALS as f64;
    let mut acc = [0.0; 3];
    for k in 0..=SIMPSON_INTERVALS {
        let w = if k == 0 || k == SIMPSON_INTERVALS {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let r = lo + h * k as f64;
        let p = bump(r) * w;
        acc[0] += p;
        acc[1] += p * r;
        acc[2] += p * r * r;
    }
    acc.map(|m| m * h / 3.0)
}

/// (normalization Z, normalized second moment) of the reference bump.
fn bump_constants() -> (f64, f64) {
    static CONSTS: OnceLock<(f64, f64)> = OnceLock::new();
    *CONSTS.get_or_init(|| {
        let m = bump_moments(-1.0, 1.0);
        (m[0], m[2] / m[0])
    })
}

/// Normalized moments of ρ_δ restricted to the glued window of `u`.
fn glued_window_moments(u: f64, delta: f64) -> Option<[f64; 3]> {
    let lo = ((u - 1.0) / delta).max(-1.0);
    let hi = ((u + 1.0) / delta).min(1.0);
    if hi <= lo {
        return None;
    }
    let (z, m2) = bump_constants();
    if lo == -1.0 && hi == 1.0 {
        return Some([1.0, 0.0, m2]);
    }
    let m = bump_moments(lo, hi);
    Some([m[0] / z, m[1] / z, m[2] / z])
}

fn mollified_phi_prime<F: Real>(u: F, delta: F) -> F {
    let (u, d) = (u.as_f64(), delta.as_f64());
    match glued_window_moments(u, d) {
        // ∫ 2(u - δr) ψ over the window
        Some(m) => F::lit(2.0 * (u * m[0] - d * m[1])),
        None => F::zero(),
    }
}

fn mollified_phi<F: Real>(u: F, delta: F) -> F {
    let (u, d) = (u.as_f64(), delta.as_f64());
    match glued_window_moments(u, d) {
        // ∫ (u - δr)² ψ over the window plus 1 · (mass outside)
        Some(m) => F::lit(u * u * m[0] - 2.0 * u * d * m[1] + d * d * m[2] + (1.0 - m[0])),
        None => F::one(),
    }
}

// ---------------------------------------------------------------------------
// Structural checks.

/// Outcome of sampling a potential against the structural assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport<F> {
    pub continuous: bool,
    pub constant_outside: bool,
    pub convex_inside: bool,
    pub monotone_pieces: bool,
    /// `|Φ'(1⁻) - Φ'(1⁺)|` from second-order one-sided differences.
    pub jump_at_one: F,
    /// Largest sampled `|Φ'|`.
    pub sup_phi_prime: F,
    pub sampled_points: usize,
}

impl<F: Real> AssumptionReport<F> {
    pub fn all_hold(&self) -> bool {
        self.continuous && self.constant_outside && self.convex_inside && self.monotone_pieces
    }
}

const SHAPE_TOL: f64 = 1e-12;

/// Samples `Φ` on a uniform grid over `[-3, 3]` and checks continuity,
/// constancy outside the transition band, convexity on `[-1, 1]` and
/// monotonicity on `[-1, 0]` and `[0, 1]`.
///
/// Fewer than 16 samples are raised to 16.
pub fn check_assumptions<F: Real>(spec: &PotentialSpec<F>, n_samples: usize) -> AssumptionReport<F> {
    let n = n_samples.max(16);
    let lo = F::lit(-3.0);
    let h = F::lit(6.0) / F::from_usize_lossy(n - 1);
    let us: Vec<F> = (0..n).map(|k| lo + h * F::from_usize_lossy(k)).collect();
    let phis: Vec<F> = us.iter().map(|&u| spec.phi(u)).collect();
    let tol = F::lit(SHAPE_TOL);
    let one = F::one();
    let half = F::lit(0.5);

    let sup_phi_prime = us
        .iter()
        .fold(F::zero(), |m, &u| m.max(spec.phi_prime(u).abs()));

    // sample-to-sample variation bounded by a local Lipschitz estimate
    let continuous = us.windows(2).zip(phis.windows(2)).all(|(u, p)| {
        let mid = (u[0] + u[1]) * half;
        let lip = spec
            .phi_prime(u[0])
            .abs()
            .max(spec.phi_prime(u[1]).abs())
            .max(spec.phi_prime(mid).abs());
        (p[1] - p[0]).abs() <= F::lit(1.5) * lip * h + tol
    });

    let band = one + spec.effective_epsilon();
    let outside: Vec<F> = us
        .iter()
        .zip(&phis)
        .filter(|(u, _)| u.abs() > band)
        .map(|(_, p)| *p)
        .collect();
    let constant_outside = outside
        .first()
        .map_or(true, |&p0| outside.iter().all(|&p| (p - p0).abs() <= tol));

    let inside: Vec<usize> = (0..n).filter(|&k| us[k].abs() <= one).collect();
    let convex_inside = inside
        .windows(3)
        .all(|w| phis[w[0]] - F::lit(2.0) * phis[w[1]] + phis[w[2]] >= -tol);

    let monotone_pieces = inside.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        if us[b] <= F::zero() {
            phis[b] <= phis[a] + tol
        } else if us[a] >= F::zero() {
            phis[b] >= phis[a] - tol
        } else {
            true
        }
    });

    let p = |u: F| spec.phi(u);
    let three = F::lit(3.0);
    let four = F::lit(4.0);
    let two_h = F::lit(2.0) * h;
    let left = (three * p(one) - four * p(one - h) + p(one - two_h)) / two_h;
    let right = (-three * p(one) + four * p(one + h) - p(one + two_h)) / two_h;

    AssumptionReport {
        continuous,
        constant_outside,
        convex_inside,
        monotone_pieces,
        jump_at_one: (left - right).abs(),
        sup_phi_prime,
        sampled_points: n,
    }
}

// ---------------------------------------------------------------------------
// String syntax: `exact`, `tilde:EPS`, `bar:EPS`, `quad:EPS`, `mollified:DELTA`.

impl<F: Real> fmt::Display for PotentialSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Exact => write!(f, "exact"),
            PotentialSpec::Tilde(e) => write!(f, "tilde:{e}"),
            PotentialSpec::Bar(e) => write!(f, "bar:{e}"),
            PotentialSpec::Quad(e) => write!(f, "quad:{e}"),
            PotentialSpec::Mollified(d) => write!(f, "mollified:{d}"),
        }
    }
}

impl<F: Real> FromStr for PotentialSpec<F> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let malformed = || Error::ParameterDomain(format!("malformed potential `{s}`"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let param = || -> Result<F> {
            arg.ok_or_else(malformed)?
                .parse::<F>()
                .map_err(|_| malformed())
        };
        let spec = match name {
            "exact" if arg.is_none() => PotentialSpec::Exact,
            "tilde" => PotentialSpec::Tilde(param()?),
            "bar" => PotentialSpec::Bar(param()?),
            "quad" => PotentialSpec::Quad(param()?),
            "mollified" => PotentialSpec::Mollified(param()?),
            _ => return Err(malformed()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = PotentialSpec<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exact_values() {
        assert_eq!(P::Exact.phi(0.0), 0.0);
        assert_eq!(P::Exact.phi(1.0), 1.0);
        assert_eq!(P::Exact.phi(2.0), 1.0);
        assert_eq!(P::Exact.phi_prime(0.5), 1.0);
        assert_eq!(P::Exact.phi_prime(1.5), 0.0);
        // threshold node is still glued
        assert_eq!(P::Exact.phi_prime(1.0), 2.0);
        assert_eq!(P::Exact.phi_prime(-1.0), -2.0);
    }

    #[test]
    fn regularized_plateaus_and_slopes() {
        for eps in [0.3, 0.1, 0.01] {
            assert!(close(P::Tilde(eps).phi(1.0), 1.0 + eps * eps - eps, 1e-12));
            assert_eq!(P::Tilde(eps).phi_prime(1.0), 0.0);
            assert!(close(P::Bar(eps).phi(1.0 + eps), 1.0 + eps, 1e-12));
            assert_eq!(P::Bar(eps).phi_prime(1.0), 2.0);
            assert!(close(
                P::Quad(eps).phi(1.0 + eps),
                (2.0 - eps) * (1.0 + eps) / 2.0,
                1e-12
            ));
            assert!(close(P::Quad(eps).phi_prime(1.0), 2.0 - eps, 1e-15));
        }
    }

    #[test]
    fn branches_agree_at_boundaries() {
        let eps = 0.2;
        let h = 1e-9;
        for spec in [P::Tilde(eps), P::Bar(eps), P::Quad(eps)] {
            for b in spec.breakpoints() {
                assert!(
                    close(spec.phi(b - h), spec.phi(b + h), 1e-8),
                    "{spec} discontinuous at {b}"
                );
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(phi_eval(&P::Tilde(0.0), 0.5).is_err());
        assert!(phi_eval(&P::Bar(-1.0), 0.5).is_err());
        assert!(phi_prime_eval(&P::Quad(2.0), 0.5).is_err());
        assert!(phi_prime_eval(&P::Mollified(0.0), 0.5).is_err());
        assert!(phi_eval(&P::Quad(1.5), 0.5).is_ok());
    }

    #[test]
    fn mollified_is_exact_away_from_threshold() {
        let m = P::Mollified(0.05);
        assert!(close(m.phi_prime(0.5), 1.0, 1e-14));
        assert_eq!(m.phi_prime(1.2), 0.0);
        assert_eq!(m.phi(1.2), 1.0);
        // Φ_δ(u) = u² + δ² m₂ in the glued interior
        let (_, m2) = bump_constants();
        assert!(close(m.phi(0.3), 0.09 + 0.0025 * m2, 1e-14));
    }

    #[test]
    fn mollified_derivative_matches_difference_quotient() {
        let m = P::Mollified(0.05);
        for u in [0.96, 0.99, 1.0, 1.01, 1.03, -0.98] {
            let h = 1e-5;
            let fd = (m.phi(u + h) - m.phi(u - h)) / (2.0 * h);
            // Φ_δ and Φ'_δ share the moment quadrature, so they agree only to
            // the accuracy of 64-interval Simpson on the bump (about 1e-6)
            assert!(close(fd, m.phi_prime(u), 1e-5), "u={u}: {fd} vs {}", m.phi_prime(u));
        }
    }

    #[test]
    fn assumption_report_exact() {
        let r = check_assumptions(&P::Exact, 1000);
        assert!(r.all_hold(), "{r:?}");
        assert!(close(r.jump_at_one, 2.0, 1e-9));
        assert_eq!(r.sampled_points, 1000);
    }

    #[test]
    fn assumption_report_regularizations() {
        let r = check_assumptions(&P::Bar(0.1), 1000);
        assert!(r.continuous && r.constant_outside);
        assert!(r.jump_at_one < 1e-9);

        // left slope 2 - ε, right slope (2-ε)/ε · ε: no jump
        let r = check_assumptions(&P::Quad(0.5), 1000);
        assert!(r.jump_at_one < 1e-9, "{r:?}");
        assert!(r.all_hold());

        // the inner ramp of Φ̃ is concave
        let r = check_assumptions(&P::Tilde(0.1), 1000);
        assert!(r.continuous && r.constant_outside);
        assert!(!r.convex_inside);

        let r = check_assumptions(&P::Mollified(0.05), 1000);
        assert!(r.continuous && r.constant_outside);
        assert!(r.jump_at_one < 0.05, "{r:?}");
    }

    #[test]
    fn small_sample_counts_are_raised() {
        assert_eq!(check_assumptions(&P::Exact, 3).sampled_points, 16);
    }

    #[test]
    fn parse_and_display() {
        let cases = ["exact", "tilde:0.1", "bar:0.001", "quad:0.05", "mollified:0.3"];
        for c in cases {
            let p: P = c.parse().unwrap();
            assert_eq!(p.to_string(), c);
        }
        assert!("quad:2.5".parse::<P>().is_err());
        assert!("exact:1".parse::<P>().is_err());
        assert!("tilde".parse::<P>().is_err());
        assert!("wobbly:1".parse::<P>().is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = PotentialSpec::<f32>::Bar(0.1);
        assert_eq!(p.phi_prime(1.0f32), 2.0);
        assert!((p.phi(1.1f32) - 1.1).abs() < 1e-6);
    }
}
