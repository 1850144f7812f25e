//! Even and odd `2L`-periodic extensions of nodal data on `[0, L]`.
//!
//! An extension of `nx` nodes has `2(nx - 1)` entries; entry `j` sits at
//! `x = -L + j dx`, so physical node `i` is entry `nx - 1 + i` (mod the
//! period) and `x = L` wraps onto entry 0.

use crate::scalar::Real;

/// `ext[j] = u[|j - (nx - 1)|]`.
pub fn extend_even_periodic<F: Real>(u: &[F]) -> Vec<F> {
    let nx = u.len();
    assert!(nx >= 2, "extension needs at least two nodes");
    let mid = nx - 1;
    (0..2 * mid).map(|j| u[j.abs_diff(mid)]).collect()
}

/// `ext[j] = sign(j - (nx - 1)) u[|j - (nx - 1)|]`, the extension of a
/// strain-like field. The entry at `x = -L` takes the value from the left.
pub fn extend_odd_periodic<F: Real>(u: &[F]) -> Vec<F> {
    let nx = u.len();
    assert!(nx >= 2, "extension needs at least two nodes");
    let mid = nx - 1;
    (0..2 * mid)
        .map(|j| if j < mid { -u[mid - j] } else { u[j - mid] })
        .collect()
}

/// Inverse of the extensions: the `nx` physical entries.
pub fn restrict_periodic<F: Real>(ext: &[F], nx: usize) -> Vec<F> {
    let m = ext.len();
    debug_assert_eq!(m, 2 * (nx - 1));
    (0..nx).map(|i| ext[(nx - 1 + i) % m]).collect()
}

/// Exact antiderivative of the periodic piecewise-linear interpolant of
/// `g`, anchored at `x = -L`.
#[derive(Debug, Clone)]
pub struct PeriodicAntiderivative<F> {
    g: Vec<F>,
    cumulative: Vec<F>,
    dx: F,
    length: F,
}

impl<F: Real> PeriodicAntiderivative<F> {
    /// `g` is an extended array as produced by [`extend_even_periodic`].
    pub fn new(g: Vec<F>, dx: F) -> Self {
        let m = g.len();
        let half = F::lit(0.5);
        let mut cumulative = Vec::with_capacity(m + 1);
        let mut acc = F::zero();
        cumulative.push(acc);
        for j in 0..m {
            acc = acc + half * dx * (g[j] + g[(j + 1) % m]);
            cumulative.push(acc);
        }
        let length = dx * F::from_usize_lossy(m) * half;
        Self { g, cumulative, dx, length }
    }

    /// Integral over one period.
    pub fn period_integral(&self) -> F {
        self.cumulative[self.g.len()]
    }

    /// `∫_{-L}^{x}` of the interpolant, for any real `x`.
    pub fn at(&self, x: F) -> F {
        let s = (x + self.length) / self.dx;
        let k = s.floor();
        self.at_index(k.as_f64() as isize, s - k)
    }

    /// Same as [`Self::at`] at `x = -L + (k + θ) dx` with `0 ≤ θ < 1`.
    pub fn at_index(&self, k: isize, theta: F) -> F {
        let m = self.g.len() as isize;
        let periods = k.div_euclid(m);
        let r = k.rem_euclid(m) as usize;
        let (g0, g1) = (self.g[r], self.g[(r + 1) % self.g.len()]);
        let base = if periods == 0 {
            self.cumulative[r]
        } else {
            F::lit(periods as f64) * self.period_integral() + self.cumulative[r]
        };
        base + self.dx * theta * (g0 + F::lit(0.5) * theta * (g1 - g0))
    }

    /// `∫_a^b` of the interpolant.
    pub fn integral(&self, a: F, b: F) -> F {
        self.at(b) - self.at(a)
    }
}
