use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solvers::SolutionRecord;

/// Threshold crossings seen inside the truncated backward cone of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeReport<F> {
    pub t0: F,
    pub x0: F,
    pub epsilon: F,
    /// Some sample has `|u| < 1`.
    pub found_below: bool,
    /// Some sample has `|u| > 1`.
    pub found_above: bool,
    pub samples: usize,
}

impl<F: Real> ConeReport<F> {
    pub fn both(&self) -> bool {
        self.found_below && self.found_above
    }
}

/// Samples every stored node of the cone
/// `t ∈ [max(t₀ - ε, 0), t₀]`,
/// `x ∈ (max(0, x₀ - ε + (t - t₀)), min(x₀ + ε - (t - t₀), L))`
/// and records whether `u` is found on both sides of the threshold.
pub fn verify_cone_condition<F: Real>(record: &SolutionRecord<F>, t0: F, x0: F, epsilon: F) -> Result<ConeReport<F>> {
    let grid = &record.grid;
    let l = grid.length;
    let t_last = record.final_state().t;
    if !(epsilon > F::zero()) {
        return Err(Error::Config(format!("cone radius must be positive, got {epsilon}")));
    }
    let slack = grid.dt() * F::lit(1e-6);
    if t0 < F::zero() || t0 > t_last + slack || x0 < F::zero() || x0 > l {
        return Err(Error::Domain(format!("point ({t0}, {x0}) outside the record")));
    }
    let t_lo = (t0 - epsilon).max(F::zero());
    let mut rep = ConeReport { t0, x0, epsilon, found_below: false, found_above: false, samples: 0 };
    for s in &record.snapshots {
        if s.t < t_lo - slack || s.t > t0 + slack {
            continue;
        }
        let back = s.t - t0;
        let lo = (x0 - epsilon + back).max(F::zero());
        let hi = (x0 + epsilon - back).min(l);
        for (i, &u) in s.u.iter().enumerate() {
            let x = grid.x(i);
            if x > lo && x < hi {
                rep.samples += 1;
                rep.found_below |= u.abs() < F::one();
                rep.found_above |= u.abs() > F::one();
            }
        }
    }
    if rep.samples == 0 {
        return Err(Error::Resolution(format!(
            "no grid node inside the cone of radius {epsilon} at ({t0}, {x0})"
        )));
    }
    Ok(rep)
}

/// Whether the backward characteristic cone `[x₀ - t₀, x₀ + t₀]` at `t = 0`
/// (widened by `margin`) contains an image of one of `singular` under the
/// even `2L`-periodic reflection.
pub fn backward_cone_meets<F: Real>(singular: &[F], length: F, t0: F, x0: F, margin: F) -> bool {
    let lo = x0 - t0 - margin;
    let hi = x0 + t0 + margin;
    let period = F::lit(2.0) * length;
    singular.iter().any(|&s| {
        [s, -s].iter().any(|&base| {
            // smallest image ≥ lo
            let k = ((lo - base) / period).ceil();
            let image = base + k * period;
            image <= hi
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_images() {
        let l = 10.0;
        assert!(backward_cone_meets(&[5.0], l, 1.0, 5.5, 0.0));
        assert!(!backward_cone_meets(&[5.0], l, 1.0, 7.5, 0.0));
        assert!(backward_cone_meets(&[5.0], l, 1.0, 7.5, 2.0));
        // reflection about x = 0 puts an image at -5; about L at 15
        assert!(backward_cone_meets(&[5.0], l, 11.0, 1.0, 0.0));
        assert!(!backward_cone_meets::<f64>(&[], l, 5.0, 5.0, 1.0));
    }
}
