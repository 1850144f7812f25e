use super::singularities::CharacteristicMap;
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::scalar::Real;
use crate::solvers::SolutionRecord;

/// `R = ∂t η + ∂x q - η'·B` on interior levels and nodes, with
/// `η = |Z|²/2`, `q = -z₁z₂`, `B = (-Φ'(z₃), 0, z₁)` and `Z = (v, w, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResidual<F> {
    /// Record levels `1..N-1` (indices into the snapshots).
    pub levels: Vec<usize>,
    pub times: Vec<F>,
    /// Node positions `x₁ .. x_{nx-2}`.
    pub x: Vec<F>,
    pub dx: F,
    pub dt: F,
    /// Raw centered-difference residual, `values[k][j]` at `times[k]`, `x[j]`.
    pub values: Vec<Vec<F>>,
    /// `values` after one pass of the `[1/4, 1/2, 1/4]` kernel in `x`.
    pub smoothed: Vec<Vec<F>>,
}

/// Summary over a residual field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySummary<F> {
    /// `max |R|` over points away from detected singularities.
    pub max_abs_smooth: F,
    /// `∬ max(R_s, 0)` over the whole field (smoothed residual).
    pub positive_part: F,
    /// `∬ min(R_s, 0)` over the whole field.
    pub negative_part: F,
    /// Points that counted as smooth.
    pub smooth_points: usize,
}

/// Pointwise entropy residual of a dense record.
pub fn entropy_residual<F: Real>(record: &SolutionRecord<F>, potential: &PotentialSpec<F>) -> Result<EntropyResidual<F>> {
    if record.stride != 1 {
        return Err(Error::Config(format!(
            "entropy residual needs every time level (stride 1), record has stride {}",
            record.stride
        )));
    }
    let snaps = &record.snapshots;
    let nx = record.grid.nx;
    let dx = record.grid.dx();
    let dt = record.grid.dt();
    let half = F::lit(0.5);
    let eta = |k: usize, i: usize| {
        let s = &snaps[k];
        half * (s.v[i] * s.v[i] + s.w[i] * s.w[i] + s.u[i] * s.u[i])
    };
    let flux = |k: usize, i: usize| -snaps[k].v[i] * snaps[k].w[i];
    let mut out = EntropyResidual {
        levels: Vec::new(),
        times: Vec::new(),
        x: (1..nx - 1).map(|i| record.grid.x(i)).collect(),
        dx,
        dt,
        values: Vec::new(),
        smoothed: Vec::new(),
    };
    if snaps.len() < 3 {
        return Ok(out);
    }
    for k in 1..snaps.len() - 1 {
        // last step may be shorter than dt when T is not a multiple of it
        let span = snaps[k + 1].t - snaps[k - 1].t;
        let s = &snaps[k];
        let row: Vec<F> = (1..nx - 1)
            .map(|i| {
                let dt_eta = (eta(k + 1, i) - eta(k - 1, i)) / span;
                let dx_q = (flux(k, i + 1) - flux(k, i - 1)) / (F::lit(2.0) * dx);
                let source = -s.v[i] * potential.phi_prime(s.u[i]) + s.u[i] * s.v[i];
                dt_eta + dx_q - source
            })
            .collect();
        out.smoothed.push(smooth3(&row));
        out.values.push(row);
        out.levels.push(k);
        out.times.push(s.t);
    }
    Ok(out)
}

fn smooth3<F: Real>(row: &[F]) -> Vec<F> {
    let n = row.len();
    let q = F::lit(0.25);
    (0..n)
        .map(|j| {
            let l = row[j.saturating_sub(1)];
            let r = row[(j + 1).min(n - 1)];
            q * l + F::lit(0.5) * row[j] + q * r
        })
        .collect()
}

/// Summarizes `res`; points within `margin` nodes and levels of a flagged
/// singularity in `map` are excluded from `max_abs_smooth`.
pub fn summarize_entropy<F: Real>(res: &EntropyResidual<F>, map: Option<&CharacteristicMap<F>>, margin: usize) -> EntropySummary<F> {
    let rows = res.values.len();
    let cols = res.x.len();
    let mut excluded = vec![vec![false; cols]; rows];
    if let Some(map) = map {
        for p in &map.points {
            // residual row k is record level k + 1, column j is node j + 1
            let level = p.level as isize - 1;
            let node = (p.x / res.dx).round().as_f64() as isize - 1;
            for k in level - margin as isize..=level + margin as isize {
                for j in node - margin as isize..=node + margin as isize {
                    if k >= 0 && (k as usize) < rows && j >= 0 && (j as usize) < cols {
                        excluded[k as usize][j as usize] = true;
                    }
                }
            }
        }
    }
    let cell = res.dx * res.dt;
    let mut s = EntropySummary {
        max_abs_smooth: F::zero(),
        positive_part: F::zero(),
        negative_part: F::zero(),
        smooth_points: 0,
    };
    for k in 0..rows {
        for j in 0..cols {
            let r = res.smoothed[k][j];
            if r > F::zero() {
                s.positive_part = s.positive_part + r * cell;
            } else {
                s.negative_part = s.negative_part + r * cell;
            }
            if !excluded[k][j] {
                s.max_abs_smooth = s.max_abs_smooth.max(res.values[k][j].abs());
                s.smooth_points += 1;
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_conditions::{IcFamily, InitialCondition};
    use crate::solvers::{solve_leapfrog, Grid1D, SolveOptions};

    #[test]
    fn strided_record_is_rejected() {
        let g = Grid1D::new(10.0, 21, 0.9, 0.5).unwrap();
        let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.5, u1: 0.0 }, 10.0).unwrap();
        let rec = solve_leapfrog(&g, &PotentialSpec::Exact, &ic, &SolveOptions::with_stride(2)).unwrap();
        assert!(matches!(entropy_residual(&rec, &PotentialSpec::Exact), Err(Error::Config(_))));
    }

    #[test]
    fn glued_oscillation_has_small_residual() {
        // R vanishes identically along u'' = -2u; what is left is O(dt²)
        let mut prev = f64::INFINITY;
        for nx in [101, 201, 401] {
            let g = Grid1D::new(10.0, nx, 0.9, 2.0).unwrap();
            let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.5, u1: 0.0 }, 10.0).unwrap();
            let rec = solve_leapfrog(&g, &PotentialSpec::Exact, &ic, &SolveOptions::default()).unwrap();
            let res = entropy_residual(&rec, &PotentialSpec::Exact).unwrap();
            let s = summarize_entropy(&res, None, 0);
            assert!(s.max_abs_smooth < prev / 3.5, "nx={nx}: {s:?}");
            prev = s.max_abs_smooth;
        }
        assert!(prev < 2e-4);
    }
}
