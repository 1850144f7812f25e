use crate::scalar::{median, Real};
use crate::solvers::SolutionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    /// Isolated large first difference of `v` or `w`.
    Jump,
    /// Large second difference of `v` or `w`.
    Kink,
}

impl SingularityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingularityKind::Jump => "jump",
            SingularityKind::Kink => "kink",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint<F> {
    pub t: F,
    pub x: F,
    /// Snapshot index of the row the point was found in.
    pub level: usize,
    /// Largest ratio of a member difference to its threshold (always > 1).
    pub strength: F,
    pub kind: SingularityKind,
    /// Index into [`CharacteristicMap::segments`], if linked into one.
    pub segment: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedSegment<F> {
    /// Indices into [`CharacteristicMap::points`], in time order.
    pub points: Vec<usize>,
    /// Least-squares `dx/dt`.
    pub slope: F,
    /// Fitted `x` at `t = 0`.
    pub intercept: F,
    pub t_start: F,
    pub t_end: F,
}

impl<F: Real> FittedSegment<F> {
    /// Fitted position at time `t`.
    pub fn x_at(&self, t: F) -> F {
        self.intercept + self.slope * t
    }
}

/// Tuning of [`detect_singularities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// `θ_jump = jump_factor · median |Δ¹|`.
    pub jump_factor: f64,
    /// `θ_kink = kink_factor · median |Δ²|`.
    pub kink_factor: f64,
    /// A jump must also be this many times larger than both neighbouring differences.
    pub jump_isolation: f64,
    /// Flagged nodes at most this many cells apart merge into one point.
    pub cluster_gap: usize,
    /// Largest number of rows a chain may skip.
    pub max_row_gap: usize,
    /// Chains shorter than this are not fitted.
    pub min_segment_points: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            jump_factor: 8.0,
            kink_factor: 8.0,
            jump_isolation: 3.0,
            cluster_gap: 2,
            max_row_gap: 3,
            min_segment_points: 8,
        }
    }
}

/// Thresholds actually used, per field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<F> {
    pub jump_v: F,
    pub kink_v: F,
    pub jump_w: F,
    pub kink_w: F,
}

/// Singular points in the `(t, x)` plane and the curves they line up on.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMap<F> {
    pub points: Vec<SingularPoint<F>>,
    pub segments: Vec<FittedSegment<F>>,
    pub thresholds: Thresholds<F>,
}

impl<F: Real> CharacteristicMap<F> {
    /// Segments whose fitted line has slope within `slope_tol` of `±1` and
    /// passes within `pos_tol` of `(t0, x0)`, starting no later than `t0 + max_delay`.
    pub fn segments_from(&self, t0: F, x0: F, slope_tol: F, pos_tol: F, max_delay: F) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                (s.slope.abs() - F::one()).abs() <= slope_tol
                    && (s.x_at(t0) - x0).abs() <= pos_tol
                    && s.t_start <= t0 + max_delay
            })
            .map(|(k, _)| k)
            .collect()
    }
}

/// Field-wide thresholds: `factor × median`, floored at `1e-9 max|f|` so
/// that piecewise-affine fields do not flag roundoff.
fn threshold<F: Real>(diffs: Vec<F>, factor: f64, field_max: F) -> F {
    let m = median(diffs);
    (F::lit(factor) * m).max(F::lit(1e-9) * field_max)
}

fn diffs<F: Real>(rows: &[&[F]], order: usize) -> Vec<F> {
    let mut out = Vec::new();
    for r in rows {
        let n = r.len();
        if order == 1 {
            out.extend((0..n - 1).map(|i| (r[i + 1] - r[i]).abs()));
        } else {
            out.extend((1..n - 1).map(|i| (r[i + 1] - F::lit(2.0) * r[i] + r[i - 1]).abs()));
        }
    }
    out
}

/// A flagged location in one row: position in node units and ratio to threshold.
#[derive(Debug, Clone, Copy)]
struct Flag<F> {
    pos: F,
    ratio: F,
    kind: SingularityKind,
}

fn flag_row<F: Real>(row: &[F], theta_jump: F, theta_kink: F, cfg: &DetectorConfig, out: &mut Vec<Flag<F>>) {
    let n = row.len();
    let d1 = |i: usize| (row[i + 1] - row[i]).abs();
    let d2 = |i: usize| (row[i + 1] - F::lit(2.0) * row[i] + row[i - 1]).abs();
    let iso = F::lit(cfg.jump_isolation);
    for i in 0..n - 1 {
        let d = d1(i);
        if d > theta_jump {
            let left = if i > 0 { d1(i - 1) } else { F::zero() };
            let right = if i + 2 < n { d1(i + 1) } else { F::zero() };
            if d >= iso * left && d >= iso * right {
                out.push(Flag {
                    pos: F::from_usize_lossy(i) + F::lit(0.5),
                    ratio: d / theta_jump,
                    kind: SingularityKind::Jump,
                });
            }
        }
    }
    for i in 1..n - 1 {
        let d = d2(i);
        if d > theta_kink {
            let left = if i > 1 { d2(i - 1) } else { F::zero() };
            let right = if i + 2 < n { d2(i + 1) } else { F::zero() };
            if d >= left && d >= right {
                out.push(Flag { pos: F::from_usize_lossy(i), ratio: d / theta_kink, kind: SingularityKind::Kink });
            }
        }
    }
}

/// Flags jumps and kinks of `v` and `w`, merges nearby flags row by row,
/// chains the resulting points across rows and fits a slope to each chain.
///
/// Thresholds are relative to the median differences over the whole record,
/// so the flagged set does not change when `u`, `v`, `w` are scaled.
pub fn detect_singularities<F: Real>(record: &SolutionRecord<F>, cfg: &DetectorConfig) -> CharacteristicMap<F> {
    let snaps = &record.snapshots;
    let dx = record.grid.dx();
    let vs: Vec<&[F]> = snaps.iter().map(|s| s.v.as_slice()).collect();
    let ws: Vec<&[F]> = snaps.iter().map(|s| s.w.as_slice()).collect();
    let max_of = |rows: &[&[F]]| rows.iter().flat_map(|r| r.iter()).fold(F::zero(), |m, &x| m.max(x.abs()));
    let (vmax, wmax) = (max_of(&vs), max_of(&ws));
    let thresholds = Thresholds {
        jump_v: threshold(diffs(&vs, 1), cfg.jump_factor, vmax),
        kink_v: threshold(diffs(&vs, 2), cfg.kink_factor, vmax),
        jump_w: threshold(diffs(&ws, 1), cfg.jump_factor, wmax),
        kink_w: threshold(diffs(&ws, 2), cfg.kink_factor, wmax),
    };

    let mut points = Vec::new();
    let mut flags = Vec::new();
    for (level, s) in snaps.iter().enumerate() {
        flags.clear();
        flag_row(&s.v, thresholds.jump_v, thresholds.kink_v, cfg, &mut flags);
        flag_row(&s.w, thresholds.jump_w, thresholds.kink_w, cfg, &mut flags);
        flags.sort_by(|a, b| a.pos.partial_cmp(&b.pos).unwrap());
        let gap = F::from_usize_lossy(cfg.cluster_gap);
        let mut start = 0;
        while start < flags.len() {
            let mut end = start + 1;
            while end < flags.len() && flags[end].pos - flags[end - 1].pos <= gap {
                end += 1;
            }
            let group = &flags[start..end];
            let weight: F = group.iter().map(|f| f.ratio).sum();
            let pos = group.iter().map(|f| f.ratio * f.pos).sum::<F>() / weight;
            let strength = group.iter().fold(F::zero(), |m, f| m.max(f.ratio));
            let kind = if group.iter().any(|f| f.kind == SingularityKind::Jump) {
                SingularityKind::Jump
            } else {
                SingularityKind::Kink
            };
            points.push(SingularPoint { t: s.t, x: pos * dx, level, strength, kind, segment: None });
            start = end;
        }
    }

    let segments = link_points(&mut points, dx, cfg);
    CharacteristicMap { points, segments, thresholds }
}

struct Chain<F> {
    members: Vec<usize>,
    last_level: usize,
    last_t: F,
    last_x: F,
}

/// Least-squares `(slope, intercept)` of `x` against `t`.
fn fit<F: Real>(pts: impl Iterator<Item = (F, F)> + Clone) -> Option<(F, F)> {
    let n = F::from_usize_lossy(pts.clone().count());
    let (st, sx) = pts.clone().fold((F::zero(), F::zero()), |(a, b), (t, x)| (a + t, b + x));
    let (mt, mx) = (st / n, sx / n);
    let (mut stt, mut stx) = (F::zero(), F::zero());
    for (t, x) in pts {
        stt = stt + (t - mt) * (t - mt);
        stx = stx + (t - mt) * (x - mx);
    }
    if stt > F::zero() {
        let slope = stx / stt;
        Some((slope, mx - slope * mt))
    } else {
        None
    }
}

/// Greedy nearest-prediction linking of points across rows.
fn link_points<F: Real>(points: &mut [SingularPoint<F>], dx: F, cfg: &DetectorConfig) -> Vec<FittedSegment<F>> {
    const SLOPE_WINDOW: usize = 6;
    let mut chains: Vec<Chain<F>> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let two_dx = F::lit(2.0) * dx;
    let mut k = 0;
    while k < points.len() {
        let level = points[k].level;
        let mut end = k;
        while end < points.len() && points[end].level == level {
            end += 1;
        }
        let t = points[k].t;
        active.retain(|&c| level - chains[c].last_level <= cfg.max_row_gap + 1);

        // candidate (distance, point, chain) pairs
        let mut pairs: Vec<(F, usize, usize)> = Vec::new();
        for &c in &active {
            let ch = &chains[c];
            let dt = t - ch.last_t;
            let recent = &ch.members[ch.members.len().saturating_sub(SLOPE_WINDOW)..];
            let slope = if recent.len() >= 3 {
                fit(recent.iter().map(|&p| (points[p].t, points[p].x))).map(|f| f.0)
            } else {
                None
            };
            for p in k..end {
                let x = points[p].x;
                let (pred, tol) = match slope {
                    Some(s) => (ch.last_x + s * dt, two_dx + F::lit(0.25) * dt),
                    None => (ch.last_x, two_dx + F::lit(1.5) * dt),
                };
                let d = (x - pred).abs();
                if d <= tol {
                    pairs.push((d, p, c));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut taken_p = vec![false; end - k];
        let mut taken_c: Vec<usize> = Vec::new();
        for (_, p, c) in pairs {
            if taken_p[p - k] || taken_c.contains(&c) {
                continue;
            }
            taken_p[p - k] = true;
            taken_c.push(c);
            let ch = &mut chains[c];
            ch.members.push(p);
            ch.last_level = level;
            ch.last_t = t;
            ch.last_x = points[p].x;
        }
        for p in k..end {
            if !taken_p[p - k] {
                chains.push(Chain { members: vec![p], last_level: level, last_t: t, last_x: points[p].x });
                active.push(chains.len() - 1);
            }
        }
        k = end;
    }

    let mut segments = Vec::new();
    for ch in chains {
        if ch.members.len() < cfg.min_segment_points {
            continue;
        }
        let Some((slope, intercept)) = fit(ch.members.iter().map(|&p| (points[p].t, points[p].x))) else {
            continue;
        };
        let id = segments.len();
        for &p in &ch.members {
            points[p].segment = Some(id);
        }
        segments.push(FittedSegment {
            t_start: points[ch.members[0]].t,
            t_end: points[*ch.members.last().unwrap()].t,
            points: ch.members,
            slope,
            intercept,
        });
    }
    segments
}

/// Outcome of [`verify_slopes`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport<F> {
    pub tolerance: F,
    pub checked: usize,
    /// `(segment index, slope)` for slopes farther than `tolerance` from `{-1, 0, 1}`.
    pub offenders: Vec<(usize, F)>,
}

impl<F: Real> SlopeReport<F> {
    pub fn passed(&self) -> bool {
        self.offenders.is_empty()
    }
}

/// Checks every fitted slope against the characteristic speeds `{-1, 0, 1}`.
pub fn verify_slopes<F: Real>(map: &CharacteristicMap<F>, tol: F) -> SlopeReport<F> {
    let offenders = map
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let d = [-F::one(), F::zero(), F::one()]
                .iter()
                .fold(F::infinity(), |m, &c| m.min((s.slope - c).abs()));
            d > tol
        })
        .map(|(k, s)| (k, s.slope))
        .collect();
    SlopeReport { tolerance: tol, checked: map.segments.len(), offenders }
}
