//! CSV serialization of records and diagnostics.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which
//! round-trips every binary64 value exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::{CharacteristicMap, ConeReport, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::solvers::{SolutionRecord, WaveState};

/// Formats a float so that parsing it back gives the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `t,x,u,v,w`, one row per snapshot and node, ordered by `(t, x)`.
pub fn write_fields(record: &SolutionRecord<f64>, path: &Path) -> Result<()> {
    write_field_snapshots(record, 1, path)
}

/// As [`write_fields`], keeping every `every`-th snapshot and the last one.
pub fn write_field_snapshots(record: &SolutionRecord<f64>, every: usize, path: &Path) -> Result<()> {
    let every = every.max(1);
    let last = record.snapshots.len().saturating_sub(1);
    let mut out = String::from("t,x,u,v,w\n");
    for (k, s) in record.snapshots.iter().enumerate() {
        if k % every != 0 && k != last {
            continue;
        }
        let t = fmt_f64(s.t);
        for i in 0..s.u.len() {
            let _ = writeln!(
                out,
                "{t},{},{},{},{}",
                fmt_f64(record.grid.x(i)),
                fmt_f64(s.u[i]),
                fmt_f64(s.v[i]),
                fmt_f64(s.w[i])
            );
        }
    }
    write_file(path, &out)
}

/// Reads a file written by [`write_fields`] back into snapshots.
pub fn read_fields(path: &Path) -> Result<Vec<WaveState<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let data_err = |line: usize, message: String| Error::Data { path: path.into(), message: format!("line {line}: {message}") };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "t,x,u,v,w")) => {}
        _ => return Err(data_err(1, "expected header `t,x,u,v,w`".into())),
    }
    let mut states: Vec<WaveState<f64>> = Vec::new();
    for (k, line) in lines {
        let cols: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| data_err(k + 1, format!("{e}")))?;
        if cols.len() != 5 {
            return Err(data_err(k + 1, format!("expected 5 columns, got {}", cols.len())));
        }
        match states.last_mut() {
            Some(s) if s.t == cols[0] => {
                s.u.push(cols[2]);
                s.v.push(cols[3]);
                s.w.push(cols[4]);
            }
            _ => states.push(WaveState { t: cols[0], u: vec![cols[2]], v: vec![cols[3]], w: vec![cols[4]] }),
        }
    }
    Ok(states)
}

/// `t,kinetic,elastic,adhesive,total`, one row per time level.
pub fn write_energy(series: &[EnergyBreakdown<f64>], path: &Path) -> Result<()> {
    let mut out = String::from("t,kinetic,elastic,adhesive,total\n");
    for e in series {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(e.t),
            fmt_f64(e.kinetic),
            fmt_f64(e.elastic),
            fmt_f64(e.adhesive),
            fmt_f64(e.total)
        );
    }
    write_file(path, &out)
}

/// `t,x,strength,kind,segment_id,fitted_slope`; unlinked points get an
/// empty segment id and slope.
pub fn write_singularities(map: &CharacteristicMap<f64>, path: &Path) -> Result<()> {
    let mut out = String::from("t,x,strength,kind,segment_id,fitted_slope\n");
    for p in &map.points {
        let (id, slope) = match p.segment {
            Some(k) => (k.to_string(), fmt_f64(map.segments[k].slope)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(out, "{},{},{},{},{id},{slope}", fmt_f64(p.t), fmt_f64(p.x), fmt_f64(p.strength), p.kind.as_str());
    }
    write_file(path, &out)
}

/// One row per cone check; `data_kink_in_cone` marks points whose
/// backward cone reaches a singularity of the initial data.
pub fn write_cone_reports(reports: &[(ConeReport<f64>, bool)], path: &Path) -> Result<()> {
    let mut out = String::from("t0,x0,epsilon,found_below,found_above,samples,data_kink_in_cone\n");
    for (r, inherited) in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.t0),
            fmt_f64(r.x0),
            fmt_f64(r.epsilon),
            r.found_below,
            r.found_above,
            r.samples,
            inherited
        );
    }
    write_file(path, &out)
}

/// `quantity,value` rows.
pub fn write_residual_summary(rows: &[(String, f64)], path: &Path) -> Result<()> {
    let mut out = String::from("quantity,value\n");
    for (name, value) in rows {
        let _ = writeln!(out, "{name},{}", fmt_f64(*value));
    }
    write_file(path, &out)
}

pub fn write_text(text: &str, path: &Path) -> Result<()> {
    write_file(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialSpec;
    use crate::solvers::Grid1D;

    fn tiny_record() -> SolutionRecord<f64> {
        let grid = Grid1D { length: 2.0, nx: 3, courant: 0.5, final_time: 0.5 };
        let s = |t: f64| WaveState { t, u: vec![0.1 + t, 1.0 / 3.0, -2.5e-300], v: vec![t; 3], w: vec![1e300, 0.0, -0.0] };
        SolutionRecord {
            grid,
            potential: PotentialSpec::Exact,
            ic: "test".into(),
            stride: 1,
            snapshots: vec![s(0.0), s(0.5)],
            energy_series: vec![],
        }
    }

    #[test]
    fn fields_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fields.csv");
        let rec = tiny_record();
        write_fields(&rec, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 7);
        let back = read_fields(&path).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in back.iter().zip(&rec.snapshots) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            for (x, y) in a.u.iter().chain(&a.v).chain(&a.w).zip(b.u.iter().chain(&b.v).chain(&b.w)) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
