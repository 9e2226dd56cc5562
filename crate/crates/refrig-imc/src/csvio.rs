//! CSV export and import of simulation runs, step responses and sweep
//! surfaces.
//!
//! Numbers are written in the shortest form that reads back to the same
//! `f64`, so files are byte-for-byte reproducible.

use std::path::Path;

use refrig_imc_core::scenario::OperatingPoint;
use refrig_imc_core::{SimResult, SweepSurface};

use crate::error::{CliError, CliResult};

pub const SIM_HEADER: [&str; 9] = ["time", "r1", "y1", "u1", "e1", "r2", "y2", "u2", "e2"];

fn writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::parse(path, e))
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> CliResult<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// One row per sample with absolute setpoints, outputs and actuator values.
pub fn write_sim(path: &Path, sim: &SimResult) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(SIM_HEADER)
        .map_err(|e| CliError::parse(path, e))?;
    let (r, y, u) = (
        [sim.r_abs(0), sim.r_abs(1)],
        [sim.y_abs(0), sim.y_abs(1)],
        [sim.u_abs(0), sim.u_abs(1)],
    );
    for k in 0..sim.len() {
        let mut row = vec![num(sim.time[k])];
        for i in 0..2 {
            row.extend([num(r[i][k]), num(y[i][k]), num(u[i][k]), num(sim.e[i][k])]);
        }
        w.write_record(&row).map_err(|e| CliError::parse(path, e))?;
    }
    finish(path, w)
}

/// Reads a run written by [`write_sim`]. Values are taken as absolute, so
/// the operating point of the result is zero; saturation flags are not
/// stored and come back false.
pub fn read_sim(path: &Path) -> CliResult<SimResult> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::parse(path, e))?;
    let header = rd.headers().map_err(|e| CliError::parse(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != SIM_HEADER {
        return Err(CliError::parse(
            path,
            format!("expected columns {}", SIM_HEADER.join(",")),
        ));
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 9];
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(path, e))?;
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::parse(path, format!("row {}: bad number {field:?}", line + 2))
            })?;
            cols[c].push(v);
        }
    }
    let n = cols[0].len();
    if n < 2 {
        return Err(CliError::parse(path, "need at least two samples"));
    }
    let ts = cols[0][1] - cols[0][0];
    if !(ts > 0.0) {
        return Err(CliError::parse(path, "time column must increase"));
    }
    let diverged_at = (0..n)
        .find(|&k| cols[2][k].is_nan() || cols[6][k].is_nan())
        .map(|k| cols[0][k]);
    let mut it = cols.into_iter();
    let mut next = || it.next().expect("nine columns");
    let time = next();
    let (r1, y1, u1, e1) = (next(), next(), next(), next());
    let (r2, y2, u2, e2) = (next(), next(), next(), next());
    Ok(SimResult {
        ts,
        operating_point: OperatingPoint::zero(),
        time,
        r: [r1, r2],
        y: [y1, y2],
        u: [u1, u2],
        e: [e1, e2],
        saturated: [vec![false; n], vec![false; n]],
        diverged_at,
    })
}

/// Columns `time` followed by the named series.
pub fn write_series(path: &Path, ts: f64, series: &[(&str, &[f64])]) -> CliResult<()> {
    let mut w = writer(path)?;
    let mut head = vec!["time"];
    head.extend(series.iter().map(|s| s.0));
    w.write_record(&head)
        .map_err(|e| CliError::parse(path, e))?;
    let n = series.iter().map(|s| s.1.len()).max().unwrap_or(0);
    for k in 0..n {
        let mut row = vec![num(k as f64 * ts)];
        row.extend(
            series
                .iter()
                .map(|s| s.1.get(k).map_or_else(String::new, |v| num(*v))),
        );
        w.write_record(&row).map_err(|e| CliError::parse(path, e))?;
    }
    finish(path, w)
}

/// Columns `lambda11, lambda22, value`, one row per grid point.
pub fn write_surface(
    path: &Path,
    surface: &SweepSurface,
    value: impl Fn(&refrig_imc_core::SweepPoint) -> f64,
) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(["lambda11", "lambda22", "value"])
        .map_err(|e| CliError::parse(path, e))?;
    for p in &surface.points {
        w.write_record([num(p.lambda11), num(p.lambda22), num(value(p))])
            .map_err(|e| CliError::parse(path, e))?;
    }
    finish(path, w)
}
