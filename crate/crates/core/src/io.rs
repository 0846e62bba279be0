//! CSV tables for densities, survival series, sweeps and fit reports.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! reproduces every value bit for bit.

use std::io::{Read, Write};

use crate::analysis::{FitResult, SweepRow};
use crate::survival::{Method, SeriesMeta, SurvivalSeries};
use crate::{Error, Result};

pub const DENSITY_HEADER: [&str; 2] = ["E", "omega"];
pub const SERIES_HEADER: [&str; 3] = ["t", "P", "method"];
pub const SWEEP_HEADER: [&str; 5] = ["beta", "mu_f", "M", "mu_predicted", "residual"];
pub const FIT_HEADER: [&str; 6] = ["mu_f", "M", "t_lo", "t_hi", "rms_residual", "n_points"];

/// Round-trip float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: '{s}'")))
}

fn reader<R: Read>(r: R, header: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let got = rdr.headers()?.clone();
    if got.len() != header.len() || got.iter().zip(header).any(|(a, b)| a != *b) {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(rdr)
}

fn floats(rec: &csv::StringRecord, n: usize) -> Result<Vec<f64>> {
    (0..n).map(|i| parse_f64(&rec[i])).collect()
}

pub fn write_density<W: Write>(w: W, rows: &[(f64, f64)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(DENSITY_HEADER)?;
    for &(e, omega) in rows {
        wtr.write_record([fmt_f64(e), fmt_f64(omega)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_density<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = reader(r, &DENSITY_HEADER)?;
    rdr.records()
        .map(|rec| {
            let v = floats(&rec?, 2)?;
            Ok((v[0], v[1]))
        })
        .collect()
}

/// Writes several series in long format, one `(t, P, method)` row per sample.
pub fn write_series<W: Write>(w: W, series: &[&SurvivalSeries]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SERIES_HEADER)?;
    for s in series {
        for (t, p) in s.iter() {
            wtr.write_record([fmt_f64(t), fmt_f64(p), s.method.as_str().to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a long-format file back into one series per method, in order of
/// first appearance. Parameter metadata is not stored and comes back empty.
pub fn read_series<R: Read>(r: R) -> Result<Vec<SurvivalSeries>> {
    let mut rdr = reader(r, &SERIES_HEADER)?;
    let mut out: Vec<SurvivalSeries> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v = floats(&rec, 2)?;
        let method: Method = rec[2].parse()?;
        let idx = match out.iter().position(|s| s.method == method) {
            Some(i) => i,
            None => {
                out.push(SurvivalSeries {
                    times: Vec::new(),
                    values: Vec::new(),
                    method,
                    meta: SeriesMeta::default(),
                });
                out.len() - 1
            }
        };
        out[idx].times.push(v[0]);
        out[idx].values.push(v[1]);
    }
    Ok(out)
}

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SWEEP_HEADER)?;
    for r in rows {
        wtr.write_record([r.beta, r.mu_f, r.m, r.mu_predicted, r.residual].map(fmt_f64))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sweep<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = reader(r, &SWEEP_HEADER)?;
    rdr.records()
        .map(|rec| {
            let v = floats(&rec?, 5)?;
            Ok(SweepRow {
                beta: v[0],
                mu_f: v[1],
                m: v[2],
                mu_predicted: v[3],
                residual: v[4],
            })
        })
        .collect()
}

pub fn write_fit<W: Write>(w: W, fits: &[FitResult]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FIT_HEADER)?;
    for f in fits {
        let mut rec: Vec<String> =
            [f.mu_f, f.m, f.window.0, f.window.1, f.rms_residual].map(fmt_f64).to_vec();
        rec.push(f.n_points.to_string());
        wtr.write_record(rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_fit<R: Read>(r: R) -> Result<Vec<FitResult>> {
    let mut rdr = reader(r, &FIT_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let v = floats(&rec, 5)?;
            let n_points = rec[5]
                .parse()
                .map_err(|_| Error::Parse(format!("bad point count '{}'", &rec[5])))?;
            Ok(FitResult {
                mu_f: v[0],
                m: v[1],
                window: (v[2], v[3]),
                rms_residual: v[4],
                n_points,
            })
        })
        .collect()
}
