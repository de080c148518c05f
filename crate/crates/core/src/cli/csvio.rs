//! Numeric CSV artifacts. Every float is written as `{:.17e}` so a file read back
//! reproduces the bits, and identical runs produce identical bytes.
//!
//! Column orders:
//! * signal:   `t, re, im`
//! * spectrum: `E, re, im`
//! * field:    `q, t, re, im`
//! * warp rate input: `t, g`

use num_complex::Complex64;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{SpectrumGrid, TimeGrid};
use crate::schrodinger::SpaceTimeField;
use crate::signal::{SampledSignal, SpectrumSamples};

/// Relative spacing jitter tolerated when a sample column is read back as a grid.
const UNIFORM_TOL: f64 = 1e-9;

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let file = File::create(path).map_err(|e| csv_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.17e}")))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))?;
    Ok(())
}

/// Like [`write_table`], with leading text columns (labels) on each row.
pub fn write_labelled_table(path: &Path, header: &[&str], rows: &[(Vec<String>, Vec<f64>)]) -> Result<()> {
    let file = File::create(path).map_err(|e| csv_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for (labels, values) in rows {
        let rec: Vec<String> = labels
            .iter()
            .cloned()
            .chain(values.iter().map(|x| format!("{x:.17e}")))
            .collect();
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))?;
    Ok(())
}

/// Numeric rows of a CSV file; a first row that does not parse is taken as a header.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(csv_err(path, format!("row {}: {e}", i + 1))),
        }
    }
    Ok(rows)
}

/// Recovers a uniform grid `(min, max, n)` from a column of sample positions.
fn uniform_axis(path: &Path, x: &[f64]) -> Result<(f64, f64, usize)> {
    let n = x.len();
    if n < 2 {
        return Err(csv_err(path, "need at least two rows"));
    }
    let step = (x[n - 1] - x[0]) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(csv_err(path, "first column must increase"));
    }
    for (k, xk) in x.iter().enumerate() {
        if (xk - (x[0] + k as f64 * step)).abs() > UNIFORM_TOL * step.max(1.0) * n as f64 {
            return Err(csv_err(path, format!("first column is not uniformly spaced at row {k}")));
        }
    }
    Ok((x[0], x[n - 1], n))
}

fn complex_columns(path: &Path, rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut x = Vec::with_capacity(rows.len());
    let mut z = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        match row.as_slice() {
            [a, re] => {
                x.push(*a);
                z.push(Complex64::new(*re, 0.0));
            }
            [a, re, im] => {
                x.push(*a);
                z.push(Complex64::new(*re, *im));
            }
            _ => return Err(csv_err(path, format!("row {i} has {} columns, want 2 or 3", row.len()))),
        }
    }
    Ok((x, z))
}

pub fn read_signal(path: &Path) -> Result<SampledSignal> {
    let (t, values) = complex_columns(path, &read_table(path)?)?;
    let (lo, hi, n) = uniform_axis(path, &t)?;
    SampledSignal::new(TimeGrid::new(lo, hi, n)?, values)
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumSamples> {
    let (e, values) = complex_columns(path, &read_table(path)?)?;
    let (lo, hi, n) = uniform_axis(path, &e)?;
    SpectrumSamples::new(SpectrumGrid::new(lo, hi, n)?, values)
}

/// Two-column `t, g` samples of a warp rate.
pub fn read_rate(path: &Path) -> Result<(TimeGrid, Vec<f64>)> {
    let rows = read_table(path)?;
    if let Some(i) = rows.iter().position(|r| r.len() != 2) {
        return Err(csv_err(path, format!("row {i} has {} columns, want 2 (t, g)", rows[i].len())));
    }
    let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (lo, hi, n) = uniform_axis(path, &t)?;
    Ok((TimeGrid::new(lo, hi, n)?, rows.iter().map(|r| r[1]).collect()))
}

fn complex_rows(x: &[f64], z: &[Complex64]) -> Vec<Vec<f64>> {
    x.iter().zip(z).map(|(a, v)| vec![*a, v.re, v.im]).collect()
}

pub fn write_signal(path: &Path, f: &SampledSignal) -> Result<()> {
    write_table(path, &["t", "re", "im"], &complex_rows(&f.grid.points(), &f.values))
}

pub fn write_spectrum(path: &Path, s: &SpectrumSamples) -> Result<()> {
    write_table(path, &["E", "re", "im"], &complex_rows(&s.grid.points(), &s.values))
}

/// Every `stride`-th time slice of the field (the last slice always included).
pub fn write_field(path: &Path, field: &SpaceTimeField, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let nt = field.tgrid.n;
    let mut ks: Vec<usize> = (0..nt).step_by(stride).collect();
    if ks.last() != Some(&(nt - 1)) {
        ks.push(nt - 1);
    }
    let qs = field.sgrid.points();
    let file = File::create(path).map_err(|e| csv_err(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "q,t,re,im")?;
    for k in ks {
        let t = field.tgrid.at(k);
        for (q, v) in qs.iter().zip(field.slice(k)) {
            writeln!(w, "{q:.17e},{t:.17e},{:.17e},{:.17e}", v.re, v.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let grid = TimeGrid::new(-3.0, 3.0, 101).unwrap();
        let f = SampledSignal::from_fn(grid, |t| Complex64::new((-t * t).exp(), (0.3 * t).sin() / 7.0));
        write_signal(&path, &f).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back.values, f.values);
        assert!((back.grid.dt() - grid.dt()).abs() < 1e-15);
    }

    #[test]
    fn two_column_input_and_bad_spacing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        std::fs::write(&path, "t,g\n0,1\n0.5,1.1\n1,1.2\n").unwrap();
        let (grid, g) = read_rate(&path).unwrap();
        assert_eq!(grid.n, 3);
        assert_eq!(g, vec![1.0, 1.1, 1.2]);
        std::fs::write(&path, "0,1\n0.4,1\n1,1\n").unwrap();
        assert!(read_rate(&path).is_err());
        std::fs::write(&path, "0,1,2,3\n1,1,1,1\n").unwrap();
        assert!(read_signal(&path).is_err());
    }
}
