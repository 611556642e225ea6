//! Per-sample CSV files.
//!
//! `diagnostics.csv` has the stable schema
//! `t,H0..H{N},Hbar0..Hbar{N},Phi0..Phi{N},sup_ubar,sup_grad_ubar,inj,visc,dEdt`.
//! The exact moment rates the ladder checks need live in a sidecar
//! `rates.csv` with `t,dHbar0dt..dHbar{N}dt,nonlinear`. Every float is
//! written with 17 significant digits, so both files round-trip exactly.

use std::fs::File;
use std::path::Path;

use thiserror::Error;

use crate::diagnostics::DiagnosticsRecord;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const RATES_FILE: &str = "rates.csv";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("CSV I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{file}: header does not match the schema (expected {expected:?})")]
    Header { file: String, expected: String },
    #[error("{file} line {line}: {message}")]
    Value { file: String, line: usize, message: String },
    #[error("{0} has no data rows")]
    Empty(String),
}

pub fn diagnostics_header(n_max: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for prefix in ["H", "Hbar", "Phi"] {
        h.extend((0..=n_max).map(|n| format!("{prefix}{n}")));
    }
    h.extend(["sup_ubar", "sup_grad_ubar", "inj", "visc", "dEdt"].map(String::from));
    h
}

pub fn rates_header(n_max: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..=n_max).map(|n| format!("dHbar{n}dt")));
    h.push("nonlinear".into());
    h
}

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn diagnostics_row(r: &DiagnosticsRecord) -> Vec<String> {
    let mut v = vec![r.t];
    v.extend(&r.h);
    v.extend(&r.hbar);
    v.extend(&r.phi);
    v.extend([r.sup_ubar, r.sup_grad_ubar, r.inj, r.visc, r.de_dt]);
    v.into_iter().map(format_value).collect()
}

fn rates_row(r: &DiagnosticsRecord) -> Vec<String> {
    let mut v = vec![r.t];
    v.extend(&r.dhbar_dt);
    v.push(r.nonlinear);
    v.into_iter().map(format_value).collect()
}

/// Streams records to both files, flushing after every row so a crashed run
/// leaves readable output.
pub struct RecordWriter {
    diag: csv::Writer<File>,
    rates: csv::Writer<File>,
}

impl RecordWriter {
    pub fn create(dir: &Path, n_max: usize) -> Result<Self, CsvError> {
        let mut diag = csv::Writer::from_path(dir.join(DIAGNOSTICS_FILE))?;
        let mut rates = csv::Writer::from_path(dir.join(RATES_FILE))?;
        diag.write_record(diagnostics_header(n_max))?;
        rates.write_record(rates_header(n_max))?;
        diag.flush()?;
        rates.flush()?;
        Ok(Self { diag, rates })
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> Result<(), CsvError> {
        self.diag.write_record(diagnostics_row(r))?;
        self.rates.write_record(rates_row(r))?;
        self.diag.flush()?;
        self.rates.flush()?;
        Ok(())
    }
}

/// Writes a whole series at once.
pub fn write_records(dir: &Path, records: &[DiagnosticsRecord]) -> Result<(), CsvError> {
    let n_max = records.first().map_or(0, |r| r.n_max());
    let mut w = RecordWriter::create(dir, n_max)?;
    for r in records {
        w.write(r)?;
    }
    Ok(())
}

fn read_table(path: &Path, header_for: impl Fn(usize) -> Vec<String>, extra: usize) -> Result<Vec<Vec<f64>>, CsvError> {
    let file = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    // Solve width = 1 + k (N_max + 1) + extra for N_max and compare exactly.
    let per = header_for(0).len() - 1 - extra;
    let n_max = (header.len().saturating_sub(1 + extra) / per.max(1)).saturating_sub(1);
    let expected = header_for(n_max);
    if header != expected {
        return Err(CsvError::Header {
            file,
            expected: expected.join(","),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CsvError::Value {
                file: file.clone(),
                line: i + 2,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CsvError::Empty(file));
    }
    Ok(rows)
}

/// Reads `diagnostics.csv` and, when present, `rates.csv` from `dir`.
///
/// Without the sidecar the moment rates are rebuilt by finite differences
/// (second order inside, first order at the ends) and the nonlinear term is
/// taken from the energy balance; the second flag in the result reports this.
pub fn read_records(dir: &Path) -> Result<(Vec<DiagnosticsRecord>, bool), CsvError> {
    let diag = read_table(&dir.join(DIAGNOSTICS_FILE), diagnostics_header, 5)?;
    let width = diag[0].len();
    let n_max = (width - 6) / 3 - 1;
    let mut records: Vec<DiagnosticsRecord> = diag
        .iter()
        .map(|row| {
            let m = n_max + 1;
            DiagnosticsRecord {
                t: row[0],
                h: row[1..1 + m].to_vec(),
                hbar: row[1 + m..1 + 2 * m].to_vec(),
                phi: row[1 + 2 * m..1 + 3 * m].to_vec(),
                sup_ubar: row[1 + 3 * m],
                sup_grad_ubar: row[2 + 3 * m],
                inj: row[3 + 3 * m],
                visc: row[4 + 3 * m],
                de_dt: row[5 + 3 * m],
                nonlinear: 0.0,
                dhbar_dt: vec![0.0; m],
            }
        })
        .collect();

    let rates_path = dir.join(RATES_FILE);
    let exact = rates_path.exists();
    if exact {
        let rates = read_table(&rates_path, rates_header, 1)?;
        if rates.len() != records.len() || rates[0].len() != n_max + 3 {
            return Err(CsvError::Value {
                file: rates_path.display().to_string(),
                line: 0,
                message: "row count or width differs from diagnostics.csv".into(),
            });
        }
        for (i, (rec, row)) in records.iter_mut().zip(&rates).enumerate() {
            if row[0] != rec.t {
                return Err(CsvError::Value {
                    file: rates_path.display().to_string(),
                    line: i + 2,
                    message: format!("time {} does not match diagnostics.csv ({})", row[0], rec.t),
                });
            }
            rec.dhbar_dt = row[1..n_max + 2].to_vec();
            rec.nonlinear = row[n_max + 2];
        }
    } else {
        fill_rates_by_differences(&mut records);
    }
    Ok((records, exact))
}

fn fill_rates_by_differences(records: &mut [DiagnosticsRecord]) {
    let len = records.len();
    for i in 0..len {
        let (a, b) = match (i, len) {
            (_, 1) => (0, 0),
            (0, _) => (0, 1),
            (i, len) if i == len - 1 => (i - 1, i),
            (i, _) => (i - 1, i + 1),
        };
        let dt = records[b].t - records[a].t;
        let rates: Vec<f64> = (0..records[i].hbar.len())
            .map(|n| if dt > 0.0 { (records[b].hbar[n] - records[a].hbar[n]) / dt } else { 0.0 })
            .collect();
        let r = &mut records[i];
        r.dhbar_dt = rates;
        r.nonlinear = r.de_dt - r.inj + r.visc;
    }
}

/// Writes a small table with the given header.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            h: vec![1.0 / 3.0, 2.0, 3.0, t],
            hbar: vec![0.1, 0.2 + t, 0.3, 0.4],
            phi: vec![0.0, 1e-300, 5.0, 6.0],
            sup_ubar: 7.0,
            sup_grad_ubar: std::f64::consts::PI,
            inj: 9.0,
            visc: 10.0,
            de_dt: -1.0,
            nonlinear: 1e-17,
            dhbar_dt: vec![0.5, -0.5, 1.5, 2.5],
        }
    }

    #[test]
    fn header_schema() {
        assert_eq!(
            diagnostics_header(2).join(","),
            "t,H0,H1,H2,Hbar0,Hbar1,Hbar2,Phi0,Phi1,Phi2,sup_ubar,sup_grad_ubar,inj,visc,dEdt"
        );
        assert_eq!(rates_header(1).join(","), "t,dHbar0dt,dHbar1dt,nonlinear");
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec(0.0), rec(0.1), rec(0.2)];
        write_records(dir.path(), &recs).unwrap();
        let (back, exact) = read_records(dir.path()).unwrap();
        assert!(exact);
        assert_eq!(back, recs);
    }

    #[test]
    fn differences_fill_missing_rates() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec(0.0), rec(0.5), rec(1.0)];
        write_records(dir.path(), &recs).unwrap();
        std::fs::remove_file(dir.path().join(RATES_FILE)).unwrap();
        let (back, exact) = read_records(dir.path()).unwrap();
        assert!(!exact);
        for r in &back {
            assert!((r.dhbar_dt[1] - 1.0).abs() < 1e-12);
            assert_eq!(r.dhbar_dt[0], 0.0);
            assert_eq!(r.nonlinear, -1.0 - 9.0 + 10.0);
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(DIAGNOSTICS_FILE), "t,H0,Hbar0\n0,1,2\n").unwrap();
        assert!(matches!(read_records(dir.path()), Err(CsvError::Header { .. })));
    }
}
