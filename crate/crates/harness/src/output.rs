//! CSV traces and summaries.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a trace
//! back reproduces every value bit for bit.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use zopt_core::IterationRecord;

use crate::error::{io_err, HarnessError, Result};
use crate::runner::RunRecord;
use crate::summary::SummaryRow;

pub const TRACE_HEADER: [&str; 8] = ["algo", "function", "dim", "trial", "iter", "best_value", "fevals", "elapsed_ms"];
pub const SUMMARY_HEADER: [&str; 6] = ["algo", "function", "dim", "mean_best", "std_best", "mean_elapsed_ms"];

/// Shortest string that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv { path: path.to_path_buf(), source }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(io_err(path))
}

/// One line per iteration of every record, in record order. Failed runs have no
/// iterations and contribute no lines.
pub fn write_trace_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER).map_err(csv_err(path))?;
    for r in records {
        for it in &r.trace {
            w.write_record([
                r.algo.id().to_string(),
                r.function.clone(),
                r.dim.to_string(),
                r.trial.to_string(),
                it.iteration.to_string(),
                format_float(it.best_value),
                it.fevals.to_string(),
                format_float(it.elapsed_ms),
            ])
            .map_err(csv_err(path))?;
        }
    }
    finish(w, path)
}

/// The standard deviation column is the population standard deviation.
pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.algo.id().to_string(),
            r.function.clone(),
            r.dim.to_string(),
            format_float(r.mean_best),
            format_float(r.std_best),
            format_float(r.mean_elapsed_ms),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| HarnessError::Invalid(format!("trace line {line}: bad {} '{raw}'", TRACE_HEADER[i])))
}

/// Reads a trace file back into records; consecutive lines with the same
/// `(algo, function, dim, trial)` form one record.
pub fn read_trace_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = reader.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(HarnessError::Invalid(format!("{}: unexpected header", path.display())));
    }
    let mut out: Vec<RunRecord> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let algo = field(&rec, 0, line)?;
        let function: String = field(&rec, 1, line)?;
        let dim = field(&rec, 2, line)?;
        let trial = field(&rec, 3, line)?;
        let it = IterationRecord {
            iteration: field(&rec, 4, line)?,
            best_value: field(&rec, 5, line)?,
            fevals: field(&rec, 6, line)?,
            elapsed_ms: field(&rec, 7, line)?,
        };
        match out.last_mut() {
            Some(r) if r.algo == algo && r.function == function && r.dim == dim && r.trial == trial => r.trace.push(it),
            _ => out.push(RunRecord { algo, function, dim, trial, trace: vec![it], best_point: Vec::new(), error: None }),
        }
    }
    Ok(out)
}

/// Writes `text` to `path`.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::Algorithm;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0, 1e-300, 123456.789, f64::INFINITY, -2.5e17, 5e-324] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(1.0), "1.0");
    }

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trace_csv(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{}\n", TRACE_HEADER.join(",")));
        assert!(read_trace_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn one_record_one_line_per_iteration() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let trace = (0..3)
            .map(|i| IterationRecord { iteration: i, best_value: 0.5 / (i + 1) as f64, fevals: 10 * i as u64, elapsed_ms: 0.25 })
            .collect();
        let rec = RunRecord {
            algo: Algorithm::Sa,
            function: "ackley".into(),
            dim: 4,
            trial: 1,
            trace,
            best_point: Vec::new(),
            error: None,
        };
        write_trace_csv(std::slice::from_ref(&rec), &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(2).unwrap(), "sa,ackley,4,1,1,0.25,10,0.25");
        assert!(!text.contains('\r'));
        assert_eq!(read_trace_csv(&p).unwrap(), vec![rec]);
    }
}
