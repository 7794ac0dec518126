use std::path::Path;

use crate::error::{Error, Result};

use super::SweepRecord;

pub const CSV_HEADER: [&str; 7] = ["scheme", "h", "h_over_T", "error", "seconds", "stable", "starter_converged"];

/// One row per record. Unstable points leave `error` empty. Floats use the
/// shortest representation that reads back to the same value.
pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Csv { path: path.to_path_buf(), source: e };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.scheme.clone(),
            r.h.to_string(),
            r.h_over_t.to_string(),
            r.error.map(|e| e.to_string()).unwrap_or_default(),
            r.seconds.to_string(),
            r.stable.to_string(),
            r.starter_converged.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let csv_err = |e: csv::Error| Error::Csv { path: path.to_path_buf(), source: e };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            source_name: path.display().to_string(),
            line: 1,
            column: 1,
            message: format!("unexpected header {}", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            source_name: path.display().to_string(),
            line,
            column: 1,
            message: format!("bad {what}"),
        };
        let num = |j: usize, what: &str| row[j].trim().parse::<f64>().map_err(|_| bad(what));
        let flag = |j: usize, what: &str| row[j].trim().parse::<bool>().map_err(|_| bad(what));
        out.push(SweepRecord {
            scheme: row[0].to_string(),
            h: num(1, "h")?,
            h_over_t: num(2, "h_over_T")?,
            error: if row[3].trim().is_empty() { None } else { Some(num(3, "error")?) },
            seconds: num(4, "seconds")?,
            stable: flag(5, "stable")?,
            starter_converged: flag(6, "starter_converged")?,
        });
    }
    Ok(out)
}
