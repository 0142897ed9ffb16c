//! The results table: a delimited text file, one row per replicate, with a
//! fixed documented column order and floats at 17 significant digits.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 16] = [
    "class_id", "f0_id", "n", "design", "replicate", "seed", "err_fixed", "err_random", "W_hat",
    "W", "r_star", "t_star", "bound_fixed", "bound_random", "converged", "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub class_id: String,
    pub f0_id: String,
    pub n: usize,
    pub design: String,
    pub replicate: usize,
    pub seed: u64,
    pub err_fixed: f64,
    pub err_random: f64,
    pub w_hat: f64,
    pub w: f64,
    pub r_star: f64,
    pub t_star: f64,
    pub bound_fixed: f64,
    pub bound_random: f64,
    pub converged: bool,
    pub wall_ms: u64,
}

/// 17 significant digits: enough to reproduce any f64 bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    pub fn key(&self) -> (String, usize, usize) {
        (self.f0_id.clone(), self.n, self.replicate)
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.class_id,
            self.f0_id,
            self.n,
            self.design,
            self.replicate,
            self.seed,
            fmt_f64(self.err_fixed),
            fmt_f64(self.err_random),
            fmt_f64(self.w_hat),
            fmt_f64(self.w),
            fmt_f64(self.r_star),
            fmt_f64(self.t_star),
            fmt_f64(self.bound_fixed),
            fmt_f64(self.bound_random),
            self.converged,
            self.wall_ms
        )
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != COLUMNS.len() {
            return Err(Error::contract(format!(
                "result row has {} fields, expected {}",
                parts.len(),
                COLUMNS.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            parts[i]
                .parse()
                .map_err(|e| Error::contract(format!("field {}: {e}", COLUMNS[i])))
        };
        Ok(ResultRow {
            class_id: parts[0].to_string(),
            f0_id: parts[1].to_string(),
            n: parts[2].parse().map_err(|e| Error::contract(format!("n: {e}")))?,
            design: parts[3].to_string(),
            replicate: parts[4].parse().map_err(|e| Error::contract(format!("replicate: {e}")))?,
            seed: parts[5].parse().map_err(|e| Error::contract(format!("seed: {e}")))?,
            err_fixed: f(6)?,
            err_random: f(7)?,
            w_hat: f(8)?,
            w: f(9)?,
            r_star: f(10)?,
            t_star: f(11)?,
            bound_fixed: f(12)?,
            bound_random: f(13)?,
            converged: parts[14]
                .parse()
                .map_err(|e| Error::contract(format!("converged: {e}")))?,
            wall_ms: parts[15].parse().map_err(|e| Error::contract(format!("wall_ms: {e}")))?,
        })
    }
}

pub fn header() -> String {
    COLUMNS.join(",")
}

pub struct ResultWriter {
    file: std::fs::File,
}

impl ResultWriter {
    /// Open for append; writes the header when the file is new or empty.
    pub fn open(path: &Path) -> Result<Self> {
        let existing = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        if existing == 0 {
            writeln!(file, "{}", header())?;
        }
        Ok(ResultWriter { file })
    }

    pub fn append(&mut self, rows: &[ResultRow]) -> Result<()> {
        let mut buf = String::new();
        for r in rows {
            buf.push_str(&r.to_line());
            buf.push('\n');
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if line != header() {
                return Err(Error::contract(format!("unexpected results header: {line}")));
            }
            continue;
        }
        rows.push(ResultRow::from_line(&line)?);
    }
    Ok(rows)
}

/// Keys already present in a (possibly partial) results file.
pub fn completed_keys(path: &Path) -> Result<HashSet<(String, usize, usize)>> {
    if !path.exists() {
        return Ok(HashSet::new());
    }
    Ok(read_rows(path)?.into_iter().map(|r| r.key()).collect())
}

/// Canonical ordering: sort by (class, f0, n, design, replicate).
pub fn canonical_sort(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (&a.class_id, &a.f0_id, a.n, &a.design, a.replicate).cmp(&(
            &b.class_id,
            &b.f0_id,
            b.n,
            &b.design,
            b.replicate,
        ))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            class_id: "bounded-isotonic".into(),
            f0_id: "zero".into(),
            n: 64,
            design: "random".into(),
            replicate: 3,
            seed: 12345678901234567,
            err_fixed: 0.1234567890123456789,
            err_random: 1.0 / 3.0,
            w_hat: f64::MIN_POSITIVE,
            w: 2.5e-7,
            r_star: 0.5,
            t_star: 1.999999999999999,
            bound_fixed: 1e-12,
            bound_random: 0.0,
            converged: true,
            wall_ms: 17,
        }
    }

    #[test]
    fn line_round_trip_is_bit_exact() {
        let r = row();
        let s = r.to_line();
        let back = ResultRow::from_line(&s).unwrap();
        assert_eq!(r, back);
        assert!(back.err_random.to_bits() == r.err_random.to_bits());
    }

    #[test]
    fn file_round_trip_and_resume_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("res.csv");
        let mut w = ResultWriter::open(&path).unwrap();
        let mut r2 = row();
        r2.replicate = 4;
        w.append(&[row(), r2.clone()]).unwrap();
        drop(w);
        let rows = read_rows(&path).unwrap();
        assert_eq!(rows.len(), 2);
        let keys = completed_keys(&path).unwrap();
        assert!(keys.contains(&("zero".into(), 64, 3)));
        assert!(keys.contains(&("zero".into(), 64, 4)));
        // appending resumes without rewriting the header
        let mut w = ResultWriter::open(&path).unwrap();
        let mut r3 = row();
        r3.replicate = 5;
        w.append(&[r3]).unwrap();
        assert_eq!(read_rows(&path).unwrap().len(), 3);
    }
}
