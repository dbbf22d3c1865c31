//! CSV/JSON emission and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use xideform::zerofind::{ZeroMethod, ZeroRecord};

pub fn method_tag(m: ZeroMethod) -> &'static str {
    match m {
        ZeroMethod::Newton => "newton",
        ZeroMethod::Unrefined => "unrefined",
    }
}

/// `re,im,residual,method`, one row per zero at the given position.
pub fn zeros_csv<'a>(rows: impl IntoIterator<Item = (Complex64, &'a ZeroRecord)>) -> String {
    let mut out = String::from("re,im,residual,method\n");
    for (z, r) in rows {
        // Display for f64 is the shortest decimal that round-trips
        let _ = writeln!(out, "{},{},{},{}", z.re, z.im, r.residual, method_tag(r.method));
    }
    out
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Files written by one command; removed again unless the command succeeds.
#[derive(Default)]
pub struct OutputSet {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, path: PathBuf, contents: &str) -> std::io::Result<()> {
        write_atomic(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_numbers() {
        let r = ZeroRecord {
            center: Complex64::new(0.1 + 0.2, 1.0 / 3.0),
            residual: 1e-15,
            newton_steps: 3,
            method: ZeroMethod::Newton,
            step_log: vec![],
        };
        let csv = zeros_csv([(r.center, &r)]);
        let row = csv.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(cols[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(cols[3], "newton");
    }

    #[test]
    fn uncommitted_outputs_are_removed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        {
            let mut o = OutputSet::new();
            o.write(p.clone(), "x").unwrap();
            assert!(p.exists());
        }
        assert!(!p.exists());
        let mut o = OutputSet::new();
        o.write(p.clone(), "y").unwrap();
        o.commit();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "y");
    }
}
