//! CSV schemas and report emission.
//!
//! All files are written atomically (temp file + rename) and floats use
//! shortest round-trip decimal formatting, so a rerun with the same seed
//! reproduces outputs byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Result, SulphError};
use crate::grid::Field;
use crate::jacobi::BoundaryPath;

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp: PathBuf = path.with_extension(format!(
        "tmp.{}",
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Boundary path CSV, header `t,psi`.
pub fn write_path_csv(path: &Path, bp: &BoundaryPath) -> Result<()> {
    let mut out = String::from("t,psi\n");
    for (t, v) in bp.times().iter().zip(bp.values()) {
        out.push_str(&format!("{t},{v}\n"));
    }
    atomic_write(path, out.as_bytes())
}

pub fn read_path_csv(path: &Path) -> Result<BoundaryPath> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("t,psi") => {}
        other => {
            return Err(SulphError::Parse(format!(
                "expected path CSV header 't,psi', got {other:?}"
            )))
        }
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let t = parse_float(parts.next(), i, path)?;
        let v = parse_float(parts.next(), i, path)?;
        if parts.next().is_some() {
            return Err(SulphError::Parse(format!(
                "{}: row {i} has extra columns",
                path.display()
            )));
        }
        times.push(t);
        values.push(v);
    }
    BoundaryPath::new(times, values)
}

fn parse_float(part: Option<&str>, row: usize, path: &Path) -> Result<f64> {
    part.ok_or_else(|| {
        SulphError::Parse(format!("{}: row {row} is missing a column", path.display()))
    })?
    .trim()
    .parse::<f64>()
    .map_err(|e| SulphError::Parse(format!("{}: row {row}: {e}", path.display())))
}

/// Scalar field CSV, header `t,x,value`, row-major over (t, x).
pub fn write_field_csv(path: &Path, f: &Field) -> Result<()> {
    let mut out = String::from("t,x,value\n");
    for k in 0..f.grid.n_t {
        let t = f.grid.time(k);
        for (j, v) in f.row(k).iter().enumerate() {
            let x = f.grid.x(j);
            out.push_str(&format!("{t},{x},{v}\n"));
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Solution CSV, header `t,x,s,c`.
pub fn write_solution_csv(path: &Path, s: &Field, c: &Field) -> Result<()> {
    if s.grid != c.grid {
        return Err(SulphError::GridMismatch(
            "solution components live on different grids".into(),
        ));
    }
    let mut out = String::from("t,x,s,c\n");
    for k in 0..s.grid.n_t {
        let t = s.grid.time(k);
        for j in 0..s.grid.n_x {
            let x = s.grid.x(j);
            out.push_str(&format!("{t},{x},{},{}\n", s.get(k, j), c.get(k, j)));
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Key-value diagnostics report, one `key = value` per line.
pub fn write_report(path: &Path, rows: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k} = {v}\n"));
    }
    atomic_write(path, out.as_bytes())
}
