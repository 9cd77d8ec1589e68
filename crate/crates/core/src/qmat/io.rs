//! Text matrix format.
//!
//! ```text
//! QMAT <nrows> <ncols>
//! w x y z        (one line per entry, row-major)
//! ```
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! reading a written file reproduces every bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

use super::QMatrix;

pub fn format_qmatrix(a: &QMatrix) -> Result<String> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut out = String::with_capacity(32 + a.nrows() * a.ncols() * 48);
    writeln!(out, "QMAT {} {}", a.nrows(), a.ncols()).expect("string write");
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let q = a[(i, j)];
            writeln!(out, "{} {} {} {}", q.w, q.x, q.y, q.z).expect("string write");
        }
    }
    Ok(out)
}

pub fn write_qmatrix(a: &QMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_qmatrix(a)?)?;
    Ok(())
}

pub fn read_qmatrix(path: impl AsRef<Path>) -> Result<QMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_qmatrix(&text, path)
}

/// Parse the text format; `origin` is used only in error messages.
pub fn parse_qmatrix(text: &str, origin: &Path) -> Result<QMatrix> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "QMAT" {
        return Err(err(hline + 1, format!("bad header {header:?}")));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| err(hline + 1, format!("bad dimension {s:?}: {e}")))
    };
    let (nrows, ncols) = (dim(fields[1])?, dim(fields[2])?);
    if nrows == 0 || ncols == 0 {
        return Err(err(hline + 1, "dimensions must be positive".into()));
    }

    let expected = nrows * ncols;
    let mut rows = vec![Quaternion::ZERO; expected];
    let mut count = 0;
    for (lno, line) in lines {
        if count == expected {
            return Err(err(lno + 1, format!("more than {expected} entries")));
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(err(lno + 1, format!("expected 4 components, found {}", parts.len())));
        }
        let mut c = [0.0; 4];
        for (slot, s) in c.iter_mut().zip(&parts) {
            let v: f64 = s
                .parse()
                .map_err(|e| err(lno + 1, format!("bad number {s:?}: {e}")))?;
            if !v.is_finite() {
                return Err(err(lno + 1, format!("non-finite value {s:?}")));
            }
            *slot = v;
        }
        rows[count] = Quaternion::from_components(c);
        count += 1;
    }
    if count != expected {
        return Err(err(
            text.lines().count(),
            format!("expected {expected} entries, found {count}"),
        ));
    }
    Ok(QMatrix::from_fn(nrows, ncols, |i, j| rows[i * ncols + j]))
}
