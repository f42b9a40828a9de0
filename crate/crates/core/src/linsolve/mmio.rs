//! Matrix Market coordinate I/O and residual-history CSV.

use std::fmt::Write as _;
use std::path::Path;

use super::sparse::{CsrMatrix, TripletBuilder};
use crate::error::IoError;

pub fn to_matrix_market(m: &CsrMatrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for i in 0..m.nrows() {
        let (cols, vals) = m.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let _ = writeln!(s, "{} {} {:.17e}", i + 1, j + 1, v);
        }
    }
    s
}

pub fn from_matrix_market(text: &str) -> Result<CsrMatrix, IoError> {
    let bad = |line: usize, message: &str| IoError::Format {
        what: "Matrix Market file",
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if h.len() < 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" || h[3] != "real" {
        return Err(bad(1, "expected a real coordinate matrix header"));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        _ => return Err(bad(1, "unsupported symmetry")),
    };
    let mut size: Option<(usize, usize, usize)> = None;
    let mut t = TripletBuilder::new(0, 0);
    let mut seen = 0;
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if f.len() != 3 {
                    return Err(bad(k + 1, "expected `rows cols nnz`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad(k + 1, "bad integer"));
                let (r, c, n) = (p(f[0])?, p(f[1])?, p(f[2])?);
                size = Some((r, c, n));
                t = TripletBuilder::with_capacity(r, c, n);
            }
            Some((r, c, _)) => {
                if f.len() != 3 {
                    return Err(bad(k + 1, "expected `i j value`"));
                }
                let i: usize = f[0].parse().map_err(|_| bad(k + 1, "bad row index"))?;
                let j: usize = f[1].parse().map_err(|_| bad(k + 1, "bad column index"))?;
                let v: f64 = f[2].parse().map_err(|_| bad(k + 1, "bad value"))?;
                if i == 0 || j == 0 || i > r || j > c {
                    return Err(bad(k + 1, "index out of range"));
                }
                t.add(i - 1, j - 1, v);
                if symmetric && i != j {
                    t.add(j - 1, i - 1, v);
                }
                seen += 1;
            }
        }
    }
    match size {
        Some((_, _, n)) if n == seen => Ok(t.finalize()),
        Some(_) => Err(bad(0, "entry count does not match header")),
        None => Err(bad(0, "missing size line")),
    }
}

pub fn write_matrix_market(m: &CsrMatrix, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, to_matrix_market(m)).map_err(|e| IoError::io(path, e))
}

pub fn read_matrix_market(path: &Path) -> Result<CsrMatrix, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    from_matrix_market(&text)
}

/// `iteration,relative_residual` rows.
pub fn residual_history_csv(history: &[f64]) -> String {
    let mut s = String::from("iteration,relative_residual\n");
    for (i, r) in history.iter().enumerate() {
        let _ = writeln!(s, "{i},{r:.17e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = CsrMatrix::from_dense(&[vec![1.0 / 3.0, 0.0], vec![-2.5e-17, 7.0]]);
        let back = from_matrix_market(&to_matrix_market(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn symmetric_storage_is_expanded() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2.0\n2 1 -1.0\n";
        let m = from_matrix_market(text).unwrap();
        assert_eq!(m.get(0, 1), -1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(from_matrix_market(text).is_err());
    }
}
