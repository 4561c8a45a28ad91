//! Problem files: MatrixMarket (`array` and `coordinate`, real general) and
//! RFC 4180 CSV for the matrix; single-column text, CSV or MatrixMarket for
//! the right-hand side.
//!
//! Parse errors report 1-based line and column. For CSV the column is the
//! field index.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::lls::{build_problem, LlsProblem};

const MM_BANNER: &str = "%%MatrixMarket";

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn number(tok: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, column, format!("'{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, format!("'{tok}' is not finite")));
    }
    Ok(v)
}

fn index(tok: &str, line: usize, column: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, column, format!("'{tok}' is not a nonnegative integer")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmLayout {
    Array,
    Coordinate,
}

/// Parses a MatrixMarket `matrix` in `array` or `coordinate` layout with
/// `real` (or `integer`) entries and `general` symmetry.
pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, banner) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty MatrixMarket file"))?;
    let head = tokens(banner);
    let word = |k: usize| head.get(k).map(|(_, t)| t.to_ascii_lowercase());
    if head.first().map(|(_, t)| *t) != Some(MM_BANNER) {
        return Err(parse_err(ln, 1, "missing %%MatrixMarket banner"));
    }
    if word(1).as_deref() != Some("matrix") {
        return Err(parse_err(ln, head.get(1).map_or(1, |t| t.0), "only 'matrix' objects are supported"));
    }
    let layout = match word(2).as_deref() {
        Some("array") => MmLayout::Array,
        Some("coordinate") => MmLayout::Coordinate,
        _ => {
            return Err(parse_err(
                ln,
                head.get(2).map_or(1, |t| t.0),
                "layout must be 'array' or 'coordinate'",
            ))
        }
    };
    if !matches!(word(3).as_deref(), Some("real" | "integer" | "double")) {
        return Err(parse_err(ln, head.get(3).map_or(1, |t| t.0), "field must be 'real'"));
    }
    if word(4).as_deref() != Some("general") {
        return Err(parse_err(ln, head.get(4).map_or(1, |t| t.0), "symmetry must be 'general'"));
    }

    let mut data_lines = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sl, size_line) = data_lines
        .next()
        .ok_or_else(|| parse_err(ln + 1, 1, "missing size line"))?;
    let size = tokens(size_line);
    let want = if layout == MmLayout::Array { 2 } else { 3 };
    if size.len() != want {
        return Err(parse_err(sl, 1, format!("size line needs {want} integers")));
    }
    let rows = index(size[0].1, sl, size[0].0)?;
    let cols = index(size[1].1, sl, size[1].0)?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(sl, 1, "matrix dimensions must be positive"));
    }
    let mut data = vec![0.0; rows * cols];

    match layout {
        MmLayout::Array => {
            let mut k = 0usize;
            let mut last_line = sl;
            for (l, line) in data_lines {
                last_line = l;
                for (c, tok) in tokens(line) {
                    if k >= data.len() {
                        return Err(parse_err(l, c, "more entries than rows*cols"));
                    }
                    data[k] = number(tok, l, c)?;
                    k += 1;
                }
            }
            if k != data.len() {
                return Err(parse_err(
                    last_line + 1,
                    1,
                    format!("expected {} entries, found {k}", data.len()),
                ));
            }
        }
        MmLayout::Coordinate => {
            let nnz = index(size[2].1, sl, size[2].0)?;
            let mut seen = 0usize;
            let mut last_line = sl;
            for (l, line) in data_lines {
                last_line = l;
                let t = tokens(line);
                if t.len() != 3 {
                    return Err(parse_err(l, 1, "coordinate entries need 'row col value'"));
                }
                let i = index(t[0].1, l, t[0].0)?;
                let j = index(t[1].1, l, t[1].0)?;
                if i == 0 || i > rows {
                    return Err(parse_err(l, t[0].0, format!("row index {i} out of range 1..={rows}")));
                }
                if j == 0 || j > cols {
                    return Err(parse_err(l, t[1].0, format!("column index {j} out of range 1..={cols}")));
                }
                data[(i - 1) + (j - 1) * rows] += number(t[2].1, l, t[2].0)?;
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    last_line + 1,
                    1,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
        }
    }
    DenseMatrix::from_col_major(rows, cols, data)
}

/// CSV records (header detection included): returns numeric rows and the
/// 1-based line of each.
fn csv_numeric_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(idx + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, usize>> = rec
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|_| c + 1))
            .collect();
        if out.is_empty() && idx == 0 && parsed.iter().all(|p| p.is_err()) {
            // Header row.
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (c, p) in parsed.into_iter().enumerate() {
            match p {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(_) => return Err(parse_err(line, c + 1, "value is not finite")),
                Err(col) => {
                    return Err(parse_err(
                        line,
                        col,
                        format!("'{}' is not a number", rec.get(c).unwrap_or("")),
                    ))
                }
            }
        }
        out.push((line, row));
    }
    Ok(out)
}

/// Parses a CSV matrix, one row per record, with an optional header row.
pub fn parse_csv_matrix(text: &str) -> Result<DenseMatrix> {
    let rows = csv_numeric_rows(text)?;
    let Some((_, first)) = rows.first() else {
        return Err(parse_err(1, 1, "no numeric rows"));
    };
    let n = first.len();
    for (line, r) in &rows {
        if r.len() != n {
            return Err(parse_err(*line, r.len().min(n) + 1, format!("expected {n} fields, found {}", r.len())));
        }
    }
    let data: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r).collect();
    DenseMatrix::from_rows(&data)
}

/// Parses a matrix, detecting MatrixMarket by its banner and CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    if text.trim_start().starts_with(MM_BANNER) {
        parse_matrix_market(text.trim_start())
    } else {
        parse_csv_matrix(text)
    }
}

/// Parses a right-hand side: MatrixMarket with one column, or one value per
/// line (plain text or single-column CSV, optional header).
pub fn parse_rhs(text: &str) -> Result<DenseVector> {
    if text.trim_start().starts_with(MM_BANNER) {
        let m = parse_matrix_market(text.trim_start())?;
        if m.cols() != 1 {
            return Err(Error::Dimension(format!(
                "right-hand side must have one column, found {}",
                m.cols()
            )));
        }
        return Ok(m.column_vector(0));
    }
    let rows = csv_numeric_rows(text)?;
    let mut values = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        if r.len() != 1 {
            return Err(parse_err(line, 2, format!("expected one value per line, found {}", r.len())));
        }
        values.push(r[0]);
    }
    if values.is_empty() {
        return Err(parse_err(1, 1, "no values"));
    }
    DenseVector::new(values)
}

/// Formats with 17 significant digits, which round-trips every f64.
pub fn format_exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// MatrixMarket `array real general` text.
pub fn write_matrix_market(m: &DenseMatrix) -> String {
    let mut s = format!("{MM_BANNER} matrix array real general\n{} {}\n", m.rows(), m.cols());
    for v in m.as_col_major() {
        s.push_str(&format_exact(*v));
        s.push('\n');
    }
    s
}

/// One value per line.
pub fn write_rhs(v: &DenseVector) -> String {
    v.iter().map(|x| format_exact(*x) + "\n").collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&read(path.as_ref())?)
}

pub fn read_rhs_file(path: impl AsRef<Path>) -> Result<DenseVector> {
    parse_rhs(&read(path.as_ref())?)
}

/// Reads both files and validates the pair as a least-squares problem.
pub fn ingest(matrix_path: impl AsRef<Path>, rhs_path: impl AsRef<Path>) -> Result<LlsProblem> {
    let a = read_matrix_file(matrix_path)?;
    let b = read_rhs_file(rhs_path)?;
    build_problem(a, b)
}
