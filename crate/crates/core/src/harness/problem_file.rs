//! Plain-text pencil files.
//!
//! ```text
//! dim 2
//! matrix A
//! 0.5 0
//! 0 0
//! 0 0
//! 3 0
//! matrix B
//! ...
//! truth (0.5,0,1);(3,0,1)
//! matrix Q
//! ...
//! matrix QT
//! ...
//! matrix PT
//! ...
//! ```
//!
//! Entries are row-major, one `re im` pair per line. The `truth` section is
//! optional; its block list is in canonical order (finite blocks first).

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use crate::dense::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::forge::{GroundTruth, JordanSpec};
use crate::moments::MatrixPencil;

fn write_matrix(w: &mut impl Write, name: &str, m: &ComplexMatrix) -> io::Result<()> {
    writeln!(w, "matrix {name}")?;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            writeln!(w, "{:e} {:e}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn write_problem(w: &mut impl Write, pencil: &MatrixPencil, truth: Option<&GroundTruth>) -> io::Result<()> {
    writeln!(w, "dim {}", pencil.dim())?;
    write_matrix(w, "A", pencil.a())?;
    write_matrix(w, "B", pencil.b())?;
    if let Some(t) = truth {
        writeln!(w, "truth {}", JordanSpec::new(t.blocks.clone()))?;
        write_matrix(w, "Q", &t.q)?;
        write_matrix(w, "QT", &t.q_tilde)?;
        write_matrix(w, "PT", &t.p_tilde)?;
    }
    Ok(())
}

pub fn save_problem(path: &Path, pencil: &MatrixPencil, truth: Option<&GroundTruth>) -> Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    write_problem(&mut w, pencil, truth)?;
    w.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank line, with comments stripped.
    fn next(&mut self) -> Result<Option<String>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.split('#').next().unwrap_or("").trim();
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn err(&self, field: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn expect(&mut self, field: &str) -> Result<String> {
        self.next()?.ok_or_else(|| self.err(field, "unexpected end of file"))
    }

    fn matrix(&mut self, name: &str, n: usize) -> Result<ComplexMatrix> {
        let header = self.expect(name)?;
        if header != format!("matrix {name}") {
            return Err(self.err(name, format!("expected `matrix {name}`, found `{header}`")));
        }
        let mut rows = vec![C64::new(0.0, 0.0); n * n];
        for z in rows.iter_mut() {
            let l = self.expect(name)?;
            let mut it = l.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(re)), Some(Ok(im)), None) => *z = C64::new(re, im),
                _ => return Err(self.err(name, format!("expected `re im`, found `{l}`"))),
            }
        }
        Ok(ComplexMatrix::from_row_major(n, n, &rows)?)
    }
}

pub fn read_problem(r: impl BufRead) -> Result<(MatrixPencil, Option<GroundTruth>)> {
    let mut lines = Lines {
        inner: r.lines(),
        line: 0,
    };
    let dim = lines.expect("dim")?;
    let n: usize = dim
        .strip_prefix("dim")
        .and_then(|d| d.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| lines.err("dim", format!("expected `dim <n>`, found `{dim}`")))?;
    let a = lines.matrix("A", n)?;
    let b = lines.matrix("B", n)?;
    let pencil = MatrixPencil::new(a, b)?;
    let truth = match lines.next()? {
        None => None,
        Some(t) => {
            let spec: JordanSpec = t
                .strip_prefix("truth")
                .ok_or_else(|| lines.err("truth", format!("expected `truth <blocks>`, found `{t}`")))?
                .parse()
                .map_err(|e: Error| lines.err("truth", e.to_string()))?;
            if spec.dim() != n {
                return Err(lines.err("truth", format!("blocks cover {} rows, pencil has {n}", spec.dim())));
            }
            let q = lines.matrix("Q", n)?;
            let qt = lines.matrix("QT", n)?;
            let pt = lines.matrix("PT", n)?;
            Some(GroundTruth::from_parts(q, qt, pt, spec.blocks).map_err(|e| lines.err("truth", e.to_string()))?)
        }
    };
    if let Some(extra) = lines.next()? {
        return Err(lines.err("end", format!("trailing content `{extra}`")));
    }
    Ok((pencil, truth))
}

pub fn load_problem(path: &Path) -> Result<(MatrixPencil, Option<GroundTruth>)> {
    read_problem(BufReader::new(fs::File::open(path)?))
}
