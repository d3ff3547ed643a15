//! Matrix Market I/O: coordinate format for sparse matrices, array format
//! for dense matrices. Indices are 1-based on disk, values are written in
//! shortest round-trip form so write-then-read is bit-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

const COORD_HEADER: &str = "%%MatrixMarket matrix coordinate real general";
const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

pub fn write_sparse<W: Write>(mut w: W, m: &SparseMatrix) -> Result<()> {
    writeln!(w, "{}", COORD_HEADER)?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn read_sparse<R: BufRead>(r: R) -> Result<SparseMatrix> {
    let mut lines = content_lines(r);
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    if header.trim() != COORD_HEADER {
        return Err(Error::Parse(format!(
            "expected coordinate header, got {:?}",
            header.trim()
        )));
    }
    let size_line = lines
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))??;
    let dims = parse_numbers(&size_line, 3)?;
    let (nrows, ncols, nnz) = (dims[0] as usize, dims[1] as usize, dims[2] as usize);
    let mut triplets = Vec::with_capacity(nnz);
    for line in lines {
        let line = line?;
        let f = parse_numbers(&line, 3)?;
        let (i, j) = (f[0] as usize, f[1] as usize);
        if i == 0 || j == 0 {
            return Err(Error::Parse("coordinate indices are 1-based".into()));
        }
        triplets.push((i - 1, j - 1, f[2]));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            nnz,
            triplets.len()
        )));
    }
    SparseMatrix::from_triplets(nrows, ncols, &triplets)
}

pub fn write_dense<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "{}", ARRAY_HEADER)?;
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    // array format lists entries in column-major order
    for v in m.data() {
        writeln!(w, "{}", v)?;
    }
    Ok(())
}

pub fn read_dense<R: BufRead>(r: R) -> Result<DenseMatrix> {
    let mut lines = content_lines(r);
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    if header.trim() != ARRAY_HEADER {
        return Err(Error::Parse(format!(
            "expected array header, got {:?}",
            header.trim()
        )));
    }
    let size_line = lines
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))??;
    let dims = parse_numbers(&size_line, 2)?;
    let (nrows, ncols) = (dims[0] as usize, dims[1] as usize);
    let mut data = Vec::with_capacity(nrows * ncols);
    for line in lines {
        let line = line?;
        data.push(parse_numbers(&line, 1)?[0]);
    }
    DenseMatrix::from_column_major(nrows, ncols, data)
}

pub fn save_sparse<P: AsRef<Path>>(path: P, m: &SparseMatrix) -> Result<()> {
    write_sparse(BufWriter::new(File::create(path)?), m)
}

pub fn load_sparse<P: AsRef<Path>>(path: P) -> Result<SparseMatrix> {
    read_sparse(BufReader::new(File::open(path)?))
}

pub fn save_dense<P: AsRef<Path>>(path: P, m: &DenseMatrix) -> Result<()> {
    write_dense(BufWriter::new(File::create(path)?), m)
}

pub fn load_dense<P: AsRef<Path>>(path: P) -> Result<DenseMatrix> {
    read_dense(BufReader::new(File::open(path)?))
}

fn content_lines<R: BufRead>(r: R) -> impl Iterator<Item = std::io::Result<String>> {
    let mut seen_header = false;
    r.lines().filter(move |l| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() {
                return false;
            }
            // the %%MatrixMarket banner is content, later %-lines are comments
            if t.starts_with('%') {
                if seen_header {
                    return false;
                }
                seen_header = true;
                return t.starts_with("%%");
            }
            true
        }
        Err(_) => true,
    })
}

fn parse_numbers(line: &str, expect: usize) -> Result<Vec<f64>> {
    let fields: Vec<f64> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {:?}", t)))
        })
        .collect::<Result<_>>()?;
    if fields.len() != expect {
        return Err(Error::Parse(format!(
            "expected {} fields, got {} in {:?}",
            expect,
            fields.len(),
            line
        )));
    }
    Ok(fields)
}
