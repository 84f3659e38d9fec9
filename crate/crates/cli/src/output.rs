//! CSV tables with a schema comment line, and the binary matrix dump.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use agsp_core::CMatrix64;
use serde::Serialize;

pub const SCHEMA_LINE: &str = "# schema=1";
pub const MATRIX_MAGIC: [u8; 8] = *b"AGSPMAT1";

/// A cell value with a stable textual form.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Real(x) => fmt_real(*x),
            Self::Flag(b) => b.to_string(),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Self::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Self::Flag(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Self::Empty, Into::into)
    }
}

/// Shortest round-trip decimal; `inf`, `-inf`, `nan` for non-finite values.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| *c == name)
            .expect("known column")
    }

    /// Whether every non-empty cell of the boolean columns whose names end in
    /// `_ok` is true.
    pub fn all_ok(&self) -> bool {
        let flags: Vec<usize> = (0..self.columns.len())
            .filter(|&i| self.columns[i].ends_with("_ok"))
            .collect();
        self.rows
            .iter()
            .all(|r| flags.iter().all(|&i| !matches!(r[i], Cell::Flag(false))))
    }

    pub fn failures(&self) -> usize {
        let flags: Vec<usize> = (0..self.columns.len())
            .filter(|&i| self.columns[i].ends_with("_ok"))
            .collect();
        self.rows
            .iter()
            .filter(|r| flags.iter().any(|&i| matches!(r[i], Cell::Flag(false))))
            .count()
    }

    pub fn write_to<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = out;
        writeln!(out, "{SCHEMA_LINE}")?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let file = File::create(dir.join(format!("{}.csv", self.name)))?;
        self.write_to(BufWriter::new(file))
    }
}

/// Metadata written next to a dumped AGSP operator.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct MatrixSidecar {
    pub shrink: f64,
    pub rank_exact: usize,
    pub dims: [usize; 2],
    pub seed: u64,
}

/// Magic, `rows` and `cols` as little-endian `u32`, then row-major entries
/// as interleaved little-endian `f64` real and imaginary parts.
pub fn write_matrix<W: Write>(out: &mut W, m: &CMatrix64) -> io::Result<()> {
    let dim = |n: usize| {
        u32::try_from(n).map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidInput, "matrix dimension exceeds u32")
        })
    };
    out.write_all(&MATRIX_MAGIC)?;
    out.write_all(&dim(m.nrows())?.to_le_bytes())?;
    out.write_all(&dim(m.ncols())?.to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.write_all(&m[(i, j)].re.to_le_bytes())?;
            out.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix<R: Read>(input: &mut R) -> io::Result<CMatrix64> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if header[..8] != MATRIX_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad matrix magic",
        ));
    }
    let rows = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(header[12..16].try_into().expect("4 bytes")) as usize;
    let mut buf = vec![0u8; rows * cols * 16];
    input.read_exact(&mut buf)?;
    let at = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    Ok(CMatrix64::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        agsp_core::linalg::cplx(at(k), at(k + 1))
    }))
}

pub fn dump_agsp(dir: &Path, stem: &str, m: &CMatrix64, meta: &MatrixSidecar) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = BufWriter::new(File::create(dir.join(format!("{stem}.bin")))?);
    write_matrix(&mut f, m)?;
    f.flush()?;
    let json = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    std::fs::write(dir.join(format!("{stem}.json")), json + "\n")
}
