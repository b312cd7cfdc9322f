//! CSV tables written atomically.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use crate::config::ExperimentConfig;

pub const VERSION: &str = concat!("krylovlab-v", env!("CARGO_PKG_VERSION"));

/// Provenance comment placed at the top of every CSV.
pub fn comment_line(cfg: &ExperimentConfig) -> String {
    format!(
        "# {VERSION} kind={} seed={} lanczos_tol={:e} degeneracy_tol={:e}",
        cfg.kind, cfg.seed, cfg.lanczos_tol, cfg.degeneracy_tol
    )
}

/// Accumulates CSV text: comment, header, then rows.
#[derive(Debug, Clone)]
pub struct Table {
    buf: String,
    columns: usize,
}

impl Table {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(comment);
        buf.push('\n');
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self { buf, columns: header.len() }
    }

    /// Appends a row; panics if the arity does not match the header.
    pub fn row(&mut self, fields: &[Field]) {
        assert_eq!(fields.len(), self.columns, "row arity does not match header");
        self.raw_row(fields);
    }

    /// Appends a row without an arity check, for ragged tables.
    pub fn raw_row(&mut self, fields: &[Field]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = match f {
                Field::F(v) => write!(self.buf, "{v}"),
                Field::U(v) => write!(self.buf, "{v}"),
            };
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        write_atomic(path, self.buf.as_bytes())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Field {
    F(f64),
    U(u64),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::F(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::U(v as u64)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::U(v)
    }
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Formats a grid value for file names: `0.01` stays `0.01`.
pub fn label(v: f64) -> String {
    format!("{v}")
}
