//! Result tables and their CSV form.

use std::io::{self, Write};

use sha2::{Digest, Sha256};

use finrx_core::params::{BandConfig, Params};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    /// Floats use 17 significant digits, enough to round-trip any f64.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "NaN".to_string(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Column-named rows plus `key = value` metadata emitted as `#` comments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    /// Records the configuration hash, band, seed and generator so a table
    /// can be traced back to its inputs.
    pub fn provenance(&mut self, params: &Params, seed: Option<u64>) {
        self.meta("config_sha256", config_hash(params));
        self.meta("band", band_string(&params.band));
        self.meta("seed", seed.map_or("none".to_string(), |s| s.to_string()));
        self.meta("rng", finrx_core::oracle::RNG_NAME);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn band_string(b: &BandConfig) -> String {
    format!("{:e}:{:e}:{}", b.f_min, b.f_max, b.n_points)
}

/// SHA-256 of the canonical config text of `params`.
pub fn config_hash(params: &Params) -> String {
    Sha256::digest(params.to_config_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `table` as metadata comments, a header row and data rows.
/// Returns the number of bytes written.
pub fn emit_csv(table: &Table, out: &mut impl Write) -> io::Result<usize> {
    let mut buf = Vec::new();
    buf.extend_from_slice(format!("# finrx {}\n", env!("CARGO_PKG_VERSION")).as_bytes());
    for (k, v) in &table.meta {
        buf.extend_from_slice(format!("# {k} = {v}\n").as_bytes());
    }
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
    }
    out.write_all(&buf)?;
    Ok(buf.len())
}
