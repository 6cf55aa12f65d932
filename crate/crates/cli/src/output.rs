//! Deterministic text output: fixed-precision floats and buffered writers.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// 12 significant digits, scientific notation; byte-stable across runs.
pub fn fmt(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // canonicalize -0.0
    format!("{x:.11e}")
}

/// Spec labels carry commas; CSV cells use `;` instead.
pub fn csv_label(label: &str) -> String {
    label.replace(',', ";")
}

pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    /// Opens the output file, or stdout when no path is given.
    pub fn open(path: Option<&str>) -> Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).with_context(|| format!("cannot write `{p}`"))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        };
        Ok(Self { inner })
    }

    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            inner: Box::new(std::io::BufWriter::new(
                std::fs::File::create(path)
                    .with_context(|| format!("cannot write `{}`", path.display()))?,
            )),
        })
    }

    pub fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.inner, "{text}")?;
        Ok(())
    }
}
