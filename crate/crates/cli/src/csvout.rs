//! CSV emission: UTF-8, LF line endings, header row, floats in scientific
//! notation with 9 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Scientific notation with 9 significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> anyhow::Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> anyhow::Result<()> {
        self.out.write_all(fields.join(",").as_bytes())?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Quote a field that may itself contain commas.
pub fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}
