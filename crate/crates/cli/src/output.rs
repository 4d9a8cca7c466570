//! CSV and JSON emission with stable formatting: CSV numbers carry six
//! significant digits, JSON uses struct field order, and identical configs
//! produce byte-identical output.

use std::io::Write;

use crate::CliError;

/// Six significant digits, '.' decimal separator.
pub fn fmt(value: f64) -> String {
    if value == 0.0 {
        return "0.00000e0".to_string();
    }
    format!("{value:.5e}")
}

pub struct CsvWriter {
    buffer: String,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        CsvWriter {
            buffer: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn finish(self) -> String {
        self.buffer
    }
}

/// Write to the path, or stdout when no path is given.
pub fn emit(output: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_significant_digits() {
        assert_eq!(fmt(0.137), "1.37000e-1");
        assert_eq!(fmt(-2.0), "-2.00000e0");
        assert_eq!(fmt(0.0), "0.00000e0");
    }

    #[test]
    fn csv_layout() {
        let mut w = CsvWriter::new(&["a", "b"]);
        w.row(&["1".into(), "2".into()]);
        assert_eq!(w.finish(), "a,b\n1,2\n");
    }
}
