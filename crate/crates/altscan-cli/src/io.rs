//! JSONL and small-file helpers; every error names the file involved.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{at_path, CliError, CliResult};

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = at_path(fs::read_to_string(path), path)?;
    let mut items = Vec::new();
    for (number, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| {
            CliError::Data(format!("{}:{}: {e}", path.display(), number + 1))
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_jsonl<'a, T: Serialize + 'a>(
    path: &Path,
    items: impl IntoIterator<Item = &'a T>,
) -> CliResult<()> {
    let mut buffer = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buffer, item)?;
        buffer.push(b'\n');
    }
    at_path(fs::write(path, buffer), path)
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    at_path(fs::write(path, text), path)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = at_path(fs::read_to_string(path), path)?;
    at_path(serde_json::from_str(&text), path)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    at_path(fs::write(path, text), path)
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    at_path(fs::create_dir_all(path), path)
}

/// Serialized CSV writer: header once, then one line per row.
pub struct Csv {
    buffer: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            buffer: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn save(self, path: &Path) -> CliResult<()> {
        let mut file = at_path(fs::File::create(path), path)?;
        at_path(file.write_all(self.buffer.as_bytes()), path)
    }
}
