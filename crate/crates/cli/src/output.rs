use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Significant digits of every float in JSON output.
pub const SIG_DIGITS: usize = 12;

/// Rounds every float in `v` to [`SIG_DIGITS`] significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.prec$e}", prec = SIG_DIGITS - 1)
                .parse()
                .unwrap_or(x);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Value, CliError> {
    Ok(round_floats(serde_json::to_value(value)?))
}

/// Files written under `--out`, in creation order.
#[derive(Debug, Default)]
pub struct OutputDir {
    root: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn new(root: Option<&Path>) -> Result<Self, CliError> {
        if let Some(r) = root {
            fs::create_dir_all(r)?;
        }
        Ok(Self {
            root: root.map(Path::to_path_buf),
            written: Vec::new(),
        })
    }

    pub fn is_enabled(&self) -> bool {
        self.root.is_some()
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `name` if an output directory was requested.
    pub fn write_with(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
    ) -> Result<(), CliError> {
        let Some(root) = &self.root else {
            return Ok(());
        };
        let path = root.join(name);
        let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
        fill(&mut file)?;
        file.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    pub fn write_lines<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        self.write_with(name, |w| {
            for row in rows {
                serde_json::to_writer(&mut *w, &to_json(row)?)?;
                writeln!(w)?;
            }
            Ok(())
        })
    }
}
