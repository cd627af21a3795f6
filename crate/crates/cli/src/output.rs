use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::fail::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Fixed 17-significant-digit rendering used in every CSV cell.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Where results go: files under `dir`, or stdout when no directory is set.
pub struct Sink {
    pub dir: Option<PathBuf>,
    pub format: Format,
    pub plot: bool,
    pub provenance: Value,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, w: W) -> Result<(), Failure> {
        let mut out = csv::Writer::from_writer(w);
        let written = (|| -> Result<(), csv::Error> {
            out.write_record(&self.header)?;
            for r in &self.rows {
                out.write_record(r)?;
            }
            out.flush()?;
            Ok(())
        })();
        match written {
            Ok(()) => Ok(()),
            // A closed downstream pipe (`wkw ... | head`) is not an error.
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => Ok(()),
            Err(e) => Err(Failure::io(e)),
        }
    }
}

impl Sink {
    fn ensure_dir(&self) -> Result<Option<&PathBuf>, Failure> {
        if let Some(d) = &self.dir {
            std::fs::create_dir_all(d).map_err(Failure::io)?;
        }
        Ok(self.dir.as_ref())
    }

    /// Emits the run summary (always JSON) plus an optional table. Without
    /// an output directory, `--format` picks which of the two goes to stdout.
    pub fn emit(&self, name: &str, mut summary: Value, table: Option<&Table>) -> Result<(), Failure> {
        summary["provenance"] = self.provenance.clone();
        let text = serde_json::to_string_pretty(&summary).map_err(Failure::io)? + "\n";
        match self.ensure_dir()? {
            Some(dir) => {
                std::fs::write(dir.join(format!("{name}.json")), &text).map_err(Failure::io)?;
                if let Some(t) = table {
                    let f = std::fs::File::create(dir.join(format!("{name}.csv"))).map_err(Failure::io)?;
                    t.write_to(f)?;
                }
                let meta = json!({
                    "command": name,
                    "provenance": self.provenance,
                    "created_unix": std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                });
                let meta = serde_json::to_string_pretty(&meta).map_err(Failure::io)? + "\n";
                std::fs::write(dir.join(format!("{name}.meta.json")), meta).map_err(Failure::io)?;
                log::info!("wrote {name} outputs to {}", dir.display());
            }
            None => match (self.format, table) {
                (Format::Csv, Some(t)) => t.write_to(std::io::stdout().lock())?,
                _ => print!("{text}"),
            },
        }
        Ok(())
    }

    pub fn svg(&self, name: &str, svg: impl FnOnce() -> String) -> Result<(), Failure> {
        if !self.plot {
            return Ok(());
        }
        match self.ensure_dir()? {
            Some(dir) => std::fs::write(dir.join(format!("{name}.svg")), svg()).map_err(Failure::io),
            None => {
                log::warn!("--plot needs --out; skipping {name}.svg");
                Ok(())
            }
        }
    }
}
