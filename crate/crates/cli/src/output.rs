//! File writers. Payload files carry no timestamps so that identical inputs
//! give identical bytes; timing goes to the `run_meta.json` sidecar.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

pub const RUN_META: &str = "run_meta.json";

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(format!("{name}: {e}")))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Writes `header` then one record per row.
    pub fn write_csv<R, I>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let path = self.path(name);
        let mut w = self.csv_writer(name)?;
        let fail = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(row).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn csv_writer(&self, name: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(csv::Writer::from_writer(BufWriter::new(file)))
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub version: &'static str,
    pub config: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub elapsed_seconds: f64,
    pub exit_code: u8,
    pub files: Vec<String>,
    pub error: Option<String>,
}

pub struct RunClock {
    started: SystemTime,
    instant: Instant,
}

impl RunClock {
    pub fn start() -> Self {
        Self { started: SystemTime::now(), instant: Instant::now() }
    }

    pub fn finish(&self, command: &str, config: Option<&Path>, files: &[PathBuf], result: Result<(), &CliError>) -> RunMeta {
        let unix = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        RunMeta {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION"),
            config: config.map(|p| p.display().to_string()),
            started_unix: unix(self.started),
            finished_unix: unix(SystemTime::now()),
            elapsed_seconds: self.instant.elapsed().as_secs_f64(),
            exit_code: result.map_or_else(|e| e.exit_code(), |_| 0),
            files: files
                .iter()
                .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect(),
            error: result.err().map(ToString::to_string),
        }
    }
}

/// Flushes a line of progress to stderr unless quiet.
pub fn note(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "{}", msg.as_ref());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(2.0), "2.0");
    }
}
