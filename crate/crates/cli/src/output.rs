use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

/// `#` comment block at the top of every output file: tool version, the
/// resolved settings and the seed.
#[derive(Debug, Clone)]
pub struct Provenance {
    command: &'static str,
    config: Vec<(String, String)>,
    seed: Option<u64>,
    notes: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            config: Vec::new(),
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Result annotations, printed after the settings.
    pub fn note(mut self, key: &str, value: impl Display) -> Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# regshrink {}\n# command: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        let config: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!("# config: {}\n", config.join(" ")));
        if let Some(seed) = self.seed {
            s.push_str(&format!("# seed: {seed}\n"));
        }
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s
    }
}

/// Writes `body` under the provenance block to `path`, or to stdout.
pub fn emit(path: Option<&Path>, provenance: &Provenance, body: &[u8]) -> Result<()> {
    let mut text = provenance.render().into_bytes();
    text.extend_from_slice(body);
    match path {
        Some(p) => fs::write(p, &text).map_err(|e| CliError::output(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&text)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::output("<stdout>", e))
        }
    }
}

/// Renders CSV into memory; writing to a `Vec` cannot fail.
pub fn render<F>(f: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("in-memory write");
    buf
}
