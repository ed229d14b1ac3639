//! Report assembly and artifact output.
//!
//! Reports are plain `key: value` lines accumulated in memory and printed
//! once; every line is a deterministic function of the command line and
//! seed.  Files (proofs, transcripts) are written atomically: the bytes go
//! to a temporary file in the destination directory which is then renamed
//! over the target, so a crashed run never leaves a half-written artifact.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use maep_core::ops;
use maep_core::transcript::Transcript;
use maep_core::{Error, Result};

/// An accumulating `key: value` report.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new(protocol: &str) -> Report {
        let mut r = Report::default();
        r.line("protocol", protocol);
        r
    }

    pub fn oracle(problem: &str) -> Report {
        let mut r = Report::default();
        r.line("oracle", problem);
        r
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.text, "{key}: {value}").expect("writing to a String cannot fail");
    }

    /// A space-separated list value, e.g. `values: 3 0 17`.
    pub fn list(&mut self, key: &str, values: impl IntoIterator<Item = impl std::fmt::Display>) {
        let joined = values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        self.line(key, joined);
    }

    /// Appends the per-phase field-operation tallies accumulated since the
    /// dispatcher's reset.
    pub fn ops_breakdown(&mut self) {
        let r = ops::report();
        for (name, c) in
            [("prover", r.prover), ("verifier", r.verifier), ("oracle", r.oracle)]
        {
            self.line(
                &format!("ops[{name}]"),
                format!("add={} mul={} inv={}", c.adds, c.muls, c.invs),
            );
        }
    }

    pub fn print(self) {
        print!("{}", self.text);
    }
}

/// Writes `bytes` to `path` via a temporary file in the same directory plus
/// an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: &dyn std::fmt::Display| {
        Error::usage(format!("cannot write {}: {e}", path.display()))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(&e))?;
    tmp.write_all(bytes).map_err(|e| io_err(&e))?;
    tmp.persist(path).map_err(|e| io_err(&e))?;
    Ok(())
}

/// Stamps the seed into a finished transcript and writes it as JSON.
pub fn write_transcript(mut t: Transcript, seed: u64, path: &Path) -> Result<()> {
    t.seed = seed;
    let mut json = t.to_json();
    json.push('\n');
    write_atomic(path, json.as_bytes())
}
