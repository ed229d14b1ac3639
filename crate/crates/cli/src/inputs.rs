//! Loading and parsing of command-line artifacts: circuits, formulas,
//! point/matrix CSV files, edge lists, and the small flag grammars
//! (`q^l` field specs, `num/den` fractions).
//!
//! All failures map to [`Error`] values so the dispatcher can translate
//! them into exit codes uniformly: unreadable or malformed input is a
//! usage/parse error (exit 2), never a panic.

use std::fs;
use std::path::Path;

use maep_core::circuit::{parse_circuit, parse_formula, parse_qbf};
use maep_core::{BoolFormula, Circuit, Error, QuantifiedFormula, Result};

/// A `--field` argument: a base prime with an optional `^l` extension
/// degree.  Which parts a verb honours (and what it defaults to) is the
/// verb's business.
#[derive(Debug, Clone, Copy)]
pub struct FieldSpec {
    pub q: u64,
    pub ell: Option<u32>,
}

impl FieldSpec {
    /// Enforces that the spec names a plain prime field (`l` absent or 1)
    /// and returns the modulus.
    pub fn prime_only(&self, what: &str) -> Result<u64> {
        match self.ell {
            None | Some(1) => Ok(self.q),
            Some(l) => Err(Error::usage(format!(
                "{what} works over a prime field; drop the ^{l} from --field"
            ))),
        }
    }
}

pub fn parse_field_spec(s: &str) -> Result<FieldSpec> {
    let (qs, ls) = match s.split_once('^') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let q = qs
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::usage(format!("--field wants 'q' or 'q^l', got '{s}'")))?;
    let ell = match ls {
        Some(b) => Some(
            b.trim()
                .parse::<u32>()
                .ok()
                .filter(|&l| l > 0)
                .ok_or_else(|| Error::usage(format!("--field extension degree in '{s}' must be a positive integer")))?,
        ),
        None => None,
    };
    Ok(FieldSpec { q, ell })
}

/// A `num/den` fraction, e.g. `--delta 2/3`.
pub fn parse_fraction(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| Error::usage(format!("--delta wants 'num/den', e.g. 2/3, got '{s}'")))?;
    let num = a
        .trim()
        .parse::<u32>()
        .map_err(|_| Error::usage(format!("--delta numerator '{a}' is not an integer")))?;
    let den = b
        .trim()
        .parse::<u32>()
        .map_err(|_| Error::usage(format!("--delta denominator '{b}' is not an integer")))?;
    Ok((num, den))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read_text(path)?)
}

/// Formula arguments are literal text, unless the text names an existing
/// file, in which case the file's contents are parsed instead.
fn formula_text(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        read_text(p)
    } else {
        Ok(arg.to_string())
    }
}

pub fn load_formula(arg: &str) -> Result<BoolFormula> {
    parse_formula(&formula_text(arg)?)
}

pub fn load_qbf(arg: &str) -> Result<QuantifiedFormula> {
    parse_qbf(&formula_text(arg)?)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Comma-separated rows of unsigned integers; blank lines and `#` comments
/// are skipped.
pub fn parse_csv_rows(text: &str, what: &str) -> Result<Vec<Vec<u64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in data_lines(text) {
        let row = line
            .split(',')
            .map(|cell| {
                let cell = cell.trim();
                cell.parse::<u64>().map_err(|_| {
                    Error::parse(lineno, 1, format!("{what}: '{cell}' is not an unsigned integer"))
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_csv_rows(path: &Path, what: &str) -> Result<Vec<Vec<u64>>> {
    parse_csv_rows(&read_text(path)?, what)
}

/// CSV rows restricted to 0/1 entries, as bit vectors.
pub fn load_bit_rows(path: &Path, what: &str) -> Result<Vec<Vec<bool>>> {
    load_csv_rows(path, what)?
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::usage(format!("{what}: entries must be 0 or 1, found {other}"))),
                })
                .collect()
        })
        .collect()
}

/// An edge list with one `u v` pair per line, nodes numbered from 1; the
/// node count is the largest index mentioned.  `symmetric` inserts both
/// directions of every edge.
pub fn parse_edge_list(text: &str, symmetric: bool) -> Result<Vec<Vec<bool>>> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in data_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                lineno,
                1,
                format!("expected an edge 'u v', got '{line}'"),
            ));
        }
        let mut pair = [0usize; 2];
        for (slot, field) in pair.iter_mut().zip(&fields) {
            *slot = field.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(|| {
                Error::parse(lineno, 1, format!("node '{field}' is not a positive integer (nodes are 1-indexed)"))
            })?;
        }
        n = n.max(pair[0]).max(pair[1]);
        edges.push((pair[0] - 1, pair[1] - 1));
    }
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in edges {
        adj[u][v] = true;
        if symmetric {
            adj[v][u] = true;
        }
    }
    Ok(adj)
}

pub fn load_graph(path: &Path, symmetric: bool) -> Result<Vec<Vec<bool>>> {
    parse_edge_list(&read_text(path)?, symmetric)
}
