//! Error taxonomy shared across the crate.
//!
//! Hard failures are represented by [`Error`]; protocol *rejections* are not
//! errors but verdicts, carried by [`Outcome`] so that callers can
//! distinguish "the run could not be performed" from "the verifier said no".

use std::fmt;

/// A failure that prevents a computation from producing a verdict at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The caller violated a precondition (bad argument, mixed fields, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A mathematically undefined operation was requested (inverting zero,
    /// interpolating through duplicate abscissae, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds a representation or enumeration budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Malformed textual input.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Why a verifier refused a proof or transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// The artifact is structurally invalid (wrong sizes, bad header,
    /// out-of-range coefficients).  Detected before any coins are tossed.
    Malformed(String),
    /// The artifact is well-formed but failed a randomized or arithmetic
    /// consistency check.
    Unsound(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(m) => write!(f, "reject (malformed): {m}"),
            RejectReason::Unsound(m) => write!(f, "reject (unsound): {m}"),
        }
    }
}

/// Verdict of a verification: either an accepted value or a reasoned refusal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Accepted(T),
    Rejected(RejectReason),
}

impl<T> Outcome<T> {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Outcome::Accepted(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Accepted(t) => Outcome::Accepted(f(t)),
            Outcome::Rejected(r) => Outcome::Rejected(r),
        }
    }

    /// Extracts the accepted value, panicking with the rejection reason
    /// otherwise.  Intended for tests and honest-run pipelines.
    pub fn unwrap_accepted(self) -> T {
        match self {
            Outcome::Accepted(t) => t,
            Outcome::Rejected(r) => panic!("expected acceptance, got {r}"),
        }
    }

    pub fn rejection(&self) -> Option<&RejectReason> {
        match self {
            Outcome::Rejected(r) => Some(r),
            Outcome::Accepted(_) => None,
        }
    }
}
