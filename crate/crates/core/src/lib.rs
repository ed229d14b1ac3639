//! Merlin-Arthur proof systems for batch evaluation of low-degree arithmetic
//! circuits over finite fields.
//!
//! The central protocol certifies the values of an arithmetic circuit `C` at
//! `K` points with a single prover message: a univariate polynomial `Q` over
//! an extension field chosen large enough that a one-point spot check drives
//! the soundness error below a caller-chosen threshold.  The verifier reads
//! all `K` certified values out of `Q` by fast multipoint evaluation, paying
//! far less than the cost of evaluating `C` at every point itself.
//!
//! On top of the core protocol sit verified counting applications: Boolean
//! model counting ([`sum::count_sat`]), matrix permanents, Hamiltonian cycle
//! counts, quantified Boolean formulas ([`qbf`]), orthogonal-vector and
//! Hamming-neighbor statistics, and clique counting ([`apps`]).  Every
//! application is backed by an independent brute-force oracle in [`oracle`]
//! used by the test suites.

pub mod apps;
pub mod circuit;
pub mod coins;
pub mod error;
pub mod field;
pub mod ma;
pub mod ops;
pub mod oracle;
pub mod poly;
pub mod proof_io;
pub mod qbf;
pub mod sum;
pub mod transcript;

pub use circuit::{BoolFormula, Circuit, Gate, Quant, QuantifiedFormula};
pub use error::{Error, Outcome, RejectReason, Result};
pub use field::{Field, FieldElement};
pub use apps::{elementary_symmetric_circuit, hamming_count, kclique_count, ov_count, CountsOutput};
pub use ma::{
    build_psi, choose_params, prove_eval, upit_deterministic, upit_random, verify_eval,
    EvalOutput, ProtocolParams, Proof,
};
pub use poly::DensePoly;
pub use qbf::{qbf_decide, QbfParams, QbfRun};
pub use sum::{
    count_sat, count_sat_multiround, hamiltonian_cycles, multiround_replay, multiround_sum,
    permanent, prove_sum, sat_multiround_claim, verify_sum, CountOutput, MultiroundRun, SumClaim,
    SumOutput,
};
