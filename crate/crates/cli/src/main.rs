//! `maep` — command-line driver for the batch-evaluation proof system.
//!
//! One binary covers the whole protocol family: producing and checking
//! evaluation proofs (`prove`/`verify eval`), certified Boolean-cube sums
//! one-round or interactive (`prove`/`verify sum`, `--rounds`), the counting
//! applications built on them (`sat`, `qbf`, `permanent`, `hamcycles`, `ov`,
//! `hamming`, `clique`), univariate identity testing (`upit`), and the
//! brute-force references (`oracle <problem>`) for scripting cross-checks.
//!
//! Conventions shared by every verb:
//!
//! * All verifier randomness derives from `--seed`; identical command line
//!   and seed produce byte-identical reports and transcripts.
//! * `--transcript <path>` records the run (JSON: parameters, messages,
//!   coin draws, decision).  `--replay <path>` re-runs the verifier with a
//!   recording's coins and demands the reproduced run match it message for
//!   message — a consistency check, not a soundness guarantee, since the
//!   coins are not fresh.
//! * Exit codes: 0 accepted/success, 1 rejected as unsound, 2 malformed
//!   input (including structurally rejected proofs), 3 capacity exceeded.

mod inputs;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use maep_core::coins::{CoinSupply, Coins, RecordingCoins};
use maep_core::coins::ReplayCoins;
use maep_core::ops::{self, Phase};
use maep_core::oracle::{
    oracle_cliques, oracle_cube_sum, oracle_hamcycles, oracle_hamming, oracle_multipoint,
    oracle_ov, oracle_permanent, oracle_qbf, oracle_sat,
};
use maep_core::proof_io::{parse_proof, serialize_proof};
use maep_core::transcript::{Sender, Transcript};
use maep_core::{
    choose_params, count_sat, hamiltonian_cycles, hamming_count, kclique_count, multiround_replay,
    multiround_sum, ov_count, permanent, prove_eval, prove_sum, qbf_decide, sat_multiround_claim,
    upit_deterministic, upit_random, verify_eval, verify_sum, Error, EvalOutput, Field,
    MultiroundRun, Outcome, Proof, QbfParams, RejectReason, Result, SumClaim,
};

use inputs::FieldSpec;
use report::{write_atomic, write_transcript, Report};

const EXIT_ACCEPT: u8 = 0;
const EXIT_UNSOUND: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

/// Base prime for evaluation proofs and identity tests when `--field` is
/// absent.
const DEFAULT_EVAL_PRIME: u64 = 101;
/// Modulus for cube-sum claims when `--field` is absent: the Mersenne
/// prime `2^61 − 1`, the largest prime comfortably inside the modulus
/// budget.
const DEFAULT_SUM_PRIME: u64 = (1 << 61) - 1;

#[derive(Parser)]
#[command(name = "maep", version, about = "Merlin-Arthur proofs for batch circuit evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for the verifier's coin tosses.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Soundness exponent t: protocols target error at most 2^-t.
    #[arg(long, global = true, default_value_t = 40)]
    error_exp: u32,

    /// Field override, 'q' or 'q^l'.  Eval proofs take the base prime (the
    /// protocol fixes l); sum claims take a prime modulus; upit takes the
    /// base field.  Verbs that pick their own modulus reject the flag.
    #[arg(long, global = true)]
    field: Option<String>,

    /// Prover messages for the interactive sum protocols (sat, verify
    /// sum); 1 means the one-round protocol.
    #[arg(long, global = true)]
    rounds: Option<u32>,

    /// Tally field operations per phase and append them to the report.
    #[arg(long, global = true)]
    count_ops: bool,

    /// Write the run's transcript to this path as JSON.
    #[arg(long, global = true)]
    transcript: Option<PathBuf>,

    /// Re-verify a recorded transcript using its recorded coins.
    #[arg(long, global = true)]
    replay: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Produce a proof artifact.
    #[command(subcommand)]
    Prove(ProveCmd),
    /// Check a proof artifact or run an interactive verification.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Certified model count of a Boolean formula (`x1 & (!x2 | x3)`).
    Sat {
        /// Formula text, or a path to a file holding it.
        formula: String,
    },
    /// Certified decision of a quantified Boolean formula
    /// (`AE x1 x2 : x1 | !x2`).
    Qbf {
        /// Formula text, or a path to a file holding it.
        formula: String,
        /// Fraction of variables compiled into the suffix, as 'num/den'.
        #[arg(long)]
        delta: Option<String>,
        /// Prime interval exponent E: the modulus is drawn from [2, 2^E·m]
        /// for a formula with m connectives.
        #[arg(long)]
        prime_exp: Option<u32>,
    },
    /// Certified permanent of a square matrix (CSV rows).
    Permanent { matrix: PathBuf },
    /// Certified Hamiltonian cycle count of a graph (edge list, '<u> <v>'
    /// per line, 1-indexed).
    Hamcycles {
        graph: PathBuf,
        /// Count undirected cycles (each edge usable both ways).
        #[arg(long)]
        undirected: bool,
    },
    /// Certified per-vector orthogonality counts over 0/1 vectors (CSV rows).
    Ov { vectors: PathBuf },
    /// Certified per-vector counts of neighbors within Hamming distance k.
    Hamming {
        vectors: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
    /// Certified number of k-cliques in a graph (edge list, 1-indexed).
    Clique {
        graph: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
    /// Univariate polynomial identity test between two circuits.
    Upit { first: PathBuf, second: PathBuf },
    /// Brute-force reference computations, no protocol involved.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum ProveCmd {
    /// Prove a circuit's values at each point of a list (CSV rows).
    Eval { circuit: PathBuf, points: PathBuf, proof: PathBuf },
    /// Prove a circuit's sum over the Boolean cube; the report states the
    /// claimed sum the verifier must be told.
    Sum { circuit: PathBuf, proof: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check an evaluation proof and decode the certified values.
    Eval { circuit: PathBuf, points: PathBuf, proof: PathBuf },
    /// Check a cube-sum claim: one-round against a proof file, or
    /// interactively with --rounds (no file; both parties run in-process).
    Sum {
        circuit: PathBuf,
        proof: Option<PathBuf>,
        /// The claimed cube sum modulo the claim's prime.
        #[arg(long)]
        claimed: u64,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Evaluate a circuit at each point, one value per point.
    Multipoint { circuit: PathBuf, points: PathBuf },
    /// Sum a circuit over the Boolean cube by full enumeration.
    Cubesum { circuit: PathBuf },
    /// Count satisfying assignments by enumeration.
    Sat { formula: String },
    /// Decide a quantified formula recursively.
    Qbf { formula: String },
    /// Permanent by permutation expansion (exact integer).
    Permanent { matrix: PathBuf },
    /// Hamiltonian cycles by permutation enumeration.
    Hamcycles {
        graph: PathBuf,
        #[arg(long)]
        undirected: bool,
    },
    /// Per-vector orthogonality counts by pairwise inner products.
    Ov { vectors: PathBuf },
    /// Per-vector Hamming-neighbor counts by pairwise distances.
    Hamming {
        vectors: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
    /// k-cliques by subset enumeration.
    Cliques {
        graph: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
}

/// Global flags plus the replay recording, resolved once per invocation.
struct Session {
    seed: u64,
    error_exp: u32,
    field: Option<FieldSpec>,
    rounds: Option<u32>,
    count_ops: bool,
    transcript_out: Option<PathBuf>,
    replay_path: Option<PathBuf>,
    recorded: Option<Transcript>,
}

impl Session {
    /// The coin supply for this run: fresh seeded coins, or the recorded
    /// draws when replaying.
    fn coin_source(&self) -> Result<Box<dyn CoinSupply>> {
        Ok(match &self.recorded {
            Some(t) => Box::new(ReplayCoins::new(t.coin_draws()?)),
            None => Box::new(Coins::from_seed(self.seed)),
        })
    }

    fn no_field(&self, verb: &str, why: &str) -> Result<()> {
        match self.field {
            Some(_) => Err(Error::usage(format!("{verb} does not take --field: {why}"))),
            None => Ok(()),
        }
    }

    fn no_rounds(&self, verb: &str) -> Result<()> {
        match self.rounds {
            Some(_) => Err(Error::usage(format!(
                "{verb} does not take --rounds; only the sum protocols are interactive"
            ))),
            None => Ok(()),
        }
    }

    fn no_replay(&self, verb: &str) -> Result<()> {
        match self.replay_path {
            Some(_) => Err(Error::usage(format!(
                "{verb} has no verifier randomness to replay"
            ))),
            None => Ok(()),
        }
    }

    fn no_transcript(&self, verb: &str) -> Result<()> {
        match self.transcript_out {
            Some(_) => Err(Error::usage(format!(
                "{verb} records no transcript; transcripts capture verifier runs"
            ))),
            None => Ok(()),
        }
    }

    /// How many prover messages the sum verbs should use, reconciling
    /// `--rounds` with a replayed recording.  `None` means the one-round
    /// proof-file protocol.
    fn effective_rounds(&self) -> Result<Option<u32>> {
        if let Some(rec) = &self.recorded {
            let rec_rounds = if rec.protocol == "multiround-sum" {
                let r = rec
                    .params
                    .get("rounds")
                    .and_then(|v| v.as_u64())
                    .ok_or_else(|| {
                        Error::domain("the multiround transcript lacks a round count".to_string())
                    })?;
                Some(u32::try_from(r).map_err(|_| {
                    Error::domain(format!("recorded round count {r} is out of range"))
                })?)
            } else {
                None
            };
            match (self.rounds, rec_rounds) {
                (Some(c), Some(rc)) if c != rc => Err(Error::usage(format!(
                    "--rounds {c} disagrees with the recorded {rc}-round transcript"
                ))),
                (Some(_), None) => Err(Error::usage(
                    "--rounds given, but the transcript records a one-round run".to_string(),
                )),
                _ => Ok(rec_rounds),
            }
        } else {
            match self.rounds {
                Some(0) => {
                    Err(Error::usage("--rounds wants at least one prover message".to_string()))
                }
                Some(1) => Ok(None),
                other => Ok(other),
            }
        }
    }

    /// Finishes a protocol run: in replay mode, demands the reproduced
    /// transcript match the recording field for field; writes the
    /// transcript when requested; prints the report; returns the exit code.
    fn conclude(&self, mut rep: Report, t: Transcript, exit: u8) -> Result<u8> {
        if let Some(rec) = &self.recorded {
            let path = self.replay_path.as_ref().expect("replay recording implies a path");
            rep.line("replay", path.display());
            rep.line("recorded decision", &rec.decision);
            if t.protocol != rec.protocol {
                return Err(Error::domain(format!(
                    "replayed a '{}' recording through the '{}' protocol",
                    rec.protocol, t.protocol
                )));
            }
            if t.params != rec.params {
                return Err(Error::domain(
                    "the recording's parameters do not match this invocation".to_string(),
                ));
            }
            if t.rounds != rec.rounds {
                return Err(Error::domain(
                    "the replayed messages diverge from the recording (different inputs?)"
                        .to_string(),
                ));
            }
            if t.decision != rec.decision {
                return Err(Error::domain(format!(
                    "replay reproduced '{}' but the recording says '{}'",
                    t.decision, rec.decision
                )));
            }
        }
        if let Some(path) = &self.transcript_out {
            // A replayed run keeps the recording's seed so the rewritten
            // transcript is byte-identical to a consistent original.
            let seed = self.recorded.as_ref().map_or(self.seed, |r| r.seed);
            write_transcript(t, seed, path)?;
            rep.line("transcript", path.display());
        }
        if self.count_ops {
            rep.ops_breakdown();
        }
        rep.print();
        Ok(exit)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ops::reset();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity(_) => EXIT_CAPACITY,
                _ => EXIT_MALFORMED,
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let field = cli.field.as_deref().map(inputs::parse_field_spec).transpose()?;
    let recorded = match &cli.replay {
        Some(p) => Some(Transcript::from_json(&inputs::read_text(p)?)?),
        None => None,
    };
    let s = Session {
        seed: cli.seed,
        error_exp: cli.error_exp,
        field,
        rounds: cli.rounds,
        count_ops: cli.count_ops,
        transcript_out: cli.transcript,
        replay_path: cli.replay,
        recorded,
    };
    match cli.command {
        Command::Prove(ProveCmd::Eval { circuit, points, proof }) => {
            prove_eval_cmd(&s, &circuit, &points, &proof)
        }
        Command::Prove(ProveCmd::Sum { circuit, proof }) => prove_sum_cmd(&s, &circuit, &proof),
        Command::Verify(VerifyCmd::Eval { circuit, points, proof }) => {
            verify_eval_cmd(&s, &circuit, &points, &proof)
        }
        Command::Verify(VerifyCmd::Sum { circuit, proof, claimed }) => {
            verify_sum_cmd(&s, &circuit, proof.as_deref(), claimed)
        }
        Command::Sat { formula } => sat_cmd(&s, &formula),
        Command::Qbf { formula, delta, prime_exp } => {
            qbf_cmd(&s, &formula, delta.as_deref(), prime_exp)
        }
        Command::Permanent { matrix } => permanent_cmd(&s, &matrix),
        Command::Hamcycles { graph, undirected } => hamcycles_cmd(&s, &graph, undirected),
        Command::Ov { vectors } => ov_cmd(&s, &vectors),
        Command::Hamming { vectors, k } => hamming_cmd(&s, &vectors, k),
        Command::Clique { graph, k } => clique_cmd(&s, &graph, k),
        Command::Upit { first, second } => upit_cmd(&s, &first, &second),
        Command::Oracle(problem) => oracle_cmd(&s, problem),
    }
}

fn exit_for_outcome<T>(o: &Outcome<T>) -> u8 {
    match o {
        Outcome::Accepted(_) => EXIT_ACCEPT,
        Outcome::Rejected(RejectReason::Unsound(_)) => EXIT_UNSOUND,
        Outcome::Rejected(RejectReason::Malformed(_)) => EXIT_MALFORMED,
    }
}

fn decision_line<T>(rep: &mut Report, o: &Outcome<T>) {
    match o {
        Outcome::Accepted(_) => rep.line("decision", "accept"),
        Outcome::Rejected(r) => rep.line("decision", r),
    }
}

/// The proof polynomial's coefficient words in transcript order.
fn proof_words(proof: &Proof) -> Vec<u64> {
    proof.q_poly.coeffs().iter().flat_map(|e| e.limbs().to_vec()).collect()
}

fn coins_line(rep: &mut Report, bits: u64) {
    rep.line("coins", format!("{bits} bits"));
}

// --- eval ----------------------------------------------------------------

fn prove_eval_cmd(s: &Session, circuit: &Path, points: &Path, proof_out: &Path) -> Result<u8> {
    s.no_rounds("prove eval")?;
    s.no_replay("prove eval")?;
    s.no_transcript("prove eval")?;
    let c = inputs::load_circuit(circuit)?;
    let pts = inputs::load_csv_rows(points, "points")?;
    let q = s.field.map_or(DEFAULT_EVAL_PRIME, |f| f.q);
    let params = choose_params(&c, pts.len() as u64, q, s.error_exp)?;
    if let Some(l) = s.field.and_then(|f| f.ell) {
        if l != params.ell {
            return Err(Error::usage(format!(
                "the protocol fixes the extension degree: this instance over q={q} needs ^{}, not ^{l}",
                params.ell
            )));
        }
    }
    let proof = ops::scoped(Phase::Prover, || prove_eval(&c, &pts, &params))?;
    let bytes = serialize_proof(&proof)?;
    write_atomic(proof_out, &bytes)?;
    let mut rep = Report::new("eval");
    rep.line("field", format!("{}^{}", params.q, params.ell));
    rep.line(
        "params",
        format!("n={} K={} d={} eps=2^-{}", params.n, params.k, params.d, params.eps_exp),
    );
    rep.line("coefficients", params.num_coeffs());
    rep.line("proof", format!("{} ({} bytes)", proof_out.display(), bytes.len()));
    if s.count_ops {
        rep.ops_breakdown();
    }
    rep.print();
    Ok(EXIT_ACCEPT)
}

fn verify_eval_cmd(s: &Session, circuit: &Path, points: &Path, proof_path: &Path) -> Result<u8> {
    s.no_rounds("verify eval")?;
    let c = inputs::load_circuit(circuit)?;
    let pts = inputs::load_csv_rows(points, "points")?;
    let proof = parse_proof(&inputs::read_bytes(proof_path)?).map_err(Error::from)?;

    // Verifier-side demands checked before anything random: the proof must
    // target this run's error exponent and any --field choice.
    let mut pre_reject = None;
    if proof.params.eps_exp != s.error_exp {
        pre_reject = Some(format!(
            "the proof targets error 2^-{}, this run demands 2^-{}",
            proof.params.eps_exp, s.error_exp
        ));
    } else if let Some(f) = s.field {
        if f.q != proof.params.q {
            pre_reject = Some(format!("the proof is over q={}, --field wants {}", proof.params.q, f.q));
        } else if f.ell.is_some_and(|l| l != proof.params.ell) {
            pre_reject = Some(format!(
                "the proof uses extension degree {}, --field wants {}",
                proof.params.ell,
                f.ell.expect("checked")
            ));
        }
    }

    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = match pre_reject {
        Some(msg) => EvalOutput {
            outcome: Outcome::Rejected(RejectReason::Malformed(msg)),
            coins_used: 0,
        },
        None => ops::scoped(Phase::Verifier, || verify_eval(&c, &pts, &proof, &mut rec))?,
    };

    let mut t = Transcript::new(
        "eval",
        json!({
            "q": proof.params.q, "ell": proof.params.ell, "n": proof.params.n,
            "K": proof.params.k, "d": proof.params.d, "eps_exp": proof.params.eps_exp,
        }),
    );
    t.push_poly(Sender::Prover, &proof_words(&proof));
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.accepted());

    let mut rep = Report::new("eval");
    rep.line("field", format!("{}^{}", proof.params.q, proof.params.ell));
    rep.line(
        "params",
        format!(
            "n={} K={} d={} eps=2^-{}",
            proof.params.n, proof.params.k, proof.params.d, proof.params.eps_exp
        ),
    );
    decision_line(&mut rep, &out.outcome);
    if let Some(vs) = out.values() {
        rep.list("values", vs);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

// --- sum -----------------------------------------------------------------

fn sum_modulus(s: &Session) -> Result<u64> {
    s.field.map_or(Ok(DEFAULT_SUM_PRIME), |f| f.prime_only("the sum protocol"))
}

fn prove_sum_cmd(s: &Session, circuit: &Path, proof_out: &Path) -> Result<u8> {
    s.no_rounds("prove sum")?;
    s.no_replay("prove sum")?;
    s.no_transcript("prove sum")?;
    let c = inputs::load_circuit(circuit)?;
    let p = sum_modulus(s)?;
    let (claim, proof) = ops::scoped(Phase::Prover, || prove_sum(&c, p, s.error_exp))?;
    let bytes = serialize_proof(&proof)?;
    write_atomic(proof_out, &bytes)?;
    let mut rep = Report::new("sum");
    rep.line("modulus", p);
    rep.line("claimed", claim.claimed);
    rep.line("field", format!("{}^{}", proof.params.q, proof.params.ell));
    rep.line("coefficients", proof.params.num_coeffs());
    rep.line("proof", format!("{} ({} bytes)", proof_out.display(), bytes.len()));
    if s.count_ops {
        rep.ops_breakdown();
    }
    rep.print();
    Ok(EXIT_ACCEPT)
}

/// Runs the interactive sum protocol: live with the honest in-process
/// prover, or against a recording's polynomials and coins when replaying.
fn multiround_run_for(s: &Session, claim: &SumClaim, rounds: u32) -> Result<MultiroundRun> {
    match &s.recorded {
        Some(rec) => multiround_replay(claim, rec),
        None => {
            let mut coins = Coins::from_seed(s.seed);
            multiround_sum(claim, rounds, &mut coins)
        }
    }
}

fn verify_sum_cmd(
    s: &Session,
    circuit: &Path,
    proof_path: Option<&Path>,
    claimed: u64,
) -> Result<u8> {
    let c = inputs::load_circuit(circuit)?;
    let p = sum_modulus(s)?;
    match s.effective_rounds()? {
        Some(rounds) => {
            if proof_path.is_some() {
                return Err(Error::usage(
                    "the interactive protocol exchanges messages in-process; drop the proof file or drop --rounds"
                        .to_string(),
                ));
            }
            let claim = SumClaim { circuit: c, p, claimed };
            let run = multiround_run_for(s, &claim, rounds)?;
            let mut rep = Report::new("sum");
            rep.line("rounds", rounds);
            rep.line("modulus", p);
            rep.line("claimed", claimed);
            decision_line(&mut rep, &run.outcome);
            if run.outcome.is_accepted() {
                rep.line("sum", claimed);
            }
            coins_line(&mut rep, run.coins_used);
            let exit = exit_for_outcome(&run.outcome);
            s.conclude(rep, run.transcript, exit)
        }
        None => {
            let proof_path = proof_path.ok_or_else(|| {
                Error::usage(
                    "one-round verification reads a proof file; pass one, or --rounds c for the interactive protocol"
                        .to_string(),
                )
            })?;
            let proof = parse_proof(&inputs::read_bytes(proof_path)?).map_err(Error::from)?;
            let claim = SumClaim { circuit: c, p, claimed };
            let mut coins = s.coin_source()?;
            let mut rec = RecordingCoins::new(coins.as_mut());
            let out =
                ops::scoped(Phase::Verifier, || verify_sum(&claim, s.error_exp, &proof, &mut rec))?;
            let mut t = Transcript::new(
                "sum",
                json!({ "p": p, "claimed": claimed, "eps_exp": s.error_exp }),
            );
            t.push_poly(Sender::Prover, &proof_words(&proof));
            for d in rec.draws() {
                t.push_coin(*d);
            }
            t.set_decision(out.outcome.is_accepted());
            let mut rep = Report::new("sum");
            rep.line("modulus", p);
            rep.line("claimed", claimed);
            decision_line(&mut rep, &out.outcome);
            if let Outcome::Accepted(total) = &out.outcome {
                rep.line("sum", total);
            }
            coins_line(&mut rep, out.coins_used);
            s.conclude(rep, t, exit_for_outcome(&out.outcome))
        }
    }
}

// --- counting applications ----------------------------------------------

fn sat_cmd(s: &Session, formula_arg: &str) -> Result<u8> {
    s.no_field("sat", "the modulus is the smallest prime past 2^n")?;
    let f = inputs::load_formula(formula_arg)?;
    match s.effective_rounds()? {
        Some(rounds) => {
            let claim = sat_multiround_claim(&f, rounds)?;
            let run = multiround_run_for(s, &claim, rounds)?;
            let mut rep = Report::new("sat");
            rep.line("rounds", rounds);
            rep.line("variables", f.num_vars());
            rep.line("modulus", claim.p);
            decision_line(&mut rep, &run.outcome);
            if run.outcome.is_accepted() {
                rep.line("count", claim.claimed);
            }
            coins_line(&mut rep, run.coins_used);
            let exit = exit_for_outcome(&run.outcome);
            s.conclude(rep, run.transcript, exit)
        }
        None => {
            let mut coins = s.coin_source()?;
            let mut rec = RecordingCoins::new(coins.as_mut());
            let out = count_sat(&f, s.error_exp, &mut rec)?;
            let mut t =
                Transcript::new("sat", json!({ "p": out.p, "eps_exp": s.error_exp }));
            for d in rec.draws() {
                t.push_coin(*d);
            }
            t.set_decision(out.outcome.is_accepted());
            let mut rep = Report::new("sat");
            rep.line("variables", f.num_vars());
            rep.line("modulus", out.p);
            decision_line(&mut rep, &out.outcome);
            if let Some(count) = out.count() {
                rep.line("count", count);
            }
            coins_line(&mut rep, out.coins_used);
            s.conclude(rep, t, exit_for_outcome(&out.outcome))
        }
    }
}

fn qbf_cmd(
    s: &Session,
    formula_arg: &str,
    delta: Option<&str>,
    prime_exp: Option<u32>,
) -> Result<u8> {
    s.no_field("qbf", "the modulus is sampled from the prime interval")?;
    s.no_rounds("qbf")?;
    let phi = inputs::load_qbf(formula_arg)?;
    let mut qp = QbfParams::defaults(phi.num_vars());
    if let Some(d) = delta {
        qp.delta = inputs::parse_fraction(d)?;
    }
    if let Some(e) = prime_exp {
        qp.prime_interval_exp = e;
    }
    let mut coins = s.coin_source()?;
    let run = qbf_decide(&phi, &qp, s.error_exp, coins.as_mut())?;
    let mut rep = Report::new("qbf");
    rep.line(
        "variables",
        format!("{} (prefix {}, suffix {})", phi.num_vars(), run.prefix_vars, run.suffix_vars),
    );
    rep.line("delta", format!("{}/{}", qp.delta.0, qp.delta.1));
    rep.line("flipped", run.negated);
    rep.line("prime", run.params.p);
    decision_line(&mut rep, &run.outcome);
    if let Some(v) = run.value() {
        rep.line("value", v);
    }
    rep.line("prime-miss bound", format!("{:.3e}", run.prime_miss_bound));
    rep.line("spot-check bound", format!("{:.3e}", run.spot_check_bound));
    coins_line(&mut rep, run.coins_used);
    let exit = exit_for_outcome(&run.outcome);
    s.conclude(rep, run.transcript, exit)
}

fn permanent_cmd(s: &Session, matrix: &Path) -> Result<u8> {
    s.no_field("permanent", "the modulus is the smallest prime past every possible permanent")?;
    s.no_rounds("permanent")?;
    let m = inputs::load_csv_rows(matrix, "matrix")?;
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = permanent(&m, s.error_exp, &mut rec)?;
    let mut t = Transcript::new(
        "permanent",
        json!({ "n": m.len(), "p": out.p, "eps_exp": s.error_exp }),
    );
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.outcome.is_accepted());
    let mut rep = Report::new("permanent");
    rep.line("order", m.len());
    rep.line("modulus", out.p);
    decision_line(&mut rep, &out.outcome);
    if let Some(v) = out.count() {
        rep.line("permanent", v);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

fn hamcycles_cmd(s: &Session, graph: &Path, undirected: bool) -> Result<u8> {
    s.no_field("hamcycles", "the modulus is the smallest prime past every possible count")?;
    s.no_rounds("hamcycles")?;
    let adj = inputs::load_graph(graph, undirected)?;
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = hamiltonian_cycles(&adj, !undirected, s.error_exp, &mut rec)?;
    let mut t = Transcript::new(
        "hamcycles",
        json!({ "n": adj.len(), "directed": !undirected, "p": out.p, "eps_exp": s.error_exp }),
    );
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.outcome.is_accepted());
    let mut rep = Report::new("hamcycles");
    rep.line("nodes", adj.len());
    rep.line("directed", !undirected);
    rep.line("modulus", out.p);
    decision_line(&mut rep, &out.outcome);
    if let Some(v) = out.count() {
        rep.line("cycles", v);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

fn ov_cmd(s: &Session, vectors: &Path) -> Result<u8> {
    s.no_field("ov", "the modulus is the smallest prime past n²·d")?;
    s.no_rounds("ov")?;
    let a = inputs::load_bit_rows(vectors, "vectors")?;
    let dim = a.first().map_or(0, Vec::len);
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = ov_count(&a, s.error_exp, &mut rec)?;
    let mut t = Transcript::new(
        "ov",
        json!({ "vectors": a.len(), "dimension": dim, "p": out.p, "eps_exp": s.error_exp }),
    );
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.outcome.is_accepted());
    let mut rep = Report::new("ov");
    rep.line("vectors", format!("{} (dimension {dim})", a.len()));
    rep.line("modulus", out.p);
    decision_line(&mut rep, &out.outcome);
    if let Some(counts) = out.counts() {
        rep.list("counts", counts);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

fn hamming_cmd(s: &Session, vectors: &Path, k: usize) -> Result<u8> {
    s.no_field("hamming", "the modulus is the smallest prime past n²·(2d+1)")?;
    s.no_rounds("hamming")?;
    let a = inputs::load_bit_rows(vectors, "vectors")?;
    let dim = a.first().map_or(0, Vec::len);
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = hamming_count(&a, k, s.error_exp, &mut rec)?;
    let mut t = Transcript::new(
        "hamming",
        json!({ "vectors": a.len(), "dimension": dim, "k": k, "p": out.p, "eps_exp": s.error_exp }),
    );
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.outcome.is_accepted());
    let mut rep = Report::new("hamming");
    rep.line("k", k);
    rep.line("vectors", format!("{} (dimension {dim})", a.len()));
    rep.line("modulus", out.p);
    decision_line(&mut rep, &out.outcome);
    if let Some(counts) = out.counts() {
        rep.list("counts", counts);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

fn clique_cmd(s: &Session, graph: &Path, k: usize) -> Result<u8> {
    s.no_field("clique", "the modulus is the smallest prime past the split-pair count")?;
    s.no_rounds("clique")?;
    let adj = inputs::load_graph(graph, true)?;
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let out = kclique_count(&adj, k, s.error_exp, &mut rec)?;
    let mut t = Transcript::new(
        "clique",
        json!({ "n": adj.len(), "k": k, "p": out.p, "eps_exp": s.error_exp }),
    );
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(out.outcome.is_accepted());
    let mut rep = Report::new("clique");
    rep.line("k", k);
    rep.line("nodes", adj.len());
    rep.line("modulus", out.p);
    decision_line(&mut rep, &out.outcome);
    if let Some(v) = out.count() {
        rep.line("cliques", v);
    }
    coins_line(&mut rep, out.coins_used);
    s.conclude(rep, t, exit_for_outcome(&out.outcome))
}

// --- identity testing ----------------------------------------------------

fn upit_cmd(s: &Session, first: &Path, second: &Path) -> Result<u8> {
    s.no_rounds("upit")?;
    let c1 = inputs::load_circuit(first)?;
    let c2 = inputs::load_circuit(second)?;
    let spec = s.field.unwrap_or(FieldSpec { q: DEFAULT_EVAL_PRIME, ell: None });
    let ell = spec.ell.unwrap_or(1);
    let base = Field::extension(spec.q, ell)?;
    let degree = c1.syntactic_degree().max(c2.syntactic_degree());
    let det = ops::scoped(Phase::Oracle, || upit_deterministic(&c1, &c2, &base))?;
    let mut coins = s.coin_source()?;
    let mut rec = RecordingCoins::new(coins.as_mut());
    let rand_eq = ops::scoped(Phase::Verifier, || upit_random(&c1, &c2, &base, &mut rec))?;
    let coin_bits: u64 = rec.draws().iter().map(|d| u64::from(d.bits)).sum();
    let mut t =
        Transcript::new("upit", json!({ "q": spec.q, "ell": ell, "degree": degree }));
    for d in rec.draws() {
        t.push_coin(*d);
    }
    t.set_decision(rand_eq);
    let mut rep = Report::new("upit");
    rep.line("field", format!("{}^{ell}", spec.q));
    rep.line("degree", degree);
    rep.line("deterministic", if det { "equal" } else { "unequal" });
    rep.line("randomized", if rand_eq { "equal" } else { "unequal" });
    coins_line(&mut rep, coin_bits);
    s.conclude(rep, t, if det { EXIT_ACCEPT } else { EXIT_UNSOUND })
}

// --- reference oracles ---------------------------------------------------

fn oracle_cmd(s: &Session, problem: OracleCmd) -> Result<u8> {
    s.no_rounds("oracle")?;
    s.no_replay("oracle")?;
    s.no_transcript("oracle")?;
    let mut rep;
    match problem {
        OracleCmd::Multipoint { circuit, points } => {
            let c = inputs::load_circuit(&circuit)?;
            let pts = inputs::load_csv_rows(&points, "points")?;
            let q = s.field.map_or(Ok(DEFAULT_EVAL_PRIME), |f| f.prime_only("oracle multipoint"))?;
            let values = ops::scoped(Phase::Oracle, || oracle_multipoint(&c, q, &pts))?;
            rep = Report::oracle("multipoint");
            rep.line("modulus", q);
            rep.list("values", values);
        }
        OracleCmd::Cubesum { circuit } => {
            let c = inputs::load_circuit(&circuit)?;
            let p = s.field.map_or(Ok(DEFAULT_SUM_PRIME), |f| f.prime_only("oracle cubesum"))?;
            let sum = ops::scoped(Phase::Oracle, || oracle_cube_sum(&c, p))?;
            rep = Report::oracle("cubesum");
            rep.line("modulus", p);
            rep.line("sum", sum);
        }
        OracleCmd::Sat { formula } => {
            s.no_field("oracle sat", "the count is an exact integer")?;
            let f = inputs::load_formula(&formula)?;
            let count = ops::scoped(Phase::Oracle, || oracle_sat(&f))?;
            rep = Report::oracle("sat");
            rep.line("count", count);
        }
        OracleCmd::Qbf { formula } => {
            s.no_field("oracle qbf", "the decision is exact")?;
            let phi = inputs::load_qbf(&formula)?;
            let value = ops::scoped(Phase::Oracle, || oracle_qbf(&phi))?;
            rep = Report::oracle("qbf");
            rep.line("value", value);
        }
        OracleCmd::Permanent { matrix } => {
            s.no_field("oracle permanent", "the permanent is an exact integer")?;
            let m = inputs::load_csv_rows(&matrix, "matrix")?;
            let value = ops::scoped(Phase::Oracle, || oracle_permanent(&m))?;
            rep = Report::oracle("permanent");
            rep.line("permanent", value);
        }
        OracleCmd::Hamcycles { graph, undirected } => {
            s.no_field("oracle hamcycles", "the count is an exact integer")?;
            let adj = inputs::load_graph(&graph, undirected)?;
            if undirected && adj.len() < 3 {
                return Err(Error::usage(
                    "undirected Hamiltonian counting needs at least 3 nodes".to_string(),
                ));
            }
            let mut count = ops::scoped(Phase::Oracle, || oracle_hamcycles(&adj))?;
            if undirected {
                // each undirected cycle is two directed traversals
                count /= 2;
            }
            rep = Report::oracle("hamcycles");
            rep.line("directed", !undirected);
            rep.line("cycles", count);
        }
        OracleCmd::Ov { vectors } => {
            s.no_field("oracle ov", "the counts are exact integers")?;
            let a = inputs::load_bit_rows(&vectors, "vectors")?;
            let counts = ops::scoped(Phase::Oracle, || oracle_ov(&a))?;
            rep = Report::oracle("ov");
            rep.list("counts", counts);
        }
        OracleCmd::Hamming { vectors, k } => {
            s.no_field("oracle hamming", "the counts are exact integers")?;
            let a = inputs::load_bit_rows(&vectors, "vectors")?;
            let counts = ops::scoped(Phase::Oracle, || oracle_hamming(&a, k))?;
            rep = Report::oracle("hamming");
            rep.line("k", k);
            rep.list("counts", counts);
        }
        OracleCmd::Cliques { graph, k } => {
            s.no_field("oracle cliques", "the count is an exact integer")?;
            let adj = inputs::load_graph(&graph, true)?;
            let count = ops::scoped(Phase::Oracle, || oracle_cliques(&adj, k))?;
            rep = Report::oracle("cliques");
            rep.line("k", k);
            rep.line("cliques", count);
        }
    }
    if s.count_ops {
        rep.ops_breakdown();
    }
    rep.print();
    Ok(EXIT_ACCEPT)
}
