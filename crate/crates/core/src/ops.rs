//! Field-operation accounting.
//!
//! Counting is scoped: wrap a region in [`scoped`] with a [`Phase`] and every
//! field addition, multiplication and inversion executed inside it is tallied
//! into that phase's bucket.  Outside any scope the counters are dormant and
//! the per-operation cost is a single thread-local flag check.
//!
//! Fast polynomial paths (NTT-based multiplication) tally the modular
//! multiplications they actually perform in bulk rather than one call per
//! butterfly, so reported counts reflect executed work for every strategy.

use std::cell::Cell;

/// Which party's work is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Prover,
    Verifier,
    Oracle,
}

/// Raw tallies for one phase.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    pub invs: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.invs
    }
}

/// Per-phase breakdown of one measured run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpReport {
    pub prover: OpCounts,
    pub verifier: OpCounts,
    pub oracle: OpCounts,
}

impl OpReport {
    pub fn phase(&self, phase: Phase) -> &OpCounts {
        match phase {
            Phase::Prover => &self.prover,
            Phase::Verifier => &self.verifier,
            Phase::Oracle => &self.oracle,
        }
    }
}

thread_local! {
    static ACTIVE: Cell<Option<Phase>> = const { Cell::new(None) };
    static PROVER: Cell<OpCounts> = const { Cell::new(OpCounts { adds: 0, muls: 0, invs: 0 }) };
    static VERIFIER: Cell<OpCounts> = const { Cell::new(OpCounts { adds: 0, muls: 0, invs: 0 }) };
    static ORACLE: Cell<OpCounts> = const { Cell::new(OpCounts { adds: 0, muls: 0, invs: 0 }) };
}

fn bucket(phase: Phase) -> &'static std::thread::LocalKey<Cell<OpCounts>> {
    match phase {
        Phase::Prover => &PROVER,
        Phase::Verifier => &VERIFIER,
        Phase::Oracle => &ORACLE,
    }
}

/// Clears all tallies.  Counters are monotone between resets.
pub fn reset() {
    for p in [Phase::Prover, Phase::Verifier, Phase::Oracle] {
        bucket(p).with(|c| c.set(OpCounts::default()));
    }
}

/// Snapshot of the tallies accumulated since the last [`reset`].
pub fn report() -> OpReport {
    OpReport {
        prover: PROVER.with(Cell::get),
        verifier: VERIFIER.with(Cell::get),
        oracle: ORACLE.with(Cell::get),
    }
}

/// Runs `f` with operation counting directed at `phase`.
///
/// Scopes nest; the innermost phase wins.  The previous phase (or dormancy)
/// is restored on exit, including on panic unwind.
pub fn scoped<T>(phase: Phase, f: impl FnOnce() -> T) -> T {
    struct Restore(Option<Phase>);
    impl Drop for Restore {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let _restore = Restore(ACTIVE.with(|a| a.replace(Some(phase))));
    f()
}

#[inline]
pub(crate) fn counting() -> bool {
    ACTIVE.with(|a| a.get().is_some())
}

#[inline]
fn tally(f: impl FnOnce(&mut OpCounts)) {
    if let Some(phase) = ACTIVE.with(|a| a.get()) {
        bucket(phase).with(|c| {
            let mut v = c.get();
            f(&mut v);
            c.set(v);
        });
    }
}

#[inline]
pub(crate) fn add(n: u64) {
    tally(|c| c.adds += n);
}

#[inline]
pub(crate) fn mul(n: u64) {
    tally(|c| c.muls += n);
}

#[inline]
pub(crate) fn inv(n: u64) {
    tally(|c| c.invs += n);
}
