//! Verifier randomness with exact bit accounting.
//!
//! All protocol coins flow through a [`CoinSupply`] so that (a) the number of
//! random bits a verifier consumes can be reported and checked against the
//! theoretical budget, and (b) recorded transcripts can be replayed with
//! their original coins bit-for-bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// One recorded draw: the number of bits requested and the value returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Draw {
    pub bits: u32,
    pub value: u128,
}

/// Source of verifier coins.
pub trait CoinSupply {
    /// Returns a uniform integer in `[0, 2^bits)`.  `bits` must be in 1..=128.
    fn draw_bits(&mut self, bits: u32) -> Result<u128>;

    /// Total bits handed out so far.
    fn bits_consumed(&self) -> u64;
}

/// Fresh pseudorandom coins from a seeded, portable stream cipher.
pub struct Coins {
    rng: ChaCha12Rng,
    consumed: u64,
    log: Vec<Draw>,
}

impl Coins {
    pub fn from_seed(seed: u64) -> Self {
        Coins { rng: ChaCha12Rng::seed_from_u64(seed), consumed: 0, log: Vec::new() }
    }

    /// Every draw made so far, in order, for transcript recording.
    pub fn log(&self) -> &[Draw] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<Draw> {
        std::mem::take(&mut self.log)
    }
}

impl CoinSupply for Coins {
    fn draw_bits(&mut self, bits: u32) -> Result<u128> {
        if bits == 0 || bits > 128 {
            return Err(Error::usage(format!("coin draw of {bits} bits out of range 1..=128")));
        }
        let mut value: u128 = 0;
        let words = bits.div_ceil(64);
        for w in 0..words {
            value |= u128::from(self.rng.next_u64()) << (64 * w);
        }
        if bits < 128 {
            value &= (1u128 << bits) - 1;
        }
        self.consumed += u64::from(bits);
        self.log.push(Draw { bits, value });
        Ok(value)
    }

    fn bits_consumed(&self) -> u64 {
        self.consumed
    }
}

/// Coins replayed from a recorded transcript.
///
/// A draw whose width disagrees with the recording means the transcript does
/// not belong to the protocol run being replayed; that surfaces as a usage
/// error rather than silently desynchronizing.
pub struct ReplayCoins {
    draws: std::collections::VecDeque<Draw>,
    consumed: u64,
}

impl ReplayCoins {
    pub fn new(draws: Vec<Draw>) -> Self {
        ReplayCoins { draws: draws.into(), consumed: 0 }
    }

    pub fn fully_consumed(&self) -> bool {
        self.draws.is_empty()
    }
}

impl CoinSupply for ReplayCoins {
    fn draw_bits(&mut self, bits: u32) -> Result<u128> {
        let d = self
            .draws
            .pop_front()
            .ok_or_else(|| Error::usage("replay exhausted: protocol drew more coins than recorded"))?;
        if d.bits != bits {
            return Err(Error::usage(format!(
                "replay mismatch: recorded draw of {} bits, protocol requested {bits}",
                d.bits
            )));
        }
        self.consumed += u64::from(bits);
        Ok(d.value)
    }

    fn bits_consumed(&self) -> u64 {
        self.consumed
    }
}

/// Pass-through supply that records every draw, for building transcripts
/// from protocols that take an opaque [`CoinSupply`].
pub struct RecordingCoins<'a> {
    inner: &'a mut dyn CoinSupply,
    draws: Vec<Draw>,
}

impl<'a> RecordingCoins<'a> {
    pub fn new(inner: &'a mut dyn CoinSupply) -> Self {
        RecordingCoins { inner, draws: Vec::new() }
    }

    pub fn draws(&self) -> &[Draw] {
        &self.draws
    }
}

impl CoinSupply for RecordingCoins<'_> {
    fn draw_bits(&mut self, bits: u32) -> Result<u128> {
        let value = self.inner.draw_bits(bits)?;
        self.draws.push(Draw { bits, value });
        Ok(value)
    }

    fn bits_consumed(&self) -> u64 {
        self.inner.bits_consumed()
    }
}
