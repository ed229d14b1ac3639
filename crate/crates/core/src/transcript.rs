//! Protocol transcripts.
//!
//! A transcript is the complete public record of one interactive run: the
//! protocol name, its parameter block, the seed the verifier's coins came
//! from, every message exchanged in order, and the final decision bit.  The
//! design invariant is replayability: the recorded coin draws, fed back
//! through [`crate::coins::ReplayCoins`], drive the verifier to the same
//! decision (a consistency check on the recording, not a fresh soundness
//! guarantee — replayed coins are not random).
//!
//! Serialized form is JSON:
//!
//! ```json
//! {"protocol": "...", "params": {...}, "seed": 0,
//!  "rounds": [{"sender": "prover", "kind": "poly", "payload": "<hex>"}],
//!  "decision": "accept"}
//! ```
//!
//! Payloads are hex: polynomials as little-endian 64-bit coefficient words,
//! coins as the 4-byte bit width followed by the 16-byte drawn value.

use serde::{Deserialize, Serialize};

use crate::coins::Draw;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sender {
    Prover,
    Verifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Poly,
    Prime,
    Coin,
    Decision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Sender,
    pub kind: MessageKind,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub rounds: Vec<Message>,
    pub decision: String,
}

impl Transcript {
    pub fn new(protocol: impl Into<String>, params: serde_json::Value) -> Transcript {
        Transcript {
            protocol: protocol.into(),
            params,
            seed: 0,
            rounds: Vec::new(),
            decision: String::new(),
        }
    }

    pub fn push_poly(&mut self, sender: Sender, limbs: &[u64]) {
        self.rounds.push(Message { sender, kind: MessageKind::Poly, payload: encode_words(limbs) });
    }

    pub fn push_prime(&mut self, sender: Sender, p: u64) {
        self.rounds.push(Message { sender, kind: MessageKind::Prime, payload: encode_words(&[p]) });
    }

    pub fn push_coin(&mut self, draw: Draw) {
        let mut bytes = Vec::with_capacity(20);
        bytes.extend_from_slice(&draw.bits.to_le_bytes());
        bytes.extend_from_slice(&draw.value.to_le_bytes());
        self.rounds.push(Message {
            sender: Sender::Verifier,
            kind: MessageKind::Coin,
            payload: hex::encode(bytes),
        });
    }

    pub fn set_decision(&mut self, accepted: bool) {
        self.decision = if accepted { "accept" } else { "reject" }.to_string();
    }

    pub fn accepted(&self) -> bool {
        self.decision == "accept"
    }

    /// Polynomial payloads in order, decoded back to coefficient words.
    pub fn poly_messages(&self) -> Result<Vec<Vec<u64>>> {
        self.rounds
            .iter()
            .filter(|m| m.kind == MessageKind::Poly)
            .map(|m| decode_words(&m.payload))
            .collect()
    }

    /// Coin payloads in order, ready for [`crate::coins::ReplayCoins`].
    pub fn coin_draws(&self) -> Result<Vec<Draw>> {
        self.rounds
            .iter()
            .filter(|m| m.kind == MessageKind::Coin)
            .map(|m| {
                let bytes = decode_hex(&m.payload)?;
                if bytes.len() != 20 {
                    return Err(Error::domain(format!(
                        "coin payload holds {} bytes, expected 20",
                        bytes.len()
                    )));
                }
                Ok(Draw {
                    bits: u32::from_le_bytes(bytes[..4].try_into().unwrap()),
                    value: u128::from_le_bytes(bytes[4..].try_into().unwrap()),
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize infallibly")
    }

    pub fn from_json(text: &str) -> Result<Transcript> {
        serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("transcript does not parse: {e}")))
    }
}

fn decode_hex(payload: &str) -> Result<Vec<u8>> {
    hex::decode(payload).map_err(|e| Error::domain(format!("payload is not hex: {e}")))
}

/// Little-endian 64-bit words to hex.
pub fn encode_words(words: &[u64]) -> String {
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    hex::encode(bytes)
}

/// Hex back to 64-bit words; the byte count must be a multiple of 8.
pub fn decode_words(payload: &str) -> Result<Vec<u64>> {
    let bytes = decode_hex(payload)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::domain(format!(
            "word payload holds {} bytes, not a multiple of 8",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{CoinSupply, Coins, ReplayCoins};

    #[test]
    fn json_round_trip_is_lossless() {
        let mut t = Transcript::new("sum", serde_json::json!({"p": 17, "claimed": 5}));
        t.seed = 99;
        t.push_poly(Sender::Prover, &[1, 2, 3]);
        t.push_coin(Draw { bits: 5, value: 19 });
        t.push_prime(Sender::Verifier, 101);
        t.set_decision(true);
        let json = t.to_json();
        let back = Transcript::from_json(&json).unwrap();
        assert_eq!(back, t);
        assert!(back.accepted());
        assert_eq!(back.poly_messages().unwrap(), vec![vec![1, 2, 3]]);
        assert_eq!(back.coin_draws().unwrap(), vec![Draw { bits: 5, value: 19 }]);
    }

    #[test]
    fn field_names_match_the_schema() {
        let mut t = Transcript::new("eval", serde_json::json!({}));
        t.push_poly(Sender::Prover, &[7]);
        t.set_decision(false);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        for key in ["protocol", "params", "seed", "rounds", "decision"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["rounds"][0]["sender"], "prover");
        assert_eq!(v["rounds"][0]["kind"], "poly");
        assert_eq!(v["decision"], "reject");
    }

    #[test]
    fn recorded_coins_replay_through_the_supply() {
        let mut fresh = Coins::from_seed(3);
        let a = fresh.draw_bits(11).unwrap();
        let b = fresh.draw_bits(64).unwrap();
        let mut t = Transcript::new("x", serde_json::json!({}));
        for d in fresh.log() {
            t.push_coin(*d);
        }
        let mut replay = ReplayCoins::new(t.coin_draws().unwrap());
        assert_eq!(replay.draw_bits(11).unwrap(), a);
        assert_eq!(replay.draw_bits(64).unwrap(), b);
        assert!(replay.fully_consumed());
    }

    #[test]
    fn malformed_payloads_are_domain_errors() {
        let mut t = Transcript::new("x", serde_json::json!({}));
        t.rounds.push(Message {
            sender: Sender::Verifier,
            kind: MessageKind::Coin,
            payload: "zz".to_string(),
        });
        assert!(matches!(t.coin_draws(), Err(Error::Domain(_))));
        t.rounds[0] = Message {
            sender: Sender::Prover,
            kind: MessageKind::Poly,
            payload: "abcd".to_string(), // 2 bytes, not a word multiple
        };
        assert!(matches!(t.poly_messages(), Err(Error::Domain(_))));
        assert!(Transcript::from_json("{").is_err());
    }
}
