//! The constant-bit cooperation code on Dueck's MAC.
//!
//! Phase 1 (`n1` uses): encoder 1 sends its codeword, encoder 2 sends its
//! message bits, complemented when the facilitator's flip bit says the
//! plain word would erase more than half of the coordinates. Phase 2
//! (`n2` uses): encoder 1 is silent on the constant word `a^n2` and encoder
//! 2 sends the facilitator's list index. The decoder lists every message
//! pair consistent with the phase-1 output and picks the indexed entry.

use thiserror::Error;

use crate::mac::MacError;

pub mod cf;
pub mod codebook;
pub mod coding;
pub mod params;
pub mod sim;
pub mod word;

pub use codebook::{gen_codebook, Codebook};
pub use coding::{decode, encode, list_decode_phase1, psi2, CfOutput, ListDecodeResult};
pub use params::{derive_params, SchemeParams};
pub use sim::{claim1_check, claim2_stats, run_exhaustive, Claim1Report, Claim2Report, RunMode, RunStats};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("phase 2 has {n2} uses but the list index needs {needed}")]
    Phase2TooShort { n2: usize, needed: usize },
    #[error("log2 M1 = {log2_m1} leaves fewer than two messages")]
    DegenerateRates { log2_m1: f64 },
    #[error("{m1} codewords do not fit in 4^{n1} words")]
    TooManyCodewords { m1: u64, n1: usize },
    #[error("phase-1 length {n1} exceeds the packed limit {max}")]
    WordTooLong { n1: usize, max: usize },
    #[error("duplicate codeword {0}")]
    DuplicateCodeword(String),
    #[error("message pair ({w1}, {w2}) out of range")]
    MessageOutOfRange { w1: u64, w2: u64 },
    #[error("list of {len} entries exceeds the cap {ell}")]
    ListOverflow { len: usize, ell: usize },
    #[error("output has {erasures} erasures in {n1} symbols")]
    BadOutput { erasures: usize, n1: usize },
    #[error("list index {index} past list of length {len}")]
    IndexOutOfList { index: usize, len: usize },
    #[error("pair ({w1}, {w2}) missing from its own list")]
    NotInList { w1: u64, w2: u64 },
    #[error("invalid channel output: {0}")]
    InvalidOutput(String),
    #[error("{pairs} pairs exceed the cap {cap}")]
    ExhaustiveCapExceeded { pairs: f64, cap: u64 },
    #[error(transparent)]
    Mac(#[from] MacError),
}
