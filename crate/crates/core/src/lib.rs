//! Cooperation-facilitator coding on discrete multiple access channels.
//!
//! * [`info`]: entropies, mutual informations and divergences (bits).
//! * [`mac`]: channel models, Dueck's deterministic MAC and exact or
//!   Monte-Carlo evaluation of CF codes.
//! * [`bounds`]: the dependence-constrained sum-rate function and the bounds
//!   built on it.
//! * [`scheme`]: the constant-bit cooperation code on Dueck's MAC.

pub mod bounds;
pub mod info;
pub mod mac;
pub mod scheme;
pub mod seed;
