//! Packed words of the scheme.
//!
//! A word over `X1` of length `n1 <= 32` is a `u64` with symbol `i` in bits
//! `2i..2i+2` using the codes `a b A B -> 0 1 2 3`, so bit `2i + 1` is the
//! case bit. A binary word is a `u64` with coordinate `i` in bit `i`.

use super::SchemeError;
use crate::mac::dueck::{self, X1_SIZE, Y1_LOWER_C, Y1_UPPER_C};

/// Longest phase-1 length the packed representation holds.
pub const MAX_N1: usize = 32;

pub fn low_bits(count: usize) -> u64 {
    if count >= 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

/// Bit `i` of the result is bit `2i + 1` of `word`.
pub fn case_bits(word: u64, n1: usize) -> u64 {
    (0..n1).fold(0, |acc, i| acc | (((word >> (2 * i + 1)) & 1) << i))
}

/// Bit `2i` of the result is bit `i` of `bits`.
pub fn spread_low(bits: u64, n1: usize) -> u64 {
    (0..n1).fold(0, |acc, i| acc | (((bits >> i) & 1) << (2 * i)))
}

pub fn symbol(word: u64, i: usize) -> usize {
    ((word >> (2 * i)) & 3) as usize
}

pub fn from_symbols(symbols: &[usize]) -> Result<u64, SchemeError> {
    if symbols.len() > MAX_N1 {
        return Err(SchemeError::WordTooLong { n1: symbols.len(), max: MAX_N1 });
    }
    symbols.iter().enumerate().try_fold(0u64, |acc, (i, &s)| {
        if s >= X1_SIZE {
            return Err(SchemeError::InvalidOutput(format!("x1 symbol {s} out of range")));
        }
        Ok(acc | ((s as u64) << (2 * i)))
    })
}

pub fn to_symbols(word: u64, n1: usize) -> Vec<usize> {
    (0..n1).map(|i| symbol(word, i)).collect()
}

/// Phase-1 channel output, stored as the information it carries about the
/// inputs: `y2` equals the phase-1 `x2` word, erased coordinates reveal only
/// the case bit of `x1` (which equals `y2` there), and every other
/// coordinate reveals the `x1` symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase1Output {
    pub n1: usize,
    /// `x1` with the low bit cleared at erased coordinates.
    pub base: u64,
    pub erasures: u64,
    pub y2: u64,
}

impl Phase1Output {
    /// `W^{n1}(x1, x2)` on packed words.
    pub fn of(x1: u64, x2: u64, n1: usize) -> Self {
        let erasures = !(case_bits(x1, n1) ^ x2) & low_bits(n1);
        Phase1Output { n1, base: x1 & !spread_low(erasures, n1), erasures, y2: x2 & low_bits(n1) }
    }

    pub fn erasure_count(&self) -> usize {
        self.erasures.count_ones() as usize
    }

    /// At most half of the coordinates are erased.
    pub fn is_good(&self) -> bool {
        2 * self.erasure_count() <= self.n1
    }

    /// Every `x1` word consistent with the observed `y1`, ascending.
    pub fn preimage_words(&self) -> impl Iterator<Item = u64> + '_ {
        let free = spread_low(self.erasures, self.n1);
        let mut sub = Some(0u64);
        // ascending submask enumeration of `free`
        std::iter::from_fn(move || {
            let cur = sub?;
            sub = if cur == free { None } else { Some(((cur | !free).wrapping_add(1)) & free) };
            Some(self.base | cur)
        })
    }

    /// Joint output symbols `y = 2 y1 + y2` per coordinate.
    pub fn to_symbols(&self) -> Vec<usize> {
        (0..self.n1)
            .map(|i| {
                let y2 = ((self.y2 >> i) & 1) as usize;
                let y1 = if (self.erasures >> i) & 1 == 1 {
                    if y2 == 0 {
                        Y1_LOWER_C
                    } else {
                        Y1_UPPER_C
                    }
                } else {
                    let s = symbol(self.base, i);
                    if s < 2 {
                        s
                    } else {
                        s + 1
                    }
                };
                dueck::join_y(y1, y2)
            })
            .collect()
    }

    /// Inverse of [`Phase1Output::to_symbols`]; rejects symbols the channel
    /// cannot produce.
    pub fn from_symbols(y: &[usize]) -> Result<Self, SchemeError> {
        let n1 = y.len();
        if n1 > MAX_N1 {
            return Err(SchemeError::WordTooLong { n1, max: MAX_N1 });
        }
        let mut out = Phase1Output { n1, base: 0, erasures: 0, y2: 0 };
        for (i, &sym) in y.iter().enumerate() {
            if sym >= dueck::Y1_SIZE * dueck::Y2_SIZE {
                return Err(SchemeError::InvalidOutput(format!("output symbol {sym} out of range")));
            }
            let (y1, y2) = dueck::split_y(sym);
            out.y2 |= (y2 as u64) << i;
            let x1 = match y1 {
                Y1_LOWER_C | Y1_UPPER_C => {
                    if (y1 == Y1_UPPER_C) != (y2 == 1) {
                        return Err(SchemeError::InvalidOutput(format!("erasure symbol {y1} with y2 = {y2}")));
                    }
                    out.erasures |= 1 << i;
                    2 * y2
                }
                s if s < 2 => s,
                s => s - 1,
            };
            if !dueck::is_erasure(y1) && (x1 >= 2) == (y2 == 1) {
                return Err(SchemeError::InvalidOutput(format!("symbol {y1} cannot appear with y2 = {y2}")));
            }
            out.base |= (x1 as u64) << (2 * i);
        }
        Ok(out)
    }
}
