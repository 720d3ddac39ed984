//! Injective phase-1 codebooks for the first encoder.
//!
//! Small codebooks are drawn by sequential uniform sampling with rejection
//! of repeats and stored with a sorted reverse index. Codebooks too large to
//! store (`M1` up to `2^48`) are the image of `[0, M1)` under a keyed
//! Feistel permutation of the word space, which gives an injective,
//! reproducible codebook with `O(1)` encoding and reverse lookup.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;

use super::word::{self, low_bits, MAX_N1};
use super::{SchemeError, SchemeParams};
use crate::mac::dueck::{x1_code, X1_SYMBOLS};
use crate::seed::{self, splitmix64};

/// Largest `M1` stored as an explicit table.
pub const TABLE_LIMIT: u64 = 1 << 20;
const FEISTEL_ROUNDS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum Codebook {
    Table {
        n1: usize,
        words: Vec<u64>,
        /// `(word, message)` sorted by word.
        index: Vec<(u64, u64)>,
    },
    Permutation {
        n1: usize,
        m1: u64,
        keys: [u64; FEISTEL_ROUNDS],
    },
}

impl Codebook {
    /// `m1` distinct words drawn one at a time uniformly from the words not
    /// yet chosen.
    pub fn random_table(n1: usize, m1: u64, seed: u64) -> Result<Self, SchemeError> {
        check_size(n1, m1)?;
        let space = 1u128 << (2 * n1);
        let mut rng = seed::stream(seed, &[0]);
        let mut seen = HashSet::with_capacity(m1 as usize);
        let mut words = Vec::with_capacity(m1 as usize);
        while (words.len() as u64) < m1 {
            let x = rng.gen_range(0..space) as u64;
            if seen.insert(x) {
                words.push(x);
            }
        }
        Ok(Self::from_words(n1, words).expect("sampled words are distinct"))
    }

    /// Keyed permutation codebook; requires an even split of `2 n1` bits.
    pub fn permutation(n1: usize, m1: u64, seed: u64) -> Result<Self, SchemeError> {
        check_size(n1, m1)?;
        if n1 == 0 {
            return Err(SchemeError::InvalidParams("phase-1 length must be positive".into()));
        }
        let mut keys = [0u64; FEISTEL_ROUNDS];
        for (r, k) in keys.iter_mut().enumerate() {
            *k = seed::derive_seed(seed, &[1, r as u64]);
        }
        Ok(Codebook::Permutation { n1, m1, keys })
    }

    /// Table from explicit words, rejecting duplicates.
    pub fn from_words(n1: usize, words: Vec<u64>) -> Result<Self, SchemeError> {
        check_size(n1, words.len() as u64)?;
        let mut index: Vec<(u64, u64)> = words.iter().enumerate().map(|(m, &x)| (x, m as u64)).collect();
        index.sort_unstable();
        if let Some(pair) = index.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(SchemeError::DuplicateCodeword(
                word::to_symbols(pair[0].0, n1).iter().map(|&s| X1_SYMBOLS[s]).collect(),
            ));
        }
        if let Some(&(x, _)) = index.last() {
            if x > low_bits(2 * n1) {
                return Err(SchemeError::InvalidParams("codeword longer than n1".into()));
            }
        }
        Ok(Codebook::Table { n1, words, index })
    }

    pub fn n1(&self) -> usize {
        match self {
            Codebook::Table { n1, .. } | Codebook::Permutation { n1, .. } => *n1,
        }
    }

    pub fn m1(&self) -> u64 {
        match self {
            Codebook::Table { words, .. } => words.len() as u64,
            Codebook::Permutation { m1, .. } => *m1,
        }
    }

    pub fn codeword(&self, w1: u64) -> u64 {
        match self {
            Codebook::Table { words, .. } => words[w1 as usize],
            Codebook::Permutation { n1, keys, .. } => feistel(*n1, keys, w1),
        }
    }

    /// Reverse lookup of a packed word.
    pub fn message_of(&self, x: u64) -> Option<u64> {
        match self {
            Codebook::Table { index, .. } => index.binary_search_by_key(&x, |&(w, _)| w).ok().map(|i| index[i].1),
            Codebook::Permutation { n1, m1, keys } => {
                if x > low_bits(2 * n1) {
                    return None;
                }
                let w = feistel_inverse(*n1, keys, x);
                (w < *m1).then_some(w)
            }
        }
    }

    /// One codeword per line over `a b A B`, in message order.
    pub fn dump(&self, limit: u64) -> Result<String, SchemeError> {
        if self.m1() > limit {
            return Err(SchemeError::ExhaustiveCapExceeded { pairs: self.m1() as f64, cap: limit });
        }
        let mut out = String::new();
        for w1 in 0..self.m1() {
            let line: String = word::to_symbols(self.codeword(w1), self.n1()).iter().map(|&s| X1_SYMBOLS[s]).collect();
            writeln!(out, "{line}").expect("writing to a string");
        }
        Ok(out)
    }

    /// Parses the dump format back into a table codebook.
    pub fn parse_dump(text: &str) -> Result<Self, SchemeError> {
        let mut n1 = None;
        let mut words = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let symbols = line
                .chars()
                .map(|c| x1_code(c).ok_or_else(|| SchemeError::InvalidOutput(format!("unknown codeword symbol {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if *n1.get_or_insert(symbols.len()) != symbols.len() {
                return Err(SchemeError::InvalidParams("codewords of different lengths".into()));
            }
            words.push(word::from_symbols(&symbols)?);
        }
        Self::from_words(n1.unwrap_or(0), words)
    }
}

fn check_size(n1: usize, m1: u64) -> Result<(), SchemeError> {
    if n1 > MAX_N1 {
        return Err(SchemeError::WordTooLong { n1, max: MAX_N1 });
    }
    if (m1 as u128) > 1u128 << (2 * n1) {
        return Err(SchemeError::TooManyCodewords { m1, n1 });
    }
    Ok(())
}

fn round_fn(half: u64, key: u64, mask: u64) -> u64 {
    splitmix64(half ^ key) & mask
}

fn feistel(n1: usize, keys: &[u64; FEISTEL_ROUNDS], x: u64) -> u64 {
    let mask = low_bits(n1);
    let (mut l, mut r) = (x & mask, (x >> n1) & mask);
    for &k in keys {
        (l, r) = (r, l ^ round_fn(r, k, mask));
    }
    l | (r << n1)
}

fn feistel_inverse(n1: usize, keys: &[u64; FEISTEL_ROUNDS], y: u64) -> u64 {
    let mask = low_bits(n1);
    let (mut l, mut r) = (y & mask, (y >> n1) & mask);
    for &k in keys.iter().rev() {
        (l, r) = (r ^ round_fn(l, k, mask), l);
    }
    l | (r << n1)
}

/// Table for small `M1`, keyed permutation otherwise.
pub fn gen_codebook(params: &SchemeParams, seed: u64) -> Result<Codebook, SchemeError> {
    if params.n1 > MAX_N1 {
        return Err(SchemeError::WordTooLong { n1: params.n1, max: MAX_N1 });
    }
    let m1 = params.m1();
    if m1 <= TABLE_LIMIT {
        Codebook::random_table(params.n1, m1, seed)
    } else {
        Codebook::permutation(params.n1, m1, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feistel_is_a_bijection() {
        for n1 in [1, 2, 4] {
            let cb = Codebook::permutation(n1, 1 << (2 * n1), 9).unwrap();
            let mut image: Vec<u64> = (0..cb.m1()).map(|w| cb.codeword(w)).collect();
            for (w, &x) in image.iter().enumerate() {
                assert_eq!(cb.message_of(x), Some(w as u64));
            }
            image.sort_unstable();
            assert_eq!(image, (0..1u64 << (2 * n1)).collect::<Vec<_>>());
        }
        let cb = Codebook::permutation(32, 1 << 40, 1).unwrap();
        for w in [0, 1, 12345, (1 << 40) - 1] {
            assert_eq!(cb.message_of(cb.codeword(w)), Some(w));
        }
    }

    #[test]
    fn exhausting_table_is_a_permutation() {
        let cb = Codebook::random_table(3, 64, 5).unwrap();
        let Codebook::Table { index, .. } = &cb else { panic!("expected table") };
        assert_eq!(index.iter().map(|p| p.0).collect::<Vec<_>>(), (0..64).collect::<Vec<_>>());
        assert!(matches!(Codebook::random_table(3, 65, 5), Err(SchemeError::TooManyCodewords { .. })));
    }

    #[test]
    fn reverse_lookup_and_absence() {
        let cb = Codebook::random_table(8, 100, 6).unwrap();
        let members: HashSet<u64> = (0..100).map(|w| cb.codeword(w)).collect();
        for x in 0..1u64 << 16 {
            assert_eq!(cb.message_of(x).is_some(), members.contains(&x));
        }
        let p = Codebook::permutation(8, 100, 6).unwrap();
        let hits = (0..1u64 << 16).filter(|&x| p.message_of(x).is_some()).count();
        assert_eq!(hits, 100);
    }

    #[test]
    fn dump_round_trip() {
        let cb = Codebook::random_table(5, 20, 7).unwrap();
        let text = cb.dump(1 << 20).unwrap();
        assert_eq!(text.lines().count(), 20);
        assert_eq!(Codebook::parse_dump(&text).unwrap(), cb);
        assert!(Codebook::parse_dump("ab\naB\nab\n").is_err());
        assert!(Codebook::parse_dump("ab\naBA\n").is_err());
    }

    #[test]
    fn deterministic() {
        let p = crate::scheme::derive_params(16, 0.25, 0.75).unwrap();
        assert_eq!(gen_codebook(&p, 42).unwrap(), gen_codebook(&p, 42).unwrap());
        assert_ne!(gen_codebook(&p, 42).unwrap(), gen_codebook(&p, 43).unwrap());
    }
}
