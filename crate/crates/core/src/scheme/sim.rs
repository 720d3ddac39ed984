//! Round-trip sweeps and the statistics behind the zero-error argument.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coding::{decode_parts, encode, psi21};
use super::word::{low_bits, Phase1Output};
use super::{Codebook, SchemeError, SchemeParams};
use crate::mac::dueck::{self, X1_SIZE};
use crate::seed;

/// Largest `M1 M2` swept exhaustively.
pub const EXHAUSTIVE_CAP: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "count")]
pub enum RunMode {
    Exhaustive,
    Sample(u64),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub pairs_tested: u64,
    /// Pairs not recovered, including overflows.
    pub decode_errors: u64,
    pub overflow_count: u64,
    /// Non-overflow pairs decoded to the wrong message.
    pub mismatches: u64,
    /// Pairs whose transmitted phase-1 output was bad.
    pub goodness_failures: u64,
    /// Pairs missing from the list of their own output.
    pub membership_failures: u64,
    pub max_list_size: usize,
    /// List size -> number of pairs.
    pub histogram: BTreeMap<usize, u64>,
    pub p_max_estimate: f64,
    pub error_rate: f64,
    pub overflow_rate: f64,
}

impl RunStats {
    fn merge(mut self, other: RunStats) -> RunStats {
        self.pairs_tested += other.pairs_tested;
        self.decode_errors += other.decode_errors;
        self.overflow_count += other.overflow_count;
        self.mismatches += other.mismatches;
        self.goodness_failures += other.goodness_failures;
        self.membership_failures += other.membership_failures;
        self.max_list_size = self.max_list_size.max(other.max_list_size);
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    fn finish(mut self) -> RunStats {
        let pairs = self.pairs_tested.max(1) as f64;
        self.p_max_estimate = if self.decode_errors > 0 { 1.0 } else { 0.0 };
        self.error_rate = self.decode_errors as f64 / pairs;
        self.overflow_rate = self.overflow_count as f64 / pairs;
        self
    }
}

/// Sends one pair through encoder, channel and decoder.
pub fn simulate_pair(w1: u64, w2: u64, codebook: &Codebook, params: &SchemeParams) -> Result<RunStats, SchemeError> {
    let n1 = params.n1;
    let mut s = RunStats { pairs_tested: 1, decode_errors: 1, ..RunStats::default() };
    let x1 = codebook.codeword(w1);
    let flip = psi21(x1, w2, n1);
    let sent = Phase1Output::of(x1, if flip == 1 { !w2 & low_bits(n1) } else { w2 }, n1);
    if !sent.is_good() {
        s.goodness_failures = 1;
        return Ok(s);
    }
    let record = |list: &super::coding::ListDecodeResult, s: &mut RunStats| {
        s.max_list_size = list.entries.len();
        s.histogram.insert(list.entries.len(), 1);
        if list.entries.binary_search(&(w1, w2)).is_err() {
            s.membership_failures = 1;
        }
    };
    match encode(w1, w2, codebook, params) {
        Ok(e) => {
            // deterministic channel with y2 = x2, so the decoder sees the
            // phase-2 input bits directly
            let y = e.phase1_output(n1);
            match decode_parts(&y, e.x2_phase2, codebook, params) {
                Ok(d) => {
                    record(&d.list, &mut s);
                    if d.pair == (w1, w2) {
                        s.decode_errors = 0;
                    } else {
                        s.mismatches = 1;
                    }
                }
                Err(SchemeError::IndexOutOfList { .. }) => s.mismatches = 1,
                Err(err) => return Err(err),
            }
        }
        Err(SchemeError::ListOverflow { .. }) => {
            s.overflow_count = 1;
            let list = super::coding::list_decode_phase1(&sent, codebook, params)?;
            record(&list, &mut s);
        }
        Err(err) => return Err(err),
    }
    Ok(s)
}

/// Exhaustive or sampled round-trip statistics. Sample `i` draws its pair
/// from `seed::stream(seed, &[i])`, so results do not depend on the number
/// of worker threads.
pub fn run_exhaustive(
    params: &SchemeParams,
    codebook: &Codebook,
    seed: u64,
    mode: RunMode,
) -> Result<RunStats, SchemeError> {
    let (m1, m2) = (codebook.m1(), params.m2());
    let (count, pair_of): (u64, Box<dyn Fn(u64) -> (u64, u64) + Sync>) = match mode {
        RunMode::Exhaustive => {
            let pairs = (m1 as u128) * (m2 as u128);
            if pairs > EXHAUSTIVE_CAP as u128 {
                return Err(SchemeError::ExhaustiveCapExceeded { pairs: pairs as f64, cap: EXHAUSTIVE_CAP });
            }
            (pairs as u64, Box::new(move |p| (p / m2, p % m2)))
        }
        RunMode::Sample(count) => (
            count,
            Box::new(move |i| {
                let mut rng = seed::stream(seed, &[i]);
                (rng.gen_range(0..m1), rng.gen_range(0..m2))
            }),
        ),
    };
    let stats = (0..count)
        .into_par_iter()
        .map(|i| {
            let (w1, w2) = pair_of(i);
            simulate_pair(w1, w2, codebook, params)
        })
        .try_reduce(RunStats::default, |a, b| Ok(a.merge(b)))?;
    Ok(stats.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim1Vectors {
    pub n1: usize,
    pub trials: u64,
    pub counterexamples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim1Report {
    pub symbol_cases: usize,
    pub symbol_failures: usize,
    pub vectors: Vec<Claim1Vectors>,
    pub passed: bool,
}

/// Per-symbol and per-vector check that a bad output becomes good after
/// complementing the second input.
pub fn claim1_check(seed: u64, trials: u64, lengths: &[usize]) -> Claim1Report {
    let erased = |x1: usize, b: usize| dueck::is_erasure(dueck::w(x1, b).0);
    let mut symbol_failures = 0;
    for x1 in 0..X1_SIZE {
        for b in 0..2 {
            if erased(x1, b) == erased(x1, 1 - b) {
                symbol_failures += 1;
            }
        }
    }
    let vectors: Vec<Claim1Vectors> = lengths
        .iter()
        .enumerate()
        .map(|(li, &n1)| {
            let counterexamples = (0..trials)
                .into_par_iter()
                .filter(|&t| {
                    let mut rng = seed::stream(seed, &[li as u64, t]);
                    let x1: Vec<usize> = (0..n1).map(|_| rng.gen_range(0..X1_SIZE)).collect();
                    let w2: Vec<usize> = (0..n1).map(|_| rng.gen_range(0..2)).collect();
                    let e = x1.iter().zip(&w2).filter(|(&a, &b)| erased(a, b)).count();
                    let e_bar = x1.iter().zip(&w2).filter(|(&a, &b)| erased(a, 1 - b)).count();
                    let bad = 2 * e > n1;
                    let bar_good = 2 * e_bar <= n1;
                    e + e_bar != n1 || (bad && !bar_good)
                })
                .count() as u64;
            Claim1Vectors { n1, trials, counterexamples }
        })
        .collect();
    let passed = symbol_failures == 0 && vectors.iter().all(|v| v.counterexamples == 0);
    Claim1Report { symbol_cases: 2 * X1_SIZE, symbol_failures, vectors, passed }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim2Report {
    pub samples: u64,
    /// Hits -> number of samples.
    pub histogram: BTreeMap<usize, u64>,
    pub max_hits: usize,
    pub threshold: usize,
    pub exceed_count: u64,
    pub exceed_fraction: f64,
    pub mean_hits: f64,
    /// Mean over samples of the expected hits given the erasure count.
    pub analytic_mean: f64,
    /// Standard deviation of the sample mean under the same model.
    pub analytic_sd: f64,
    pub z_score: f64,
}

/// Expected hits and their variance when the other `M1 - 1` codewords are a
/// uniform subset of the remaining `4^n1 - 1` words, `2^E - 1` of which lie
/// in the preimage set.
pub fn hit_moments(m1: u64, n1: usize, erasures: usize) -> (f64, f64) {
    let population = 4f64.powi(n1 as i32) - 1.0;
    let good = 2f64.powi(erasures as i32) - 1.0;
    let draws = m1 as f64 - 1.0;
    let p = good / population;
    let mean = 1.0 + draws * p;
    let var = if population > 1.0 { draws * p * (1.0 - p) * (population - draws) / (population - 1.0) } else { 0.0 };
    (mean, var)
}

/// Counts codewords inside the preimage set of sampled transmitted outputs.
pub fn claim2_stats(
    params: &SchemeParams,
    codebook: &Codebook,
    seed: u64,
    samples: u64,
) -> Result<Claim2Report, SchemeError> {
    if samples == 0 {
        return Err(SchemeError::InvalidParams("sample count must be positive".into()));
    }
    let (m1, m2, n1) = (codebook.m1(), params.m2(), params.n1);
    let per_sample: Vec<(usize, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(seed, &[i]);
            let (w1, w2) = (rng.gen_range(0..m1), rng.gen_range(0..m2));
            let x1 = codebook.codeword(w1);
            let flip = psi21(x1, w2, n1);
            let out = Phase1Output::of(x1, if flip == 1 { !w2 & low_bits(n1) } else { w2 }, n1);
            if !out.is_good() {
                return Err(SchemeError::BadOutput { erasures: out.erasure_count(), n1 });
            }
            let hits = out.preimage_words().filter(|&x| codebook.message_of(x).is_some()).count();
            let (mean, var) = hit_moments(m1, n1, out.erasure_count());
            Ok((hits, mean, var))
        })
        .collect::<Result<_, _>>()?;
    let mut histogram = BTreeMap::new();
    for &(h, _, _) in &per_sample {
        *histogram.entry(h).or_insert(0) += 1;
    }
    let s = samples as f64;
    let threshold = params.hit_threshold();
    let exceed_count = per_sample.iter().filter(|p| p.0 > threshold).count() as u64;
    let mean_hits = per_sample.iter().map(|p| p.0 as f64).sum::<f64>() / s;
    let analytic_mean = per_sample.iter().map(|p| p.1).sum::<f64>() / s;
    let analytic_sd = per_sample.iter().map(|p| p.2).sum::<f64>().sqrt() / s;
    let z_score = if analytic_sd > 0.0 { (mean_hits - analytic_mean) / analytic_sd } else { 0.0 };
    Ok(Claim2Report {
        samples,
        max_hits: per_sample.iter().map(|p| p.0).max().unwrap_or(0),
        histogram,
        threshold,
        exceed_count,
        exceed_fraction: exceed_count as f64 / s,
        mean_hits,
        analytic_mean,
        analytic_sd,
        z_score,
    })
}
