use std::collections::BTreeMap;

use anyhow::Context;
use cfmac_core::scheme::codebook::TABLE_LIMIT;
use cfmac_core::scheme::{derive_params, gen_codebook, run_exhaustive, Codebook, RunMode, SchemeParams};
use serde::{Deserialize, Serialize};

use crate::output::{csv_float, emit, to_json, FORMAT_VERSION};
use crate::{resolve_seed, Format, Outcome, SeedSource, SimArgs, SimMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub mode: SimMode,
    pub samples: Option<u64>,
    pub seed: u64,
    pub seed_source: SeedSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsOut {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub n1: usize,
    pub n2: usize,
    pub ell: usize,
    pub k: usize,
    pub log2_m1: u32,
    pub log2_m2: u32,
    pub m1: u64,
    pub m2: u64,
    pub r1: f64,
    pub r2: f64,
    pub rate_sum: f64,
}

impl From<&SchemeParams> for ParamsOut {
    fn from(p: &SchemeParams) -> Self {
        ParamsOut {
            n: p.n,
            epsilon: p.epsilon,
            delta: p.delta,
            n1: p.n1,
            n2: p.n2,
            ell: p.ell,
            k: p.k,
            log2_m1: p.log2_m1,
            log2_m2: p.log2_m2,
            m1: p.m1(),
            m2: p.m2(),
            r1: p.r1(),
            r2: p.r2(),
            rate_sum: p.rate_sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub format_version: u32,
    pub command: String,
    pub config: SimConfig,
    pub params: ParamsOut,
    /// `table` or `permutation`.
    pub codebook: String,
    pub seed: u64,
    pub pairs_tested: u64,
    pub decode_errors: u64,
    pub overflow_count: u64,
    pub mismatches: u64,
    pub goodness_failures: u64,
    pub membership_failures: u64,
    pub max_list_size: usize,
    pub histogram: BTreeMap<usize, u64>,
    pub p_max_estimate: f64,
    pub error_rate: f64,
    pub overflow_rate: f64,
}

/// Runs the simulation and builds the report without writing it.
pub fn simulate(a: &SimArgs) -> anyhow::Result<SimReport> {
    let (seed, seed_source) = resolve_seed(&a.seed)?;
    let params = derive_params(a.n, a.epsilon, a.delta)?;
    if params.n1 > cfmac_core::scheme::word::MAX_N1 {
        anyhow::bail!(
            "phase-1 length {} exceeds the simulated maximum {}",
            params.n1,
            cfmac_core::scheme::word::MAX_N1
        );
    }
    let codebook = gen_codebook(&params, seed)?;
    if let Some(path) = &a.dump_codebook {
        let text = codebook.dump(TABLE_LIMIT).context("codebook too large to dump")?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let mode = match a.mode {
        SimMode::Exhaustive => RunMode::Exhaustive,
        SimMode::Sample => RunMode::Sample(a.samples),
    };
    let stats = run_exhaustive(&params, &codebook, seed, mode)?;
    Ok(SimReport {
        format_version: FORMAT_VERSION,
        command: "dueck-sim".into(),
        config: SimConfig {
            n: a.n,
            epsilon: a.epsilon,
            delta: a.delta,
            mode: a.mode,
            samples: matches!(a.mode, SimMode::Sample).then_some(a.samples),
            seed,
            seed_source,
        },
        params: ParamsOut::from(&params),
        codebook: match codebook {
            Codebook::Table { .. } => "table".into(),
            Codebook::Permutation { .. } => "permutation".into(),
        },
        seed,
        pairs_tested: stats.pairs_tested,
        decode_errors: stats.decode_errors,
        overflow_count: stats.overflow_count,
        mismatches: stats.mismatches,
        goodness_failures: stats.goodness_failures,
        membership_failures: stats.membership_failures,
        max_list_size: stats.max_list_size,
        histogram: stats.histogram,
        p_max_estimate: stats.p_max_estimate,
        error_rate: stats.error_rate,
        overflow_rate: stats.overflow_rate,
    })
}

pub const CSV_HEADER: &str =
    "n,epsilon,delta,seed,pairs_tested,decode_errors,overflow_count,max_list_size,p_max_estimate,rate_sum";

pub fn to_csv(r: &SimReport) -> String {
    format!(
        "{CSV_HEADER}\n{},{},{},{},{},{},{},{},{},{}\n",
        r.params.n,
        csv_float(r.params.epsilon),
        csv_float(r.params.delta),
        r.seed,
        r.pairs_tested,
        r.decode_errors,
        r.overflow_count,
        r.max_list_size,
        csv_float(r.p_max_estimate),
        csv_float(r.params.rate_sum),
    )
}

pub fn run(a: &SimArgs) -> anyhow::Result<Outcome> {
    let report = simulate(a)?;
    let text = match a.format {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(&report),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(outcome_of(&report))
}

/// Any decode error is an experiment failure.
pub fn outcome_of(r: &SimReport) -> Outcome {
    if r.decode_errors == 0 {
        Outcome::Success
    } else {
        Outcome::Failure
    }
}
