use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use cfmac_core::bounds::cstar::{search_cstar, CstarReport, SearchConfig, SqrtLawReport};
use cfmac_core::bounds::wringing::{wringing_extract, WRINGING_CAP};
use cfmac_core::bounds::{
    check_cstar, dueck_outer_bound, sqrt_law_curve, BoundsError, DistFile, DUECK_OUTER_PUBLISHED,
};
use cfmac_core::mac::MacFile;
use serde::{Deserialize, Serialize};

use super::sigma::load_mac;
use crate::output::{emit, read_json, to_json, FORMAT_VERSION};
use crate::{resolve_seed, FindArgs, Outcome, OuterArgs, SeedSource, SqrtArgs, WringingArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterReport {
    pub format_version: u32,
    pub command: String,
    pub grid_step: f64,
    pub p_star: f64,
    pub value: f64,
    #[serde(rename = "paper_value")]
    pub published_value: f64,
    /// `value - published_value`.
    pub discrepancy: f64,
    pub note: String,
}

pub fn outer_report(grid_step: f64) -> anyhow::Result<OuterReport> {
    let ob = dueck_outer_bound(grid_step)?;
    Ok(OuterReport {
        format_version: FORMAT_VERSION,
        command: "outer-bound".into(),
        grid_step,
        p_star: ob.p_star,
        value: ob.value,
        published_value: DUECK_OUTER_PUBLISHED,
        discrepancy: ob.value - DUECK_OUTER_PUBLISHED,
        note: "value is the maximum of H(1/3) + 2/3 - p + H(p) over [0, 1/2], attained at p = 1/3 where it equals \
               2 H(1/3) + 1/3; the published constant 2.1632 does not match this closed form"
            .into(),
    })
}

pub fn run_outer(a: &OuterArgs) -> anyhow::Result<Outcome> {
    emit(a.out.as_deref(), &to_json(&outer_report(a.grid_step)?)?)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WringingConfig {
    pub dist: PathBuf,
    pub epsilon: f64,
    pub delta: f64,
    pub x1_size: usize,
    pub x2_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WringingReport {
    pub format_version: u32,
    pub command: String,
    pub config: WringingConfig,
    pub n: usize,
    /// 1-based coordinates.
    pub t_set: Vec<usize>,
    pub size_limit: usize,
    pub residual: BTreeMap<usize, f64>,
}

pub fn wringing_report(a: &WringingArgs) -> anyhow::Result<WringingReport> {
    let dist: DistFile = read_json(&a.dist)?;
    let cj = dist.into_joint()?;
    let r = wringing_extract(&cj, a.x1_size, a.x2_size, a.epsilon, a.delta, WRINGING_CAP)?;
    Ok(WringingReport {
        format_version: FORMAT_VERSION,
        command: "wringing".into(),
        config: WringingConfig {
            dist: a.dist.clone(),
            epsilon: a.epsilon,
            delta: a.delta,
            x1_size: a.x1_size,
            x2_size: a.x2_size,
        },
        n: r.n,
        size_limit: r.size_limit(),
        t_set: r.t_set,
        residual: r.residual,
    })
}

pub fn run_wringing(a: &WringingArgs) -> anyhow::Result<Outcome> {
    emit(a.out.as_deref(), &to_json(&wringing_report(a)?)?)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtConfig {
    pub mac: PathBuf,
    pub pind: PathBuf,
    pub pdep: PathBuf,
    pub deltas: Vec<f64>,
    pub eps_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtReport {
    pub format_version: u32,
    pub command: String,
    pub config: SqrtConfig,
    pub cstar: CstarReport,
    /// Absent when the pair is not a witness.
    pub curve: Option<SqrtLawReport>,
}

/// The report and whether the pair passed the membership gate.
pub fn sqrt_report(a: &SqrtArgs) -> anyhow::Result<(SqrtReport, bool)> {
    let mac = load_mac(&a.mac)?;
    let p_ind = read_json::<DistFile>(&a.pind)?.into_single().context("reading --pind")?;
    let p_dep = read_json::<DistFile>(&a.pdep)?.into_single().context("reading --pdep")?;
    let cstar = check_cstar(&mac, &p_ind, &p_dep, None)?;
    let config = SqrtConfig {
        mac: a.mac.clone(),
        pind: a.pind.clone(),
        pdep: a.pdep.clone(),
        deltas: a.deltas.clone(),
        eps_tilde: a.eps_tilde,
    };
    let curve = match sqrt_law_curve(&mac, &p_ind, &p_dep, a.eps_tilde, &a.deltas) {
        Ok(c) => Some(c),
        Err(BoundsError::NotInCstar { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let member = curve.is_some();
    Ok((SqrtReport { format_version: FORMAT_VERSION, command: "sqrt-law".into(), config, cstar, curve }, member))
}

pub fn run_sqrt_law(a: &SqrtArgs) -> anyhow::Result<Outcome> {
    let (report, member) = sqrt_report(a)?;
    emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(if member { Outcome::Success } else { Outcome::Failure })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindReport {
    pub format_version: u32,
    pub command: String,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub tries: usize,
    pub min_margin: f64,
    pub attempt: usize,
    pub cstar: CstarReport,
}

pub fn run_find(a: &FindArgs) -> anyhow::Result<Outcome> {
    let (seed, seed_source) = resolve_seed(&a.seed)?;
    let cfg = SearchConfig { seed, tries: a.tries, min_margin: a.min_margin, ..SearchConfig::default() };
    let w = match search_cstar(&cfg) {
        Ok(w) => w,
        Err(BoundsError::SearchFailed { tries }) => {
            eprintln!("no witness found in {tries} channels");
            return Ok(Outcome::Failure);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        emit(Some(&dir.join("cstar_mac.json")), &to_json(&MacFile::from(&w.mac))?)?;
        emit(Some(&dir.join("pind.json")), &to_json(&DistFile::from(&w.p_ind))?)?;
        emit(Some(&dir.join("pdep.json")), &to_json(&DistFile::from(&w.p_dep))?)?;
    }
    let report = FindReport {
        format_version: FORMAT_VERSION,
        command: "find-cstar".into(),
        seed,
        seed_source,
        tries: a.tries,
        min_margin: a.min_margin,
        attempt: w.attempt,
        cstar: w.report,
    };
    emit(None, &to_json(&report)?)?;
    Ok(Outcome::Success)
}
