use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cfmac_core::bounds::{joint_input_capacity, sigma1, sum_capacity_bounds, wringing_upper_bound, SolverConfig};
use cfmac_core::mac::{DiscreteMac, MacFile};
use serde::{Deserialize, Serialize};

use crate::output::{csv_float, emit, read_json, round_sig, to_json, FORMAT_VERSION};
use crate::{resolve_seed, BoundsArgs, CurveArgs, Outcome, SeedSource, SolverArgs};

pub const CURVE_HEADER: &str = "delta,value,slack,restarts";
/// Allowed decrease between consecutive curve points before warning.
pub const MONOTONE_TOL: f64 = 1e-3;
/// Wringing parameters tried when bounding `sigma(delta)` from above.
pub const WRINGING_EPSILONS: [f64; 10] = [0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0];

pub fn load_mac(path: &Path) -> anyhow::Result<DiscreteMac> {
    let file: MacFile = read_json(path)?;
    Ok(file.into_mac()?)
}

pub fn solver_config(a: &SolverArgs) -> anyhow::Result<(SolverConfig, SeedSource)> {
    let (seed, source) = resolve_seed(&a.seed)?;
    if a.restarts == 0 || a.u_size == 0 || a.max_iters == 0 {
        anyhow::bail!("--restarts, --max-iters and --u-size must be positive");
    }
    Ok((
        SolverConfig {
            restarts: a.restarts,
            max_iters: a.max_iters,
            u_size: a.u_size,
            seed,
            ..SolverConfig::default()
        },
        source,
    ))
}

/// Inclusive `start:stop:step` grid, values rounded to 12 digits.
pub fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow::anyhow!("bad grid component {s:?}")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        anyhow::bail!("grid must be start:stop:step, got {spec:?}");
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        anyhow::bail!("grid needs finite start <= stop and step > 0, got {spec:?}");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| round_sig(start + i as f64 * step)).collect())
}

/// Sorted, duplicate-free deltas; warns about removed duplicates.
pub fn normalize_deltas(mut deltas: Vec<f64>) -> anyhow::Result<Vec<f64>> {
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
        anyhow::bail!("delta values must be finite and nonnegative, got {d}");
    }
    deltas.sort_by(f64::total_cmp);
    let before = deltas.len();
    deltas.dedup();
    if deltas.len() < before {
        eprintln!("warning: removed {} duplicate delta value(s)", before - deltas.len());
    }
    Ok(deltas)
}

pub fn run_curve(a: &CurveArgs) -> anyhow::Result<Outcome> {
    let mac = load_mac(&a.mac)?;
    let (cfg, _) = solver_config(&a.solver)?;
    let deltas = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => a.deltas.clone(),
    };
    let deltas = normalize_deltas(deltas)?;
    let mut text = format!("{CURVE_HEADER}\n");
    let mut best = f64::NEG_INFINITY;
    for delta in deltas {
        let p = sigma1(&mac, delta, &cfg)?;
        if p.value < best - MONOTONE_TOL {
            eprintln!("warning: value {} at delta {delta} is below an earlier point {best}", p.value);
        }
        best = best.max(p.value);
        writeln!(
            text,
            "{},{},{},{}",
            csv_float(delta),
            csv_float(p.value),
            csv_float(p.feasibility_slack),
            p.restarts
        )?;
    }
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub mac: PathBuf,
    pub cout1: f64,
    pub cout2: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub u_size: usize,
    pub seed: u64,
    pub seed_source: SeedSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaValues {
    /// Solver value at `delta = cout1 + cout2`.
    pub sigma1_at_delta: f64,
    pub joint_input_capacity: f64,
    /// Smallest wringing bound over the tried epsilons, if `delta > 0`.
    pub wringing_bound: Option<f64>,
    pub wringing_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub format_version: u32,
    pub command: String,
    pub config: BoundsConfig,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub sigma_values: SigmaValues,
}

pub fn bounds_report(a: &BoundsArgs) -> anyhow::Result<BoundsReport> {
    if !(a.cout1 >= 0.0 && a.cout2 >= 0.0) || !a.cout1.is_finite() || !a.cout2.is_finite() {
        anyhow::bail!("--cout1 and --cout2 must be finite and nonnegative");
    }
    let mac = load_mac(&a.mac)?;
    let (cfg, seed_source) = solver_config(&a.solver)?;
    let delta = a.cout1 + a.cout2;
    let lo = sigma1(&mac, delta, &cfg)?.value;
    let capacity = joint_input_capacity(&mac, 1e-10, 100_000);
    let (hi, wringing_bound, wringing_epsilon) = if delta == 0.0 {
        // no cooperation: the multi-letter value equals the single-letter one
        (lo, None, None)
    } else {
        let mut best: Option<(f64, f64)> = None;
        for eps in WRINGING_EPSILONS {
            let b = wringing_upper_bound(&mac, delta, eps, &cfg)?;
            if best.map_or(true, |(v, _)| b < v) {
                best = Some((b, eps));
            }
        }
        let (b, eps) = best.expect("epsilon grid is nonempty");
        (lo.max(capacity.min(b)), Some(b), Some(eps))
    };
    let (lower, upper) = sum_capacity_bounds(lo, hi, a.cout1, a.cout2)?;
    Ok(BoundsReport {
        format_version: FORMAT_VERSION,
        command: "bounds".into(),
        config: BoundsConfig {
            mac: a.mac.clone(),
            cout1: a.cout1,
            cout2: a.cout2,
            restarts: cfg.restarts,
            max_iters: cfg.max_iters,
            u_size: cfg.u_size,
            seed: cfg.seed,
            seed_source,
        },
        delta,
        lower,
        upper,
        sigma_values: SigmaValues {
            sigma1_at_delta: lo,
            joint_input_capacity: capacity,
            wringing_bound,
            wringing_epsilon,
        },
    })
}

pub fn run_bounds(a: &BoundsArgs) -> anyhow::Result<Outcome> {
    let report = bounds_report(a)?;
    emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(Outcome::Success)
}
