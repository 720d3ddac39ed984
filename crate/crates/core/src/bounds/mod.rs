//! Sum-rate optimizers and the bounds built on them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{self, ConditionedJoint, InfoError, JointPmf, Pmf};
use crate::mac::{DiscreteMac, MacError};

pub mod cstar;
pub mod sigma;
pub mod wringing;

pub use cstar::{check_cstar, search_cstar, sqrt_law_curve, CstarReport, SqrtLawReport};
pub use sigma::{sigma1, sigma_n, Sigma1Point, SigmaNPoint, SolverConfig};
pub use wringing::{wringing_extract, WringingResult};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("delta must be finite and nonnegative, got {0}")]
    InvalidDelta(f64),
    #[error("epsilon must be finite and positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("solver produced a non-finite intermediate value")]
    SolverDiverged,
    #[error("extended input alphabet has {size} letters, cap is {cap}")]
    DimensionCapExceeded { size: f64, cap: usize },
    #[error("invalid bound inputs: {0}")]
    InvalidBounds(String),
    #[error("sqrt(2 delta ln 2) = {0} is not below |Y|/e")]
    DeltaOutOfRange(f64),
    #[error("dependence {total} exceeds n*delta = {limit}")]
    InfeasibleInput { total: f64, limit: f64 },
    #[error("conditioning table would need {size} entries, cap is {cap}")]
    CapExceeded { size: f64, cap: usize },
    #[error("joint of {len} letters is not a power of the {base}-letter alphabet")]
    NotAPower { len: usize, base: usize },
    #[error("independent input is not a product distribution (defect {0})")]
    NotProduct(f64),
    #[error("pair is not a C* witness (margin {margin}, support ok: {support_ok})")]
    NotInCstar { margin: f64, support_ok: bool },
    #[error("delta {delta} is outside the range of delta(lambda), max {max}")]
    InversionFailed { delta: f64, max: f64 },
    #[error("delta(lambda) is not increasing near lambda = {lambda}")]
    NonMonotone { lambda: f64 },
    #[error("no C* witness found in {tries} random channels")]
    SearchFailed { tries: usize },
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// On-disk form of a conditioned joint `p(u, x1, x2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistFile {
    pub u_size: usize,
    pub weights: Vec<f64>,
    /// Indexed `[u][x1][x2]`.
    pub conditionals: Vec<Vec<Vec<f64>>>,
}

impl DistFile {
    pub fn into_joint(self) -> Result<ConditionedJoint, InfoError> {
        if self.u_size != self.weights.len() || self.u_size != self.conditionals.len() {
            return Err(InfoError::InvalidPmf(format!(
                "u_size {} disagrees with {} weights and {} conditionals",
                self.u_size,
                self.weights.len(),
                self.conditionals.len()
            )));
        }
        let weights = Pmf::new(self.weights)?;
        let conditionals = self.conditionals.iter().map(|t| JointPmf::from_table(t)).collect::<Result<Vec<_>, _>>()?;
        ConditionedJoint::new(weights, conditionals)
    }

    /// Single joint stored with `u_size = 1`.
    pub fn into_single(self) -> Result<JointPmf, InfoError> {
        let cj = self.into_joint()?;
        if cj.u_size() != 1 {
            return Err(InfoError::InvalidPmf(format!("expected u_size 1, got {}", cj.u_size())));
        }
        Ok(cj.conditionals()[0].clone())
    }
}

impl From<&ConditionedJoint> for DistFile {
    fn from(cj: &ConditionedJoint) -> Self {
        DistFile {
            u_size: cj.u_size(),
            weights: cj.weights().as_slice().to_vec(),
            conditionals: cj.conditionals().iter().map(JointPmf::to_table).collect(),
        }
    }
}

impl From<&JointPmf> for DistFile {
    fn from(j: &JointPmf) -> Self {
        DistFile { u_size: 1, weights: vec![1.0], conditionals: vec![j.to_table()] }
    }
}

/// `(lower, upper)` sandwich on the average-error sum-capacity.
pub fn sum_capacity_bounds(sigma_lo: f64, sigma_hi: f64, cout1: f64, cout2: f64) -> Result<(f64, f64), BoundsError> {
    let all = [sigma_lo, sigma_hi, cout1, cout2];
    if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(BoundsError::InvalidBounds(format!("inputs must be finite and nonnegative: {all:?}")));
    }
    if sigma_lo > sigma_hi {
        return Err(BoundsError::InvalidBounds(format!("sigma_lo {sigma_lo} exceeds sigma_hi {sigma_hi}")));
    }
    Ok(((sigma_lo - cout1.min(cout2)).max(0.0), sigma_hi))
}

/// Objective of the outer bound on the Dueck channel, `p` in `[0, 1/2]`.
pub fn dueck_outer_objective(p: f64) -> f64 {
    let h = |x: f64| info::binary_entropy(x).expect("argument within [0, 1]");
    h(1.0 / 3.0) + 2.0 / 3.0 - p + h(p)
}

/// The constant reported alongside the outer bound in the literature.
pub const DUECK_OUTER_PUBLISHED: f64 = 2.1632;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterBound {
    pub p_star: f64,
    pub value: f64,
}

/// Grid maximization of the outer-bound objective refined by golden-section
/// search on the bracketing cell.
pub fn dueck_outer_bound(grid_step: f64) -> Result<OuterBound, BoundsError> {
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return Err(BoundsError::InvalidBounds(format!("grid step must lie in (0, 1e-3], got {grid_step}")));
    }
    let cells = (0.5 / grid_step).ceil() as usize;
    let at = |i: usize| (i as f64 * grid_step).min(0.5);
    let best = (0..=cells)
        .max_by(|&a, &b| dueck_outer_objective(at(a)).total_cmp(&dueck_outer_objective(at(b))))
        .expect("grid is nonempty");
    let (mut lo, mut hi) = (at(best.saturating_sub(1)), at((best + 1).min(cells)));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        let c = hi - ratio * (hi - lo);
        let d = lo + ratio * (hi - lo);
        if dueck_outer_objective(c) >= dueck_outer_objective(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let p_star = 0.5 * (lo + hi);
    Ok(OuterBound { p_star, value: dueck_outer_objective(p_star) })
}

/// Bound on `sigma(delta)` obtained by wringing out `epsilon` per coordinate.
pub fn wringing_upper_bound(
    mac: &DiscreteMac,
    delta: f64,
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<f64, BoundsError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(BoundsError::InvalidEpsilon(epsilon));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(BoundsError::InvalidDelta(delta));
    }
    let inner = sigma1(mac, epsilon, cfg)?;
    Ok(delta / epsilon * (mac.input_size() as f64).log2() + inner.value)
}

/// Capacity of the channel from the joint input `(x1, x2)` to `y`, an upper
/// bound on every `sigma_n(delta)`. Returns the Blahut-Arimoto upper
/// estimate `max_x D(W_x || q)`, which is never below the capacity.
pub fn joint_input_capacity(mac: &DiscreteMac, tol: f64, max_iters: usize) -> f64 {
    let nx = mac.input_size();
    let ny = mac.y_size();
    let w = mac.transition();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut upper = f64::INFINITY;
    for _ in 0..max_iters.max(1) {
        let q = mac.output_distribution_of(&p);
        let d: Vec<f64> = (0..nx).map(|x| info::kl_of(&w[x * ny..(x + 1) * ny], &q)).collect();
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        upper = upper.min(d.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        if upper - lower < tol {
            break;
        }
        let z: f64 = p.iter().zip(&d).map(|(a, b)| a * b.exp2()).sum();
        p = p.iter().zip(&d).map(|(a, b)| a * b.exp2() / z).collect();
    }
    upper
}

/// Pinsker-based upper bound on `sigma_1(delta)` in terms of `sigma_1(0)`.
pub fn continuity_envelope(mac: &DiscreteMac, delta: f64, sigma1_at_zero: f64) -> Result<f64, BoundsError> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(BoundsError::InvalidDelta(delta));
    }
    if delta == 0.0 {
        return Ok(sigma1_at_zero);
    }
    let y = mac.y_size() as f64;
    let s = (2.0 * delta * std::f64::consts::LN_2).sqrt();
    if s >= y / std::f64::consts::E {
        return Err(BoundsError::DeltaOutOfRange(s));
    }
    Ok(s * (y.powi(3) / s).log2() + y.log2() * s + sigma1_at_zero)
}
