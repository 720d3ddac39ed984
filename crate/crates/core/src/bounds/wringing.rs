//! Greedy extraction of a coordinate set whose conditioning leaves every
//! other coordinate pair nearly independent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::info::{self, ConditionedJoint};
use crate::mac::digits;

/// Default cap on `u_size * (|X1||X2|)^(|T|+1)`.
pub const WRINGING_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WringingResult {
    /// Extracted coordinates, 1-based, ascending.
    pub t_set: Vec<usize>,
    /// `I(X1t; X2t | U, X1^T, X2^T)` for every 1-based `t` outside `T`.
    pub residual: BTreeMap<usize, f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub n: usize,
}

impl WringingResult {
    /// Integer form of the size guarantee, `floor(n delta / epsilon)`.
    pub fn size_limit(&self) -> usize {
        (self.n as f64 * self.delta / self.epsilon + 1e-9).floor() as usize
    }
}

/// Blocklength `n` with `base^n == len`.
pub fn infer_blocklength(len: usize, base: usize) -> Result<usize, BoundsError> {
    let mut n = 0;
    let mut size = 1usize;
    while size < len && base > 1 {
        size = size.saturating_mul(base);
        n += 1;
    }
    if size != len || (base <= 1 && len != 1) {
        return Err(BoundsError::NotAPower { len, base });
    }
    Ok(n)
}

struct Words {
    n: usize,
    a: usize,
    b: usize,
    d1: Vec<Vec<usize>>,
    d2: Vec<Vec<usize>>,
}

impl Words {
    /// `I(X1t; X2t | U, X1^T, X2^T)` with `t` and `T` 0-based.
    fn conditional_dependence(&self, cj: &ConditionedJoint, t: usize, ctx: &[usize]) -> f64 {
        let ab = self.a * self.b;
        let contexts = ab.pow(ctx.len() as u32);
        let mut total = 0.0;
        for (w, cond) in cj.weights().as_slice().iter().zip(cj.conditionals()) {
            if *w == 0.0 {
                continue;
            }
            let mut table = vec![0.0; contexts * ab];
            let probs = cond.as_slice();
            let cols = self.b.pow(self.n as u32);
            for (i, di) in self.d1.iter().enumerate() {
                for (j, dj) in self.d2.iter().enumerate() {
                    let p = probs[i * cols + j];
                    if p == 0.0 {
                        continue;
                    }
                    let c = ctx.iter().fold(0, |acc, &s| acc * ab + di[s] * self.b + dj[s]);
                    table[c * ab + di[t] * self.b + dj[t]] += p;
                }
            }
            for block in table.chunks(ab) {
                let mass: f64 = block.iter().sum();
                if mass > 0.0 {
                    let normalized: Vec<f64> = block.iter().map(|p| p / mass).collect();
                    total += w * mass * info::mutual_information_of(&normalized, self.a, self.b);
                }
            }
        }
        total
    }
}

/// Greedy wringing with smallest-index tie-break.
pub fn wringing_extract(
    cj: &ConditionedJoint,
    x1_size: usize,
    x2_size: usize,
    epsilon: f64,
    delta: f64,
    cap: usize,
) -> Result<WringingResult, BoundsError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(BoundsError::InvalidEpsilon(epsilon));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(BoundsError::InvalidDelta(delta));
    }
    let (rows, cols) = cj.shape();
    let n = infer_blocklength(rows, x1_size)?;
    if infer_blocklength(cols, x2_size)? != n {
        return Err(BoundsError::NotAPower { len: cols, base: x2_size });
    }
    let total = info::conditional_mutual_information(cj);
    let limit = n as f64 * delta;
    if total > limit + 1e-9 {
        return Err(BoundsError::InfeasibleInput { total, limit });
    }
    let words = Words {
        n,
        a: x1_size,
        b: x2_size,
        d1: (0..rows).map(|i| digits(i, x1_size, n)).collect(),
        d2: (0..cols).map(|j| digits(j, x2_size, n)).collect(),
    };
    let mut t_set: Vec<usize> = Vec::new();
    loop {
        let size = cj.u_size() as f64 * ((x1_size * x2_size) as f64).powi(t_set.len() as i32 + 1);
        if size > cap as f64 {
            return Err(BoundsError::CapExceeded { size, cap });
        }
        let residual: BTreeMap<usize, f64> =
            (0..n).filter(|t| !t_set.contains(t)).map(|t| (t, words.conditional_dependence(cj, t, &t_set))).collect();
        match residual.iter().find(|(_, &v)| v > epsilon) {
            Some((&t, _)) => t_set.push(t),
            None => {
                let mut coords: Vec<usize> = t_set.iter().map(|t| t + 1).collect();
                coords.sort_unstable();
                return Ok(WringingResult {
                    t_set: coords,
                    residual: residual.into_iter().map(|(t, v)| (t + 1, v)).collect(),
                    epsilon,
                    delta,
                    n,
                });
            }
        }
    }
}
