//! Codes for a MAC with a cooperation facilitator, and their error
//! probabilities.
//!
//! A code is the tuple of finite maps
//!
//! ```text
//! phi_i : [M_i] -> [K_i,in]                     (encoder i -> CF)
//! psi_i : [K_1,in] x [K_2,in] -> [K_i,out]      (CF -> encoder i)
//! f_i   : [M_i] x [K_i,out] -> X_i^n            (channel encoder i)
//! g     : Y^n -> [M_1] x [M_2]                  (decoder)
//! ```
//!
//! The decoder is a callable; materializing it as a `|Y|^n` table is only
//! possible for tiny blocklengths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_n, DiscreteMac, MacError, EXACT_STATE_CAP};
use crate::seed;

/// The finite tables of a CF code. Encoder outputs are stored flat:
/// `f1[(w1 * k1_out + z1) * n + t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfTables {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub k1_in: usize,
    pub k2_in: usize,
    pub k1_out: usize,
    pub k2_out: usize,
    pub phi1: Vec<usize>,
    pub phi2: Vec<usize>,
    /// Indexed `v1 * k2_in + v2`.
    pub psi1: Vec<usize>,
    pub psi2: Vec<usize>,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

pub struct CfCode<G> {
    tables: CfTables,
    decoder: G,
}

impl<G> CfCode<G>
where
    G: Fn(&[usize]) -> (usize, usize) + Sync,
{
    /// Checks every table against its declared domain and range.
    pub fn new(mac: &DiscreteMac, tables: CfTables, decoder: G) -> Result<Self, MacError> {
        let t = &tables;
        let bad = |what: &str| Err(MacError::InvalidCode(what.to_string()));
        if t.m1 == 0 || t.m2 == 0 {
            return bad("empty message set");
        }
        let in_range = |v: &[usize], len: usize, max: usize| v.len() == len && v.iter().all(|&x| x < max);
        if !in_range(&t.phi1, t.m1, t.k1_in) {
            return bad("phi1");
        }
        if !in_range(&t.phi2, t.m2, t.k2_in) {
            return bad("phi2");
        }
        if !in_range(&t.psi1, t.k1_in * t.k2_in, t.k1_out) {
            return bad("psi1");
        }
        if !in_range(&t.psi2, t.k1_in * t.k2_in, t.k2_out) {
            return bad("psi2");
        }
        if !in_range(&t.f1, t.m1 * t.k1_out * t.n, mac.x1_size()) {
            return bad("f1");
        }
        if !in_range(&t.f2, t.m2 * t.k2_out * t.n, mac.x2_size()) {
            return bad("f2");
        }
        Ok(CfCode { tables, decoder })
    }

    pub fn tables(&self) -> &CfTables {
        &self.tables
    }

    /// Channel inputs `(f1(w1, z1), f2(w2, z2))` with `z_i = psi_i(phi1(w1), phi2(w2))`.
    pub fn encode(&self, w1: usize, w2: usize) -> (&[usize], &[usize]) {
        let t = &self.tables;
        let v = t.phi1[w1] * t.k2_in + t.phi2[w2];
        let (z1, z2) = (t.psi1[v], t.psi2[v]);
        let s1 = (w1 * t.k1_out + z1) * t.n;
        let s2 = (w2 * t.k2_out + z2) * t.n;
        (&t.f1[s1..s1 + t.n], &t.f2[s2..s2 + t.n])
    }

    pub fn decode(&self, y: &[usize]) -> (usize, usize) {
        (self.decoder)(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    /// Exact channel law; stochastic channels enumerate all of `Y^n`.
    Exact { state_cap: usize },
    /// `trials` channel draws per message pair. The draw for pair index
    /// `w1 * M2 + w2` and trial `j` uses `seed::stream(seed, &[pair, j])`.
    MonteCarlo { trials: usize, seed: u64 },
}

impl EvalMode {
    pub fn exact() -> Self {
        EvalMode::Exact { state_cap: EXACT_STATE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub m1: usize,
    pub m2: usize,
    /// `lambda[w1 * m2 + w2]`.
    pub lambda: Vec<f64>,
    pub p_avg: f64,
    pub p_max: f64,
    pub method: EvalMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl ErrorReport {
    pub fn lambda_at(&self, w1: usize, w2: usize) -> f64 {
        self.lambda[w1 * self.m2 + w2]
    }
}

pub fn evaluate_cf_code<G>(mac: &DiscreteMac, code: &CfCode<G>, mode: EvalMode) -> Result<ErrorReport, MacError>
where
    G: Fn(&[usize]) -> (usize, usize) + Sync,
{
    let t = code.tables();
    let pairs = t.m1 * t.m2;
    let lambda: Vec<f64> = match mode {
        EvalMode::Exact { state_cap } => {
            if !mac.is_deterministic() {
                let states = (mac.y_size() as f64).powi(t.n as i32);
                if states > state_cap as f64 {
                    return Err(MacError::StateSpaceCapExceeded { size: states, cap: state_cap });
                }
            }
            (0..pairs).into_par_iter().map(|p| exact_error(mac, code, p / t.m2, p % t.m2)).collect()
        }
        EvalMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(MacError::NoTrials);
            }
            (0..pairs)
                .into_par_iter()
                .map(|p| {
                    let (w1, w2) = (p / t.m2, p % t.m2);
                    let (x1, x2) = code.encode(w1, w2);
                    let errors = (0..trials)
                        .filter(|&j| {
                            let mut rng = seed::stream(seed, &[p as u64, j as u64]);
                            let y = apply_n(mac, x1, x2, &mut rng).expect("validated code words");
                            code.decode(&y) != (w1, w2)
                        })
                        .count();
                    errors as f64 / trials as f64
                })
                .collect()
        }
    };
    let p_avg = lambda.iter().sum::<f64>() / pairs as f64;
    let p_max = lambda.iter().copied().fold(0.0, f64::max);
    Ok(ErrorReport {
        m1: t.m1,
        m2: t.m2,
        lambda,
        p_avg,
        p_max,
        method: match mode {
            EvalMode::Exact { .. } => EvalMethod::Exact,
            EvalMode::MonteCarlo { .. } => EvalMethod::MonteCarlo,
        },
        trials: match mode {
            EvalMode::Exact { .. } => None,
            EvalMode::MonteCarlo { trials, .. } => Some(trials),
        },
    })
}

fn exact_error<G>(mac: &DiscreteMac, code: &CfCode<G>, w1: usize, w2: usize) -> f64
where
    G: Fn(&[usize]) -> (usize, usize) + Sync,
{
    let (x1, x2) = code.encode(w1, w2);
    if mac.is_deterministic() {
        let y: Vec<usize> = x1.iter().zip(x2).map(|(&a, &b)| mac.map(a, b).unwrap()).collect();
        return if code.decode(&y) == (w1, w2) { 0.0 } else { 1.0 };
    }
    let n = x1.len();
    let mut y = vec![0usize; n];
    let mut err = 0.0;
    loop {
        let p: f64 = (0..n).map(|t| mac.prob(x1[t], x2[t], y[t])).product();
        if p > 0.0 && code.decode(&y) != (w1, w2) {
            err += p;
        }
        let mut t = n;
        loop {
            if t == 0 {
                return err.clamp(0.0, 1.0);
            }
            t -= 1;
            y[t] += 1;
            if y[t] < mac.y_size() {
                break;
            }
            y[t] = 0;
        }
    }
}
