//! Finite-alphabet information measures.
//!
//! Everything is in bits. The conventions `0 log 0 = 0` and `0^2 / 0 = 0` are
//! used throughout; a divergence whose first argument puts mass outside the
//! support of the second is reported as `f64::INFINITY` rather than as an
//! error, so callers can branch on `is_finite()`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the total mass of a distribution.
pub const PMF_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(f64),
}

fn check_mass(probs: &[f64]) -> Result<(), InfoError> {
    if probs.is_empty() {
        return Err(InfoError::InvalidPmf("empty alphabet".into()));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(InfoError::InvalidPmf(format!("entry {i} = {p}")));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PMF_TOL {
        return Err(InfoError::InvalidPmf(format!("total mass {total}")));
    }
    Ok(())
}

/// A probability mass function on `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        check_mass(&probs)?;
        Ok(Pmf(probs))
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform pmf needs a nonempty alphabet");
        Pmf(vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut v = vec![0.0; len];
        v[at] = 1.0;
        Pmf(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Whether every symbol with positive mass under `self` has positive
    /// mass under `other`.
    pub fn support_within(&self, other: &Pmf) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&p, &q)| p <= 0.0 || q > 0.0)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = InfoError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.0
    }
}

/// A pmf on a product alphabet `A x B`, stored row-major (`a * cols + b`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self, InfoError> {
        if rows == 0 || cols == 0 {
            return Err(InfoError::InvalidPmf("empty alphabet".into()));
        }
        if probs.len() != rows * cols {
            return Err(InfoError::InvalidPmf(format!("{} entries for a {rows}x{cols} alphabet", probs.len())));
        }
        check_mass(&probs)?;
        Ok(JointPmf { rows, cols, probs })
    }

    /// Builds a joint pmf from a nested table indexed `[a][b]`.
    pub fn from_table(table: &[Vec<f64>]) -> Result<Self, InfoError> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if table.iter().any(|r| r.len() != cols) {
            return Err(InfoError::InvalidPmf("ragged table".into()));
        }
        JointPmf::new(rows, cols, table.concat())
    }

    pub fn product(a: &Pmf, b: &Pmf) -> Self {
        let probs = a.as_slice().iter().flat_map(|&pa| b.as_slice().iter().map(move |&pb| pa * pb)).collect();
        JointPmf { rows: a.len(), cols: b.len(), probs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.cols + b]
    }

    pub fn to_table(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_a(&self) -> Pmf {
        Pmf(row_sums(&self.probs, self.rows, self.cols))
    }

    pub fn marginal_b(&self) -> Pmf {
        Pmf(col_sums(&self.probs, self.rows, self.cols))
    }

    /// Flattened joint as a pmf on `rows * cols` symbols.
    pub fn flatten(&self) -> Pmf {
        Pmf(self.probs.clone())
    }

    /// Product of the two marginals.
    pub fn independent_part(&self) -> JointPmf {
        JointPmf::product(&self.marginal_a(), &self.marginal_b())
    }

    /// Largest entrywise deviation from the product of the marginals.
    pub fn product_defect(&self) -> f64 {
        let ind = self.independent_part();
        self.probs.iter().zip(&ind.probs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }

    /// Convex combination `(1 - t) self + t other`.
    pub fn mix(&self, other: &JointPmf, t: f64) -> Result<JointPmf, InfoError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(InfoError::AlphabetMismatch { left: self.probs.len(), right: other.probs.len() });
        }
        let probs = self.probs.iter().zip(&other.probs).map(|(p, q)| (1.0 - t) * p + t * q).collect();
        Ok(JointPmf { rows: self.rows, cols: self.cols, probs })
    }
}

/// `p(u)` together with one conditional joint `p(a, b | u)` per `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedJoint {
    weights: Pmf,
    conditionals: Vec<JointPmf>,
}

impl ConditionedJoint {
    pub fn new(weights: Pmf, conditionals: Vec<JointPmf>) -> Result<Self, InfoError> {
        if weights.len() != conditionals.len() {
            return Err(InfoError::AlphabetMismatch { left: weights.len(), right: conditionals.len() });
        }
        let shape = (conditionals[0].rows, conditionals[0].cols);
        if let Some(bad) = conditionals.iter().find(|c| (c.rows, c.cols) != shape) {
            return Err(InfoError::AlphabetMismatch { left: shape.0 * shape.1, right: bad.rows * bad.cols });
        }
        Ok(ConditionedJoint { weights, conditionals })
    }

    /// A degenerate time-sharing variable with a single value.
    pub fn single(joint: JointPmf) -> Self {
        ConditionedJoint { weights: Pmf::point_mass(1, 0), conditionals: vec![joint] }
    }

    pub fn u_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &Pmf {
        &self.weights
    }

    pub fn conditionals(&self) -> &[JointPmf] {
        &self.conditionals
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.conditionals[0].rows, self.conditionals[0].cols)
    }
}

fn row_sums(probs: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..rows).map(|a| probs[a * cols..(a + 1) * cols].iter().sum()).collect()
}

fn col_sums(probs: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for row in probs.chunks(cols).take(rows) {
        for (o, &p) in out.iter_mut().zip(row) {
            *o += p;
        }
    }
    out
}

/// Entropy of an arbitrary nonnegative vector, `-sum p log2 p`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `I(A; B)` of a row-major joint given as a slice.
pub fn mutual_information_of(probs: &[f64], rows: usize, cols: usize) -> f64 {
    let pa = row_sums(probs, rows, cols);
    let pb = col_sums(probs, rows, cols);
    let mut acc = 0.0;
    for a in 0..rows {
        for b in 0..cols {
            let p = probs[a * cols + b];
            if p > 0.0 {
                acc += p * (p / (pa[a] * pb[b])).log2();
            }
        }
    }
    acc.max(0.0)
}

/// `D(p || q)` of two slices of equal length.
pub fn kl_of(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            acc += pi * (pi / qi).log2();
        }
    }
    acc.max(0.0)
}

fn same_len(p: &Pmf, q: &Pmf) -> Result<(), InfoError> {
    if p.len() != q.len() {
        return Err(InfoError::AlphabetMismatch { left: p.len(), right: q.len() });
    }
    Ok(())
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.as_slice())
}

pub fn binary_entropy(p: f64) -> Result<f64, InfoError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(InfoError::OutOfRange(p));
    }
    Ok(entropy_of(&[p, 1.0 - p]))
}

pub fn mutual_information(joint: &JointPmf) -> f64 {
    mutual_information_of(&joint.probs, joint.rows, joint.cols)
}

/// `I(A; B | U) = sum_u p(u) I(A; B | U = u)`.
pub fn conditional_mutual_information(cj: &ConditionedJoint) -> f64 {
    cj.weights
        .as_slice()
        .iter()
        .zip(&cj.conditionals)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, c)| w * mutual_information(c))
        .sum()
}

pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64, InfoError> {
    same_len(p, q)?;
    Ok(kl_of(p.as_slice(), q.as_slice()))
}

pub fn chi2_divergence(p: &Pmf, q: &Pmf) -> Result<f64, InfoError> {
    same_len(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        if qi > 0.0 {
            acc += (pi - qi) * (pi - qi) / qi;
        } else if pi > 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(acc)
}

pub fn l1_distance(p: &Pmf, q: &Pmf) -> Result<f64, InfoError> {
    same_len(p, q)?;
    Ok(p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b).abs()).sum())
}
