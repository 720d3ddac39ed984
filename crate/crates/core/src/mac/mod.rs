//! Discrete memoryless multiple access channels.
//!
//! A [`DiscreteMac`] stores `p(y | x1, x2)` as a dense tensor indexed
//! `[x1][x2][y]`. Channels whose rows are all point masses also carry the
//! deterministic map `y = W(x1, x2)`, which unlocks exact evaluation and
//! preimage enumeration at any blocklength.

pub mod code;
pub mod dueck;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{self, JointPmf, Pmf};

/// Row-sum tolerance of the validator.
pub const ROW_TOL: f64 = 1e-9;
/// Default cap on the size of an enumerated preimage set.
pub const PREIMAGE_CAP: usize = 1 << 24;
/// Default cap on `|Y|^n` for exact evaluation over a stochastic channel.
pub const EXACT_STATE_CAP: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacError {
    #[error("transition tensor has an empty dimension")]
    EmptyDimension,
    #[error("transition tensor is ragged at x1={x1}")]
    Ragged { x1: usize },
    #[error("negative entry p[{x1}][{x2}][{y}] = {value}")]
    NegativeEntry { x1: usize, x2: usize, y: usize, value: f64 },
    #[error("row ({x1}, {x2}) sums to {sum}")]
    NonStochasticRow { x1: usize, x2: usize, sum: f64 },
    #[error("input words have lengths {x1} and {x2}")]
    LengthMismatch { x1: usize, x2: usize },
    #[error("symbol {symbol} out of range for an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("channel is not deterministic")]
    NotDeterministic,
    #[error("preimage has {size} elements, cap is {cap}")]
    PreimageCapExceeded { size: f64, cap: usize },
    #[error("state space of {size} exceeds cap {cap}")]
    StateSpaceCapExceeded { size: f64, cap: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("monte carlo evaluation needs at least one trial")]
    NoTrials,
    #[error("y factorization {y1_size}x{y2_size} does not match |Y| = {y_size}")]
    BadFactorization { y1_size: usize, y2_size: usize, y_size: usize },
    #[error(transparent)]
    Info(#[from] info::InfoError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMac {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    transition: Vec<f64>,
    deterministic: Option<Vec<usize>>,
    y_factors: Option<(usize, usize)>,
}

/// Checks a raw `[x1][x2][y]` tensor and builds the channel.
pub fn validate_mac(raw: &[Vec<Vec<f64>>]) -> Result<DiscreteMac, MacError> {
    let x1_size = raw.len();
    let x2_size = raw.first().map_or(0, Vec::len);
    let y_size = raw.first().and_then(|r| r.first()).map_or(0, Vec::len);
    if x1_size == 0 || x2_size == 0 || y_size == 0 {
        return Err(MacError::EmptyDimension);
    }
    let mut transition = Vec::with_capacity(x1_size * x2_size * y_size);
    for (x1, plane) in raw.iter().enumerate() {
        if plane.len() != x2_size || plane.iter().any(|row| row.len() != y_size) {
            return Err(MacError::Ragged { x1 });
        }
        for (x2, row) in plane.iter().enumerate() {
            for (y, &value) in row.iter().enumerate() {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(MacError::NegativeEntry { x1, x2, y, value });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(MacError::NonStochasticRow { x1, x2, sum });
            }
            transition.extend_from_slice(row);
        }
    }
    Ok(DiscreteMac::from_flat(x1_size, x2_size, y_size, transition))
}

impl DiscreteMac {
    fn from_flat(x1_size: usize, x2_size: usize, y_size: usize, transition: Vec<f64>) -> Self {
        let deterministic = transition
            .chunks(y_size)
            .map(|row| {
                let ones: Vec<usize> = (0..y_size).filter(|&y| row[y] == 1.0).collect();
                (ones.len() == 1 && row.iter().filter(|&&p| p != 0.0).count() == 1).then(|| ones[0])
            })
            .collect::<Option<Vec<usize>>>();
        DiscreteMac { x1_size, x2_size, y_size, transition, deterministic, y_factors: None }
    }

    /// Deterministic channel from a map `y = w(x1, x2)`.
    pub fn from_map(
        x1_size: usize,
        x2_size: usize,
        y_size: usize,
        w: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, MacError> {
        let raw: Vec<Vec<Vec<f64>>> = (0..x1_size)
            .map(|x1| {
                (0..x2_size)
                    .map(|x2| {
                        let mut row = vec![0.0; y_size];
                        let y = w(x1, x2);
                        if y >= y_size {
                            return Err(MacError::SymbolOutOfRange { symbol: y, size: y_size });
                        }
                        row[y] = 1.0;
                        Ok(row)
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        validate_mac(&raw)
    }

    /// Declares `Y = Y1 x Y2` with `y = y1 * y2_size + y2`.
    pub fn with_factorization(mut self, y1_size: usize, y2_size: usize) -> Result<Self, MacError> {
        if y1_size * y2_size != self.y_size {
            return Err(MacError::BadFactorization { y1_size, y2_size, y_size: self.y_size });
        }
        self.y_factors = Some((y1_size, y2_size));
        Ok(self)
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// Number of joint input symbols `|X1||X2|`.
    pub fn input_size(&self) -> usize {
        self.x1_size * self.x2_size
    }

    pub fn y_factors(&self) -> Option<(usize, usize)> {
        self.y_factors
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic.is_some()
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    /// `p(. | x1, x2)`.
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let start = (x1 * self.x2_size + x2) * self.y_size;
        &self.transition[start..start + self.y_size]
    }

    pub fn prob(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.row(x1, x2)[y]
    }

    /// `W(x1, x2)` for deterministic channels.
    pub fn map(&self, x1: usize, x2: usize) -> Option<usize> {
        self.deterministic.as_ref().map(|d| d[x1 * self.x2_size + x2])
    }

    pub fn to_table(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.x1_size).map(|x1| (0..self.x2_size).map(|x2| self.row(x1, x2).to_vec()).collect()).collect()
    }

    /// Output distribution induced by a joint input pmf given as a flat slice
    /// indexed `x1 * |X2| + x2`.
    pub fn output_distribution_of(&self, joint: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.y_size];
        for (row, &p) in self.transition.chunks(self.y_size).zip(joint) {
            if p > 0.0 {
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += p * w;
                }
            }
        }
        out
    }

    /// `I(X1, X2; Y)` for a flat joint input pmf.
    pub fn information_of(&self, joint: &[f64]) -> f64 {
        let py = self.output_distribution_of(joint);
        let mut acc = 0.0;
        for (row, &p) in self.transition.chunks(self.y_size).zip(joint) {
            if p > 0.0 {
                acc += p * info::kl_of(row, &py);
            }
        }
        acc.max(0.0)
    }

    pub fn output_distribution(&self, joint: &JointPmf) -> Result<Pmf, MacError> {
        self.check_joint(joint)?;
        Ok(Pmf::new(self.output_distribution_of(joint.as_slice()))?)
    }

    /// `I(X1, X2; Y)` under the joint input `joint`.
    pub fn information(&self, joint: &JointPmf) -> Result<f64, MacError> {
        self.check_joint(joint)?;
        Ok(self.information_of(joint.as_slice()))
    }

    fn check_joint(&self, joint: &JointPmf) -> Result<(), MacError> {
        if joint.rows() != self.x1_size || joint.cols() != self.x2_size {
            return Err(MacError::Info(info::InfoError::AlphabetMismatch {
                left: joint.rows() * joint.cols(),
                right: self.input_size(),
            }));
        }
        Ok(())
    }

    /// The blocklength-`n` extension as a single-letter channel on
    /// `X1^n x X2^n -> Y^n`. Word index `sum_t s_t |A|^t`, coordinate 0 least
    /// significant.
    pub fn extend(&self, n: usize) -> Result<DiscreteMac, MacError> {
        let a = checked_pow(self.x1_size, n)?;
        let b = checked_pow(self.x2_size, n)?;
        let c = checked_pow(self.y_size, n)?;
        let cap = 1usize << 26;
        if a * b * c > cap {
            return Err(MacError::StateSpaceCapExceeded { size: (a * b * c) as f64, cap });
        }
        let mut transition = vec![0.0; a * b * c];
        for w1 in 0..a {
            let s1 = digits(w1, self.x1_size, n);
            for w2 in 0..b {
                let s2 = digits(w2, self.x2_size, n);
                let base = (w1 * b + w2) * c;
                for yw in 0..c {
                    let mut p = 1.0;
                    let mut rest = yw;
                    for t in 0..n {
                        p *= self.prob(s1[t], s2[t], rest % self.y_size);
                        rest /= self.y_size;
                        if p == 0.0 {
                            break;
                        }
                    }
                    transition[base + yw] = p;
                }
            }
        }
        Ok(DiscreteMac::from_flat(a, b, c, transition))
    }
}

fn checked_pow(base: usize, n: usize) -> Result<usize, MacError> {
    u32::try_from(n)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or(MacError::StateSpaceCapExceeded { size: (base as f64).powi(n as i32), cap: usize::MAX })
}

/// Base-`base` digits of `value`, least significant first.
pub fn digits(mut value: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(value % base);
        value /= base;
    }
    out
}

fn check_words(mac: &DiscreteMac, x1: &[usize], x2: &[usize]) -> Result<(), MacError> {
    if x1.len() != x2.len() {
        return Err(MacError::LengthMismatch { x1: x1.len(), x2: x2.len() });
    }
    if let Some(&s) = x1.iter().find(|&&s| s >= mac.x1_size) {
        return Err(MacError::SymbolOutOfRange { symbol: s, size: mac.x1_size });
    }
    if let Some(&s) = x2.iter().find(|&&s| s >= mac.x2_size) {
        return Err(MacError::SymbolOutOfRange { symbol: s, size: mac.x2_size });
    }
    Ok(())
}

/// Sends two input words through the memoryless extension of `mac`.
///
/// Deterministic channels ignore `rng`; otherwise each coordinate is sampled
/// independently from its transition row.
pub fn apply_n<R: Rng + ?Sized>(
    mac: &DiscreteMac,
    x1: &[usize],
    x2: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>, MacError> {
    check_words(mac, x1, x2)?;
    Ok(x1
        .iter()
        .zip(x2)
        .map(|(&a, &b)| match mac.map(a, b) {
            Some(y) => y,
            None => sample_row(mac.row(a, b), rng),
        })
        .collect())
}

fn sample_row<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (y, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return y;
        }
    }
    // rounding left a sliver above the cumulative sum
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Every input pair `(x1^n, x2^n)` with `W^n(x1^n, x2^n) = y^n`.
pub fn enumerate_preimages(
    mac: &DiscreteMac,
    y: &[usize],
    cap: usize,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>, MacError> {
    let map = mac.deterministic.as_ref().ok_or(MacError::NotDeterministic)?;
    let mut choices: Vec<Vec<(usize, usize)>> = Vec::with_capacity(y.len());
    for &sym in y {
        if sym >= mac.y_size {
            return Err(MacError::SymbolOutOfRange { symbol: sym, size: mac.y_size });
        }
        let options: Vec<(usize, usize)> = map
            .iter()
            .enumerate()
            .filter(|(_, &out)| out == sym)
            .map(|(i, _)| (i / mac.x2_size, i % mac.x2_size))
            .collect();
        if options.is_empty() {
            return Ok(Vec::new());
        }
        choices.push(options);
    }
    let size: f64 = choices.iter().map(|c| c.len() as f64).product();
    if size > cap as f64 {
        return Err(MacError::PreimageCapExceeded { size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut odometer = vec![0usize; y.len()];
    loop {
        let (a, b) = odometer.iter().zip(&choices).map(|(&i, c)| c[i]).unzip();
        out.push((a, b));
        let mut t = y.len();
        loop {
            if t == 0 {
                return Ok(out);
            }
            t -= 1;
            odometer[t] += 1;
            if odometer[t] < choices[t].len() {
                break;
            }
            odometer[t] = 0;
        }
    }
}

/// Optional product structure of the output alphabet in a MAC file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YFactorized {
    pub y1_size: usize,
    pub y2_size: usize,
}

/// On-disk form of a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacFile {
    pub x1_size: usize,
    pub x2_size: usize,
    pub y_size: usize,
    pub transition: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_factorized: Option<YFactorized>,
}

impl MacFile {
    pub fn into_mac(self) -> Result<DiscreteMac, MacError> {
        let mac = validate_mac(&self.transition)?;
        if (mac.x1_size, mac.x2_size, mac.y_size) != (self.x1_size, self.x2_size, self.y_size) {
            return Err(MacError::InvalidCode(format!(
                "declared sizes {}x{}x{} disagree with the tensor {}x{}x{}",
                self.x1_size, self.x2_size, self.y_size, mac.x1_size, mac.x2_size, mac.y_size
            )));
        }
        match self.y_factorized {
            Some(f) => mac.with_factorization(f.y1_size, f.y2_size),
            None => Ok(mac),
        }
    }
}

impl From<&DiscreteMac> for MacFile {
    fn from(mac: &DiscreteMac) -> Self {
        MacFile {
            x1_size: mac.x1_size,
            x2_size: mac.x2_size,
            y_size: mac.y_size,
            transition: mac.to_table(),
            y_factorized: mac.y_factors.map(|(y1_size, y2_size)| YFactorized { y1_size, y2_size }),
        }
    }
}
