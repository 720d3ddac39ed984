use serde::{Deserialize, Serialize};

use super::SchemeError;

/// Rounding slack when a real product should land on an integer.
const ROUND_TOL: f64 = 1e-9;

/// Derived quantities of the two-phase scheme. Message counts are kept as
/// base-2 exponents since `M1` reaches `2^40` at desk-scale parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub n1: usize,
    pub n2: usize,
    /// List cap `2 ceil(3 / delta)`.
    pub ell: usize,
    /// CF output bits: one flip bit plus `ceil(log2 ell)` index bits.
    pub k: usize,
    pub log2_m1: u32,
    pub log2_m2: u32,
}

impl SchemeParams {
    pub fn m1(&self) -> u64 {
        1u64 << self.log2_m1
    }

    pub fn m2(&self) -> u64 {
        1u64 << self.log2_m2
    }

    /// `log2(M1 M2)`, exact.
    pub fn log2_pairs(&self) -> u32 {
        self.log2_m1 + self.log2_m2
    }

    pub fn r1(&self) -> f64 {
        self.log2_m1 as f64 / self.n as f64
    }

    pub fn r2(&self) -> f64 {
        self.log2_m2 as f64 / self.n as f64
    }

    pub fn rate_sum(&self) -> f64 {
        self.log2_pairs() as f64 / self.n as f64
    }

    /// Bits used for the list index.
    pub fn index_bits(&self) -> usize {
        self.k - 1
    }

    /// Per-message hit threshold `ceil(3 / delta)`.
    pub fn hit_threshold(&self) -> usize {
        self.ell / 2
    }

    /// Builds the parameters from explicit phase lengths.
    pub fn from_phase_lengths(n1: usize, n2: usize, delta: f64) -> Result<Self, SchemeError> {
        if !(delta > 0.0 && delta < 1.5) {
            return Err(SchemeError::InvalidParams(format!("delta must lie in (0, 1.5), got {delta}")));
        }
        if n1 == 0 || n2 == 0 {
            return Err(SchemeError::InvalidParams(format!("both phases must be nonempty, got n1={n1}, n2={n2}")));
        }
        let n = n1 + n2;
        let half_ell = (3.0 / delta - ROUND_TOL).ceil() as usize;
        let ell = 2 * half_ell;
        let index_bits = usize::BITS - (ell - 1).leading_zeros();
        let k = index_bits as usize + 1;
        if n2 < k - 1 {
            return Err(SchemeError::Phase2TooShort { n2, needed: k - 1 });
        }
        let exponent = ((1.5 - delta) * n1 as f64 + ROUND_TOL).floor();
        if exponent < 1.0 {
            return Err(SchemeError::DegenerateRates { log2_m1: exponent });
        }
        Ok(SchemeParams {
            n,
            epsilon: n2 as f64 / n as f64,
            delta,
            n1,
            n2,
            ell,
            k,
            log2_m1: exponent as u32,
            log2_m2: n1 as u32,
        })
    }
}

/// `n2 = ceil(epsilon n)`, `n1 = n - n2`, and everything derived from them.
pub fn derive_params(n: usize, epsilon: f64, delta: f64) -> Result<SchemeParams, SchemeError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SchemeError::InvalidParams(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if n < 4 {
        return Err(SchemeError::InvalidParams(format!("blocklength must be at least 4, got {n}")));
    }
    let n2 = (epsilon * n as f64 - ROUND_TOL).ceil() as usize;
    if n2 >= n {
        return Err(SchemeError::InvalidParams(format!("phase 2 of length {n2} leaves no room for phase 1")));
    }
    let mut p = SchemeParams::from_phase_lengths(n - n2, n2, delta)?;
    p.epsilon = epsilon;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configurations() {
        let p = derive_params(40, 0.2, 0.25).unwrap();
        assert_eq!((p.n1, p.n2, p.ell, p.k, p.log2_m1, p.log2_m2), (32, 8, 24, 6, 40, 32));
        let p = derive_params(16, 0.25, 0.75).unwrap();
        assert_eq!((p.n1, p.n2, p.ell, p.k, p.m1(), p.m2()), (12, 4, 8, 4, 512, 4096));
        assert!(matches!(derive_params(10, 0.2, 0.75), Err(SchemeError::Phase2TooShort { n2: 2, needed: 3 })));
    }

    #[test]
    fn k_formula_on_grid() {
        for i in 1..=50 {
            let delta = 1.5 * i as f64 / 51.0;
            let ell = 2.0 * (3.0 / delta - ROUND_TOL).ceil();
            let want = ell.log2().ceil() as usize + 1;
            let p = SchemeParams::from_phase_lengths(40, 16, delta).unwrap();
            assert_eq!(p.k, want, "delta {delta}");
            assert!(p.ell <= 1 << (p.k - 1));
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(derive_params(3, 0.2, 0.25).is_err());
        assert!(derive_params(40, 0.0, 0.25).is_err());
        assert!(derive_params(40, 0.2, 1.5).is_err());
        assert!(matches!(SchemeParams::from_phase_lengths(1, 8, 1.4), Err(SchemeError::DegenerateRates { .. })));
    }

    #[test]
    fn rate_accounting() {
        for n in [40, 80, 160, 320, 640] {
            let p = derive_params(n, 0.2, 0.25).unwrap();
            let asymptotic = (2.5 - 0.25) * (1.0 - 0.2);
            assert!((p.rate_sum() - asymptotic).abs() <= 2.0 / n as f64, "n {n}");
        }
    }
}
