//! Membership in the class of channels with a square-root cooperation gain,
//! and the mixture curve that realizes the gain.
//!
//! A pair `(p_ind, p_dep)` witnesses membership when `p_ind` is a product
//! input, `supp p_dep ⊆ supp p_ind`, and
//! `I_dep + D(p_dep(y) || p_ind(y)) > I_ind`. Along the mixture
//! `p_λ = (1 - λ) p_ind + λ p_dep` the dependence grows like `K1 λ²` while
//! the sum rate grows linearly in `λ`, giving a gain of order `sqrt(δ)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sigma::{sigma1, SolverConfig};
use super::BoundsError;
use crate::info::{self, JointPmf, Pmf};
use crate::mac::DiscreteMac;
use crate::seed;

/// Largest `max |p - p1 p2|` accepted as a product distribution.
pub const PRODUCT_TOL: f64 = 1e-9;
/// Slack allowed when confirming `I_ind >= sigma_1(0)`.
pub const OPTIMALITY_TOL: f64 = 1e-6;
/// Default `ε̃` added to `K1` in the inversion of `δ(λ)`.
pub const DEFAULT_EPS_TILDE: f64 = 0.1;

const MONOTONE_GRID: usize = 1000;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CstarReport {
    pub i_ind: f64,
    pub i_dep: f64,
    pub kl_outputs: f64,
    pub support_ok: bool,
    pub margin: f64,
    pub member: bool,
    /// `Some(I_ind >= sigma_1(0) - tol)` when optimality was checked.
    pub ind_optimal: Option<bool>,
    pub sigma1_at_zero: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtLawPoint {
    pub delta: f64,
    pub lambda_star: f64,
    /// `I_{λ*}(X1, X2; Y) - I_0(X1, X2; Y)`.
    pub gain: f64,
    /// `I_{λ*}(X1; X2)`, never above `delta`.
    pub dependence: f64,
    /// `λ* sqrt((K1 + ε̃) / δ)`.
    pub lambda_ratio: f64,
    /// `gain / (K sqrt(δ))`.
    pub gain_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtLawReport {
    pub k1: f64,
    pub k: f64,
    pub eps_tilde: f64,
    pub margin: f64,
    pub points: Vec<SqrtLawPoint>,
}

pub fn is_product(p: &JointPmf) -> bool {
    p.product_defect() <= PRODUCT_TOL
}

fn check_shapes(mac: &DiscreteMac, p: &JointPmf) -> Result<(), BoundsError> {
    if p.rows() != mac.x1_size() || p.cols() != mac.x2_size() {
        return Err(info::InfoError::AlphabetMismatch { left: p.rows() * p.cols(), right: mac.input_size() }.into());
    }
    Ok(())
}

/// Evaluates the membership inequality for a candidate witness pair.
pub fn check_cstar(
    mac: &DiscreteMac,
    p_ind: &JointPmf,
    p_dep: &JointPmf,
    verify_ind_optimal: Option<&SolverConfig>,
) -> Result<CstarReport, BoundsError> {
    check_shapes(mac, p_ind)?;
    check_shapes(mac, p_dep)?;
    if !is_product(p_ind) {
        return Err(BoundsError::NotProduct(p_ind.product_defect()));
    }
    let i_ind = mac.information(p_ind)?;
    let i_dep = mac.information(p_dep)?;
    let support_ok = p_dep.as_slice().iter().zip(p_ind.as_slice()).all(|(&d, &i)| d == 0.0 || i > 0.0);
    let kl_outputs = info::kl_divergence(&mac.output_distribution(p_dep)?, &mac.output_distribution(p_ind)?)?;
    let margin = i_dep + kl_outputs - i_ind;
    let (ind_optimal, sigma1_at_zero) = match verify_ind_optimal {
        Some(cfg) => {
            let s0 = sigma1(mac, 0.0, cfg)?.value;
            (Some(i_ind >= s0 - OPTIMALITY_TOL), Some(s0))
        }
        None => (None, None),
    };
    Ok(CstarReport {
        i_ind,
        i_dep,
        kl_outputs,
        support_ok,
        margin,
        member: support_ok && margin > 0.0,
        ind_optimal,
        sigma1_at_zero,
    })
}

/// `K1`, the curvature of `I_λ(X1; X2)` at `λ = 0`.
pub fn k1_of(p_ind: &JointPmf, p_dep: &JointPmf) -> Result<f64, BoundsError> {
    let joint = info::chi2_divergence(&p_dep.flatten(), &p_ind.flatten())?;
    let m1 = info::chi2_divergence(&p_dep.marginal_a(), &p_ind.marginal_a())?;
    let m2 = info::chi2_divergence(&p_dep.marginal_b(), &p_ind.marginal_b())?;
    Ok((joint - m1 - m2) / (2.0 * std::f64::consts::LN_2))
}

struct Mixture<'a> {
    p_ind: &'a JointPmf,
    p_dep: &'a JointPmf,
    eps_tilde: f64,
}

impl Mixture<'_> {
    fn at(&self, lambda: f64) -> Vec<f64> {
        self.p_ind.as_slice().iter().zip(self.p_dep.as_slice()).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect()
    }

    fn dependence(&self, lambda: f64) -> f64 {
        info::mutual_information_of(&self.at(lambda), self.p_ind.rows(), self.p_ind.cols())
    }

    fn delta(&self, lambda: f64) -> f64 {
        self.dependence(lambda) + self.eps_tilde * lambda * lambda
    }

    fn check_monotone(&self) -> Result<(), BoundsError> {
        let mut prev = self.delta(0.0);
        for i in 1..=MONOTONE_GRID {
            let lambda = i as f64 / MONOTONE_GRID as f64;
            let cur = self.delta(lambda);
            if !(cur > prev) {
                return Err(BoundsError::NonMonotone { lambda });
            }
            prev = cur;
        }
        Ok(())
    }

    /// Largest bracket endpoint with `δ(λ) <= delta`.
    fn invert(&self, delta: f64) -> Result<f64, BoundsError> {
        let max = self.delta(1.0);
        if delta > max {
            return Err(BoundsError::InversionFailed { delta, max });
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.delta(mid) <= delta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// Tabulates `λ*(δ)` and the sum-rate gain along the mixture curve.
pub fn sqrt_law_curve(
    mac: &DiscreteMac,
    p_ind: &JointPmf,
    p_dep: &JointPmf,
    eps_tilde: f64,
    deltas: &[f64],
) -> Result<SqrtLawReport, BoundsError> {
    if !(eps_tilde > 0.0) || !eps_tilde.is_finite() {
        return Err(BoundsError::InvalidEpsilon(eps_tilde));
    }
    if let Some(&d) = deltas.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(BoundsError::InvalidDelta(d));
    }
    let report = check_cstar(mac, p_ind, p_dep, None)?;
    if !report.member {
        return Err(BoundsError::NotInCstar { margin: report.margin, support_ok: report.support_ok });
    }
    let k1 = k1_of(p_ind, p_dep)?;
    let k = report.margin / (k1 + eps_tilde).sqrt();
    let mix = Mixture { p_ind, p_dep, eps_tilde };
    mix.check_monotone()?;
    let i0 = mac.information_of(p_ind.as_slice());
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let points = sorted
        .into_iter()
        .map(|delta| {
            let lambda_star = mix.invert(delta)?;
            let gain = mac.information_of(&mix.at(lambda_star)) - i0;
            Ok(SqrtLawPoint {
                delta,
                lambda_star,
                gain,
                dependence: mix.dependence(lambda_star),
                lambda_ratio: lambda_star * ((k1 + eps_tilde) / delta).sqrt(),
                gain_ratio: gain / (k * delta.sqrt()),
            })
        })
        .collect::<Result<Vec<_>, BoundsError>>()?;
    Ok(SqrtLawReport { k1, k, eps_tilde, margin: report.margin, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CstarWitness {
    pub mac: DiscreteMac,
    pub p_ind: JointPmf,
    pub p_dep: JointPmf,
    pub report: CstarReport,
    /// Index of the random channel that succeeded.
    pub attempt: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub tries: usize,
    pub min_margin: f64,
    pub x1_size: usize,
    pub x2_size: usize,
    pub y_size: usize,
    pub eps_tilde: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0xC5_7A12,
            tries: 500,
            min_margin: 0.05,
            x1_size: 3,
            x2_size: 3,
            y_size: 3,
            eps_tilde: DEFAULT_EPS_TILDE,
        }
    }
}

/// Rows drawn from a sparse Dirichlet so that outputs are informative.
fn random_mac<R: Rng>(cfg: &SearchConfig, rng: &mut R) -> Result<DiscreteMac, BoundsError> {
    let table = (0..cfg.x1_size)
        .map(|_| {
            (0..cfg.x2_size)
                .map(|_| {
                    let raw: Vec<f64> = (0..cfg.y_size).map(|_| (1.0 - rng.gen::<f64>()).powi(4)).collect();
                    let total: f64 = raw.iter().sum();
                    raw.into_iter().map(|v| v / total).collect()
                })
                .collect()
        })
        .collect::<Vec<Vec<Vec<f64>>>>();
    Ok(crate::mac::validate_mac(&table)?)
}

/// Best product input, with masses below `1e-6` removed.
fn product_optimum(mac: &DiscreteMac, solver: &SolverConfig) -> Result<JointPmf, BoundsError> {
    let point = sigma1(mac, 0.0, solver)?;
    let joint = &point.argmax.conditionals()[0];
    let clean = |p: Pmf| -> Result<Pmf, BoundsError> {
        let kept: Vec<f64> = p.as_slice().iter().map(|&v| if v < 1e-6 { 0.0 } else { v }).collect();
        let total: f64 = kept.iter().sum();
        Ok(Pmf::new(kept.into_iter().map(|v| v / total).collect())?)
    };
    Ok(JointPmf::product(&clean(joint.marginal_a())?, &clean(joint.marginal_b())?))
}

/// Two-point dependent inputs `½ δ(i, j) + ½ δ(i', j')` with `i != i'`,
/// `j != j'`, in a fixed order.
fn two_point_candidates(rows: usize, cols: usize) -> Vec<JointPmf> {
    let mut out = Vec::new();
    for a in 0..rows * cols {
        for b in a + 1..rows * cols {
            let (i, j, i2, j2) = (a / cols, a % cols, b / cols, b % cols);
            if i != i2 && j != j2 {
                let mut p = vec![0.0; rows * cols];
                p[a] = 0.5;
                p[b] = 0.5;
                out.push(JointPmf::new(rows, cols, p).expect("two-point mass is a pmf"));
            }
        }
    }
    out
}

/// Deterministic randomized search for a channel with a strict membership
/// margin whose mixture curve is invertible.
pub fn search_cstar(cfg: &SearchConfig) -> Result<CstarWitness, BoundsError> {
    let solver = SolverConfig { restarts: 8, u_size: 1, seed: cfg.seed, ..SolverConfig::default() };
    let candidates = two_point_candidates(cfg.x1_size, cfg.x2_size);
    for attempt in 0..cfg.tries {
        let mut rng = seed::stream(cfg.seed, &[attempt as u64]);
        let mac = random_mac(cfg, &mut rng)?;
        let p_ind = product_optimum(&mac, &solver)?;
        let mut best: Option<(JointPmf, CstarReport)> = None;
        for p_dep in &candidates {
            let report = check_cstar(&mac, &p_ind, p_dep, None)?;
            if report.member
                && report.margin > cfg.min_margin
                && best.as_ref().map_or(true, |(_, b)| report.margin > b.margin)
            {
                best = Some((p_dep.clone(), report));
            }
        }
        if let Some((p_dep, report)) = best {
            let mix = Mixture { p_ind: &p_ind, p_dep: &p_dep, eps_tilde: cfg.eps_tilde };
            if mix.check_monotone().is_ok() {
                return Ok(CstarWitness { mac, p_ind, p_dep, report, attempt });
            }
        }
    }
    Err(BoundsError::SearchFailed { tries: cfg.tries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::dueck::dueck_mac;

    fn uniform_product(rows: usize, cols: usize) -> JointPmf {
        JointPmf::product(&Pmf::uniform(rows), &Pmf::uniform(cols))
    }

    #[test]
    fn equal_inputs_are_not_members() {
        let mac = dueck_mac();
        let p = uniform_product(4, 2);
        let r = check_cstar(&mac, &p, &p, None).unwrap();
        assert!(r.margin.abs() < 1e-12);
        assert!(!r.member);
    }

    #[test]
    fn support_violation_detected() {
        let mac = DiscreteMac::from_map(2, 2, 4, |a, b| 2 * a + b).unwrap();
        let p_ind = JointPmf::product(&Pmf::point_mass(2, 0), &Pmf::uniform(2));
        let p_dep = JointPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = check_cstar(&mac, &p_ind, &p_dep, None).unwrap();
        assert!(!r.support_ok && !r.member);
    }

    #[test]
    fn dependent_independent_input_is_rejected() {
        let mac = dueck_mac();
        let mut probs = vec![0.0; 8];
        probs[0] = 0.5;
        probs[7] = 0.5;
        let dep = JointPmf::new(4, 2, probs).unwrap();
        assert!(matches!(check_cstar(&mac, &dep, &dep, None), Err(BoundsError::NotProduct(_))));
    }

    #[test]
    fn k1_matches_curvature() {
        let p_ind = uniform_product(2, 2);
        let p_dep = JointPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let k1 = k1_of(&p_ind, &p_dep).unwrap();
        // chi2 of the perfectly correlated pair against uniform is 1, marginals match
        assert!((k1 - 1.0 / (2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        let mix = Mixture { p_ind: &p_ind, p_dep: &p_dep, eps_tilde: 0.1 };
        let lambda = 1e-3;
        let ratio = mix.dependence(lambda) / (k1 * lambda * lambda);
        assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn inversion_respects_constraint() {
        let p_ind = uniform_product(2, 2);
        let p_dep = JointPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let mix = Mixture { p_ind: &p_ind, p_dep: &p_dep, eps_tilde: 0.1 };
        mix.check_monotone().unwrap();
        for d in [1e-6, 1e-3, 0.5] {
            let l = mix.invert(d).unwrap();
            assert!(mix.delta(l) <= d && mix.delta(l + 1e-12) > d - 1e-12);
        }
        assert!(matches!(mix.invert(10.0), Err(BoundsError::InversionFailed { .. })));
    }
}
