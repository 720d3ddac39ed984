//! Dependence-constrained sum-rate maximization.
//!
//! `sigma_1(delta)` is the largest `I(X1, X2; Y | U)` over `p(u, x1, x2)` with
//! `I(X1; X2 | U) <= delta`. Two values of `U` suffice, so the search runs
//! over `p(u)` on two points and one joint `p(x1, x2 | u)` per point.
//!
//! The objective is not concave in these parameters. Each restart runs
//! exponentiated-gradient ascent on an exterior quadratic penalty with an
//! increasing weight, maps the result into the feasible set by mixing every
//! conditional toward the product of its marginals (this keeps the marginals
//! and lowers `I(X1; X2 | U)` monotonically), and then polishes with
//! projected ascent. The reported value is always evaluated at a feasible
//! point, so it is a certified lower bound on `sigma_1(delta)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::info::{self, ConditionedJoint, JointPmf, Pmf};
use crate::mac::DiscreteMac;
use crate::seed;

/// Root seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED_CF0A;
/// Default cap on `(|X1||X2|)^n` for the multi-letter problem.
pub const SIGMA_N_CAP: usize = 256;

const FLOOR: f64 = 1e-16;
const PENALTY_SCHEDULE: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Number of values of the time-sharing variable.
    pub u_size: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { restarts: 64, max_iters: 10_000, tol: 1e-9, seed: DEFAULT_SEED, u_size: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma1Point {
    pub delta: f64,
    /// `I(X1, X2; Y | U)` at `argmax`.
    pub value: f64,
    pub argmax: ConditionedJoint,
    /// `delta - I(X1; X2 | U)` at `argmax`.
    pub feasibility_slack: f64,
    pub restarts: usize,
    /// Restart that produced `argmax`.
    pub best_restart: usize,
}

/// `sigma_n(delta)` together with the single-letter solve on the extension.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaNPoint {
    pub n: usize,
    pub delta: f64,
    /// Per-letter value `(1/n) I(X1^n, X2^n; Y^n | U)`.
    pub value: f64,
    pub extended: Sigma1Point,
}

/// Flat working state: `w[u]` and `q[u][x1 * |X2| + x2]`.
#[derive(Debug, Clone)]
struct State {
    w: Vec<f64>,
    q: Vec<Vec<f64>>,
}

struct Problem<'a> {
    mac: &'a DiscreteMac,
    delta: f64,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    objective: f64,
    dependence: f64,
}

impl Problem<'_> {
    fn eval(&self, s: &State) -> Eval {
        let mut objective = 0.0;
        let mut dependence = 0.0;
        for (w, q) in s.w.iter().zip(&s.q) {
            if *w > 0.0 {
                objective += w * self.mac.information_of(q);
                dependence += w * info::mutual_information_of(q, self.rows, self.cols);
            }
        }
        Eval { objective, dependence }
    }

    fn penalized(&self, e: Eval, mu: f64) -> f64 {
        let v = (e.dependence - self.delta).max(0.0);
        e.objective - 0.5 * mu * v * v
    }

    /// One exponentiated-gradient step on the penalized objective.
    fn step(&self, s: &State, e: Eval, mu: f64, eta: f64) -> State {
        let v = (e.dependence - self.delta).max(0.0);
        let y = self.mac.y_size();
        let mut next_q = Vec::with_capacity(s.q.len());
        let mut wgrad = Vec::with_capacity(s.q.len());
        for q in &s.q {
            let py = self.mac.output_distribution_of(q);
            let (m1, m2) = marginals(q, self.rows, self.cols);
            let mut grad = vec![0.0; q.len()];
            let mut i_u = 0.0;
            let mut c_u = 0.0;
            for x in 0..q.len() {
                let row = &self.mac.transition()[x * y..(x + 1) * y];
                let d = info::kl_of(row, &py);
                let ind = m1[x / self.cols] * m2[x % self.cols];
                let c = if q[x] > 0.0 && ind > 0.0 { (q[x] / ind).log2() } else { 0.0 };
                i_u += q[x] * d;
                c_u += q[x] * c;
                grad[x] = d - mu * v * c;
            }
            wgrad.push(i_u - mu * v * c_u);
            next_q.push(exp_update(q, &grad, eta));
        }
        State { w: exp_update(&s.w, &wgrad, eta), q: next_q }
    }

    /// Smallest common mixing weight toward the conditional products that
    /// makes the state feasible.
    fn project(&self, s: &State) -> State {
        let products: Vec<Vec<f64>> = s.q.iter().map(|q| product_of_marginals(q, self.rows, self.cols)).collect();
        let mix = |t: f64| State {
            w: s.w.clone(),
            q: s.q
                .iter()
                .zip(&products)
                .map(|(q, p)| q.iter().zip(p).map(|(a, b)| (1.0 - t) * a + t * b).collect())
                .collect(),
        };
        if self.eval(s).dependence <= self.delta {
            return s.clone();
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.eval(&mix(mid)).dependence <= self.delta {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi >= 1.0 {
            return State { w: s.w.clone(), q: products };
        }
        mix(hi)
    }
}

fn marginals(q: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m1 = vec![0.0; rows];
    let mut m2 = vec![0.0; cols];
    for a in 0..rows {
        for b in 0..cols {
            m1[a] += q[a * cols + b];
            m2[b] += q[a * cols + b];
        }
    }
    (m1, m2)
}

fn product_of_marginals(q: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let (m1, m2) = marginals(q, rows, cols);
    m1.iter().flat_map(|&a| m2.iter().map(move |&b| a * b)).collect()
}

fn exp_update(p: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    let top = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = p.iter().zip(grad).map(|(&pi, &g)| pi * (eta * (g - top)).exp()).collect();
    normalize_with_floor(&mut out);
    out
}

fn normalize_with_floor(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x = (*x / total).max(FLOOR);
    }
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= total;
    }
}

fn random_simplex<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    // Dirichlet(1, .., 1) via normalized exponentials
    let mut v: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    normalize_with_floor(&mut v);
    v
}

fn initial_state(restart: usize, cfg: &SolverConfig, len: usize) -> State {
    if restart == 0 {
        return State {
            w: vec![1.0 / cfg.u_size as f64; cfg.u_size],
            q: vec![vec![1.0 / len as f64; len]; cfg.u_size],
        };
    }
    let mut rng = seed::stream(cfg.seed, &[restart as u64]);
    let w = random_simplex(cfg.u_size, &mut rng);
    let q = (0..cfg.u_size).map(|_| random_simplex(len, &mut rng)).collect();
    State { w, q }
}

/// Runs `budget` ascent iterations on `score(step(state))` with adaptive step.
fn ascend(
    mut s: State,
    budget: usize,
    tol: f64,
    score: impl Fn(&State) -> (f64, Eval),
    propose: impl Fn(&State, Eval, f64) -> State,
) -> Result<State, BoundsError> {
    let (mut best, mut e) = score(&s);
    let mut eta = 1.0;
    let mut quiet = 0;
    for _ in 0..budget {
        let mut accepted = false;
        for _ in 0..40 {
            let cand = propose(&s, e, eta);
            let (val, ce) = score(&cand);
            if !val.is_finite() {
                return Err(BoundsError::SolverDiverged);
            }
            if val >= best {
                let gain = val - best;
                s = cand;
                e = ce;
                best = val;
                eta = (eta * 1.5).min(1e3);
                accepted = true;
                quiet = if gain < tol * best.abs().max(1.0) { quiet + 1 } else { 0 };
                break;
            }
            eta *= 0.5;
        }
        if !accepted || quiet >= 5 {
            break;
        }
    }
    Ok(s)
}

fn solve_restart(problem: &Problem, cfg: &SolverConfig, restart: usize) -> Result<(f64, State), BoundsError> {
    let len = problem.rows * problem.cols;
    let mut s = initial_state(restart, cfg, len);
    let stage_budget = (cfg.max_iters / (PENALTY_SCHEDULE.len() + 1)).max(1);
    for &mu in &PENALTY_SCHEDULE {
        s = ascend(
            s,
            stage_budget,
            cfg.tol,
            |st| {
                let e = problem.eval(st);
                (problem.penalized(e, mu), e)
            },
            |st, e, eta| problem.step(st, e, mu, eta),
        )?;
    }
    let mu_last = PENALTY_SCHEDULE[PENALTY_SCHEDULE.len() - 1];
    s = problem.project(&s);
    s = ascend(
        s,
        stage_budget,
        cfg.tol,
        |st| {
            let e = problem.eval(st);
            (e.objective, e)
        },
        |st, e, eta| problem.project(&problem.step(st, e, mu_last, eta)),
    )?;
    let e = problem.eval(&s);
    if !e.objective.is_finite() {
        return Err(BoundsError::SolverDiverged);
    }
    Ok((e.objective, s))
}

fn to_conditioned(s: &State, rows: usize, cols: usize) -> Result<ConditionedJoint, BoundsError> {
    let weights = Pmf::new(s.w.clone())?;
    let conditionals = s.q.iter().map(|q| JointPmf::new(rows, cols, q.clone())).collect::<Result<Vec<_>, _>>()?;
    Ok(ConditionedJoint::new(weights, conditionals)?)
}

/// Certified-feasible lower estimate of `sigma_1(delta)`.
pub fn sigma1(mac: &DiscreteMac, delta: f64, cfg: &SolverConfig) -> Result<Sigma1Point, BoundsError> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(BoundsError::InvalidDelta(delta));
    }
    if cfg.restarts == 0 || cfg.u_size == 0 {
        return Err(BoundsError::InvalidConfig("restarts and u_size must be positive".into()));
    }
    let problem = Problem { mac, delta, rows: mac.x1_size(), cols: mac.x2_size() };
    let results: Vec<Result<(f64, State), BoundsError>> =
        (0..cfg.restarts).into_par_iter().map(|r| solve_restart(&problem, cfg, r)).collect();
    let mut best: Option<(usize, f64, State)> = None;
    for (r, res) in results.into_iter().enumerate() {
        let (val, s) = res?;
        if best.as_ref().map_or(true, |(_, b, _)| val > *b) {
            best = Some((r, val, s));
        }
    }
    let (best_restart, _, state) = best.expect("at least one restart");
    let argmax = to_conditioned(&state, problem.rows, problem.cols)?;
    Ok(certify(mac, delta, argmax, cfg.restarts, best_restart))
}

/// Recomputes objective and slack of a candidate from scratch.
pub fn certify(
    mac: &DiscreteMac,
    delta: f64,
    argmax: ConditionedJoint,
    restarts: usize,
    best_restart: usize,
) -> Sigma1Point {
    let value = conditional_sum_rate(mac, &argmax);
    let feasibility_slack = delta - info::conditional_mutual_information(&argmax);
    Sigma1Point { delta, value, argmax, feasibility_slack, restarts, best_restart }
}

/// `I(X1, X2; Y | U)` for a conditioned joint input.
pub fn conditional_sum_rate(mac: &DiscreteMac, cj: &ConditionedJoint) -> f64 {
    cj.weights()
        .as_slice()
        .iter()
        .zip(cj.conditionals())
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, c)| w * mac.information_of(c.as_slice()))
        .sum()
}

/// Certified-feasible lower estimate of `sigma_n(delta)` through the
/// single-letter solver on the blocklength-`n` extension.
pub fn sigma_n(
    mac: &DiscreteMac,
    n: usize,
    delta: f64,
    cfg: &SolverConfig,
    cap: usize,
) -> Result<SigmaNPoint, BoundsError> {
    if n == 0 {
        return Err(BoundsError::InvalidConfig("blocklength must be positive".into()));
    }
    let size = (mac.input_size() as f64).powi(n as i32);
    if size > cap as f64 {
        return Err(BoundsError::DimensionCapExceeded { size, cap });
    }
    let extended_mac = if n == 1 { mac.clone() } else { mac.extend(n)? };
    let extended = sigma1(&extended_mac, n as f64 * delta, cfg)?;
    Ok(SigmaNPoint { n, delta, value: extended.value / n as f64, extended })
}
