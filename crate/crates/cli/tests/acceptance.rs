//! Exit criteria, run in order with one PASS/FAIL line each.
//!
//! Lines go straight to the process stderr so they show up even when the
//! test harness captures output.

use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use cfmac_cli::commands::cstar::outer_report;
use cfmac_cli::commands::sim::{simulate, SimReport};
use cfmac_cli::{Cli, Command};
use cfmac_core::bounds::cstar::{check_cstar, k1_of, sqrt_law_curve, DEFAULT_EPS_TILDE};
use cfmac_core::bounds::sigma::{sigma1, sigma_n, SolverConfig, SIGMA_N_CAP};
use cfmac_core::bounds::wringing::{wringing_extract, WRINGING_CAP};
use cfmac_core::bounds::{continuity_envelope, DistFile, DUECK_OUTER_PUBLISHED};
use cfmac_core::info::{ConditionedJoint, JointPmf, Pmf};
use cfmac_core::mac::dueck::{dueck_mac, split_y, w};
use cfmac_core::mac::{apply_n, enumerate_preimages, validate_mac, DiscreteMac, MacFile};
use cfmac_core::scheme::{claim1_check, claim2_stats, gen_codebook, SchemeParams};
use cfmac_core::seed;
use clap::Parser;
use rand::Rng;

const ROOT: u64 = 0xACCE_97;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn random_mac(rng: &mut impl Rng, x1: usize, x2: usize, y: usize) -> DiscreteMac {
    let table: Vec<Vec<Vec<f64>>> = (0..x1)
        .map(|_| {
            (0..x2)
                .map(|_| {
                    let raw: Vec<f64> = (0..y).map(|_| rng.gen::<f64>()).collect();
                    let s: f64 = raw.iter().sum();
                    raw.into_iter().map(|v| v / s).collect()
                })
                .collect()
        })
        .collect();
    validate_mac(&table).unwrap()
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `I(X1; X2)` of a row-major joint, in bits.
fn mi(p: &[f64], rows: usize, cols: usize) -> f64 {
    let a: Vec<f64> = (0..rows).map(|i| (0..cols).map(|j| p[i * cols + j]).sum()).collect();
    let b: Vec<f64> = (0..cols).map(|j| (0..rows).map(|i| p[i * cols + j]).sum()).collect();
    let mut total = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let v = p[i * cols + j];
            if v > 0.0 {
                total += v * (v / (a[i] * b[j])).log2();
            }
        }
    }
    total
}

fn sim_report(args: &[&str]) -> SimReport {
    let cli = Cli::try_parse_from(["cfmac", "dueck-sim"].iter().chain(args)).expect("valid flags");
    match cli.command {
        Command::DueckSim(a) => simulate(&a).expect("simulation runs"),
        _ => unreachable!(),
    }
}

fn c1_dueck_table() -> Verdict {
    // (x1 symbol, x2) -> y1 symbol, straight from the channel definition
    let expected = [
        ('a', 0, 'c'),
        ('b', 0, 'c'),
        ('A', 0, 'A'),
        ('B', 0, 'B'),
        ('a', 1, 'a'),
        ('b', 1, 'b'),
        ('A', 1, 'C'),
        ('B', 1, 'C'),
    ];
    let x1_codes = ['a', 'b', 'A', 'B'];
    let y1_codes = ['a', 'b', 'c', 'A', 'B', 'C'];
    let mac = dueck_mac();
    let mut bad = Vec::new();
    for (x1c, x2, y1c) in expected {
        let x1 = x1_codes.iter().position(|&c| c == x1c).unwrap();
        let (y1, y2) = w(x1, x2);
        let via_mac = mac.map(x1, x2).map(split_y);
        if y1_codes[y1] != y1c || y2 != x2 || via_mac != Some((y1, y2)) || !mac.is_deterministic() {
            bad.push(format!("({x1c},{x2})"));
        }
    }
    verdict(bad.is_empty(), format!("8 pairs checked, mismatches {bad:?}"))
}

fn c2_claim1() -> Verdict {
    let r = claim1_check(seed::derive_seed(ROOT, &[2]), 100_000, &[12, 33]);
    let counter: Vec<(usize, u64)> = r.vectors.iter().map(|v| (v.n1, v.counterexamples)).collect();
    let pass =
        r.passed && r.symbol_cases == 8 && r.symbol_failures == 0 && r.vectors.iter().all(|v| v.trials == 100_000);
    verdict(pass, format!("symbol failures {}/8, vector counterexamples {counter:?}", r.symbol_failures))
}

fn c3_preimages() -> Verdict {
    let mac = dueck_mac();
    let mut rng = seed::stream(ROOT, &[3]);
    let mut failures = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=16);
        let x1: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let x2: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let y = apply_n(&mac, &x1, &x2, &mut rng).unwrap();
        // y1 codes 2 and 5 are the erasure symbols
        let e = y.iter().filter(|&&s| matches!(s / 2, 2 | 5)).count();
        let pre = enumerate_preimages(&mac, &y, 1 << 16).unwrap();
        let sound = pre.iter().all(|(a, b)| apply_n(&mac, a, b, &mut rng).unwrap() == y);
        let has_sent = pre.iter().any(|(a, b)| *a == x1 && *b == x2);
        if pre.len() != 1 << e || !sound || !has_sent {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("10000 outputs, {failures} violations"))
}

fn c4_check(r: &SimReport) -> Verdict {
    let p = &r.params;
    let shape = p.n1 == 12 && p.m1 == 512 && p.m2 == 4096 && p.ell == 8 && p.k == 4;
    let pass = shape
        && r.pairs_tested == 512 * 4096
        && r.mismatches == 0
        && r.decode_errors == r.overflow_count
        && r.membership_failures == 0
        && r.goodness_failures == 0;
    verdict(
        pass,
        format!(
            "pairs {} decode_errors {} overflow {} mismatches {} membership_failures {} goodness_failures {} max_list {}",
            r.pairs_tested, r.decode_errors, r.overflow_count, r.mismatches, r.membership_failures, r.goodness_failures, r.max_list_size
        ),
    )
}

fn c5_check(r: &SimReport) -> Verdict {
    let p = &r.params;
    let rate = (p.log2_m1 + p.log2_m2) as f64 / p.n as f64;
    let derived_outer = 2.0 * h2(1.0 / 3.0) + 1.0 / 3.0;
    let sampling =
        r.pairs_tested == 100_000 && r.overflow_rate < 0.01 && r.decode_errors == r.overflow_count && r.mismatches == 0;
    let rate_ok = rate >= 2.20 && rate > DUECK_OUTER_PUBLISHED && rate > derived_outer;
    verdict(
        p.k == 6 && sampling && rate_ok,
        format!(
            "k {} n1 {} n2 {} overflow_rate {} decode_errors {} rate_sum {rate} (needs >= 2.20; (2.5 - delta)(1 - epsilon) = {})",
            p.k,
            p.n1,
            p.n2,
            r.overflow_rate,
            r.decode_errors,
            (2.5 - p.delta) * (1.0 - p.epsilon)
        ),
    )
}

fn c6_check(rs: &[SimReport]) -> Verdict {
    let rates: Vec<(usize, f64)> = rs.iter().map(|r| (r.params.n1, r.overflow_rate)).collect();
    let shape = rates.iter().map(|r| r.0).eq([12, 16, 24])
        && rs.iter().all(|r| r.pairs_tested == 10_000 && r.params.delta == 0.25);
    let monotone = rates.windows(2).all(|w| w[1].1 <= w[0].1);
    verdict(shape && monotone, format!("(n1, overflow_rate) {rates:?}"))
}

fn c7_check(c: &cfmac_core::scheme::Claim2Report) -> Verdict {
    let pass = c.samples == 10_000 && c.threshold == 12 && c.exceed_fraction < 0.01 && c.z_score.abs() <= 4.0;
    verdict(
        pass,
        format!(
            "exceed fraction {} max hits {} mean {} analytic {} z {}",
            c.exceed_fraction, c.max_hits, c.mean_hits, c.analytic_mean, c.z_score
        ),
    )
}

/// Serialized reports of criteria 4 to 7 and their verdicts.
fn scheme_runs() -> (Vec<String>, [Verdict; 4]) {
    let seed = "11";
    let r4 = sim_report(&["--n", "16", "--epsilon", "0.25", "--delta", "0.75", "--mode", "exhaustive", "--seed", seed]);
    let r5 = sim_report(&["--n", "40", "--epsilon", "0.2", "--delta", "0.25", "--samples", "100000", "--seed", seed]);
    let r6: Vec<SimReport> = [("20", "0.4"), ("24", "0.333333333333"), ("32", "0.25")]
        .iter()
        .map(|(n, eps)| {
            sim_report(&["--n", n, "--epsilon", eps, "--delta", "0.25", "--samples", "10000", "--seed", seed])
        })
        .collect();
    let p7 = SchemeParams::from_phase_lengths(24, 8, 0.25).unwrap();
    let cb7 = gen_codebook(&p7, 11).unwrap();
    let r7 = claim2_stats(&p7, &cb7, 12, 10_000).unwrap();
    let mut texts = vec![serde_json::to_string(&r4).unwrap(), serde_json::to_string(&r5).unwrap()];
    texts.extend(r6.iter().map(|r| serde_json::to_string(r).unwrap()));
    texts.push(serde_json::to_string(&r7).unwrap());
    (texts, [c4_check(&r4), c5_check(&r5), c6_check(&r6), c7_check(&r7)])
}

fn c8_outer() -> Verdict {
    let r = outer_report(1e-4).unwrap();
    let pass = (r.p_star - 1.0 / 3.0).abs() <= 1e-4
        && (r.value - 2.169925).abs() <= 1e-4
        && r.published_value == 2.1632
        && (r.discrepancy - (r.value - r.published_value)).abs() < 1e-15
        && !r.note.is_empty();
    verdict(
        pass,
        format!("p* {} value {} reference {} discrepancy {}", r.p_star, r.value, r.published_value, r.discrepancy),
    )
}

fn product_grid(mac: &DiscreteMac, step: f64) -> f64 {
    let cells = (1.0 / step).round() as usize;
    let mut best = 0.0f64;
    for i in 0..=cells {
        let a = i as f64 / cells as f64;
        for j in 0..=cells {
            let b = j as f64 / cells as f64;
            let joint = [(1.0 - a) * (1.0 - b), (1.0 - a) * b, a * (1.0 - b), a * b];
            best = best.max(mac.information_of(&joint));
        }
    }
    best
}

/// Joint-input capacity by multi-start exponentiated ascent on the simplex.
fn unconstrained_max(mac: &DiscreteMac, starts: usize, rng: &mut impl Rng) -> f64 {
    let nx = mac.input_size();
    let ny = mac.y_size();
    let t = mac.transition();
    let mut best = 0.0f64;
    for s in 0..starts {
        let mut p: Vec<f64> =
            if s == 0 { vec![1.0 / nx as f64; nx] } else { (0..nx).map(|_| rng.gen::<f64>() + 1e-3).collect() };
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        for _ in 0..20_000 {
            let q: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| p[x] * t[x * ny + y]).sum()).collect();
            let d: Vec<f64> = (0..nx)
                .map(|x| {
                    (0..ny)
                        .filter(|&y| t[x * ny + y] > 0.0)
                        .map(|y| t[x * ny + y] * (t[x * ny + y] / q[y]).log2())
                        .sum()
                })
                .collect();
            let z: f64 = p.iter().zip(&d).map(|(a, b)| a * b.exp2()).sum();
            p = p.iter().zip(&d).map(|(a, b)| a * b.exp2() / z).collect();
        }
        best = best.max(mac.information_of(&p));
    }
    best
}

fn c9_oracles() -> Verdict {
    let cfg = SolverConfig::default();
    let mut rng = seed::stream(ROOT, &[9]);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let mac = random_mac(&mut rng, 2, 2, 2);
        let s = sigma1(&mac, 0.0, &cfg).unwrap();
        worst = worst.max((s.value - product_grid(&mac, 1e-3)).abs());
    }
    let mac = dueck_mac();
    let oracle = unconstrained_max(&mac, 8, &mut rng);
    let large = sigma1(&mac, 1.0, &cfg).unwrap().value;
    let dueck_gap = (large - oracle).abs();
    verdict(
        worst < 2e-3 && dueck_gap < 2e-3,
        format!("worst zero-dependence gap {worst:e}; large-delta {large} vs unconstrained {oracle}"),
    )
}

fn c10_curve() -> Verdict {
    let cfg = SolverConfig::default();
    let mac = dueck_mac();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.05).collect();
    let curve: Vec<f64> = grid.iter().map(|&d| sigma1(&mac, d, &cfg).unwrap().value).collect();
    let monotone = curve.windows(2).all(|w| w[1] >= w[0] - 1e-3);

    let mut rng = seed::stream(ROOT, &[10]);
    let mut concave_worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (a, b): (f64, f64) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let mid = sigma1(&mac, 0.5 * (a + b), &cfg).unwrap().value;
        let ends = 0.5 * (sigma1(&mac, a, &cfg).unwrap().value + sigma1(&mac, b, &cfg).unwrap().value);
        concave_worst = concave_worst.max(ends - mid);
    }

    let mut modulus_worst = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let d = i.abs_diff(j);
            if d <= i.min(j) {
                modulus_worst = modulus_worst.max((curve[i] - curve[j]).abs() - (curve[d] - curve[0]));
            }
        }
    }

    let mut envelope_ok = true;
    for delta in [1e-3, 1e-2] {
        let s = sigma1(&mac, delta, &cfg).unwrap().value;
        let env = continuity_envelope(&mac, delta, curve[0]).unwrap();
        envelope_ok &= env >= s;
    }
    verdict(
        monotone && concave_worst <= 2e-3 && modulus_worst <= 2e-3 && envelope_ok,
        format!(
            "curve {:?}; midpoint defect {concave_worst:e}; modulus defect {modulus_worst:e}; envelope {}",
            curve.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>(),
            if envelope_ok { "dominates" } else { "violated" }
        ),
    )
}

fn c11_superadditive() -> Verdict {
    let cfg = SolverConfig::default();
    let mut rng = seed::stream(ROOT, &[11]);
    let mac = random_mac(&mut rng, 2, 2, 2);
    let mut pass = true;
    let mut detail = Vec::new();
    for delta in [0.0, 0.1] {
        let one = sigma1(&mac, delta, &cfg).unwrap().value;
        let two = sigma_n(&mac, 2, delta, &cfg, SIGMA_N_CAP).unwrap().value;
        pass &= two >= one - 1e-3;
        if delta == 0.0 {
            pass &= (two - one).abs() <= 2e-3;
        }
        detail.push(format!("delta {delta}: sigma1 {one:.6} sigma2 {two:.6}"));
    }
    verdict(pass, detail.join("; "))
}

fn bit(x: usize, t: usize) -> usize {
    (x >> t) & 1
}

/// `I(X1t; X2t | U, X^T)` by direct marginalization of an `8 x 8` block joint.
fn residual_oracle(cj: &ConditionedJoint, t: usize, ctx: &[usize]) -> f64 {
    let mut total = 0.0;
    for (wu, cond) in cj.weights().as_slice().iter().zip(cj.conditionals()) {
        let contexts = 1usize << (2 * ctx.len());
        let mut cells = vec![[0.0f64; 4]; contexts];
        for i in 0..8 {
            for j in 0..8 {
                let c = ctx.iter().fold(0, |acc, &s| acc * 4 + bit(i, s) * 2 + bit(j, s));
                cells[c][bit(i, t) * 2 + bit(j, t)] += cond.get(i, j);
            }
        }
        for cell in cells {
            let m: f64 = cell.iter().sum();
            if m > 0.0 {
                let norm: Vec<f64> = cell.iter().map(|v| v / m).collect();
                total += wu * m * mi(&norm, 2, 2);
            }
        }
    }
    total
}

fn random_block_joint(rng: &mut impl Rng) -> JointPmf {
    // sparse entries give strongly dependent coordinates
    let raw: Vec<f64> = (0..64).map(|_| if rng.gen_bool(0.5) { rng.gen::<f64>().powi(3) } else { 0.0 }).collect();
    let raw = if raw.iter().all(|&v| v == 0.0) { vec![1.0; 64] } else { raw };
    let z: f64 = raw.iter().sum();
    JointPmf::new(8, 8, raw.into_iter().map(|v| v / z).collect()).unwrap()
}

fn c12_wringing() -> Verdict {
    let mut rng = seed::stream(ROOT, &[12]);
    let eps = 0.1;
    let mut violations = 0;
    let mut nonempty = 0;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.05..0.95);
        let weights = Pmf::new(vec![a, 1.0 - a]).unwrap();
        let cj =
            ConditionedJoint::new(weights, vec![random_block_joint(&mut rng), random_block_joint(&mut rng)]).unwrap();
        let cmi: f64 =
            cj.weights().as_slice().iter().zip(cj.conditionals()).map(|(wu, c)| wu * mi(c.as_slice(), 8, 8)).sum();
        // feasible with a little room above the actual dependence
        let delta = cmi / 3.0 * rng.gen_range(1.0..1.5);
        let r = wringing_extract(&cj, 2, 2, eps, delta, WRINGING_CAP).unwrap();
        let limit = (3.0 * delta / eps).floor() as usize;
        let ctx: Vec<usize> = r.t_set.iter().map(|t| t - 1).collect();
        let residuals_ok = (0..3).filter(|t| !ctx.contains(t)).all(|t| {
            let oracle = residual_oracle(&cj, t, &ctx);
            r.residual.get(&(t + 1)).is_some_and(|&v| (v - oracle).abs() < 1e-9) && oracle <= eps + 1e-9
        });
        nonempty += usize::from(!r.t_set.is_empty());
        if r.t_set.len() > limit || !residuals_ok {
            violations += 1;
        }
    }
    let dist: DistFile =
        serde_json::from_str(&std::fs::read_to_string(fixture("wringing_correlated.json")).unwrap()).unwrap();
    let fixture_t = wringing_extract(&dist.into_joint().unwrap(), 2, 2, eps, 0.25, WRINGING_CAP).unwrap().t_set;
    verdict(
        violations == 0 && fixture_t == vec![1],
        format!("100 joints ({nonempty} with nonempty T), {violations} violations; fixture T = {fixture_t:?}"),
    )
}

fn chi2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(_, &b)| b > 0.0).map(|(a, b)| (a - b) * (a - b) / b).sum()
}

fn c13_sqrt_law() -> Verdict {
    let read = |name: &str| std::fs::read_to_string(fixture(name)).unwrap();
    let mac = serde_json::from_str::<MacFile>(&read("cstar_mac.json")).unwrap().into_mac().unwrap();
    let p_ind = serde_json::from_str::<DistFile>(&read("pind.json")).unwrap().into_single().unwrap();
    let p_dep = serde_json::from_str::<DistFile>(&read("pdep.json")).unwrap().into_single().unwrap();
    let (rows, cols) = (p_ind.rows(), p_ind.cols());
    let marg = |p: &JointPmf, by_row: bool| -> Vec<f64> {
        if by_row {
            (0..rows).map(|i| (0..cols).map(|j| p.get(i, j)).sum()).collect()
        } else {
            (0..cols).map(|j| (0..rows).map(|i| p.get(i, j)).sum()).collect()
        }
    };
    let (a0, b0) = (marg(&p_ind, true), marg(&p_ind, false));
    let prod: Vec<f64> = a0.iter().flat_map(|a| b0.iter().map(move |b| a * b)).collect();
    let k1_oracle = (chi2(p_dep.as_slice(), &prod) - chi2(&marg(&p_dep, true), &a0) - chi2(&marg(&p_dep, false), &b0))
        / (2.0 * std::f64::consts::LN_2);
    let k1 = k1_of(&p_ind, &p_dep).unwrap();
    let member = check_cstar(&mac, &p_ind, &p_dep, None).unwrap().member;
    let deltas = [1e-6, 3e-6, 1e-5, 3e-5, 1e-4];
    let r = sqrt_law_curve(&mac, &p_ind, &p_dep, DEFAULT_EPS_TILDE, &deltas).unwrap();
    let mut ratios_ok = true;
    for pt in &r.points {
        let lambda_ratio = pt.lambda_star * ((k1_oracle + DEFAULT_EPS_TILDE) / pt.delta).sqrt();
        let gain_ratio = pt.gain / pt.delta.sqrt() / r.k;
        ratios_ok &= (0.95..=1.05).contains(&lambda_ratio);
        ratios_ok &= (0.85..=1.15).contains(&gain_ratio);
        ratios_ok &= pt.dependence <= pt.delta;
    }
    let pass = member && k1 >= 0.0 && (k1 - k1_oracle).abs() <= 1e-9 && (r.k1 - k1).abs() <= 1e-12 && ratios_ok;
    verdict(
        pass,
        format!(
            "K1 {k1} (oracle {k1_oracle}), K {}; lambda ratios {:?}; gain ratios {:?}",
            r.k,
            r.points.iter().map(|p| p.lambda_ratio).collect::<Vec<_>>(),
            r.points.iter().map(|p| p.gain_ratio).collect::<Vec<_>>()
        ),
    )
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn acceptance() {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut record = |id: u32, name: &'static str, v: Verdict| {
        say(&format!("{} criterion {id:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail));
        results.push((id, name, v));
    };
    record(1, "dueck channel table", guarded(c1_dueck_table));
    record(2, "complement flip makes outputs good", guarded(c2_claim1));
    record(3, "preimage count law", guarded(c3_preimages));

    let single = catch_unwind(AssertUnwindSafe(|| pool(1).install(scheme_runs)));
    let single_texts = match single {
        Ok((texts, [v4, v5, v6, v7])) => {
            record(4, "exhaustive round trip", v4);
            record(5, "sampled run at k = 6", v5);
            record(6, "overflow trend", v6);
            record(7, "preimage hit statistics", v7);
            Some(texts)
        }
        Err(_) => {
            for (id, name) in [
                (4, "exhaustive round trip"),
                (5, "sampled run at k = 6"),
                (6, "overflow trend"),
                (7, "preimage hit statistics"),
            ] {
                record(id, name, verdict(false, "scheme run panicked"));
            }
            None
        }
    };

    record(8, "outer bound", guarded(c8_outer));
    record(9, "solver against oracles", guarded(c9_oracles));
    record(10, "curve properties", guarded(c10_curve));
    record(11, "second extension", guarded(c11_superadditive));
    record(12, "wringing", guarded(c12_wringing));
    record(13, "square-root law", guarded(c13_sqrt_law));

    let determinism = guarded(|| {
        let Some(single) = single_texts else {
            return verdict(false, "single-worker runs missing");
        };
        let (multi, _) = pool(4).install(scheme_runs);
        let differing: Vec<usize> =
            single.iter().zip(&multi).enumerate().filter(|(_, (a, b))| a != b).map(|(i, _)| i).collect();
        verdict(
            differing.is_empty() && single.len() == multi.len(),
            format!("{} reports compared, differing {differing:?}", single.len()),
        )
    });
    record(14, "determinism across worker counts", determinism);

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    say(&format!("acceptance: {} of {} criteria pass", results.len() - failed.len(), results.len()));
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
