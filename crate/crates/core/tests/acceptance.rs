//! One test per acceptance criterion. Each prints a single PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use nitdistill::distill::{
    eve_error_bruteforce, eve_error_exact, eve_gen_function, gen_function_series,
    ln_eve_error_exact, ratio_limits,
};
use nitdistill::infotheory::{ad_threshold_satisfied, ck_intersection, triple_point};
use nitdistill::model::{bob_channel, eve_from_bob, srm_eve_oracle, Dimension, EveChannel};
use nitdistill::simulator::{run_ad_simulation, run_ad_simulation_with_workers, ProtocolConfig};

const SEED: u64 = 7919;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn verdict(id: u32, pass: bool, elapsed: Duration, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id}: {detail} [{:.3} s]", elapsed.as_secs_f64());
    assert!(pass, "criterion {id} failed: {detail}");
}

#[test]
fn c1_triple_point_n5() {
    let start = Instant::now();
    let (beta0, eta0) = triple_point::<f64>(dim(5));
    let want = (11.0 + 4.0 * 6f64.sqrt()) / 25.0;
    let elapsed = start.elapsed();
    let pass = beta0 == 1.0 / 3.0 && (eta0 - want).abs() < 1e-10 && elapsed < Duration::from_secs(1);
    verdict(
        1,
        pass,
        elapsed,
        &format!("beta0={beta0:.15} eta0={eta0:.15} |d eta0|={:.1e}", (eta0 - want).abs()),
    );
}

#[test]
fn c2_ck_intersection_n5() {
    let start = Instant::now();
    let (beta0, eta0) = ck_intersection::<f64>(dim(5)).unwrap();
    let elapsed = start.elapsed();
    let pass = (beta0 - 0.708).abs() <= 0.001
        && (eta0 - 0.470).abs() <= 0.001
        && elapsed < Duration::from_secs(1);
    verdict(2, pass, elapsed, &format!("beta0={beta0:.6} eta0={eta0:.6} (target 0.708, 0.470 +- 0.001)"));
}

#[test]
fn c3_threefold_coincidence() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut widest = 0.0f64;
    for n in 2..=10u32 {
        let d = dim(n);
        let lo = 1.0 / n as f64;
        let tp = 2.0 / (n as f64 + 1.0);
        let flips = |beta0: f64| {
            let b = bob_channel(d, beta0).unwrap();
            ad_threshold_satisfied(&b, &eve_from_bob(&b)).unwrap()
        };
        for i in 1..=50 {
            let beta0 = (lo + (1.0 - lo) * i as f64 / 50.0).min(1.0);
            if (beta0 - tp).abs() < 1e-9 {
                continue;
            }
            if flips(beta0) != (beta0 > tp) {
                mismatches.push(format!("n={n} beta0={beta0}"));
            }
        }
        // bracket the flip without using the known location
        let (mut a, mut b) = (lo + 1e-12, 1.0);
        assert!(!flips(a) && flips(b));
        while b - a >= 1e-10 {
            let mid = 0.5 * (a + b);
            if flips(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        widest = widest.max(b - a);
        if !(a <= tp + 1e-12 && tp - 1e-12 <= b && b - a < 1e-9) {
            mismatches.push(format!("n={n} bracket [{a}, {b}] misses {tp}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(1);
    verdict(
        3,
        pass,
        elapsed,
        &format!("n=2..10 x 50 points, widest bracket {widest:.1e}, mismatches {mismatches:?}"),
    );
}

#[test]
fn c4_srm_oracle() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=10u32 {
        let lo = 1.0 / n as f64;
        for i in 1..=50 {
            let beta0 = (lo + (1.0 - lo) * i as f64 / 50.0).min(1.0);
            let b = bob_channel(dim(n), beta0).unwrap();
            let closed = eve_from_bob(&b);
            let srm = srm_eve_oracle(&b);
            worst = worst
                .max((closed.eta0() - srm.eta0()).abs())
                .max((closed.eta1() - srm.eta1()).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-12 && elapsed < Duration::from_secs(1);
    verdict(4, pass, elapsed, &format!("max |closed - srm| = {worst:.2e}"));
}

#[test]
fn c5_exact_vs_bruteforce() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2..=4u32 {
        let lo = 1.0 / n as f64;
        for k in 0..5 {
            let eta0 = lo + (1.0 - lo) * k as f64 / 4.0;
            let e = EveChannel::<f64>::new(dim(n), eta0).unwrap();
            for l in 1..=6 {
                let a = eve_error_exact(&e, l).unwrap();
                let b = eve_error_bruteforce(&e, l).unwrap();
                worst = worst.max((a - b).abs());
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-12 && elapsed < Duration::from_secs(30);
    verdict(5, pass, elapsed, &format!("{cases} cases, max |exact - brute| = {worst:.2e}"));
}

#[test]
fn c6_asymptotic_ratio() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2u32, 3, 5] {
        let (beta0, _) = triple_point::<f64>(dim(n));
        let b = bob_channel(dim(n), beta0).unwrap();
        let e = eve_from_bob(&b);
        let limit = ratio_limits(&b, &e).unwrap().eve_ratio;
        let ln: Vec<f64> = (20..=61).map(|l| ln_eve_error_exact(&e, l).unwrap()).collect();
        // dev[i] is the deviation at L = 20 + i
        let dev: Vec<f64> = ln.windows(2).map(|w| ((w[1] - w[0]).exp() - limit).abs()).collect();
        let at60 = dev[40];
        let first_rise = dev.windows(2).position(|w| w[1] > w[0]).map(|i| 21 + i);
        let ok = at60 < 0.02 && first_rise.is_none();
        pass &= ok;
        // two-step ratio, informational only
        let two_step = (0.5 * (ln[41] - ln[39])).exp();
        parts.push(format!(
            "n={n}: |dev(60)|={at60:.4} first rise at L={} two-step sqrt(E61/E59)={two_step:.4}",
            first_rise.map_or("none".to_string(), |l| l.to_string()),
        ));
    }
    let elapsed = start.elapsed();
    let pass = pass && elapsed < Duration::from_secs(60);
    verdict(6, pass, elapsed, &parts.join("; "));
}

#[test]
fn c7_generating_function() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [2u32, 3] {
        let lo = 1.0 / n as f64;
        let (_, tp_eta0) = triple_point::<f64>(dim(n));
        for eta0 in [lo, 0.5 * (lo + 1.0), tp_eta0, 0.99] {
            let e = EveChannel::<f64>::new(dim(n), eta0).unwrap();
            for t in [0.5, 1.0, 2.0, 3.0] {
                let series = gen_function_series(&e, t, 40).unwrap();
                let closed = eve_gen_function(&e, t).unwrap();
                worst = worst.max((series - closed).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-8 && elapsed < Duration::from_secs(30);
    verdict(7, pass, elapsed, &format!("max |series - E(t)| = {worst:.2e}"));
}

#[test]
fn c8_monte_carlo() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, beta0, l) in [(2u32, 0.9, 3usize), (3, 0.55, 2), (5, 0.4, 2)] {
        let cfg = ProtocolConfig { n: dim(n), beta0, block_len: l, num_blocks: 1_000_000, seed: SEED };
        let r = run_ad_simulation(&cfg).unwrap();
        pass &= r.all_within(3.0);
        parts.push(format!(
            "({n},{beta0},{l}) z=[{:+.2} {:+.2} {:+.2}]",
            r.accept.z_score(),
            r.bob_wrong.z_score(),
            r.eve_wrong.z_score()
        ));
    }
    let elapsed = start.elapsed();
    let pass = pass && elapsed < Duration::from_secs(30);
    verdict(8, pass, elapsed, &format!("accept/bob/eve z-scores {}", parts.join(" ")));
}

#[test]
fn c9_determinism() {
    let start = Instant::now();
    let cfg = ProtocolConfig { n: dim(3), beta0: 0.55, block_len: 2, num_blocks: 1_000_000, seed: SEED };
    let runs: Vec<String> = [1, 2, 8, 8]
        .iter()
        .map(|&w| serde_json::to_string(&run_ad_simulation_with_workers(&cfg, w).unwrap()).unwrap())
        .collect();
    let pass = runs.windows(2).all(|w| w[0] == w[1]);
    verdict(9, pass, start.elapsed(), &format!("workers 1, 2, 8, 8 -> {} byte reports, identical={pass}", runs[0].len()));
}
