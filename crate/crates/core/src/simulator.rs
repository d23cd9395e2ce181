//! Seeded Monte Carlo run of the advantage-distillation protocol.
//!
//! Each block draws `L` correlated (Alice, Bob, Eve) symbol triples from the
//! effective classical channels, then plays the protocol out literally:
//! Alice adds a die value modulo `n` and announces the block, Bob subtracts
//! his symbols and keeps the block only if every residue agrees, and Eve
//! subtracts her own symbols and takes a majority vote.
//!
//! Block `i` draws from ChaCha stream `i` of the configured seed, so the
//! report does not depend on how blocks are spread over worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distill::{accept_rate, bob_error_after_ad, eve_error_exact, post_ad_channels};
use crate::error::{Error, Result};
use crate::infotheory::{ck_yield, ck_yield_from_rates, CkYield};
use crate::model::{bob_channel, eve_from_bob, BobChannel, Dimension, EveChannel};

const BLOCKS_PER_TASK: u64 = 1 << 12;

/// Default sample size for validation runs.
pub const DEFAULT_BLOCKS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub n: Dimension,
    pub beta0: f64,
    pub block_len: usize,
    pub num_blocks: u64,
    pub seed: u64,
}

impl ProtocolConfig {
    /// Validated channels for this configuration; Eve follows the closed-form
    /// relation.
    pub fn channels(&self) -> Result<(BobChannel<f64>, EveChannel<f64>)> {
        if self.block_len == 0 {
            return Err(Error::EmptyBlock);
        }
        if self.num_blocks == 0 {
            return Err(Error::OutOfRange {
                name: "num_blocks",
                value: 0.0,
                expected: "[1, inf)".into(),
            });
        }
        let b = bob_channel(self.n, self.beta0)?;
        Ok((b, eve_from_bob(&b)))
    }
}

/// One raw symbol position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub alice: u32,
    pub bob: u32,
    /// Eve's inferred value of Alice's symbol.
    pub eve_value: u32,
    /// Set when Bob disagrees with Alice; Eve then knows both symbols.
    pub eve_certain: bool,
}

fn other_symbol<R: Rng + ?Sized>(rng: &mut R, n: u32, symbol: u32) -> u32 {
    (symbol + 1 + rng.random_range(0..n - 1)) % n
}

pub fn sample_triple<R: Rng + ?Sized>(
    rng: &mut R,
    b: &BobChannel<f64>,
    e: &EveChannel<f64>,
) -> Triple {
    let n = b.n().get();
    let alice = rng.random_range(0..n);
    let bob = if rng.random::<f64>() < b.beta0() {
        alice
    } else {
        other_symbol(rng, n, alice)
    };
    if bob != alice {
        return Triple {
            alice,
            bob,
            eve_value: alice,
            eve_certain: true,
        };
    }
    let eve_value = if rng.random::<f64>() < e.eta0() {
        alice
    } else {
        other_symbol(rng, n, alice)
    };
    Triple {
        alice,
        bob,
        eve_value,
        eve_certain: false,
    }
}

/// Everything that happened in one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRecord {
    pub triples: Vec<Triple>,
    pub die: u32,
    pub announced: Vec<u32>,
    pub accepted: bool,
    /// Bob's distilled symbol (his common residue) when accepted.
    pub bob_symbol: Option<u32>,
    /// Eve's majority-vote guess of the die value when accepted.
    pub eve_symbol: Option<u32>,
}

impl BlockRecord {
    pub fn bob_correct(&self) -> bool {
        self.bob_symbol == Some(self.die)
    }

    pub fn eve_correct(&self) -> bool {
        self.eve_symbol == Some(self.die)
    }
}

fn majority<R: Rng + ?Sized>(rng: &mut R, residues: impl Iterator<Item = u32>, n: u32) -> u32 {
    let mut counts = vec![0u32; n as usize];
    for r in residues {
        counts[r as usize] += 1;
    }
    let top = *counts.iter().max().expect("n >= 2");
    let tied: Vec<u32> = (0..n).filter(|&s| counts[s as usize] == top).collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..tied.len())]
    }
}

/// Plays one block of the protocol from the given random stream.
pub fn simulate_block<R: Rng + ?Sized>(
    rng: &mut R,
    b: &BobChannel<f64>,
    e: &EveChannel<f64>,
    block_len: usize,
) -> BlockRecord {
    let n = b.n().get();
    let triples: Vec<Triple> = (0..block_len).map(|_| sample_triple(rng, b, e)).collect();
    let die = rng.random_range(0..n);
    let announced: Vec<u32> = triples.iter().map(|t| (t.alice + die) % n).collect();

    let mut bob_residues = announced
        .iter()
        .zip(&triples)
        .map(|(&a, t)| (a + n - t.bob) % n);
    let first = bob_residues.next().expect("block_len >= 1");
    let accepted = bob_residues.all(|r| r == first);

    let (bob_symbol, eve_symbol) = if accepted {
        let eve_residues = announced
            .iter()
            .zip(&triples)
            .map(|(&a, t)| (a + n - t.eve_value) % n);
        (Some(first), Some(majority(rng, eve_residues, n)))
    } else {
        (None, None)
    };

    BlockRecord {
        triples,
        die,
        announced,
        accepted,
        bob_symbol,
        eve_symbol,
    }
}

/// Acceptance decided from the raw symbols: Bob keeps the block iff
/// `alice - bob` is the same at every position.
pub fn shortcut_accepts(triples: &[Triple], n: Dimension) -> bool {
    let n = n.get();
    let diff = |t: &Triple| (t.alice + n - t.bob) % n;
    match triples.split_first() {
        Some((head, rest)) => rest.iter().all(|t| diff(t) == diff(head)),
        None => false,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    accepted: u64,
    bob_wrong: u64,
    eve_wrong_bob_correct: u64,
    eve_wrong_bob_wrong: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            accepted: self.accepted + o.accepted,
            bob_wrong: self.bob_wrong + o.bob_wrong,
            eve_wrong_bob_correct: self.eve_wrong_bob_correct + o.eve_wrong_bob_correct,
            eve_wrong_bob_wrong: self.eve_wrong_bob_wrong + o.eve_wrong_bob_wrong,
        }
    }
}

/// Binomial proportion with its exact counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub hits: u64,
    pub trials: u64,
    pub empirical: f64,
    pub exact: f64,
    /// `sqrt(p (1 - p) / trials)` at the exact `p`.
    pub std_error: f64,
}

impl RateEstimate {
    fn new(hits: u64, trials: u64, exact: f64) -> Self {
        let (empirical, std_error) = if trials == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let t = trials as f64;
            (hits as f64 / t, (exact * (1.0 - exact) / t).max(0.0).sqrt())
        };
        Self {
            hits,
            trials,
            empirical,
            exact,
            std_error,
        }
    }

    /// `(empirical - exact) / std_error`; 0 when both agree exactly.
    pub fn z_score(&self) -> f64 {
        let diff = self.empirical - self.exact;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.trials > 0 && (self.empirical - self.exact).abs() <= sigmas * self.std_error
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub config: ProtocolConfig,
    pub eta0: f64,
    pub accepted_blocks: u64,
    /// Accepted blocks whose distilled symbol differs from Alice's.
    pub bob_wrong_blocks: u64,
    /// Eve's wrong guesses among accepted blocks where Bob is right.
    pub eve_wrong_given_bob_correct: u64,
    /// Eve's wrong guesses among accepted blocks where Bob is wrong; she
    /// knows every symbol there, so this stays 0.
    pub eve_wrong_given_bob_wrong: u64,
    /// accepted / blocks vs `beta0^L + (n-1) beta1^L`
    pub accept: RateEstimate,
    /// Bob wrong / accepted vs `(n-1) B_L`
    pub bob_wrong: RateEstimate,
    /// Eve wrong / (accepted with Bob right) vs `(n-1) E_L`
    pub eve_wrong: RateEstimate,
}

impl SimReport {
    pub fn all_within(&self, sigmas: f64) -> bool {
        [self.accept, self.bob_wrong, self.eve_wrong]
            .iter()
            .all(|r| r.within(sigmas))
    }
}

/// Runs on the ambient rayon pool.
pub fn run_ad_simulation(cfg: &ProtocolConfig) -> Result<SimReport> {
    let (b, e) = cfg.channels()?;
    let tally = tally_blocks(cfg, &b, &e);
    report(cfg, &b, &e, tally)
}

/// Runs on a dedicated pool with `workers` threads.
pub fn run_ad_simulation_with_workers(cfg: &ProtocolConfig, workers: usize) -> Result<SimReport> {
    let (b, e) = cfg.channels()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|err| Error::Degenerate(format!("thread pool: {err}")))?;
    let tally = pool.install(|| tally_blocks(cfg, &b, &e));
    report(cfg, &b, &e, tally)
}

/// Random stream for block `index`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn tally_blocks(cfg: &ProtocolConfig, b: &BobChannel<f64>, e: &EveChannel<f64>) -> Tally {
    let tasks = cfg.num_blocks.div_ceil(BLOCKS_PER_TASK);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut tally = Tally::default();
            let end = ((task + 1) * BLOCKS_PER_TASK).min(cfg.num_blocks);
            for index in task * BLOCKS_PER_TASK..end {
                let mut rng = base.clone();
                rng.set_stream(index);
                let rec = simulate_block(&mut rng, b, e, cfg.block_len);
                if !rec.accepted {
                    continue;
                }
                tally.accepted += 1;
                match (rec.bob_correct(), rec.eve_correct()) {
                    (true, true) => {}
                    (true, false) => tally.eve_wrong_bob_correct += 1,
                    (false, eve_ok) => {
                        tally.bob_wrong += 1;
                        tally.eve_wrong_bob_wrong += u64::from(!eve_ok);
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge)
}

fn report(
    cfg: &ProtocolConfig,
    b: &BobChannel<f64>,
    e: &EveChannel<f64>,
    t: Tally,
) -> Result<SimReport> {
    let wrong_kinds = cfg.n.wrong::<f64>();
    let exact_accept = accept_rate(b, cfg.block_len)?;
    let exact_bob = wrong_kinds * bob_error_after_ad(b, cfg.block_len)?;
    let exact_eve = wrong_kinds * eve_error_exact(e, cfg.block_len)?;
    let bob_correct = t.accepted - t.bob_wrong;
    Ok(SimReport {
        config: *cfg,
        eta0: e.eta0(),
        accepted_blocks: t.accepted,
        bob_wrong_blocks: t.bob_wrong,
        eve_wrong_given_bob_correct: t.eve_wrong_bob_correct,
        eve_wrong_given_bob_wrong: t.eve_wrong_bob_wrong,
        accept: RateEstimate::new(t.accepted, cfg.num_blocks, exact_accept),
        bob_wrong: RateEstimate::new(t.bob_wrong, t.accepted, exact_bob),
        eve_wrong: RateEstimate::new(t.eve_wrong_bob_correct, bob_correct, exact_eve),
    })
}

/// Yield of the distilled key, from the simulated rates and from the exact
/// post-distillation channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistilledYield {
    pub empirical: CkYield<f64>,
    pub exact: CkYield<f64>,
}

pub fn distilled_ck_estimate(report: &SimReport) -> Result<DistilledYield> {
    if report.accepted_blocks == 0 {
        return Err(Error::Degenerate("no accepted blocks".into()));
    }
    if report.eve_wrong.trials == 0 {
        return Err(Error::Degenerate(
            "no accepted blocks with Bob correct".into(),
        ));
    }
    let cfg = &report.config;
    let n = cfg.n;
    let m = n.wrong::<f64>();
    let bob_rate = report.bob_wrong.empirical;
    let eve_rate = report.eve_wrong.empirical;
    let empirical = ck_yield_from_rates(n, 1.0 - bob_rate, bob_rate / m, 1.0 - eve_rate, eve_rate / m);

    let (b, e) = cfg.channels()?;
    let (b_post, e_post) = post_ad_channels(&b, &e, cfg.block_len)?;
    Ok(DistilledYield {
        empirical,
        exact: ck_yield(&b_post, &e_post)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn cfg(n: u32, beta0: f64, block_len: usize, num_blocks: u64, seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            n: dim(n),
            beta0,
            block_len,
            num_blocks,
            seed,
        }
    }

    fn binomial_ok(hits: u64, trials: u64, p: f64) -> bool {
        let emp = hits as f64 / trials as f64;
        (emp - p).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt()
    }

    #[test]
    fn noiseless_bob_always_agrees() {
        let d = dim(4);
        let b = bob_channel::<f64>(d, 1.0).unwrap();
        let e = eve_from_bob(&b);
        let mut rng = block_rng(7, 0);
        let mut eve_right = 0u64;
        let mut counts = [0u64; 4];
        for _ in 0..20_000 {
            let t = sample_triple(&mut rng, &b, &e);
            assert_eq!(t.alice, t.bob);
            assert!(!t.eve_certain);
            counts[t.alice as usize] += 1;
            eve_right += u64::from(t.eve_value == t.alice);
        }
        assert!(binomial_ok(eve_right, 20_000, e.eta0()));
        for c in counts {
            assert!(binomial_ok(c, 20_000, 0.25));
        }
    }

    #[test]
    fn triple_marginals() {
        let d = dim(3);
        let b = bob_channel::<f64>(d, 1.0 / 3.0 + 0.01).unwrap();
        let e = eve_from_bob(&b);
        let mut rng = block_rng(11, 3);
        let samples = 1_000_000u64;
        let (mut agree, mut eve_right, mut wrong_kind) = (0u64, 0u64, [0u64; 3]);
        for _ in 0..samples {
            let t = sample_triple(&mut rng, &b, &e);
            if t.bob == t.alice {
                agree += 1;
                eve_right += u64::from(t.eve_value == t.alice);
            } else {
                assert!(t.eve_certain);
                assert_eq!(t.eve_value, t.alice);
                wrong_kind[((t.bob + 3 - t.alice) % 3) as usize] += 1;
            }
        }
        assert!(binomial_ok(agree, samples, b.beta0()));
        assert!(binomial_ok(eve_right, agree, e.eta0()));
        assert!(binomial_ok(wrong_kind[1], samples, b.beta1()));
        assert!(binomial_ok(wrong_kind[2], samples, b.beta1()));
    }

    #[test]
    fn noiseless_run_accepts_everything() {
        let r = run_ad_simulation(&cfg(3, 1.0, 4, 50_000, 1)).unwrap();
        assert_eq!(r.accepted_blocks, 50_000);
        assert_eq!(r.bob_wrong_blocks, 0);
        assert!(r.bob_wrong.within(3.0));
        assert!(r.accept.within(3.0));
    }

    #[test]
    fn eve_never_wrong_when_bob_wrong() {
        let r = run_ad_simulation(&cfg(2, 0.6, 2, 100_000, 5)).unwrap();
        assert!(r.bob_wrong_blocks > 0);
        assert_eq!(r.eve_wrong_given_bob_wrong, 0);
    }

    #[test]
    fn binary_bob_rate() {
        let r = run_ad_simulation(&cfg(2, 0.9, 3, 1_000_000, 2024)).unwrap();
        assert!((r.bob_wrong.exact - 0.001 / 0.730).abs() < 1e-15);
        assert!(r.bob_wrong.within(3.0), "{:?}", r.bob_wrong);
        assert!(r.accept.within(3.0), "{:?}", r.accept);
    }

    #[test]
    fn ternary_eve_rate_at_triple_point() {
        let r = run_ad_simulation(&cfg(3, 0.5 + 1e-12, 2, 1_000_000, 99)).unwrap();
        assert!(r.eve_wrong.within(3.0), "{:?}", r.eve_wrong);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let c = cfg(5, 0.4, 3, 30_000, 77);
        let one = run_ad_simulation_with_workers(&c, 1).unwrap();
        let three = run_ad_simulation_with_workers(&c, 3).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn config_validation() {
        assert!(run_ad_simulation(&cfg(3, 0.3, 2, 10, 0)).is_err());
        assert_eq!(run_ad_simulation(&cfg(3, 0.6, 0, 10, 0)), Err(Error::EmptyBlock));
        assert!(run_ad_simulation(&cfg(3, 0.6, 2, 0, 0)).is_err());
    }

    #[test]
    fn distilled_yield_noiseless() {
        let r = run_ad_simulation(&cfg(3, 1.0, 3, 20_000, 4)).unwrap();
        let y = distilled_ck_estimate(&r).unwrap();
        assert!((y.exact.nu() - 1.0).abs() < 1e-12);
        assert!(y.empirical.nu() <= 1.0 + 1e-12);
        assert!((y.empirical.nu() - 1.0).abs() < 0.05);
    }

    #[test]
    fn distilled_yield_crosses_zero_at_triple_point() {
        // exact scan: first L with positive yield, then a simulation there
        let n = dim(5);
        let beta0 = 0.4;
        let b = bob_channel::<f64>(n, beta0).unwrap();
        let e = eve_from_bob(&b);
        let first = (1..=40)
            .find(|&l| {
                let (bp, ep) = post_ad_channels(&b, &e, l).unwrap();
                ck_yield(&bp, &ep).unwrap().is_positive()
            })
            .expect("yield turns positive above the threshold");
        assert!(first > 1);
        let before = run_ad_simulation(&cfg(5, beta0, first - 1, 400_000, 8)).unwrap();
        let yb = distilled_ck_estimate(&before).unwrap();
        assert!(!yb.exact.is_positive());
        let after = run_ad_simulation(&cfg(5, beta0, first, 400_000, 8)).unwrap();
        let ya = distilled_ck_estimate(&after).unwrap();
        assert!(ya.exact.is_positive());
        assert!(ya.exact.nu() > yb.exact.nu());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn announcements_match_shortcut(seed in any::<u64>(), n in 2u32..=6, u in 0.05f64..=1.0, l in 1usize..6) {
            let d = dim(n);
            let lo = 1.0 / n as f64;
            let b = bob_channel::<f64>(d, lo + (1.0 - lo) * u).unwrap();
            let e = eve_from_bob(&b);
            for index in 0..32u64 {
                let mut rng = block_rng(seed, index);
                let mut shadow = rng.clone();
                let rec = simulate_block(&mut rng, &b, &e, l);
                let raw: Vec<Triple> = (0..l).map(|_| sample_triple(&mut shadow, &b, &e)).collect();
                prop_assert_eq!(&raw, &rec.triples);
                prop_assert_eq!(rec.accepted, shortcut_accepts(&raw, d));
                if rec.accepted {
                    let shift = (raw[0].alice + n - raw[0].bob) % n;
                    prop_assert_eq!(rec.bob_symbol, Some((rec.die + shift) % n));
                    prop_assert_eq!(rec.bob_correct(), shift == 0);
                }
            }
        }
    }
}
