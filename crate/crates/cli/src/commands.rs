use nitdistill::distill::{
    accept_rate, bob_error_after_ad, ln_bob_error_after_ad, ln_eve_error_exact, ratio_limits,
    ExactLimits,
};
use nitdistill::infotheory::{curve_data, threshold_report};
use nitdistill::model::{bob_channel, eve_from_bob, Dimension};
use nitdistill::simulator::{distilled_ck_estimate, run_ad_simulation, ProtocolConfig, RateEstimate};

use crate::record::{Cell, OutputRecord};
use crate::CliError;

/// Bands used for the pass flags in simulation output.
const SIGMAS: f64 = 3.0;

pub fn dimension(n: u32) -> Result<Dimension, CliError> {
    Ok(Dimension::new(n)?)
}

pub fn triple_point(n: u32) -> Result<OutputRecord, CliError> {
    let r = threshold_report::<f64>(dimension(n)?)?;
    let b = bob_channel(r.n, r.triple_point.0)?;
    let lim = ratio_limits(&b, &eve_from_bob(&b))?;
    let mut rec = OutputRecord::new(
        "triple-point",
        vec!["n", "ed_beta0", "beta0", "eta0", "eve_ratio_limit", "ck_beta0", "ck_eta0"],
    )
    .param("n", n);
    rec.push_row(vec![
        n.into(),
        r.ed_beta0.into(),
        r.triple_point.0.into(),
        r.triple_point.1.into(),
        lim.eve_ratio.into(),
        r.ck_intersection.0.into(),
        r.ck_intersection.1.into(),
    ]);
    Ok(rec)
}

pub fn curves(n: u32, grid: usize) -> Result<OutputRecord, CliError> {
    let points = curve_data::<f64>(dimension(n)?, grid)?;
    let mut rec = OutputRecord::new("curves", vec!["curve", "eta0", "beta0"])
        .param("n", n)
        .param("grid", grid);
    for p in points {
        rec.push_row(vec![p.curve.label().into(), p.eta0.into(), p.beta0.into()]);
    }
    Ok(rec)
}

pub fn ad_table(n: u32, beta0: f64, l_max: usize) -> Result<OutputRecord, CliError> {
    let d = dimension(n)?;
    let b = bob_channel(d, beta0)?;
    let e = eve_from_bob(&b);
    // the last row's forward ratio needs one extra length
    let cap = ExactLimits::default().max_block_len - 1;
    if !(1..=cap).contains(&l_max) {
        return Err(CliError::Usage(format!("--L-max must lie in [1, {cap}], got {l_max}")));
    }
    let lim = ratio_limits(&b, &e)?;
    let ln_b: Vec<f64> = (1..=l_max + 1)
        .map(|l| ln_bob_error_after_ad(&b, l))
        .collect::<Result<_, _>>()?;
    let ln_e: Vec<f64> = (1..=l_max + 1)
        .map(|l| ln_eve_error_exact(&e, l))
        .collect::<Result<_, _>>()?;

    let mut rec = OutputRecord::new(
        "ad-table",
        vec![
            "block_len",
            "b_l",
            "e_l",
            "accept_rate",
            "b_ratio",
            "e_ratio",
            "b_ratio_limit",
            "e_ratio_limit",
        ],
    )
    .param("n", n)
    .param("beta0", beta0)
    .param("eta0", e.eta0())
    .param("L_max", l_max);
    for l in 1..=l_max {
        let i = l - 1;
        rec.push_row(vec![
            l.into(),
            bob_error_after_ad(&b, l)?.into(),
            ln_e[i].exp().into(),
            accept_rate(&b, l)?.into(),
            (ln_b[i + 1] - ln_b[i]).exp().into(),
            (ln_e[i + 1] - ln_e[i]).exp().into(),
            lim.bob_ratio.into(),
            lim.eve_ratio.into(),
        ]);
    }
    Ok(rec)
}

pub fn simulate(
    n: u32,
    beta0: f64,
    block_len: usize,
    blocks: u64,
    seed: u64,
) -> Result<OutputRecord, CliError> {
    let cfg = ProtocolConfig {
        n: dimension(n)?,
        beta0,
        block_len,
        num_blocks: blocks,
        seed,
    };
    let r = run_ad_simulation(&cfg)?;
    let mut rec = OutputRecord::new(
        "simulate",
        vec!["quantity", "hits", "trials", "empirical", "exact", "std_error", "z_score", "pass"],
    )
    .param("n", n)
    .param("beta0", beta0)
    .param("L", block_len)
    .param("blocks", blocks)
    .param("seed", seed)
    .param("eta0", r.eta0)
    .param("sigmas", SIGMAS)
    .param("accepted_blocks", r.accepted_blocks)
    .param("bob_wrong_blocks", r.bob_wrong_blocks)
    .param("eve_wrong_given_bob_correct", r.eve_wrong_given_bob_correct)
    .param("eve_wrong_given_bob_wrong", r.eve_wrong_given_bob_wrong);
    let mut rate = |name: &str, est: &RateEstimate| {
        rec.push_row(vec![
            name.into(),
            est.hits.into(),
            est.trials.into(),
            est.empirical.into(),
            est.exact.into(),
            est.std_error.into(),
            est.z_score().into(),
            est.within(SIGMAS).into(),
        ]);
    };
    rate("accept_rate", &r.accept);
    rate("bob_wrong", &r.bob_wrong);
    rate("eve_wrong", &r.eve_wrong);
    // yield of the distilled key; skipped when no usable blocks survive
    if let Ok(y) = distilled_ck_estimate(&r) {
        rec.push_row(vec![
            "distilled_nu".into(),
            Cell::Empty,
            Cell::Empty,
            y.empirical.nu().into(),
            y.exact.nu().into(),
            Cell::Empty,
            Cell::Empty,
            (y.empirical.is_positive() == y.exact.is_positive()).into(),
        ]);
    }
    Ok(rec)
}
