use nitdistill::distill::{eve_error_bruteforce, eve_error_exact, eve_gen_function, gen_function_series};
use nitdistill::infotheory::ad_threshold_satisfied;
use nitdistill::model::{bob_channel, eve_from_bob, srm_eve_oracle, EveChannel};

use crate::commands::dimension;
use crate::record::OutputRecord;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn label(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

struct Grid {
    srm_dims: Vec<u32>,
    srm_points: usize,
    ad_dims: Vec<u32>,
    ad_max_len: usize,
    eta_points: usize,
    series_dims: Vec<u32>,
    series_len: usize,
}

impl Grid {
    fn for_level(level: Level) -> Self {
        match level {
            Level::Quick => Grid {
                srm_dims: vec![2, 3],
                srm_points: 10,
                ad_dims: vec![2, 3],
                ad_max_len: 4,
                eta_points: 3,
                series_dims: vec![2, 3],
                series_len: 40,
            },
            Level::Full => Grid {
                srm_dims: (2..=10).collect(),
                srm_points: 50,
                ad_dims: vec![2, 3, 4],
                ad_max_len: 6,
                eta_points: 5,
                series_dims: vec![2, 3],
                series_len: 40,
            },
        }
    }
}

struct Check {
    name: &'static str,
    cases: usize,
    max_residual: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            cases: 0,
            max_residual: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        // a NaN residual must fail the check, f64::max would drop it
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        self.max_residual = self.max_residual.max(r);
    }

    fn passed(&self) -> bool {
        self.cases > 0 && self.max_residual <= self.tolerance
    }
}

/// Points strictly inside `(1/n, 1]`, evenly spaced, ending at 1.
fn beta_grid(n: u32, points: usize) -> Vec<f64> {
    let lo = 1.0 / n as f64;
    (1..=points)
        .map(|i| (lo + (1.0 - lo) * i as f64 / points as f64).min(1.0))
        .collect()
}

/// Points spanning `[1/n, 1]` inclusive.
fn eta_grid(n: u32, points: usize) -> Vec<f64> {
    let lo = 1.0 / n as f64;
    (0..points)
        .map(|k| (lo + (1.0 - lo) * k as f64 / (points - 1) as f64).min(1.0))
        .collect()
}

fn srm_check(g: &Grid) -> Result<Check, CliError> {
    let mut c = Check::new("srm_vs_closed_form", 1e-12);
    for &n in &g.srm_dims {
        for beta0 in beta_grid(n, g.srm_points) {
            let b = bob_channel(dimension(n)?, beta0)?;
            let closed = eve_from_bob(&b);
            let srm = srm_eve_oracle(&b);
            c.record((closed.eta0() - srm.eta0()).abs().max((closed.eta1() - srm.eta1()).abs()));
        }
    }
    Ok(c)
}

fn threshold_check(g: &Grid) -> Result<Check, CliError> {
    // distance from the predicate's flip to 2/(n+1), found by bisection
    let mut c = Check::new("threshold_flip", 1e-9);
    for &n in &g.srm_dims {
        let d = dimension(n)?;
        let flips = |beta0: f64| -> Result<bool, CliError> {
            let b = bob_channel(d, beta0)?;
            Ok(ad_threshold_satisfied(&b, &eve_from_bob(&b))?)
        };
        let (mut lo, mut hi) = (1.0 / n as f64 + 1e-12, 1.0);
        while hi - lo >= 1e-10 {
            let mid = 0.5 * (lo + hi);
            if flips(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        c.record((0.5 * (lo + hi) - 2.0 / (n as f64 + 1.0)).abs());
    }
    Ok(c)
}

fn exact_check(g: &Grid) -> Result<Check, CliError> {
    let mut c = Check::new("exact_vs_bruteforce", 1e-12);
    for &n in &g.ad_dims {
        for eta0 in eta_grid(n, g.eta_points) {
            let e = EveChannel::<f64>::new(dimension(n)?, eta0)?;
            for l in 1..=g.ad_max_len {
                c.record((eve_error_exact(&e, l)? - eve_error_bruteforce(&e, l)?).abs());
            }
        }
    }
    Ok(c)
}

fn series_check(g: &Grid) -> Result<Check, CliError> {
    let mut c = Check::new("series_vs_generating_function", 1e-8);
    for &n in &g.series_dims {
        for eta0 in eta_grid(n, g.eta_points) {
            let e = EveChannel::<f64>::new(dimension(n)?, eta0)?;
            for t in [0.5, 1.0, 2.0, 3.0] {
                c.record((gen_function_series(&e, t, g.series_len)? - eve_gen_function(&e, t)?).abs());
            }
        }
    }
    Ok(c)
}

/// Runs the oracle cross-checks. The flag is true when every check passed.
pub fn run(level: Level) -> Result<(OutputRecord, bool), CliError> {
    let g = Grid::for_level(level);
    let checks = [srm_check(&g)?, threshold_check(&g)?, exact_check(&g)?, series_check(&g)?];
    let mut rec = OutputRecord::new("verify", vec!["check", "cases", "max_residual", "tolerance", "pass"])
        .param("level", level.label());
    let mut all = true;
    for c in &checks {
        all &= c.passed();
        rec.push_row(vec![
            c.name.into(),
            c.cases.into(),
            c.max_residual.into(),
            c.tolerance.into(),
            c.passed().into(),
        ]);
    }
    Ok((rec, all))
}
