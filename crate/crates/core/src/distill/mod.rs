//! Advantage distillation: post-distillation error rates for Bob and Eve,
//! their generating function, and the geometric ratio limits.
//!
//! Alice adds a die value to each block of length `L` and announces the
//! result; Bob keeps only blocks that decode to a single repeated symbol.
//! Bob then holds a specific wrong symbol with probability `B_L`. Eve, who
//! decodes by majority vote, holds a specific wrong symbol with probability
//! `E_L` (conditioned on Bob being right).

mod bruteforce;
mod exact;
mod genfn;

pub use bruteforce::{bruteforce_tally, eve_error_bruteforce, BruteForceTally, BRUTEFORCE_MAX_BLOCKS};
pub use exact::{
    eve_error_exact, eve_error_exact_with, ln_eve_error_exact, ln_eve_error_exact_with,
    majority_success_exact, ExactLimits,
};
pub use genfn::{eve_gen_function, gen_function_series};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{same_dimension, BobChannel, EveChannel};
use crate::scalar::Scalar;

/// Exact block statistics after one round of advantage distillation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdExact<T> {
    pub block_len: usize,
    /// Bob holds one particular wrong symbol.
    pub b_l: T,
    /// Eve holds one particular wrong symbol, given Bob is right.
    pub e_l: T,
    /// Fraction of blocks Bob keeps.
    pub accept_rate: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioLimits<T> {
    /// `lim B_{L+1}/B_L = beta1/beta0`
    pub bob_ratio: T,
    /// `lim E_{L+1}/E_L = 1 - (sqrt(eta0) - sqrt(eta1))^2`
    pub eve_ratio: T,
}

impl<T: Scalar> RatioLimits<T> {
    /// Bob's error decays strictly faster than Eve's.
    pub fn bob_wins(&self) -> bool {
        self.bob_ratio < self.eve_ratio
    }
}

fn check_block_len(block_len: usize) -> Result<()> {
    if block_len == 0 {
        return Err(Error::EmptyBlock);
    }
    Ok(())
}

/// `B_L = beta1^L / (beta0^L + (n-1) beta1^L)`, evaluated as
/// `r^L / (1 + (n-1) r^L)` with `r = beta1/beta0`.
pub fn bob_error_after_ad<T: Scalar>(b: &BobChannel<T>, block_len: usize) -> Result<T> {
    Ok(ln_bob_error_after_ad(b, block_len)?.exp())
}

/// Natural log of [`bob_error_after_ad`]; finite far past the point where
/// `B_L` underflows.
pub fn ln_bob_error_after_ad<T: Scalar>(b: &BobChannel<T>, block_len: usize) -> Result<T> {
    check_block_len(block_len)?;
    let r = b.ratio();
    if r == T::zero() {
        return Ok(T::neg_infinity());
    }
    let ln_rl = T::from_count(block_len) * r.ln();
    Ok(ln_rl - (b.n().wrong::<T>() * ln_rl.exp()).ln_1p())
}

/// `beta0^L + (n-1) beta1^L`.
pub fn accept_rate<T: Scalar>(b: &BobChannel<T>, block_len: usize) -> Result<T> {
    check_block_len(block_len)?;
    let l = block_len as i32;
    Ok(b.beta0().powi(l) + b.n().wrong::<T>() * b.beta1().powi(l))
}

pub fn ad_exact<T: Scalar>(
    b: &BobChannel<T>,
    e: &EveChannel<T>,
    block_len: usize,
) -> Result<AdExact<T>> {
    same_dimension(b, e)?;
    Ok(AdExact {
        block_len,
        b_l: bob_error_after_ad(b, block_len)?,
        e_l: eve_error_exact(e, block_len)?,
        accept_rate: accept_rate(b, block_len)?,
    })
}

pub fn ratio_limits<T: Scalar>(b: &BobChannel<T>, e: &EveChannel<T>) -> Result<RatioLimits<T>> {
    same_dimension(b, e)?;
    let gap = e.eta0().sqrt() - e.eta1().sqrt();
    Ok(RatioLimits {
        bob_ratio: b.ratio(),
        eve_ratio: (T::one() - gap * gap).max(T::zero()).min(T::one()),
    })
}

/// Channels describing the distilled key: `beta1' = B_L`, `eta1' = E_L`.
pub fn post_ad_channels<T: Scalar>(
    b: &BobChannel<T>,
    e: &EveChannel<T>,
    block_len: usize,
) -> Result<(BobChannel<T>, EveChannel<T>)> {
    same_dimension(b, e)?;
    let n = b.n();
    let b_l = bob_error_after_ad(b, block_len)?;
    let e_l = eve_error_exact(e, block_len)?;
    let bob = BobChannel::from_beta1(n, b_l)?;
    let eve = EveChannel::from_parts(n, T::one() - n.wrong::<T>() * e_l, e_l)?;
    Ok((bob, eve))
}
