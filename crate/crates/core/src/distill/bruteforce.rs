//! Enumeration oracle for Eve's majority vote: walks every one of the `n^L`
//! blocks Eve can hold and scores each one directly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::EveChannel;
use crate::scalar::{CompensatedSum, Scalar};

/// Largest `n^L` the oracle will enumerate.
pub const BRUTEFORCE_MAX_BLOCKS: u64 = 10_000_000;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceTally<T> {
    /// Sum of all block probabilities; 1 up to rounding.
    pub total: T,
    /// Probability that the vote lands on the correct symbol.
    pub success: T,
    /// Probability that it does not.
    pub failure: T,
}

/// `E_L` by enumeration; ties are credited analytically.
pub fn eve_error_bruteforce<T: Scalar>(e: &EveChannel<T>, block_len: usize) -> Result<T> {
    let tally = bruteforce_tally(e, block_len)?;
    Ok(tally.failure / e.n().wrong::<T>())
}

pub fn bruteforce_tally<T: Scalar>(
    e: &EveChannel<T>,
    block_len: usize,
) -> Result<BruteForceTally<T>> {
    if block_len == 0 {
        return Err(Error::EmptyBlock);
    }
    let n = e.n().as_usize();
    let blocks = (n as u64)
        .checked_pow(block_len as u32)
        .filter(|&b| b <= BRUTEFORCE_MAX_BLOCKS)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "{n}^{block_len} blocks exceeds {BRUTEFORCE_MAX_BLOCKS}"
            ))
        })?;

    // eta0^c * eta1^(L-c), indexed by the count c of correct symbols
    let weight: Vec<T> = (0..=block_len)
        .map(|c| e.eta0().powi(c as i32) * e.eta1().powi((block_len - c) as i32))
        .collect();

    let chunks = blocks.div_ceil(CHUNK);
    let partials: Vec<[T; 3]> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut total = CompensatedSum::new();
            let mut success = CompensatedSum::new();
            let mut failure = CompensatedSum::new();
            let mut counts = vec![0usize; n];
            let end = ((chunk + 1) * CHUNK).min(blocks);
            for index in chunk * CHUNK..end {
                counts.fill(0);
                let mut rest = index;
                for _ in 0..block_len {
                    counts[(rest % n as u64) as usize] += 1;
                    rest /= n as u64;
                }
                // symbol 0 is the correct one
                let p = weight[counts[0]];
                let top = *counts.iter().max().expect("n >= 2");
                let credit = if counts[0] == top {
                    let ties = counts.iter().filter(|&&c| c == top).count();
                    T::from_count(ties).recip()
                } else {
                    T::zero()
                };
                total.add(p);
                success.add(p * credit);
                failure.add(p * (T::one() - credit));
            }
            [total.value(), success.value(), failure.value()]
        })
        .collect();

    let mut sums = [CompensatedSum::new(); 3];
    for part in &partials {
        for (s, v) in sums.iter_mut().zip(part) {
            s.add(*v);
        }
    }
    Ok(BruteForceTally {
        total: sums[0].value(),
        success: sums[1].value(),
        failure: sums[2].value(),
    })
}
