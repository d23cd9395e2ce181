//! Exact majority-vote error of Eve after advantage distillation.
//!
//! Eve's decoded block has `m` correct symbols and `k_1, ..., k_{n-1}`
//! symbols of each wrong kind. Summing the multinomial weights over all
//! count vectors with a fixed `m` is a coefficient extraction:
//!
//! ```text
//! sum  L! eta0^m eta1^(L-m) / (m! k_1! ... k_{n-1}!)
//!   = C(L, m) eta0^m (L-m)! [x^(L-m)] prod_j f_j(x),   f_j(x) = sum_k (eta1 x)^k / k!
//! ```
//!
//! where each factor `f_j` is restricted to the allowed range of `k_j`.
//! Eve is right with certainty when every `k_j < m` and with probability
//! `1/(l+1)` when exactly `l` of them equal `m`.
//!
//! All polynomial coefficients are nonnegative, so the arithmetic runs in
//! log space: no overflow of `(L-m)!`, no underflow of `eta1^k`. The error
//! probability itself is accumulated from the failure events directly
//! (`k_j > m` for some `j`, or a lost tie) rather than as `1 - success`,
//! which would cancel catastrophically once `E_L` drops below machine
//! epsilon.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::EveChannel;
use crate::scalar::{ln_binomial, ln_factorials, log_sum_exp, CompensatedSum, Scalar};

/// Size caps for the exact evaluation. The work grows like `n L^4`
/// summed over all `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_block_len: usize,
    pub max_dim: u32,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_block_len: 200,
            max_dim: 16,
        }
    }
}

impl ExactLimits {
    pub(crate) fn check(&self, n: u32, block_len: usize) -> Result<()> {
        if block_len > self.max_block_len {
            return Err(Error::Infeasible(format!(
                "block length {block_len} exceeds {}",
                self.max_block_len
            )));
        }
        if n > self.max_dim {
            return Err(Error::Infeasible(format!(
                "alphabet size {n} exceeds {}",
                self.max_dim
            )));
        }
        Ok(())
    }
}

/// `E_L` for `L >= 1` with the default [`ExactLimits`].
pub fn eve_error_exact<T: Scalar>(e: &EveChannel<T>, block_len: usize) -> Result<T> {
    eve_error_exact_with(e, block_len, &ExactLimits::default())
}

pub fn eve_error_exact_with<T: Scalar>(
    e: &EveChannel<T>,
    block_len: usize,
    limits: &ExactLimits,
) -> Result<T> {
    Ok(ln_eve_error_exact_with(e, block_len, limits)?.exp())
}

/// `ln E_L`; `-inf` when Eve is never wrong.
pub fn ln_eve_error_exact<T: Scalar>(e: &EveChannel<T>, block_len: usize) -> Result<T> {
    ln_eve_error_exact_with(e, block_len, &ExactLimits::default())
}

pub fn ln_eve_error_exact_with<T: Scalar>(
    e: &EveChannel<T>,
    block_len: usize,
    limits: &ExactLimits,
) -> Result<T> {
    if block_len == 0 {
        return Err(Error::EmptyBlock);
    }
    limits.check(e.n().get(), block_len)?;
    Ok(ln_eve_error_any(e, block_len))
}

/// `ln E_L` for any `L >= 0`. The empty block gives `E_0 = 1/n`: Eve picks
/// uniformly among `n` tied symbols.
pub(crate) fn ln_eve_error_any<T: Scalar>(e: &EveChannel<T>, block_len: usize) -> T {
    if e.eta1() == T::zero() {
        return if block_len == 0 {
            -e.n().as_scalar::<T>().ln()
        } else {
            T::neg_infinity()
        };
    }
    let work = Workspace::new(e, block_len);
    let terms: Vec<T> = (0..=block_len)
        .into_par_iter()
        .map(|m| work.ln_term(m, Route::Failure))
        .collect();
    log_sum_exp(terms.iter().copied()) - e.n().wrong::<T>().ln()
}

/// Probability that Eve's majority vote lands on the right symbol,
/// `1 - (n-1) E_L`, summed term by term from the success events. Agrees with
/// [`eve_error_exact`] to rounding but loses `E_L` to cancellation once it
/// is below machine epsilon.
pub fn majority_success_exact<T: Scalar>(e: &EveChannel<T>, block_len: usize) -> Result<T> {
    if block_len == 0 {
        return Err(Error::EmptyBlock);
    }
    ExactLimits::default().check(e.n().get(), block_len)?;
    if e.eta1() == T::zero() {
        return Ok(T::one());
    }
    let work = Workspace::new(e, block_len);
    let mut acc = CompensatedSum::new();
    for m in 0..=block_len {
        acc.add(work.ln_term(m, Route::Success).exp());
    }
    Ok(acc.value())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Route {
    Success,
    Failure,
}

struct Workspace<T> {
    n: usize,
    block_len: usize,
    ln_eta0: T,
    ln_eta1: T,
    lnf: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    fn new(e: &EveChannel<T>, block_len: usize) -> Self {
        Self {
            n: e.n().as_usize(),
            block_len,
            ln_eta0: e.eta0().ln(),
            ln_eta1: e.eta1().ln(),
            lnf: ln_factorials(block_len.max(e.n().as_usize())),
        }
    }

    /// `ln[(eta1 x)^k / k!]` coefficient.
    fn ln_coeff(&self, k: usize) -> T {
        let kk = if k == 0 {
            T::zero()
        } else {
            T::from_count(k) * self.ln_eta1
        };
        kk - self.lnf[k]
    }

    /// Truncated series `sum_{k in range} (eta1 x)^k/k!` up to degree `deg`.
    fn series(&self, deg: usize, keep: impl Fn(usize) -> bool) -> Vec<T> {
        (0..=deg)
            .map(|k| {
                if keep(k) {
                    self.ln_coeff(k)
                } else {
                    T::neg_infinity()
                }
            })
            .collect()
    }

    /// Log of the weight of all blocks with `m` correct symbols that end in
    /// the requested event.
    fn ln_term(&self, m: usize, route: Route) -> T {
        let n = self.n;
        let deg = self.block_len - m;
        let lnf = &self.lnf;
        let mm = if m == 0 {
            T::zero()
        } else {
            T::from_count(m) * self.ln_eta0
        };
        let prefix = ln_binomial(lnf, self.block_len, m) + mm + lnf[deg];

        // counts strictly below m
        let below = log_powers(&self.series(deg, |k| k < m), n - 1, deg);
        let ln_top = self.ln_coeff(m.min(deg));

        let mut parts: Vec<T> = Vec::with_capacity(2 * n);
        match route {
            Route::Success => {
                // (1/n) sum_l C(n, l+1) A^l T^(n-1-l), A = (eta1 x)^m/m!
                let ln_n = T::from_count(n).ln();
                for l in 0..n {
                    let shift = m * l;
                    if shift > deg {
                        break;
                    }
                    let a_l = if l == 0 { T::zero() } else { T::from_count(l) * ln_top };
                    parts.push(
                        ln_binomial(lnf, n, l + 1) - ln_n + a_l + below[n - 1 - l][deg - shift],
                    );
                }
            }
            Route::Failure => {
                // some k_j > m: (B + R)^(n-1) - B^(n-1) = sum_{i>=1} C(n-1,i) R^i B^(n-1-i)
                let upto = log_powers(&self.series(deg, |k| k <= m), n - 2, deg);
                let above = log_powers(&self.series(deg, |k| k > m), n - 1, deg);
                for i in 1..n {
                    let c = coeff_of_product(&above[i], &upto[n - 1 - i], deg);
                    parts.push(ln_binomial(lnf, n - 1, i) + c);
                }
                // l-way tie at the top with all others below: lost with prob l/(l+1)
                for l in 1..n {
                    let shift = m * l;
                    if shift > deg {
                        break;
                    }
                    let a_l = T::from_count(l) * ln_top;
                    let lose = (T::from_count(l) / T::from_count(l + 1)).ln();
                    parts.push(
                        ln_binomial(lnf, n - 1, l) + lose + a_l + below[n - 1 - l][deg - shift],
                    );
                }
            }
        }
        prefix + log_sum_exp(parts.iter().copied())
    }
}

/// `[p^0, p^1, ..., p^max_pow]`, each truncated at degree `deg`, in log space.
fn log_powers<T: Scalar>(p: &[T], max_pow: usize, deg: usize) -> Vec<Vec<T>> {
    let mut one = vec![T::neg_infinity(); deg + 1];
    one[0] = T::zero();
    let mut out = Vec::with_capacity(max_pow + 1);
    out.push(one);
    for k in 1..=max_pow {
        let next = log_mul_trunc(&out[k - 1], p, deg);
        out.push(next);
    }
    out
}

fn log_mul_trunc<T: Scalar>(a: &[T], b: &[T], deg: usize) -> Vec<T> {
    (0..=deg).map(|k| coeff_of_product(a, b, k)).collect()
}

/// `ln [x^k] (a * b)` for log-coefficient vectors.
fn coeff_of_product<T: Scalar>(a: &[T], b: &[T], k: usize) -> T {
    let pairs = (0..=k).filter_map(|i| {
        let (x, y) = (a[i], b[k - i]);
        (x != T::neg_infinity() && y != T::neg_infinity()).then(|| x + y)
    });
    let max = pairs.clone().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let mut acc = CompensatedSum::new();
    for v in pairs {
        acc.add((v - max).exp());
    }
    max + acc.value().ln()
}
