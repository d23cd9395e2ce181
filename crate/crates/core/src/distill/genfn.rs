//! Exponential generating function of Eve's error rates,
//! `E(t) = sum_L t^L E_L / L!`, in closed form and as a truncated series.
//!
//! The closed form weights each `m` by a Poisson distribution of mean
//! `eta0 t` and uses the partially summed Poisson distribution
//! `w_m(x) = sum_{k<=m} x^k e^{-x} / k!` with `w_{-1} = 0`:
//!
//! ```text
//! E(t) = e^t/(n-1) sum_m Pois(m; eta0 t) (1 - (w_m^n - w_{m-1}^n) / (n (w_m - w_{m-1})))
//! ```
//!
//! The quotient is expanded as `sum_j w_m^j w_{m-1}^(n-1-j)` and each
//! `1 - w_m^j w_{m-1}^k` is evaluated through `expm1`, with `ln w_m` taken
//! from the upper Poisson tail when `w_m` is close to 1.

use crate::error::Result;
use crate::model::{out_of_range, EveChannel};
use crate::scalar::{ln_factorials, CompensatedSum, Scalar};

use super::exact::{ln_eve_error_any, ExactLimits};

/// Relative cutoff on the Poisson weights in the `m` sum.
const WEIGHT_CUTOFF: f64 = 1e-18;

pub fn eve_gen_function<T: Scalar>(e: &EveChannel<T>, t: T) -> Result<T> {
    if !t.is_finite() || t < T::zero() {
        return Err(out_of_range("t", t, "[0, inf)"));
    }
    let n = e.n().as_usize();
    let x = e.eta1() * t;
    let y = e.eta0() * t;
    let reach = x.max(y);
    let span = reach + T::lit(15.0) * (reach + T::one()).sqrt() + T::lit(60.0);
    let kmax = span.ceil().to_usize().expect("finite t");
    let lnf = ln_factorials::<T>(kmax);

    let ln_pois = |k: usize, mean: T| -> T {
        if mean == T::zero() {
            return if k == 0 { T::zero() } else { T::neg_infinity() };
        }
        let kk = if k == 0 { T::zero() } else { T::from_count(k) * mean.ln() };
        kk - mean - lnf[k]
    };

    // w_m(x) by forward sums and 1 - w_m(x) by backward sums
    let p: Vec<T> = (0..=kmax).map(|k| ln_pois(k, x).exp()).collect();
    let mut w = Vec::with_capacity(kmax + 1);
    let mut acc = CompensatedSum::new();
    for &pk in &p {
        acc.add(pk);
        w.push(acc.value());
    }
    let mut tail = vec![T::zero(); kmax + 1];
    let mut acc = CompensatedSum::new();
    for k in (0..kmax).rev() {
        acc.add(p[k + 1]);
        tail[k] = acc.value();
    }
    let half = T::lit(0.5);
    let ln_w = |m: usize| -> T {
        if w[m] <= half {
            w[m].ln()
        } else {
            (-tail[m]).ln_1p()
        }
    };
    // k * ln w with 0 * (-inf) = 0
    let scaled = |k: usize, lw: T| -> T {
        if k == 0 {
            T::zero()
        } else {
            T::from_count(k) * lw
        }
    };

    let nn = T::from_count(n);
    let bracket = |m: usize| -> T {
        let la = ln_w(m);
        if m == 0 {
            // w_{-1} = 0 leaves only the j = n-1 term: 1 - w_0^(n-1)/n
            return (T::from_count(n - 1) - scaled(n - 1, la).exp_m1()) / nn;
        }
        let lb = ln_w(m - 1);
        let mut s = CompensatedSum::new();
        for j in 0..n {
            s.add(-(scaled(j, la) + scaled(n - 1 - j, lb)).exp_m1());
        }
        s.value() / nn
    };

    let growth = (T::one() - e.eta0()) * t;
    let cutoff = T::lit(WEIGHT_CUTOFF).ln();
    let mut peak = T::neg_infinity();
    let mut sum = CompensatedSum::new();
    for m in 0..=kmax {
        let lw = growth + ln_pois(m, y) + y;
        peak = peak.max(lw);
        if T::from_count(m) > y && lw < peak + cutoff {
            break;
        }
        sum.add(lw.exp() * bracket(m));
    }
    Ok(sum.value() / e.n().wrong::<T>())
}

/// `sum_{L=0}^{max_len} t^L E_L / L!` from the exact coefficients, with
/// `E_0 = 1/n` for the empty block.
pub fn gen_function_series<T: Scalar>(e: &EveChannel<T>, t: T, max_len: usize) -> Result<T> {
    if !t.is_finite() || t < T::zero() {
        return Err(out_of_range("t", t, "[0, inf)"));
    }
    if max_len > 0 {
        ExactLimits::default().check(e.n().get(), max_len)?;
    }
    let lnf = ln_factorials::<T>(max_len);
    let ln_t = t.ln();
    let mut sum = CompensatedSum::new();
    for (l, &ln_fact) in lnf.iter().enumerate().take(max_len + 1) {
        let ln_e = ln_eve_error_any(e, l);
        let power = if l == 0 { T::zero() } else { T::from_count(l) * ln_t };
        sum.add((power + ln_e - ln_fact).exp());
    }
    Ok(sum.value())
}
