//! Floating-point scalar abstraction shared by the analytic modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// floating point: f32 or f64
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Tolerance used when validating normalization constraints on channel
    /// probabilities.
    fn norm_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable")
    }
}

impl Scalar for f32 {
    fn norm_tol() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn norm_tol() -> Self {
        1e-12
    }
}

/// `x * log(y)` with the `0 * log 0 = 0` convention (also `0 * log y` for any `y`).
#[inline]
pub(crate) fn xlogy<T: Scalar>(x: T, y: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x * y.ln()
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Natural log of `exp(a_0) + exp(a_1) + ...`, skipping `-inf` entries.
/// Returns `-inf` for an empty or all-zero input.
pub(crate) fn log_sum_exp<T: Scalar>(terms: impl IntoIterator<Item = T> + Clone) -> T {
    let max = terms
        .clone()
        .into_iter()
        .fold(T::neg_infinity(), |acc, x| acc.max(x));
    if max == T::neg_infinity() {
        return max;
    }
    let mut acc = CompensatedSum::new();
    for x in terms {
        if x != T::neg_infinity() {
            acc.add((x - max).exp());
        }
    }
    max + acc.value().ln()
}

/// `ln(k!)` for `k = 0..=upto`, accumulated term by term.
pub(crate) fn ln_factorials<T: Scalar>(upto: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut acc = CompensatedSum::new();
    out.push(T::zero());
    for k in 1..=upto {
        acc.add(T::from_count(k).ln());
        out.push(acc.value());
    }
    out
}

/// `ln C(n, k)` from a table of log-factorials.
#[inline]
pub(crate) fn ln_binomial<T: Scalar>(lnf: &[T], n: usize, k: usize) -> T {
    lnf[n] - lnf[k] - lnf[n - k]
}
