//! One-way key yield and the distillation thresholds.
//!
//! Plot coordinates follow the usual picture: `beta0` on the horizontal
//! axis, `eta0` on the vertical one. The four loci are
//!
//! * curve `a`: the closed-form Bob/Eve relation,
//! * curve `b`: the entanglement-distillation threshold `beta0 = 2/(n+1)`,
//! * curve `c`: the boundary of the advantage-distillation condition,
//! * curve `d`: the zero contour of the one-way yield.

use rayon::prelude::*;
use serde::Serialize;

use crate::distill::ratio_limits;
use crate::error::{Error, Result};
use crate::model::{
    bob_channel, bob_from_eve, eve_from_bob, out_of_range, same_dimension, BobChannel, Dimension,
    EveChannel,
};
use crate::scalar::{xlogy, Scalar};

/// One-way secret-key yield in nits per raw symbol (log base `n`).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct CkYield<T>(pub T);

impl<T: Scalar> CkYield<T> {
    pub fn nu(self) -> T {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > T::zero()
    }
}

/// Yield `I(A:B) - I(A:E)` for the given channels.
pub fn ck_yield<T: Scalar>(b: &BobChannel<T>, e: &EveChannel<T>) -> Result<CkYield<T>> {
    same_dimension(b, e)?;
    Ok(ck_yield_from_rates(
        b.n(),
        b.beta0(),
        b.beta1(),
        e.eta0(),
        e.eta1(),
    ))
}

/// Yield from raw probabilities without channel validation. Zero-probability
/// terms follow `0 log 0 = 0`, so boundary and empirical rates are accepted.
pub fn ck_yield_from_rates<T: Scalar>(
    n: Dimension,
    beta0: T,
    beta1: T,
    eta0: T,
    eta1: T,
) -> CkYield<T> {
    let m = n.wrong::<T>();
    let bob = xlogy(beta0, beta0) + xlogy(m * beta1, beta1);
    let eve = xlogy(eta0, eta0) + xlogy(m * eta1, eta1);
    CkYield((bob - beta0 * eve) / n.as_scalar::<T>().ln())
}

/// `beta0` at which `beta0 = 2 beta1`, i.e. `2/(n+1)`.
pub fn ed_threshold<T: Scalar>(n: Dimension) -> T {
    T::lit(2.0) / (n.as_scalar::<T>() + T::one())
}

pub fn ed_threshold_satisfied<T: Scalar>(b: &BobChannel<T>) -> bool {
    b.beta0() > T::lit(2.0) * b.beta1()
}

/// `beta1/beta0 < 1 - (sqrt(eta0) - sqrt(eta1))^2`: Bob's post-distillation
/// error shrinks geometrically faster than Eve's.
pub fn ad_threshold_satisfied<T: Scalar>(b: &BobChannel<T>, e: &EveChannel<T>) -> Result<bool> {
    same_dimension(b, e)?;
    let limits = ratio_limits(b, e)?;
    Ok(limits.bob_ratio < limits.eve_ratio)
}

/// Yield with Eve held fixed, as a function of Bob's `beta0` only.
fn yield_at_fixed_eve<T: Scalar>(n: Dimension, beta0: T, e: &EveChannel<T>) -> T {
    let beta1 = (T::one() - beta0) / n.wrong::<T>();
    ck_yield_from_rates(n, beta0, beta1, e.eta0(), e.eta1()).nu()
}

/// Bisection for an increasing function on `[lo, hi]` with `f(lo) < 0 <= f(hi)`.
/// Runs until the bracket stops shrinking in floating point.
fn bisect_increasing<T: Scalar>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> T {
    let half = T::lit(0.5);
    for _ in 0..256 {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Point of curve `d` at the given Eve channel: the `beta0` in `(1/n, 1]`
/// where the yield vanishes. Returns [`Error::RootNotFound`] when the yield
/// is negative on the whole interval.
pub fn ck_boundary_beta0<T: Scalar>(n: Dimension, e: &EveChannel<T>) -> Result<T> {
    if e.n() != n {
        return Err(Error::DimensionMismatch(n.get(), e.n().get()));
    }
    let lo = n.uniform::<T>();
    let hi = T::one();
    let f = |beta0: T| yield_at_fixed_eve(n, beta0, e);
    if f(hi) < T::zero() {
        return Err(Error::RootNotFound(e.eta0().to_f64().unwrap_or(f64::NAN)));
    }
    if f(lo) >= T::zero() {
        return Ok(lo);
    }
    Ok(bisect_increasing(lo, hi, f))
}

/// Where curve `d` crosses curve `a`: the smallest `beta0` with nonnegative
/// yield when Eve follows the closed-form relation. Returns `(beta0, eta0)`.
pub fn ck_intersection<T: Scalar>(n: Dimension) -> Result<(T, T)> {
    let f = |beta0: T| {
        let b = BobChannel::closed(n, beta0).expect("bisection stays in [1/n, 1]");
        let e = eve_from_bob(&b);
        ck_yield_from_rates(n, b.beta0(), b.beta1(), e.eta0(), e.eta1()).nu()
    };
    let beta0 = bisect_increasing(n.uniform::<T>(), T::one(), f);
    let e = eve_from_bob(&bob_channel(n, beta0)?);
    Ok((beta0, e.eta0()))
}

/// Common crossing of curves `a`, `b` and `c`: `(2/(n+1), eta0)`.
pub fn triple_point<T: Scalar>(n: Dimension) -> (T, T) {
    let beta0 = ed_threshold::<T>(n);
    let b = bob_channel(n, beta0).expect("2/(n+1) lies in (1/n, 1]");
    (beta0, eve_from_bob(&b).eta0())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub n: Dimension,
    pub ed_beta0: T,
    pub triple_point: (T, T),
    pub ck_intersection: (T, T),
}

pub fn threshold_report<T: Scalar>(n: Dimension) -> Result<ThresholdReport<T>> {
    Ok(ThresholdReport {
        n,
        ed_beta0: ed_threshold(n),
        triple_point: triple_point(n),
        ck_intersection: ck_intersection(n)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Curve {
    /// closed-form Bob/Eve relation
    A,
    /// entanglement-distillation threshold
    B,
    /// advantage-distillation boundary
    C,
    /// zero one-way yield
    D,
}

impl Curve {
    pub const ALL: [Curve; 4] = [Curve::A, Curve::B, Curve::C, Curve::D];

    pub fn label(self) -> &'static str {
        match self {
            Curve::A => "a",
            Curve::B => "b",
            Curve::C => "c",
            Curve::D => "d",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint<T> {
    pub curve: Curve,
    pub eta0: T,
    pub beta0: T,
}

/// Samples of the four curves on an `eta0` grid spanning `[1/n, 1]`
/// (endpoints included). Points are grouped by curve, in grid order.
/// Curve `d` omits grid points where no root exists.
pub fn curve_data<T: Scalar>(n: Dimension, grid_size: usize) -> Result<Vec<CurvePoint<T>>> {
    if grid_size < 2 {
        return Err(out_of_range(
            "grid_size",
            T::from_count(grid_size),
            "[2, inf)",
        ));
    }
    let lo = n.uniform::<T>();
    let span = T::one() - lo;
    let last = T::from_count(grid_size - 1);
    let etas: Vec<T> = (0..grid_size)
        .map(|i| {
            if i + 1 == grid_size {
                T::one()
            } else {
                lo + span * T::from_count(i) / last
            }
        })
        .collect();
    let m = n.wrong::<T>();
    let ed = ed_threshold::<T>(n);

    let per_eta: Vec<[Option<CurvePoint<T>>; 4]> = etas
        .par_iter()
        .map(|&eta0| {
            let e = EveChannel::new(n, eta0).expect("grid lies in [1/n, 1]");
            let s = e.eta0().sqrt() - e.eta1().sqrt();
            let s2 = s * s;
            let a = bob_from_eve(&e);
            let c = (T::one() + m * (T::one() - s2)).recip();
            let d = ck_boundary_beta0(n, &e).ok();
            let point = |curve, beta0| CurvePoint {
                curve,
                eta0,
                beta0,
            };
            [
                Some(point(Curve::A, a)),
                Some(point(Curve::B, ed)),
                Some(point(Curve::C, c)),
                d.map(|d| point(Curve::D, d)),
            ]
        })
        .collect();

    let mut out = Vec::with_capacity(4 * grid_size);
    for k in 0..4 {
        out.extend(per_eta.iter().filter_map(|row| row[k]));
    }
    Ok(out)
}
