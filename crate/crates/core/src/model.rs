//! Channel parameters and the Bob/Eve complementarity relation.
//!
//! Bob's channel is described by `beta0` (he holds Alice's symbol) and
//! `beta1` (he holds one particular wrong symbol). Eve's channel, conditioned
//! on Bob agreeing with Alice, is described in the same way by `eta0` and
//! `eta1`. The two are tied together by
//!
//! ```text
//! sqrt(eta0) - sqrt(eta1) = sqrt(beta1 / beta0)
//! ```
//!
//! which is computed here twice: once in closed form ([`eve_from_bob`]) and
//! once from the square-root measurement on Eve's ancilla Gram matrix
//! ([`srm_eve_oracle`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Alphabet size of the qunits (number of symbols per nit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn as_scalar<T: Scalar>(self) -> T {
        T::from_count(self.as_usize())
    }

    /// `1/n`, the probability of a uniform guess.
    #[inline]
    pub fn uniform<T: Scalar>(self) -> T {
        self.as_scalar::<T>().recip()
    }

    /// Number of wrong symbols, `n - 1`.
    #[inline]
    pub fn wrong<T: Scalar>(self) -> T {
        T::from_count(self.as_usize() - 1)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Bob's per-symbol statistics in matched bases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BobChannel<T> {
    n: Dimension,
    beta0: T,
    beta1: T,
}

impl<T: Scalar> BobChannel<T> {
    /// Channel in the key-analysis regime `1/n < beta0 <= 1`.
    pub fn new(n: Dimension, beta0: T) -> Result<Self> {
        let lo = n.uniform::<T>();
        if !(beta0 > lo && beta0 <= T::one()) {
            return Err(out_of_range("beta0", beta0, "(1/n, 1]"));
        }
        Ok(Self::unchecked(n, beta0))
    }

    /// Like [`BobChannel::new`] but also accepts the uncorrelated endpoint
    /// `beta0 = 1/n`, where Eve's limits are still well defined.
    pub fn closed(n: Dimension, beta0: T) -> Result<Self> {
        let lo = n.uniform::<T>();
        if !(beta0 >= lo - T::norm_tol() && beta0 <= T::one()) {
            return Err(out_of_range("beta0", beta0, "[1/n, 1]"));
        }
        Ok(Self::unchecked(n, beta0.max(lo)))
    }

    /// Channel from the specific-wrong probability, `beta0 = 1 - (n-1) beta1`.
    /// Keeps full relative precision when `beta1` is tiny.
    pub fn from_beta1(n: Dimension, beta1: T) -> Result<Self> {
        if !(beta1 >= T::zero() && beta1 < n.uniform::<T>()) {
            return Err(out_of_range("beta1", beta1, "[0, 1/n)"));
        }
        let beta0 = T::one() - n.wrong::<T>() * beta1;
        Ok(Self { n, beta0, beta1 })
    }

    fn unchecked(n: Dimension, beta0: T) -> Self {
        let beta1 = (T::one() - beta0) / n.wrong::<T>();
        Self { n, beta0, beta1 }
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn beta0(&self) -> T {
        self.beta0
    }

    pub fn beta1(&self) -> T {
        self.beta1
    }

    /// `beta1 / beta0`, clamped into `[0, 1]`.
    pub fn ratio(&self) -> T {
        (self.beta1 / self.beta0).max(T::zero()).min(T::one())
    }
}

/// Eve's per-symbol statistics, conditioned on Bob holding Alice's symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EveChannel<T> {
    n: Dimension,
    eta0: T,
    eta1: T,
}

impl<T: Scalar> EveChannel<T> {
    /// Channel with `1/n <= eta0 <= 1`; `eta1` follows from normalization.
    pub fn new(n: Dimension, eta0: T) -> Result<Self> {
        check_eta0(n, eta0)?;
        let eta0 = eta0.max(n.uniform());
        let eta1 = (T::one() - eta0) / n.wrong::<T>();
        Ok(Self { n, eta0, eta1 })
    }

    /// Channel from both probabilities; they must satisfy
    /// `eta0 + (n-1) eta1 = 1`.
    pub fn from_parts(n: Dimension, eta0: T, eta1: T) -> Result<Self> {
        check_eta0(n, eta0)?;
        if eta1 < T::zero() {
            return Err(out_of_range("eta1", eta1, "[0, 1/n]"));
        }
        let total = eta0 + n.wrong::<T>() * eta1;
        if (total - T::one()).abs() > T::norm_tol() {
            return Err(Error::Normalization(format!(
                "eta0 + (n-1) eta1 = {total}"
            )));
        }
        Ok(Self { n, eta0, eta1 })
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn eta0(&self) -> T {
        self.eta0
    }

    pub fn eta1(&self) -> T {
        self.eta1
    }
}

fn check_eta0<T: Scalar>(n: Dimension, eta0: T) -> Result<()> {
    let lo = n.uniform::<T>() - T::norm_tol();
    if !(eta0 >= lo && eta0 <= T::one() + T::norm_tol()) {
        return Err(out_of_range("eta0", eta0, "[1/n, 1]"));
    }
    Ok(())
}

pub(crate) fn out_of_range<T: Scalar>(name: &'static str, value: T, expected: &str) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_f64().unwrap_or(f64::NAN),
        expected: expected.to_owned(),
    }
}

pub(crate) fn same_dimension<T: Scalar>(b: &BobChannel<T>, e: &EveChannel<T>) -> Result<()> {
    if b.n() != e.n() {
        return Err(Error::DimensionMismatch(b.n().get(), e.n().get()));
    }
    Ok(())
}

/// Strict constructor: rejects `beta0 <= 1/n` and `beta0 > 1`.
pub fn bob_channel<T: Scalar>(n: Dimension, beta0: T) -> Result<BobChannel<T>> {
    BobChannel::new(n, beta0)
}

/// Eve's channel from Bob's in closed form.
///
/// Solves `sqrt(eta0) - sqrt(eta1) = s` with `s = sqrt(beta1/beta0)` together
/// with `eta0 + (n-1) eta1 = 1`, taking the root with `eta0 >= 1/n`:
///
/// ```text
/// sqrt(eta0) = ((n-1) s + sqrt(n - (n-1) s^2)) / n
/// sqrt(eta1) = (sqrt(n - (n-1) s^2) - s) / n
/// ```
pub fn eve_from_bob<T: Scalar>(b: &BobChannel<T>) -> EveChannel<T> {
    let n = b.n();
    let nn = n.as_scalar::<T>();
    let m = n.wrong::<T>();
    let s = b.ratio().sqrt();
    let disc = (nn - m * s * s).max(T::zero()).sqrt();
    let root0 = (m * s + disc) / nn;
    let root1 = ((disc - s) / nn).max(T::zero());
    EveChannel {
        n,
        eta0: (root0 * root0).min(T::one()),
        eta1: root1 * root1,
    }
}

/// Inverse of [`eve_from_bob`]: the `beta0` whose closed-form Eve channel is `e`.
pub fn bob_from_eve<T: Scalar>(e: &EveChannel<T>) -> T {
    let s = e.eta0().sqrt() - e.eta1().sqrt();
    (T::one() + e.n().wrong::<T>() * s * s).recip()
}

/// Gram matrix of Eve's ancilla states on the diagonal branch: unit diagonal,
/// every off-diagonal entry equal to `1 - beta1/beta0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramMatrix<T> {
    n: Dimension,
    off_diagonal: T,
}

/// Symmetric circulant matrix with only two distinct entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoValueCirculant<T> {
    pub diagonal: T,
    pub off_diagonal: T,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn new(n: Dimension, off_diagonal: T) -> Result<Self> {
        if !(off_diagonal >= T::zero() && off_diagonal <= T::one()) {
            return Err(out_of_range("off_diagonal", off_diagonal, "[0, 1]"));
        }
        Ok(Self { n, off_diagonal })
    }

    pub fn from_bob(b: &BobChannel<T>) -> Self {
        Self {
            n: b.n(),
            off_diagonal: T::one() - b.ratio(),
        }
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn off_diagonal(&self) -> T {
        self.off_diagonal
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        if i == j {
            T::one()
        } else {
            self.off_diagonal
        }
    }

    /// `(1 + (n-1) g, 1 - g)`: the eigenvalue on the all-ones vector, then
    /// the one of multiplicity `n - 1`.
    pub fn eigenvalues(&self) -> (T, T) {
        let g = self.off_diagonal;
        (T::one() + self.n.wrong::<T>() * g, T::one() - g)
    }

    /// Square root of `G / n` (equal priors), built from the spectral
    /// projectors `J/n` and `I - J/n`.
    pub fn weighted_sqrt(&self) -> TwoValueCirculant<T> {
        let nn = self.n.as_scalar::<T>();
        let (lam_ones, lam_rest) = self.eigenvalues();
        let r_ones = (lam_ones.max(T::zero()) / nn).sqrt();
        let r_rest = (lam_rest.max(T::zero()) / nn).sqrt();
        let off = (r_ones - r_rest) / nn;
        TwoValueCirculant {
            diagonal: r_rest + off,
            off_diagonal: off,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.n.as_usize();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Eve's channel from the square-root measurement on her ancilla states.
///
/// With `R = sqrt(G/n)`, the probability of identifying state `k` as `j` is
/// `n * R[j][k]^2` (the factor `n` undoes the prior), so `eta0` comes from
/// the diagonal and `eta1` from an off-diagonal entry.
pub fn srm_eve_oracle<T: Scalar>(b: &BobChannel<T>) -> EveChannel<T> {
    let gram = GramMatrix::from_bob(b);
    let root = gram.weighted_sqrt();
    let nn = b.n().as_scalar::<T>();
    EveChannel {
        n: b.n(),
        eta0: nn * root.diagonal * root.diagonal,
        eta1: nn * root.off_diagonal * root.off_diagonal,
    }
}
