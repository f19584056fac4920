//! Numerical library for resonance sums of holomorphic cusp forms and their
//! double square moments.
//!
//! The crate computes, exactly or to controlled accuracy:
//!
//! - q-expansions and normalized Hecke eigenvalues of eigenforms for
//!   `SL2(Z)` ([`coeffs`]),
//! - Kloosterman sums and related congruence counts ([`arith`]),
//! - J-Bessel functions of large integer order ([`bessel`]),
//! - the smooth cutoffs `phi`, `g0` and the Fourier transform of `g0`
//!   ([`weights`]),
//! - both sides of Petersson's trace formula and the harmonic weights
//!   `2*pi^2 / ((k-1) L(1, Sym^2 f))` ([`petersson`]),
//! - resonance sums `sum lambda(n) e(alpha n^beta) phi(n/X)` and their
//!   empirical peak exponents ([`resonance`]),
//! - the spectral and geometric (Kloosterman/Bessel) evaluations of the
//!   double square moment and its `D00 + D01 + D10 + D11` decomposition
//!   ([`moments`]),
//! - the oscillatory-integral machinery: `V`/`W` transforms, stationary-phase
//!   main terms, two-dimensional derivative tests and the phase algebra
//!   ([`oscillatory`]).
//!
//! # Conventions
//!
//! `e(x)` denotes `exp(2*pi*i*x)` throughout the crate; see [`e`].
//! Everywhere floating-point values are summed, compensated (Kahan)
//! accumulation is used so results are deterministic and independent of
//! thread count.

pub mod arith;
pub mod bessel;
pub mod coeffs;
pub mod dd;
pub mod kahan;
pub mod moments;
pub mod oscillatory;
pub mod petersson;
pub mod quad;
pub mod resonance;
pub mod series;
pub mod weights;

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type. Variants map onto the failure classes of the
/// individual modules (domain/validation problems vs. capacity or accuracy
/// limits), which the CLI translates into exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Requested size exceeds a configured cap.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Target accuracy could not be reached.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Window parameters violate a theorem-regime hypothesis.
    #[error("regime error: violated hypothesis: {0}")]
    Regime(String),
    /// Derivative-test hypothesis failed on the sampled grid.
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    /// Query outside a cached range.
    #[error("range error: {0}")]
    Range(String),
    /// Linear system too ill-conditioned to solve reliably.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// Coefficient table does not cover the requested range.
    #[error("coverage error: {0}")]
    Coverage(String),
    /// Not enough usable data for a fit.
    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `e(x) = exp(2 pi i x)`, the additive character used throughout.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * x).sin_cos();
    Complex64::new(c, s)
}

/// `i^k` for even integer `k` (real-valued: `(-1)^(k/2)`).
#[inline]
pub fn i_pow_even(k: u32) -> f64 {
    debug_assert!(k % 2 == 0);
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_convention() {
        let z = e(0.25);
        assert!((z.re).abs() < 1e-15);
        assert!((z.im - 1.0).abs() < 1e-15);
        // e(1) = 1
        let one = e(1.0);
        assert!((one.re - 1.0).abs() < 1e-15 && one.im.abs() < 1e-12);
    }

    #[test]
    fn i_pow() {
        assert_eq!(i_pow_even(0), 1.0);
        assert_eq!(i_pow_even(2), -1.0);
        assert_eq!(i_pow_even(4), 1.0);
        assert_eq!(i_pow_even(12), 1.0);
        assert_eq!(i_pow_even(18), -1.0);
    }
}
