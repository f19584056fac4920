//! The smooth weights of the resonance/moment sums: the cutoff `phi`
//! supported in (1,2), the test function `g0` supported in (-1,1) with
//! `g0(0) = 1`, their derivatives up to order 4, and the Fourier transform
//! `g0hat(y) = int g0(t) e(-yt) dt` on a cached uniform grid.
//!
//! Both bumps are instances of `exp(-1/s(t))` with a quadratic `s`:
//! `phi` uses `s = (t-1)(2-t)`; `g0(t) = exp(-t^2/(1-t^2)) = e * exp(-1/w)`
//! with `w = 1 - t^2`. Derivatives come from the closed-form chain rule.
//!
//! The transform cache is built once over `[-200, 200]` on a dyadic grid
//! (step 1/256) by an FFT-accelerated trapezoid sum: for a compactly
//! supported C-infinity integrand, the trapezoid rule on step 1/2048 is
//! exact to far below 1e-15 by Poisson summation (the nearest alias sits at
//! |y| ~ 2048 where the transform has decayed past 1e-50). An adaptive
//! quadrature evaluator is kept alongside as an independent oracle.

use crate::kahan::KahanSum;
use crate::quad;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Derivative order cap for the bump evaluations.
pub const MAX_DERIV_ORDER: usize = 4;

/// Derivatives (orders 0..=4) of `exp(-1/s)` given `s, s', s''` of a
/// quadratic `s` (so `s''' = 0`), at a point where `s > 0`.
fn bump_derivs(s: f64, s1: f64, s2: f64) -> [f64; 5] {
    let f = (-1.0 / s).exp();
    // h = -1/s
    let s_2 = s * s;
    let s_3 = s_2 * s;
    let s_4 = s_3 * s;
    let s_5 = s_4 * s;
    let h1 = s1 / s_2;
    let h2 = s2 / s_2 - 2.0 * s1 * s1 / s_3;
    let h3 = 6.0 * s1 * s1 * s1 / s_4 - 6.0 * s * s1 * s2 / s_4;
    let h4 = -24.0 * s1.powi(4) / s_5 + 36.0 * s * s1 * s1 * s2 / s_5 - 6.0 * s_2 * s2 * s2 / s_5;
    // Faa di Bruno for exp(h)
    let d0 = f;
    let d1 = h1 * f;
    let d2 = (h2 + h1 * h1) * f;
    let d3 = (h3 + 3.0 * h1 * h2 + h1 * h1 * h1) * f;
    let d4 = (h4 + 4.0 * h1 * h3 + 3.0 * h2 * h2 + 6.0 * h1 * h1 * h2 + h1.powi(4)) * f;
    [d0, d1, d2, d3, d4]
}

/// The cutoff `phi(t) = exp(-1/((t-1)(2-t)))` on (1,2), zero outside;
/// `order <= 4` selects the derivative.
pub fn phi(t: f64, order: usize) -> f64 {
    assert!(order <= MAX_DERIV_ORDER, "derivative order cap is 4");
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let s = (t - 1.0) * (2.0 - t);
    let s1 = 3.0 - 2.0 * t;
    bump_derivs(s, s1, -2.0)[order]
}

/// The test function `g0(t) = exp(-t^2/(1-t^2))` on (-1,1), zero outside;
/// `g0(0) = 1`, non-negative, even.
pub fn g0(t: f64, order: usize) -> f64 {
    assert!(order <= MAX_DERIV_ORDER, "derivative order cap is 4");
    if t <= -1.0 || t >= 1.0 {
        return 0.0;
    }
    // g0 = e * exp(-1/w), w = 1 - t^2
    let w = 1.0 - t * t;
    let d = bump_derivs(w, -2.0 * t, -2.0);
    d[order] * std::f64::consts::E
}

/// Direct adaptive-quadrature evaluation of `g0hat^(order)(y)`,
/// `order <= 2`; the independent oracle for the cached grid.
pub fn g0_hat_quad(y: f64, order: usize) -> Result<f64> {
    if order > 2 {
        return Err(Error::Domain("transform derivative order cap is 2".into()));
    }
    let f = move |t: f64| -> Complex64 {
        let w = match order {
            0 => Complex64::new(g0(t, 0), 0.0),
            1 => Complex64::new(0.0, -2.0 * PI * t) * g0(t, 0),
            _ => Complex64::new(-4.0 * PI * PI * t * t, 0.0) * g0(t, 0),
        };
        w * crate::e(-y * t)
    };
    let v = quad::integrate_oscillatory(&f, -1.0, 1.0, y.abs().max(1.0), 1e-12)?;
    Ok(v.re)
}

/// Cached uniform grid of `g0hat` and its first two derivatives with
/// 6-point interpolation. Read-only after construction.
#[derive(Debug)]
pub struct G0Transform {
    step: f64,
    y_max: f64,
    values: [Vec<f64>; 3],
}

/// t-sampling step of the trapezoid/FFT build.
const BUILD_DELTA: f64 = 1.0 / 2048.0;
/// Grid step of the cache (dyadic so queries hit exact nodes often).
const GRID_STEP: f64 = 1.0 / 256.0;
/// Default cached range.
pub const DEFAULT_RANGE: f64 = 200.0;

impl G0Transform {
    /// Build the cache over `[-y_max, y_max]` (default 200).
    pub fn new(y_max: f64) -> Result<Self> {
        if !(1.0..=1000.0).contains(&y_max) {
            return Err(Error::Domain("cache range must lie in [1, 1000]".into()));
        }
        // FFT length: frequency resolution 1/(delta*n) = GRID_STEP
        let n = ((1.0 / (BUILD_DELTA * GRID_STEP)) as usize).next_power_of_two();
        debug_assert_eq!(1.0 / (BUILD_DELTA * n as f64), GRID_STEP);
        let n_keep = (y_max / GRID_STEP) as usize + 8;
        if n_keep >= n / 2 {
            return Err(Error::Domain(
                "cache range too large for the build length".into(),
            ));
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let mut values: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (order, out) in values.iter_mut().enumerate() {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            // samples at t = m * delta, wrapped negative indices
            let m_max = (1.0 / BUILD_DELTA) as i64; // support |t| < 1
            for m in -(m_max - 1)..m_max {
                let t = m as f64 * BUILD_DELTA;
                let g = g0(t, 0);
                if g == 0.0 {
                    continue;
                }
                let w = match order {
                    0 => Complex64::new(g, 0.0),
                    1 => Complex64::new(0.0, -2.0 * PI * t) * g,
                    _ => Complex64::new(-4.0 * PI * PI * t * t, 0.0) * g,
                };
                let idx = m.rem_euclid(n as i64) as usize;
                buf[idx] = w;
            }
            fft.process(&mut buf);
            let mut vals = Vec::with_capacity(n_keep + 1);
            for item in buf.iter().take(n_keep + 1) {
                let z = item * BUILD_DELTA;
                debug_assert!(z.im.abs() < 1e-10, "transform should be real");
                vals.push(z.re);
            }
            *out = vals;
        }
        Ok(G0Transform {
            step: GRID_STEP,
            y_max,
            values,
        })
    }

    /// Build over the default range `[-200, 200]`.
    pub fn standard() -> Result<Self> {
        Self::new(DEFAULT_RANGE)
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    /// `g0hat^(order)(y)` by 6-point interpolation on the cached grid.
    ///
    /// `g0hat` is real and even; odd-order derivatives are odd.
    pub fn eval(&self, y: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::Domain("transform derivative order cap is 2".into()));
        }
        let ay = y.abs();
        if ay > self.y_max {
            return Err(Error::Range(format!(
                "|y| = {ay} outside cached range {}",
                self.y_max
            )));
        }
        let sign = if order == 1 && y < 0.0 { -1.0 } else { 1.0 };
        let grid = &self.values[order];
        let pos = ay / self.step;
        let i0 = ((pos as isize) - 2).clamp(0, grid.len() as isize - 6) as usize;
        // 6-point Lagrange interpolation
        let mut acc = 0.0;
        for (j, &gj) in grid[i0..i0 + 6].iter().enumerate() {
            let xj = (i0 + j) as f64;
            let mut w = 1.0;
            for l in 0..6 {
                if l != j {
                    let xl = (i0 + l) as f64;
                    w *= (pos - xl) / (xj - xl);
                }
            }
            acc += w * gj;
        }
        Ok(sign * acc)
    }

    /// Largest grid point where `|g0hat|` still exceeds `threshold`.
    pub fn support_radius(&self, threshold: f64) -> f64 {
        let grid = &self.values[0];
        for i in (0..grid.len()).rev() {
            if grid[i].abs() > threshold {
                return i as f64 * self.step;
            }
        }
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_deriv(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(1.0, 0), 0.0);
        assert_eq!(phi(2.0, 0), 0.0);
        assert_eq!(phi(0.5, 2), 0.0);
        // phi(1.5) = exp(-4): s = 0.25
        assert!((phi(1.5, 0) - (-4.0f64).exp()).abs() < 1e-16);
        assert!(phi(1.0 + 1e-9, 0) >= 0.0);
    }

    #[test]
    fn g0_values() {
        assert_eq!(g0(0.0, 0), 1.0);
        assert_eq!(g0(1.0, 0), 0.0);
        assert_eq!(g0(-1.0, 0), 0.0);
        assert!((g0(0.5, 0) - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        // even, non-negative
        for t in [-0.9, -0.41, 0.17, 0.8] {
            assert!((g0(t, 0) - g0(-t, 0)).abs() < 1e-16);
            assert!(g0(t, 0) >= 0.0);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for t in [1.1, 1.37, 1.5, 1.72, 1.9] {
            for ord in 1..=4usize {
                let f = move |x: f64| phi(x, ord - 1);
                let fd = fd_deriv(&f, t, 1e-6);
                let cf = phi(t, ord);
                let scale = cf.abs().max(1e-8);
                assert!(
                    (fd - cf).abs() < 2e-3 * scale,
                    "phi^({ord})({t}): fd {fd} vs {cf}"
                );
            }
        }
        for t in [-0.8, -0.33, 0.0, 0.41, 0.77] {
            for ord in 1..=4usize {
                let f = move |x: f64| g0(x, ord - 1);
                let fd = fd_deriv(&f, t, 1e-6);
                let cf = g0(t, ord);
                let scale = cf.abs().max(1e-8);
                assert!(
                    (fd - cf).abs() < 2e-3 * scale,
                    "g0^({ord})({t}): fd {fd} vs {cf}"
                );
            }
        }
    }

    #[test]
    fn derivatives_vanish_at_support_ends() {
        for ord in 0..=4usize {
            assert!(phi(1.0 + 1e-7, ord).abs() < 1e-100);
            assert!(phi(2.0 - 1e-7, ord).abs() < 1e-100);
            assert!(g0(1.0 - 1e-7, ord).abs() < 1e-100);
        }
    }

    #[test]
    fn transform_cache_against_quadrature() {
        let t = G0Transform::new(40.0).unwrap();
        // g0hat(0) = int g0 = 1.2069003224378763 (two independent methods)
        let v0 = t.eval(0.0, 0).unwrap();
        assert!((v0 - 1.2069003224378763).abs() < 1e-12, "{v0}");
        let q0 = g0_hat_quad(0.0, 0).unwrap();
        assert!((v0 - q0).abs() < 1e-10);
        for y in [0.3, 1.0, 2.7, 5.0, 11.25, 24.6] {
            for ord in 0..=2usize {
                let a = t.eval(y, ord).unwrap();
                let b = g0_hat_quad(y, ord).unwrap();
                assert!(
                    (a - b).abs() < 1e-9,
                    "order {ord} at y={y}: cache {a} vs quad {b}"
                );
            }
        }
    }

    #[test]
    fn transform_symmetries() {
        let t = G0Transform::new(20.0).unwrap();
        for y in [0.4, 1.9, 7.3] {
            assert_eq!(t.eval(y, 0).unwrap(), t.eval(-y, 0).unwrap());
            assert_eq!(t.eval(y, 1).unwrap(), -t.eval(-y, 1).unwrap());
            assert_eq!(t.eval(y, 2).unwrap(), t.eval(-y, 2).unwrap());
        }
        // odd derivative vanishes at 0
        assert!(t.eval(0.0, 1).unwrap().abs() < 1e-13);
        // range error beyond the cache
        assert!(matches!(t.eval(20.5, 0), Err(Error::Range(_))));
    }

    #[test]
    fn parseval() {
        // int |g0|^2 dt = int |g0hat|^2 dy (transform on the full line)
        let t = G0Transform::standard().unwrap();
        let lhs = quad::integrate(&|x: f64| g0(x, 0).powi(2), -1.0, 1.0, 1e-12).unwrap();
        // right side by trapezoid over the cached grid (integrand smooth, decaying)
        let mut acc = KahanSum::new();
        let n = (t.y_max / t.step) as usize;
        for i in 0..=n {
            let w = if i == 0 { 0.5 } else { 1.0 };
            let v = t.values[0][i];
            acc.add(w * v * v);
        }
        let rhs = 2.0 * acc.value() * t.step;
        assert!((lhs - rhs).abs() < 1e-6 * lhs, "Parseval: {lhs} vs {rhs}");
    }

    #[test]
    fn support_radius_monotone() {
        let t = G0Transform::standard().unwrap();
        let r10 = t.support_radius(1e-10);
        let r16 = t.support_radius(1e-16);
        assert!(r10 > 10.0 && r10 < r16);
        assert!(r16 <= t.y_max());
    }
}
