//! J-Bessel evaluation for integer orders up to several hundred and
//! arguments up to ~10^5, with a slow quadrature oracle.
//!
//! Regimes (thresholds frozen):
//! - ascending series for `x <= max(12, nu/3)`, summed in double-double
//!   precision (the alternating terms can exceed the sum by many orders of
//!   magnitude at large `nu`);
//! - Miller backward recurrence normalized by `J0 + 2 sum J_{2k} = 1` in the
//!   transition region;
//! - Hankel large-argument expansion for `x >= 10 nu^2 + 1000`, with the
//!   phase `x - (2 nu + 1) pi/4` reduced in double-double.

use crate::dd::Dd;
use crate::kahan::KahanSum;
use crate::quad;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Largest supported order; a capacity error beyond this. Generous enough
/// for the normalization identity `J0 + 2 sum J_2k = 1` summed to order
/// `2(x + 50)` at `x = 2000`.
pub const MAX_ORDER: u32 = 4200;

/// Values below this are flushed to signed zero (they are summed against
/// unit-scale terms downstream).
pub const FLUSH_THRESHOLD: f64 = 1e-300;

/// `ln(k!)` table up to `MAX_ORDER + 2`, Kahan-accumulated.
fn ln_factorial(k: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0f64; (MAX_ORDER + 3) as usize];
        let mut acc = KahanSum::new();
        for i in 1..t.len() {
            acc.add((i as f64).ln());
            t[i] = acc.value();
        }
        t
    });
    table[k as usize]
}

/// `J_nu(x)` for integer `nu >= 0`, `x >= 0`.
///
/// Relative accuracy ~1e-10 against the amplitude envelope; values below
/// [`FLUSH_THRESHOLD`] are flushed to zero.
pub fn bessel_j(nu: u32, x: f64) -> Result<f64> {
    if nu > MAX_ORDER {
        return Err(Error::Capacity(format!(
            "order {nu} exceeds the cap {MAX_ORDER}"
        )));
    }
    if x.is_nan() {
        return Err(Error::Domain("NaN argument".into()));
    }
    if x < 0.0 {
        return Err(Error::Domain("argument must be >= 0".into()));
    }
    if x == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    let v = if x <= (nu as f64 / 3.0).max(12.0) {
        series_dd(nu, x)
    } else if x >= 10.0 * (nu as f64) * (nu as f64) + 1000.0 {
        hankel_asymptotic(nu, x)
    } else {
        miller(nu, x)
    };
    Ok(flush(v))
}

#[inline]
fn flush(v: f64) -> f64 {
    if v.abs() < FLUSH_THRESHOLD {
        0.0 * v.signum()
    } else {
        v
    }
}

/// Ascending series in double-double: `sum_j (-1)^j (x/2)^(nu+2j) / (j! (nu+j)!)`.
fn series_dd(nu: u32, x: f64) -> f64 {
    let half = x / 2.0;
    // leading term (x/2)^nu / nu! by iterated dd multiplication
    let mut term = Dd::from_f64(1.0);
    for j in 1..=nu {
        term = term.mul_f64(half).div_f64(j as f64);
        // prevent denormal poison deep below the flush threshold
        if term.hi.abs() < 1e-320 {
            return 0.0;
        }
    }
    let hx2 = Dd::from_f64(half).mul_f64(half);
    let mut sum = term;
    let mut j = 0u32;
    loop {
        j += 1;
        let denom = j as f64 * (nu + j) as f64;
        term = term.mul(hx2).div_f64(denom);
        term = Dd {
            hi: -term.hi,
            lo: -term.lo,
        };
        sum = sum.add(term);
        if term.abs() <= sum.abs() * 1e-24 + 1e-320 || j > 400 {
            break;
        }
    }
    sum.to_f64()
}

/// Miller backward recurrence, normalized by `J0 + 2 sum_{k>=1} J_{2k} = 1`.
fn miller(nu: u32, x: f64) -> f64 {
    let base = (nu as f64).max(x);
    let start = (base + 12.0 * base.cbrt() + 56.0) as usize;
    let start = start + (start & 1); // even start
    let mut jp = 0.0f64; // J_{k+2} (unnormalized)
    let mut jc = 1e-300f64; // J_{k+1}
    let mut norm = 0.0f64; // accumulates J0 + 2 sum J_{2k}
    let mut out = 0.0f64;
    let mut captured = false;
    let inv_x = 1.0 / x;
    // bookkeeping for the seed J_start (even index, negligible magnitude)
    norm += 2.0 * jc;
    for k in (0..start).rev() {
        // J_k = (2(k+1)/x) J_{k+1} - J_{k+2}
        let jm = 2.0 * (k + 1) as f64 * inv_x * jc - jp;
        jp = jc;
        jc = jm;
        if k % 2 == 0 {
            norm += if k == 0 { jc } else { 2.0 * jc };
        }
        if k == nu as usize {
            out = jc;
            captured = true;
        }
        if jc.abs() > 1e250 {
            let s = 1e-250;
            jc *= s;
            jp *= s;
            norm *= s;
            if captured {
                out *= s;
            }
        }
    }
    out / norm
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos(chi) - Q sin(chi))`,
/// `chi = x - (2 nu + 1) pi / 4`.
fn hankel_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * nu as f64 * nu as f64;
    let mut p = KahanSum::new();
    let mut q = KahanSum::new();
    // a_k / x^k with a_k = prod_{j<=k} (mu - (2j-1)^2) / (k 8)
    let mut term = 1.0f64;
    p.add(1.0);
    let mut k = 1u32;
    loop {
        let num = mu - (2.0 * k as f64 - 1.0) * (2.0 * k as f64 - 1.0);
        term *= num / (k as f64 * 8.0 * x);
        let signed = match k % 4 {
            0 => term,
            1 => term,
            2 => -term,
            _ => -term,
        };
        if k % 2 == 1 {
            q.add(signed);
        } else {
            p.add(signed);
        }
        if term.abs() < 1e-18 || k >= 40 {
            break;
        }
        k += 1;
    }
    // chi reduced mod 2 pi in double-double
    let chi = Dd::from_f64(x).sub(Dd::FRAC_PI_4.mul_f64((2 * nu + 1) as f64));
    let cycles = (chi.hi / Dd::TWO_PI.hi).round();
    let red = chi.sub(Dd::TWO_PI.mul_f64(cycles));
    let (s_hi, c_hi) = red.hi.sin_cos();
    // first-order correction for the low part
    let s = s_hi + red.lo * c_hi;
    let c = c_hi - red.lo * s_hi;
    (2.0 / (PI * x)).sqrt() * (c * p.value() - s * q.value())
}

/// Quadrature oracle `(1/pi) int_0^pi cos(nu t - x sin t) dt`.
///
/// Intended for `nu <= 200`, `x <= 5000`; absolute error ~1e-12.
pub fn bessel_j_oracle(nu: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain("argument must be >= 0".into()));
    }
    let f = |t: f64| {
        let phase = nu as f64 * t - x * t.sin();
        num_complex::Complex64::new(phase.cos(), 0.0)
    };
    let rate = (nu as f64 + x) / (2.0 * PI);
    let v = quad::integrate_oscillatory(&f, 0.0, PI, rate.max(1.0), 1e-13)?;
    Ok(v.re / PI)
}

/// Largest argument `x*` with `(x/2)^nu / nu! <= 10^-a` (first-term series
/// bound), guaranteeing `|J_nu(x)| < 10^-a` for all `x <= x*`.
pub fn series_cutoff_x(nu: u32, a: f64) -> f64 {
    debug_assert!(nu >= 1);
    2.0 * ((ln_factorial(nu) - a * std::f64::consts::LN_10) / nu as f64).exp()
}

/// Smallest modulus `c_min = amax / x*` such that for all `c >= c_min` the
/// Bessel factor `J_nu(amax / c)` is below `10^-a`. Used to truncate c-sums.
pub fn truncation_cutoff(nu: u32, a: f64, amax: f64) -> f64 {
    amax / series_cutoff_x(nu, a)
}
