//! Quadrature: adaptive Gauss-Kronrod in one dimension, oscillation-aware
//! panel quadrature for highly oscillatory integrands, and tensor-product
//! panels in two dimensions.
//!
//! The oscillatory routines pre-split the interval so each panel carries a
//! bounded phase increment (the caller supplies a bound on the phase rate in
//! cycles per unit length), then apply a fixed 15-point Kronrod rule per
//! panel with compensated accumulation. Panel order is fixed, so results are
//! deterministic and independent of thread count.

use crate::kahan::{KahanComplexSum, KahanSum};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Kronrod-15 abscissae (positive half; node 7 is the center).
#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Kronrod-15 weights matching `XGK15`.
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss-7 weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod evaluation. Returns (kronrod, |kronrod - gauss|).
fn qk15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kr = fc * WGK15[7];
    let mut gauss = fc * WG7[3];
    for j in 0..7 {
        let x = half * XGK15[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kr += (f1 + f2) * WGK15[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG7[j / 2];
        }
    }
    kr *= half;
    gauss *= half;
    (kr, (kr - gauss).norm())
}

/// Adaptive Gauss-Kronrod integration of a complex-valued function.
///
/// Splits the worst interval until the summed error estimate is below
/// `abs_tol` or the interval budget is exhausted.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    const MAX_INTERVALS: usize = 1 << 16;
    let (v, e) = qk15_complex(f, a, b);
    // (neg error, a, b, value) — manual worst-first queue
    let mut heap: Vec<(f64, f64, f64, Complex64)> = vec![(e, a, b, v)];
    let mut total_err = e;
    while total_err > abs_tol && heap.len() < MAX_INTERVALS {
        // pop worst
        let (idx, _) = heap
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .expect("non-empty");
        let (err, ia, ib, _) = heap.swap_remove(idx);
        let mid = 0.5 * (ia + ib);
        if mid <= ia || mid >= ib {
            // interval at floating-point resolution; keep as is
            heap.push((0.0, ia, ib, qk15_complex(f, ia, ib).0));
            total_err -= err;
            continue;
        }
        let (v1, e1) = qk15_complex(f, ia, mid);
        let (v2, e2) = qk15_complex(f, mid, ib);
        heap.push((e1, ia, mid, v1));
        heap.push((e2, mid, ib, v2));
        total_err += e1 + e2 - err;
    }
    if total_err > abs_tol * 100.0 {
        return Err(Error::Accuracy(format!(
            "quadrature did not converge: error estimate {total_err:.3e} > tolerance {abs_tol:.3e}"
        )));
    }
    // fixed order: sort by left endpoint, then Kahan-reduce
    heap.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut acc = KahanComplexSum::new();
    for (_, _, _, v) in &heap {
        acc.add(*v);
    }
    Ok(acc.value())
}

/// Adaptive Gauss-Kronrod integration of a real-valued function.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    Ok(integrate_complex(&g, a, b, abs_tol)?.re)
}

/// Oscillation-aware integration: pre-split `[a, b]` so each panel spans at
/// most `cycles_per_panel` cycles of the integrand's phase (whose rate is
/// bounded by `max_rate` cycles per unit length), refine panels whose
/// Kronrod-Gauss discrepancy is large, and reduce in panel order.
pub fn integrate_oscillatory<F: Fn(f64) -> Complex64 + Sync>(
    f: &F,
    a: f64,
    b: f64,
    max_rate: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    const CYCLES_PER_PANEL: f64 = 2.0;
    let len = b - a;
    if len <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n_panels = ((len * max_rate / CYCLES_PER_PANEL).ceil() as usize).clamp(8, 40_000_000);
    let per_panel_tol = abs_tol / (n_panels as f64).sqrt();
    let step = len / n_panels as f64;
    let results: Vec<(Complex64, f64)> = (0..n_panels)
        .into_par_iter()
        .map(|i| {
            let pa = a + i as f64 * step;
            let pb = if i + 1 == n_panels {
                b
            } else {
                a + (i + 1) as f64 * step
            };
            let (v, e) = qk15_complex(f, pa, pb);
            if e > per_panel_tol {
                // one refinement pass: split into 4
                let mut acc = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for j in 0..4 {
                    let qa = pa + (pb - pa) * j as f64 / 4.0;
                    let qb = pa + (pb - pa) * (j + 1) as f64 / 4.0;
                    let (vj, ej) = qk15_complex(f, qa, qb);
                    acc += vj;
                    err += ej;
                }
                (acc, err)
            } else {
                (v, e)
            }
        })
        .collect();
    let mut acc = KahanComplexSum::new();
    let mut err = KahanSum::new();
    for (v, e) in &results {
        acc.add(*v);
        err.add(*e);
    }
    if err.value() > abs_tol.max(1e-13) * 1e4 {
        return Err(Error::Accuracy(format!(
            "oscillatory quadrature error estimate {:.3e} exceeds budget {:.3e}",
            err.value(),
            abs_tol
        )));
    }
    Ok(acc.value())
}

/// Axis-aligned rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Rect { u0, u1, v0, v1 }
    }
}

/// Tensor-product panel quadrature of `f(u, v)` over `rect`.
///
/// `rate_u`, `rate_v` bound the phase rate (cycles per unit length) along
/// each axis; each panel spans a bounded phase increment in both directions.
/// Panels are processed in parallel by row but reduced in fixed order.
pub fn integrate2d_oscillatory<F: Fn(f64, f64) -> Complex64 + Sync>(
    f: &F,
    rect: Rect,
    rate_u: f64,
    rate_v: f64,
    cycles_per_panel: f64,
) -> Complex64 {
    let lu = rect.u1 - rect.u0;
    let lv = rect.v1 - rect.v0;
    if lu <= 0.0 || lv <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let nu = ((lu * rate_u / cycles_per_panel).ceil() as usize).clamp(4, 200_000);
    let nv = ((lv * rate_v / cycles_per_panel).ceil() as usize).clamp(4, 200_000);
    let du = lu / nu as f64;
    let dv = lv / nv as f64;
    // 15x15 tensor Kronrod per panel
    let row_sums: Vec<Complex64> = (0..nu)
        .into_par_iter()
        .map(|i| {
            let ua = rect.u0 + i as f64 * du;
            let uc = ua + 0.5 * du;
            let uh = 0.5 * du;
            let mut row = KahanComplexSum::new();
            // u-nodes of this strip
            let mut unodes = [0.0f64; 15];
            let mut uw = [0.0f64; 15];
            fill_nodes(uc, uh, &mut unodes, &mut uw);
            for j in 0..nv {
                let va = rect.v0 + j as f64 * dv;
                let vc = va + 0.5 * dv;
                let vh = 0.5 * dv;
                let mut vnodes = [0.0f64; 15];
                let mut vw = [0.0f64; 15];
                fill_nodes(vc, vh, &mut vnodes, &mut vw);
                let mut panel = Complex64::new(0.0, 0.0);
                for (iu, &u) in unodes.iter().enumerate() {
                    let mut inner = Complex64::new(0.0, 0.0);
                    for (iv, &v) in vnodes.iter().enumerate() {
                        inner += f(u, v) * vw[iv];
                    }
                    panel += inner * uw[iu];
                }
                row.add(panel);
            }
            row.value()
        })
        .collect();
    let mut acc = KahanComplexSum::new();
    for v in &row_sums {
        acc.add(*v);
    }
    acc.value()
}

fn fill_nodes(center: f64, half: f64, nodes: &mut [f64; 15], w: &mut [f64; 15]) {
    for j in 0..7 {
        nodes[j] = center - half * XGK15[j];
        nodes[14 - j] = center + half * XGK15[j];
        w[j] = WGK15[j] * half;
        w[14 - j] = WGK15[j] * half;
    }
    nodes[7] = center;
    w[7] = WGK15[7] * half;
}

/// Plain (non-oscillatory) 2-D quadrature on a fixed panel grid, for smooth
/// integrands like `|d^2 a / du dv|`.
pub fn integrate2d<F: Fn(f64, f64) -> f64 + Sync>(f: &F, rect: Rect, panels: usize) -> f64 {
    let g = |u: f64, v: f64| Complex64::new(f(u, v), 0.0);
    let lu = rect.u1 - rect.u0;
    let rate = panels as f64 * 2.0 / lu.max(1e-300);
    integrate2d_oscillatory(&g, rect, rate, rate * lu / (rect.v1 - rect.v0).max(1e-300), 2.0).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e;

    #[test]
    fn smooth_integral() {
        // int_0^1 x^2 = 1/3
        let v = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_fresnel_like() {
        // int_0^1 e(50 x) dx = (e(50) - 1)/(2 pi i 50) = 0
        let v = integrate_oscillatory(&|x| e(50.0 * x), 0.0, 1.0, 50.0, 1e-12).unwrap();
        assert!(v.norm() < 1e-10, "{v}");
        // int_0^1 e(50.25 x) dx
        let v = integrate_oscillatory(&|x| e(50.25 * x), 0.0, 1.0, 51.0, 1e-12).unwrap();
        let exact = (e(50.25) - Complex64::new(1.0, 0.0))
            / Complex64::new(0.0, 2.0 * std::f64::consts::PI * 50.25);
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn adaptive_handles_peak() {
        // sharp bump: int_-1^1 1/(1e-4 + x^2) dx = 2 atan(1e2)/1e-2
        let v = integrate(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-9).unwrap();
        let exact = 2.0 * (1e2f64).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn tensor_2d_separable() {
        // int_[0,1]^2 e(3u) e(4v) = product of two line integrals = 0 for integer freqs
        let v = integrate2d_oscillatory(&|u, v| e(3.0 * u + 4.0 * v), Rect::new(0.0, 1.0, 0.0, 1.0), 4.0, 5.0, 1.0);
        assert!(v.norm() < 1e-12);
        // non-integer: compare against product of 1-D integrals
        let f = |u: f64, v: f64| e(2.5 * u + 1.5 * v);
        let v2 = integrate2d_oscillatory(&f, Rect::new(0.0, 1.0, 0.0, 1.0), 3.0, 2.0, 1.0);
        let iu = integrate_oscillatory(&|u| e(2.5 * u), 0.0, 1.0, 3.0, 1e-13).unwrap();
        let iv = integrate_oscillatory(&|v| e(1.5 * v), 0.0, 1.0, 2.0, 1e-13).unwrap();
        assert!((v2 - iu * iv).norm() < 1e-11);
    }

    #[test]
    fn integrate2d_plain() {
        let v = integrate2d(&|u, v| u * v, Rect::new(0.0, 1.0, 0.0, 2.0), 8);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
