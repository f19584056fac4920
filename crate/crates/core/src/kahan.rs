//! Compensated (Kahan) accumulation.
//!
//! Every floating-point reduction in this crate goes through one of these
//! accumulators so that sums are deterministic for a fixed summation order.

use num_complex::Complex64;

/// Kahan summation accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Kahan accumulator for complex values (independent real/imaginary parts).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn sum_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 1e-16 repeated: naive summation loses the small increments.
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-10)).abs() < 1e-14);
    }

    #[test]
    fn complex_matches_parts() {
        let xs: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let z = KahanComplexSum::sum_iter(xs.iter().copied());
        let re = KahanSum::sum_iter(xs.iter().map(|z| z.re));
        assert_eq!(z.re, re);
    }
}
