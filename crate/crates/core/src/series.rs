//! Exact integer power series, multiplied by number-theoretic transforms
//! modulo several word-sized primes with Chinese-remainder reconstruction.
//!
//! Coefficients are arbitrary-precision integers. A product first bounds the
//! result coefficients, picks enough NTT primes to cover that bound with a
//! sign bit to spare, convolves the residue images independently (in
//! parallel), and CRT-reconstructs. A schoolbook multiply is provided as an
//! independent oracle.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

/// NTT-friendly primes `p = c * 2^k + 1 < 2^32` (with primitive root).
/// Every prime has 2-adicity >= 23, so transforms up to length 2^23 work.
const NTT_PRIMES: [(u64, u64); 8] = [
    (998_244_353, 3),      // 119 * 2^23 + 1
    (167_772_161, 3),      // 5 * 2^25 + 1
    (469_762_049, 3),      // 7 * 2^26 + 1
    (754_974_721, 11),     // 45 * 2^24 + 1
    (1_224_736_769, 3),    // 73 * 2^24 + 1
    (2_013_265_921, 31),   // 15 * 2^27 + 1
    (2_281_701_377, 3),    // 17 * 2^27 + 1
    (2_113_929_217, 5),    // 63 * 2^25 + 1
];

/// Maximum transform length supported by the prime list.
const MAX_NTT_LEN: usize = 1 << 23;

/// Truncated integer power series; `coeffs[i]` is the coefficient of `q^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerSeries {
    /// Zero series of the given length.
    pub fn zeros(len: usize) -> Self {
        IntegerSeries {
            coeffs: vec![BigInt::zero(); len],
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        IntegerSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntegerSeries {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn set(&mut self, i: usize, v: BigInt) {
        self.coeffs[i] = v;
    }

    /// Truncate (or zero-extend) to length `len`.
    pub fn resized(&self, len: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(len, BigInt::zero());
        IntegerSeries { coeffs: c }
    }

    fn max_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.magnitude().bits())
            .max()
            .unwrap_or(0)
    }

    /// Product truncated to the longer operand's length, computed by NTT+CRT.
    pub fn mul(&self, other: &IntegerSeries) -> Result<IntegerSeries> {
        let out_len = self.len().max(other.len());
        self.mul_to(other, out_len)
    }

    /// Product truncated to `out_len` coefficients, computed by NTT+CRT.
    pub fn mul_to(&self, other: &IntegerSeries, out_len: usize) -> Result<IntegerSeries> {
        if self.is_empty() || other.is_empty() {
            return Ok(IntegerSeries::zeros(out_len));
        }
        let a_len = self.len().min(out_len);
        let b_len = other.len().min(out_len);
        let conv_len = a_len + b_len - 1;
        let mut n = 1usize;
        while n < conv_len {
            n <<= 1;
        }
        if n > MAX_NTT_LEN {
            return Err(Error::Capacity(format!(
                "series product needs transform length {n}, cap is {MAX_NTT_LEN}"
            )));
        }
        // |c_k| <= min(a_len, b_len) * max|a| * max|b|
        let bound_bits =
            self.max_bits() + other.max_bits() + (a_len.min(b_len) as f64).log2().ceil() as u64 + 2;
        let n_primes = NTT_PRIMES
            .iter()
            .scan(0u64, |acc, (p, _)| {
                *acc += 63 - p.leading_zeros() as u64;
                Some(*acc)
            })
            .position(|bits| bits >= bound_bits)
            .map(|i| i + 1)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "coefficient bound of {bound_bits} bits exceeds the CRT prime budget"
                ))
            })?;

        let primes = &NTT_PRIMES[..n_primes];
        let residues: Vec<Vec<u64>> = primes
            .par_iter()
            .map(|&(p, g)| {
                let mut fa = residue_image(&self.coeffs[..a_len], p, n);
                let fb = residue_image(&other.coeffs[..b_len], p, n);
                ntt_convolve_in_place(&mut fa, fb, p, g);
                fa
            })
            .collect();

        // CRT with signed lift, parallel over coefficient blocks
        let moduli: Vec<BigInt> = primes.iter().map(|&(p, _)| BigInt::from(p)).collect();
        let mut modulus = BigInt::from(1);
        let mut prefix = Vec::with_capacity(n_primes);
        for m in &moduli {
            prefix.push(modulus.clone());
            modulus *= m;
        }
        // inverse of prefix[i] mod p_i
        let inv: Vec<u64> = (0..n_primes)
            .map(|i| {
                let p = primes[i].0;
                let m = bigint_mod_u64(&prefix[i], p);
                mod_pow(m, p - 2, p)
            })
            .collect();
        let half = &modulus >> 1;
        let coeffs: Vec<BigInt> = (0..out_len)
            .into_par_iter()
            .map(|k| {
                if k >= conv_len {
                    return BigInt::zero();
                }
                let mut x = BigInt::zero();
                for i in 0..n_primes {
                    let p = primes[i].0;
                    let xi = bigint_mod_u64(&x, p);
                    let ri = residues[i][k];
                    let t = mul_mod(ri + p - xi, inv[i], p);
                    if t != 0 {
                        x += &prefix[i] * BigInt::from(t);
                    }
                }
                if x > half {
                    x -= &modulus;
                }
                x
            })
            .collect();
        Ok(IntegerSeries { coeffs })
    }

    /// Square, truncated to the input length.
    pub fn square(&self) -> Result<IntegerSeries> {
        self.mul_to(self, self.len())
    }

    /// Quadratic-time reference product, truncated to `out_len`.
    pub fn schoolbook_mul(&self, other: &IntegerSeries, out_len: usize) -> IntegerSeries {
        let mut out = vec![BigInt::zero(); out_len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= out_len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= out_len {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntegerSeries { coeffs: out }
    }
}

fn residue_image(coeffs: &[BigInt], p: u64, n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for (i, c) in coeffs.iter().enumerate() {
        out[i] = bigint_mod_u64(c, p);
    }
    out
}

fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    let r = (x % BigInt::from(p)).to_i64().expect("residue fits i64");
    if r < 0 {
        (r + p as i64) as u64
    } else {
        r as u64
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    // p < 2^32 so the product fits in u64... only for reduced operands.
    debug_assert!(p < (1 << 32));
    ((a % p) * (b % p)) % p
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// In-place convolution of the residue images: `a <- a * b (mod q^n - ...)`.
fn ntt_convolve_in_place(a: &mut Vec<u64>, mut b: Vec<u64>, p: u64, g: u64) {
    ntt(a, p, g, false);
    ntt(&mut b, p, g, false);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x = mul_mod(*x, *y, p);
    }
    ntt(a, p, g, true);
}

/// Iterative radix-2 Cooley-Tukey NTT over `Z/p`, length a power of two.
fn ntt(a: &mut [u64], p: u64, g: u64, invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    debug_assert!((p - 1) % n as u64 == 0, "prime 2-adicity too small");
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= n {
        let mut w = mod_pow(g, (p - 1) / len as u64, p);
        if invert {
            w = mod_pow(w, p - 2, p);
        }
        let half = len / 2;
        let mut twiddle = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            twiddle.push(cur);
            cur = mul_mod(cur, w, p);
        }
        for block in a.chunks_exact_mut(len) {
            let (lo, hi) = block.split_at_mut(half);
            for i in 0..half {
                let u = lo[i];
                let v = mul_mod(hi[i], twiddle[i], p);
                lo[i] = if u + v >= p { u + v - p } else { u + v };
                hi[i] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = mod_pow(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = mul_mod(*x, n_inv, p);
        }
    }
}

/// Sparse expansion of `prod_{n>=1} (1 - q^n)^3`: coefficient `(-1)^j (2j+1)`
/// at the triangular index `j(j+1)/2`.
pub fn eta_cubed(len: usize) -> IntegerSeries {
    let mut s = IntegerSeries::zeros(len);
    let mut j = 0u64;
    loop {
        let idx = (j * (j + 1) / 2) as usize;
        if idx >= len {
            break;
        }
        let v = (2 * j + 1) as i64 * if j % 2 == 0 { 1 } else { -1 };
        s.set(idx, BigInt::from(v));
        j += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ntt_matches_schoolbook_small() {
        let a = IntegerSeries::from_i64(&[1, -3, 0, 5, 2, 0, 0, 0]);
        let b = IntegerSeries::from_i64(&[2, 7, -1, 0, 0, 0, 0, 0]);
        let fast = a.mul_to(&b, 8).unwrap();
        let slow = a.schoolbook_mul(&b, 8);
        assert_eq!(fast, slow);
    }

    #[test]
    fn ntt_matches_schoolbook_big_coefficients() {
        // values big enough to need several primes
        let big: Vec<BigInt> = (0..32)
            .map(|i| BigInt::from(i as i64 - 15) * BigInt::from(10u64).pow(25))
            .collect();
        let a = IntegerSeries::from_coeffs(big.clone());
        let b = IntegerSeries::from_coeffs(big);
        let fast = a.mul_to(&b, 32).unwrap();
        let slow = a.schoolbook_mul(&a, 32);
        assert_eq!(fast, slow);
    }

    #[test]
    fn eta_cubed_squares_to_eta6() {
        // prod (1-q^n)^6 = 1 - 6q + 9q^2 + 10q^3 - 30q^4 + 0q^5 + 11q^6 + ...
        let j = eta_cubed(16);
        let j2 = j.square().unwrap();
        let expect = [1i64, -6, 9, 10, -30, 0, 11, 42, 0, -70, 18, -54, 49, 90, 0, -22];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(j2.coeff(i), &BigInt::from(e), "coefficient {i}");
        }
    }

    #[test]
    fn capacity_guard() {
        let a = IntegerSeries::zeros(MAX_NTT_LEN);
        assert!(matches!(a.square(), Err(Error::Capacity(_))));
    }

    #[test]
    fn primes_are_valid() {
        for &(p, g) in &NTT_PRIMES {
            assert!(p < (1 << 32));
            assert_eq!((p - 1) % (1 << 23), 0, "2-adicity of {p}");
            // g generates the full 2-part: g^((p-1)/2) = -1 mod p
            assert_eq!(mod_pow(g, (p - 1) / 2, p), p - 1, "root of {p}");
        }
    }
}
