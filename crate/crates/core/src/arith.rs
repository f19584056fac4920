//! Exact modular arithmetic: Kloosterman sums, congruence-solution counts,
//! divisor utilities.
//!
//! Kloosterman sums are evaluated by the direct `O(c)` loop over units with a
//! per-modulus inverse table and compensated accumulation; desk-scale moduli
//! (c up to ~10^4) keep this both fast and trivially correct.

use crate::kahan::KahanSum;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Modular inverse of `z` mod `c` (`c >= 1`), if `gcd(z, c) = 1`.
///
/// For `c = 1` every residue is a unit and the inverse is 0.
pub fn mod_inverse(z: i64, c: u64) -> Option<u64> {
    if c == 0 {
        return None;
    }
    if c == 1 {
        return Some(0);
    }
    let zr = z.rem_euclid(c as i64) as u64;
    // extended gcd on (zr, c)
    let (mut old_r, mut r) = (zr as i64, c as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(c as i64) as u64)
}

/// Inverse table for units mod `c`: `inv[z] = z^{-1}` or `u32::MAX` for
/// non-units. Shared across batch evaluations at the same modulus.
#[derive(Debug, Clone)]
pub struct UnitInverses {
    pub c: u64,
    inv: Vec<u32>,
}

pub const NON_UNIT: u32 = u32::MAX;

impl UnitInverses {
    pub fn new(c: u64) -> Self {
        assert!(c >= 1 && c <= u32::MAX as u64);
        let n = c as usize;
        let mut inv = vec![NON_UNIT; n.max(1)];
        if c == 1 {
            inv[0] = 0;
            return UnitInverses { c, inv };
        }
        for z in 1..n {
            if inv[z] != NON_UNIT {
                continue;
            }
            if let Some(zi) = mod_inverse(z as i64, c) {
                inv[z] = zi as u32;
                inv[zi as usize] = z as u32;
            }
        }
        UnitInverses { c, inv }
    }

    #[inline]
    pub fn get(&self, z: u64) -> Option<u64> {
        let v = self.inv[z as usize];
        (v != NON_UNIT).then_some(v as u64)
    }

    /// Iterate over `(z, z_inv)` pairs of units mod `c`.
    pub fn units(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.inv
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != NON_UNIT)
            .map(|(z, &v)| (z as u64, v as u64))
    }
}

/// Classical Kloosterman sum `S(m, n, c) = sum_{z unit mod c} e((mz + n z^-1)/c)`,
/// real by the `z <-> -z` pairing; computed with compensated accumulation.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::Domain("Kloosterman modulus must be >= 1".into()));
    }
    let table = UnitInverses::new(c);
    Ok(kloosterman_with_table(m, n, &table))
}

/// `S(m, n, c)` reusing a prebuilt inverse table for `c`.
pub fn kloosterman_with_table(m: i64, n: i64, table: &UnitInverses) -> f64 {
    let c = table.c;
    if c == 1 {
        return 1.0;
    }
    let mr = m.rem_euclid(c as i64) as u64;
    let nr = n.rem_euclid(c as i64) as u64;
    let scale = 2.0 * PI / c as f64;
    let mut acc = KahanSum::new();
    for (z, zi) in table.units() {
        let t = (mr as u128 * z as u128 + nr as u128 * zi as u128) % c as u128;
        acc.add((scale * t as f64).cos());
    }
    acc.value()
}

/// Complex-summed Kloosterman sum; the imaginary part measures how far the
/// finite sum is from real (it vanishes analytically).
pub fn kloosterman_complex(m: i64, n: i64, c: u64) -> Result<(f64, f64)> {
    if c == 0 {
        return Err(Error::Domain("Kloosterman modulus must be >= 1".into()));
    }
    let table = UnitInverses::new(c);
    if c == 1 {
        return Ok((1.0, 0.0));
    }
    let mr = m.rem_euclid(c as i64) as u64;
    let nr = n.rem_euclid(c as i64) as u64;
    let scale = 2.0 * PI / c as f64;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (z, zi) in table.units() {
        let t = (mr as u128 * z as u128 + nr as u128 * zi as u128) % c as u128;
        let (s, cth) = (scale * t as f64).sin_cos();
        re.add(cth);
        im.add(s);
    }
    Ok((re.value(), im.value()))
}

/// Number of divisors of `n`.
pub fn divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Weil bound `d(c) sqrt(c) sqrt(gcd(m, n, c))`.
pub fn weil_bound(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd_u64(
        gcd_u64(m.unsigned_abs() % c.max(1), n.unsigned_abs() % c.max(1)).max(1),
        c,
    );
    divisor_count(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt()
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Count of units `z` mod `c` with `z + z^-1 = 2 eta (mod c)`, `eta = +-1`,
/// by brute force over the unit group.
pub fn count_quadratic_congruence(c: u64, eta: i8) -> Result<u64> {
    if c == 0 {
        return Err(Error::Domain("modulus must be >= 1".into()));
    }
    if c == 1 {
        return Ok(1);
    }
    let table = UnitInverses::new(c);
    let target = (2 * eta as i64).rem_euclid(c as i64) as u64;
    let mut count = 0;
    for (z, zi) in table.units() {
        if (z + zi) % c == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Brute-force count of `(z1, z2, m, n)` with `z1` a unit mod `d c1`, `z2` a
/// unit mod `d c2`, `|m|, |n| <= tau`, and
/// `m = -c2 z1 - c1 z2`, `n = -c2 z1^-1 - c1 z2^-1 (mod c1 c2 d)`.
pub fn count_lattice_solutions(c1: u64, c2: u64, d: u64, tau: f64) -> Result<u64> {
    if c1 == 0 || c2 == 0 || d == 0 {
        return Err(Error::Domain("moduli must be >= 1".into()));
    }
    if num_integer::gcd(c1, c2) != 1 {
        return Err(Error::Domain("c1 and c2 must be coprime".into()));
    }
    if tau <= 0.0 {
        return Err(Error::Domain("tau must be positive".into()));
    }
    let modulus = c1 * c2 * d;
    if modulus > 1 << 22 || d * c1 > 1 << 20 || d * c2 > 1 << 20 {
        return Err(Error::Capacity(format!(
            "combined modulus {modulus} exceeds the brute-force cap"
        )));
    }
    let t1 = UnitInverses::new(d * c1);
    let t2 = UnitInverses::new(d * c2);
    let mi = modulus as i64;
    let tmax = tau.floor() as i64;
    let mut count = 0u64;
    for (z1, z1i) in t1.units() {
        for (z2, z2i) in t2.units() {
            let m0 = (-(c2 as i64) * z1 as i64 - (c1 as i64) * z2 as i64).rem_euclid(mi);
            let n0 = (-(c2 as i64) * z1i as i64 - (c1 as i64) * z2i as i64).rem_euclid(mi);
            count += residues_in_window(m0, mi, tmax) * residues_in_window(n0, mi, tmax);
        }
    }
    Ok(count)
}

/// Number of integers `x = r (mod m)` with `|x| <= t`.
fn residues_in_window(r: i64, m: i64, t: i64) -> u64 {
    // first representative >= -t
    let first = r + (((-t - r).div_euclid(m)) + i64::from((-t - r).rem_euclid(m) != 0)) * m;
    if first > t {
        0
    } else {
        ((t - first) / m + 1) as u64
    }
}

/// Lemma-style upper bound `d (2 tau + 1) (floor(tau / (c1 c2 d)) + 1)` for
/// the lattice count above.
pub fn lattice_count_bound(c1: u64, c2: u64, d: u64, tau: f64) -> f64 {
    d as f64 * (2.0 * tau + 1.0) * ((tau / (c1 * c2 * d) as f64).floor() + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_inverse_basics() {
        assert_eq!(mod_inverse(3, 10), Some(7));
        assert_eq!(mod_inverse(1, 97), Some(1));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(mod_inverse(-3, 10), Some(3)); // (-3)*3 = -9 = 1 mod 10
        for c in 1..200u64 {
            for z in 1..c.min(50) {
                if let Some(zi) = mod_inverse(z as i64, c) {
                    assert_eq!((z * zi) % c, 1 % c);
                }
            }
        }
    }

    #[test]
    fn kloosterman_small_values() {
        assert_eq!(kloosterman(1, 1, 1).unwrap(), 1.0);
        // S(1,1,3): z in {1,2}, z inverse = z: cos(4pi/3)+cos(8pi/3) = -1
        assert!((kloosterman(1, 1, 3).unwrap() - (-1.0)).abs() < 1e-12);
        // S(1,1,2) = cos(2pi * 2/2) = 1
        assert!((kloosterman(1, 1, 2).unwrap() - 1.0).abs() < 1e-12);
        // golden-ratio fixture: S(1,1,15) = -(1+sqrt(5))... = -2.618033988...
        let phi2 = (1.0 + 5f64.sqrt()) / 2.0 + 1.0;
        assert!((kloosterman(1, 1, 15).unwrap() + phi2).abs() < 1e-10);
    }

    #[test]
    fn kloosterman_symmetry() {
        for c in [2u64, 3, 5, 12, 35, 100, 101] {
            for (m, n) in [(1i64, 2i64), (3, 7), (5, 11), (0, 4)] {
                let a = kloosterman(m, n, c).unwrap();
                let b = kloosterman(n, m, c).unwrap();
                assert!((a - b).abs() < 1e-10, "S({m},{n},{c})");
            }
        }
    }

    #[test]
    fn twisted_multiplicativity() {
        // S(m,n,c1 c2) = S(m c2^-1, n c2^-1, c1) S(m c1^-1, n c1^-1, c2)
        for (c1, c2) in [(3u64, 5u64), (4, 9), (7, 8), (11, 13), (25, 27)] {
            for (m, n) in [(1i64, 1i64), (2, 5), (3, 4)] {
                let lhs = kloosterman(m, n, c1 * c2).unwrap();
                let c2inv = mod_inverse(c2 as i64, c1).unwrap() as i64;
                let c1inv = mod_inverse(c1 as i64, c2).unwrap() as i64;
                let rhs = kloosterman(m * c2inv, n * c2inv, c1).unwrap()
                    * kloosterman(m * c1inv, n * c1inv, c2).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!(
                    (lhs - rhs).abs() < 1e-8 * scale,
                    "c1={c1} c2={c2} m={m} n={n}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn realness_and_weil() {
        for c in [2u64, 9, 64, 100, 997, 1000] {
            let (re, im) = kloosterman_complex(2, 3, c).unwrap();
            assert!(im.abs() <= 1e-9 * c as f64, "imag at c={c}");
            assert!(re.abs() <= weil_bound(2, 3, c) + 1e-9, "Weil at c={c}");
        }
    }

    #[test]
    fn quadratic_congruence_counts() {
        assert_eq!(count_quadratic_congruence(1, 1).unwrap(), 1);
        assert_eq!(count_quadratic_congruence(1, -1).unwrap(), 1);
        // c = 4, eta = +1: z in {1,3}: 1+1=2, 3+3=6=2 mod 4: both
        assert_eq!(count_quadratic_congruence(4, 1).unwrap(), 2);
        for c in 1..400u64 {
            for eta in [1i8, -1] {
                let n = count_quadratic_congruence(c, eta).unwrap();
                assert!(
                    (n as f64) <= (c as f64).sqrt() + 1e-9,
                    "count {n} > sqrt({c})"
                );
            }
        }
    }

    #[test]
    fn residue_window_count() {
        // x = 2 mod 5, |x| <= 8: {-8, -3, 2, 7} -> 4
        assert_eq!(residues_in_window(2, 5, 8), 4);
        assert_eq!(residues_in_window(0, 5, 0), 1);
        assert_eq!(residues_in_window(3, 5, 2), 1); // {-2}
        assert_eq!(residues_in_window(4, 9, 3), 0);
    }

    #[test]
    fn lattice_count_respects_bound() {
        for (c1, c2, d, tau) in [
            (1u64, 1u64, 1u64, 0.5f64),
            (2, 3, 1, 6.0),
            (3, 4, 2, 10.0),
            (5, 7, 1, 20.0),
            (1, 1, 3, 4.5),
        ] {
            let n = count_lattice_solutions(c1, c2, d, tau).unwrap();
            let b = lattice_count_bound(c1, c2, d, tau);
            assert!(n as f64 <= b + 1e-9, "({c1},{c2},{d},{tau}): {n} > {b}");
        }
        // degenerate window: only (m,n) = (0,0) possible
        assert!(count_lattice_solutions(1, 1, 1, 0.5).unwrap() <= 2);
    }

    #[test]
    fn lattice_count_brute_force_cross_check() {
        // independent O(everything) enumeration on small cases
        for (c1, c2, d, tau) in [(2u64, 3u64, 1u64, 6.0f64), (3, 5, 2, 4.0), (1, 4, 3, 5.0)] {
            let fast = count_lattice_solutions(c1, c2, d, tau).unwrap();
            let modulus = (c1 * c2 * d) as i64;
            let t1 = UnitInverses::new(d * c1);
            let t2 = UnitInverses::new(d * c2);
            let tm = tau.floor() as i64;
            let mut slow = 0u64;
            for (z1, z1i) in t1.units() {
                for (z2, z2i) in t2.units() {
                    for m in -tm..=tm {
                        for n in -tm..=tm {
                            let okm = (m + (c2 * z1) as i64 + (c1 * z2) as i64)
                                .rem_euclid(modulus)
                                == 0;
                            let okn = (n + (c2 * z1i) as i64 + (c1 * z2i) as i64)
                                .rem_euclid(modulus)
                                == 0;
                            if okm && okn {
                                slow += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(fast, slow, "({c1},{c2},{d},{tau})");
        }
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(9973), 2);
    }
}
