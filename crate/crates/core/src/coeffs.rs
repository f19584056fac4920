//! q-expansions and normalized Hecke eigenvalues of holomorphic Hecke
//! eigenforms for `SL2(Z)`.
//!
//! One-dimensional spaces (k in {12, 16, 18, 20, 22, 26}) are realized as the
//! exact products `Delta * E4^a * E6^b`, with `Delta = q prod (1-q^n)^24`
//! built from three NTT squarings of the sparse eta-cubed expansion. Higher
//! dimensions use the cusp monomial basis `Delta * E4^a * E6^b`
//! (4a + 6b = k - 12), the T_2 action `(T_2 f)(n) = a(2n) + 2^(k-1) a(n/2)`,
//! and floating-point diagonalization; those tables carry a `Floating`
//! precision flag.

use crate::series::{eta_cubed, IntegerSeries};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::io::Write;

/// Default cap on the number of coefficients generated per table.
pub const DEFAULT_MAX_COEFFS: usize = 1 << 21;

/// Whether a coefficient table is exact (integer a(n)) or floating-point
/// (eigenvector of a diagonalized Hecke matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Exact,
    Floating,
}

/// Identifies an eigenform by weight and basis index inside `H_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EigenformId {
    pub weight: u32,
    pub index: usize,
}

/// Fourier coefficients of one normalized Hecke eigenform.
///
/// `a` holds exact integer coefficients (1-based; entry 0 unused) when the
/// eigenspace is rational; `lambda[n] = a(n) / n^((k-1)/2)` always.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub id: EigenformId,
    pub n_max: usize,
    pub a: Option<Vec<BigInt>>,
    pub lambda: Vec<f64>,
    pub precision: Precision,
}

impl CoefficientTable {
    pub fn weight(&self) -> u32 {
        self.id.weight
    }

    /// `lambda_f(n)`, 1-based.
    #[inline]
    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    /// Exact `a_f(n)` if available.
    pub fn a(&self, n: usize) -> Option<&BigInt> {
        self.a.as_ref().map(|a| &a[n])
    }

    /// CSV export: `n,a_n,lambda_n`, integers in decimal, floats with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,a_n,lambda_n")?;
        for n in 1..=self.n_max {
            match &self.a {
                Some(a) => writeln!(w, "{},{},{:.16e}", n, a[n], self.lambda[n])?,
                None => writeln!(w, "{},,{:.16e}", n, self.lambda[n])?,
            }
        }
        Ok(())
    }
}

/// Dimension of the space of cusp forms `S_k(SL2(Z))` for even `k >= 4`
/// (0 for odd or small `k`).
pub fn dim_cusp_forms(k: u32) -> usize {
    if k % 2 != 0 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Coefficients of `Delta = q prod (1-q^n)^24` up to `q^N` (index n holds
/// `tau(n)`; index 0 is zero). Three NTT squarings of the eta-cubed series.
pub fn delta_expansion(n_max: usize) -> Result<IntegerSeries> {
    delta_expansion_capped(n_max, DEFAULT_MAX_COEFFS)
}

/// `delta_expansion` with an explicit memory cap.
pub fn delta_expansion_capped(n_max: usize, cap: usize) -> Result<IntegerSeries> {
    if n_max < 1 {
        return Err(Error::Domain("delta expansion needs N >= 1".into()));
    }
    if n_max > cap {
        return Err(Error::Capacity(format!(
            "requested {n_max} coefficients exceeds the cap of {cap}"
        )));
    }
    let len = n_max; // eta24 needed to exponent n_max - 1
    let j8 = eta_cubed(len).square()?.square()?.square()?;
    let mut out = IntegerSeries::zeros(n_max + 1);
    for i in 0..len {
        out.set(i + 1, j8.coeff(i).clone());
    }
    Ok(out)
}

/// Schoolbook oracle for `prod (1-q^n)^e` up to `q^(len-1)`; exact, O(len^2 e).
pub fn eta_power_schoolbook(e: u32, len: usize) -> IntegerSeries {
    let mut c = vec![BigInt::zero(); len];
    c[0] = BigInt::from(1);
    for n in 1..len {
        for _ in 0..e {
            // multiply by (1 - q^n)
            for i in (n..len).rev() {
                let sub = c[i - n].clone();
                c[i] -= sub;
            }
        }
    }
    IntegerSeries::from_coeffs(c)
}

/// Smallest-prime-factor sieve.
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// `sigma_r(n)` as `u128` via the SPF factorization (valid for r in {3,5},
/// n <= 2^21).
fn sigma_u128(spf: &[u32], mut n: usize, r: u32) -> u128 {
    let mut out: u128 = 1;
    while n > 1 {
        let p = spf[n] as usize;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        // 1 + p^r + ... + p^(re)
        let pr = (p as u128).pow(r);
        let mut term: u128 = 1;
        let mut acc: u128 = 1;
        for _ in 0..e {
            term *= pr;
            acc += term;
        }
        out *= acc;
    }
    out
}

/// Eisenstein series `E4 = 1 + 240 sum sigma_3(n) q^n` or
/// `E6 = 1 - 504 sum sigma_5(n) q^n`, exact, up to `q^N`.
pub fn eisenstein(k: u32, n_max: usize) -> Result<IntegerSeries> {
    let (r, scale): (u32, i64) = match k {
        4 => (3, 240),
        6 => (5, -504),
        _ => {
            return Err(Error::Domain(format!(
                "eisenstein weight must be 4 or 6, got {k}"
            )))
        }
    };
    if n_max > DEFAULT_MAX_COEFFS {
        return Err(Error::Capacity(format!(
            "requested {n_max} coefficients exceeds the cap of {DEFAULT_MAX_COEFFS}"
        )));
    }
    let spf = spf_sieve(n_max);
    let mut s = IntegerSeries::zeros(n_max + 1);
    s.set(0, BigInt::from(1));
    for n in 1..=n_max {
        s.set(n, BigInt::from(scale) * BigInt::from(sigma_u128(&spf, n, r)));
    }
    Ok(s)
}

/// `lambda(n) = a(n) / n^((k-1)/2)` for a 1-based exact coefficient vector.
pub fn normalized_lambda(weight: u32, a: &[BigInt]) -> Vec<f64> {
    let exp = (weight as f64 - 1.0) / 2.0;
    let mut lambda = vec![0.0; a.len()];
    for n in 1..a.len() {
        lambda[n] = bigint_to_f64(&a[n]) / (n as f64).powf(exp);
    }
    lambda
}

/// Fill (or refresh) the `lambda` field of a table from its exact
/// coefficients.
pub fn normalize(table: &mut CoefficientTable) -> Result<()> {
    let a = table
        .a
        .as_ref()
        .ok_or_else(|| Error::Domain("normalize requires exact coefficients".into()))?;
    table.lambda = normalized_lambda(table.id.weight, a);
    Ok(())
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().expect("finite conversion")
}

/// The decomposition `k - 12 = 4a + 6b` used for the one-dimensional spaces.
fn e4_e6_exponents(rem: u32) -> Option<(u32, u32)> {
    // smallest b in {0,1,2} with 4 | rem - 6b
    for b in 0..=2u32 {
        if 6 * b <= rem && (rem - 6 * b) % 4 == 0 {
            return Some(((rem - 6 * b) / 4, b));
        }
    }
    None
}

/// All Hecke eigenforms of weight `k` with coefficients up to `n_max`.
///
/// Dimension 0 gives an empty list; dimension 1 an exact table; dimensions
/// 2 and 3 floating-point tables from T_2 diagonalization. Larger dimensions
/// are a capacity error.
pub fn eigenforms(k: u32, n_max: usize) -> Result<Vec<CoefficientTable>> {
    if k % 2 != 0 || k < 12 {
        return Err(Error::Domain(format!(
            "weight must be even and >= 12, got {k}"
        )));
    }
    let dim = dim_cusp_forms(k);
    if dim == 0 {
        return Ok(Vec::new());
    }
    if dim == 1 {
        let (a4, b6) = e4_e6_exponents(k - 12).expect("k - 12 representable");
        let delta = delta_expansion(n_max)?;
        let mut f = delta;
        for _ in 0..a4 {
            f = f.mul_to(&eisenstein(4, n_max)?, n_max + 1)?;
        }
        for _ in 0..b6 {
            f = f.mul_to(&eisenstein(6, n_max)?, n_max + 1)?;
        }
        let a: Vec<BigInt> = f.coeffs().to_vec();
        debug_assert_eq!(a[1], BigInt::from(1));
        let lambda = normalized_lambda(k, &a);
        return Ok(vec![CoefficientTable {
            id: EigenformId { weight: k, index: 0 },
            n_max,
            a: Some(a),
            lambda,
            precision: Precision::Exact,
        }]);
    }
    if dim > 3 {
        return Err(Error::Capacity(format!(
            "dim S_{k} = {dim} exceeds the supported diagonalization cap of 3"
        )));
    }
    eigenforms_from_t2(k, n_max, dim)
}

/// Cusp monomial basis `Delta * E4^a * E6^b` with `4a + 6b = k - 12`.
fn cusp_monomials(k: u32, n_max: usize) -> Result<Vec<IntegerSeries>> {
    let delta = delta_expansion(n_max)?;
    let e4 = eisenstein(4, n_max)?;
    let e6 = eisenstein(6, n_max)?;
    let rem = k - 12;
    let mut monos = Vec::new();
    let mut b = 0u32;
    while 6 * b <= rem {
        if (rem - 6 * b) % 4 == 0 {
            let a = (rem - 6 * b) / 4;
            let mut f = delta.clone();
            for _ in 0..a {
                f = f.mul_to(&e4, n_max + 1)?;
            }
            for _ in 0..b {
                f = f.mul_to(&e6, n_max + 1)?;
            }
            monos.push(f);
        }
        b += 1;
    }
    Ok(monos)
}

fn eigenforms_from_t2(k: u32, n_max: usize, dim: usize) -> Result<Vec<CoefficientTable>> {
    // need a(2n) up to n = dim for the T_2 matrix
    let basis_len = n_max.max(4 * dim);
    let monos = cusp_monomials(k, basis_len)?;
    if monos.len() != dim {
        return Err(Error::Domain(format!(
            "monomial count {} does not match dim S_{k} = {dim}",
            monos.len()
        )));
    }
    // leading coefficients A[i][j] = coeff of q^(i+1) in mono_j, as f64
    let two_pow = 2f64.powi(k as i32 - 1);
    let mut a_mat = vec![vec![0.0f64; dim]; dim];
    let mut b_mat = vec![vec![0.0f64; dim]; dim];
    for j in 0..dim {
        for i in 0..dim {
            let n = i + 1;
            a_mat[i][j] = bigint_to_f64(monos[j].coeff(n));
            // (T2 g)(n) = a(2n) + 2^(k-1) a(n/2)
            let mut t = bigint_to_f64(monos[j].coeff(2 * n));
            if n % 2 == 0 {
                t += two_pow * bigint_to_f64(monos[j].coeff(n / 2));
            }
            b_mat[i][j] = t;
        }
    }
    // T = A^{-1} B (T_2 in the monomial basis)
    let t_mat = solve_matrix(&a_mat, &b_mat)?;
    let eigvals = real_eigenvalues(&t_mat)?;
    // clustering check
    let scale = eigvals.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1.0);
    for i in 0..dim {
        for j in i + 1..dim {
            if (eigvals[i] - eigvals[j]).abs() < 1e-8 * scale {
                return Err(Error::Accuracy(format!(
                    "T_2 eigenvalues cluster below tolerance at weight {k}"
                )));
            }
        }
    }
    let exp = (k as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(dim);
    for (idx, &ev) in eigvals.iter().enumerate() {
        let w = null_vector(&t_mat, ev)?;
        // normalize so a(1) = sum_j w_j A[0][j] = 1
        let a1: f64 = (0..dim).map(|j| w[j] * a_mat[0][j]).sum();
        if a1.abs() < 1e-12 {
            return Err(Error::Accuracy(format!(
                "degenerate eigenvector normalization at weight {k}"
            )));
        }
        let w: Vec<f64> = w.iter().map(|x| x / a1).collect();
        let mut lambda = vec![0.0f64; n_max + 1];
        for n in 1..=n_max {
            let norm = (n as f64).powf(exp);
            let mut acc = 0.0;
            for j in 0..dim {
                acc += w[j] * bigint_to_f64(monos[j].coeff(n));
            }
            lambda[n] = acc / norm;
        }
        out.push(CoefficientTable {
            id: EigenformId { weight: k, index: idx },
            n_max,
            a: None,
            lambda,
            precision: Precision::Floating,
        });
    }
    // deterministic order: by T_2 eigenvalue
    out.sort_by(|x, y| {
        let lx = x.lambda[2];
        let ly = y.lambda[2];
        lx.total_cmp(&ly)
    });
    for (i, t) in out.iter_mut().enumerate() {
        t.id.index = i;
    }
    Ok(out)
}

/// Solve `A X = B` for small dense systems by Gaussian elimination with
/// partial pivoting.
fn solve_matrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend_from_slice(&b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        if aug[piv][col].abs() < 1e-300 {
            return Err(Error::Conditioning("singular leading-coefficient matrix".into()));
        }
        aug.swap(col, piv);
        let d = aug[col][col];
        for j in col..n + m {
            aug[col][j] /= d;
        }
        for i in 0..n {
            if i != col && aug[i][col] != 0.0 {
                let f = aug[i][col];
                for j in col..n + m {
                    aug[i][j] -= f * aug[col][j];
                }
            }
        }
    }
    Ok((0..n).map(|i| aug[i][n..].to_vec()).collect())
}

/// Real eigenvalues of a 1x1, 2x2 or 3x3 matrix (Hecke matrices are
/// diagonalizable with real spectrum).
fn real_eigenvalues(t: &[Vec<f64>]) -> Result<Vec<f64>> {
    match t.len() {
        1 => Ok(vec![t[0][0]]),
        2 => {
            let tr = t[0][0] + t[1][1];
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            let disc = tr * tr / 4.0 - det;
            if disc < 0.0 {
                return Err(Error::Accuracy("complex T_2 eigenvalues".into()));
            }
            let s = disc.sqrt();
            Ok(vec![tr / 2.0 - s, tr / 2.0 + s])
        }
        3 => {
            // characteristic polynomial x^3 - c2 x^2 + c1 x - c0
            let c2 = t[0][0] + t[1][1] + t[2][2];
            let c1 = t[0][0] * t[1][1] - t[0][1] * t[1][0] + t[0][0] * t[2][2]
                - t[0][2] * t[2][0]
                + t[1][1] * t[2][2]
                - t[1][2] * t[2][1];
            let c0 = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1])
                - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
                + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
            // depressed cubic y^3 + p y + q with x = y + c2/3
            let shift = c2 / 3.0;
            let p = c1 - c2 * c2 / 3.0;
            let q = -c0 + c1 * shift - 2.0 * shift * shift * shift;
            // trig solution (three real roots expected)
            let m = (-p / 3.0).max(0.0);
            let s = 2.0 * m.sqrt();
            if s == 0.0 {
                return Ok(vec![shift; 3]);
            }
            let arg = (3.0 * -q / (p * s)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            let mut roots: Vec<f64> = (0..3)
                .map(|i| s * (theta - 2.0 * std::f64::consts::PI * i as f64 / 3.0).cos() + shift)
                .collect();
            // Newton polish
            for r in roots.iter_mut() {
                for _ in 0..3 {
                    let f = ((*r - c2) * *r + c1) * *r - c0;
                    let df = (3.0 * *r - 2.0 * c2) * *r + c1;
                    if df != 0.0 {
                        *r -= f / df;
                    }
                }
            }
            roots.sort_by(f64::total_cmp);
            Ok(roots)
        }
        n => Err(Error::Capacity(format!("eigen solver supports dim <= 3, got {n}"))),
    }
}

/// Unit-scale null vector of `T - ev I` for dim <= 3.
fn null_vector(t: &[Vec<f64>], ev: f64) -> Result<Vec<f64>> {
    let n = t.len();
    let m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| t[i][j] - if i == j { ev } else { 0.0 })
                .collect()
        })
        .collect();
    match n {
        1 => Ok(vec![1.0]),
        2 => {
            // pick the row with the larger norm
            let r0: f64 = m[0].iter().map(|x| x * x).sum();
            let r1: f64 = m[1].iter().map(|x| x * x).sum();
            let row = if r0 >= r1 { &m[0] } else { &m[1] };
            let v = vec![-row[1], row[0]];
            let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if norm < 1e-300 {
                return Err(Error::Accuracy("null space extraction failed".into()));
            }
            Ok(v.into_iter().map(|x| x / norm).collect())
        }
        3 => {
            // cross product of the two most independent rows
            let mut best: Option<(f64, Vec<f64>)> = None;
            for i in 0..3 {
                for j in i + 1..3 {
                    let c = cross(&m[i], &m[j]);
                    let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                    if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
                        best = Some((norm, c));
                    }
                }
            }
            let (norm, c) = best.unwrap();
            if norm < 1e-300 {
                return Err(Error::Accuracy("null space extraction failed".into()));
            }
            Ok(c.into_iter().map(|x| x / norm).collect())
        }
        _ => unreachable!(),
    }
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
