//! Exact integer arithmetic for unimodular bookkeeping.
//!
//! Everything here is carried in arbitrary-precision integers: the
//! accumulated transform `Z`, solution vectors, the extended Euclid
//! step behind the 2x2 unimodular building block, and the fraction-free
//! determinant used to certify `det(Z) = +-1` exactly. Nothing in this
//! module can silently wrap.

use std::fmt;
use std::fs;
use std::ops::{Index, IndexMut};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matcore::{parse_token, RealMatrix};

/// Dense integer matrix with exact entries, column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows[0].as_ref().len();
        let mut out = Self::zeros(m, n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.as_ref().len(), n, "ragged rows");
            for (j, &v) in r.as_ref().iter().enumerate() {
                out[(i, j)] = BigInt::from(v);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let t = self[(i, a)].clone();
            self[(i, a)] = self[(i, b)].clone();
            self[(i, b)] = t;
        }
    }

    /// col_k -= mu * col_i, exactly.
    pub(crate) fn sub_scaled_col(&mut self, k: usize, i: usize, mu: &BigInt) {
        for row in 0..self.rows {
            let d = mu * &self[(row, i)];
            self[(row, k)] -= d;
        }
    }

    /// Right-multiplies columns (c0, c1) by a 2x2 matrix `u`, exactly.
    pub(crate) fn right_mul_col_pair(&mut self, c0: usize, c1: usize, u: &IntMatrix) {
        debug_assert!(u.rows == 2 && u.cols == 2);
        for i in 0..self.rows {
            let a = self[(i, c0)].clone();
            let b = self[(i, c1)].clone();
            self[(i, c0)] = &a * &u[(0, 0)] + &b * &u[(1, 0)];
            self[(i, c1)] = &a * &u[(0, 1)] + &b * &u[(1, 1)];
        }
    }

    /// Replaces columns `col_start..` by their product with `m`, exactly.
    pub(crate) fn right_mul_cols_from(&mut self, col_start: usize, m: &IntMatrix) {
        let w = self.cols - col_start;
        assert_eq!(m.rows, w);
        assert_eq!(m.cols, w);
        for i in 0..self.rows {
            let old: Vec<BigInt> = (0..w).map(|t| self[(i, col_start + t)].clone()).collect();
            for j in 0..w {
                let mut acc = BigInt::zero();
                for (t, o) in old.iter().enumerate() {
                    if !m[(t, j)].is_zero() {
                        acc += o * &m[(t, j)];
                    }
                }
                self[(i, col_start + j)] = acc;
            }
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for t in 0..self.cols {
                if other[(t, j)].is_zero() {
                    continue;
                }
                for i in 0..self.rows {
                    let d = &self[(i, t)] * &other[(t, j)];
                    out[(i, j)] += d;
                }
            }
        }
        out
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![BigInt::zero(); self.rows];
        for (t, vt) in v.iter().enumerate() {
            if vt.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                out[i] += &self[(i, t)] * vt;
            }
        }
        out
    }

    /// Converts to floating point (entries beyond f64 range saturate).
    pub fn to_real(&self) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(i, j)] = self[(i, j)].to_f64().unwrap_or(f64::NAN);
            }
        }
        out
    }

    /// Same text layout as the real-matrix format, entries in full decimal.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let rows: usize = parse_token(tokens.next(), "row count")?;
        let cols: usize = parse_token(tokens.next(), "column count")?;
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix dimensions must be >= 1".into()));
        }
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = parse_token(tokens.next(), "integer entry")?;
            }
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing data after matrix entries".into()));
        }
        Ok(out)
    }

    pub fn write_text_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_text_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>8}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of the extended Euclid algorithm: `a*p + b*q = d = gcd(p, q) > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtGcdResult {
    pub d: BigInt,
    pub a: BigInt,
    pub b: BigInt,
}

/// Extended Euclid with a normalized Bezout pair: `d > 0`, and `a` is the
/// minimal representative (|a| <= |q|/(2d), ties toward nonnegative), which
/// keeps the entries of the derived 2x2 transforms small.
pub fn ext_gcd(p: &BigInt, q: &BigInt) -> Result<ExtGcdResult> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut old_r, mut r) = (p.clone(), q.clone());
    let (mut old_a, mut a) = (BigInt::one(), BigInt::zero());
    let (mut old_b, mut b) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let quot = &old_r / &r;
        let tmp = &old_r - &quot * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_a - &quot * &a;
        old_a = std::mem::replace(&mut a, tmp);
        let tmp = &old_b - &quot * &b;
        old_b = std::mem::replace(&mut b, tmp);
    }
    let (mut d, mut a, mut b) = (old_r, old_a, old_b);
    if d.is_negative() {
        d = -d;
        a = -a;
        b = -b;
    }
    // Shift a into the balanced residue system modulo |q|/d; a tie at
    // exactly modulus/2 stays on the nonnegative side.
    if !q.is_zero() {
        let modulus = q.abs() / &d;
        if modulus > BigInt::one() {
            let mut aa = a.mod_floor(&modulus); // in [0, modulus)
            if &aa + &aa > modulus {
                aa -= &modulus;
            }
            a = aa;
            b = (&d - &a * p) / q;
        }
    }
    Ok(ExtGcdResult { d, a, b })
}

/// The 2x2 unimodular matrix `U = [p/d, -b; q/d, a]` with `det(U) = +1`
/// and `U^{-1} (p, q)^T = (d, 0)^T` where `d = gcd(p, q)`.
pub fn unimodular_from_pair(p: &BigInt, q: &BigInt) -> Result<IntMatrix> {
    let e = ext_gcd(p, q)?;
    let mut u = IntMatrix::zeros(2, 2);
    u[(0, 0)] = p / &e.d;
    u[(0, 1)] = -&e.b;
    u[(1, 0)] = q / &e.d;
    u[(1, 1)] = e.a.clone();
    debug_assert!((&u[(0, 0)] * &u[(1, 1)] - &u[(0, 1)] * &u[(1, 0)]).is_one());
    Ok(u)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(z: &IntMatrix) -> Result<BigInt> {
    if !z.is_square() {
        return Err(Error::NotSquare { rows: z.rows(), cols: z.cols() });
    }
    let n = z.rows();
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| z[(i, j)].clone()).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let num = &m[r][c] * &m[k][k] - &m[r][k] * &m[k][c];
                m[r][c] = num / &prev; // exact by the Bareiss identity
            }
            m[r][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// True iff `z` is square with determinant exactly +1 or -1.
pub fn is_unimodular(z: &IntMatrix) -> bool {
    if !z.is_square() {
        return false;
    }
    match det_exact(z) {
        Ok(d) => d.abs().is_one(),
        Err(_) => false,
    }
}

/// gcd of all entries (0 for an all-zero slice).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}
