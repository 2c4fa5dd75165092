//! Dense real matrices with the factorization tools the reduction
//! algorithms need: Householder QR, Givens row rotations for structured
//! re-triangularization, and a 2-norm condition number via one-sided
//! Jacobi singular values.
//!
//! Storage is column-major (`data[j * rows + i]`); the algorithms in this
//! crate work column by column, so columns are contiguous slices.

use std::fmt;
use std::fs;
use std::ops::{Index, IndexMut};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense real matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from column-major data. All entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ConfigInvalid("matrix dimensions must be >= 1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::ConfigInvalid(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows (the natural reading order of the text format).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::ConfigInvalid("no rows".into()));
        }
        let n = rows[0].as_ref().len();
        let mut out = Self::zeros(m, n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::ConfigInvalid(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    n
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                out[(i, j)] = v;
            }
        }
        Ok(out)
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

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub(crate) fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Euclidean norm of column `j`.
    pub fn col_norm(&self, j: usize) -> f64 {
        self.col(j).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// True when every entry strictly below the diagonal is exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                if self[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for t in 0..self.cols {
                let w = other[(t, j)];
                if w == 0.0 {
                    continue;
                }
                let src = self.col(t).to_vec();
                let dst = out.col_mut(j);
                for i in 0..self.rows {
                    dst[i] += w * src[i];
                }
            }
        }
        out
    }

    /// Copies the half-open block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 < r1 && r1 <= self.rows && c0 < c1 && c1 <= self.cols);
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for j in c0..c1 {
            for i in r0..r1 {
                out[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        out
    }

    /// Overwrites the block with top-left corner (r0, c0) by `m`.
    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Self) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols);
        for j in 0..m.cols {
            for i in 0..m.rows {
                self[(r0 + i, c0 + j)] = m[(i, j)];
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let t = self[(i, a)];
            self[(i, a)] = self[(i, b)];
            self[(i, b)] = t;
        }
    }

    /// Renders the shared plain-text format: a `rows cols` header line,
    /// then one line per row with 17 significant digits per entry.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|j| format!("{:.16e}", self[(i, j)])).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the plain-text format accepted by [`RealMatrix::to_text`].
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
                let v: f64 = parse_token(tokens.next(), "matrix entry")?;
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                out[(i, j)] = v;
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

pub(crate) fn parse_token<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("invalid {what}: {tok:?}")))
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Display for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>12.4}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A 2x2 rotation acting on rows `i` and `j`:
/// row_i <- c*row_i + s*row_j, row_j <- -s*row_i + c*row_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: f64,
    pub i: usize,
    pub j: usize,
}

impl GivensRotation {
    /// Retargets the rotation at a different row pair.
    pub fn on_rows(mut self, i: usize, j: usize) -> Self {
        self.i = i;
        self.j = j;
        self
    }
}

/// Rotation zeroing the second component of (a, b); returns the rotation
/// (acting on rows 0 and 1 by default) and r with |r| = sqrt(a^2 + b^2).
pub fn givens(a: f64, b: f64) -> Result<(GivensRotation, f64)> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite);
    }
    if a == 0.0 && b == 0.0 {
        return Err(Error::DegenerateInput);
    }
    let (c, s, r) = if b == 0.0 {
        (1.0, 0.0, a)
    } else {
        let r = a.hypot(b);
        (a / r, b / r, r)
    };
    Ok((GivensRotation { c, s, i: 0, j: 1 }, r))
}

/// Applies `g` to rows `g.i`, `g.j` of `R` from column `col_start` onward.
///
/// When the rotation annihilates the leading pair (it was computed from the
/// entries at `col_start`), the rotated entry at `(g.j, col_start)` is
/// assigned exactly 0 instead of keeping the rounding residue, so the matrix
/// stays structurally triangular.
pub fn apply_givens_rows(r: &RealMatrix, g: &GivensRotation, col_start: usize) -> Result<RealMatrix> {
    if g.i >= r.rows() || g.j >= r.rows() || g.i == g.j {
        return Err(Error::IndexOutOfRange(format!("rows ({}, {})", g.i, g.j)));
    }
    if col_start > r.cols() {
        return Err(Error::IndexOutOfRange(format!("column {}", col_start)));
    }
    let mut out = r.clone();
    rotate_rows_in_place(&mut out, g, col_start);
    Ok(out)
}

pub(crate) fn rotate_rows_in_place(r: &mut RealMatrix, g: &GivensRotation, col_start: usize) {
    let (c, s) = (g.c, g.s);
    let lead = if col_start < r.cols() {
        Some((r[(g.i, col_start)], r[(g.j, col_start)]))
    } else {
        None
    };
    for col in col_start..r.cols() {
        let t1 = r[(g.i, col)];
        let t2 = r[(g.j, col)];
        r[(g.i, col)] = c * t1 + s * t2;
        r[(g.j, col)] = -s * t1 + c * t2;
    }
    if let Some((a, b)) = lead {
        // Snap the annihilated entry to an exact zero.
        if r[(g.j, col_start)].abs() <= 1e-14 * (a.abs() + b.abs()) {
            r[(g.j, col_start)] = 0.0;
        }
    }
}

/// Thin QR factorization by Householder reflections: `A = Q1 * R` with
/// `Q1` (m x n, orthonormal columns) and `R` (n x n, upper triangular).
/// The diagonal of `R` is not sign-normalized.
pub fn qr_factorize(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::RankDeficient { index: m });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let rank_tol = n as f64 * f64::EPSILON * a.max_abs();

    let mut w = a.clone();
    // Reflectors stored as (v, beta) with H = I - beta v v^T acting on rows j..m.
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);

    for j in 0..n {
        let mut v: Vec<f64> = (j..m).map(|i| w[(i, j)]).collect();
        let normx = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if normx <= rank_tol {
            return Err(Error::RankDeficient { index: j });
        }
        let alpha = if v[0] >= 0.0 { -normx } else { normx };
        v[0] -= alpha;
        let vtv = v.iter().map(|x| x * x).sum::<f64>();
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
        if beta > 0.0 {
            for col in j..n {
                let dot: f64 = (j..m).map(|i| v[i - j] * w[(i, col)]).sum();
                let f = beta * dot;
                for i in j..m {
                    w[(i, col)] -= f * v[i - j];
                }
            }
        }
        w[(j, j)] = alpha;
        for i in (j + 1)..m {
            w[(i, j)] = 0.0;
        }
        reflectors.push((v, beta));
    }

    let mut r = RealMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            r[(i, j)] = w[(i, j)];
        }
    }

    // Accumulate Q1 by applying the reflectors to I(:, 0..n) in reverse.
    let mut q = RealMatrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = 1.0;
    }
    for j in (0..n).rev() {
        let (v, beta) = &reflectors[j];
        if *beta == 0.0 {
            continue;
        }
        for col in 0..n {
            let dot: f64 = (j..m).map(|i| v[i - j] * q[(i, col)]).sum();
            let f = beta * dot;
            for i in j..m {
                q[(i, col)] -= f * v[i - j];
            }
        }
    }
    Ok((q, r))
}

/// Singular values in descending order, by one-sided Jacobi.
pub fn singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut w = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let n = w.cols();
    let m = w.rows();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| w.col_norm(j)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// 2-norm condition number, the ratio of extreme singular values.
pub fn cond2(a: &RealMatrix) -> Result<f64> {
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    if smin < f64::MIN_POSITIVE {
        return Err(Error::RankDeficient { index: sv.len() - 1 });
    }
    Ok(smax / smin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn randn_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut m = RealMatrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = rng.sample(StandardNormal);
            }
        }
        m
    }

    fn max_abs_diff(a: &RealMatrix, b: &RealMatrix) -> f64 {
        let mut d = 0.0f64;
        for j in 0..a.cols() {
            for i in 0..a.rows() {
                d = d.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        d
    }

    #[test]
    fn qr_identity() {
        let a = RealMatrix::identity(3);
        let (q, r) = qr_factorize(&a).unwrap();
        // Householder flips the sign of each pivot column; magnitudes are exact.
        for i in 0..3 {
            assert_eq!(r[(i, i)].abs(), 1.0);
            assert_eq!(q[(i, i)], r[(i, i)]);
        }
        assert!(max_abs_diff(&q.matmul(&r), &a) == 0.0);
    }

    #[test]
    fn qr_reconstruction_and_orthogonality() {
        let a = randn_matrix(4, 3, 42);
        let (q, r) = qr_factorize(&a).unwrap();
        assert!(r.is_upper_triangular());
        let resid = max_abs_diff(&q.matmul(&r), &a);
        assert!(resid <= 1e-12 * a.frobenius_norm(), "residual {resid}");
        let qtq = q.transpose().matmul(&q);
        let orth = max_abs_diff(&qtq, &RealMatrix::identity(3));
        assert!(orth <= 1e-12, "orthogonality defect {orth}");
    }

    #[test]
    fn qr_of_triangular_matches_up_to_signs() {
        let a = crate::bench::paper_example();
        let (_, r) = qr_factorize(&a).unwrap();
        for j in 0..5 {
            for i in 0..=j {
                assert!((r[(i, j)].abs() - a[(i, j)].abs()).abs() <= 1e-12 * a.max_abs());
            }
        }
    }

    #[test]
    fn qr_rejects_rank_deficient() {
        let a = RealMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(qr_factorize(&a), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn givens_examples() {
        let (g, r) = givens(1.0, 0.0).unwrap();
        assert_eq!((g.c, g.s, r), (1.0, 0.0, 1.0));

        let (g, r) = givens(0.0, 1.0).unwrap();
        assert_eq!(r.abs(), 1.0);
        // Applying g to (0, 1) yields (r, 0) with the second component exact.
        assert_eq!(g.c * 0.0 + g.s * 1.0, r);
        assert_eq!(-g.s * 0.0 + g.c * 1.0, 0.0);

        let (_, r) = givens(3.0, 4.0).unwrap();
        assert!((r.abs() - 5.0).abs() < 1e-15);

        assert!(matches!(givens(0.0, 0.0), Err(Error::DegenerateInput)));
    }

    #[test]
    fn givens_unit_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let (g, _) = givens(a, b).unwrap();
            assert!((g.c * g.c + g.s * g.s - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn apply_givens_identity_rotation_is_noop() {
        let r = randn_matrix(3, 3, 5);
        let g = GivensRotation { c: 1.0, s: 0.0, i: 0, j: 1 };
        let out = apply_givens_rows(&r, &g, 0).unwrap();
        assert_eq!(out, r);
    }

    #[test]
    fn apply_givens_zeroes_target_exactly() {
        let mut r = randn_matrix(3, 3, 6);
        r[(1, 0)] = 0.7;
        let (g, _) = givens(r[(0, 0)], r[(1, 0)]).unwrap();
        let out = apply_givens_rows(&r, &g, 0).unwrap();
        assert_eq!(out[(1, 0)], 0.0);
    }

    #[test]
    fn apply_givens_preserves_column_norms() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = randn_matrix(3, 3, rng.random());
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let (g, _) = givens(a, b).unwrap();
            let g = g.on_rows(0, 2);
            let out = apply_givens_rows(&r, &g, 1).unwrap();
            for j in 1..3 {
                let before = (r[(0, j)].powi(2) + r[(2, j)].powi(2)).sqrt();
                let after = (out[(0, j)].powi(2) + out[(2, j)].powi(2)).sqrt();
                assert!((before - after).abs() <= 1e-13 * before.max(1.0));
            }
            // untouched row unchanged
            for j in 0..3 {
                assert_eq!(out[(1, j)], r[(1, j)]);
            }
        }
    }

    #[test]
    fn cond2_identity_and_diagonal() {
        assert!((cond2(&RealMatrix::identity(5)).unwrap() - 1.0).abs() <= 1e-12);
        let d = RealMatrix::from_rows(&[[10.0, 0.0], [0.0, 0.1]]).unwrap();
        assert!((cond2(&d).unwrap() - 100.0).abs() <= 1e-10);
    }

    #[test]
    fn cond2_paper_example_scale() {
        let a = crate::bench::paper_example();
        let c = cond2(&a).unwrap();
        assert!(c > 1.0e5 / 1.1 && c < 1.0e5 * 1.1, "cond {c}");
    }

    #[test]
    fn cond2_orthogonal_invariance() {
        let a = randn_matrix(5, 5, 17);
        let q = qr_factorize(&randn_matrix(5, 5, 18)).unwrap().0;
        let c1 = cond2(&a).unwrap();
        let c2 = cond2(&q.matmul(&a)).unwrap();
        assert!((c1 - c2).abs() <= 1e-8 * c1);
    }

    #[test]
    fn text_round_trip() {
        let a = randn_matrix(4, 3, 23);
        let b = RealMatrix::from_text(&a.to_text()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(RealMatrix::from_text("2 2\n1 2\n3").is_err());
        assert!(RealMatrix::from_text("2 2\n1 2\n3 4 5").is_err());
        assert!(RealMatrix::from_text("").is_err());
        assert!(RealMatrix::from_text("2 2\n1 2\n3 inf").is_err());
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert!(matches!(
            RealMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
    }
}
