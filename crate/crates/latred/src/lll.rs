//! LLL reduction of an upper-triangular factor.
//!
//! The reduction rewrites `R` as `Qbar^T R Z = Rbar` where `Z` is kept
//! exactly (arbitrary-precision integers) and `Rbar` satisfies the
//! size-reduced and Lovasz conditions. The orthogonal factor is never
//! formed; swaps are re-triangularized by Givens rotations on the spot.

use num_bigint::BigInt;
use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::intlat::IntMatrix;
use crate::matcore::{cond2, givens, rotate_rows_in_place, RealMatrix};

/// Relative slack applied to the Lovasz test inside the reduction loop.
/// A swap happens only on a clear violation, which prevents swap cycling
/// at delta = 1 where the textbook termination argument does not apply.
pub(crate) const LOVASZ_SLACK: f64 = 1e-12;

/// Relative tolerance of the reduction predicates. Strictly looser than
/// [`LOVASZ_SLACK`], so reducer output always passes the predicates.
pub(crate) const PREDICATE_TOL: f64 = 1e-10;

/// The triple produced by [`lll_reduce`]: upper-triangular `r_bar`,
/// exactly unimodular `z`, and the `delta` the conditions were checked at.
#[derive(Debug, Clone)]
pub struct QrzFactorization {
    pub r_bar: RealMatrix,
    pub z: IntMatrix,
    pub delta: f64,
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.25 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta { delta })
    }
}

fn check_square_upper(r: &RealMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(Error::NotSquare { rows: r.rows(), cols: r.cols() });
    }
    if !r.is_upper_triangular() {
        return Err(Error::ConfigInvalid("matrix must be upper triangular".into()));
    }
    Ok(())
}

fn first_zero_diagonal(r: &RealMatrix) -> Option<usize> {
    (0..r.cols()).find(|&i| r[(i, i)] == 0.0)
}

/// Size-reduces column `k` against rows `from_row..=0`, mirroring every
/// column operation on `z` exactly.
pub(crate) fn size_reduce_col(
    r: &mut RealMatrix,
    z: &mut IntMatrix,
    k: usize,
    from_row: usize,
) -> Result<()> {
    for i in (0..=from_row).rev() {
        let mu = (r[(i, k)] / r[(i, i)]).round(); // half away from zero
        if mu == 0.0 {
            continue;
        }
        let mu_int = BigInt::from_f64(mu).ok_or(Error::NonFinite)?;
        for row in 0..=i {
            let d = mu * r[(row, i)];
            r[(row, k)] -= d;
        }
        z.sub_scaled_col(k, i, &mu_int);
    }
    Ok(())
}

pub(crate) fn size_reduce_in_place(r: &mut RealMatrix, z: &mut IntMatrix) -> Result<()> {
    for k in 1..r.cols() {
        size_reduce_col(r, z, k, k - 1)?;
    }
    Ok(())
}

/// Applies integer column operations until `|r_ik| <= |r_ii|/2` for all
/// `i < k`. Returns the transformed pair; the lattice is unchanged.
pub fn size_reduce(r: &RealMatrix, z: &IntMatrix) -> Result<(RealMatrix, IntMatrix)> {
    check_square_upper(r)?;
    if let Some(index) = first_zero_diagonal(r) {
        return Err(Error::ZeroDiagonal { index });
    }
    if z.cols() != r.cols() {
        return Err(Error::ConfigInvalid("Z has a different column count than R".into()));
    }
    let mut r2 = r.clone();
    let mut z2 = z.clone();
    size_reduce_in_place(&mut r2, &mut z2)?;
    Ok((r2, z2))
}

/// Core loop shared with the KZ algorithms. Returns the swap count.
pub(crate) fn lll_in_place(
    r: &mut RealMatrix,
    z: &mut IntMatrix,
    delta: f64,
    swap_cap: u64,
) -> Result<u64> {
    let n = r.cols();
    let mut swaps = 0u64;
    let mut k = 1usize;
    while k < n {
        size_reduce_col(r, z, k, k - 1)?;
        let lhs = delta * r[(k - 1, k - 1)] * r[(k - 1, k - 1)];
        let rhs = r[(k - 1, k)] * r[(k - 1, k)] + r[(k, k)] * r[(k, k)];
        if lhs > rhs * (1.0 + LOVASZ_SLACK) {
            swaps += 1;
            if swaps > swap_cap {
                return Err(Error::NonConvergence { cap: swap_cap });
            }
            r.swap_cols(k - 1, k);
            z.swap_cols(k - 1, k);
            if r[(k, k - 1)] != 0.0 {
                let (g, _) = givens(r[(k - 1, k - 1)], r[(k, k - 1)])?;
                rotate_rows_in_place(r, &g.on_rows(k - 1, k), k - 1);
                r[(k, k - 1)] = 0.0;
            }
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    Ok(swaps)
}

/// LLL-reduces an upper-triangular, full-rank `R`.
///
/// The swap count is capped at `ceil(10 n^2 (1 + log2 cond2(R)))`; hitting
/// the cap reports [`Error::NonConvergence`] instead of looping forever,
/// which floating-point arithmetic cannot rule out at delta = 1.
pub fn lll_reduce(r: &RealMatrix, delta: f64) -> Result<QrzFactorization> {
    check_delta(delta)?;
    check_square_upper(r)?;
    if !r.is_finite() {
        return Err(Error::NonFinite);
    }
    if let Some(index) = first_zero_diagonal(r) {
        return Err(Error::RankDeficient { index });
    }
    let cond = cond2(r)?;
    let n = r.cols() as f64;
    let swap_cap = (10.0 * n * n * (1.0 + cond.log2().max(0.0))).ceil() as u64;

    let mut r_bar = r.clone();
    let mut z = IntMatrix::identity(r.cols());
    lll_in_place(&mut r_bar, &mut z, delta, swap_cap)?;
    Ok(QrzFactorization { r_bar, z, delta })
}

/// True iff `|r_ik| <= |r_ii|/2` for all `i < k`, within relative tolerance.
pub fn is_size_reduced(r: &RealMatrix) -> bool {
    if !r.is_square() || !r.is_upper_triangular() {
        return false;
    }
    let n = r.cols();
    for k in 1..n {
        for i in 0..k {
            if r[(i, k)].abs() > 0.5 * r[(i, i)].abs() * (1.0 + PREDICATE_TOL) {
                return false;
            }
        }
    }
    true
}

/// True iff `r` is size-reduced and satisfies the Lovasz condition
/// `delta r_{k-1,k-1}^2 <= r_{k-1,k}^2 + r_{kk}^2` for all k.
pub fn is_lll_reduced(r: &RealMatrix, delta: f64) -> bool {
    assert!(delta > 0.25 && delta <= 1.0, "delta outside (1/4, 1]");
    if !is_size_reduced(r) {
        return false;
    }
    let n = r.cols();
    for k in 1..n {
        let lhs = delta * r[(k - 1, k - 1)] * r[(k - 1, k - 1)];
        let rhs = r[(k - 1, k)] * r[(k - 1, k)] + r[(k, k)] * r[(k, k)];
        if lhs > rhs * (1.0 + PREDICATE_TOL) {
            return false;
        }
    }
    true
}
