//! Korkine-Zolotareff reduction, in two variants.
//!
//! Both walk k = 1..n-1, solve the SVP on the trailing block
//! `R[k.., k..]`, and extend the solution to a basis by a chain of 2x2
//! unimodular column transforms, each followed by one Givens rotation
//! that restores the triangular shape.
//!
//! The variants differ in what gets expanded:
//!
//! * [`kz_reduce_baseline`] solves the SVP through an LLL-reduced copy but
//!   expands with the mapped-back solution `x` on the *original* block.
//!   The entries of `x` are unbounded; on ill-conditioned bases they grow
//!   enormous, the 2x2 transforms shred the floating-point `R`, and the
//!   output can fail to be reduced at all. `Z` stays exactly unimodular
//!   here (integer arithmetic is arbitrary-precision), so the failure is
//!   observable rather than silent.
//! * [`kz_reduce_modified`] first commits the LLL reduction of the block
//!   and then expands with the enumerated `z` on the *reduced* block.
//!   Those entries obey the a-priori bound and are usually `+-e_1`, in
//!   which case the whole expansion is skipped.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intlat::{content, ext_gcd, IntMatrix};
use crate::lll::{check_delta, lll_reduce, size_reduce_in_place};
use crate::matcore::{cond2, givens, rotate_rows_in_place, RealMatrix};
use crate::svp::{
    enumerate_shortest_with, lll_aided_svp_with, solution_within_theorem_bound, SearchLimits,
    SvpSolution,
};

/// Options shared by both reduction algorithms.
#[derive(Debug, Clone)]
pub struct KzOptions {
    pub delta: f64,
    /// Record per-step condition numbers and R/Z snapshots (costs an extra
    /// O(n^3) per step; off by default).
    pub trace: bool,
    pub limits: SearchLimits,
}

impl KzOptions {
    pub fn new(delta: f64) -> Self {
        KzOptions { delta, trace: false, limits: SearchLimits::default() }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

/// One step of a reduction run. `solution` is the SVP solution the step
/// acted on: `x` for the baseline, `z` for the modified algorithm.
#[derive(Debug, Clone)]
pub struct KzStep {
    /// 1-based step index k.
    pub k: usize,
    pub solution: Vec<BigInt>,
    /// True when the solution was `+-e_1` and no expansion ran.
    pub skipped: bool,
    /// Enumeration nodes spent in this step.
    pub nodes: u64,
    /// cond2 of the trailing block at the end of the step (trace mode).
    pub block_cond: Option<f64>,
    /// Snapshots at the end of the step (trace mode).
    pub r_after: Option<RealMatrix>,
    pub z_after: Option<IntMatrix>,
}

#[derive(Debug, Clone)]
pub struct KzResult {
    pub r_bar: RealMatrix,
    pub z: IntMatrix,
    pub per_step: Vec<KzStep>,
}

impl KzResult {
    /// Largest solution-entry magnitude across all steps, saturating to f64.
    pub fn max_solution_entry(&self) -> f64 {
        self.per_step
            .iter()
            .flat_map(|s| s.solution.iter())
            .map(|v| v.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

fn check_kz_input(r: &RealMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(Error::NotSquare { rows: r.rows(), cols: r.cols() });
    }
    if !r.is_upper_triangular() {
        return Err(Error::ConfigInvalid("matrix must be upper triangular".into()));
    }
    if !r.is_finite() {
        return Err(Error::NonFinite);
    }
    if let Some(index) = (0..r.cols()).find(|&i| r[(i, i)] == 0.0) {
        return Err(Error::RankDeficient { index });
    }
    Ok(())
}

fn is_pm_e1(x: &[BigInt]) -> bool {
    x[0].abs().is_one() && x[1..].iter().all(|v| v.is_zero())
}

/// Extends the primitive vector `x` (gcd of entries 1) to a basis of the
/// trailing block starting at column `k` (0-based): pairs of entries are
/// eliminated bottom-up through 2x2 unimodular transforms applied to the
/// columns of `R` and `Z`, re-triangularizing `R` with one Givens rotation
/// per pair. Pairs whose lower entry is zero are skipped outright.
pub fn expand_basis(
    r: &RealMatrix,
    z: &IntMatrix,
    x: &[BigInt],
    k: usize,
) -> Result<(RealMatrix, IntMatrix)> {
    check_kz_input(r)?;
    let n = r.cols();
    if z.cols() != n {
        return Err(Error::ConfigInvalid("Z has a different column count than R".into()));
    }
    if k >= n || x.len() != n - k {
        return Err(Error::IndexOutOfRange(format!(
            "expansion vector of length {} at column {} in an {}x{} matrix",
            x.len(),
            k,
            n,
            n
        )));
    }
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::ZeroVector);
    }
    if !content(x).is_one() {
        return Err(Error::NonPrimitiveVector);
    }
    let mut r2 = r.clone();
    let mut z2 = z.clone();
    expand_in_place(&mut r2, &mut z2, x, k)?;
    Ok((r2, z2))
}

pub(crate) fn expand_in_place(
    r: &mut RealMatrix,
    z: &mut IntMatrix,
    x: &[BigInt],
    k: usize,
) -> Result<()> {
    let mut x = x.to_vec();
    if x.len() < 2 {
        return Ok(());
    }
    for i in (0..x.len() - 1).rev() {
        if x[i + 1].is_zero() {
            // gcd(p, 0) = p and U = I: nothing to do for this pair.
            continue;
        }
        let e = ext_gcd(&x[i], &x[i + 1])?;
        let u00 = &x[i] / &e.d;
        let u10 = &x[i + 1] / &e.d;
        let u01 = -&e.b;
        let u11 = e.a.clone();
        x[i] = e.d;

        let c0 = k + i;
        let c1 = c0 + 1;

        // Z columns: exact.
        let mut u = IntMatrix::zeros(2, 2);
        u[(0, 0)] = u00.clone();
        u[(0, 1)] = u01.clone();
        u[(1, 0)] = u10.clone();
        u[(1, 1)] = u11.clone();
        z.right_mul_col_pair(c0, c1, &u);

        // R columns: floating point, rows 0..=c1 carry the nonzeros.
        let f00 = u00.to_f64().unwrap_or(f64::INFINITY);
        let f01 = u01.to_f64().unwrap_or(f64::INFINITY);
        let f10 = u10.to_f64().unwrap_or(f64::INFINITY);
        let f11 = u11.to_f64().unwrap_or(f64::INFINITY);
        for row in 0..=c1 {
            let a = r[(row, c0)];
            let b = r[(row, c1)];
            r[(row, c0)] = a * f00 + b * f10;
            r[(row, c1)] = a * f01 + b * f11;
        }

        // One Givens rotation restores the triangular shape.
        if r[(c1, c0)] != 0.0 {
            let (g, _) = givens(r[(c0, c0)], r[(c1, c0)])?;
            rotate_rows_in_place(r, &g.on_rows(c0, c1), c0);
            r[(c1, c0)] = 0.0;
        }
    }
    Ok(())
}

fn trace_fields(
    rr: &RealMatrix,
    z: &IntMatrix,
    k: usize,
    trace: bool,
) -> (Option<f64>, Option<RealMatrix>, Option<IntMatrix>) {
    if !trace {
        return (None, None, None);
    }
    let n = rr.cols();
    let block = rr.block(k, n, k, n);
    (cond2(&block).ok(), Some(rr.clone()), Some(z.clone()))
}

/// KZ reduction that expands with `x` on the original trailing block.
pub fn kz_reduce_baseline(r: &RealMatrix, delta: f64) -> Result<KzResult> {
    kz_reduce_baseline_with(r, &KzOptions::new(delta))
}

pub fn kz_reduce_baseline_with(r: &RealMatrix, opts: &KzOptions) -> Result<KzResult> {
    check_delta(opts.delta)?;
    check_kz_input(r)?;
    let n = r.cols();
    let mut rr = r.clone();
    let mut z = IntMatrix::identity(n);
    let mut per_step = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n.saturating_sub(1) {
        opts.limits.check_deadline()?;
        let block = rr.block(k, n, k, n);
        let aided = lll_aided_svp_with(&block, opts.delta, &opts.limits)?;
        let x = aided.x;
        let skipped = is_pm_e1(&x);
        if !skipped {
            expand_in_place(&mut rr, &mut z, &x, k)?;
        }
        let (block_cond, r_after, z_after) = trace_fields(&rr, &z, k, opts.trace);
        per_step.push(KzStep {
            k: k + 1,
            solution: x,
            skipped,
            nodes: aided.nodes,
            block_cond,
            r_after,
            z_after,
        });
    }
    size_reduce_in_place(&mut rr, &mut z)?;
    Ok(KzResult { r_bar: rr, z, per_step })
}

/// KZ reduction that commits the LLL reduction of each trailing block and
/// expands with the bounded `z` on the reduced block; a solution of
/// `+-e_1` advances to the next step with no expansion at all.
pub fn kz_reduce_modified(r: &RealMatrix, delta: f64) -> Result<KzResult> {
    kz_reduce_modified_with(r, &KzOptions::new(delta))
}

pub fn kz_reduce_modified_with(r: &RealMatrix, opts: &KzOptions) -> Result<KzResult> {
    check_delta(opts.delta)?;
    check_kz_input(r)?;
    let n = r.cols();
    let mut rr = r.clone();
    let mut z = IntMatrix::identity(n);
    let mut per_step = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n.saturating_sub(1) {
        opts.limits.check_deadline()?;
        let block = rr.block(k, n, k, n);
        let fact = lll_reduce(&block, opts.delta)?;

        // Commit the block reduction: strip above the block, the block
        // itself, and the exact transform.
        if k > 0 {
            let zf = fact.z.to_real();
            let strip = rr.block(0, k, k, n).matmul(&zf);
            rr.set_block(0, k, &strip);
        }
        rr.set_block(k, k, &fact.r_bar);
        z.right_mul_cols_from(k, &fact.z);

        let sol = enumerate_shortest_with(&fact.r_bar, &opts.limits)?;
        debug_assert!(solution_within_theorem_bound(&sol.x, opts.delta));
        let zvec = sol.x;
        let skipped = is_pm_e1(&zvec);
        if !skipped {
            expand_in_place(&mut rr, &mut z, &zvec, k)?;
        }
        let (block_cond, r_after, z_after) = trace_fields(&rr, &z, k, opts.trace);
        per_step.push(KzStep {
            k: k + 1,
            solution: zvec,
            skipped,
            nodes: sol.nodes,
            block_cond,
            r_after,
            z_after,
        });
    }
    size_reduce_in_place(&mut rr, &mut z)?;
    Ok(KzResult { r_bar: rr, z, per_step })
}

/// KZ verification by enumeration: size-reduced, and every diagonal entry
/// attains the shortest-vector norm of its trailing block within 1e-8
/// relative. Enumeration cost limits this to n <= 10.
pub fn is_kz_reduced(r: &RealMatrix) -> Result<bool> {
    is_kz_reduced_with(r, &SearchLimits::default())
}

pub fn is_kz_reduced_with(r: &RealMatrix, limits: &SearchLimits) -> Result<bool> {
    check_kz_input(r)?;
    let n = r.cols();
    if n > 10 {
        return Err(Error::DimensionTooLarge { n, max: 10 });
    }
    if !crate::lll::is_size_reduced(r) {
        return Ok(false);
    }
    for i in 0..n {
        let block = r.block(i, n, i, n);
        let sol: SvpSolution = enumerate_shortest_with(&block, limits)?;
        if r[(i, i)].abs() > (1.0 + 1e-8) * sol.norm {
            return Ok(false);
        }
    }
    Ok(true)
}
