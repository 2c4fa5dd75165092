//! Shortest-vector solvers on an upper-triangular factor.
//!
//! [`enumerate_shortest`] is a Schnorr-Euchner depth-first search: at each
//! level the integer coordinates are tried nearest-to-center first,
//! zig-zagging outward, under a radius that shrinks on every improvement.
//! [`brute_force_svp`] is the independent test oracle: a plain box scan
//! with a static cutoff, no shrinking radius and no zig-zag ordering.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::intlat::{content, IntMatrix};
use crate::lll::{check_delta, lll_reduce};
use crate::matcore::RealMatrix;

/// Cooperative resource limits for a single search call.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Enumeration aborts with [`Error::SearchAborted`] past this many nodes.
    pub node_cap: u64,
    /// Wall-clock deadline checked periodically during the search.
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { node_cap: 1_000_000_000, deadline: None }
    }
}

impl SearchLimits {
    pub(crate) fn check_deadline(&self) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(Error::TimedOut);
            }
        }
        Ok(())
    }
}

/// A shortest nonzero lattice vector: exact coordinates, its norm
/// (recomputed as `||R x||_2`), and the number of search nodes visited.
#[derive(Debug, Clone)]
pub struct SvpSolution {
    pub x: Vec<BigInt>,
    pub norm: f64,
    pub nodes: u64,
}

fn check_enum_input(r: &RealMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(Error::NotSquare { rows: r.rows(), cols: r.cols() });
    }
    if !r.is_upper_triangular() {
        return Err(Error::ConfigInvalid("matrix must be upper triangular".into()));
    }
    if let Some(index) = (0..r.cols()).find(|&i| r[(i, i)] == 0.0) {
        return Err(Error::ZeroDiagonal { index });
    }
    Ok(())
}

fn residual_norm(r: &RealMatrix, x: &[i64]) -> f64 {
    let n = r.cols();
    let mut sq = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for j in i..n {
            s += r[(i, j)] * x[j] as f64;
        }
        sq += s * s;
    }
    sq.sqrt()
}

/// Flips signs so the first nonzero entry is positive.
fn normalize_sign(x: &mut [i64]) {
    if let Some(first) = x.iter().find(|v| **v != 0) {
        if *first < 0 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
    }
}

fn to_bigint_vec(x: &[i64]) -> Vec<BigInt> {
    x.iter().map(|&v| BigInt::from(v)).collect()
}

/// Nearest integer with half-way cases resolved toward zero, so the first
/// child at each level is the smaller-magnitude candidate.
fn nearest_toward_zero(c: f64) -> i64 {
    let f = c.floor();
    let frac = c - f;
    if frac > 0.5 {
        f as i64 + 1
    } else if frac < 0.5 {
        f as i64
    } else if c > 0.0 {
        f as i64
    } else {
        f as i64 + 1
    }
}

/// Solves `min ||R x||_2` over nonzero integer vectors with the default limits.
pub fn enumerate_shortest(r: &RealMatrix) -> Result<SvpSolution> {
    enumerate_shortest_with(r, &SearchLimits::default())
}

/// Schnorr-Euchner enumeration with explicit limits.
///
/// The initial radius is the smallest column norm of `R` (the norm of some
/// `R e_j`, hence a valid upper bound on the optimum) and shrinks on every
/// improvement. Ties are kept at the first vector found; only the norm is
/// part of the contract.
pub fn enumerate_shortest_with(r: &RealMatrix, limits: &SearchLimits) -> Result<SvpSolution> {
    check_enum_input(r)?;
    let n = r.cols();

    let mut best_sq = f64::INFINITY;
    let mut jmin = 0;
    for j in 0..n {
        let c = r.col_norm(j);
        if c * c < best_sq {
            best_sq = c * c;
            jmin = j;
        }
    }
    if !(best_sq > 0.0) {
        return Err(Error::RadiusUnderflow);
    }
    let mut best_x = vec![0i64; n];
    best_x[jmin] = 1;

    let mut x = vec![0i64; n];
    let mut center = vec![0.0f64; n];
    let mut step = vec![0i64; n];
    let mut partial = vec![0.0f64; n + 1];
    let mut nodes = 0u64;

    let center_at = |r: &RealMatrix, x: &[i64], i: usize| -> f64 {
        let mut s = 0.0;
        for j in (i + 1)..n {
            s += r[(i, j)] * x[j] as f64;
        }
        -s / r[(i, i)]
    };

    let mut i = n - 1;
    center[i] = 0.0;
    x[i] = 0;
    step[i] = 1;

    loop {
        nodes += 1;
        if nodes > limits.node_cap {
            return Err(Error::SearchAborted { nodes });
        }
        if nodes % 8192 == 0 {
            limits.check_deadline()?;
        }
        let d = r[(i, i)] * (x[i] as f64 - center[i]);
        let p = partial[i + 1] + d * d;
        if p <= best_sq {
            if i == 0 {
                if x.iter().any(|&v| v != 0) && p < best_sq {
                    best_sq = p;
                    best_x.copy_from_slice(&x);
                }
                let (nx, ns) = zigzag(x[0], step[0]);
                x[0] = nx;
                step[0] = ns;
            } else {
                partial[i] = p;
                i -= 1;
                center[i] = center_at(r, &x, i);
                x[i] = nearest_toward_zero(center[i]);
                step[i] = if center[i] >= x[i] as f64 { 1 } else { -1 };
            }
        } else {
            // Zig-zag distances are non-decreasing: the whole level is done.
            i += 1;
            if i >= n {
                break;
            }
            let (nx, ns) = zigzag(x[i], step[i]);
            x[i] = nx;
            step[i] = ns;
        }
    }

    normalize_sign(&mut best_x);
    let norm = residual_norm(r, &best_x);
    Ok(SvpSolution { x: to_bigint_vec(&best_x), norm, nodes })
}

/// Next value in zig-zag order: from x0 with step s=+-1 the sequence is
/// x0, x0+s, x0-s, x0+2s, x0-2s, ...
fn zigzag(x: i64, step: i64) -> (i64, i64) {
    let nx = x + step;
    let ns = if step > 0 { -step - 1 } else { -step + 1 };
    (nx, ns)
}

/// Outcome of the brute-force oracle; `box_hit` flags a minimizer touching
/// the box boundary (the box was possibly too small to be authoritative).
#[derive(Debug, Clone)]
pub struct BruteForceOutcome {
    pub solution: SvpSolution,
    pub box_hit: bool,
}

/// Exhaustive minimum of `||R x||_2` over nonzero `x` with `|x_i| <= bound`.
///
/// Candidates are scanned in plain ascending order per coordinate and only
/// pruned against the static initial radius (the minimum column norm),
/// which no true minimizer can exceed. Deliberately shares nothing with
/// the Schnorr-Euchner search it cross-checks.
pub fn brute_force_svp(r: &RealMatrix, bound: i64) -> Result<BruteForceOutcome> {
    check_enum_input(r)?;
    let n = r.cols();
    if n > 8 {
        return Err(Error::DimensionTooLarge { n, max: 8 });
    }
    if bound < 1 {
        return Err(Error::ConfigInvalid("box bound must be >= 1".into()));
    }
    let cutoff_sq = (0..n).map(|j| r.col_norm(j).powi(2)).fold(f64::INFINITY, f64::min);
    if !(cutoff_sq > 0.0) {
        return Err(Error::RadiusUnderflow);
    }

    let mut best_sq = f64::INFINITY;
    let mut best_x: Option<Vec<i64>> = None;
    let mut x = vec![0i64; n];
    let mut nodes = 0u64;

    // depth-first over levels n-1 .. 0 with partial row sums
    fn scan(
        r: &RealMatrix,
        bound: i64,
        level: usize,
        partial_sq: f64,
        cutoff_sq: f64,
        x: &mut Vec<i64>,
        best_sq: &mut f64,
        best_x: &mut Option<Vec<i64>>,
        nodes: &mut u64,
    ) {
        let n = r.cols();
        for v in -bound..=bound {
            *nodes += 1;
            x[level] = v;
            let mut s = r[(level, level)] * v as f64;
            for j in (level + 1)..n {
                s += r[(level, j)] * x[j] as f64;
            }
            let p = partial_sq + s * s;
            if p > cutoff_sq {
                continue;
            }
            if level == 0 {
                if x.iter().any(|&t| t != 0) && p < *best_sq {
                    *best_sq = p;
                    *best_x = Some(x.clone());
                }
            } else {
                scan(r, bound, level - 1, p, cutoff_sq, x, best_sq, best_x, nodes);
            }
        }
        x[level] = 0;
    }

    scan(r, bound, n - 1, 0.0, cutoff_sq * (1.0 + 1e-12), &mut x, &mut best_sq, &mut best_x, &mut nodes);

    let mut bx = best_x.expect("a unit vector always lies inside the box");
    normalize_sign(&mut bx);
    let box_hit = bx.iter().any(|&v| v.abs() == bound);
    let norm = residual_norm(r, &bx);
    Ok(BruteForceOutcome {
        solution: SvpSolution { x: to_bigint_vec(&bx), norm, nodes },
        box_hit,
    })
}

/// Result of [`lll_aided_svp`]: `x = zhat * z` solves the SVP on the input
/// block, `z` solves it on the LLL-reduced factor `rhat`.
#[derive(Debug, Clone)]
pub struct LllAidedSvp {
    pub x: Vec<BigInt>,
    pub z: Vec<BigInt>,
    pub zhat: IntMatrix,
    pub rhat: RealMatrix,
    pub nodes: u64,
    pub norm: f64,
}

pub fn lll_aided_svp(r_block: &RealMatrix, delta: f64) -> Result<LllAidedSvp> {
    lll_aided_svp_with(r_block, delta, &SearchLimits::default())
}

/// LLL-reduces the block, enumerates the shortest vector of the reduced
/// factor, and maps it back. The entries of `z` obey the a-priori
/// enumeration bound (checked in debug builds); the entries of `x` do not.
pub fn lll_aided_svp_with(
    r_block: &RealMatrix,
    delta: f64,
    limits: &SearchLimits,
) -> Result<LllAidedSvp> {
    let fact = lll_reduce(r_block, delta)?;
    let sol = enumerate_shortest_with(&fact.r_bar, limits)?;
    debug_assert!(solution_within_theorem_bound(&sol.x, delta));
    let x = fact.z.mul_vec(&sol.x);
    debug_assert!(content(&x).is_one());
    Ok(LllAidedSvp { x, z: sol.x, zhat: fact.z, rhat: fact.r_bar, nodes: sol.nodes, norm: sol.norm })
}

/// A-priori bound on the i-th entry (1-based) of the shortest vector of an
/// LLL-reduced n_sub-dimensional factor:
/// `(4 / (4 delta - 1))^{(n_sub - 1)/2} * 2^{n_sub - i}`.
pub fn theorem1_bound(n_sub: usize, i: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    assert!(n_sub >= 1 && i >= 1 && i <= n_sub, "index outside 1..=n_sub");
    let base = 4.0 / (4.0 * delta - 1.0);
    Ok(base.powf((n_sub - 1) as f64 / 2.0) * 2f64.powi((n_sub - i) as i32))
}

/// Checks every entry of `z` against [`theorem1_bound`] with a hair of slack.
pub fn solution_within_theorem_bound(z: &[BigInt], delta: f64) -> bool {
    let n_sub = z.len();
    z.iter().enumerate().all(|(idx, v)| {
        let bound = theorem1_bound(n_sub, idx + 1, delta).unwrap();
        v.abs() <= BigInt::from((bound * (1.0 + 1e-12)).floor() as i64)
    })
}
