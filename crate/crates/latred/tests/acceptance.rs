//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test -p latred --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;

use latred::bench::{
    gen_case1, gen_case2, paper_example, run_benchmark, AlgKind, BenchConfig, CaseKind, RunStatus,
};
use latred::kz::{kz_reduce_baseline_with, kz_reduce_modified, kz_reduce_modified_with, KzOptions};
use latred::matcore::qr_factorize;
use latred::svp::{brute_force_svp, enumerate_shortest, theorem1_bound};
use latred::{
    cond2, is_kz_reduced, is_lll_reduced, is_unimodular, kz_reduce_baseline, lll_reduce,
    IntMatrix, RealMatrix,
};

fn case1_r_factor(n: usize, seed: u64) -> RealMatrix {
    qr_factorize(&gen_case1(n, seed)).unwrap().1
}

fn is_pm_e1(x: &[BigInt]) -> bool {
    x[0].abs() == BigInt::from(1) && x[1..].iter().all(|v| *v == BigInt::from(0))
}

/// Criterion 1: the modified algorithm on the built-in ill-conditioned
/// example solves every step with +-e_1, keeps Z exactly unimodular,
/// produces an LLL-reduced factor with the expected diagonal magnitudes
/// and trailing-block condition numbers, in under a second.
#[test]
fn criterion_1_golden_example_modified() {
    let start = Instant::now();
    let res = kz_reduce_modified_with(&paper_example(), &KzOptions::new(1.0).with_trace()).unwrap();

    assert_eq!(res.per_step.len(), 4);
    for step in &res.per_step {
        assert!(step.skipped, "step {} expanded", step.k);
        assert!(is_pm_e1(&step.solution), "step {} solution not +-e1", step.k);
    }
    assert!(is_unimodular(&res.z));
    assert!(is_lll_reduced(&res.r_bar, 1.0));

    let expected_diag = [0.2256, 0.2148, 0.2145, 0.2320, 0.2959];
    for (i, e) in expected_diag.iter().enumerate() {
        let got = res.r_bar[(i, i)].abs();
        assert!((got - e).abs() <= 5e-4, "diag {i}: {got} vs {e}");
    }

    let expected_cond = [2.1, 1.9, 1.6, 1.4];
    for (step, e) in res.per_step.iter().zip(expected_cond.iter()) {
        let got = step.block_cond.expect("trace mode records block conds");
        assert!((got - e).abs() <= 0.15, "step {} cond {got} vs {e}", step.k);
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 1 (golden example, modified): PASS ({elapsed:?})");
}

/// Criterion 2: the baseline algorithm on the same example shows the
/// documented failure signature: a solution entry above 1e4 at some step,
/// and a non-LLL-reduced output at delta=1 or an intermediate trailing
/// block condition number above 1e10. (The exact x entries and the
/// non-unimodular determinant of the original report are float-environment
/// artifacts and are not reproduced; Z is exact here by construction.)
#[test]
fn criterion_2_golden_example_baseline_failure_signature() {
    let res = kz_reduce_baseline_with(&paper_example(), &KzOptions::new(1.0).with_trace()).unwrap();

    let max_entry = res.max_solution_entry();
    assert!(max_entry > 1e4, "max solution entry {max_entry}");

    let non_lll = !is_lll_reduced(&res.r_bar, 1.0);
    let cond_blowup = res
        .per_step
        .iter()
        .filter_map(|s| s.block_cond)
        .any(|c| c > 1e10);
    assert!(
        non_lll || cond_blowup,
        "expected a failure signature: non_lll={non_lll} cond_blowup={cond_blowup}"
    );

    // exact bookkeeping keeps Z unimodular even through the blowup
    assert!(is_unimodular(&res.z));
    println!(
        "criterion 2 (golden example, baseline failure): PASS (max|x|={max_entry:.3e}, non_lll={non_lll}, cond_blowup={cond_blowup})"
    );
}

fn criterion3_seed(n: usize, trial: usize) -> u64 {
    300_000 + (n as u64) * 1000 + trial as u64
}

/// Criterion 3: Schnorr-Euchner enumeration agrees with the brute-force
/// box oracle on 200 random Case-1 R factors per n in 2..=6. The box
/// comes from the a-priori entry bound, which holds for the solution of
/// the LLL-reduced factor, so both solvers run on the reduced factor
/// (the enumerated norm of the unreduced factor must coincide too).
#[test]
fn criterion_3_svp_oracle_equivalence() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in 2..=6usize {
        let bound = theorem1_bound(n, 1, 1.0).unwrap().ceil() as i64;
        for trial in 0..200usize {
            let r = case1_r_factor(n, criterion3_seed(n, trial));
            let reduced = lll_reduce(&r, 1.0).unwrap();
            let enu_reduced = enumerate_shortest(&reduced.r_bar).unwrap();
            let enu_original = enumerate_shortest(&r).unwrap();
            let oracle = brute_force_svp(&reduced.r_bar, bound).unwrap();
            let want = oracle.solution.norm;
            assert!(
                (enu_reduced.norm - want).abs() <= 1e-12 * want,
                "n={n} trial={trial}: {} vs {}",
                enu_reduced.norm,
                want
            );
            assert!(
                (enu_original.norm - want).abs() <= 1e-10 * want,
                "n={n} trial={trial} (unreduced): {} vs {}",
                enu_original.norm,
                want
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(checked, 1000);
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 3 (SVP oracle equivalence, {checked} instances): PASS ({elapsed:?})");
}

fn criterion4_dims_and_seed(i: usize) -> (usize, u64) {
    let n = 3 + (i % 6); // 3..=8
    (n, 400_000 + i as u64)
}

/// Criterion 4: 100 random Case-1 instances, n in 3..=8: the modified
/// algorithm's output is KZ-reduced and its transform exactly unimodular.
#[test]
fn criterion_4_kz_verification() {
    let start = Instant::now();
    for i in 0..100usize {
        let (n, seed) = criterion4_dims_and_seed(i);
        let r = case1_r_factor(n, seed);
        let res = kz_reduce_modified(&r, 1.0).unwrap();
        assert!(is_unimodular(&res.z), "instance {i} (n={n})");
        assert!(is_kz_reduced(&res.r_bar).unwrap(), "instance {i} (n={n})");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!("criterion 4 (KZ verification, 100 instances): PASS ({elapsed:?})");
}

/// Criterion 5: every solver call behind criteria 3 and 4 returns z with
/// |z_i| <= (4/(4 delta - 1))^{(n_sub-1)/2} 2^{n_sub - i} at delta = 1;
/// zero violations. The same instances are regenerated from their seeds.
#[test]
fn criterion_5_theorem_bound_holds_everywhere() {
    let mut calls = 0usize;
    let mut violations = 0usize;

    let mut check = |z: &[BigInt]| {
        calls += 1;
        let n_sub = z.len();
        for (idx, v) in z.iter().enumerate() {
            let bound = theorem1_bound(n_sub, idx + 1, 1.0).unwrap();
            let limit = BigInt::from((bound * (1.0 + 1e-12)).floor() as i64);
            if v.abs() > limit {
                violations += 1;
            }
        }
    };

    // the criterion-3 calls: enumeration on the LLL-reduced factor
    for n in 2..=6usize {
        for trial in 0..200usize {
            let r = case1_r_factor(n, criterion3_seed(n, trial));
            let reduced = lll_reduce(&r, 1.0).unwrap();
            let sol = enumerate_shortest(&reduced.r_bar).unwrap();
            check(&sol.x);
        }
    }
    // the criterion-4 calls: per-step z of each modified reduction
    for i in 0..100usize {
        let (n, seed) = criterion4_dims_and_seed(i);
        let r = case1_r_factor(n, seed);
        let res = kz_reduce_modified(&r, 1.0).unwrap();
        for step in &res.per_step {
            check(&step.solution);
        }
    }

    assert_eq!(violations, 0, "{violations} bound violations across {calls} calls");
    println!("criterion 5 (entry bound, {calls} solver calls, 0 violations): PASS");
}

/// Largest entry deviation between the maintained R and the R-factor of a
/// fresh QR of input*Z, after matching diagonal signs row by row.
fn qrz_defect(input: &RealMatrix, z: &IntMatrix, maintained: &RealMatrix) -> f64 {
    let product = input.matmul(&z.to_real());
    let (_, mut fresh) = qr_factorize(&product).unwrap();
    let n = fresh.cols();
    for i in 0..n {
        if fresh[(i, i)].signum() != maintained[(i, i)].signum() {
            for j in i..n {
                fresh[(i, j)] = -fresh[(i, j)];
            }
        }
    }
    let mut defect = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            defect = defect.max((fresh[(i, j)] - maintained[(i, j)]).abs());
        }
    }
    defect
}

/// Criterion 6: on 50 random instances (n <= 8), after every step of both
/// algorithms the maintained R agrees with the R-factor of a fresh QR of
/// input*Z within 1e-8 * ||input||, up to diagonal signs.
#[test]
fn criterion_6_qrz_consistency_per_step() {
    let mut steps_checked = 0usize;
    for i in 0..50usize {
        let n = 2 + (i % 7); // 2..=8
        let r = case1_r_factor(n, 600_000 + i as u64);
        let tol = 1e-8 * r.frobenius_norm();
        let opts = KzOptions::new(1.0).with_trace();
        for (name, res) in [
            ("baseline", kz_reduce_baseline_with(&r, &opts).unwrap()),
            ("modified", kz_reduce_modified_with(&r, &opts).unwrap()),
        ] {
            for step in &res.per_step {
                let defect = qrz_defect(
                    &r,
                    step.z_after.as_ref().unwrap(),
                    step.r_after.as_ref().unwrap(),
                );
                assert!(
                    defect <= tol,
                    "instance {i} ({name}) step {}: defect {defect} > {tol}",
                    step.k
                );
                steps_checked += 1;
            }
        }
    }
    println!("criterion 6 (QRZ consistency, {steps_checked} steps): PASS");
}

/// Criterion 7: the Case-2 generator hits cond2 = 1e3 within 1e-6 relative
/// for n in {2, 4, 10, 20}.
#[test]
fn criterion_7_case2_condition_number() {
    for &n in &[2usize, 4, 10, 20] {
        let a = gen_case2(n, 777_000 + n as u64);
        let c = cond2(&a).unwrap();
        assert!((c - 1e3).abs() <= 1e-6 * 1e3, "n={n}: cond {c}");
    }
    println!("criterion 7 (Case-2 generator cond2 = 1e3): PASS");
}

/// Criterion 8: Case 2, n=8, 20 trials, 60 s timeout: the modified
/// algorithm's mean wall time (timeouts counted at the cap) does not
/// exceed the baseline's, and the modified algorithm never times out.
/// Absolute times of the original experiments are hardware-specific and
/// deliberately not reproduced.
#[test]
fn criterion_8_efficiency_trend() {
    let cfg = BenchConfig {
        case: CaseKind::Case2,
        n_values: vec![8],
        trials: 20,
        seed: 800_001,
        timeout: Duration::from_secs(60),
        delta: 1.0,
        algorithms: vec![AlgKind::KzBaseline, AlgKind::KzModified],
        jobs: 1,
    };
    let records = run_benchmark(&cfg).unwrap();
    assert_eq!(records.len(), 40);

    let mean = |alg: AlgKind| -> f64 {
        let runs: Vec<_> = records.iter().filter(|r| r.algorithm == alg).collect();
        runs.iter()
            .map(|r| match r.status {
                RunStatus::Ok => r.seconds,
                _ => cfg.timeout.as_secs_f64(),
            })
            .sum::<f64>()
            / runs.len() as f64
    };
    let mean_baseline = mean(AlgKind::KzBaseline);
    let mean_modified = mean(AlgKind::KzModified);
    let modified_timeouts = records
        .iter()
        .filter(|r| r.algorithm == AlgKind::KzModified && r.status == RunStatus::Timeout)
        .count();

    assert_eq!(modified_timeouts, 0);
    assert!(
        mean_modified <= mean_baseline,
        "modified {mean_modified}s vs baseline {mean_baseline}s"
    );
    println!(
        "criterion 8 (efficiency trend, case2 n=8): PASS (modified {mean_modified:.6}s <= baseline {mean_baseline:.6}s, 0 timeouts)"
    );
}

/// Criterion 9: the identity is a fixed point of all three reductions,
/// with no expansions.
#[test]
fn criterion_9_identity_fixed_points() {
    let iden = RealMatrix::identity(6);

    let f = lll_reduce(&iden, 1.0).unwrap();
    assert_eq!(f.r_bar, iden);
    assert_eq!(f.z, IntMatrix::identity(6));

    for res in [
        kz_reduce_baseline(&iden, 1.0).unwrap(),
        kz_reduce_modified(&iden, 1.0).unwrap(),
    ] {
        assert_eq!(res.r_bar, iden);
        assert_eq!(res.z, IntMatrix::identity(6));
        assert!(res.per_step.iter().all(|s| s.skipped), "expansion ran on identity");
    }
    println!("criterion 9 (identity fixed points): PASS");
}

/// The reductions and the file formats compose through the public surface
/// the CLI uses: text round-trips and reduce-then-verify on a file matrix.
#[test]
fn cli_surface_round_trip() {
    let a = gen_case1(5, 123_456);
    let dir = std::env::temp_dir().join(format!("latred-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("basis.txt");
    a.write_text_file(&path).unwrap();
    let back = RealMatrix::read_text_file(&path).unwrap();
    assert_eq!(a, back);

    let r = qr_factorize(&back).unwrap().1;
    let res = kz_reduce_modified(&r, 1.0).unwrap();
    let zpath = dir.join("z.txt");
    res.z.write_text_file(&zpath).unwrap();
    let zback = IntMatrix::read_text_file(&zpath).unwrap();
    assert_eq!(res.z, zback);
    assert!(is_unimodular(&zback));
    let _ = std::fs::remove_dir_all(&dir);
}
