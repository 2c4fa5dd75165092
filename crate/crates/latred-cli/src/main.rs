//! Command line front end: `reduce`, `svp`, `bench`, `example`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use latred::bench::{
    paper_example, run_benchmark, write_csv, AlgKind, BenchConfig, CaseKind, RunStatus,
};
use latred::kz::{kz_reduce_baseline_with, kz_reduce_modified_with, KzOptions, KzResult};
use latred::matcore::qr_factorize;
use latred::svp::{brute_force_svp, lll_aided_svp, SvpSolution};
use latred::{is_lll_reduced, is_unimodular, lll_reduce, Error, RealMatrix};

#[derive(Parser)]
#[command(
    name = "latred",
    about = "Lattice reduction toolkit: LLL and KZ reduction, SVP enumeration, benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReduceAlg {
    Lll,
    KzBaseline,
    KzModified,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchCase {
    Case1,
    Case2,
    Example,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a basis read from a matrix file and write R and Z.
    Reduce(ReduceArgs),
    /// Solve the shortest vector problem for a basis file.
    Svp(SvpArgs),
    /// Run the benchmark harness and write a CSV report.
    Bench(BenchArgs),
    /// Run both KZ algorithms on the built-in ill-conditioned 5x5 example.
    Example,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    alg: ReduceAlg,
    /// Input basis in the plain-text matrix format.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Print a per-step log (k, max solution entry, skip flag, block condition number).
    #[arg(long)]
    trace: bool,
    /// Where to write the reduced factor (stdout when omitted).
    #[arg(long)]
    out_r: Option<PathBuf>,
    /// Where to write the unimodular transform (stdout when omitted).
    #[arg(long)]
    out_z: Option<PathBuf>,
}

#[derive(Args)]
struct SvpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Use the exhaustive box oracle with this bound instead of enumeration.
    #[arg(long)]
    brute_box: Option<i64>,
    /// Single-line machine-readable output (integer entries as decimal strings).
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    case: BenchCase,
    /// Dimensions: a single value, a comma list, or start:step:end.
    #[arg(long, default_value = "2:2:20")]
    n: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-run timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Comma-separated subset of {kz-baseline, kz-modified}.
    #[arg(long, default_value = "kz-baseline,kz-modified")]
    algs: String,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (parallel timing adds noise; 1 gives clean timings).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Reduce(args) => cmd_reduce(args),
        Cmd::Svp(args) => cmd_svp(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Example => cmd_example(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConfigInvalid(_) | Error::InvalidDelta { .. } | Error::Parse(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}

/// Loads a basis and returns its upper-triangular factor, factorizing
/// non-triangular or rectangular input first.
fn load_triangular(path: &PathBuf) -> Result<RealMatrix, Error> {
    let a = RealMatrix::read_text_file(path)?;
    if a.is_square() && a.is_upper_triangular() {
        Ok(a)
    } else {
        eprintln!("input is not upper triangular; reducing its QR factor");
        Ok(qr_factorize(&a)?.1)
    }
}

fn print_step_log(res: &KzResult) {
    for s in &res.per_step {
        let max_entry = s
            .solution
            .iter()
            .map(|v| v.to_f64().map(f64::abs).unwrap_or(f64::INFINITY))
            .fold(0.0f64, f64::max);
        let cond = s
            .block_cond
            .map(|c| format!("{c:.3e}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "step k={}: max|solution|={} skipped={} nodes={} block_cond={}",
            s.k, max_entry, s.skipped, s.nodes, cond
        );
    }
}

fn cmd_reduce(args: ReduceArgs) -> Result<(), Error> {
    let r = load_triangular(&args.input)?;
    let opts = if args.trace {
        KzOptions::new(args.delta).with_trace()
    } else {
        KzOptions::new(args.delta)
    };
    let (r_bar, z) = match args.alg {
        ReduceAlg::Lll => {
            let f = lll_reduce(&r, args.delta)?;
            (f.r_bar, f.z)
        }
        ReduceAlg::KzBaseline => {
            let res = kz_reduce_baseline_with(&r, &opts)?;
            if args.trace {
                print_step_log(&res);
            }
            (res.r_bar, res.z)
        }
        ReduceAlg::KzModified => {
            let res = kz_reduce_modified_with(&r, &opts)?;
            if args.trace {
                print_step_log(&res);
            }
            (res.r_bar, res.z)
        }
    };
    match &args.out_r {
        Some(p) => r_bar.write_text_file(p)?,
        None => print!("{}", r_bar.to_text()),
    }
    match &args.out_z {
        Some(p) => z.write_text_file(p)?,
        None => print!("{}", z.to_text()),
    }
    Ok(())
}

fn solution_json(sol: &SvpSolution) -> String {
    let entries: Vec<String> = sol.x.iter().map(|v| format!("\"{v}\"")).collect();
    format!(
        "{{\"x\":[{}],\"norm\":{},\"nodes\":{}}}",
        entries.join(","),
        sol.norm,
        sol.nodes
    )
}

fn cmd_svp(args: SvpArgs) -> Result<(), Error> {
    let r = load_triangular(&args.input)?;
    let sol = match args.brute_box {
        Some(bound) => {
            let out = brute_force_svp(&r, bound)?;
            if out.box_hit {
                eprintln!("warning: minimizer touches the box boundary; increase --brute-box");
            }
            out.solution
        }
        None => {
            let out = lll_aided_svp(&r, args.delta)?;
            SvpSolution { x: out.x, norm: out.norm, nodes: out.nodes }
        }
    };
    if args.json {
        println!("{}", solution_json(&sol));
    } else {
        let entries: Vec<String> = sol.x.iter().map(|v| v.to_string()).collect();
        println!("x      = [{}]", entries.join(", "));
        println!("norm   = {}", sol.norm);
        println!("nodes  = {}", sol.nodes);
    }
    Ok(())
}

/// Parses "n", "a,b,c" or "start:step:end".
fn parse_n_spec(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = |m: &str| Error::ConfigInvalid(format!("bad --n {spec:?}: {m}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:end"));
        }
        let start: usize = parts[0].parse().map_err(|_| bad("bad start"))?;
        let step: usize = parts[1].parse().map_err(|_| bad("bad step"))?;
        let end: usize = parts[2].parse().map_err(|_| bad("bad end"))?;
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        spec.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad("bad value")))
            .collect()
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    if !(args.timeout > 0.0) {
        return Err(Error::ConfigInvalid("timeout must be positive".into()));
    }
    let algorithms: Vec<AlgKind> = args
        .algs
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()?;
    let case = match args.case {
        BenchCase::Case1 => CaseKind::Case1,
        BenchCase::Case2 => CaseKind::Case2,
        BenchCase::Example => CaseKind::Example,
    };
    let n_values = match case {
        CaseKind::Example => vec![5],
        _ => parse_n_spec(&args.n)?,
    };
    let cfg = BenchConfig {
        case,
        n_values,
        trials: args.trials,
        seed: args.seed,
        timeout: Duration::from_secs_f64(args.timeout),
        delta: args.delta,
        algorithms,
        jobs: args.jobs,
    };
    let records = run_benchmark(&cfg)?;
    write_csv(&records, &args.out)?;

    // console summary: mean seconds per (n, algorithm), timeouts at the cap
    println!("case={} trials={} seed={}", cfg.case.id(), cfg.trials, cfg.seed);
    for &n in &cfg.n_values {
        for &alg in &cfg.algorithms {
            let runs: Vec<_> = records
                .iter()
                .filter(|r| r.n == n && r.algorithm == alg)
                .collect();
            if runs.is_empty() {
                continue;
            }
            let mean: f64 = runs
                .iter()
                .map(|r| match r.status {
                    RunStatus::Ok => r.seconds,
                    _ => cfg.timeout.as_secs_f64(),
                })
                .sum::<f64>()
                / runs.len() as f64;
            let timeouts = runs.iter().filter(|r| r.status == RunStatus::Timeout).count();
            let aborted = runs.iter().filter(|r| r.status == RunStatus::Aborted).count();
            println!(
                "n={n:>3} {alg:<12} mean={mean:.6}s timeouts={timeouts} aborted={aborted}"
            );
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_example() -> Result<(), Error> {
    let a = paper_example();
    println!("A =");
    print!("{a}");
    println!("cond2(A) = {:.4e}\n", latred::cond2(&a)?);

    let opts = KzOptions::new(1.0).with_trace();
    let baseline = kz_reduce_baseline_with(&a, &opts)?;
    let modified = kz_reduce_modified_with(&a, &opts)?;

    println!("baseline per-step log:");
    print_step_log(&baseline);
    println!("modified per-step log:");
    print_step_log(&modified);

    for (name, res) in [("baseline", &baseline), ("modified", &modified)] {
        println!("\n{name}: R =");
        print!("{}", res.r_bar);
        println!(
            "{name}: unimodular={} lll_reduced(delta=1)={} max|solution|={:.3e}",
            is_unimodular(&res.z),
            is_lll_reduced(&res.r_bar, 1.0),
            res.max_solution_entry(),
        );
    }
    Ok(())
}
