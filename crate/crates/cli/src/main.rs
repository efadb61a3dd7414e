//! `dealias`: oracle sweeps, parameter tuning and benchmark tables.

mod bench;
mod hybrid;
mod sizes;
mod verify;

use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use hybrid_dealias::bench::{BenchRow, Strategy};
use hybrid_dealias::plan::{Placement, Symmetry};
use hybrid_dealias::tuner::{TuneCache, TuneOptions, Tuned, Tuner};

use sizes::{Ratio, SizeRange, Switch};

const FAILURE: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "dealias", version, about = "Hybrid dealiased FFT convolutions: verify, tune, bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare convolutions against the direct sum for every valid subtransform size.
    Verify(VerifyArgs),
    /// Search for the fastest subtransform size, residue grouping and placement.
    Tune(TuneArgs),
    /// Time hybrid and explicitly padded convolutions; CSV on standard output.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Shared {
    /// complex, centered or hermitian.
    #[arg(long)]
    kind: Option<Symmetry>,
    /// Number of axes, 1 to 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    dims: Option<u8>,
    /// Input length per axis: `n` or an inclusive range `a..b`.
    #[arg(long = "L")]
    len: Option<SizeRange>,
    /// Minimum padded length per axis.
    #[arg(long = "M", conflicts_with = "ratio")]
    min_padded: Option<usize>,
    /// Padding ratio M/L, as `a/b` or a decimal.
    #[arg(long)]
    ratio: Option<Ratio>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Whether to print the CSV header.
    #[arg(long = "csv-header", default_value = "on")]
    csv_header: Switch,
    /// Reserved; only 1 is supported.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl Shared {
    fn check(&self) -> Result<(), String> {
        if self.threads != 1 {
            return Err(format!("--threads {} is not supported; runs are single-threaded", self.threads));
        }
        Ok(())
    }

    fn min_padded(&self, len: usize) -> Result<usize, String> {
        let m = match (self.min_padded, self.ratio) {
            (Some(m), _) => m,
            (None, Some(r)) => r.min_padded(len),
            (None, None) => 2 * len,
        };
        if m < len {
            return Err(format!("M={m} is smaller than L={len}"));
        }
        Ok(m)
    }

    fn kind(&self) -> Symmetry {
        self.kind.unwrap_or(Symmetry::Complex)
    }

    fn dims(&self) -> usize {
        self.dims.map_or(1, usize::from)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    shared: Shared,
    /// Largest L swept; defaults depend on kind and dimension. Without
    /// `--dims` it only lowers the defaults of the multidimensional sweeps.
    #[arg(long = "max-L")]
    max_len: Option<usize>,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    shared: Shared,
    /// Tuning time limit in milliseconds.
    #[arg(long = "budget-ms", default_value_t = 2000)]
    budget_ms: u64,
    /// Time every candidate instead of at most 64.
    #[arg(long)]
    exhaustive: bool,
    /// Restrict the FFT placement: in or out.
    #[arg(long)]
    placement: Option<Placement>,
    /// List every timed candidate.
    #[arg(long = "show-space")]
    show_space: bool,
    /// Neither read nor write the tuning cache.
    #[arg(long = "no-cache")]
    no_cache: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    shared: Shared,
    /// Timed repetitions per row (median reported).
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Tuning time limit per size in milliseconds.
    #[arg(long = "budget-ms", default_value_t = 1000)]
    budget_ms: u64,
    /// Comma-separated subset of explicit-ip, explicit-op, explicit-pow2, hybrid.
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<Strategy>,
    /// Reuse the previous size's tuned parameters while they remain valid.
    #[arg(long)]
    incremental: bool,
    #[arg(long = "no-cache")]
    no_cache: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Tune(args) => run_tune(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(USAGE)
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<u8, String> {
    args.shared.check()?;
    if args.max_len == Some(0) {
        return Err("--max-L must be positive".into());
    }
    let kinds = match args.shared.kind {
        Some(k) => vec![k],
        None => vec![Symmetry::Complex, Symmetry::Centered, Symmetry::Hermitian],
    };
    let dims = match args.shared.dims {
        Some(d) => vec![usize::from(d)],
        None => vec![1, 2, 3],
    };
    let mut status = 0;
    for &kind in &kinds {
        for &d in &dims {
            let default = verify::default_max_len(kind, d);
            let max_len = match args.max_len {
                Some(l) if d == 1 || args.shared.dims.is_some() => l,
                Some(l) => l.min(default),
                None => default,
            };
            let report = verify::sweep(kind, d, max_len, args.shared.seed).map_err(|e| e.to_string())?;
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            let worst = report.worst_case.map_or(String::new(), |(l, m_pad, m)| format!(" at L={l} M={m_pad} m={m}"));
            println!(
                "{verdict} kind={kind} dims={d} max_L={max_len} cases={} worst={:.3e}{worst} tol={:e}",
                report.cases,
                report.worst,
                verify::TOLERANCE
            );
            if !report.passed() {
                status = FAILURE;
            }
        }
    }
    Ok(status)
}

fn tuner(budget_ms: u64, options: TuneOptions, no_cache: bool) -> Result<Tuner, String> {
    if budget_ms == 0 {
        return Err("--budget-ms must be positive".into());
    }
    let tuner = Tuner::new(TuneOptions { budget: Duration::from_millis(budget_ms), ..options });
    Ok(if no_cache { tuner } else { tuner.with_cache(TuneCache::from_env()) })
}

fn run_tune(args: TuneArgs) -> Result<u8, String> {
    args.shared.check()?;
    let len = args.shared.len.ok_or("--L is required")?;
    let len = len.single().ok_or("tune takes a single --L")?;
    let min_padded = args.shared.min_padded(len)?;
    let options = TuneOptions {
        max_candidates: if args.exhaustive { None } else { TuneOptions::default().max_candidates },
        placement: args.placement,
        ..TuneOptions::default()
    };
    let mut tuner = tuner(args.budget_ms, options, args.no_cache)?;
    let (kind, dims) = (args.shared.kind(), args.shared.dims());
    let per_axis: Vec<Tuned> = if dims == 1 {
        vec![tuner.tune_1d(len, min_padded, kind, 2, 1).map_err(|e| e.to_string())?]
    } else {
        tuner.tune_nd(&vec![(len, min_padded); dims], kind, 2, 1).map_err(|e| e.to_string())?.per_axis
    };
    for (axis, t) in per_axis.iter().enumerate() {
        let p = t.params;
        println!(
            "axis={axis} kind={} L={} M={} m={} p={} q={} n={} D={} placement={} median_ns={} cached={}",
            p.symmetry,
            p.len,
            p.min_padded,
            p.m,
            p.p,
            p.q,
            p.n,
            p.residues_per_pass,
            p.placement,
            t.median.as_nanos(),
            t.cached
        );
        if t.exhausted {
            eprintln!("warning: axis {axis}: budget exhausted after {} candidates", t.records.len());
        }
        if args.show_space {
            for r in &t.records {
                println!(
                    "  candidate m={} p={} q={} D={} placement={} median_ns={} spread_ns={} reps={}",
                    r.params.m,
                    r.params.p,
                    r.params.q,
                    r.params.residues_per_pass,
                    r.params.placement,
                    r.median.as_nanos(),
                    r.spread.as_nanos(),
                    r.repetitions
                );
            }
        }
    }
    Ok(0)
}

fn run_bench(args: BenchArgs) -> Result<u8, String> {
    args.shared.check()?;
    let sizes = args.shared.len.ok_or("--L is required")?;
    if args.reps == 0 {
        return Err("--reps must be positive".into());
    }
    let kind = args.shared.kind();
    let config = bench::BenchConfig {
        kind,
        dims: args.shared.dims(),
        repetitions: args.reps,
        seed: args.shared.seed,
        strategies: if args.strategies.is_empty() { Strategy::ALL.to_vec() } else { args.strategies.clone() },
        incremental: args.incremental,
    };
    let mut tuner = tuner(args.budget_ms, TuneOptions::default(), args.no_cache)?;
    let lengths: Vec<(usize, usize)> =
        sizes.iter().map(|l| args.shared.min_padded(l).map(|m| (l, m))).collect::<Result<_, _>>()?;
    if args.shared.csv_header == Switch::On {
        println!("{}", BenchRow::CSV_HEADER);
    }
    let mut status = 0;
    let mut previous = None;
    for (len, min_padded) in lengths {
        for &strategy in &config.strategies {
            let row = match strategy {
                Strategy::Hybrid => bench::hybrid_row(&config, &mut tuner, len, min_padded, &mut previous),
                _ => bench::explicit_row(&config, len, min_padded, strategy),
            };
            match row {
                Ok(row) => println!("{}", row.to_csv()),
                Err(e) => {
                    eprintln!("L={len} M={min_padded} strategy={strategy}: {e}");
                    status = FAILURE;
                }
            }
        }
    }
    Ok(status)
}
