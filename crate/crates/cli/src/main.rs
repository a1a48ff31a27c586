use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spsp_core::driver::bench::{bench, write_csv_file, BenchConfig};
use spsp_core::driver::{parse_bound, search, verify, SearchConfig};
use spsp_core::Error;

#[derive(Parser)]
#[command(name = "spsp", version, about = "Tabulate strong pseudoprimes to the first m prime bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find every squarefree strong pseudoprime n <= B to the first m bases.
    Search(SearchArgs),
    /// Check a claimed strong pseudoprime and, optionally, its factorization.
    Verify(VerifyArgs),
    /// Time the GCD, λ-sieve and signature-sieve strategies on sampled primes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Search bound B, decimal or scientific notation (e.g. 3.3e9).
    #[arg(long)]
    bound: String,
    /// Number of prime bases m.
    #[arg(long)]
    bases: usize,
    /// GCD/sieve cutoff X; defaults to round(B^(1/3)).
    #[arg(long)]
    cutoff: Option<String>,
    /// Largest number of prime factors to consider.
    #[arg(long)]
    t_max: Option<usize>,
    /// Wheel headroom factor.
    #[arg(long, default_value_t = 1000)]
    headroom: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Hit file (appended to on resume). Its checkpoint is `<out>.ckpt`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resume from this checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: String,
    /// Comma-separated claimed prime factors.
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<String>>,
    #[arg(long)]
    bases: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Sample range `lo:hi` for the prime k.
    #[arg(long)]
    range: String,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    out: PathBuf,
    /// Search bound the timings refer to.
    #[arg(long, default_value = "1e19")]
    bound: String,
    #[arg(long, default_value_t = 11)]
    bases: usize,
    #[arg(long, default_value_t = 1000)]
    headroom: u64,
    /// Skip the GCD timings.
    #[arg(long)]
    no_gcd: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp_millis()
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(a) => run_search(a),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run_search(a: SearchArgs) -> Result<ExitCode, Error> {
    let bound = parse_bound(&a.bound)?;
    let mut cfg = SearchConfig::new(bound, a.bases)?;
    if let Some(x) = &a.cutoff {
        cfg = cfg.with_cutoff(parse_bound(x)?)?;
    }
    cfg.t_max = a.t_max;
    cfg.headroom = a.headroom;
    cfg.workers = a.workers;
    cfg.output = a.out;
    if let Some(r) = a.resume {
        cfg.checkpoint = Some(r);
        cfg.resume = true;
    }
    cfg.validate()?;

    let report = search(&cfg)?;
    for h in &report.hits {
        let f: Vec<String> = h.factors.iter().map(u64::to_string).collect();
        println!("{}\t{}\t{}\t{}\t{}", h.n, h.t, f.join("*"), h.bases_passed, h.found_by.name());
    }
    match report.smallest() {
        Some(h) => println!("# smallest: {} ({} hits)", h.n, report.hits.len()),
        None if report.is_complete() => println!("# no strong pseudoprime to {} bases up to {}", cfg.m, cfg.bound),
        None => println!("# no hits found; run incomplete"),
    }
    if report.is_complete() {
        Ok(ExitCode::SUCCESS)
    } else {
        for u in &report.unresolved {
            eprintln!("unresolved: k = {} residual {}", u.k, u.residual);
        }
        Ok(ExitCode::from(2))
    }
}

fn run_verify(a: VerifyArgs) -> Result<ExitCode, Error> {
    let report = verify(&a.n, a.factors.as_deref(), a.bases)?;
    println!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn run_bench(a: BenchArgs) -> Result<ExitCode, Error> {
    let (lo, hi) = a
        .range
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("range {:?} is not lo:hi", a.range)))?;
    let cfg = BenchConfig {
        lo: parse_bound(lo)?,
        hi: parse_bound(hi)?,
        samples: a.samples,
        bound: parse_bound(&a.bound)?,
        m: a.bases,
        headroom: a.headroom,
        skip_gcd: a.no_gcd,
    };
    cfg.validate()?;
    let rows = bench(&cfg)?;
    write_csv_file(&rows, &a.out)?;
    Ok(ExitCode::SUCCESS)
}
