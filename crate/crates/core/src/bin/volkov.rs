use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use volkov::config::{RunConfig, Suite};
use volkov::suites::run_suite;

/// Run a verification suite and write summary.txt plus CSV tables.
#[derive(Parser, Debug)]
#[command(name = "volkov", version)]
struct Args {
    /// TOML run configuration; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// residual, eigen, ortho, completeness, propagator, amplitude or oscillatory.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value = "volkov-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = &args.suite {
        match s.parse::<Suite>() {
            Ok(s) => cfg.run.suite = s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(n) = args.threads {
        cfg.run.threads = n;
    }
    let report = match run_suite(&cfg, cfg.run.suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = report
        .write(&args.out)
        .and_then(|_| std::fs::write(args.out.join("config.toml"), cfg.to_toml()));
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    if args.verbose {
        print!("{}", report.summary());
    } else {
        println!("{}", report.summary().lines().next().unwrap_or_default());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
