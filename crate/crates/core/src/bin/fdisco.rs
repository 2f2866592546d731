use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use floquet_discovery::campaign::{run_campaign, CampaignConfig, CampaignKind};
use floquet_discovery::config::parse_config;
use floquet_discovery::selftest::run_selftest;

/// Floquet circuit discovery campaigns.
#[derive(Parser)]
#[command(name = "fdisco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nelder-Mead optimization of kicked-Ising circuits
    DtcOptimize(RunArgs),
    /// Disorder-averaged classifiability over a (J, h) grid
    DtcLandscape(RunArgs),
    /// Negative integrated SFF over a (Jx, Jy) grid
    SffLandscape(RunArgs),
    /// Integrated SFF along Jx = Jy at several sizes
    SffCut(RunArgs),
    /// Exact and sampled partial SFF for dual-unitary and generic circuits
    PsffDemo(RunArgs),
    /// Oracle-equivalence checks at small sizes
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; missing keys take their defaults
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (overrides the file)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores (overrides the file)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Output directory (overrides the file)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn resolve(kind: CampaignKind, args: RunArgs) -> floquet_discovery::Result<CampaignConfig> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(path)?,
        None => CampaignConfig::default(),
    };
    cfg.kind = kind;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    Ok(cfg)
}

fn selftest() -> ExitCode {
    let start = Instant::now();
    let checks = run_selftest();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed, {:.1} s", checks.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Selftest => return selftest(),
        Command::DtcOptimize(a) => (CampaignKind::DtcOptimize, a),
        Command::DtcLandscape(a) => (CampaignKind::DtcLandscape, a),
        Command::SffLandscape(a) => (CampaignKind::SffLandscape, a),
        Command::SffCut(a) => (CampaignKind::SffCut, a),
        Command::PsffDemo(a) => (CampaignKind::PsffDemo, a),
    };
    let result = resolve(kind, args).and_then(|cfg| run_campaign(&cfg));
    match result {
        Ok(dir) => {
            println!("{} results written to {}", kind.name(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fdisco: {e}");
            ExitCode::FAILURE
        }
    }
}
