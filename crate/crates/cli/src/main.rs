use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use capwave_cli::commands;
use capwave_cli::config::{Format, InitialMode, RunConfig};
use capwave_cli::validate::Fault;
use capwave_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "capwave",
    version,
    about = "Resonances, clusters and triad dynamics of rotational capillary waves"
)]
struct Cli {
    /// Run configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Surface tension over density, m³/s².
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    kmax: Option<u32>,
    /// Relative vorticity accuracy for clustering.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Run length in characteristic times.
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    cluster_id: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate exact resonances with k1 <= k2 <= kmax.
    Search,
    /// Group triads into clusters at the given accuracy.
    Cluster,
    /// Integrate a cluster's equations of motion.
    Simulate {
        /// Triad by its two low wavenumbers, e.g. `10,47`; repeat to build a cluster.
        #[arg(long = "triad", value_parser = parse_pair)]
        triads: Vec<(i64, i64)>,
        /// Initial condition `k:amplitude:phase`; repeatable, adds to the config.
        #[arg(long = "ic", value_parser = parse_ic)]
        ic: Vec<InitialMode>,
    },
    /// Run the acceptance checks.
    Validate {
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CouplingSign,
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected k1,k2")?;
    Ok((
        a.trim().parse().map_err(|_| "bad k1")?,
        b.trim().parse().map_err(|_| "bad k2")?,
    ))
}

fn parse_ic(s: &str) -> Result<InitialMode, String> {
    let f: Vec<&str> = s.split(':').collect();
    if f.len() != 3 {
        return Err("expected k:amplitude:phase".into());
    }
    Ok(InitialMode {
        k: f[0].parse().map_err(|_| "bad wavenumber")?,
        amplitude: f[1].parse().map_err(|_| "bad amplitude")?,
        phase: f[2].parse().map_err(|_| "bad phase")?,
    })
}

fn load(cli: &Cli, extra: &[InitialMode]) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let f = &cli.flags;
    cfg.sigma = f.sigma.unwrap_or(cfg.sigma);
    cfg.kmax = f.kmax.unwrap_or(cfg.kmax);
    cfg.epsilon = f.epsilon.unwrap_or(cfg.epsilon);
    cfg.t_end = f.t_end.unwrap_or(cfg.t_end);
    cfg.tol = f.tol.unwrap_or(cfg.tol);
    cfg.samples = f.samples.unwrap_or(cfg.samples);
    cfg.cluster_id = f.cluster_id.or(cfg.cluster_id);
    cfg.out = f.out.clone().or(cfg.out);
    cfg.format = f.format.or(cfg.format);
    for m in extra {
        cfg.initial.retain(|x| x.k != m.k);
        cfg.initial.push(*m);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CAPWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "CAPWAVE_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    threads()?;
    match &cli.command {
        Command::Search => commands::run_search(&load(cli, &[])?).map(|_| true),
        Command::Cluster => {
            commands::run_cluster(&load(cli, &[])?, &mut io::stderr()).map(|_| true)
        }
        Command::Simulate { triads, ic } => {
            commands::run_simulate(&load(cli, ic)?, triads, &mut io::stderr()).map(|_| true)
        }
        Command::Validate { inject_fault } => {
            let fault = inject_fault.map(|FaultArg::CouplingSign| Fault::CouplingSign);
            commands::run_validate(fault, &mut io::stdout())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("capwave: {e}");
            ExitCode::from(2)
        }
    }
}
