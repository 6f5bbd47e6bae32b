use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hbfsim::allocation::Mode;
use hbfsim::channel::ingest_paths;
use hbfsim::runner::{emit, guard_rail_radio, run_campaign, run_modes, CampaignResult, RealizationResult, radio_digest};
use hbfsim::radio::RadioMap;
use hbfsim::scenario::{generate_deployment, NetworkConfig};
use hbfsim::Error;

#[derive(Parser)]
#[command(name = "hbfsim", version, about = "Multi-cell mm-wave hybrid beamforming MU-MIMO simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write links.csv and summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated modes: 5gnr, diaba, ciaba, oracle, dbf, cbf-tdma.
        #[arg(long, value_delimiter = ',', default_value = "5gnr,diaba,ciaba")]
        alloc: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        realizations: Option<usize>,
        /// `key=value` applied on top of the config file; repeatable.
        #[arg(long = "override")]
        overrides: Vec<String>,
        /// Replay paths from a trace file on realization 0's deployment.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also write timing.csv with per-mode allocation times.
        #[arg(long)]
        timing: bool,
    },
    /// Compare the oracle with the heuristics on small random networks.
    OracleCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 50)]
        instances: u64,
        #[arg(long = "override")]
        overrides: Vec<String>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::TraceParse { .. } | Error::UnknownNode { .. } => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(config: &PathBuf, overrides: &[String]) -> Result<NetworkConfig, Failure> {
    Ok(NetworkConfig::load(config)?.apply_overrides(overrides)?)
}

fn simulate(
    config: PathBuf,
    alloc: Vec<String>,
    seed: Option<u64>,
    out: PathBuf,
    realizations: Option<usize>,
    mut overrides: Vec<String>,
    trace: Option<PathBuf>,
    timing: bool,
) -> Result<(), Failure> {
    if let Some(s) = seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(n) = realizations {
        overrides.push(format!("n_realizations={n}"));
    }
    let cfg = load(&config, &overrides)?;
    let modes = alloc.iter().map(|m| m.parse::<Mode>()).collect::<hbfsim::Result<Vec<_>>>()?;
    if modes.is_empty() {
        return Err(Failure::Config("no allocation mode given".into()));
    }

    let result = match trace {
        Some(path) => {
            let dep = generate_deployment(&cfg, 0)?;
            let table = ingest_paths(&path, dep.n_gnb(), dep.n_ue())?;
            let radio = RadioMap::from_table(&cfg, &dep, &table)?;
            let (reports, alloc_seconds) = run_modes(&radio, &modes)?;
            let mut cfg = cfg.clone();
            cfg.n_realizations = 1;
            CampaignResult {
                cfg,
                modes: modes.clone(),
                realizations: vec![RealizationResult {
                    realization_id: 0,
                    radio_digest: radio_digest(&radio),
                    reports,
                    alloc_seconds,
                }],
                failures: Vec::new(),
            }
        }
        None => run_campaign(&cfg, &modes)?,
    };
    emit(&result, &out, timing)?;

    for &m in &modes {
        let s = result.pooled(m);
        println!(
            "{:<9} coverage {:.3}  median SINR {:>7.2} dB  median rate {:>8.1} Mbps  served {}/{}",
            m.name(),
            s.coverage,
            s.median_sinr_db,
            s.median_rate_bps / 1e6,
            s.n_served,
            s.n_ue
        );
    }
    println!("wrote {}", out.display());
    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} realization(s) failed", result.failures.len())))
    }
}

fn oracle_check(config: PathBuf, instances: u64, overrides: Vec<String>) -> Result<(), Failure> {
    let cfg = load(&config, &overrides)?;
    let modes = [Mode::Oracle, Mode::Ciaba, Mode::Diaba, Mode::FivegNr];
    let mut violations = 0;
    for i in 0..instances {
        let radio = guard_rail_radio(&cfg, i)?;
        let (reports, _) = run_modes(&radio, &modes)?;
        let sums: Vec<f64> = reports.iter().map(|r| r.summary.sum_rate_bps).collect();
        let tol = 1e-9 * sums[0].abs().max(1.0);
        let ok = sums[1..].iter().all(|&s| sums[0] + tol >= s);
        if !ok {
            violations += 1;
        }
        println!(
            "instance {i:>3}  gNBs {} UEs {}  oracle {:>8.1}  ciaba {:>8.1}  diaba {:>8.1}  5gnr {:>8.1} Mbps  {}",
            radio.n_gnb(),
            radio.n_ue(),
            sums[0] / 1e6,
            sums[1] / 1e6,
            sums[2] / 1e6,
            sums[3] / 1e6,
            if ok { "ok" } else { "VIOLATION" }
        );
    }
    println!("{violations} violation(s) over {instances} instance(s)");
    if violations == 0 {
        Ok(())
    } else {
        Err(Failure::Runtime("oracle dominance violated".into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate {
            config,
            alloc,
            seed,
            out,
            realizations,
            overrides,
            trace,
            timing,
        } => simulate(config, alloc, seed, out, realizations, overrides, trace, timing),
        Command::OracleCheck {
            config,
            instances,
            overrides,
        } => oracle_check(config, instances, overrides),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
