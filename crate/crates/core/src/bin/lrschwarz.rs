use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lowrank_schwarz::harness::{
    cmd_homog_check, cmd_offline, cmd_rank_sweep, cmd_reference, cmd_run, cmd_spectrum, BackendChoice,
    ExperimentConfig, SpectrumMap,
};
use lowrank_schwarz::Error;

#[derive(Parser)]
#[command(name = "lrschwarz", version, about = "Schwarz decomposition with low-rank subdomain maps for slab radiative transfer")]
struct Cli {
    /// TOML experiment configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Full,
    Lowrank,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    #[value(name = "S")]
    S,
    #[value(name = "Ss")]
    Ss,
    #[value(name = "P")]
    P,
}

#[derive(Subcommand)]
enum Command {
    /// Converged vanilla Schwarz reference with a global direct cross-check.
    Reference,
    /// Compress every subdomain map and write the map cache.
    Offline,
    /// Online Schwarz iteration with the chosen backend.
    Run {
        #[arg(long, value_enum, default_value = "full")]
        backend: BackendArg,
    },
    /// Dense singular values of one subdomain map.
    Spectrum {
        #[arg(long, value_enum, default_value = "Ss")]
        map: MapArg,
        #[arg(long, default_value_t = 4)]
        subdomain: usize,
    },
    /// Offline build and online run for every configured rank.
    RankSweep {
        /// Comma-separated ranks, overriding the config.
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<usize>>,
    },
    /// Oscillatory versus homogenized medium over the configured periods.
    HomogCheck,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Command::RankSweep { ranks: Some(r) } = &cli.command {
        cfg.ranks = r.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Reference => {
            let r = cmd_reference(&cfg)?;
            println!(
                "reference: {} iterations, final trace error {:.3e}, relative difference to direct solve {:.3e}",
                r.iterations,
                r.history.last().copied().unwrap_or(0.0),
                r.rel_diff_direct
            );
            println!("flux deviation {:.3e}; field written to {}", r.flux_deviation, r.path.display());
        }
        Command::Offline => {
            let r = cmd_offline(&cfg)?;
            for map in &r.cache.maps {
                let s1 = map.sigma.first().copied().unwrap_or(0.0);
                let last = map.sigma.last().copied().unwrap_or(0.0);
                println!("subdomain {:2}: rank {}, sigma_1 {:.4e}, sigma_r/sigma_1 {:.4e}", map.subdomain, map.rank(), s1, last / s1);
            }
            println!("cache written to {}", r.path.display());
        }
        Command::Run { backend } => {
            let choice = match backend {
                BackendArg::Full => BackendChoice::Full,
                BackendArg::Lowrank => BackendChoice::LowRank,
            };
            let r = cmd_run(&cfg, choice)?;
            println!(
                "{}: {} iterations, final relative error {:.4e}, mean step {:.3e} s",
                choice.name(),
                r.online.run.state.t,
                r.online.rel_errors.last().copied().unwrap_or(f64::NAN),
                r.online.mean_step_seconds()
            );
            println!("history written to {}", r.history_path.display());
        }
        Command::Spectrum { map, subdomain } => {
            let map = match map {
                MapArg::S => SpectrumMap::Full,
                MapArg::Ss => SpectrumMap::Restricted,
                MapArg::P => SpectrumMap::Boundary,
            };
            let r = cmd_spectrum(&cfg, map, *subdomain)?;
            for i in 1..=r.sigma.len().min(12) {
                println!("sigma_{i}/sigma_1 = {:.4e}", r.ratio(i));
            }
            println!("spectrum written to {}", r.path.display());
        }
        Command::RankSweep { .. } => {
            let r = cmd_rank_sweep(&cfg)?;
            println!("vanilla after {} steps: {:.4e}", cfg.max_iters, r.vanilla_error);
            for row in &r.rows {
                println!(
                    "r = {}: error {:.4e} (converged {:.4e}, vs vanilla {:.4e}), offline {:.3} s, online {:.3e} s",
                    row.rank, row.rel_error, row.rel_error_converged, row.rel_error_vs_vanilla, row.offline_seconds, row.online_seconds
                );
            }
        }
        Command::HomogCheck => {
            let r = cmd_homog_check(&cfg)?;
            for (d, e) in &r.rows {
                println!("delta = {d:.6}: relative discrepancy {e:.4e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Cache(_) | Error::StaleMap { .. }) {
                eprintln!("hint: re-run `lrschwarz offline` with the same configuration");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
