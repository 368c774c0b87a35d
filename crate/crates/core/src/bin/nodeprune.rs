use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nodeprune::experiment::{
    cmd_experiment_real, cmd_experiment_sim, cmd_fit, cmd_report, cmd_simulate, ExperimentConfig, Mode,
};
use nodeprune::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Simulate,
    Fit,
    ExperimentSim,
    ExperimentReal,
    Report,
}

/// Select hidden-node counts of tanh networks by Group Lasso / Adaptive Group Lasso pruning.
#[derive(Debug, Parser)]
#[command(name = "nodeprune", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full-size experiment (100 × n=5000 simulations, or 50 Boston splits with H=50).
    #[arg(long)]
    full: bool,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to NODEPRUNE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Data CSV for fit / experiment-real.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mode = match cli.command {
        Command::Simulate => Mode::Simulate,
        Command::Fit => Mode::Fit,
        Command::ExperimentSim => Mode::ExperimentSim,
        Command::ExperimentReal => Mode::ExperimentReal,
        Command::Report => Mode::Report,
    };
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None if mode == Mode::ExperimentReal => ExperimentConfig::real_defaults(),
        None => ExperimentConfig::default(),
    };
    cfg.mode = mode;
    if cli.full {
        cfg.apply_full_scale();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
        cfg.sim.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    cfg.threads =
        cli.threads.or(cfg.threads).or_else(|| std::env::var("NODEPRUNE_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(r) = cli.replicates {
        cfg.replicates = r;
    }
    if let Some(e) = cli.epochs {
        cfg.train.epochs = e;
    }
    if let Some(c) = &cli.csv {
        cfg.csv_path = Some(c.clone());
    }
    if let Some(t) = &cli.target {
        cfg.target_column = t.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = build_config(cli)?;
    match cfg.mode {
        Mode::Simulate => {
            let (csv, json) = cmd_simulate(&cfg)?;
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Mode::Fit => {
            let res = cmd_fit(&cfg)?;
            println!(
                "group lasso: zeta={} nodes={}; adaptive: lambda={} nodes={} minimal={}",
                res.gl_choice.reg,
                res.gl_choice.fit.nonzero_nodes,
                res.agl_choice.reg,
                res.selected_nodes,
                res.minimality.minimal
            );
        }
        Mode::ExperimentSim | Mode::ExperimentReal | Mode::Report => {
            let out = match cfg.mode {
                Mode::ExperimentSim => cmd_experiment_sim(&cfg)?,
                Mode::ExperimentReal => {
                    let csv = cfg
                        .csv_path
                        .clone()
                        .ok_or_else(|| Error::InvalidArgument("experiment-real needs --csv or csv_path".into()))?;
                    cmd_experiment_real(&cfg, &csv, &cfg.target_column)?
                }
                _ => cmd_report(&cfg)?,
            };
            println!(
                "{} of {} runs succeeded; results in {}, summary in {}",
                out.total - out.failed,
                out.total,
                out.results_csv.display(),
                out.summary_json.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
