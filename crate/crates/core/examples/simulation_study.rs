//! A small Monte Carlo study: simulate replicate datasets from random true
//! networks, run the two-step selection on each, and write results.csv,
//! summary.json and a node-count histogram.
//!
//! Usage: `simulation_study [OUT_DIR] [REPLICATES] [EPOCHS]`.

use std::path::PathBuf;

use nodeprune::experiment::{cmd_experiment_sim, read_rows, summarize_sim, ExperimentConfig, SimSummary};
use nodeprune::{GridSpec, Result, SimSpec, TrainConfig};

pub fn run_example(out: PathBuf, replicates: usize, epochs: usize) -> Result<SimSummary> {
    let cfg = ExperimentConfig {
        replicates,
        seed: 11,
        sim: SimSpec { d: 3, h_star: 2, n: 500, sigma2: 1.0, seed: 0 },
        grids: GridSpec::simulation(),
        train: TrainConfig { epochs, ..TrainConfig::default() },
        h: 5,
        output_dir: out,
        ..ExperimentConfig::default()
    };
    let outcome = cmd_experiment_sim(&cfg)?;
    let summary = summarize_sim(&read_rows(&outcome.results_csv)?);
    println!("{} of {} replicates succeeded", outcome.total - outcome.failed, outcome.total);
    println!("group lasso node counts: {:?}", summary.gl_hist);
    println!("adaptive node counts:    {:?}", summary.agl_hist);
    println!("median distance to truth: GL {:?}, AGL {:?}", summary.gl_median_distance, summary.agl_median_distance);
    for p in &outcome.plots {
        println!("wrote {}", p.display());
    }
    Ok(summary)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/simulation_study"));
    let replicates = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let epochs = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    run_example(out, replicates, epochs).map(|_| ())
}
