//! Repeated train/test splits of a CSV dataset: standardize with training
//! statistics, run the two-step selection and an unpenalized fit, and report
//! errors on the original target scale.
//!
//! Usage: `real_data_splits [CSV TARGET_COLUMN [OUT_DIR]]`. Without
//! arguments a small synthetic CSV is generated.

use std::path::{Path, PathBuf};

use nodeprune::experiment::{cmd_experiment_real, read_rows, summarize_real, ExperimentConfig, RealSummary};
use nodeprune::rng::{stream, Gaussian};
use nodeprune::{GridSpec, Result, TrainConfig};

/// Writes `rows` observations of y = 3 + 2·tanh(x1 − x2) + noise, with an
/// irrelevant third column.
pub fn write_demo_csv(path: &Path, rows: usize) -> Result<()> {
    let mut g = Gaussian::new(stream(5, 0));
    let mut body = String::from("x1,x2,noise_col,target\n");
    for _ in 0..rows {
        let (a, b, c) = (g.sample(), g.sample(), g.sample());
        body += &format!("{a},{b},{c},{}\n", 3.0 + 2.0 * (a - b).tanh() + 0.2 * g.sample());
    }
    std::fs::write(path, body)?;
    Ok(())
}

pub fn run_example(csv: &Path, target: &str, out: PathBuf, epochs: usize) -> Result<RealSummary> {
    let cfg = ExperimentConfig {
        replicates: 3,
        h: 6,
        grids: GridSpec::boston(),
        train: TrainConfig { epochs, ..TrainConfig::default() },
        output_dir: out,
        ..ExperimentConfig::real_defaults()
    };
    let outcome = cmd_experiment_real(&cfg, csv, target)?;
    let s = summarize_real(&read_rows(&outcome.results_csv)?);
    println!("{} splits, {} failed", s.splits, s.failed);
    println!("adaptive node counts: {:?}", s.agl_hist);
    println!(
        "mean test MSE: group lasso {:?}, adaptive {:?}, unpenalized {:?}",
        s.gl_mean_test_err, s.agl_mean_test_err, s.erm_mean_test_err
    );
    Ok(s)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = args.get(2).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/real_data_splits"));
    match (args.first(), args.get(1)) {
        (Some(csv), Some(target)) => run_example(Path::new(csv), target, out, 10_000).map(|_| ()),
        _ => {
            std::fs::create_dir_all(&out)?;
            let csv = out.join("demo.csv");
            write_demo_csv(&csv, 120)?;
            run_example(&csv, "target", out, 2000).map(|_| ())
        }
    }
}
