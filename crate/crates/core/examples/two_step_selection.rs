//! Group Lasso followed by Adaptive Group Lasso on simulated data, with the
//! regularization strength of each step chosen by AIC over a grid.
//!
//! Pass an epoch count as the first argument to train longer.

use nodeprune::{simulate_dataset, two_step_fit, GridSpec, Result, SelectionResult, SimSpec, TrainConfig};

pub fn run_example(epochs: usize) -> Result<SelectionResult> {
    let (data, truth) = simulate_dataset(&SimSpec { d: 2, h_star: 2, n: 400, sigma2: 0.25, seed: 7 })?;
    println!("true network has {} hidden nodes; fitting with 5", truth.h());
    let grids = GridSpec { gl_grid: vec![0.005, 0.01, 0.05], agl_grid: vec![0.001, 0.01, 0.05], gamma: 2.0 };
    let cfg = TrainConfig { epochs, learning_rate: 0.05, seed: 7, ..TrainConfig::default() };
    let res = two_step_fit(&data, 5, &grids, &cfg)?;

    for p in &res.gl_aic_trace {
        println!("group lasso  zeta={:<6} nodes={} AIC={:.2}", p.reg, p.nonzero_nodes, p.aic);
    }
    for p in &res.agl_aic_trace {
        println!("adaptive     lambda={:<6} nodes={} AIC={:.2}", p.reg, p.nonzero_nodes, p.aic);
    }
    println!(
        "selected {} node(s) (group lasso alone kept {}); minimal: {}",
        res.selected_nodes, res.gl_choice.fit.nonzero_nodes, res.minimality.minimal
    );
    for w in &res.warnings {
        println!("warning: {w}");
    }
    Ok(res)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let epochs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    run_example(epochs).map(|_| ())
}
