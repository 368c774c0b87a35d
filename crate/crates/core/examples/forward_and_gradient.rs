//! Evaluate a one-hidden-layer tanh network, its empirical risk and the
//! analytic risk gradient, and cross-check one coordinate against a central
//! finite difference.

use nodeprune::{empirical_risk, forward, risk_gradient, Dataset, NetworkParams, Result};

pub fn run_example() -> Result<f64> {
    // Two hidden nodes on a two-dimensional input.
    let params = NetworkParams::from_parts(&[vec![1.0, -0.5], vec![0.3, 2.0]], &[1.5, -0.7], &[0.1, -0.2], 0.05)?;
    let data = Dataset::from_rows(
        &[vec![0.0, 1.0], vec![1.0, -1.0], vec![-0.5, 0.25], vec![2.0, 0.0]],
        vec![0.3, 1.2, -0.4, 1.0],
    )?;

    println!("f(x) at x = (1, -1): {:.6}", forward(&params, &[1.0, -1.0])?);
    let risk = empirical_risk(&params, &data)?;
    println!("empirical risk: {risk:.6}");

    let grad = risk_gradient(&params, &data)?;
    for i in 0..params.h() {
        println!("gradient of node {i} group (u, v, b1): {:?}", grad.group(i));
    }
    println!("gradient w.r.t. output bias: {:.6}", grad.b2());

    // Central difference on the first hidden node's output weight.
    let j = params.d();
    let step = 1e-6;
    let shifted = |delta: f64| {
        let mut theta = params.as_slice().to_vec();
        theta[j] += delta;
        NetworkParams::from_vec(params.d(), params.h(), theta).and_then(|p| empirical_risk(&p, &data))
    };
    let fd = (shifted(step)? - shifted(-step)?) / (2.0 * step);
    let gap = (fd - grad.as_slice()[j]).abs();
    println!("finite difference {fd:.8} vs analytic {:.8} (gap {gap:.2e})", grad.as_slice()[j]);
    Ok(gap)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
