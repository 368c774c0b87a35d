//! Block soft-thresholding, the proximal map of the group norm, applied to a
//! node group at increasing thresholds, plus adaptive weights derived from a
//! group-sparse fit.

use nodeprune::{adaptive_weights, block_soft_threshold, group_norms, NetworkParams, NodeGroup, Result};

pub fn run_example() -> Result<Vec<f64>> {
    let group = NodeGroup { node_index: 0, values: vec![3.0, -4.0, 0.0] };
    println!("input group {:?} with norm {}", group.values, group.norm());
    let mut norms = Vec::new();
    for t in [0.0, 1.0, 2.5, 5.0, 7.0] {
        let out = block_soft_threshold(&group, t)?;
        println!("threshold {t:>4}: {:?} (norm {:.3})", out.values, out.norm());
        norms.push(out.norm());
    }

    // Weights ‖w_i‖^(-γ) for a fit whose second node was pruned: that group is
    // frozen at zero instead of receiving an infinite weight.
    let fit = NetworkParams::from_parts(&[vec![0.5], vec![0.0], vec![2.0]], &[1.0, 0.0, -1.0], &[0.0, 0.0, 0.5], 0.1)?;
    let (weights, frozen) = adaptive_weights(&fit, 2.0, 1e-8)?;
    println!("group norms {:?}", group_norms(&fit));
    println!("adaptive weights {weights:?}, frozen {frozen:?}");
    Ok(norms)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
