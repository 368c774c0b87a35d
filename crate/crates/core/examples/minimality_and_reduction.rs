//! Detect why a network is not minimal and reduce it to an equivalent
//! minimal network computing the same function.

use nodeprune::structure::strip_zero_nodes;
use nodeprune::{canonical_reduce, check_minimal, count_nodes, forward, NetworkParams, Result, StructureTolerances};

pub fn run_example() -> Result<NetworkParams> {
    // Node 1 duplicates node 0 up to sign, node 2 has no input weights and
    // node 3 has a zero output weight.
    let params = NetworkParams::from_parts(
        &[vec![1.0, -2.0], vec![-1.0, 2.0], vec![0.0, 0.0], vec![0.7, 0.7]],
        &[0.5, 0.25, 1.0, 0.0],
        &[0.3, -0.3, 0.4, 0.1],
        -0.2,
    )?;
    let tol = StructureTolerances::default();
    let report = check_minimal(&params, tol);
    println!("minimal: {}", report.minimal);
    for v in &report.violations {
        println!("  {:?} at nodes {:?}", v.kind, v.nodes);
    }
    println!("{:?}", count_nodes(&params, tol));

    // Absorbed nodes become zero slots; drop them to get the compact network.
    let reduced = strip_zero_nodes(&canonical_reduce(&params, tol), 0.0);
    println!("reduced to {} hidden node(s); minimal: {}", reduced.h(), check_minimal(&reduced, tol).minimal);
    for x in [[0.0, 0.0], [1.0, 0.5], [-2.0, 1.0]] {
        println!("x = {x:?}: original {:.12}, reduced {:.12}", forward(&params, &x)?, forward(&reduced, &x)?);
    }
    Ok(reduced)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
