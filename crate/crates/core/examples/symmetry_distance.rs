//! Distance from a fitted network to the closest symmetric embedding of a
//! smaller reference network: nodes may be permuted, sign-flipped, and the
//! unused slots are charged their own norm.

use nodeprune::{distance_to_embedded_reference, NetworkParams, Result};

pub fn run_example() -> Result<f64> {
    let reference = NetworkParams::from_parts(&[vec![2.0, 0.0], vec![0.0, -1.0]], &[1.0, -0.5], &[0.0, 0.3], 0.1)?;

    // Same function with the nodes swapped, node 0 sign-flipped and an unused
    // third slot.
    let mut embedded = reference.padded(3)?.permuted(&[1, 0, 2])?;
    embedded.sign_flip(0);
    println!("exact embedding: distance {:.3e}", distance_to_embedded_reference(&embedded, &reference)?);
    println!("naive Euclidean distance ignoring symmetry: {:.3}", embedded.distance(&reference.padded(3)?)?);

    // A perturbed fit: small weights on the spare node and a shifted bias.
    let mut theta = embedded.as_slice().to_vec();
    theta[8..12].copy_from_slice(&[0.05, -0.02, 0.1, 0.0]);
    theta[12] += 0.2;
    let fitted = NetworkParams::from_vec(2, 3, theta)?;
    let d = distance_to_embedded_reference(&fitted, &reference)?;
    println!("perturbed fit: distance {d:.4}");
    Ok(d)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
