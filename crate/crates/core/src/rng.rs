//! Seeded random streams and Gaussian sampling.
//!
//! Every random quantity in the crate comes from a ChaCha8 stream addressed by
//! `(seed, stream)`. ChaCha is counter based, so streams never overlap and
//! replicate results do not depend on which thread ran them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used inside one replicate.
pub mod streams {
    pub const TRUE_PARAMS: u64 = 1;
    pub const INPUTS: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const INIT: u64 = 4;
    pub const SPLIT: u64 = 5;
    pub const REPLICATE_SEEDS: u64 = 6;
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of replicate `index` under `master`. Each replicate stores its own
/// seed so it can be rerun in isolation.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    let mut rng = stream(master, streams::REPLICATE_SEEDS);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Standard normal sampler using the Marsaglia polar method.
///
/// Keeps the spare deviate so consecutive calls consume uniforms in pairs.
#[derive(Debug)]
pub struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let a = 2.0 * self.rng.random::<f64>() - 1.0;
            let b = 2.0 * self.rng.random::<f64>() - 1.0;
            let s = a * a + b * b;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(b * m);
                return a * m;
            }
        }
    }

    pub fn fill(&mut self, out: &mut [f64], std: f64) {
        for x in out {
            *x = std * self.sample();
        }
    }

    pub fn into_inner(self) -> R {
        self.rng
    }
}
