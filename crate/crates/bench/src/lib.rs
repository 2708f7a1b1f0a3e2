//! Seeded inputs shared by the benchmarks.

use conley_core::{fixtures, GradedComplex, PrimeField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn gf2() -> PrimeField {
    PrimeField::new(2).expect("2 is prime")
}

/// A `side × side` grid graded by a random two-valued function.
pub fn two_level_grid(side: usize, seed: u64) -> GradedComplex {
    fixtures::random_two_level_grid(&mut ChaCha8Rng::seed_from_u64(seed), gf2(), side)
}
