//! Shared test support: term generators, the α closure oracle, a fleet of
//! system-2 interpretations and a corpus of checked derivations.
#![allow(dead_code)]

pub mod corpus;
pub mod fleet;
pub mod infer;
pub mod laws;
pub mod logic;
pub mod terms;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases: n, failure_persistence: None, ..Default::default() }
}
