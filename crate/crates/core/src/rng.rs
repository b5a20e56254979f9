//! Seeded random streams.
//!
//! Every run owns one root seed. Each phase of the loop draws from its own
//! ChaCha stream of that seed, so swapping the selection method does not shift
//! the random numbers seen by initialization or down-sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init = 1,
    Downsample = 2,
    Selection = 3,
    Variation = 4,
    Data = 5,
    Split = 6,
    Noise = 7,
}

pub fn stream(seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = stream(9, Stream::Init).random();
        let b: u64 = stream(9, Stream::Selection).random();
        let a2: u64 = stream(9, Stream::Init).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }
}
