use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every randomized routine: ChaCha8 keyed by `seed`,
/// with one independent stream per replica.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
