//! Deterministic random streams.
//!
//! Every Monte Carlo replication owns a ChaCha8 stream. The 256-bit key is
//! derived with SplitMix64 from the master seed and a cell key (for the
//! simulation harness: both rates and both sample sizes), and the ChaCha
//! stream id is the replication index. Any replication can be regenerated on
//! its own and results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// One SplitMix64 output step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from(words: &[u64]) -> [u8; 32] {
    let mut state = 0u64;
    for &w in words {
        state ^= w;
        splitmix64(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// A stream seeded from a single 64-bit value.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::from_seed(key_from(&[seed]))
}

/// The stream for replication `replication` of the cell identified by `cell`.
pub fn substream(master_seed: u64, cell: &[u64], replication: u64) -> StreamRng {
    let mut words = Vec::with_capacity(cell.len() + 1);
    words.push(master_seed);
    words.extend_from_slice(cell);
    let mut rng = ChaCha8Rng::from_seed(key_from(&words));
    rng.set_stream(replication);
    rng
}
