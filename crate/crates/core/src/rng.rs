//! Deterministic random substreams.
//!
//! Every independent unit of Monte Carlo work (an SNR point, a frame, a grid
//! cell) draws from its own generator keyed by `(seed, unit, index)`, so the
//! outcome does not depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for work unit `(unit, index)` under a master `seed`.
pub fn substream(seed: u64, unit: u64, index: u64) -> SimRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let words = [
        splitmix64(&mut state) ^ unit.rotate_left(17),
        splitmix64(&mut state) ^ index.rotate_left(41),
        splitmix64(&mut state) ^ unit.wrapping_mul(0xA24B_AED4_963E_E407),
        splitmix64(&mut state) ^ index.wrapping_mul(0x9FB2_1C65_1E98_DF25),
    ];
    let mut mix = words[0] ^ words[1] ^ words[2] ^ words[3];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&(w ^ splitmix64(&mut mix)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
