//! Counter-based seed splitting.
//!
//! One master seed drives every experiment. Replica `i` gets ChaCha stream
//! `i` of a key derived from the master seed, so any single replica is
//! reproducible in isolation and results are independent of how replicas are
//! scheduled across threads. Sub-streams (one per word class, per tower,
//! per event kind) hang off a replica by a further counter, so per-class
//! event streams survive refactorings of unrelated sampling code.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64; the standard way to expand a 64-bit seed into key material.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn key_from(master: u64, domain: u64) -> [u8; 32] {
    let mut state = master ^ domain.wrapping_mul(0xd1b54a32d192ed03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// RNG for replica `replica` of the experiment seeded by `master`.
pub fn replica_rng(master: u64, replica: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::from_seed(key_from(master, 0));
    rng.set_stream(replica);
    rng
}

/// Independent sub-stream `index` within a replica (per-class immigration
/// streams, per-tower insertion choices, and the like).
pub fn sub_rng(master: u64, replica: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::from_seed(key_from(master ^ splitmix64(&mut { replica }), 1));
    rng.set_stream(index);
    rng
}
