//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator whose 256-bit
//! seed is `SHA-256("msncap-stream-v1" ‖ master ‖ tag ‖ 0x00 ‖ index)`, with
//! integers encoded little-endian. Streams for different trials or purposes
//! are therefore independent of evaluation order and thread count.

use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::rational::Rational;

/// Number of fractional bits in sampled dyadic rationals.
pub const DYADIC_BITS: u32 = 53;

/// The generator for `(master seed, purpose tag, index)`.
pub fn stream(master: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"msncap-stream-v1");
    h.update(master.to_le_bytes());
    h.update(tag.as_bytes());
    h.update([0u8]);
    h.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// A 64-bit seed drawn from the stream for `(master, tag, index)`.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    stream(master, tag, index).next_u64()
}

/// Integer numerator `k` of a uniform dyadic sample `k / 2^53` on `[0, 1]`.
pub fn dyadic_numerator<R: Rng>(rng: &mut R) -> i64 {
    rng.gen_range(0..=(1i64 << DYADIC_BITS))
}

/// Uniform dyadic rational on `[0, 1]` with denominator `2^53`.
pub fn dyadic_unit<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(dyadic_numerator(rng)), BigInt::from(1i64 << DYADIC_BITS))
}
