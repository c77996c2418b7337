//! Deterministic pseudo-random number generation.
//!
//! Every seeded quantity in the crate (random step sequences, random initial
//! data) is drawn from SplitMix64, a tiny counter-based generator with a
//! portable, exactly specified bit stream. Pinning the generator makes all
//! randomized runs bit-reproducible across platforms and releases; the
//! harness echoes the generator name in every output header.

/// SplitMix64 generator. The stream is a pure function of the seed.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Creates a generator positioned at the start of the stream for `seed`.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Returns the next 64 pseudo-random bits.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Returns a uniform double in `[0, 1)`: the top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_stream_head() {
        // Published test vector for the zero seed.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
        // Different seeds give different streams.
        let mut rng3 = SplitMix64::new(1);
        assert_ne!(rng3.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn doubles_in_unit_interval() {
        let mut rng = SplitMix64::new(12345);
        for _ in 0..1000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
