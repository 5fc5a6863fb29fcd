/// SplitMix64 generator.
///
/// Chosen over an external RNG crate so that every stochastic artifact
/// (random fields, annealing proposals, test instances) reproduces bit-exactly
/// from a printed 64-bit seed, on any platform, with no version drift.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of mantissa.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval (-1, 1); zero draws are rejected so the
    /// endpoints are unreachable.
    pub fn next_open_pm1(&mut self) -> f64 {
        loop {
            let f = self.next_f64();
            if f != 0.0 {
                return 2.0 * f - 1.0;
            }
        }
    }

    /// Uniform integer in [0, n). The f64-scaling bias is below 2^-53 per
    /// draw, irrelevant for the small n used here.
    pub fn next_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let v = (self.next_f64() * n as f64) as usize;
        v.min(n - 1)
    }
}
