//! Deterministic, label-addressed random streams.
//!
//! Every stream is a SplitMix64 generator whose starting state is derived
//! from a master seed and a path of integer labels:
//!
//! ```text
//! mix(z)   = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!            z ^= z >> 27; z *= 0x94D049BB133111EB;
//!            z ^ (z >> 31)                       (wrapping arithmetic)
//! state    = mix(seed)
//! for each label l:  state = mix((state + 0x9E3779B97F4A7C15) ^ mix(l))
//! next_u64 = state += 0x9E3779B97F4A7C15; mix(state)
//! uniform  = (next_u64 >> 11) * 2^-53            in [0, 1)
//! ```
//!
//! Normal deviates use the basic Box-Muller transform on two consecutive
//! uniforms `u1, u2`: `r = sqrt(-2 ln(1 - u1))`, emitting `r cos(2 pi u2)`
//! then `r sin(2 pi u2)`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RngStream {
    state: u64,
    spare: Option<f64>,
}

/// Stream for `(master_seed, labels)`; an empty label path is valid.
pub fn derive_stream(master_seed: u64, labels: &[u64]) -> RngStream {
    let state = labels.iter().fold(mix64(master_seed), |state, &label| {
        mix64(state.wrapping_add(GOLDEN_GAMMA) ^ mix64(label))
    });
    RngStream { state, spare: None }
}

impl RngStream {
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One uniformly random bit, taken from the top of the next word.
    pub fn next_bit(&mut self) -> u8 {
        (self.next_u64() >> 63) as u8
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn bits(&mut self, count: usize) -> Vec<u8> {
        (0..count).map(|_| self.next_bit()).collect()
    }
}
