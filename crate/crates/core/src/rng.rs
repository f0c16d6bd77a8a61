//! SplitMix64 with keyed streams.
//!
//! Stream derivation: replication `i` under seed `s` starts from state
//! `mix(s ^ mix(i * GAMMA ^ STREAM_KEY))`, where `mix` is the SplitMix64
//! finalizer. Each step adds `GAMMA` to the state and outputs `mix(state)`.
//! Uniforms take the top 53 bits; normals are `Φ⁻¹` of an open-interval
//! uniform, so any reimplementation of these few lines reproduces every
//! stream bit for bit.

use crate::special::normal_quantile;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_KEY: u64 = 0x5851_f42d_4c95_7f2d;
const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream number `index` under `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        SplitMix64 {
            state: mix(seed ^ mix(index.wrapping_mul(GAMMA) ^ STREAM_KEY)),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Uniform on `(0, 1)`, never hitting either endpoint.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * INV_2_53
    }

    pub fn standard_normal(&mut self) -> f64 {
        normal_quantile(self.uniform_open())
    }
}
