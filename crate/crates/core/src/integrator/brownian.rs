//! Counter-based Brownian increments.
//!
//! Every path owns a ChaCha8 stream selected by `path_index` under a key
//! derived from the master seed. Each step consumes exactly `4 d` 32-bit
//! words (two `u64` per Box-Muller normal), so increment `k` of a path sits at
//! a fixed word position and can be regenerated in isolation. Results never
//! depend on which worker simulates which path.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS_PER_NORMAL: u128 = 4;
const TWO_PI: f64 = std::f64::consts::TAU;
const INV_2_53: f64 = 1.0 / 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrownianSource {
    master_seed: u64,
    dim: usize,
}

impl BrownianSource {
    pub fn new(master_seed: u64, dim: usize) -> Self {
        Self { master_seed, dim }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn rng(&self, path_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(path_index);
        rng
    }

    /// `ΔB_k = B((k+1)Δ) - B(kΔ)` for the given path, `~ N(0, Δ I_d)`.
    pub fn increment(&self, path_index: u64, k: usize, dt: f64) -> Vec<f64> {
        let mut rng = self.rng(path_index);
        rng.set_word_pos(k as u128 * self.dim as u128 * WORDS_PER_NORMAL);
        let mut stream = BrownianStream {
            rng,
            scale: dt.sqrt(),
        };
        let mut out = vec![0.0; self.dim];
        stream.fill(&mut out);
        out
    }

    /// Sequential increments `k = 0, 1, 2, ...` of one path.
    pub fn stream(&self, path_index: u64, dt: f64) -> BrownianStream {
        BrownianStream {
            rng: self.rng(path_index),
            scale: dt.sqrt(),
        }
    }
}

pub struct BrownianStream {
    rng: ChaCha8Rng,
    scale: f64,
}

impl BrownianStream {
    fn standard_normal(&mut self) -> f64 {
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * INV_2_53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * INV_2_53;
        (-2.0 * u1.ln()).sqrt() * (TWO_PI * u2).cos()
    }

    /// Writes the next increment into `out`.
    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.scale * self.standard_normal();
        }
    }
}
