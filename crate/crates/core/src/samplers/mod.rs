//! Seeded variate and path generators for the processes in [`crate::laws`].
//!
//! Every sampler is a small validated struct implementing
//! [`rand_distr::Distribution`]; the free `sample_*` functions build one and
//! draw once.

mod counting;
mod phi;
mod products;
mod stable;

pub use counting::*;
pub use phi::*;
pub use products::*;
pub use stable::*;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Draws per parallel work unit. Unit `i` always uses stream `i`, so results
/// do not depend on the number of threads.
pub const CHUNK: usize = 1 << 14;

/// A ChaCha12 generator on an explicit `(seed, stream_index)` pair.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `n` draws of `f`, generated in parallel chunks of [`CHUNK`] with chunk `i`
/// on stream `first_stream + i`.
pub fn par_sample<T, F>(seed: u64, first_stream: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, first_stream + c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Piecewise-constant path: value `origin_level` before `times[0]`, then
/// `levels[i]` from `times[i]` on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JumpPath {
    pub times: Vec<f64>,
    pub levels: Vec<i64>,
    pub origin_level: i64,
}

impl JumpPath {
    pub fn empty(origin_level: i64) -> Self {
        JumpPath {
            times: Vec::new(),
            levels: Vec::new(),
            origin_level,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn terminal(&self) -> i64 {
        self.levels.last().copied().unwrap_or(self.origin_level)
    }

    /// Value at time `t` (right-continuous).
    pub fn value_at(&self, t: f64) -> i64 {
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            self.origin_level
        } else {
            self.levels[i - 1]
        }
    }

    /// Sizes of the successive jumps.
    pub fn jump_sizes(&self) -> impl Iterator<Item = i64> + '_ {
        std::iter::once(self.origin_level)
            .chain(self.levels.iter().copied())
            .zip(self.levels.iter().copied())
            .map(|(a, b)| b - a)
    }
}
