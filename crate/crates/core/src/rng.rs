//! Seeded random streams.
//!
//! Every sampler takes an explicit `&mut Rng`. Parallel work derives one
//! stream per task from `(master seed, task index)` so results do not depend
//! on scheduling. All draws go through fixed-width integer or `f64`
//! conversions, never `usize` ranges, so outputs match across platforms.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Stream for the master seed alone (task 0).
pub fn from_seed(seed: u64) -> Rng {
    derive(seed, 0)
}

/// Independent stream for task `task` under `seed`.
pub fn derive(seed: u64, task: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Uniform integer in `0..bound`. `bound` must be positive.
pub fn below(rng: &mut Rng, bound: usize) -> usize {
    debug_assert!(bound > 0);
    rng.gen_range(0..bound as u64) as usize
}

/// Uniform in `[0, 1)` with 53 bits of precision.
pub fn unit(rng: &mut Rng) -> f64 {
    rng.gen::<f64>()
}

pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// Uniform permutation of `0..n` as a forward table.
pub fn permutation(rng: &mut Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    shuffle(rng, &mut p);
    p
}

/// Uniform `k`-subset of `0..n`, returned in draw order.
pub fn subset(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Draw an index from a probability vector by inverse CDF.
pub fn categorical(rng: &mut Rng, probs: &[f64]) -> usize {
    let u = unit(rng);
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative value
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
