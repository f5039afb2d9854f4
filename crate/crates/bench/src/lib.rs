//! Shared fixtures for the benchmarks.

use hypam::{sample, Line, ProjPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` random matrices away from the quadric.
pub fn matrices(n: usize, seed: u64) -> Vec<ProjPoint> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = sample::proj(&mut r);
        if !p.on_quadric_tol(1e-3) {
            out.push(p);
        }
    }
    out
}

/// `n` lines through pairs of random points.
pub fn lines(n: usize, seed: u64) -> Vec<Line> {
    let mut r = rng(seed);
    (0..n).filter_map(|_| Line::through(&sample::proj(&mut r), &sample::proj(&mut r)).ok()).collect()
}

/// `n` random points of the unit ball.
pub fn ball_cloud(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut r = rng(seed);
    (0..n).map(|_| sample::unit3(&mut r).map(|x| x * rand::Rng::random::<f64>(&mut r))).collect()
}
