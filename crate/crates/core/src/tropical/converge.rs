//! Rescaled amoebas against the spherical complex of a floor diagram.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::kappa_t_raw;
use crate::C64;

use super::floor::FloorDiagram;
use super::hausdorff::hausdorff;
use super::theta::build_theta;

/// Largest `|log|λ||` used by [`pencil_family`]; keeps `|λ|²` inside double range.
pub const PENCIL_LOG_RANGE: f64 = 300.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `ln t` for each scale.
    pub log_t: Vec<f64>,
    pub distances: Vec<f64>,
    /// Strictly decreasing over the whole schedule.
    pub monotone: bool,
    /// Strictly decreasing from the third scale on.
    pub eventually_decreasing: bool,
    pub final_distance: f64,
    pub tol: f64,
    pub passed: bool,
}

/// `n` points `r1 + λ·r2` of a line with `log|λ|` uniform in `±PENCIL_LOG_RANGE` and uniform phase.
///
/// Far out the sum is formed as `r1/λ + r2`. The amoeba is only resolved exactly when `r1` and `r2`
/// have disjoint supports, so that `det` never cancels.
pub fn pencil_family(r1: [C64; 4], r2: [C64; 4], n: usize, seed: u64) -> Vec<[C64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s: f64 = rng.random_range(-PENCIL_LOG_RANGE..=PENCIL_LOG_RANGE);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let lam = C64::from_polar(s.abs().exp(), th);
            if s <= 0.0 {
                std::array::from_fn(|k| r1[k] + r2[k] / lam)
            } else {
                std::array::from_fn(|k| r1[k] / lam + r2[k])
            }
        })
        .collect()
}

/// Hausdorff distance between `κₜ(V_t)` and `Θ(Δ)` along `schedule`, sampled at `density` points each.
pub fn kappa_convergence_check<F>(
    family: F,
    delta: &FloorDiagram,
    schedule: &[f64],
    density: usize,
    tol_conv: f64,
) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> Result<Vec<[C64; 4]>> + Sync,
{
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("schedule must be nonempty and increasing".into()));
    }
    if let Some(&t) = schedule.iter().find(|t| !(**t > 1.0)) {
        return Err(Error::BadScale(t));
    }
    let theta: Vec<[f64; 3]> = build_theta(delta)?.sample(density).points.iter().map(|p| p.v).collect();
    let distances = schedule
        .par_iter()
        .map(|&t| {
            let cloud = family(t)?
                .par_iter()
                .map(|m| Ok(kappa_t_raw(m, t)?.to_ball().v))
                .collect::<Result<Vec<_>>>()?;
            hausdorff(&cloud, &theta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let dec = |from: usize| distances.windows(2).skip(from).all(|w| w[1] < w[0]);
    let monotone = dec(0);
    let eventually_decreasing = dec(2);
    let final_distance = *distances.last().unwrap();
    Ok(ConvergenceReport {
        log_t: schedule.iter().map(|t| t.ln()).collect(),
        monotone,
        eventually_decreasing,
        final_distance,
        tol: tol_conv,
        passed: eventually_decreasing && final_distance < tol_conv,
        distances,
    })
}
