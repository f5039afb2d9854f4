//! Hausdorff distance between point clouds in the closed unit ball.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Uniform bucket grid over the bounding box of a cloud.
pub struct Grid<'a> {
    pts: &'a [[f64; 3]],
    lo: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> Grid<'a> {
    pub fn new(pts: &'a [[f64; 3]]) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in pts {
            for j in 0..3 {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        let side = (0..3).map(|j| hi[j] - lo[j]).fold(0.0, f64::max).max(1e-12);
        let per = (pts.len() as f64).cbrt().ceil().max(1.0);
        let cell = side / per;
        let dims: [usize; 3] = std::array::from_fn(|j| (((hi[j] - lo[j]) / cell).floor() as usize + 1).min(1 << 10));
        let ncell = dims[0] * dims[1] * dims[2];
        let mut g = Grid { pts, lo, cell, dims, start: vec![0; ncell + 1], order: vec![0; pts.len()] };
        let ids: Vec<usize> = pts.iter().map(|p| g.flat(g.cell_of(p))).collect();
        for &c in &ids {
            g.start[c + 1] += 1;
        }
        for c in 0..ncell {
            g.start[c + 1] += g.start[c];
        }
        let mut fill = g.start.clone();
        for (i, &c) in ids.iter().enumerate() {
            g.order[fill[c]] = i;
            fill[c] += 1;
        }
        g
    }

    fn cell_of(&self, p: &[f64; 3]) -> [usize; 3] {
        std::array::from_fn(|j| (((p[j] - self.lo[j]) / self.cell).floor().max(0.0) as usize).min(self.dims[j] - 1))
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    /// Distance from `q` to the nearest cloud point.
    pub fn nearest(&self, q: &[f64; 3]) -> f64 {
        let c = self.cell_of(q);
        let mut best = f64::INFINITY;
        let maxr = *self.dims.iter().max().unwrap();
        for ring in 0..=maxr {
            let r = ring as isize;
            let range = |j: usize| {
                let a = (c[j] as isize - r).max(0) as usize;
                let b = ((c[j] as isize + r) as usize).min(self.dims[j] - 1);
                a..=b
            };
            for z in range(2) {
                for y in range(1) {
                    for x in range(0) {
                        let cheb = [x, y, z]
                            .iter()
                            .zip(&c)
                            .map(|(&a, &b)| (a as isize - b as isize).unsigned_abs())
                            .max()
                            .unwrap();
                        if cheb != ring {
                            continue;
                        }
                        let f = self.flat([x, y, z]);
                        for &i in &self.order[self.start[f]..self.start[f + 1]] {
                            let p = &self.pts[i];
                            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                            best = best.min(d2);
                        }
                    }
                }
            }
            if best.is_finite() && best.sqrt() <= ring as f64 * self.cell {
                break;
            }
        }
        best.sqrt()
    }
}

/// `max_{a∈A} min_{b∈B} |a − b|`.
pub fn directed_hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let g = Grid::new(b);
    Ok(a.par_iter().map(|p| g.nearest(p)).reduce(|| 0.0, f64::max))
}

/// Symmetric Hausdorff distance in the Euclidean metric of the ball.
pub fn hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
