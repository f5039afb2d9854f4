//! The spherical complex of a floor diagram: shells, points and radial segments in the closed ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{AbsPoint, BallPoint};
use crate::sample::fibonacci_sphere;

use super::floor::FloorDiagram;

/// Euclidean radius in the ball of the hyperbolic radius `r` (`∞ ↦ 1`).
pub fn ball_radius(r: f64) -> f64 {
    if r.is_infinite() { 1.0 } else { (r / 2.0).tanh() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "piece", rename_all = "snake_case")]
pub enum Piece {
    /// `S²(r)`.
    Shell {
        #[serde(with = "crate::serde_ext")]
        r: f64,
    },
    /// `(r, φ)`.
    Point {
        #[serde(with = "crate::serde_ext")]
        r: f64,
        phi: AbsPoint,
    },
    /// `R_φ[r1, r2]` with `r1 < r2`.
    Segment {
        phi: AbsPoint,
        #[serde(with = "crate::serde_ext")]
        r1: f64,
        #[serde(with = "crate::serde_ext")]
        r2: f64,
    },
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn scaled(phi: &AbsPoint, s: f64) -> [f64; 3] {
    phi.vec().map(|x| s * x)
}

impl Piece {
    /// Euclidean distance in the ball from `p` to the piece.
    pub fn distance(&self, p: &[f64; 3]) -> f64 {
        match self {
            Piece::Shell { r } => {
                let n = dist3(p, &[0.0; 3]);
                (n - ball_radius(*r)).abs()
            }
            Piece::Point { r, phi } => dist3(p, &scaled(phi, ball_radius(*r))),
            Piece::Segment { phi, r1, r2 } => {
                let u = phi.vec();
                let s = (p[0] * u[0] + p[1] * u[1] + p[2] * u[2]).clamp(ball_radius(*r1), ball_radius(*r2));
                dist3(p, &scaled(phi, s))
            }
        }
    }

    fn measure(&self) -> (f64, f64) {
        match self {
            Piece::Shell { r } => (4.0 * std::f64::consts::PI * ball_radius(*r).powi(2), 0.0),
            Piece::Point { .. } => (0.0, 0.0),
            Piece::Segment { r1, r2, .. } => (0.0, ball_radius(*r2) - ball_radius(*r1)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SphericalComplex {
    pub pieces: Vec<Piece>,
}

/// A sample of a complex, each point tagged with the index of its piece.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TaggedCloud {
    pub points: Vec<BallPoint>,
    pub pieces: Vec<u32>,
}

impl SphericalComplex {
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn distance(&self, p: &[f64; 3]) -> f64 {
        self.pieces.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// About `density` points spread at a common spacing: shells on Fibonacci spheres,
    /// segments uniformly in ball radius, one point per point piece.
    pub fn sample(&self, density: usize) -> TaggedCloud {
        let mut out = TaggedCloud::default();
        if self.pieces.is_empty() {
            return out;
        }
        let (area, len, npts) = self.pieces.iter().fold((0.0, 0.0, 0.0), |(a, l, n), p| {
            let (pa, pl) = p.measure();
            (a + pa, l + pl, n + matches!(p, Piece::Point { .. }) as u8 as f64)
        });
        let budget = (density as f64 - npts).max(1.0);
        let inv_h = if area > 0.0 {
            (-len + (len * len + 4.0 * area * budget).sqrt()) / (2.0 * area)
        } else if len > 0.0 {
            budget / len
        } else {
            0.0
        };
        let mut push = |v: [f64; 3], boundary: bool, tag: usize| {
            out.points.push(BallPoint { v, boundary });
            out.pieces.push(tag as u32);
        };
        for (tag, piece) in self.pieces.iter().enumerate() {
            match piece {
                Piece::Shell { r } => {
                    let (a, _) = piece.measure();
                    let n = ((a * inv_h * inv_h).round() as usize).max(1);
                    let br = ball_radius(*r);
                    if br == 0.0 {
                        push([0.0; 3], false, tag);
                        continue;
                    }
                    for u in fibonacci_sphere(n) {
                        push(u.map(|x| br * x), r.is_infinite(), tag);
                    }
                }
                Piece::Point { r, phi } => push(scaled(phi, ball_radius(*r)), r.is_infinite(), tag),
                Piece::Segment { phi, r1, r2 } => {
                    let (a, b) = (ball_radius(*r1), ball_radius(*r2));
                    let n = (((b - a) * inv_h).round() as usize).max(1) + 1;
                    for k in 0..n {
                        let s = a + (b - a) * k as f64 / (n - 1) as f64;
                        push(scaled(phi, s), k == n - 1 && r2.is_infinite(), tag);
                    }
                }
            }
        }
        out
    }
}

/// `Θ(Δ)`: shells for `d₊ > 0`, single points for `d₊ = 0` and zero width, one segment per edge.
pub fn build_theta(delta: &FloorDiagram) -> Result<SphericalComplex> {
    let v = delta.validate();
    if !v.is_empty() {
        let msg: Vec<String> = v.iter().map(|x| x.detail.clone()).collect();
        return Err(Error::Invalid(format!("floor diagram: {}", msg.join("; "))));
    }
    let mut pieces = Vec::new();
    for (i, v) in delta.vertices.iter().enumerate() {
        match v.d_plus() {
            Some(dp) if dp > 0 => pieces.push(Piece::Shell { r: v.r }),
            _ if v.r == 0.0 => pieces.push(Piece::Shell { r: 0.0 }),
            _ => {
                if let Some(phi) = delta.vertex_angle(i) {
                    pieces.push(Piece::Point { r: v.r, phi });
                }
            }
        }
    }
    for e in &delta.edges {
        let (a, b) = (delta.vertices[e.v1].r, delta.vertices[e.v2].r);
        pieces.push(Piece::Segment { phi: e.phi, r1: a.min(b), r2: a.max(b) });
    }
    Ok(SphericalComplex { pieces })
}
