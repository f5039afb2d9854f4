//! Floor diagrams in the closed ball: widths, angles, bidegrees and weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hyperbolic::AbsPoint;

/// Two angles are the same when they differ by less than this (radians).
pub const ANGLE_EQ: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorVertex {
    #[serde(with = "crate::serde_ext")]
    pub r: f64,
    /// `(d₊, d₋)`, for positive and infinite width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bidegree: Option<[u32; 2]>,
    /// `δ`, for zero width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u32>,
}

impl FloorVertex {
    pub fn zero(delta: u32) -> Self {
        Self { r: 0.0, bidegree: None, delta: Some(delta) }
    }

    pub fn positive(r: f64, dp: u32, dm: u32) -> Self {
        Self { r, bidegree: Some([dp, dm]), delta: None }
    }

    pub fn infinite(dp: u32, dm: u32) -> Self {
        Self::positive(f64::INFINITY, dp, dm)
    }

    pub fn d_plus(&self) -> Option<u32> {
        self.bidegree.map(|b| b[0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorEdge {
    pub v1: usize,
    pub v2: usize,
    pub phi: AbsPoint,
    pub w: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorDiagram {
    pub degree: u32,
    pub vertices: Vec<FloorVertex>,
    pub edges: Vec<FloorEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloorRule {
    /// Widths, per-vertex data, indices and weights out of shape.
    Shape,
    EqualWidth,
    TotalDegree,
    Divergence,
    /// `d₊ = 0` forces a single angle at the vertex.
    DPlusZero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorViolation {
    pub rule: FloorRule,
    pub detail: String,
}

impl FloorDiagram {
    /// Weighted count of edges towards wider vertices minus those towards narrower ones.
    pub fn div(&self, v: usize) -> i64 {
        let r = self.vertices[v].r;
        self.edges
            .iter()
            .filter_map(|e| {
                let other = if e.v1 == v { e.v2 } else if e.v2 == v { e.v1 } else { return None };
                let ro = self.vertices.get(other)?.r;
                let w = e.w as i64;
                if ro > r {
                    Some(w)
                } else if ro < r {
                    Some(-w)
                } else {
                    Some(0)
                }
            })
            .sum()
    }

    /// Empty list iff the diagram is valid.
    pub fn validate(&self) -> Vec<FloorViolation> {
        let mut out = Vec::new();
        let mut bad = |rule, detail: String| out.push(FloorViolation { rule, detail });
        let nv = self.vertices.len();
        let mut shape_ok = true;
        for (i, v) in self.vertices.iter().enumerate() {
            if v.r.is_nan() || v.r < 0.0 {
                shape_ok = false;
                bad(FloorRule::Shape, format!("vertex {i}: width {} outside [0, inf]", v.r));
            } else if v.r == 0.0 && (v.delta.is_none() || v.bidegree.is_some()) {
                shape_ok = false;
                bad(FloorRule::Shape, format!("vertex {i}: zero width carries a degree and no bidegree"));
            } else if v.r > 0.0 && (v.bidegree.is_none() || v.delta.is_some()) {
                shape_ok = false;
                bad(FloorRule::Shape, format!("vertex {i}: positive width carries a bidegree and no degree"));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.v1 >= nv || e.v2 >= nv {
                shape_ok = false;
                bad(FloorRule::Shape, format!("edge {k}: endpoint out of range"));
            }
            if e.w == 0 {
                bad(FloorRule::Shape, format!("edge {k}: weight must be positive"));
            }
        }
        if !shape_ok {
            return out;
        }
        for (k, e) in self.edges.iter().enumerate() {
            if self.vertices[e.v1].r == self.vertices[e.v2].r {
                bad(FloorRule::EqualWidth, format!("edge {k} joins two vertices of width {}", self.vertices[e.v1].r));
            }
        }
        let total: u64 = self
            .vertices
            .iter()
            .map(|v| match (v.delta, v.bidegree) {
                (Some(d), _) => d as u64,
                (None, Some([p, m])) if v.r.is_finite() => p as u64 + m as u64,
                _ => 0,
            })
            .sum();
        if total != self.degree as u64 {
            bad(FloorRule::TotalDegree, format!("degrees add up to {total}, expected {}", self.degree));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let want = match (v.delta, v.bidegree) {
                (Some(d), _) => Some(2 * d as i64),
                (None, Some([p, m])) if v.r.is_finite() => Some(2 * (p as i64 + m as i64)),
                _ => None,
            };
            if let Some(want) = want {
                let div = self.div(i);
                if div != want {
                    bad(FloorRule::Divergence, format!("vertex {i}: div {div}, expected {want}"));
                }
            }
            if v.d_plus() == Some(0) {
                let mut angles = self.edges.iter().filter(|e| e.v1 == i || e.v2 == i).map(|e| e.phi);
                if let Some(first) = angles.next() {
                    if angles.any(|a| a.angle(&first) > ANGLE_EQ) {
                        bad(FloorRule::DPlusZero, format!("vertex {i}: d+ = 0 but edges leave at different angles"));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The common angle at a vertex with `d₊ = 0`, if it has edges.
    pub fn vertex_angle(&self, v: usize) -> Option<AbsPoint> {
        self.edges.iter().find(|e| e.v1 == v || e.v2 == v).map(|e| e.phi)
    }

    /// Limit diagram of a fixed line whose amoeba runs out to `ends`.
    pub fn constant_line(ends: [AbsPoint; 2]) -> Self {
        FloorDiagram {
            degree: 1,
            vertices: vec![FloorVertex::zero(1), FloorVertex::infinite(0, 0), FloorVertex::infinite(0, 0)],
            edges: vec![
                FloorEdge { v1: 0, v2: 1, phi: ends[0], w: 1 },
                FloorEdge { v1: 0, v2: 2, phi: ends[1], w: 1 },
            ],
        }
    }

    /// A degree-3 diagram: a bidegree-(0,1) vertex inside two (1,0) shells, six ends on the absolute.
    pub fn figure1() -> Self {
        let dir = |x: f64, y: f64, z: f64| AbsPoint::from_vec([x, y, z]).expect("nonzero");
        let inner = dir(0.3, 0.2, 0.93);
        let mut edges = vec![
            FloorEdge { v1: 0, v2: 1, phi: inner, w: 2 },
            FloorEdge { v1: 1, v2: 2, phi: dir(1.0, 0.1, 0.2), w: 1 },
            FloorEdge { v1: 1, v2: 2, phi: dir(-0.6, 0.7, -0.1), w: 1 },
        ];
        let mut vertices = vec![FloorVertex::positive(0.5, 0, 1), FloorVertex::positive(1.0, 1, 0), FloorVertex::positive(2.0, 1, 0)];
        let outer = [
            (1, dir(0.1, -1.0, 0.3)),
            (1, dir(-0.2, 0.1, -1.0)),
            (2, dir(1.0, 0.6, 0.4)),
            (2, dir(-1.0, -0.5, 0.5)),
            (2, dir(0.2, 0.9, 0.9)),
            (2, dir(0.4, -0.3, -0.9)),
        ];
        for (from, phi) in outer {
            vertices.push(FloorVertex::infinite(0, 0));
            edges.push(FloorEdge { v1: from, v2: vertices.len() - 1, phi, w: 1 });
        }
        FloorDiagram { degree: 3, vertices, edges }
    }

    /// One random change to a field the constraints control. Returns `None` when no such field exists.
    ///
    /// Edge angles away from `d₊ = 0` vertices and bidegrees of infinite-width vertices are left
    /// alone: no rule constrains them.
    pub fn mutate<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(String, FloorDiagram)> {
        let mut m = self.clone();
        let nv = self.vertices.len();
        let shift = |rng: &mut R, x: u32| -> u32 {
            loop {
                let k = rng.random_range(-3i64..=3);
                let y = x as i64 + k;
                if k != 0 && y >= 0 {
                    return y as u32;
                }
            }
        };
        for _ in 0..64 {
            match rng.random_range(0..6) {
                0 => {
                    m.degree = shift(rng, m.degree);
                    return Some(("degree".into(), m));
                }
                1 if !m.edges.is_empty() => {
                    let k = rng.random_range(0..m.edges.len());
                    let w = loop {
                        let w = shift(rng, m.edges[k].w);
                        if w > 0 {
                            break w;
                        }
                    };
                    m.edges[k].w = w;
                    return Some((format!("edges[{k}].w"), m));
                }
                2 => {
                    let i = rng.random_range(0..nv.max(1));
                    let v = m.vertices.get_mut(i)?;
                    if let Some(d) = v.delta {
                        v.delta = Some(shift(rng, d));
                        return Some((format!("vertices[{i}].delta"), m));
                    }
                    if let (Some(mut b), true) = (v.bidegree, v.r.is_finite()) {
                        let j = rng.random_range(0..2);
                        b[j] = shift(rng, b[j]);
                        v.bidegree = Some(b);
                        return Some((format!("vertices[{i}].bidegree[{j}]"), m));
                    }
                }
                3 if !m.edges.is_empty() => {
                    let k = rng.random_range(0..m.edges.len());
                    let e = m.edges[k].clone();
                    let (moved, other) = if rng.random_bool(0.5) { (e.v1, e.v2) } else { (e.v2, e.v1) };
                    m.vertices[moved].r = m.vertices[other].r;
                    return Some((format!("vertices[{moved}].r"), m));
                }
                4 if !m.edges.is_empty() && nv > 1 => {
                    let k = rng.random_range(0..m.edges.len());
                    let end = rng.random_range(0..2);
                    let old = if end == 0 { m.edges[k].v1 } else { m.edges[k].v2 };
                    let mut to = rng.random_range(0..nv);
                    if to == old {
                        to = (to + 1) % nv;
                    }
                    if end == 0 {
                        m.edges[k].v1 = to;
                    } else {
                        m.edges[k].v2 = to;
                    }
                    return Some((format!("edges[{k}].v{}", end + 1), m));
                }
                5 => {
                    let coupled: Vec<usize> = (0..m.edges.len())
                        .filter(|&k| {
                            let e = &m.edges[k];
                            [e.v1, e.v2].iter().any(|&v| {
                                self.vertices[v].d_plus() == Some(0)
                                    && self.edges.iter().filter(|f| f.v1 == v || f.v2 == v).count() > 1
                            })
                        })
                        .collect();
                    if coupled.is_empty() {
                        continue;
                    }
                    let k = coupled[rng.random_range(0..coupled.len())];
                    let p = m.edges[k].phi.vec();
                    m.edges[k].phi = AbsPoint::from_vec([p[1] + 0.5, p[2] - 0.3, p[0] + 0.2]).ok()?;
                    return Some((format!("edges[{k}].phi"), m));
                }
                _ => continue,
            }
        }
        None
    }
}
