//! Parameterised tropical curves in `Rⁿ`, the scaled logarithm and the Ψ sampler.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalVertex {
    #[serde(default)]
    pub genus: u32,
    pub position: Vec<f64>,
}

/// An edge oriented from `v1` to `v2`; a missing endpoint is a leaf going off to infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalEdge {
    pub v1: Option<usize>,
    pub v2: Option<usize>,
    /// Primitive integer direction; zero on a contracted edge.
    pub direction: Vec<i64>,
    /// `u(E) = weight·direction`; 0 only on a contracted edge.
    pub weight: u32,
    #[serde(with = "crate::serde_ext")]
    pub length: f64,
    /// A point of `h(E)` for an edge with no endpoints; the origin if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<f64>>,
}

impl TropicalEdge {
    pub fn bounded(v1: usize, v2: usize, direction: Vec<i64>, weight: u32, length: f64) -> Self {
        Self { v1: Some(v1), v2: Some(v2), direction, weight, length, base: None }
    }

    /// A leaf leaving `v` in the direction `direction`.
    pub fn leaf(v: usize, direction: Vec<i64>, weight: u32) -> Self {
        Self { v1: Some(v), v2: None, direction, weight, length: f64::INFINITY, base: None }
    }

    /// The whole line through `base` (origin if `None`).
    pub fn line(direction: Vec<i64>, weight: u32, base: Option<Vec<f64>>) -> Self {
        Self { v1: None, v2: None, direction, weight, length: f64::INFINITY, base }
    }

    /// Weighted slopes of the unbounded ends, oriented towards infinity.
    fn ends(&self) -> Vec<Vec<i64>> {
        let w = self.weight as i64;
        let fwd: Vec<i64> = self.direction.iter().map(|x| w * x).collect();
        let back: Vec<i64> = fwd.iter().map(|x| -x).collect();
        match (self.v1, self.v2) {
            (Some(_), Some(_)) => vec![],
            (Some(_), None) => vec![fwd],
            (None, Some(_)) => vec![back],
            (None, None) => vec![fwd, back],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalCurveGraph {
    pub dim: usize,
    pub vertices: Vec<TropicalVertex>,
    pub edges: Vec<TropicalEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphRule {
    Shape,
    Genus,
    Balancing,
    Geometry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphViolation {
    pub rule: GraphRule,
    pub detail: String,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

impl TropicalCurveGraph {
    pub fn new(dim: usize, vertices: Vec<TropicalVertex>, edges: Vec<TropicalEdge>) -> Self {
        Self { dim, vertices, edges }
    }

    /// Empty list iff the graph is a tropical curve.
    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut out = Vec::new();
        let mut bad = |rule, detail: String| out.push(GraphViolation { rule, detail });
        let n = self.dim;
        for (i, v) in self.vertices.iter().enumerate() {
            if v.position.len() != n || v.position.iter().any(|x| !x.is_finite()) {
                bad(GraphRule::Shape, format!("vertex {i}: position must be a finite point of R^{n}"));
            }
        }
        let mut shape_ok = true;
        for (k, e) in self.edges.iter().enumerate() {
            let mut fail = |d: String| {
                shape_ok = false;
                bad(GraphRule::Shape, format!("edge {k}: {d}"));
            };
            if e.direction.len() != n {
                fail(format!("direction has {} coordinates, expected {n}", e.direction.len()));
                continue;
            }
            let g = e.direction.iter().fold(0, |g, &x| gcd(g, x));
            if (e.weight == 0) != (g == 0) || g > 1 {
                fail("direction must be primitive, or zero on a contracted edge of weight 0".into());
            }
            for v in [e.v1, e.v2].into_iter().flatten() {
                if v >= self.vertices.len() {
                    fail(format!("endpoint {v} out of range"));
                }
            }
            let leaf = e.v1.is_none() || e.v2.is_none();
            if leaf != e.length.is_infinite() || !(e.length > 0.0) {
                fail("length must be positive, and infinite exactly on unbounded edges".into());
            }
            if let Some(b) = &e.base {
                if b.len() != n || e.v1.is_some() || e.v2.is_some() {
                    fail("base is only allowed on a full line and must lie in R^n".into());
                }
            }
        }
        if !shape_ok {
            return out;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let valence: usize = self.edges.iter().map(|e| (e.v1 == Some(i)) as usize + (e.v2 == Some(i)) as usize).sum();
            if valence == 1 && v.genus == 0 {
                bad(GraphRule::Genus, format!("vertex {i}: 1-valent vertex of genus 0"));
            }
            let mut sum = vec![0i64; n];
            for e in &self.edges {
                let w = e.weight as i64;
                let sign = (e.v1 == Some(i)) as i64 - (e.v2 == Some(i)) as i64;
                sum.iter_mut().zip(&e.direction).for_each(|(s, x)| *s += sign * w * x);
            }
            if sum.iter().any(|&x| x != 0) {
                bad(GraphRule::Balancing, format!("vertex {i}: outgoing slopes sum to {sum:?}"));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (e.v1, e.v2) {
                let (pa, pb) = (&self.vertices[a].position, &self.vertices[b].position);
                let err = (0..n)
                    .map(|j| (pb[j] - pa[j] - e.length * (e.weight as i64 * e.direction[j]) as f64).abs())
                    .fold(0.0, f64::max);
                let scale = 1.0 + e.length * (e.weight as i64 * e.direction.iter().map(|x| x.abs()).max().unwrap_or(0)) as f64;
                if err > 1e-9 * scale {
                    bad(GraphRule::Geometry, format!("edge {k}: h(v2) - h(v1) misses length*w*u by {err:e}"));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Sum over unbounded ends of the largest coordinate of `w·u`, or 0 if none is positive.
    pub fn tropical_degree(&self) -> u64 {
        self.edges
            .iter()
            .flat_map(|e| e.ends())
            .map(|u| u.into_iter().max().unwrap_or(0).max(0) as u64)
            .sum()
    }

    /// `(point, slope)` parameterising `h(E)` from its first available anchor.
    fn edge_anchor(&self, e: &TropicalEdge) -> (Vec<f64>, f64) {
        match (e.v1, e.v2) {
            (Some(a), _) => (self.vertices[a].position.clone(), 1.0),
            (None, Some(b)) => (self.vertices[b].position.clone(), -1.0),
            (None, None) => (e.base.clone().unwrap_or_else(|| vec![0.0; self.dim]), 1.0),
        }
    }

    /// The segment `h(E)`, with unbounded edges cut at `leaf_len`.
    pub fn edge_point(&self, k: usize, s: f64, leaf_len: f64) -> Vec<f64> {
        let e = &self.edges[k];
        let (p, sign) = self.edge_anchor(e);
        let len = if e.length.is_finite() { e.length } else { leaf_len };
        let x = match (e.v1, e.v2) {
            (None, None) => (2.0 * s - 1.0) * len,
            _ => s * len,
        };
        p.iter().zip(&e.direction).map(|(pj, &u)| pj + sign * x * u as f64).collect()
    }
}

/// `(log_t|z₁|, …, log_t|zₙ|)`.
pub fn log_t(z: &[C64], t: f64) -> Result<Vec<f64>> {
    if !(t > 1.0) {
        return Err(Error::BadScale(t));
    }
    let lt = t.ln();
    z.iter()
        .enumerate()
        .map(|(i, zi)| {
            let r = zi.norm();
            if r == 0.0 || !r.is_finite() {
                Err(Error::ZeroCoordinate(i))
            } else {
                Ok(r.ln() / lt)
            }
        })
        .collect()
}

/// Tail agreement required of the extrapolated limit.
pub const TROP_LIMIT_TOL: f64 = 1e-3;

/// Estimates `lim log_{t_k}|z_k|`.
///
/// The tail is fitted by `L + c/ln t`; `None` when the fit leaves residuals above
/// [`TROP_LIMIT_TOL`] or when the terms run off to opposite infinities.
pub fn trop_limit(seq: &[(f64, C64)]) -> Result<Option<f64>> {
    if seq.is_empty() {
        return Err(Error::Invalid("empty sequence".into()));
    }
    if let Some(&(t, _)) = seq.iter().find(|(t, _)| !(*t > 1.0)) {
        return Err(Error::BadScale(t));
    }
    let tail = &seq[seq.len() / 2..];
    let zeros = tail.iter().filter(|(_, z)| z.norm() == 0.0).count();
    if zeros == tail.len() {
        return Ok(Some(f64::NEG_INFINITY));
    }
    if zeros > 0 {
        return Ok(None);
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|(t, z)| (1.0 / t.ln(), z.norm().ln() / t.ln())).collect();
    if pts.len() == 1 {
        return Ok(Some(pts[0].1));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let limit = my - slope * mx;
    let resid = pts.iter().map(|(x, y)| (y - limit - slope * x).abs()).fold(0.0, f64::max);
    if resid > TROP_LIMIT_TOL * (1.0 + limit.abs()) {
        let last = pts.last().unwrap().1;
        let rising = pts.windows(2).all(|w| w[1].1 > w[0].1);
        let falling = pts.windows(2).all(|w| w[1].1 < w[0].1);
        if rising && last > 1.0 / TROP_LIMIT_TOL {
            return Ok(Some(f64::INFINITY));
        }
        if falling && last < -1.0 / TROP_LIMIT_TOL {
            return Ok(Some(f64::NEG_INFINITY));
        }
        return Ok(None);
    }
    Ok(Some(limit))
}

/// A closed geodesic `θ ↦ base + θ·direction` of the torus `(S¹)ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeCircle {
    pub base: Vec<f64>,
    pub direction: Vec<i64>,
}

/// A point of `Rⁿ × (S¹)ⁿ`, angles in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiPoint {
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

/// `⋃_v {h(v)}×Arg_v ∪ ⋃_E h(E)×Arg_E` assembled from supplied phase data.
#[derive(Clone, Debug)]
pub struct PsiSampler {
    graph: TropicalCurveGraph,
    vertex_phases: Vec<Vec<Vec<f64>>>,
    edge_circles: Vec<EdgeCircle>,
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(std::f64::consts::TAU)
}

/// `vertex_coamoebas[v]` is a cloud of angle vectors over `h(v)`; `edge_circles[k]` the circle over edge `k`.
/// Either list may be empty; otherwise it must match the graph.
pub fn build_psi(
    trop: &TropicalCurveGraph,
    vertex_coamoebas: Vec<Vec<Vec<f64>>>,
    edge_circles: Vec<EdgeCircle>,
) -> Result<PsiSampler> {
    let n = trop.dim;
    let mismatch = |s: String| Err(Error::DimensionMismatch(s));
    if !vertex_coamoebas.is_empty() && vertex_coamoebas.len() != trop.vertices.len() {
        return mismatch(format!("{} vertex clouds for {} vertices", vertex_coamoebas.len(), trop.vertices.len()));
    }
    if !edge_circles.is_empty() && edge_circles.len() != trop.edges.len() {
        return mismatch(format!("{} circles for {} edges", edge_circles.len(), trop.edges.len()));
    }
    if vertex_coamoebas.iter().flatten().any(|a| a.len() != n) {
        return mismatch(format!("vertex phases must have {n} angles"));
    }
    for (k, (c, e)) in edge_circles.iter().zip(&trop.edges).enumerate() {
        if c.base.len() != n || c.direction.len() != n || e.direction.len() != n {
            return mismatch(format!("edge {k}: circle must live in (S^1)^{n}"));
        }
        let parallel = (0..n).all(|i| (0..n).all(|j| c.direction[i] * e.direction[j] == c.direction[j] * e.direction[i]));
        if !parallel || c.direction.iter().all(|&x| x == 0) {
            return mismatch(format!("edge {k}: circle direction {:?} is not along the slope", c.direction));
        }
    }
    Ok(PsiSampler { graph: trop.clone(), vertex_phases: vertex_coamoebas, edge_circles })
}

impl PsiSampler {
    /// Each edge contributes a `per_edge × per_edge` grid of segment × circle; leaves are cut at `leaf_len`.
    pub fn sample(&self, per_edge: usize, leaf_len: f64) -> Vec<PsiPoint> {
        let mut out = Vec::new();
        for (v, cloud) in self.vertex_phases.iter().enumerate() {
            let x = &self.graph.vertices[v].position;
            out.extend(cloud.iter().map(|a| PsiPoint { x: x.clone(), theta: a.iter().map(|&t| wrap(t)).collect() }));
        }
        let m = per_edge.max(2);
        for (k, c) in self.edge_circles.iter().enumerate() {
            for i in 0..m {
                let x = self.graph.edge_point(k, i as f64 / (m - 1) as f64, leaf_len);
                for j in 0..m {
                    let th = std::f64::consts::TAU * j as f64 / m as f64;
                    let theta = c.base.iter().zip(&c.direction).map(|(b, &d)| wrap(b + th * d as f64)).collect();
                    out.push(PsiPoint { x: x.clone(), theta });
                }
            }
        }
        out
    }

    pub fn graph(&self) -> &TropicalCurveGraph {
        &self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tripod(third: Vec<i64>) -> TropicalCurveGraph {
        TropicalCurveGraph::new(
            2,
            vec![TropicalVertex { genus: 0, position: vec![0.0, 0.0] }],
            vec![
                TropicalEdge::leaf(0, vec![1, 0], 1),
                TropicalEdge::leaf(0, vec![0, 1], 1),
                TropicalEdge::leaf(0, third, 1),
            ],
        )
    }

    #[test]
    fn tripods() {
        let g = tripod(vec![-1, -1]);
        assert!(g.is_valid());
        assert_eq!(g.tropical_degree(), 2);
        let v = tripod(vec![-1, 0]).validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, GraphRule::Balancing);
    }

    #[test]
    fn lines_and_empty() {
        let g = TropicalCurveGraph::new(2, vec![], vec![TropicalEdge::line(vec![1, 0], 1, None)]);
        assert!(g.is_valid());
        let d = TropicalCurveGraph::new(2, vec![], vec![TropicalEdge::line(vec![1, 1], 1, None)]);
        assert_eq!(d.tropical_degree(), 1);
        assert_eq!(TropicalCurveGraph::default().tropical_degree(), 0);
    }

    #[test]
    fn genus_and_geometry() {
        let at = |x: f64, genus| TropicalVertex { genus, position: vec![x, 0.0] };
        let mut g = TropicalCurveGraph::new(
            2,
            vec![at(0.0, 0), at(0.0, 1)],
            vec![
                TropicalEdge::bounded(0, 1, vec![0, 0], 0, 2.0),
                TropicalEdge::leaf(0, vec![-1, 0], 1),
                TropicalEdge::leaf(0, vec![1, 0], 1),
            ],
        );
        assert_eq!(g.validate(), vec![]);
        g.vertices[1].genus = 0;
        assert!(g.validate().iter().any(|v| v.rule == GraphRule::Genus));

        let mut h = TropicalCurveGraph::new(
            2,
            vec![at(0.0, 0), at(4.0, 0)],
            vec![
                TropicalEdge::bounded(0, 1, vec![1, 0], 2, 2.0),
                TropicalEdge::leaf(0, vec![-1, 0], 2),
                TropicalEdge::leaf(1, vec![1, 0], 2),
            ],
        );
        assert_eq!(h.validate(), vec![]);
        h.edges[0].length = 3.0;
        assert!(h.validate().iter().any(|v| v.rule == GraphRule::Geometry));
        h.edges[0].direction = vec![2, 0];
        assert!(h.validate().iter().any(|v| v.rule == GraphRule::Shape));
    }

    #[test]
    fn scaled_log() {
        let t = 7.0f64;
        let v = log_t(&[C64::new(t.powi(3), 0.0), C64::new(0.0, 1.0 / t)], t).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
        assert!(matches!(log_t(&[C64::new(0.0, 0.0)], t), Err(Error::ZeroCoordinate(0))));
    }

    #[test]
    fn limits() {
        let seq: Vec<(f64, C64)> = (1..=40)
            .map(|k| {
                let t = (k as f64).exp();
                (t, C64::new(t * t * (1.0 + 1.0 / k as f64), 0.0))
            })
            .collect();
        let l = trop_limit(&seq).unwrap().unwrap();
        assert!((l - 2.0).abs() < 1e-2, "{l}");
        let osc: Vec<(f64, C64)> = (1..=40)
            .map(|k| {
                let t = (k as f64).exp();
                (t, C64::new(t.powi(if k % 2 == 0 { 1 } else { -1 }), 0.0))
            })
            .collect();
        assert_eq!(trop_limit(&osc).unwrap(), None);
    }

    #[test]
    fn psi_segment_times_circle() {
        let g = TropicalCurveGraph::new(
            2,
            vec![TropicalVertex { genus: 1, position: vec![0.0, 0.0] }, TropicalVertex { genus: 1, position: vec![1.0, 0.0] }],
            vec![TropicalEdge::bounded(0, 1, vec![1, 0], 1, 1.0)],
        );
        let psi = build_psi(&g, vec![], vec![EdgeCircle { base: vec![0.0, 0.5], direction: vec![1, 0] }]).unwrap();
        let pts = psi.sample(10, 1.0);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!(p.x[1].abs() < 1e-9 && (-1e-9..=1.0 + 1e-9).contains(&p.x[0]));
            assert!((p.theta[1] - 0.5).abs() < 1e-12);
        }
        assert!(build_psi(&g, vec![], vec![]).unwrap().sample(10, 1.0).is_empty());
        let bad = build_psi(&g, vec![], vec![EdgeCircle { base: vec![0.0, 0.0], direction: vec![0, 1] }]);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }
}
