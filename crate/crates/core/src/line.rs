//! Amoebas of projective lines: horospheres, cylinders about geodesics, geodesics,
//! and the empty amoebas of lines inside `Q`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{self, AbsPoint, BallPoint, HPoint};
use crate::optim;
use crate::proj::{CP1Point, Line, LineKind, ProjPoint, QuadricPoint};
use crate::sample;
use crate::tol::Tolerances;
use crate::C64;

/// Spherical radius around the `Q`-roots that pencil sampling avoids.
pub const ROOT_EXCLUSION: f64 = 1e-3;
const VERIFY_SAMPLES: usize = 16;
const RADIUS_MISMATCH: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum LineAmoebaClass {
    /// Fiber of π₊: the compactified amoeba is the single boundary point.
    EmptyPlusRuling { point: AbsPoint },
    /// Fiber of π₋: the compactified amoeba is all of `∂H³`.
    EmptyMinusRuling,
    Horosphere { center: AbsPoint, basepoint: HPoint },
    Cylinder { axis: (AbsPoint, AbsPoint), radius: f64 },
    Geodesic { endpoints: (AbsPoint, AbsPoint) },
}

impl LineAmoebaClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EmptyPlusRuling { .. } => "empty_plus_ruling",
            Self::EmptyMinusRuling => "empty_minus_ruling",
            Self::Horosphere { .. } => "horosphere",
            Self::Cylinder { .. } => "cylinder",
            Self::Geodesic { .. } => "geodesic",
        }
    }

    /// Signed defect of `x` from the level set describing the class.
    pub fn defect(&self, x: &HPoint) -> Result<f64> {
        match self {
            Self::EmptyPlusRuling { .. } | Self::EmptyMinusRuling => Err(Error::EmptyAmoeba),
            Self::Horosphere { center, basepoint } => {
                Ok(hyperbolic::busemann(center, x) - hyperbolic::busemann(center, basepoint))
            }
            Self::Cylinder { axis, radius } => Ok(hyperbolic::dist_to_geodesic(x, (&axis.0, &axis.1))? - radius),
            Self::Geodesic { endpoints } => hyperbolic::dist_to_geodesic(x, (&endpoints.0, &endpoints.1)),
        }
    }
}

/// Sampled amoeba points with the pencil parameters that produced them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<HPoint>,
    pub params: Vec<CP1Point>,
    pub generator: String,
    pub seed: u64,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ball_points(&self) -> Vec<BallPoint> {
        self.points.iter().map(HPoint::to_ball).collect()
    }
}

fn abs(z: &CP1Point) -> AbsPoint {
    AbsPoint::from_cp1(z)
}

fn far_from_roots(z: &CP1Point, roots: &[CP1Point]) -> bool {
    roots.iter().all(|r| r.sphere_dist(z) >= ROOT_EXCLUSION)
}

fn verify_params(roots: &[CP1Point]) -> Vec<CP1Point> {
    sample::fibonacci_cp1(VERIFY_SAMPLES + 4)
        .into_iter()
        .filter(|z| far_from_roots(z, roots))
        .take(VERIFY_SAMPLES)
        .collect()
}

fn kappa_at(l: &Line, z: &CP1Point) -> Result<HPoint> {
    hyperbolic::kappa(&l.point(z)?)
}

pub fn classify_line(l: &Line) -> Result<LineAmoebaClass> {
    classify_line_tol(l, &Tolerances::DEFAULT)
}

pub fn classify_line_tol(l: &Line, tol: &Tolerances) -> Result<LineAmoebaClass> {
    let qd = l.qdata();
    match qd.kind {
        LineKind::OnQuadricPlusRuling => {
            let beta = l.point(&CP1Point::infinity())?.rank1_coords().beta;
            Ok(LineAmoebaClass::EmptyPlusRuling { point: abs(&beta) })
        }
        LineKind::OnQuadricMinusRuling => Ok(LineAmoebaClass::EmptyMinusRuling),
        LineKind::Tangent => {
            let root = qd.roots[0];
            let basepoint = kappa_at(l, &root.antipode())?;
            Ok(LineAmoebaClass::Horosphere { center: abs(&qd.qpoints[0].beta), basepoint })
        }
        LineKind::Transverse => {
            let (q1, q2) = (&qd.qpoints[0], &qd.qpoints[1]);
            let ends = (abs(&q1.beta), abs(&q2.beta));
            if q2.alpha.sphere_dist(&q1.alpha.antipode()) < tol.eps_antipode {
                return Ok(LineAmoebaClass::Geodesic { endpoints: ends });
            }
            let params = verify_params(&qd.roots);
            let radius = hyperbolic::dist_to_geodesic(&kappa_at(l, &params[0])?, (&ends.0, &ends.1))?;
            for z in &params[1..] {
                let r = hyperbolic::dist_to_geodesic(&kappa_at(l, z)?, (&ends.0, &ends.1))?;
                if (r - radius).abs() > RADIUS_MISMATCH * radius.max(1.0) {
                    return Err(Error::Inconsistent(format!("cylinder radius {radius} vs {r}")));
                }
            }
            if radius <= tol.eps_geo {
                Ok(LineAmoebaClass::Geodesic { endpoints: ends })
            } else {
                Ok(LineAmoebaClass::Cylinder { axis: ends, radius })
            }
        }
    }
}

/// `n` κ-images of pencil points drawn uniformly on `CP¹` away from the `Q`-roots.
pub fn sample_line_amoeba(l: &Line, n: usize, seed: u64) -> Result<PointCloud> {
    if matches!(l.kind(), LineKind::OnQuadricPlusRuling | LineKind::OnQuadricMinusRuling) {
        return Err(Error::EmptyAmoeba);
    }
    let roots = &l.qdata().roots;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Vec::with_capacity(n);
    while params.len() < n {
        let z = sample::cp1(&mut rng);
        if far_from_roots(&z, roots) {
            params.push(z);
        }
    }
    let points = params.par_iter().map(|z| kappa_at(l, z)).collect::<Result<Vec<_>>>()?;
    Ok(PointCloud { points, params, generator: "line pencil".into(), seed })
}

/// Largest absolute class defect over a sample of `n` amoeba points.
pub fn max_defect(l: &Line, class: &LineAmoebaClass, n: usize, seed: u64) -> Result<f64> {
    let cloud = sample_line_amoeba(l, n, seed)?;
    cloud.points.iter().try_fold(0.0f64, |m, x| Ok(m.max(class.defect(x)?.abs())))
}

/// The line through the two points `(αᵢ, βᵢ)` of `Q`.
pub fn line_with_qdata(q1: &QuadricPoint, q2: &QuadricPoint) -> Result<Line> {
    Line::through(&q1.to_matrix(), &q2.to_matrix())
}

fn perpendicular(a: [f64; 3]) -> [f64; 3] {
    let pick = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = pick[0] * a[0] + pick[1] * a[1] + pick[2] * a[2];
    let e = [pick[0] - dot * a[0], pick[1] - dot * a[1], pick[2] - dot * a[2]];
    let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    e.map(|x| x / n)
}

/// Radii of lines whose second kernel point sits at spherical distance `s` from the
/// antipode of `q1`, with fixed image points `p1, p2`.
pub fn cylinder_radius_curve_with(q1: &CP1Point, p1: &CP1Point, p2: &CP1Point, sweep: &[f64]) -> Result<Vec<f64>> {
    let a = abs(q1).neg().vec();
    let e = perpendicular(a);
    sweep
        .iter()
        .map(|&s| {
            if !(0.0..std::f64::consts::PI).contains(&s) {
                return Err(Error::Invalid(format!("spherical distance {s} outside [0, π)")));
            }
            let n: [f64; 3] = std::array::from_fn(|k| s.cos() * a[k] + s.sin() * e[k]);
            let q2 = CP1Point::from_sphere(n)?;
            let l = line_with_qdata(&QuadricPoint { alpha: *q1, beta: *p1 }, &QuadricPoint { alpha: q2, beta: *p2 })?;
            Ok(match classify_line(&l)? {
                LineAmoebaClass::Cylinder { radius, .. } => radius,
                LineAmoebaClass::Geodesic { .. } => 0.0,
                other => return Err(Error::Inconsistent(format!("expected a transverse line, got {}", other.name()))),
            })
        })
        .collect()
}

pub fn cylinder_radius_curve(q1: &CP1Point, sweep: &[f64]) -> Result<Vec<f64>> {
    let p1 = CP1Point::from_affine(C64::new(0.3, -0.7));
    let p2 = CP1Point::from_affine(C64::new(-1.1, 0.4));
    cylinder_radius_curve_with(q1, &p1, &p2, sweep)
}

/// Pencil parameters of `l` whose κ-image is `target`, found by multistart minimization.
pub fn kappa_fiber(l: &Line, target: &HPoint, starts: usize, seed: u64) -> Result<Vec<CP1Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roots = l.qdata().roots.clone();
    let mut found: Vec<CP1Point> = Vec::new();
    for _ in 0..starts {
        let z0 = sample::cp1(&mut rng);
        // affine chart centred on the start
        let rot = chart_rotation(&z0);
        let f = |x: &[f64]| -> f64 {
            let z = rot_apply(&rot, C64::new(x[0], x[1]));
            if !far_from_roots(&z, &roots) {
                return f64::INFINITY;
            }
            kappa_at(l, &z).and_then(|k| hyperbolic::dist(&k, target)).unwrap_or(f64::INFINITY)
        };
        let (x, val) = optim::nelder_mead(f, &[0.0, 0.0], 0.3, 4000);
        if val < 1e-7 {
            let z = rot_apply(&rot, C64::new(x[0], x[1]));
            if found.iter().all(|w| w.sphere_dist(&z) > 1e-3) {
                found.push(z);
            }
        }
    }
    Ok(found)
}

fn chart_rotation(z: &CP1Point) -> [C64; 4] {
    [z.u(), -z.v().conj(), z.v(), z.u().conj()]
}

fn rot_apply(r: &[C64; 4], w: C64) -> CP1Point {
    CP1Point::new(r[0] * w + r[1], r[2] * w + r[3]).expect("unitary chart")
}

/// Whether the line's amoeba is a geodesic through the origin, within `eps`.
pub fn is_geodesic_through_origin(class: &LineAmoebaClass, eps: f64) -> Result<bool> {
    match class {
        LineAmoebaClass::Geodesic { endpoints } => {
            Ok(hyperbolic::dist_to_geodesic(&HPoint::origin(), (&endpoints.0, &endpoints.1))? < eps)
        }
        _ => Ok(false),
    }
}

/// Transports class parameters by the left action of `a`.
pub fn transport(class: &LineAmoebaClass, a: &ProjPoint) -> Result<LineAmoebaClass> {
    let mv = |p: &AbsPoint| -> Result<AbsPoint> { Ok(abs(&a.act(&p.to_cp1())?)) };
    Ok(match class {
        LineAmoebaClass::EmptyPlusRuling { point } => LineAmoebaClass::EmptyPlusRuling { point: mv(point)? },
        LineAmoebaClass::EmptyMinusRuling => LineAmoebaClass::EmptyMinusRuling,
        LineAmoebaClass::Horosphere { center, basepoint } => {
            LineAmoebaClass::Horosphere { center: mv(center)?, basepoint: basepoint.isometry(a)? }
        }
        LineAmoebaClass::Cylinder { axis, radius } => {
            LineAmoebaClass::Cylinder { axis: (mv(&axis.0)?, mv(&axis.1)?), radius: *radius }
        }
        LineAmoebaClass::Geodesic { endpoints } => {
            LineAmoebaClass::Geodesic { endpoints: (mv(&endpoints.0)?, mv(&endpoints.1)?) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(m: [f64; 4]) -> ProjPoint {
        ProjPoint::from_real(m).unwrap()
    }

    fn l2() -> Line {
        Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 0.0, 0.0, 1.0])).unwrap()
    }

    fn l1() -> Line {
        Line::through(&real([1.0, 0.0, 0.0, 1.0]), &real([0.0, 1.0, 0.0, 0.0])).unwrap()
    }

    fn same_pair(a: (AbsPoint, AbsPoint), b: (AbsPoint, AbsPoint), eps: f64) -> bool {
        (a.0.angle(&b.0) < eps && a.1.angle(&b.1) < eps) || (a.0.angle(&b.1) < eps && a.1.angle(&b.0) < eps)
    }

    #[test]
    fn l2_is_geodesic() {
        let zero = abs(&CP1Point::zero());
        let inf = abs(&CP1Point::infinity());
        match classify_line(&l2()).unwrap() {
            LineAmoebaClass::Geodesic { endpoints } => assert!(same_pair(endpoints, (zero, inf), 1e-12)),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn l1_is_horosphere_through_origin() {
        match classify_line(&l1()).unwrap() {
            LineAmoebaClass::Horosphere { center, basepoint } => {
                assert_eq!(center.label(), "inf");
                assert!(hyperbolic::busemann(&center, &basepoint).abs() < 1e-12);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn translated_l2_is_cylinder() {
        let b = real([1.0, 1.0, 0.0, 1.0]);
        let want = hyperbolic::dist_to_geodesic(
            &hyperbolic::kappa(&b).unwrap(),
            (&abs(&CP1Point::zero()), &abs(&CP1Point::infinity())),
        )
        .unwrap();
        match classify_line(&l2().right_mul(&b).unwrap()).unwrap() {
            LineAmoebaClass::Cylinder { axis, radius } => {
                assert!(same_pair(axis, (abs(&CP1Point::zero()), abs(&CP1Point::infinity())), 1e-12));
                assert!((radius - want).abs() < 1e-10 && radius > 0.0);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn quadric_lines() {
        let plus = Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(classify_line(&plus).unwrap().name(), "empty_plus_ruling");
        let minus = Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(classify_line(&minus).unwrap(), LineAmoebaClass::EmptyMinusRuling);
        assert_eq!(sample_line_amoeba(&minus, 3, 0), Err(Error::EmptyAmoeba));
    }

    #[test]
    fn samples_lie_on_class() {
        let c = sample_line_amoeba(&l2(), 100, 1).unwrap();
        let (z, i) = (abs(&CP1Point::zero()), abs(&CP1Point::infinity()));
        assert!(c.points.iter().all(|x| hyperbolic::dist_to_geodesic(x, (&z, &i)).unwrap() < 1e-8));
        let c = sample_line_amoeba(&l1(), 100, 1).unwrap();
        assert!(c.points.iter().all(|x| hyperbolic::busemann(&i, x).abs() < 1e-8));
        assert!(sample_line_amoeba(&l1(), 0, 1).unwrap().is_empty());
        assert_eq!(sample_line_amoeba(&l1(), 10, 5).unwrap(), sample_line_amoeba(&l1(), 10, 5).unwrap());
    }

    #[test]
    fn radius_curve_monotone() {
        let q1 = CP1Point::from_affine(C64::new(0.2, 0.5));
        let sweep: Vec<f64> = (0..31).map(|k| 0.1 * k as f64).collect();
        let r = cylinder_radius_curve(&q1, &sweep).unwrap();
        assert!(r[0] < 1e-6);
        assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
        let other = cylinder_radius_curve_with(
            &CP1Point::from_affine(C64::new(-2.0, 1.0)),
            &CP1Point::from_affine(C64::new(1.5, 0.1)),
            &CP1Point::zero(),
            &sweep,
        )
        .unwrap();
        for (a, b) in r.iter().zip(&other) {
            assert!((a - b).abs() < 1e-6, "{a} {b}");
        }
    }

    #[test]
    fn geodesic_fiber_is_a_circle() {
        let l = l2();
        let target = hyperbolic::kappa(&real([2.0, 0.0, 0.0, 1.0])).unwrap();
        let fiber = kappa_fiber(&l, &target, 12, 3).unwrap();
        assert!(fiber.len() >= 2, "{fiber:?}");
    }
}
