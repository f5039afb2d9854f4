//! Rational curves in `CP³`, their tangent lines, the Gauss maps γ± into
//! `Sym²(CP¹) = CP²`, and critical points of κ restricted to the curve.

use nalgebra::{DMatrix, Matrix3x2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binary;
use crate::error::{Error, Result};
use crate::hyperbolic;
use crate::optim;
use crate::proj::{self, canonical, fs_angle, CP1Point, Line, LineKind, ProjPoint, QuadricPoint, VecJson};
use crate::sample;
use crate::C64;

/// Which ruling of `Q` a Gauss map projects to: `Minus` takes kernels, `Plus` images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

/// An unordered pair `{z, z'}` of `CP¹` as the binary quadratic `e0·w² − e1·w·v + e2·v²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VecJson<3>", into = "VecJson<3>")]
pub struct Sym2Point {
    e: [C64; 3],
}

impl TryFrom<VecJson<3>> for Sym2Point {
    type Error = Error;
    fn try_from(j: VecJson<3>) -> Result<Self> {
        Sym2Point::new(proj::from_json(j))
    }
}

impl From<Sym2Point> for VecJson<3> {
    fn from(p: Sym2Point) -> Self {
        proj::to_json(&p.e)
    }
}

impl Sym2Point {
    pub fn new(e: [C64; 3]) -> Result<Self> {
        canonical(e).map(|e| Self { e }).ok_or(Error::ZeroMatrix)
    }

    pub fn from_pair(z1: &CP1Point, z2: &CP1Point) -> Self {
        let (u1, v1, u2, v2) = (z1.u(), z1.v(), z2.u(), z2.v());
        Self::new([v1 * v2, u1 * v2 + u2 * v1, u1 * u2]).expect("nonzero pair")
    }

    pub fn coords(&self) -> [C64; 3] {
        self.e
    }

    pub fn roots(&self) -> [CP1Point; 2] {
        binary::quadratic_roots([self.e[2], -self.e[1], self.e[0]])
    }

    /// `e1² − 4·e0·e2`, zero for a double point.
    pub fn discriminant(&self) -> C64 {
        self.e[1] * self.e[1] - 4.0 * self.e[0] * self.e[2]
    }

    pub fn fs_dist(&self, other: &Sym2Point) -> f64 {
        fs_angle(&self.e, &other.e)
    }

    pub fn approx_eq(&self, other: &Sym2Point, eps: f64) -> bool {
        self.fs_dist(other) < eps
    }
}

/// `(u:v:w) ↦ (w̄ : −v̄ : ū)`; its fixed locus `R` is the set of antipodal pairs.
pub fn sigma_r(p: &Sym2Point) -> Sym2Point {
    let [u, v, w] = p.e;
    Sym2Point::new([w.conj(), -v.conj(), u.conj()]).expect("nonzero")
}

pub fn dist_to_r(p: &Sym2Point) -> f64 {
    p.fs_dist(&sigma_r(p))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    degree: usize,
    components: Vec<CompJson>,
}

/// `(a:b:c:d)` given by four coprime binary forms of degree `d`; `comps[j][k]` multiplies `s^k·t^(d−k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub struct RationalCurve {
    comps: [Vec<C64>; 4],
    degree: usize,
}

impl TryFrom<CurveJson> for RationalCurve {
    type Error = Error;
    fn try_from(j: CurveJson) -> Result<Self> {
        if j.components.len() != 4 {
            return Err(Error::DimensionMismatch(format!("expected 4 components, got {}", j.components.len())));
        }
        let comps: Vec<Vec<C64>> = j
            .components
            .into_iter()
            .map(|c| {
                if c.re.len() != c.im.len() {
                    return Err(Error::DimensionMismatch("re/im lengths differ".into()));
                }
                Ok(c.re.into_iter().zip(c.im).map(|(r, i)| C64::new(r, i)).collect())
            })
            .collect::<Result<_>>()?;
        if comps.iter().any(|c| c.len() != j.degree + 1) {
            return Err(Error::DimensionMismatch(format!("components must have {} coefficients", j.degree + 1)));
        }
        let comps: [Vec<C64>; 4] = comps.try_into().expect("four components");
        RationalCurve::new(comps)
    }
}

impl From<RationalCurve> for CurveJson {
    fn from(c: RationalCurve) -> Self {
        CurveJson {
            degree: c.degree,
            components: c
                .comps
                .iter()
                .map(|v| CompJson { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() })
                .collect(),
        }
    }
}

impl RationalCurve {
    pub fn new(comps: [Vec<C64>; 4]) -> Result<Self> {
        let degree = comps.iter().map(|c| c.len()).max().unwrap_or(0).saturating_sub(1);
        if degree == 0 {
            return Err(Error::Invalid("curve degree must be positive".into()));
        }
        let comps = comps.map(|mut c| {
            c.resize(degree + 1, C64::new(0.0, 0.0));
            c
        });
        if comps.iter().any(|c| c.iter().any(|z| !z.is_finite())) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        let curve = Self { comps, degree };
        curve.check_coprime()?;
        let det = curve.det_form();
        let scale: f64 = curve.comps.iter().map(|c| binary::norm(c)).fold(0.0, f64::max);
        if binary::norm(&det) < 1e-10 * scale * scale {
            return Err(Error::ContainedInQuadric);
        }
        Ok(curve)
    }

    pub fn from_real(comps: [Vec<f64>; 4]) -> Result<Self> {
        Self::new(comps.map(|c| c.into_iter().map(|x| C64::new(x, 0.0)).collect()))
    }

    /// The pencil through two points, as a degree-one curve `s·p + t·q`.
    pub fn from_line(l: &Line) -> Self {
        let (p, d) = l.basis();
        let (p, d) = (p.entries(), d.entries());
        Self { comps: std::array::from_fn(|j| vec![d[j], p[j]]), degree: 1 }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<C64>; 4] {
        &self.comps
    }

    fn check_coprime(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mix: Vec<C64> = (0..4).map(|_| sample::complex(&mut rng)).collect();
        let combo: Vec<C64> = (0..=self.degree)
            .map(|k| (0..4).map(|j| mix[j] * self.comps[j][k]).sum())
            .collect();
        let norms: Vec<f64> = self.comps.iter().map(|c| binary::norm(c)).collect();
        for r in binary::roots(&combo) {
            let all_vanish = (0..4).all(|j| {
                norms[j] == 0.0 || binary::eval(&self.comps[j], r.u(), r.v()).norm() < 1e-8 * norms[j]
            });
            if all_vanish {
                return Err(Error::NotCoprime);
            }
        }
        if binary::roots(&combo).len() < self.degree {
            // the combination lost degree at infinity only if every component did
            let top = (0..4).all(|j| self.comps[j][self.degree].norm() < 1e-14 * norms[j].max(1e-300));
            if top {
                return Err(Error::NotCoprime);
            }
        }
        Ok(())
    }

    /// `ad − bc` as a binary form of degree `2d`.
    pub fn det_form(&self) -> Vec<C64> {
        let ad = binary::mul(&self.comps[0], &self.comps[3]);
        let bc = binary::mul(&self.comps[1], &self.comps[2]);
        ad.iter().zip(&bc).map(|(x, y)| x - y).collect()
    }

    pub fn eval(&self, param: &CP1Point) -> Result<ProjPoint> {
        ProjPoint::new(std::array::from_fn(|j| binary::eval(&self.comps[j], param.u(), param.v())))
    }

    /// Position and derivative in the affine chart of the larger parameter coordinate.
    fn jet(&self, param: &CP1Point) -> ([C64; 4], [C64; 4]) {
        let (u, v) = (param.u(), param.v());
        let n = self.degree;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let mut pos = [zero; 4];
        let mut der = [zero; 4];
        if u.norm() >= v.norm() {
            let w = v / u;
            for j in 0..4 {
                pos[j] = binary::eval(&self.comps[j], one, w);
                for k in 0..n {
                    let e = (n - k) as u32;
                    der[j] += self.comps[j][k] * e as f64 * w.powu(e - 1);
                }
            }
        } else {
            let w = u / v;
            for j in 0..4 {
                pos[j] = binary::eval(&self.comps[j], w, one);
                for k in 1..=n {
                    der[j] += self.comps[j][k] * k as f64 * w.powu(k as u32 - 1);
                }
            }
        }
        (pos, der)
    }

    pub fn tangent_line(&self, param: &CP1Point) -> Result<Line> {
        let (pos, der) = self.jet(param);
        let p = ProjPoint::new(pos)?;
        let d = ProjPoint::new(der).map_err(|_| Error::SingularParameter)?;
        Line::through(&p, &d).map_err(|e| if e == Error::DegenerateSpan { Error::SingularParameter } else { e })
    }

    pub fn gauss(&self, param: &CP1Point, side: Side) -> Result<Sym2Point> {
        let l = self.tangent_line(param)?;
        let qd = l.qdata();
        let pick = |q: &QuadricPoint| if side == Side::Minus { q.alpha } else { q.beta };
        match qd.kind {
            LineKind::OnQuadricPlusRuling | LineKind::OnQuadricMinusRuling => Err(Error::LineInQuadric),
            LineKind::Tangent => Ok(Sym2Point::from_pair(&pick(&qd.qpoints[0]), &pick(&qd.qpoints[0]))),
            LineKind::Transverse => Ok(Sym2Point::from_pair(&pick(&qd.qpoints[0]), &pick(&qd.qpoints[1]))),
        }
    }

    /// Smallest `k ≤ 4d` for which a triple of degree-`k` forms interpolates γ on the unit circle.
    pub fn gauss_degree_estimate(&self, side: Side) -> Result<usize> {
        let n = 8 * self.degree + 12;
        let mut zs = Vec::with_capacity(n);
        let mut vals = Vec::with_capacity(n);
        for j in 0..4 * n {
            if zs.len() == n {
                break;
            }
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / n as f64 + 0.013 * (j / n) as f64;
            let z = C64::from_polar(1.0, th);
            if let Ok(g) = self.gauss(&CP1Point::from_affine(z), side) {
                zs.push(z);
                vals.push(g.coords());
            }
        }
        if zs.len() < n {
            return Err(Error::IllConditioned("too many singular sample parameters".into()));
        }
        for k in 0..=4 * self.degree {
            let cols = 3 * (k + 1);
            let mut m = DMatrix::<C64>::zeros(3 * n, cols);
            for (i, (z, e)) in zs.iter().zip(&vals).enumerate() {
                for p in 0..=k {
                    let zp = z.powu(p as u32);
                    // rows of P(z) × e, with P_c in columns c·(k+1)+p
                    let col = |c: usize| c * (k + 1) + p;
                    m[(3 * i, col(1))] += zp * e[2];
                    m[(3 * i, col(2))] -= zp * e[1];
                    m[(3 * i + 1, col(2))] += zp * e[0];
                    m[(3 * i + 1, col(0))] -= zp * e[2];
                    m[(3 * i + 2, col(0))] += zp * e[1];
                    m[(3 * i + 2, col(1))] -= zp * e[0];
                }
            }
            let sv = m.singular_values();
            let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
            if lo < 1e-6 * hi {
                return Ok(k);
            }
        }
        Err(Error::IllConditioned(format!("no fit up to degree {}", 4 * self.degree)))
    }

    /// Ratio `σmin/σmax` of the differential of `κ∘C` at `param`.
    pub fn jacobian_ratio(&self, param: &CP1Point) -> Result<f64> {
        let (pos, der) = self.jet(param);
        let a = ProjPoint::new(pos)?;
        if a.on_quadric() {
            return Err(Error::OnQuadric);
        }
        let scale = a.entries()[0].norm().max(a.entries()[1].norm()).max(a.entries()[2].norm()).max(a.entries()[3].norm());
        let ratio = pos.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        let [ia, ib, ic, id] = a.adjugate().entries();
        let det = a.det();
        let [da, db, dc, dd] = der.map(|z| z / ratio);
        let x = [
            (ia * da + ib * dc) / det,
            (ia * db + ib * dd) / det,
            (ic * da + id * dc) / det,
            (ic * db + id * dd) / det,
        ];
        let herm0 = |m: [C64; 4]| -> [f64; 3] {
            let h00 = m[0].re;
            let h11 = m[3].re;
            let h01 = (m[1] + m[2].conj()) / 2.0;
            [(h00 - h11) / 2.0, h01.re, h01.im]
        };
        let c1 = herm0(x);
        let c2 = herm0(x.map(|z| z * C64::i()));
        let j = Matrix3x2::new(c1[0], c2[0], c1[1], c2[1], c1[2], c2[2]);
        let sv = j.singular_values();
        let (lo, hi) = (sv[0].min(sv[1]), sv[0].max(sv[1]));
        Ok(if hi == 0.0 { 0.0 } else { lo / hi })
    }

    fn gauss_dist(&self, z: &CP1Point) -> f64 {
        self.gauss(z, Side::Minus).map(|g| dist_to_r(&g)).unwrap_or(f64::INFINITY)
    }

    /// Parameters where `γ₋` meets `R`: grid local minima refined by Nelder–Mead.
    pub fn critical_params(&self, grid: usize, tol: f64) -> Vec<CP1Point> {
        let pts = sample::fibonacci_cp1(grid);
        let vals: Vec<f64> = pts.iter().map(|z| self.gauss_dist(z)).collect();
        if vals.iter().all(|&v| v < tol) {
            return pts;
        }
        let mut out: Vec<CP1Point> = Vec::new();
        for i in 0..pts.len() {
            let mut near: Vec<(f64, usize)> =
                (0..pts.len()).filter(|&j| j != i).map(|j| (pts[i].sphere_dist(&pts[j]), j)).collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            if near.iter().take(6).any(|&(_, j)| vals[j] < vals[i]) {
                continue;
            }
            let rot = [pts[i].u(), -pts[i].v().conj(), pts[i].v(), pts[i].u().conj()];
            let at = |x: &[f64]| {
                let w = C64::new(x[0], x[1]);
                CP1Point::new(rot[0] * w + rot[1], rot[2] * w + rot[3]).expect("unitary chart")
            };
            let step = near[0].0.max(1e-3);
            let (x, fx) = optim::nelder_mead(|x| self.gauss_dist(&at(x)), &[0.0, 0.0], step, 2000);
            if fx < tol {
                let z = at(&x);
                if out.iter().all(|w| w.sphere_dist(&z) > 1e-4) {
                    out.push(z);
                }
            }
        }
        out
    }

    /// Points of `C ∩ Q` as roots of `det∘C`, with multiplicity.
    pub fn quadric_points(&self) -> Result<Vec<QuadricPoint>> {
        binary::roots(&self.det_form())
            .iter()
            .map(|r| Ok(self.eval(r)?.rank1_coords()))
            .collect()
    }

    /// Distinct image points of `C ∩ Q` on the absolute.
    pub fn boundary_points(&self, eps: f64) -> Result<Vec<CP1Point>> {
        let mut out: Vec<CP1Point> = Vec::new();
        for q in self.quadric_points()? {
            if out.iter().all(|b| b.sphere_dist(&q.beta) > eps) {
                out.push(q.beta);
            }
        }
        Ok(out)
    }

    /// κ of the curve point at `param`.
    pub fn kappa(&self, param: &CP1Point) -> Result<hyperbolic::HPoint> {
        hyperbolic::kappa(&self.eval(param)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn conic() -> RationalCurve {
        // (s², st, 0, t²)
        RationalCurve::from_real([vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![0.0; 3], vec![1.0, 0.0, 0.0]]).unwrap()
    }

    fn l2() -> RationalCurve {
        RationalCurve::from_real([vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn conic_tangent() {
        let l = conic().tangent_line(&CP1Point::from_affine(c(1.0))).unwrap();
        let p = ProjPoint::from_real([1.0, 1.0, 0.0, 1.0]).unwrap();
        let d = ProjPoint::from_real([2.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(l.contains(&p, 1e-12) && l.contains(&d, 1e-12));
    }

    #[test]
    fn line_tangent_is_itself() {
        let l = Line::through(
            &ProjPoint::from_real([1.0, 2.0, 0.0, 1.0]).unwrap(),
            &ProjPoint::from_real([0.0, 1.0, 3.0, 1.0]).unwrap(),
        )
        .unwrap();
        let curve = RationalCurve::from_line(&l);
        for z in sample::fibonacci_cp1(20) {
            let t = curve.tangent_line(&z).unwrap();
            let (p, d) = t.basis();
            assert!(l.contains(&p, 1e-12) && l.contains(&d, 1e-12));
        }
        assert_eq!(curve.gauss_degree_estimate(Side::Minus).unwrap(), 0);
        assert_eq!(curve.gauss_degree_estimate(Side::Plus).unwrap(), 0);
    }

    #[test]
    fn coprimality() {
        let s_times = RationalCurve::from_real([vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 2.0, 0.0], vec![0.0, 1.0, 3.0]]);
        assert_eq!(s_times, Err(Error::NotCoprime));
        let t_times = RationalCurve::from_real([vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 2.0, 0.0], vec![3.0, 1.0, 0.0]]);
        assert_eq!(t_times, Err(Error::NotCoprime));
        let in_q = RationalCurve::from_real([vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert_eq!(in_q, Err(Error::ContainedInQuadric));
    }

    #[test]
    fn l2_gauss_is_zero_infinity() {
        let want = Sym2Point::new([c(0.0), c(1.0), c(0.0)]).unwrap();
        for z in sample::fibonacci_cp1(10) {
            let g = l2().gauss(&z, Side::Minus).unwrap();
            assert!(g.approx_eq(&want, 1e-12));
            assert!(dist_to_r(&g) < 1e-12);
        }
    }

    #[test]
    fn sigma_examples() {
        let p = Sym2Point::new([c(0.0), c(1.0), c(0.0)]).unwrap();
        assert!(sigma_r(&p).approx_eq(&p, 1e-15));
        let q = Sym2Point::new([c(1.0), c(0.0), c(1.0)]).unwrap();
        assert!(sigma_r(&q).approx_eq(&q, 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let r = Sym2Point::new([sample::complex(&mut rng), sample::complex(&mut rng), sample::complex(&mut rng)]).unwrap();
            assert!((dist_to_r(&sigma_r(&r)) - dist_to_r(&r)).abs() < 1e-12);
            let [z1, z2] = r.roots();
            assert!(Sym2Point::from_pair(&z1, &z2).approx_eq(&r, 1e-9));
            let anti = Sym2Point::from_pair(&z1, &z1.antipode());
            assert!(dist_to_r(&anti) < 1e-12);
        }
    }

    #[test]
    fn tangent_double_point() {
        // l₁ = {[s:b:0:s]} is tangent to Q
        let l1 = RationalCurve::from_real([vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = l1.gauss(&CP1Point::from_affine(c(0.4)), Side::Plus).unwrap();
        assert!(g.discriminant().norm() < 1e-12);
    }

    #[test]
    fn degree_estimates() {
        // (s², st, 0, t²) sits in a plane meeting Q in two rulings, so γ₋ drops to degree 1
        assert_eq!(conic().gauss_degree_estimate(Side::Minus).unwrap(), 1);
        let generic = RationalCurve::from_real([
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -2.0, 1.0],
            vec![1.0, 3.0, 0.0],
        ])
        .unwrap();
        assert_eq!(generic.gauss_degree_estimate(Side::Minus).unwrap(), 2);
        assert_eq!(generic.gauss_degree_estimate(Side::Plus).unwrap(), 2);
        // twisted cubic (s³, t³, st², s²t)
        let cubic = RationalCurve::from_real([
            vec![0.0, 0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(cubic.gauss_degree_estimate(Side::Minus).unwrap(), 4);
        assert_eq!(cubic.gauss_degree_estimate(Side::Plus).unwrap(), 4);
    }

    #[test]
    fn critical_examples() {
        assert_eq!(l2().critical_params(64, 1e-6).len(), 64);
        let b = ProjPoint::from_real([1.0, 1.0, 0.0, 1.0]).unwrap();
        let line = Line::through(
            &ProjPoint::from_real([1.0, 0.0, 0.0, 0.0]).unwrap().mul(&b).unwrap(),
            &ProjPoint::from_real([0.0, 0.0, 0.0, 1.0]).unwrap().mul(&b).unwrap(),
        )
        .unwrap();
        assert!(RationalCurve::from_line(&line).critical_params(128, 1e-6).is_empty());
        assert!(l2().jacobian_ratio(&CP1Point::from_affine(c(0.7))).unwrap() < 1e-12);
    }

    #[test]
    fn quadric_point_count() {
        let pts = conic().boundary_points(1e-6).unwrap();
        assert!(pts.len() <= 4);
        assert_eq!(conic().quadric_points().unwrap().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&conic()).unwrap();
        let back: RationalCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, conic());
    }
}
