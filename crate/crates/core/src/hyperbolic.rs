//! Hyperbolic 3-space as unimodular positive-definite Hermitian matrices
//! `[[x0, x1+i·x2],[x1−i·x2, x3]]`, its boundary `CP¹ ≅ S²`, and the maps
//! from `PSL₂(ℂ)`: the amoeba map κ, its rescalings κₜ, the coamoeba ι and `H_t`.
//!
//! The spatial part of a point is `X = (x1, x2, (x0−x3)/2)` and the time part
//! `T = (x0+x3)/2`, so `cosh ρ = T` and the boundary point `(1:0)` is `+e₃`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim;
use crate::proj::{CP1Point, ProjPoint};
use crate::tol::Tolerances;
use crate::C64;

type M2 = [C64; 4];

fn mul2(p: &M2, q: &M2) -> M2 {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

fn adj2(p: &M2) -> M2 {
    [p[3], -p[1], -p[2], p[0]]
}

fn star2(p: &M2) -> M2 {
    [p[0].conj(), p[2].conj(), p[1].conj(), p[3].conj()]
}

fn det2(p: &M2) -> C64 {
    p[0] * p[3] - p[1] * p[2]
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// A point of the absolute `∂H³`, stored as a unit vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AbsPoint {
    n: [f64; 3],
}

impl TryFrom<[f64; 3]> for AbsPoint {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        AbsPoint::from_vec(v)
    }
}

impl From<AbsPoint> for [f64; 3] {
    fn from(p: AbsPoint) -> Self {
        p.n
    }
}

impl AbsPoint {
    pub fn from_vec(v: [f64; 3]) -> Result<Self> {
        let len = norm3(&v);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Invalid("zero direction".into()));
        }
        Ok(Self { n: v.map(|x| x / len) })
    }

    pub fn from_cp1(z: &CP1Point) -> Self {
        Self::from_vec(z.to_sphere()).expect("unit vector")
    }

    pub fn to_cp1(&self) -> CP1Point {
        CP1Point::from_sphere(self.n).expect("unit vector")
    }

    pub fn vec(&self) -> [f64; 3] {
        self.n
    }

    /// Angle on the unit sphere.
    pub fn angle(&self, other: &AbsPoint) -> f64 {
        let c = self.n.iter().zip(&other.n).map(|(a, b)| a * b).sum::<f64>();
        let x = [
            self.n[1] * other.n[2] - self.n[2] * other.n[1],
            self.n[2] * other.n[0] - self.n[0] * other.n[2],
            self.n[0] * other.n[1] - self.n[1] * other.n[0],
        ];
        norm3(&x).atan2(c)
    }

    pub fn neg(&self) -> AbsPoint {
        Self { n: self.n.map(|x| -x) }
    }

    pub fn label(&self) -> String {
        self.to_cp1().label()
    }
}

/// Geodesic polar coordinates about the origin; `rho = +∞` on the absolute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarCoord {
    #[serde(with = "crate::serde_ext")]
    pub rho: f64,
    pub phi: Option<AbsPoint>,
}

impl PolarCoord {
    pub fn finite(rho: f64, phi: AbsPoint) -> Self {
        Self { rho, phi: (rho > 0.0).then_some(phi) }
    }

    pub fn boundary(phi: AbsPoint) -> Self {
        Self { rho: f64::INFINITY, phi: Some(phi) }
    }

    pub fn to_ball(&self) -> BallPoint {
        match self.phi {
            None => BallPoint::origin(),
            Some(_) if self.rho.is_infinite() => BallPoint::boundary(&self.phi.unwrap()),
            Some(phi) => {
                let r = (self.rho / 2.0).tanh();
                BallPoint { v: phi.n.map(|x| r * x), boundary: false }
            }
        }
    }
}

/// A point of the closed Poincaré ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub v: [f64; 3],
    pub boundary: bool,
}

impl BallPoint {
    pub fn origin() -> Self {
        Self { v: [0.0; 3], boundary: false }
    }

    pub fn boundary(p: &AbsPoint) -> Self {
        Self { v: p.n, boundary: true }
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.v)
    }
}

/// Unit quaternion up to sign, first nonzero component positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationElt {
    pub q: [f64; 4],
}

impl RotationElt {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Invalid("zero quaternion".into()));
        }
        let mut q = q.map(|x| x / n);
        if let Some(first) = q.iter().find(|x| x.abs() > 1e-14) {
            if *first < 0.0 {
                q = q.map(|x| -x);
            }
        }
        Ok(Self { q })
    }

    pub fn identity() -> Self {
        Self { q: [1.0, 0.0, 0.0, 0.0] }
    }

    /// From an SU(2) matrix `[[w+iz, y+ix],[−y+ix, w−iz]]`.
    pub fn from_su2(u: &[C64; 4]) -> Result<Self> {
        Self::new([u[0].re, u[1].im, u[1].re, u[0].im])
    }

    pub fn to_matrix(&self) -> ProjPoint {
        let [w, x, y, z] = self.q;
        ProjPoint::new([C64::new(w, z), C64::new(y, x), C64::new(-y, x), C64::new(w, -z)]).expect("unit quaternion")
    }

    pub fn approx_eq(&self, other: &RotationElt, eps: f64) -> bool {
        let d = |s: f64| self.q.iter().zip(&other.q).map(|(a, b)| (a - s * b).abs()).fold(0.0, f64::max);
        d(1.0).min(d(-1.0)) < eps
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HJson {
    x: [f64; 4],
}

/// A point of `H³` in hyperboloid coordinates, `x0·x3 − x1² − x2² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HJson", into = "HJson")]
pub struct HPoint {
    x: [f64; 4],
}

impl TryFrom<HJson> for HPoint {
    type Error = Error;
    fn try_from(j: HJson) -> Result<Self> {
        HPoint::new(j.x)
    }
}

impl From<HPoint> for HJson {
    fn from(p: HPoint) -> Self {
        HJson { x: p.x }
    }
}

impl HPoint {
    pub fn new(x: [f64; 4]) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) || x[0] <= 0.0 || x[3] <= 0.0 {
            return Err(Error::Invalid("not a positive-definite form".into()));
        }
        let det = x[0] * x[3] - x[1] * x[1] - x[2] * x[2];
        if (det - 1.0).abs() > 1e-10 * (x[0] * x[3]).max(1.0) {
            return Err(Error::Invalid(format!("hyperboloid residual {:e}", det - 1.0)));
        }
        Ok(Self { x })
    }

    pub fn origin() -> Self {
        Self { x: [1.0, 0.0, 0.0, 1.0] }
    }

    pub fn coords(&self) -> [f64; 4] {
        self.x
    }

    /// Rescales a positive-definite Hermitian matrix to determinant 1.
    pub fn from_hermitian(h00: f64, h01: C64, h11: f64) -> Result<Self> {
        let det = h00 * h11 - h01.norm_sqr();
        if !(det > 0.0) || h00 <= 0.0 {
            return Err(Error::Invalid("not positive definite".into()));
        }
        let s = det.sqrt();
        Ok(Self { x: [h00 / s, h01.re / s, h01.im / s, h11 / s] })
    }

    fn matrix(&self) -> M2 {
        let [x0, x1, x2, x3] = self.x;
        [C64::new(x0, 0.0), C64::new(x1, x2), C64::new(x1, -x2), C64::new(x3, 0.0)]
    }

    pub fn time(&self) -> f64 {
        (self.x[0] + self.x[3]) / 2.0
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x[1], self.x[2], (self.x[0] - self.x[3]) / 2.0]
    }

    pub fn from_polar(p: &PolarCoord) -> Result<Self> {
        if !p.rho.is_finite() || p.rho < 0.0 {
            return Err(Error::Invalid("radius must be finite and nonnegative".into()));
        }
        let Some(phi) = p.phi else { return Ok(Self::origin()) };
        let [n1, n2, n3] = phi.n;
        let (ch, sh, em) = (p.rho.cosh(), p.rho.sinh(), (-p.rho).exp());
        let side = n1 * n1 + n2 * n2;
        let (x0, x3) = if n3 >= 0.0 {
            (ch + sh * n3, em + sh * side / (1.0 + n3))
        } else {
            (em + sh * side / (1.0 - n3), ch - sh * n3)
        };
        Ok(Self { x: [x0, sh * n1, sh * n2, x3] })
    }

    pub fn to_polar(&self) -> PolarCoord {
        let xs = self.spatial();
        let len = norm3(&xs);
        if len == 0.0 {
            return PolarCoord { rho: 0.0, phi: None };
        }
        PolarCoord { rho: len.asinh(), phi: Some(AbsPoint { n: xs.map(|v| v / len) }) }
    }

    pub fn phi(&self) -> Result<AbsPoint> {
        let xs = self.spatial();
        let len = norm3(&xs);
        if len <= 1e-14 {
            return Err(Error::AtOrigin);
        }
        Ok(AbsPoint { n: xs.map(|v| v / len) })
    }

    pub fn to_ball(&self) -> BallPoint {
        let t = self.time();
        BallPoint { v: self.spatial().map(|v| v / (1.0 + t)), boundary: false }
    }

    pub fn from_ball(b: &BallPoint) -> Result<Self> {
        let r = b.norm();
        if b.boundary || r >= 1.0 {
            return Err(Error::Invalid("boundary point has no hyperboloid coordinates".into()));
        }
        if r == 0.0 {
            return Ok(Self::origin());
        }
        Self::from_polar(&PolarCoord::finite(2.0 * r.atanh(), AbsPoint::from_vec(b.v)?))
    }

    /// Image under the isometry `H ↦ AHA*/|det A|`.
    pub fn isometry(&self, a: &ProjPoint) -> Result<HPoint> {
        let m = a.entries();
        let det = det2(&m).norm();
        if det < Tolerances::DEFAULT.eps_q {
            return Err(Error::OnQuadric);
        }
        let s = det.sqrt();
        let m = m.map(|z| z / s);
        let h = mul2(&mul2(&m, &self.matrix()), &star2(&m));
        Ok(Self { x: [h[0].re, h[1].re, h[1].im, h[3].re] })
    }
}

/// Hyperbolic distance; uses the arccosh form away from the diagonal and a
/// cancellation-free `2·asinh(‖x−y‖/2)` form nearby.
pub fn dist(x: &HPoint, y: &HPoint) -> Result<f64> {
    let (a, b) = (x.x, y.x);
    let arg = (a[0] * b[3] + a[3] * b[0]) / 2.0 - a[1] * b[1] - a[2] * b[2];
    if arg < 1.0 - 1e-9 {
        return Err(Error::ArgumentBelowOne(arg));
    }
    if arg >= 2.0 {
        return Ok(arg.acosh());
    }
    let d: [f64; 4] = std::array::from_fn(|k| a[k] - b[k]);
    let q = (d[1] * d[1] + d[2] * d[2] - d[0] * d[3]).max(0.0);
    Ok(2.0 * (q.sqrt() / 2.0).asinh())
}

pub fn kappa(p: &ProjPoint) -> Result<HPoint> {
    kappa_tol(p, Tolerances::DEFAULT.eps_q)
}

/// `AA*/|det A|`.
pub fn kappa_tol(p: &ProjPoint, eps_q: f64) -> Result<HPoint> {
    if p.on_quadric_tol(eps_q) {
        return Err(Error::OnQuadric);
    }
    let s = p.det().norm().sqrt();
    let [a, b, c, d] = p.entries().map(|z| z / s);
    let h01 = a * c.conj() + b * d.conj();
    Ok(HPoint { x: [a.norm_sqr() + b.norm_sqr(), h01.re, h01.im, c.norm_sqr() + d.norm_sqr()] })
}

/// `arccosh(‖A‖²/(2|det A|))`.
pub fn rho_of_matrix(p: &ProjPoint) -> Result<f64> {
    if p.on_quadric() {
        return Err(Error::OnQuadric);
    }
    let n2: f64 = p.entries().iter().map(|z| z.norm_sqr()).sum();
    Ok((n2 / (2.0 * p.det().norm())).max(1.0).acosh())
}

/// `Σ |z_j|²/|det|`, which is at least 2.
pub fn norm_ratio(p: &ProjPoint) -> Result<f64> {
    if p.on_quadric() {
        return Err(Error::OnQuadric);
    }
    let det = p.det().norm();
    Ok(p.entries().iter().map(|z| z.norm_sqr() / det).sum())
}

fn sl2(p: &ProjPoint) -> M2 {
    let root = p.det().sqrt();
    p.entries().map(|z| z / root)
}

/// Positive square root of a unimodular positive-definite Hermitian matrix.
fn sqrt_posdef(h: &M2) -> M2 {
    let s = (h[0].re + h[3].re + 2.0).sqrt();
    let one = C64::new(1.0, 0.0);
    [(h[0] + one) / s, h[1] / s, h[2] / s, (h[3] + one) / s]
}

/// `A = P·U` with `P = √(AA*)`; returns `U` as a rotation and `P² = κ(A)`.
/// `U` is also the unitary factor of the right decomposition `A = U·√(A*A)`.
pub fn polar_decompose(p: &ProjPoint) -> Result<(RotationElt, HPoint)> {
    let (u, _) = polar_factors(p)?;
    Ok((RotationElt::from_su2(&u)?, kappa(p)?))
}

fn polar_factors(p: &ProjPoint) -> Result<(M2, M2)> {
    if p.on_quadric() {
        return Err(Error::OnQuadric);
    }
    let a = sl2(p);
    let h = mul2(&a, &star2(&a));
    let pos = sqrt_posdef(&h);
    let u = mul2(&adj2(&pos), &a);
    Ok((u, pos))
}

pub fn coamoeba(p: &ProjPoint) -> Result<RotationElt> {
    Ok(polar_decompose(p)?.0)
}

pub fn kappa_t(p: &ProjPoint, t: f64) -> Result<PolarCoord> {
    if !(t > 1.0) {
        return Err(Error::BadScale(t));
    }
    let rho = rho_of_matrix(p)?;
    let phi = kappa(p)?.to_polar().phi;
    Ok(PolarCoord { rho: rho / t.ln(), phi: if rho > 0.0 { phi } else { None } })
}

/// κₜ on unnormalised entries with no quadric tolerance: only `det = 0` exactly goes to the absolute.
pub fn kappa_t_raw(m: &[C64; 4], t: f64) -> Result<PolarCoord> {
    if !(t > 1.0) {
        return Err(Error::BadScale(t));
    }
    let det = (m[0] * m[3] - m[1] * m[2]).norm();
    if !det.is_finite() || m.iter().any(|z| !z.norm().is_finite()) {
        return Err(Error::Invalid("non-finite matrix".into()));
    }
    if det == 0.0 {
        return Ok(PolarCoord::boundary(boundary_kappa(&ProjPoint::new(*m)?)?));
    }
    let s = det.sqrt();
    let [a, b, c, d] = m.map(|z| z / s);
    let h01 = a * c.conj() + b * d.conj();
    let xs = [h01.re, h01.im, (a.norm_sqr() + b.norm_sqr() - c.norm_sqr() - d.norm_sqr()) / 2.0];
    let len = norm3(&xs);
    if len == 0.0 {
        return Ok(PolarCoord { rho: 0.0, phi: None });
    }
    Ok(PolarCoord { rho: len.asinh() / t.ln(), phi: Some(AbsPoint { n: xs.map(|v| v / len) }) })
}

/// Compactified κₜ: points of `Q` go to their image direction on the absolute.
pub fn kappa_bar_t(p: &ProjPoint, t: f64, eps_q: f64) -> Result<PolarCoord> {
    if !(t > 1.0) {
        return Err(Error::BadScale(t));
    }
    if p.on_quadric_tol(eps_q) {
        return Ok(PolarCoord::boundary(boundary_kappa_tol(p, eps_q)?));
    }
    kappa_t(p, t)
}

pub fn boundary_kappa(p: &ProjPoint) -> Result<AbsPoint> {
    boundary_kappa_tol(p, Tolerances::DEFAULT.eps_q)
}

pub fn boundary_kappa_tol(p: &ProjPoint, eps_q: f64) -> Result<AbsPoint> {
    Ok(AbsPoint::from_cp1(&p.q_coords_tol(eps_q)?.beta))
}

/// `U·Pᵗ` for `A = U·P`, with exponent `1/ln t`: keeps ι and φ, divides ρ by `ln t`.
pub fn h_t(p: &ProjPoint, t: f64) -> Result<ProjPoint> {
    if !(t > 1.0) {
        return Err(Error::BadScale(t));
    }
    let (u, pos) = polar_factors(p)?;
    let s = 1.0 / t.ln();
    let lambda = ((pos[0].re + pos[3].re) / 2.0).max(1.0).acosh();
    let (cp, ci) = if lambda < 1e-8 {
        (s, 1.0 - s)
    } else {
        ((s * lambda).sinh() / lambda.sinh(), ((1.0 - s) * lambda).sinh() / lambda.sinh())
    };
    let one = C64::new(ci, 0.0);
    let pw = [pos[0] * cp + one, pos[1] * cp, pos[2] * cp, pos[3] * cp + one];
    ProjPoint::new(mul2(&pw, &u))
}

/// Busemann function of the boundary point `q`, zero at the origin and decreasing towards `q`.
pub fn busemann(q: &AbsPoint, x: &HPoint) -> f64 {
    let z = q.to_cp1();
    let (w0, w1) = (-z.v().conj(), z.u().conj());
    let [x0, x1, x2, x3] = x.x;
    let h01 = C64::new(x1, x2);
    let val = x0 * w0.norm_sqr() + x3 * w1.norm_sqr() + 2.0 * (w0.conj() * h01 * w1).re;
    val.ln()
}

/// Möbius map sending `g.0 ↦ 0` and `g.1 ↦ ∞`.
fn to_standard_axis(g: (&AbsPoint, &AbsPoint)) -> Result<ProjPoint> {
    let (p1, p2) = (g.0.to_cp1(), g.1.to_cp1());
    if p1.sphere_dist(&p2) < 1e-12 {
        return Err(Error::CoincidingEndpoints);
    }
    ProjPoint::new([p1.v(), -p1.u(), -p2.v(), p2.u()])
}

/// Distance to the geodesic with the given endpoints, in closed form after
/// moving the geodesic to the axis `0–∞`, where `sinh d = |x1 + i·x2|`.
pub fn dist_to_geodesic(x: &HPoint, g: (&AbsPoint, &AbsPoint)) -> Result<f64> {
    let m = to_standard_axis(g)?;
    let y = x.isometry(&m)?;
    Ok(y.x[1].hypot(y.x[2]).asinh())
}

/// The same distance by golden-section search along the geodesic.
pub fn dist_to_geodesic_search(x: &HPoint, g: (&AbsPoint, &AbsPoint)) -> Result<f64> {
    let back = to_standard_axis(g)?.inverse()?;
    let along = |s: f64| -> Result<HPoint> { HPoint { x: [s.exp(), 0.0, 0.0, (-s).exp()] }.isometry(&back) };
    let base = along(0.0)?;
    let reach = dist(&base, x)? + 1.0;
    let f = |s: f64| along(s).and_then(|g| dist(&g, x)).unwrap_or(f64::INFINITY);
    let (_, d) = optim::golden_section(f, -reach, reach, 300);
    Ok(d)
}
