//! Points and lines of `CP³` as 2×2 matrices, the quadric `Q = {ad − bc = 0}`,
//! its rulings, and the P-real structure whose fixed locus is `κ⁻¹(0)`.

use serde::{Deserialize, Serialize};

use crate::binary;
use crate::error::{Error, Result};
use crate::tol::Tolerances;
use crate::C64;

const TIE: f64 = 1e-12;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Frobenius-normalize and rotate the phase so the largest entry is real positive.
pub(crate) fn canonical<const N: usize>(v: [C64; N]) -> Option<[C64; N]> {
    if v.iter().any(|z| !z.is_finite()) {
        return None;
    }
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big <= 0.0 {
        return None;
    }
    let scaled = v.map(|z| z / big);
    let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mods = scaled.map(|z| z.norm());
    let top = mods.iter().cloned().fold(0.0, f64::max);
    let k = mods.iter().position(|&m| m >= top * (1.0 - TIE))?;
    let phase = scaled[k].conj() / mods[k];
    let mut out = scaled.map(|z| z * phase / norm);
    out[k] = C64::new(out[k].norm(), 0.0);
    Some(out)
}

/// Fubini–Study angle in `[0, π/2]` between two nonzero vectors.
pub fn fs_angle(x: &[C64], y: &[C64]) -> f64 {
    let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let inner: C64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<C64>() / (nx * ny);
    let mut wedge = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            wedge += ((x[i] * y[j] - x[j] * y[i]) / (nx * ny)).norm_sqr();
        }
    }
    wedge.sqrt().atan2(inner.norm())
}

fn phase_aligned_gap(x: &[C64], y: &[C64]) -> f64 {
    let inner: C64 = y.iter().zip(x).map(|(a, b)| a.conj() * b).sum();
    if inner.norm() == 0.0 {
        return f64::INFINITY;
    }
    let ph = inner / inner.norm();
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - ph * b).norm())
        .fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct VecJson<const N: usize> {
    #[serde(with = "serde_arrays")]
    re: [f64; N],
    #[serde(with = "serde_arrays")]
    im: [f64; N],
}

mod serde_arrays {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[f64; N], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| D::Error::custom(format!("expected {N} numbers, got {}", v.len())))
    }
}

pub(crate) fn to_json<const N: usize>(v: &[C64; N]) -> VecJson<N> {
    VecJson { re: v.map(|z| z.re), im: v.map(|z| z.im) }
}

pub(crate) fn from_json<const N: usize>(j: VecJson<N>) -> [C64; N] {
    std::array::from_fn(|k| C64::new(j.re[k], j.im[k]))
}

/// A point of `CP¹`, stored canonically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VecJson<2>", into = "VecJson<2>")]
pub struct CP1Point {
    u: C64,
    v: C64,
}

impl TryFrom<VecJson<2>> for CP1Point {
    type Error = Error;
    fn try_from(j: VecJson<2>) -> Result<Self> {
        let [u, v] = from_json(j);
        CP1Point::new(u, v)
    }
}

impl From<CP1Point> for VecJson<2> {
    fn from(p: CP1Point) -> Self {
        to_json(&[p.u, p.v])
    }
}

impl CP1Point {
    pub fn new(u: C64, v: C64) -> Result<Self> {
        let [u, v] = canonical([u, v]).ok_or(Error::ZeroMatrix)?;
        Ok(Self { u, v })
    }

    /// Canonicalizes without error handling; callers guarantee a nonzero pair.
    pub(crate) fn raw(u: C64, v: C64) -> Self {
        Self::new(u, v).unwrap_or_else(|_| Self::infinity())
    }

    pub fn from_affine(z: C64) -> Self {
        Self::raw(z, C64::new(1.0, 0.0))
    }

    pub fn infinity() -> Self {
        Self { u: C64::new(1.0, 0.0), v: zero() }
    }

    pub fn zero() -> Self {
        Self { u: zero(), v: C64::new(1.0, 0.0) }
    }

    pub fn u(&self) -> C64 {
        self.u
    }

    pub fn v(&self) -> C64 {
        self.v
    }

    pub fn to_affine(&self) -> Option<C64> {
        (self.v.norm() > 0.0).then(|| self.u / self.v)
    }

    /// Spherical distance on `CP¹ ≅ S²`, diameter π.
    pub fn sphere_dist(&self, other: &CP1Point) -> f64 {
        2.0 * fs_angle(&[self.u, self.v], &[other.u, other.v])
    }

    pub fn approx_eq(&self, other: &CP1Point, eps: f64) -> bool {
        phase_aligned_gap(&[self.u, self.v], &[other.u, other.v]) < eps
    }

    /// `z ↦ −1/z̄`.
    pub fn antipode(&self) -> CP1Point {
        Self::raw(-self.v.conj(), self.u.conj())
    }

    /// Unit vector with `(1:0) ↦ e₃` and `(0:1) ↦ −e₃`.
    pub fn to_sphere(&self) -> [f64; 3] {
        let w = self.u * self.v.conj();
        [2.0 * w.re, 2.0 * w.im, self.u.norm_sqr() - self.v.norm_sqr()]
    }

    pub fn from_sphere(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Invalid("zero direction".into()));
        }
        let n = n.map(|x| x / len);
        let w = C64::new(n[0], n[1]);
        if n[2] >= 0.0 {
            let u = ((1.0 + n[2]) / 2.0).sqrt();
            Self::new(C64::new(u, 0.0), w.conj() / (2.0 * u))
        } else {
            let v = ((1.0 - n[2]) / 2.0).sqrt();
            Self::new(w / (2.0 * v), C64::new(v, 0.0))
        }
    }

    /// Short text form: `"inf"`, `"0"`, or the affine coordinate.
    pub fn label(&self) -> String {
        if self.v.norm() <= TIE * self.u.norm() {
            return "inf".into();
        }
        let z = self.u / self.v;
        if z.norm() <= TIE {
            return "0".into();
        }
        let clean = |x: f64| if x.abs() < TIE { 0.0 } else { x };
        let (re, im) = (clean(z.re), clean(z.im));
        match (re == 0.0, im == 0.0) {
            (_, true) => format!("{re}"),
            (true, false) => format!("{im}i"),
            _ if im < 0.0 => format!("{re}-{}i", -im),
            _ => format!("{re}+{im}i"),
        }
    }
}

/// A 2×2 complex matrix `[[a,b],[c,d]]` up to scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VecJson<4>", into = "VecJson<4>")]
pub struct ProjPoint {
    m: [C64; 4],
}

impl TryFrom<VecJson<4>> for ProjPoint {
    type Error = Error;
    fn try_from(j: VecJson<4>) -> Result<Self> {
        ProjPoint::new(from_json(j))
    }
}

impl From<ProjPoint> for VecJson<4> {
    fn from(p: ProjPoint) -> Self {
        to_json(&p.m)
    }
}

impl ProjPoint {
    pub fn new(m: [C64; 4]) -> Result<Self> {
        canonical(m).map(|m| Self { m }).ok_or(Error::ZeroMatrix)
    }

    pub fn from_real(m: [f64; 4]) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity() -> Self {
        Self::from_real([1.0, 0.0, 0.0, 1.0]).expect("identity")
    }

    pub fn entries(&self) -> [C64; 4] {
        self.m
    }

    pub fn det(&self) -> C64 {
        let [a, b, c, d] = self.m;
        a * d - b * c
    }

    pub fn on_quadric(&self) -> bool {
        self.on_quadric_tol(Tolerances::DEFAULT.eps_q)
    }

    pub fn on_quadric_tol(&self, eps_q: f64) -> bool {
        self.det().norm() < eps_q
    }

    pub fn q_coords(&self) -> Result<QuadricPoint> {
        self.q_coords_tol(Tolerances::DEFAULT.eps_q)
    }

    pub fn q_coords_tol(&self, eps_q: f64) -> Result<QuadricPoint> {
        let det = self.det().norm();
        if det >= eps_q {
            return Err(Error::NotOnQuadric(det));
        }
        Ok(self.rank1_coords())
    }

    /// Kernel and image of the nearest rank-1 reading, without the quadric check.
    pub(crate) fn rank1_coords(&self) -> QuadricPoint {
        let [a, b, c, d] = self.m;
        let row = if a.norm_sqr() + b.norm_sqr() >= c.norm_sqr() + d.norm_sqr() { (a, b) } else { (c, d) };
        let col = if a.norm_sqr() + c.norm_sqr() >= b.norm_sqr() + d.norm_sqr() { (a, c) } else { (b, d) };
        QuadricPoint {
            alpha: CP1Point::raw(row.1, -row.0),
            beta: CP1Point::raw(col.0, col.1),
        }
    }

    /// Equality up to a unit phase, entrywise within `eps`.
    pub fn approx_eq(&self, other: &ProjPoint, eps: f64) -> bool {
        phase_aligned_gap(&self.m, &other.m) < eps
    }

    pub fn fs_dist(&self, other: &ProjPoint) -> f64 {
        fs_angle(&self.m, &other.m)
    }

    pub fn mul(&self, other: &ProjPoint) -> Result<ProjPoint> {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        ProjPoint::new([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn adjugate(&self) -> ProjPoint {
        let [a, b, c, d] = self.m;
        Self { m: [d, -b, -c, a] }
    }

    pub fn inverse(&self) -> Result<ProjPoint> {
        if self.on_quadric() {
            return Err(Error::OnQuadric);
        }
        Ok(self.adjugate())
    }

    pub fn conj_transpose(&self) -> ProjPoint {
        let [a, b, c, d] = self.m;
        ProjPoint::new([a.conj(), c.conj(), b.conj(), d.conj()]).expect("nonzero")
    }

    /// `A ↦ (A*)⁻¹` up to scale, i.e. `(d̄, −c̄, −b̄, ā)`; its fixed locus is the set of
    /// unitary matrices up to scale.
    pub fn p_real_involution(&self) -> ProjPoint {
        let [a, b, c, d] = self.m;
        ProjPoint::new([d.conj(), -c.conj(), -b.conj(), a.conj()]).expect("nonzero")
    }

    pub fn is_p_real(&self, eps: f64) -> bool {
        self.approx_eq(&self.p_real_involution(), eps)
    }

    /// Coordinates `(a+d, i(a−d), b−c, i(b+c))` in which the involution is complex conjugation
    /// and `ad − bc = (z₀²+z₁²+z₂²+z₃²)/4`.
    pub fn real_chart(&self) -> [C64; 4] {
        let [a, b, c, d] = self.m;
        let i = C64::i();
        [a + d, i * (a - d), b - c, i * (b + c)]
    }

    pub fn from_real_chart(z: [C64; 4]) -> Result<ProjPoint> {
        ProjPoint::new(chart_matrix(z))
    }

    /// Möbius action on `CP¹`.
    pub fn act(&self, z: &CP1Point) -> Result<CP1Point> {
        let [a, b, c, d] = self.m;
        CP1Point::new(a * z.u + b * z.v, c * z.u + d * z.v).map_err(|_| Error::OnQuadric)
    }

    pub fn pi_p(&self) -> Result<QuadricPoint> {
        self.pi_p_tol(&Tolerances::DEFAULT)
    }

    /// Projection to `Q` along the unique P-real line through the point, onto the
    /// intersection point on the same side of the real locus.
    pub fn pi_p_tol(&self, tol: &Tolerances) -> Result<QuadricPoint> {
        if self.on_quadric_tol(tol.eps_q) {
            return self.q_coords_tol(tol.eps_q);
        }
        let z = self.real_chart();
        let x = z.map(|w| w.re);
        let y = z.map(|w| w.im);
        let dot = |p: &[f64; 4], q: &[f64; 4]| p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
        let (xx, xy, yy) = (dot(&x, &x), dot(&x, &y), dot(&y, &y));
        let gram_det = xx * yy - xy * xy;
        let scale = xx + yy;
        if gram_det < (tol.eps_proj * scale).powi(2) {
            return Err(Error::OnRealLocus);
        }
        // the point is x + i·y; solve Q(x + λy) = 0 and keep Im λ > 0
        let lambda = C64::new(-xy, gram_det.sqrt()) / yy;
        let w: [C64; 4] = std::array::from_fn(|k| C64::new(x[k], 0.0) + lambda * y[k]);
        Ok(ProjPoint::from_real_chart(w)?.rank1_coords())
    }
}

pub(crate) fn chart_matrix(z: [C64; 4]) -> [C64; 4] {
    let i = C64::i();
    [
        (z[0] - i * z[1]) / 2.0,
        (z[2] - i * z[3]) / 2.0,
        (-z[2] - i * z[3]) / 2.0,
        (z[0] + i * z[1]) / 2.0,
    ]
}

/// A point of `Q ≅ CP¹×CP¹`: kernel `alpha` (π₋) and image `beta` (π₊).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadricPoint {
    pub alpha: CP1Point,
    pub beta: CP1Point,
}

impl QuadricPoint {
    pub fn to_matrix(&self) -> ProjPoint {
        let (r0, r1) = (-self.alpha.v, self.alpha.u);
        let (b0, b1) = (self.beta.u, self.beta.v);
        ProjPoint::new([b0 * r0, b0 * r1, b1 * r0, b1 * r1]).expect("nonzero")
    }

    pub fn approx_eq(&self, other: &QuadricPoint, eps: f64) -> bool {
        self.alpha.approx_eq(&other.alpha, eps) && self.beta.approx_eq(&other.beta, eps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    /// The line is a fiber of π₊: `beta` is constant.
    OnQuadricPlusRuling,
    /// The line is a fiber of π₋: `alpha` is constant.
    OnQuadricMinusRuling,
    Tangent,
    Transverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineQData {
    pub kind: LineKind,
    /// Pencil parameters `[s:t]` of the intersection with `Q`.
    pub roots: Vec<CP1Point>,
    pub qpoints: Vec<QuadricPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineJson {
    p: ProjPoint,
    q: ProjPoint,
}

/// A projective line, stored with an orthonormal basis `p, d` and its intersection with `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineJson", into = "LineJson")]
pub struct Line {
    p: ProjPoint,
    d: ProjPoint,
    qdata: LineQData,
}

impl TryFrom<LineJson> for Line {
    type Error = Error;
    fn try_from(j: LineJson) -> Result<Self> {
        Line::through(&j.p, &j.q)
    }
}

impl From<Line> for LineJson {
    fn from(l: Line) -> Self {
        LineJson { p: l.p, q: l.d }
    }
}

pub fn line_through(p: &ProjPoint, q: &ProjPoint) -> Result<Line> {
    Line::through(p, q)
}

impl Line {
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<Line> {
        Self::through_tol(p, q, &Tolerances::DEFAULT)
    }

    pub fn through_tol(p: &ProjPoint, q: &ProjPoint, tol: &Tolerances) -> Result<Line> {
        let inner: C64 = p.m.iter().zip(&q.m).map(|(a, b)| a.conj() * b).sum();
        let r: [C64; 4] = std::array::from_fn(|k| q.m[k] - inner * p.m[k]);
        let rn = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rn < tol.eps_rank {
            return Err(Error::DegenerateSpan);
        }
        let d = ProjPoint::new(r)?;
        let qdata = Self::intersect(p, &d, tol)?;
        Ok(Line { p: *p, d, qdata })
    }

    fn intersect(p: &ProjPoint, d: &ProjPoint, tol: &Tolerances) -> Result<LineQData> {
        let [a1, b1, c1, d1] = p.m;
        let [a2, b2, c2, d2] = d.m;
        let cross = a1 * d2 + d1 * a2 - b1 * c2 - c1 * b2;
        let coef = [d.det(), cross, p.det()];
        let n = binary::norm(&coef);
        if n < tol.eps_q {
            let samples = [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)];
            let qs: Vec<QuadricPoint> = samples
                .iter()
                .map(|&(s, t)| {
                    let m: [C64; 4] = std::array::from_fn(|k| p.m[k] * s + d.m[k] * t);
                    ProjPoint::new(m).map(|x| x.rank1_coords())
                })
                .collect::<Result<_>>()?;
            let spread = |f: fn(&QuadricPoint) -> CP1Point| {
                qs.iter().map(|q| f(q).sphere_dist(&f(&qs[0]))).fold(0.0, f64::max)
            };
            let kind = if spread(|q| q.beta) < 1e-6 {
                LineKind::OnQuadricPlusRuling
            } else if spread(|q| q.alpha) < 1e-6 {
                LineKind::OnQuadricMinusRuling
            } else {
                return Err(Error::Inconsistent("line in Q but neither ruling is constant".into()));
            };
            return Ok(LineQData { kind, roots: Vec::new(), qpoints: Vec::new() });
        }
        let c = coef.map(|z| z / n);
        let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
        let roots: Vec<CP1Point> = if disc.norm() < tol.eps_disc {
            let one = C64::new(1.0, 0.0);
            let r = if c[2].norm() >= c[0].norm() {
                CP1Point::raw(-c[1] / (2.0 * c[2]), one)
            } else {
                CP1Point::raw(one, -c[1] / (2.0 * c[0]))
            };
            vec![r]
        } else {
            binary::quadratic_roots(c).to_vec()
        };
        let kind = if roots.len() == 1 { LineKind::Tangent } else { LineKind::Transverse };
        let pencil = |r: &CP1Point| -> Result<QuadricPoint> {
            let m: [C64; 4] = std::array::from_fn(|k| p.m[k] * r.u + d.m[k] * r.v);
            Ok(ProjPoint::new(m)?.rank1_coords())
        };
        let qpoints = roots.iter().map(pencil).collect::<Result<_>>()?;
        Ok(LineQData { kind, roots, qpoints })
    }

    pub fn basis(&self) -> (ProjPoint, ProjPoint) {
        (self.p, self.d)
    }

    pub fn qdata(&self) -> &LineQData {
        &self.qdata
    }

    pub fn kind(&self) -> LineKind {
        self.qdata.kind
    }

    pub fn point(&self, param: &CP1Point) -> Result<ProjPoint> {
        let m: [C64; 4] = std::array::from_fn(|k| self.p.m[k] * param.u + self.d.m[k] * param.v);
        ProjPoint::new(m)
    }

    /// Distance-like residual of `x` from the span (norm of the orthogonal remainder).
    pub fn residual(&self, x: &ProjPoint) -> f64 {
        let proj = |b: &ProjPoint| -> C64 { b.m.iter().zip(&x.m).map(|(a, c)| a.conj() * c).sum() };
        let (cp, cd) = (proj(&self.p), proj(&self.d));
        (0..4)
            .map(|k| (x.m[k] - cp * self.p.m[k] - cd * self.d.m[k]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &ProjPoint, eps: f64) -> bool {
        self.residual(x) < eps
    }

    pub fn left_mul(&self, a: &ProjPoint) -> Result<Line> {
        Line::through(&a.mul(&self.p)?, &a.mul(&self.d)?)
    }

    pub fn right_mul(&self, a: &ProjPoint) -> Result<Line> {
        Line::through(&self.p.mul(a)?, &self.d.mul(a)?)
    }

    /// Whether the involution maps the line to itself.
    pub fn is_p_real(&self, eps: f64) -> bool {
        self.contains(&self.p.p_real_involution(), eps) && self.contains(&self.d.p_real_involution(), eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(m: [f64; 4]) -> ProjPoint {
        ProjPoint::from_real(m).unwrap()
    }

    #[test]
    fn det_examples() {
        assert!((ProjPoint::identity().det() - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(real([1.0, 0.0, 0.0, 0.0]).det().norm(), 0.0);
        assert!((real([2.0, 1.0, 1.0, 1.0]).det() - c(1.0 / 7.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_form() {
        let p = ProjPoint::new([c(0.0, 3.0), c(1.0, 0.0), zero(), zero()]).unwrap();
        let m = p.entries();
        assert!((m[0] - c(3.0 / 10f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(ProjPoint::new([zero(); 4]).is_err());
        let tie = ProjPoint::new([c(0.0, 1.0), c(0.0, 1.0), zero(), zero()]).unwrap();
        assert_eq!(tie.entries()[0].im, 0.0);
    }

    #[test]
    fn on_quadric_examples() {
        assert!(real([1.0, 0.0, 0.0, 0.0]).on_quadric());
        assert!(!ProjPoint::identity().on_quadric());
        let t = 1e6;
        assert!(real([1.0, t, 1.0 / t, 1.0]).on_quadric());
    }

    #[test]
    fn q_coords_examples() {
        let q = real([1.0, 0.0, 0.0, 0.0]).q_coords().unwrap();
        assert_eq!(q.alpha.label(), "0");
        assert_eq!(q.beta.label(), "inf");
        let q = real([0.0, 1.0, 0.0, 0.0]).q_coords().unwrap();
        assert_eq!(q.alpha.label(), "inf");
        assert_eq!(q.beta.label(), "inf");
        assert!(matches!(ProjPoint::identity().q_coords(), Err(Error::NotOnQuadric(_))));
    }

    #[test]
    fn q_coords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let z = QuadricPoint { alpha: sample::cp1(&mut rng), beta: sample::cp1(&mut rng) };
            let m = z.to_matrix();
            let back = m.q_coords().unwrap();
            worst = worst.max(back.to_matrix().fs_dist(&m));
            assert!(back.approx_eq(&z, 1e-9));
        }
        assert!(worst < 1e-10);
    }

    #[test]
    fn line_examples() {
        let l2 = Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(l2.kind(), LineKind::Transverse);
        let pts: Vec<ProjPoint> = l2.qdata().qpoints.iter().map(|q| q.to_matrix()).collect();
        assert!(pts.iter().any(|p| p.approx_eq(&real([1.0, 0.0, 0.0, 0.0]), 1e-12)));
        assert!(pts.iter().any(|p| p.approx_eq(&real([0.0, 0.0, 0.0, 1.0]), 1e-12)));

        let l1 = Line::through(&ProjPoint::identity(), &real([0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(l1.kind(), LineKind::Tangent);
        assert!(l1.qdata().qpoints[0].to_matrix().approx_eq(&real([0.0, 1.0, 0.0, 0.0]), 1e-12));

        let ruled = Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(ruled.kind(), LineKind::OnQuadricPlusRuling);
        let ruled = Line::through(&real([1.0, 0.0, 0.0, 0.0]), &real([0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(ruled.kind(), LineKind::OnQuadricMinusRuling);

        assert!(matches!(
            Line::through(&ProjPoint::identity(), &real([2.0, 0.0, 0.0, 2.0])),
            Err(Error::DegenerateSpan)
        ));
    }

    #[test]
    fn classification_ignores_basis_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = sample::proj(&mut rng);
            let q = sample::proj(&mut rng);
            let l = Line::through(&p, &q).unwrap();
            let (s1, s2) = (sample::complex(&mut rng), sample::complex(&mut rng));
            let r = ProjPoint::new(std::array::from_fn(|k| p.m[k] * s1 + q.m[k] * s2)).unwrap();
            let l2 = Line::through(&r, &p).unwrap();
            assert_eq!(l.kind(), l2.kind());
            for z in &l.qdata().qpoints {
                assert!(l2.qdata().qpoints.iter().any(|w| w.approx_eq(z, 1e-7)));
            }
        }
    }

    #[test]
    fn transverse_points_differ_in_both_rulings() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let l = Line::through(&sample::proj(&mut rng), &sample::proj(&mut rng)).unwrap();
            let q = &l.qdata().qpoints;
            assert!(q[0].alpha.sphere_dist(&q[1].alpha) > 1e-6);
            assert!(q[0].beta.sphere_dist(&q[1].beta) > 1e-6);
        }
    }

    #[test]
    fn rulings_under_left_and_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let l = Line::through(&sample::proj(&mut rng), &sample::proj(&mut rng)).unwrap();
            let a = sample::proj(&mut rng);
            let left = l.left_mul(&a).unwrap();
            let right = l.right_mul(&a).unwrap();
            let ainv = a.inverse().unwrap();
            for z in &l.qdata().qpoints {
                let moved = QuadricPoint { alpha: z.alpha, beta: a.act(&z.beta).unwrap() };
                assert!(left.qdata().qpoints.iter().any(|w| w.approx_eq(&moved, 1e-6)));
                let moved = QuadricPoint { alpha: ainv.act(&z.alpha).unwrap(), beta: z.beta };
                assert!(right.qdata().qpoints.iter().any(|w| w.approx_eq(&moved, 1e-6)));
            }
        }
    }

    #[test]
    fn involution_examples() {
        let id = ProjPoint::identity();
        assert!(id.p_real_involution().approx_eq(&id, 1e-15));
        let p = ProjPoint::new([c(0.0, 1.0), zero(), zero(), c(0.0, -1.0)]).unwrap();
        assert!(p.p_real_involution().approx_eq(&p, 1e-15));
        assert!(real([2.0, 0.0, 0.0, 1.0]).p_real_involution().approx_eq(&real([1.0, 0.0, 0.0, 2.0]), 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = sample::proj(&mut rng);
            assert!(p.p_real_involution().p_real_involution().approx_eq(&p, 1e-12));
            let u = sample::unitary(&mut rng);
            assert!(u.is_p_real(1e-12));
            let chart = u.real_chart();
            let phase = chart.iter().fold(zero(), |acc, z| if z.norm() > acc.norm() { *z } else { acc });
            assert!(chart.iter().all(|z| (z / phase).im.abs() < 1e-12));
        }
    }

    #[test]
    fn pi_p_examples() {
        let t = 3.0;
        let p = real([t, 0.0, 0.0, 1.0 / t]);
        assert_eq!(p.pi_p().unwrap().beta.label(), "inf");
        let e12 = real([0.0, 1.0, 0.0, 0.0]);
        assert_eq!(e12.pi_p().unwrap(), e12.q_coords().unwrap());
        assert_eq!(ProjPoint::identity().pi_p(), Err(Error::OnRealLocus));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let p = sample::proj(&mut rng);
            let (z1, z2) = (p.pi_p().unwrap(), p.p_real_involution().pi_p().unwrap());
            assert!(!z1.approx_eq(&z2, 1e-6));
            let l = Line::through(&p, &p.p_real_involution()).unwrap();
            assert!(l.contains(&z1.to_matrix(), 1e-9) && l.contains(&z2.to_matrix(), 1e-9));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = ProjPoint::new([c(1.0, 2.0), c(0.5, 0.0), zero(), c(0.0, -1.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: ProjPoint = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&p, 1e-15));
        assert!(serde_json::from_str::<ProjPoint>(r#"{"re":[0,0,0,0],"im":[0,0,0,0]}"#).is_err());
        assert!(serde_json::from_str::<ProjPoint>(r#"{"re":[1,0,0,0],"im":[0,0,0,0],"x":1}"#).is_err());
        assert!(serde_json::from_str::<ProjPoint>(r#"{"re":[1,0,0],"im":[0,0,0]}"#).is_err());
    }

    #[test]
    fn sphere_identification() {
        assert_eq!(CP1Point::infinity().to_sphere(), [0.0, 0.0, 1.0]);
        assert_eq!(CP1Point::zero().to_sphere(), [0.0, 0.0, -1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let z = sample::cp1(&mut rng);
            let n = z.to_sphere();
            assert!(CP1Point::from_sphere(n).unwrap().approx_eq(&z, 1e-12));
            let m = z.antipode().to_sphere();
            assert!((0..3).all(|k| (n[k] + m[k]).abs() < 1e-12));
            assert!((z.sphere_dist(&z.antipode()) - std::f64::consts::PI).abs() < 1e-12);
        }
    }
}
