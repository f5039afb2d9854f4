//! Surfaces `{p = 0}` in `CP³`: amoeba membership by searching for zeros of the
//! translated polynomial on `κ⁻¹(0) ≅ S³`, convexity of holes, the left Gauss map
//! into `CP²` and the conic `C_N` of tangent planes of `Q`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, Matrix4, SMatrix, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary;
use crate::curve::Sym2Point;
use crate::error::{Error, Result};
use crate::hyperbolic::{self, AbsPoint, HPoint};
use crate::optim;
use crate::proj::{chart_matrix, fs_angle, CP1Point, ProjPoint, QuadricPoint};
use crate::sample;
use crate::tol::Tolerances;
use crate::C64;

type Exp = [u32; 4];

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoJson {
    exp: Exp,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceJson {
    degree: u32,
    monomials: Vec<MonoJson>,
}

/// A homogeneous polynomial `p(a, b, c, d)`, exponents in that order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceJson", into = "SurfaceJson")]
pub struct Surface {
    degree: u32,
    monomials: BTreeMap<Exp, C64>,
    coeff_norm: f64,
}

impl TryFrom<SurfaceJson> for Surface {
    type Error = Error;
    fn try_from(j: SurfaceJson) -> Result<Self> {
        Surface::new(j.degree, j.monomials.into_iter().map(|m| (m.exp, C64::new(m.re, m.im))))
    }
}

impl From<Surface> for SurfaceJson {
    fn from(s: Surface) -> Self {
        SurfaceJson {
            degree: s.degree,
            monomials: s.monomials.iter().map(|(e, c)| MonoJson { exp: *e, re: c.re, im: c.im }).collect(),
        }
    }
}

fn all_exponents(d: u32) -> Vec<Exp> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                out.push([a, b, c, d - a - b - c]);
            }
        }
    }
    out
}

impl Surface {
    pub fn new(degree: u32, monomials: impl IntoIterator<Item = (Exp, C64)>) -> Result<Self> {
        let s = Self::build(degree, monomials)?;
        if s.is_quadric() {
            return Err(Error::IsQuadric);
        }
        Ok(s)
    }

    fn build(degree: u32, monomials: impl IntoIterator<Item = (Exp, C64)>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Invalid("surface degree must be positive".into()));
        }
        let mut map: BTreeMap<Exp, C64> = BTreeMap::new();
        for (e, c) in monomials {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::DimensionMismatch(format!("monomial {e:?} is not of degree {degree}")));
            }
            if !c.is_finite() {
                return Err(Error::Invalid("non-finite coefficient".into()));
            }
            *map.entry(e).or_insert_with(zero) += c;
        }
        map.retain(|_, c| c.norm() > 0.0);
        let coeff_norm = map.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if coeff_norm == 0.0 {
            return Err(Error::Invalid("zero polynomial".into()));
        }
        Ok(Self { degree, monomials: map, coeff_norm })
    }

    fn is_quadric(&self) -> bool {
        if self.degree != 2 {
            return false;
        }
        let ad = self.coeff([1, 0, 0, 1]);
        let bc = self.coeff([0, 1, 1, 0]);
        let rest: f64 = self
            .monomials
            .iter()
            .filter(|(e, _)| **e != [1, 0, 0, 1] && **e != [0, 1, 1, 0])
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        rest <= 1e-12 * self.coeff_norm && (ad + bc).norm() <= 1e-12 * self.coeff_norm
    }

    /// `ad − bc`; this is the only constructor that bypasses the quadric exclusion.
    pub fn quadric() -> Self {
        Self::build(2, [([1, 0, 0, 1], C64::new(1.0, 0.0)), ([0, 1, 1, 0], C64::new(-1.0, 0.0))]).expect("nonzero")
    }

    /// `(a+d)² + 4(ad − bc)`, equal to `z₀² + Σ z_k²` on the unitary chart, so the origin is a hole.
    pub fn hole_quadric() -> Self {
        let c = |x: f64| C64::new(x, 0.0);
        Self::new(2, [([2, 0, 0, 0], c(1.0)), ([1, 0, 0, 1], c(6.0)), ([0, 0, 0, 2], c(1.0)), ([0, 1, 1, 0], c(-4.0))])
            .expect("not a multiple of the quadric")
    }

    pub fn linear(coeffs: [C64; 4]) -> Result<Self> {
        Self::new(1, (0..4).map(|k| {
            let mut e = [0; 4];
            e[k] = 1;
            (e, coeffs[k])
        }))
    }

    /// Gaussian coefficients on every monomial of degree `d`.
    pub fn random<R: Rng + ?Sized>(degree: u32, rng: &mut R) -> Result<Self> {
        Self::new(degree, all_exponents(degree).into_iter().map(|e| (e, sample::complex(rng))))
    }

    /// `f + λ·(ad − bc)^(d/2)` with random `f` and `λ` large enough that the origin is a hole.
    pub fn random_with_hole<R: Rng + ?Sized>(degree: u32, rng: &mut R) -> Result<Self> {
        if !degree.is_multiple_of(2) {
            return Err(Error::Invalid("holes need even degree".into()));
        }
        let f = Self::random(degree, rng)?;
        let lambda = 4.0 * f.monomials.values().map(|c| c.norm()).sum::<f64>();
        let q = Self::quadric().pow(degree / 2);
        Self::new(degree, f.monomials.into_iter().chain(q.monomials.into_iter().map(|(e, c)| (e, c * lambda))))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeff_norm
    }

    pub fn coeff(&self, e: Exp) -> C64 {
        self.monomials.get(&e).copied().unwrap_or_else(zero)
    }

    /// Equality up to a nonzero scalar, relative to the coefficient norms.
    pub fn approx_eq(&self, other: &Surface, eps: f64) -> bool {
        if self.degree != other.degree {
            return false;
        }
        let keys: std::collections::BTreeSet<&Exp> = self.monomials.keys().chain(other.monomials.keys()).collect();
        let x: Vec<C64> = keys.iter().map(|e| self.coeff(**e)).collect();
        let y: Vec<C64> = keys.iter().map(|e| other.coeff(**e)).collect();
        fs_angle(&x, &y) < eps
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Exp, &C64)> {
        self.monomials.iter()
    }

    fn mul(&self, other: &Surface) -> Surface {
        let mut map: BTreeMap<Exp, C64> = BTreeMap::new();
        for (e1, c1) in &self.monomials {
            for (e2, c2) in &other.monomials {
                let e = std::array::from_fn(|k| e1[k] + e2[k]);
                *map.entry(e).or_insert_with(zero) += c1 * c2;
            }
        }
        Self::build(self.degree + other.degree, map).unwrap_or_else(|_| Self::quadric())
    }

    fn pow(&self, n: u32) -> Surface {
        let mut out = self.clone();
        for _ in 1..n {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, m: &[C64; 4]) -> C64 {
        self.eval_grad(m).0
    }

    /// Value and gradient `(p_a, p_b, p_c, p_d)`.
    pub fn eval_grad(&self, m: &[C64; 4]) -> (C64, [C64; 4]) {
        let d = self.degree as usize;
        let pw: Vec<Vec<C64>> = m
            .iter()
            .map(|&x| {
                let mut v = vec![C64::new(1.0, 0.0); d + 1];
                for k in 1..=d {
                    v[k] = v[k - 1] * x;
                }
                v
            })
            .collect();
        let mut val = zero();
        let mut grad = [zero(); 4];
        for (e, c) in &self.monomials {
            let f: [C64; 4] = std::array::from_fn(|k| pw[k][e[k] as usize]);
            val += c * f[0] * f[1] * f[2] * f[3];
            for k in 0..4 {
                if e[k] == 0 {
                    continue;
                }
                let mut g = c * e[k] as f64 * pw[k][e[k] as usize - 1];
                for (j, fj) in f.iter().enumerate() {
                    if j != k {
                        g *= fj;
                    }
                }
                grad[k] += g;
            }
        }
        (val, grad)
    }

    /// Substitutes `var_j ↦ Σ_k lin[j][k]·var_k`.
    fn compose(&self, lin: [[C64; 4]; 4]) -> Surface {
        let linear: [Surface; 4] = std::array::from_fn(|j| {
            Self::build(1, (0..4).map(|k| {
                let mut e = [0; 4];
                e[k] = 1;
                (e, lin[j][k])
            }))
            .unwrap_or_else(|_| Self { degree: 1, monomials: BTreeMap::new(), coeff_norm: 0.0 })
        });
        let mut map: BTreeMap<Exp, C64> = BTreeMap::new();
        for (e, c) in &self.monomials {
            let mut term: BTreeMap<Exp, C64> = BTreeMap::from([([0; 4], *c)]);
            for j in 0..4 {
                for _ in 0..e[j] {
                    let mut next: BTreeMap<Exp, C64> = BTreeMap::new();
                    for (te, tc) in &term {
                        for (le, lc) in &linear[j].monomials {
                            let ne = std::array::from_fn(|k| te[k] + le[k]);
                            *next.entry(ne).or_insert_with(zero) += tc * lc;
                        }
                    }
                    term = next;
                }
            }
            for (te, tc) in term {
                *map.entry(te).or_insert_with(zero) += tc;
            }
        }
        let scale = self.coeff_norm * 1e-15;
        map.retain(|_, c| c.norm() > scale);
        Self::build(self.degree, map).unwrap_or_else(|_| self.clone())
    }

    /// `q(A) = p(B·A)`.
    pub fn translate_left(&self, b: &ProjPoint) -> Result<Surface> {
        if b.on_quadric() {
            return Err(Error::OnQuadric);
        }
        let [b00, b01, b10, b11] = b.entries();
        Ok(self.compose([
            [b00, zero(), b01, zero()],
            [zero(), b00, zero(), b01],
            [b10, zero(), b11, zero()],
            [zero(), b10, zero(), b11],
        ]))
    }

    /// `q(A) = p(A·B)`.
    pub fn translate_right(&self, b: &ProjPoint) -> Result<Surface> {
        if b.on_quadric() {
            return Err(Error::OnQuadric);
        }
        let [b00, b01, b10, b11] = b.entries();
        Ok(self.compose([
            [b00, b10, zero(), zero()],
            [b01, b11, zero(), zero()],
            [zero(), zero(), b00, b10],
            [zero(), zero(), b01, b11],
        ]))
    }

    /// Relative residual `|p(A)|/‖p‖` at a unit-norm representative.
    pub fn residual(&self, a: &ProjPoint) -> f64 {
        self.eval(&a.entries()).norm() / self.coeff_norm
    }

    /// Points of `S ∩ Q` whose image is `beta`, as roots of `p(β·rᵀ)` in the kernel.
    pub fn boundary_preimages(&self, beta: &CP1Point) -> Vec<QuadricPoint> {
        let d = self.degree as usize;
        let (b0, b1) = (beta.u(), beta.v());
        let mut form = vec![zero(); d + 1];
        for (e, c) in &self.monomials {
            let [i, j, k, l] = *e;
            let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
            form[(j + l) as usize] += c * sign * b0.powu(i + j) * b1.powu(k + l);
        }
        if binary::norm(&form) <= 1e-12 * self.coeff_norm {
            return vec![QuadricPoint { alpha: CP1Point::infinity(), beta: *beta }];
        }
        binary::roots(&form)
            .into_iter()
            .map(|alpha| QuadricPoint { alpha, beta: *beta })
            .collect()
    }
}

/// Positive square root of the Hermitian form of `x`; `κ(B) = x`.
pub fn sqrt_point(x: &HPoint) -> ProjPoint {
    let [x0, x1, x2, x3] = x.coords();
    let s = (x0 + x3 + 2.0).sqrt();
    ProjPoint::new([
        C64::new((x0 + 1.0) / s, 0.0),
        C64::new(x1 / s, x2 / s),
        C64::new(x1 / s, -x2 / s),
        C64::new((x3 + 1.0) / s, 0.0),
    ])
    .expect("positive definite")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MembershipOpts {
    pub starts: usize,
    pub tau: f64,
    pub seed: u64,
}

impl Default for MembershipOpts {
    fn default() -> Self {
        Self { starts: 64, tau: Tolerances::DEFAULT.tau_member, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub member: bool,
    /// Smallest `|q|²/‖q‖²` found on `S³`.
    pub min_value: f64,
    pub witness: [f64; 4],
    pub starts: usize,
}

impl MembershipResult {
    /// The matrix `B·U` of `S` over `x` realising the witness.
    pub fn witness_matrix(&self, x: &HPoint) -> Result<ProjPoint> {
        sqrt_point(x).mul(&ProjPoint::new(chart_matrix(self.witness.map(|v| C64::new(v, 0.0))))?)
    }
}

const BATCH: usize = 8;
const LM_ITERS: usize = 200;

fn chart_basis() -> [[C64; 4]; 4] {
    std::array::from_fn(|k| {
        let mut e = [zero(); 4];
        e[k] = C64::new(1.0, 0.0);
        chart_matrix(e)
    })
}

fn f_value(q: &Surface, z: &[f64; 4]) -> f64 {
    let m = chart_matrix(z.map(|v| C64::new(v, 0.0)));
    q.eval(&m).norm_sqr() / (q.coeff_norm * q.coeff_norm)
}

/// Levenberg–Marquardt on `S³` for the residual `(Re q, Im q)/‖q‖`.
fn descend(q: &Surface, basis: &[[C64; 4]; 4], z0: [f64; 4], tau: f64) -> ([f64; 4], f64) {
    let n = q.coeff_norm;
    let mut z = Vector4::from(z0);
    let mut fz = f_value(q, &z0);
    let mut mu = 1e-3;
    for _ in 0..LM_ITERS {
        if fz < tau * 1e-6 {
            break;
        }
        let m = chart_matrix([z[0], z[1], z[2], z[3]].map(|v| C64::new(v, 0.0)));
        let (val, grad) = q.eval_grad(&m);
        let dz: [C64; 4] = std::array::from_fn(|k| (0..4).map(|j| grad[j] * basis[k][j]).sum());
        let mut jac = SMatrix::<f64, 2, 4>::from_fn(|r, k| if r == 0 { dz[k].re / n } else { dz[k].im / n });
        let radial = jac * z;
        jac -= radial * z.transpose();
        let r = nalgebra::Vector2::new(val.re / n, val.im / n);
        let jtj = jac.transpose() * jac;
        let g = jac.transpose() * r;
        let mut improved = false;
        while mu < 1e12 {
            let Some(step) = (jtj + Matrix4::identity() * mu).cholesky().map(|c| c.solve(&(-g))) else {
                mu *= 4.0;
                continue;
            };
            let cand = (z + step).normalize();
            let fc = f_value(q, &[cand[0], cand[1], cand[2], cand[3]]);
            if fc < fz {
                z = cand;
                fz = fc;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    ([z[0], z[1], z[2], z[3]], fz)
}

fn start_point(seed: u64, i: usize) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    sample::unit4(&mut rng)
}

/// Multistart search for a zero of `p(B·U)` over unitary `U`, with `κ(B) = x`.
pub fn membership(s: &Surface, x: &HPoint, opts: &MembershipOpts) -> Result<MembershipResult> {
    let q = s.translate_left(&sqrt_point(x))?;
    Ok(search_unitary(&q, opts))
}

fn search_unitary(q: &Surface, opts: &MembershipOpts) -> MembershipResult {
    let basis = chart_basis();
    let mut best = ([1.0, 0.0, 0.0, 0.0], f64::INFINITY);
    let mut run = 0;
    while run < opts.starts {
        let batch = (opts.starts - run).min(BATCH);
        let results: Vec<([f64; 4], f64)> = (run..run + batch)
            .into_par_iter()
            .map(|i| descend(q, &basis, start_point(opts.seed, i), opts.tau))
            .collect();
        for r in results {
            if r.1 < best.1 {
                best = r;
            }
        }
        run += batch;
        if best.1 < opts.tau {
            break;
        }
    }
    MembershipResult { member: best.1 < opts.tau, min_value: best.1, witness: best.0, starts: run }
}

/// Point at fraction `s` of the geodesic segment from `x` to `y`.
pub fn geodesic_interpolate(x: &HPoint, y: &HPoint, s: f64) -> Result<HPoint> {
    let d = hyperbolic::dist(x, y)?;
    if d < 1e-12 {
        return Ok(*x);
    }
    let (wx, wy) = (((1.0 - s) * d).sinh() / d.sinh(), (s * d).sinh() / d.sinh());
    let (a, b) = (x.coords(), y.coords());
    let v: [f64; 4] = std::array::from_fn(|k| wx * a[k] + wy * b[k]);
    HPoint::from_hermitian(v[0], C64::new(v[1], v[2]), v[3])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pairs: usize,
    pub steps: usize,
    pub violations: usize,
    pub rejections: usize,
    /// Pair endpoints found to be members when re-checked with fresh starts.
    pub endpoint_failures: usize,
    /// Smallest membership minimum among the sampled hole points.
    pub min_margin: f64,
}

pub const R_BOX: f64 = 3.0;
pub const MAX_REJECTIONS: usize = 10_000;

/// Samples pairs of non-members and checks that interior points of each connecting
/// geodesic segment are non-members too.
pub fn convexity_check(s: &Surface, n_pairs: usize, n_steps: usize, seed: u64, opts: &MembershipOpts) -> Result<ConvexityReport> {
    if s.is_quadric() {
        return Err(Error::IsQuadric);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holes: Vec<HPoint> = Vec::new();
    let mut rejections = 0;
    let mut min_margin = f64::INFINITY;
    while holes.len() < 2 * n_pairs {
        let x = sample::hpoint(&mut rng, R_BOX);
        let m = membership(s, &x, opts)?;
        if m.member {
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                return Err(Error::NoComplementFound(rejections));
            }
        } else {
            min_margin = min_margin.min(m.min_value);
            holes.push(x);
        }
    }
    let recheck = MembershipOpts { seed: opts.seed ^ 0x9e37_79b9_7f4a_7c15, ..*opts };
    let endpoint_failures = holes
        .par_iter()
        .map(|x| Ok(membership(s, x, &recheck)?.member as usize))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let violations = holes
        .par_chunks(2)
        .map(|pair| -> Result<usize> {
            let mut bad = 0;
            for k in 1..=n_steps {
                let t = k as f64 / (n_steps + 1) as f64;
                let y = geodesic_interpolate(&pair[0], &pair[1], t)?;
                if membership(s, &y, opts)?.member {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&b| b > 0)
        .count();
    Ok(ConvexityReport { pairs: n_pairs, steps: n_steps, violations, rejections, endpoint_failures, min_margin })
}

/// `(ad − bc) + ε·L₁·L₂`, where `L₁, L₂` vanish on the π₊-fiber line over `x`.
pub fn perturbed_quadric(x: &AbsPoint, eps: f64) -> Result<Surface> {
    let z = x.to_cp1();
    let (u, v) = (z.u(), z.v());
    let l1 = Surface::build(1, [([1, 0, 0, 0], -v), ([0, 0, 1, 0], u)])?;
    let l2 = Surface::build(1, [([0, 1, 0, 0], -v), ([0, 0, 0, 1], u)])?;
    let prod = l1.mul(&l2);
    let q = Surface::quadric();
    Surface::new(2, q.monomials.into_iter().chain(prod.monomials.into_iter().map(|(e, c)| (e, c * eps))))
}

/// Whether the points at distances `0, 1, …, n−1` along the ray towards `x` are all non-members.
pub fn ray_disjoint_check(s: &Surface, x: &AbsPoint, n: usize, opts: &MembershipOpts) -> Result<bool> {
    for k in 0..n {
        let p = HPoint::from_polar(&hyperbolic::PolarCoord::finite(k as f64, *x))?;
        if membership(s, &p, opts)?.member {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_smooth(s: &Surface, a: &ProjPoint, tol: &Tolerances) -> Result<[C64; 4]> {
    if a.on_quadric_tol(tol.eps_q) {
        return Err(Error::OnQuadric);
    }
    let m = a.entries();
    let (val, grad) = s.eval_grad(&m);
    let res = val.norm() / s.coeff_norm;
    if res >= tol.eps_on {
        return Err(Error::NotOnSurface(res));
    }
    let gn = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt() / s.coeff_norm;
    if gn <= tol.eps_sm {
        return Err(Error::SingularPoint);
    }
    Ok(grad)
}

/// `A⁻¹·T_A S` as a point of `CP²`, in the basis `diag(i,−i)`, `[[0,1],[−1,0]]`, `[[0,i],[i,0]]`.
pub fn gauss_left(s: &Surface, a: &ProjPoint) -> Result<Sym2Point> {
    gauss_left_tol(s, a, &Tolerances::DEFAULT)
}

pub fn gauss_left_tol(s: &Surface, a: &ProjPoint, tol: &Tolerances) -> Result<Sym2Point> {
    let [pa, pb, pc, pd] = check_smooth(s, a, tol)?;
    Ok(gauss_from_grad(&a.entries(), &[pa, pb, pc, pd]))
}

fn gauss_from_grad(m: &[C64; 4], g: &[C64; 4]) -> Sym2Point {
    let [a, b, c, d] = *m;
    let [pa, pb, pc, pd] = *g;
    let i = C64::i();
    Sym2Point::new([
        i * (a * pa - b * pb + c * pc - d * pd),
        -b * pa + a * pb - d * pc + c * pd,
        i * (b * pa + a * pb + d * pc + c * pd),
    ])
    .expect("nonzero gradient")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    /// Fubini–Study angle between the Gauss value and its conjugate.
    pub real_dist: f64,
    pub gauss_critical: bool,
    /// `σ₃/σ₁` of the differential of κ restricted to `T_A S`.
    pub jacobian_ratio: f64,
    pub jacobian_critical: bool,
}

pub fn critical_test(s: &Surface, a: &ProjPoint) -> Result<bool> {
    Ok(critical_report(s, a, &Tolerances::DEFAULT)?.gauss_critical)
}

pub fn critical_report(s: &Surface, a: &ProjPoint, tol: &Tolerances) -> Result<CriticalReport> {
    let grad = check_smooth(s, a, tol)?;
    let w = gauss_from_grad(&a.entries(), &grad).coords();
    let real_dist = fs_angle(&w, &w.map(|z| z.conj()));
    let jacobian_ratio = restricted_jacobian_ratio(a, &grad);
    Ok(CriticalReport {
        real_dist,
        gauss_critical: real_dist < tol.tol_crit,
        jacobian_ratio,
        jacobian_critical: jacobian_ratio < tol.tol_crit.sqrt(),
    })
}

fn restricted_jacobian_ratio(a: &ProjPoint, grad: &[C64; 4]) -> f64 {
    let k = (0..4).max_by(|&i, &j| grad[i].norm().total_cmp(&grad[j].norm())).expect("four entries");
    let inv = a.adjugate().entries();
    let det = a.entries()[0] * a.entries()[3] - a.entries()[1] * a.entries()[2];
    let herm0 = |v: [C64; 4]| -> [f64; 3] {
        let x = [
            (inv[0] * v[0] + inv[1] * v[2]) / det,
            (inv[0] * v[1] + inv[1] * v[3]) / det,
            (inv[2] * v[0] + inv[3] * v[2]) / det,
            (inv[2] * v[1] + inv[3] * v[3]) / det,
        ];
        let h01 = (x[1] + x[2].conj()) / 2.0;
        [(x[0].re - x[3].re) / 2.0, h01.re, h01.im]
    };
    let mut cols: Vec<[f64; 3]> = Vec::with_capacity(6);
    for j in (0..4).filter(|&j| j != k) {
        let mut v = [zero(); 4];
        v[j] = C64::new(1.0, 0.0);
        v[k] = -grad[j] / grad[k];
        cols.push(herm0(v));
        cols.push(herm0(v.map(|z| z * C64::i())));
    }
    let jac = SMatrix::<f64, 3, 6>::from_fn(|r, c| cols[c][r]);
    let sv = jac.singular_values();
    let hi = sv.max();
    if hi == 0.0 {
        0.0
    } else {
        sv.min() / hi
    }
}

/// The plane tangent to `Q` at `z0`: `d₀a − c₀b − b₀c + a₀d = 0`.
pub fn tangent_plane(z0: &QuadricPoint) -> Result<Surface> {
    let [a0, b0, c0, d0] = z0.to_matrix().entries();
    Surface::linear([d0, -c0, -b0, a0])
}

/// A point of the plane `{n·z = 0}` off `Q`, projected from a fixed generic vector.
fn plane_point(n: &[C64; 4], salt: usize) -> Result<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee + salt as u64);
    let nn: f64 = n.iter().map(|z| z.norm_sqr()).sum();
    for _ in 0..32 {
        let r: [C64; 4] = std::array::from_fn(|_| sample::complex(&mut rng));
        let dot: C64 = n.iter().zip(&r).map(|(a, b)| a * b).sum();
        let p: [C64; 4] = std::array::from_fn(|k| r[k] - dot / nn * n[k].conj());
        if let Ok(p) = ProjPoint::new(p) {
            if !p.on_quadric_tol(1e-3) {
                return Ok(p);
            }
        }
    }
    Err(Error::IllConditioned("no plane point off the quadric".into()))
}

fn linear_coeffs(s: &Surface) -> [C64; 4] {
    [s.coeff([1, 0, 0, 0]), s.coeff([0, 1, 0, 0]), s.coeff([0, 0, 1, 0]), s.coeff([0, 0, 0, 1])]
}

/// Gauss values of `n` planes tangent to `Q` along the π₊-fiber over a fixed image point.
pub fn c_n_generate(n: usize) -> Result<Vec<Sym2Point>> {
    if n < 6 {
        return Err(Error::UnderDetermined { needed: 6, got: n });
    }
    let beta = CP1Point::from_affine(C64::new(0.37, -0.81));
    sample::fibonacci_cp1(n)
        .iter()
        .enumerate()
        .map(|(i, alpha)| {
            let plane = tangent_plane(&QuadricPoint { alpha: *alpha, beta })?;
            let a = plane_point(&linear_coeffs(&plane), i)?;
            gauss_left(&plane, &a)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicReport {
    /// Conic coefficients of `w0², w0w1, w0w2, w1², w1w2, w2²`.
    pub coeffs: Vec<[f64; 2]>,
    pub fit_residual: f64,
    /// `σ_min/σ_max` of the symmetric matrix.
    pub nondegeneracy: f64,
    pub conjugation_residual: f64,
    pub definite: bool,
    pub min_real_value: f64,
    pub passed: bool,
}

fn veronese(w: &[C64; 3]) -> [C64; 6] {
    [w[0] * w[0], w[0] * w[1], w[0] * w[2], w[1] * w[1], w[1] * w[2], w[2] * w[2]]
}

pub fn c_n_conic_check(points: &[Sym2Point]) -> Result<ConicReport> {
    if points.len() < 6 {
        return Err(Error::UnderDetermined { needed: 6, got: points.len() });
    }
    let m = DMatrix::<C64>::from_fn(points.len(), 6, |r, c| veronese(&points[r].coords())[c]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::IllConditioned("svd failed".into()))?;
    let (imin, smin) = svd.singular_values.argmin();
    let smax = svd.singular_values.max();
    let second = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != imin)
        .map(|(_, s)| *s)
        .fold(f64::INFINITY, f64::min);
    if second < 1e-6 * smax {
        return Err(Error::IllConditioned("conic fit has a multi-dimensional null space".into()));
    }
    let c: Vec<C64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    let fit_residual = smin / smax;

    let sq: C64 = c.iter().map(|z| z * z).sum();
    let nrm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let conjugation_residual = 1.0 - sq.norm() / nrm;
    let phase = C64::from_polar(1.0, -sq.arg() / 2.0);
    let r: Vec<f64> = c.iter().map(|z| (z * phase).re).collect();
    let sym = Matrix3::new(r[0], r[1] / 2.0, r[2] / 2.0, r[1] / 2.0, r[3], r[4] / 2.0, r[2] / 2.0, r[4] / 2.0, r[5]);
    let eig = sym.symmetric_eigenvalues();
    let (emin, emax) = (eig.min(), eig.max());
    let amax = emin.abs().max(emax.abs());
    let nondegeneracy = eig.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min) / amax;
    let definite = emin * emax > 0.0;
    let form = |x: &[f64]| {
        let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let v = nalgebra::Vector3::new(x[0] / n, x[1] / n, x[2] / n);
        let q = (v.transpose() * sym * v)[0] / amax;
        q * q
    };
    let mut grid: Vec<(f64, [f64; 3])> = sample::fibonacci_sphere(2000).into_iter().map(|p| (form(&p), p)).collect();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min_real_value = grid
        .iter()
        .take(8)
        .map(|(_, p)| optim::nelder_mead(form, p, 0.05, 500).1)
        .fold(f64::INFINITY, f64::min);
    let passed = fit_residual < 1e-8 && nondegeneracy > 1e-6 && conjugation_residual < 1e-8 && definite && min_real_value > 1e-6;
    Ok(ConicReport {
        coeffs: c.iter().map(|z| [z.re, z.im]).collect(),
        fit_residual,
        nondegeneracy,
        conjugation_residual,
        definite,
        min_real_value,
        passed,
    })
}

/// Solves `γ⁻_R(A) = w` on the plane `R` by linear algebra; the left Gauss map of a plane
/// is linear in `A`, so the solution is the null vector of a 4×5 system.
pub fn plane_gauss_preimage(r: &Surface, w: &Sym2Point) -> Result<ProjPoint> {
    if r.degree != 1 {
        return Err(Error::Invalid("expected a plane".into()));
    }
    let n = linear_coeffs(r);
    let cols: Vec<[C64; 3]> = (0..4)
        .map(|k| {
            let mut e = [zero(); 4];
            e[k] = C64::new(1.0, 0.0);
            let [a, b, c, d] = e;
            let [pa, pb, pc, pd] = n;
            let i = C64::i();
            [
                i * (a * pa - b * pb + c * pc - d * pd),
                -b * pa + a * pb - d * pc + c * pd,
                i * (b * pa + a * pb + d * pc + c * pd),
            ]
        })
        .collect();
    let wc = w.coords();
    let m = DMatrix::<C64>::from_fn(4, 5, |row, col| {
        if row < 3 {
            if col < 4 {
                cols[col][row]
            } else {
                -wc[row]
            }
        } else if col < 4 {
            n[col]
        } else {
            zero()
        }
    });
    let mut full = DMatrix::<C64>::zeros(5, 5);
    full.view_mut((0, 0), (4, 5)).copy_from(&m);
    let svd = full.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::IllConditioned("svd failed".into()))?;
    let (imin, _) = svd.singular_values.argmin();
    let v: Vec<C64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    ProjPoint::new([v[0], v[1], v[2], v[3]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn construction() {
        assert_eq!(Surface::new(2, [([1, 0, 0, 1], c(2.0)), ([0, 1, 1, 0], c(-2.0))]), Err(Error::IsQuadric));
        assert!(matches!(Surface::new(2, [([1, 0, 0, 0], c(1.0))]), Err(Error::DimensionMismatch(_))));
        assert!(Surface::new(1, [([1, 0, 0, 0], c(0.0))]).is_err());
        let s: Surface = serde_json::from_str(r#"{"degree":1,"monomials":[{"exp":[0,0,1,0],"re":1.0,"im":0.0}]}"#).unwrap();
        assert_eq!(s, Surface::linear([c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap());
    }

    #[test]
    fn translation_examples() {
        let a = Surface::linear([c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let swap = ProjPoint::from_real([0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(a.translate_left(&swap).unwrap().approx_eq(&Surface::linear([c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap(), 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = Surface::random(3, &mut rng).unwrap();
        assert!(s.translate_left(&ProjPoint::identity()).unwrap().approx_eq(&s, 1e-15));
        let b = sample::proj(&mut rng);
        let back = s.translate_left(&b).unwrap().translate_left(&b.inverse().unwrap()).unwrap();
        assert!(back.approx_eq(&s, 1e-9));
        let m = sample::proj(&mut rng).entries();
        let bb = b.entries();
        let raw = [
            bb[0] * m[0] + bb[1] * m[2],
            bb[0] * m[1] + bb[1] * m[3],
            bb[2] * m[0] + bb[3] * m[2],
            bb[2] * m[1] + bb[3] * m[3],
        ];
        let direct = s.eval(&raw);
        let via = s.translate_left(&b).unwrap().eval(&m);
        assert!((direct - via).norm() <= 1e-12 * s.coeff_norm());
    }

    #[test]
    fn hole_at_origin() {
        let r = membership(&Surface::hole_quadric(), &HPoint::origin(), &MembershipOpts::default()).unwrap();
        assert!(!r.member);
        // oracle: z₀² + |z|² ≥ 1 on S³, normalised by the coefficient norm √54
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut dense = f64::INFINITY;
        for _ in 0..100_000 {
            dense = dense.min(f_value(&Surface::hole_quadric(), &sample::unit4(&mut rng)));
        }
        assert!(r.min_value <= dense + 1e-12 && r.min_value > 1e-3, "{} {dense}", r.min_value);
        assert!((r.min_value - 1.0 / 54.0).abs() < 1e-9);
    }

    #[test]
    fn planes_fill_space() {
        let borel = Surface::linear([c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = sample::hpoint(&mut rng, 4.0);
            let r = membership(&borel, &x, &MembershipOpts::default()).unwrap();
            assert!(r.member);
            let w = r.witness_matrix(&x).unwrap();
            assert!(hyperbolic::dist(&hyperbolic::kappa(&w).unwrap(), &x).unwrap() < 1e-6);
        }
    }

    #[test]
    fn constructed_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = Surface::random(2, &mut rng).unwrap();
        let a0 = sample::proj(&mut rng);
        let l = Surface::linear(std::array::from_fn(|_| sample::complex(&mut rng))).unwrap();
        let fa = f.eval(&a0.entries());
        let la = l.eval(&a0.entries());
        let l2 = l.mul(&l);
        let s = Surface::new(2, f.monomials.clone().into_iter().chain(l2.monomials.into_iter().map(|(e, v)| (e, -v * fa / (la * la))))).unwrap();
        assert!(s.residual(&a0) < 1e-12);
        let r = membership(&s, &hyperbolic::kappa(&a0).unwrap(), &MembershipOpts::default()).unwrap();
        assert!(r.member && r.min_value < 1e-10);
    }

    #[test]
    fn convexity_examples() {
        let opts = MembershipOpts { starts: 32, ..Default::default() };
        let rep = convexity_check(&Surface::hole_quadric(), 10, 8, 1, &opts).unwrap();
        assert_eq!(rep.violations, 0);
        let plane = Surface::linear([c(1.0), c(2.0), c(0.5), c(-1.0)]).unwrap();
        let few = MembershipOpts { starts: 8, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // a plane has no holes; check a handful of points rather than the full rejection budget
        for _ in 0..20 {
            assert!(membership(&plane, &sample::hpoint(&mut rng, R_BOX), &few).unwrap().member);
        }
        let x = sample::hpoint(&mut rng, 1.0);
        assert_eq!(geodesic_interpolate(&x, &x, 0.5).unwrap(), x);
    }

    #[test]
    fn ray_examples() {
        let inf = AbsPoint::from_cp1(&CP1Point::infinity());
        let s = perturbed_quadric(&inf, 0.1).unwrap();
        assert!(ray_disjoint_check(&s, &inf, 10, &MembershipOpts::default()).unwrap());
        assert_eq!(perturbed_quadric(&inf, 0.0), Err(Error::IsQuadric));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let on_s = s.boundary_preimages(&CP1Point::from_affine(c(0.5)));
        assert!(!on_s.is_empty());
        // a point of S off Q: solve for d on a random (a, b, c)
        let (a, b, cc) = (sample::complex(&mut rng), sample::complex(&mut rng), sample::complex(&mut rng));
        // ad − bc + 0.1·c·d = 0  ⇒  d = bc/(a + 0.1c)
        let d = b * cc / (a + 0.1 * cc);
        let p = ProjPoint::new([a, b, cc, d]).unwrap();
        assert!(s.residual(&p) < 1e-12);
        let x = hyperbolic::kappa(&p).unwrap();
        assert!(membership(&s, &x, &MembershipOpts::default()).unwrap().member);
    }

    #[test]
    fn boundary_preimages_hit_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = Surface::random(3, &mut rng).unwrap();
        for _ in 0..20 {
            let beta = sample::cp1(&mut rng);
            let pts = s.boundary_preimages(&beta);
            assert_eq!(pts.len(), 3);
            for q in pts {
                assert!(s.residual(&q.to_matrix()) < 1e-9);
                assert!(q.to_matrix().rank1_coords().beta.sphere_dist(&beta) < 1e-6);
            }
        }
    }

    #[test]
    fn gauss_left_examples() {
        let borel = Surface::linear([c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap();
        let want = Sym2Point::new([c(0.0), c(1.0), C64::new(0.0, -1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = ProjPoint::new([sample::complex(&mut rng), sample::complex(&mut rng), c(0.0), sample::complex(&mut rng)]).unwrap();
            assert!(gauss_left(&borel, &a).unwrap().approx_eq(&want, 1e-12));
            let rep = critical_report(&borel, &a, &Tolerances::DEFAULT).unwrap();
            assert!(!rep.gauss_critical && !rep.jacobian_critical, "{rep:?}");
        }
        let not_on = ProjPoint::from_real([1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(gauss_left(&borel, &not_on), Err(Error::NotOnSurface(_))));
        let on_q = ProjPoint::from_real([1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(gauss_left(&borel, &on_q), Err(Error::OnQuadric));
        let trace = Surface::linear([c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let j = ProjPoint::from_real([0.0, -1.0, 1.0, 0.0]).unwrap();
        let rep = critical_report(&trace, &j, &Tolerances::DEFAULT).unwrap();
        assert!(rep.gauss_critical && rep.jacobian_critical, "{rep:?}");
        let scaled = ProjPoint::new(j.entries().map(|z| z * C64::new(2.0, -3.0))).unwrap();
        assert!(gauss_left(&trace, &scaled).unwrap().approx_eq(&gauss_left(&trace, &j).unwrap(), 1e-14));
    }

    #[test]
    fn c_n_conic() {
        assert_eq!(c_n_generate(5), Err(Error::UnderDetermined { needed: 6, got: 5 }));
        let pts = c_n_generate(12).unwrap();
        let rep = c_n_conic_check(&pts).unwrap();
        assert!(rep.passed, "{rep:?}");
        // tangent planes have constant Gauss values
        let plane = tangent_plane(&QuadricPoint { alpha: CP1Point::from_affine(c(0.3)), beta: CP1Point::zero() }).unwrap();
        let n = linear_coeffs(&plane);
        let g0 = gauss_left(&plane, &plane_point(&n, 0).unwrap()).unwrap();
        for k in 1..10 {
            assert!(gauss_left(&plane, &plane_point(&n, k).unwrap()).unwrap().approx_eq(&g0, 1e-10));
        }
    }

    #[test]
    fn degree_one_emptiness() {
        let pts = c_n_generate(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = Surface::linear(std::array::from_fn(|_| sample::complex(&mut rng))).unwrap();
        for w in &pts {
            let a = plane_gauss_preimage(&r, w).unwrap();
            assert!(a.on_quadric_tol(1e-8) || r.residual(&a) > 1e-8, "{:?}", a.det());
        }
    }
}
