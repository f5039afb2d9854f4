//! Random and deterministic point generators.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::hyperbolic::{AbsPoint, HPoint, PolarCoord};
use crate::proj::{CP1Point, ProjPoint};
use crate::C64;

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian matrix; almost surely off the quadric.
pub fn proj<R: Rng + ?Sized>(rng: &mut R) -> ProjPoint {
    loop {
        if let Ok(p) = ProjPoint::new(std::array::from_fn(|_| complex(rng))) {
            if !p.on_quadric_tol(1e-6) {
                return p;
            }
        }
    }
}

pub fn unit3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

pub fn unit4<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// Uniform point of `CP¹ ≅ S²`.
pub fn cp1<R: Rng + ?Sized>(rng: &mut R) -> CP1Point {
    CP1Point::from_sphere(unit3(rng)).expect("unit vector")
}

/// Haar-random element of SU(2), as a projective point.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R) -> ProjPoint {
    let q = unit4(rng);
    let (al, be) = (C64::new(q[0], q[1]), C64::new(q[2], q[3]));
    ProjPoint::new([al, be, -be.conj(), al.conj()]).expect("unit quaternion")
}

/// Point at hyperbolic radius uniform in `[0, rmax]` in a uniform direction.
pub fn hpoint<R: Rng + ?Sized>(rng: &mut R, rmax: f64) -> HPoint {
    let rho = rng.random::<f64>() * rmax;
    let phi = AbsPoint::from_vec(unit3(rng)).expect("unit vector");
    HPoint::from_polar(&PolarCoord::finite(rho, phi)).expect("finite radius")
}

/// `n` nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * k as f64;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

pub fn fibonacci_cp1(n: usize) -> Vec<CP1Point> {
    fibonacci_sphere(n)
        .into_iter()
        .map(|v| CP1Point::from_sphere(v).expect("unit vector"))
        .collect()
}
