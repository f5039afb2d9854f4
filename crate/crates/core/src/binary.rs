//! Binary forms `f(s,t) = Σ c[k]·s^k·t^(n−k)` and their roots on CP¹.

use crate::proj::CP1Point;
use crate::C64;

pub fn eval(c: &[C64], s: C64, t: C64) -> C64 {
    let n = c.len().saturating_sub(1);
    let mut acc = C64::new(0.0, 0.0);
    for (k, ck) in c.iter().enumerate() {
        acc += ck * s.powu(k as u32) * t.powu((n - k) as u32);
    }
    acc
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn norm(c: &[C64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn stable_quadratic(a: C64, b: C64, c: C64) -> (C64, C64) {
    let mut d = (b * b - 4.0 * a * c).sqrt();
    if (b.conj() * d).re < 0.0 {
        d = -d;
    }
    let q = -(b + d) / 2.0;
    if q.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    (q / a, c / q)
}

/// Roots of `c[2]·s² + c[1]·st + c[0]·t²`, solved in whichever affine chart keeps them finite.
pub fn quadratic_roots(c: [C64; 3]) -> [CP1Point; 2] {
    let one = C64::new(1.0, 0.0);
    if c[2].norm() == 0.0 && c[0].norm() == 0.0 {
        return [CP1Point::infinity(), CP1Point::zero()];
    }
    if c[2].norm() >= c[0].norm() {
        let (x1, x2) = stable_quadratic(c[2], c[1], c[0]);
        [CP1Point::raw(x1, one), CP1Point::raw(x2, one)]
    } else {
        let (y1, y2) = stable_quadratic(c[0], c[1], c[2]);
        [CP1Point::raw(one, y1), CP1Point::raw(one, y2)]
    }
}

/// All roots with multiplicity. Coefficients below `1e-14·‖c‖` at the top are roots at `(1:0)`.
pub fn roots(c: &[C64]) -> Vec<CP1Point> {
    let n = c.len().saturating_sub(1);
    let scale = norm(c);
    if scale == 0.0 {
        return Vec::new();
    }
    let m = (0..=n).rev().find(|&k| c[k].norm() > 1e-14 * scale).unwrap_or(0);
    let one = C64::new(1.0, 0.0);
    let mut out: Vec<CP1Point> = poly_roots(&c[..=m])
        .into_iter()
        .map(|x| CP1Point::raw(x, one))
        .collect();
    out.extend(std::iter::repeat_n(CP1Point::infinity(), n - m));
    out
}

fn horner(p: &[C64], x: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut dv = C64::new(0.0, 0.0);
    for ck in p.iter().rev() {
        dv = dv * x + v;
        v = v * x + ck;
    }
    (v, dv)
}

/// Roots of `Σ p[k]·x^k` by the Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots(p: &[C64]) -> Vec<C64> {
    let m = p.len().saturating_sub(1);
    if m == 0 {
        return Vec::new();
    }
    let lead = p[m];
    let p: Vec<C64> = p.iter().map(|z| z / lead).collect();
    if m == 1 {
        return vec![-p[0]];
    }
    let radius = (0..m)
        .map(|k| p[k].norm().powf(1.0 / (m - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..m)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / m as f64 + 0.4;
            C64::from_polar(radius, th)
        })
        .collect();
    let mut quiet = 0;
    for _ in 0..1000 {
        let mut worst: f64 = 0.0;
        for k in 0..m {
            let (v, dv) = horner(&p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / dv;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..m {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let corr = w / (C64::new(1.0, 0.0) - w * s);
            if corr.is_finite() {
                z[k] -= corr;
                worst = worst.max(corr.norm() / (1.0 + z[k].norm()));
            }
        }
        if worst < 1e-15 {
            quiet += 1;
            if quiet > 2 {
                break;
            }
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner(&p, *zk);
            let step = v / dv;
            if step.is_finite() && step.norm() < 1e-6 * (1.0 + zk.norm()) {
                let cand = *zk - step;
                if horner(&p, cand).0.norm() <= v.norm() {
                    *zk = cand;
                }
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_st_has_roots_at_poles() {
        let r = quadratic_roots([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let labels: Vec<String> = r.iter().map(|p| p.label()).collect();
        assert!(labels.contains(&"0".to_string()));
        assert!(labels.contains(&"inf".to_string()));
    }

    #[test]
    fn cubic_roots_recovered() {
        let want = [c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)];
        let mut p = vec![c(1.0, 0.0)];
        for w in want {
            p = mul(&p, &[-w, c(1.0, 0.0)]);
        }
        let got = poly_roots(&p);
        for w in want {
            assert!(got.iter().any(|g| (g - w).norm() < 1e-12));
        }
    }

    #[test]
    fn roots_at_infinity_counted() {
        // s·t² has roots (0:1) once and (1:0) twice
        let r = roots(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|p| p.label() == "inf").count(), 2);
    }

    #[test]
    fn double_root_converges() {
        let p = mul(&[c(-1.0, 1.0), c(1.0, 0.0)], &[c(-1.0, 1.0), c(1.0, 0.0)]);
        for r in poly_roots(&p) {
            assert!((r - c(1.0, -1.0)).norm() < 1e-7);
        }
    }
}
