use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point};
use crate::metric::{hilbert_distance, GeodesicRay};

/// One point of a metric sphere with its distance residual.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereSample {
    /// Angle of the ray in the plane; the direction index in higher dimension.
    pub angle: f64,
    pub point: Vec<f64>,
    pub residual: f64,
}

/// `k` points at Hilbert distance `r` from `center` on the rays at angles `2 pi i / k`.
pub fn metric_sphere(body: &ConvexBody, center: &Point, r: f64, k: usize) -> Result<Vec<SphereSample>> {
    if body.dim() != 2 {
        return Err(Error::InvalidInput("angle-indexed spheres need a 2-D body".into()));
    }
    check_args(r, k)?;
    (0..k)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / k as f64;
            sample(body, center, r, &DVector::from_vec(vec![th.cos(), th.sin()]), th)
        })
        .collect()
}

/// `k` sphere points along deterministic low-discrepancy directions in any dimension.
pub fn metric_sphere_directions(
    body: &ConvexBody,
    center: &Point,
    r: f64,
    k: usize,
    seed: u64,
) -> Result<Vec<SphereSample>> {
    check_args(r, k)?;
    let dirs = low_discrepancy_directions(body.dim(), k, seed);
    dirs.iter().enumerate().map(|(i, d)| sample(body, center, r, d, i as f64)).collect()
}

fn check_args(r: f64, k: usize) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput("sphere radius must be positive".into()));
    }
    if k < 3 {
        return Err(Error::InvalidInput("sphere needs at least 3 samples".into()));
    }
    Ok(())
}

fn sample(body: &ConvexBody, center: &Point, r: f64, dir: &DVector<f64>, angle: f64) -> Result<SphereSample> {
    let ray = GeodesicRay::toward(body, center, dir)?;
    let p = ray.eval(r)?;
    let residual = hilbert_distance(body, center, &p)? - r;
    Ok(SphereSample { angle, point: p.iter().copied().collect(), residual })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Halton points with a seeded Cranley-Patterson shift, pushed through
/// Box-Muller and normalized.
pub(crate) fn low_discrepancy_directions(dim: usize, k: usize, seed: u64) -> Vec<DVector<f64>> {
    let pairs = dim.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.random::<f64>()).collect();
    (0..k as u64)
        .map(|i| {
            let mut g = Vec::with_capacity(2 * pairs);
            for j in 0..pairs {
                let base1 = PRIMES[(2 * j) % PRIMES.len()];
                let base2 = PRIMES[(2 * j + 1) % PRIMES.len()];
                let u1 = (radical_inverse(i + 1, base1) + shift[2 * j]).fract().max(f64::MIN_POSITIVE);
                let u2 = (radical_inverse(i + 1, base2) + shift[2 * j + 1]).fract();
                let rad = (-2.0 * u1.ln()).sqrt();
                let ang = std::f64::consts::TAU * u2;
                g.push(rad * ang.cos());
                g.push(rad * ang.sin());
            }
            let v = DVector::from_iterator(dim, g.into_iter().take(dim));
            let n = v.norm();
            if n > 0.0 {
                v / n
            } else {
                let mut e = DVector::zeros(dim);
                e[0] = 1.0;
                e
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;

    #[test]
    fn klein_disk_sphere_is_a_circle() {
        let s = metric_sphere(&unit_disk(), &Point::zeros(2), 0.5f64.atanh(), 4).unwrap();
        let expect = [[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.0, -0.5]];
        for (smp, e) in s.iter().zip(expect) {
            assert!((smp.point[0] - e[0]).abs() < 1e-15 && (smp.point[1] - e[1]).abs() < 1e-15);
            assert!(smp.residual.abs() < 1e-12);
        }
    }

    #[test]
    fn large_spheres_hug_the_boundary() {
        let sq = square();
        for smp in metric_sphere(&sq, &Point::zeros(2), 8.0, 16).unwrap() {
            let p = Point::from_vec(smp.point.clone());
            assert!(sq.is_interior(&p).unwrap());
            assert!(sq.level(&p).unwrap() > -1e-6);
            assert!(smp.residual.abs() < 1e-9);
        }
    }

    #[test]
    fn directions_are_deterministic_and_unit() {
        let a = low_discrepancy_directions(3, 20, 7);
        let b = low_discrepancy_directions(3, 20, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        let s = metric_sphere_directions(&unit_ball(3), &Point::zeros(3), 1.0, 12, 1).unwrap();
        assert!(s.iter().all(|x| x.residual.abs() < 1e-9));
    }

    #[test]
    fn sphere_argument_errors() {
        assert!(metric_sphere(&unit_ball(3), &Point::zeros(3), 1.0, 4).is_err());
        assert!(metric_sphere(&unit_disk(), &Point::zeros(2), 1.0, 2).is_err());
        assert!(metric_sphere(&unit_disk(), &Point::zeros(2), -1.0, 4).is_err());
    }
}
