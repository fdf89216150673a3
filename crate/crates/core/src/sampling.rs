//! Seeded random inputs shared by the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conformal::RadialFunction;
use crate::forms4::WeylPlus;
use crate::instanton::Point;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vec<const N: usize>(rng: &mut impl Rng) -> [f64; N] {
    std::array::from_fn(|_| StandardNormal.sample(rng))
}

/// Uniformly distributed unit vector in `R^3`.
pub fn unit3(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = gaussian_vec(rng);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.map(|x| x / n);
        }
    }
}

/// Haar-distributed rotation of `R^3`, from a uniform unit quaternion.
pub fn rotation3(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let q = loop {
        let v: [f64; 4] = gaussian_vec(rng);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            break v.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Symmetric trace-free matrix with Gaussian entries, scaled by `scale`.
pub fn weyl_plus(rng: &mut impl Rng, scale: f64) -> WeylPlus {
    let g: [f64; 6] = gaussian_vec(rng);
    let mut m = [[g[0], g[3], g[4]], [g[3], g[1], g[5]], [g[4], g[5], g[2]]];
    let tr = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    for (a, row) in m.iter_mut().enumerate() {
        row[a] -= tr;
        row.iter_mut().for_each(|v| *v *= scale);
    }
    WeylPlus::new(m).expect("symmetric and trace-free by construction")
}

/// Point with independent coordinates uniform in `[-radius, radius]`, shifted by `center`.
pub fn point_in_box(rng: &mut impl Rng, center: &Point, radius: f64) -> Point {
    std::array::from_fn(|k| center[k] + rng.random_range(-radius..radius))
}

/// `1 + sum_{k=1}^{terms} a_k cos(k rho)` with `sum |a_k| <= max_total < 1`, hence positive.
pub fn conformal_factor(rng: &mut impl Rng, terms: usize, max_total: f64) -> RadialFunction {
    let raw: Vec<f64> = (0..terms).map(|_| rng.random_range(-1.0..1.0)).collect();
    let total: f64 = raw.iter().map(|a| a.abs()).sum::<f64>().max(1e-12);
    let budget = max_total * rng.random_range(0.1..1.0);
    let mut coeffs = vec![1.0];
    coeffs.extend(raw.iter().map(|a| a * budget / total));
    RadialFunction::cosine_series(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_orthogonal_with_unit_determinant() {
        let mut r = rng(1, 0);
        for _ in 0..20 {
            let m = rotation3(&mut r);
            for a in 0..3 {
                for b in 0..3 {
                    let d: f64 = (0..3).map(|k| m[a][k] * m[b][k]).sum();
                    assert!((d - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            assert!((det - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: [f64; 3] = gaussian_vec(&mut rng(9, 2));
        let b: [f64; 3] = gaussian_vec(&mut rng(9, 2));
        let c: [f64; 3] = gaussian_vec(&mut rng(9, 3));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn conformal_factors_are_positive() {
        let mut r = rng(4, 0);
        let grid = crate::conformal::PolarGrid::new(200).unwrap();
        for _ in 0..20 {
            assert!(conformal_factor(&mut r, 3, 0.8).min_on(&grid) >= 0.2 - 1e-12);
        }
    }
}
