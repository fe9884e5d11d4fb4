//! Deterministic sampling for seeded verification suites.
//!
//! Every randomized suite draws from a ChaCha8 stream keyed by a u64
//! seed, so a run is reproducible bit for bit from its report header.
//! Gaussian variates use a plain Box–Muller transform: no platform-
//! dependent special functions, identical streams everywhere.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{C64, CMatrix};

/// The stream used by all suites for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard normal variate (Box–Muller; consumes two uniforms).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A real field of n independent N(0, scale²) entries.
pub fn normal_field<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * standard_normal(rng)).collect()
}

/// A complex matrix with independent standard complex Gaussian entries.
pub fn random_operator<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(scale * standard_normal(rng), scale * standard_normal(rng))
    })
}

/// A random Hermitian matrix (G + G†)/2.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    let g = random_operator(rng, dim, scale);
    (&g + g.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let a = normal_field(&mut rng_from_seed(0x5EED), 8, 1.0);
        let b = normal_field(&mut rng_from_seed(0x5EED), 8, 1.0);
        assert_eq!(a, b);
        let c = normal_field(&mut rng_from_seed(0x5EEE), 8, 1.0);
        assert_ne!(a, c);
    }

    #[test]
    fn normals_have_plausible_moments() {
        let mut rng = rng_from_seed(7);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn hermitian_draws_are_hermitian() {
        let m = random_hermitian(&mut rng_from_seed(3), 6, 1.0);
        let defect = (&m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert_eq!(defect, 0.0);
    }
}
