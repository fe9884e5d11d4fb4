//! Duhamel inner product against direct numerical quadrature.
//!
//! The library evaluates (A, B) through the closed form
//! φ(a, b) = (e^{−a} − e^{−b})/(b − a) in the eigenbasis, with a series
//! continuation near the diagonal. These tests recompute the defining
//! integral (1/Z) ∫₀¹ Tr[e^{−(1−s)K} A† e^{−sK} B] ds by composite
//! Simpson quadrature with no reference to φ, and require agreement to
//! 1e−8 on seeded random instances, including spectra with exact and
//! near-exact degeneracies that drive the series branch.

use nalgebra::DMatrix;
use spincert_core::gibbs::{Beta, GibbsState, Spectrum};
use spincert_core::sampling::{random_hermitian, random_operator, rng_from_seed};
use spincert_core::{C64, CMatrix};

/// (1/Z) ∫₀¹ Σ_{ij} conj(Ã_ij) B̃_ij e^{−a_i(1−s) − a_j s} ds by composite
/// Simpson with `n` intervals, where a_i = β(λ_i − λ₀).
fn quadrature_duhamel(state: &GibbsState, a: &CMatrix, b: &CMatrix, n: usize) -> C64 {
    assert!(n % 2 == 0);
    let beta = match state.beta {
        Beta::Finite(b) => b,
        Beta::Infinite => panic!("quadrature route needs finite beta"),
    };
    let lam0 = state.spectrum.ground_energy();
    let shifted: Vec<f64> = state
        .spectrum
        .eigenvalues
        .iter()
        .map(|&l| beta * (l - lam0))
        .collect();
    let z: f64 = shifted.iter().map(|&a| (-a).exp()).sum();
    let a_tilde = state.transform(a);
    let b_tilde = state.transform(b);
    let dim = shifted.len();

    let integrand = |s: f64| -> C64 {
        let left: Vec<f64> = shifted.iter().map(|&a| (-a * (1.0 - s)).exp()).collect();
        let right: Vec<f64> = shifted.iter().map(|&a| (-a * s).exp()).collect();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += a_tilde[(i, j)].conj()
                    * b_tilde[(i, j)]
                    * C64::new(left[i] * right[j], 0.0);
            }
        }
        acc
    };

    let h = 1.0 / n as f64;
    let mut sum = integrand(0.0) + integrand(1.0);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += integrand(k as f64 * h) * C64::new(w, 0.0);
    }
    sum * C64::new(h / 3.0 / z, 0.0)
}

fn assert_close(spectral: C64, quad: C64, label: &str) {
    let diff = (spectral - quad).norm();
    let scale = 1.0 + spectral.norm();
    assert!(
        diff <= 1e-8 * scale,
        "{label}: spectral {spectral} vs quadrature {quad}, diff {diff:.3e}"
    );
}

#[test]
fn random_instances_match_quadrature() {
    let mut rng = rng_from_seed(0x5EED_0001);
    for case in 0..4 {
        let dim = 6 + 2 * (case % 2);
        let h = random_hermitian(&mut rng, dim, 1.0);
        let beta = [0.7, 1.3, 2.9, 0.2][case];
        let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(beta)).unwrap();
        let a = random_operator(&mut rng, dim, 1.0);
        let b = random_operator(&mut rng, dim, 1.0);
        assert_close(
            state.duhamel(&a, &b),
            quadrature_duhamel(&state, &a, &b, 8192),
            &format!("case {case} (A, B)"),
        );
        assert_close(
            state.duhamel(&a, &a),
            quadrature_duhamel(&state, &a, &a, 8192),
            &format!("case {case} (A, A)"),
        );
    }
}

#[test]
fn degenerate_spectrum_exercises_series_branch() {
    // eigenvalue pairs split by 1e−10 sit far inside the |δ| < 1e−8
    // series window of φ once multiplied by β
    let delta = 1e-10;
    let eigs = [0.0, 0.0, delta, 1.0, 1.0 + delta, 2.0];
    let dim = eigs.len();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (i, &l) in eigs.iter().enumerate() {
        h[(i, i)] = C64::new(l, 0.0);
    }
    let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(2.0)).unwrap();
    let mut rng = rng_from_seed(0x5EED_0002);
    let a = random_operator(&mut rng, dim, 1.0);
    let b = random_operator(&mut rng, dim, 1.0);
    assert_close(
        state.duhamel(&a, &b),
        quadrature_duhamel(&state, &a, &b, 8192),
        "degenerate (A, B)",
    );
}

#[test]
fn wide_spectrum_stays_stable_at_large_beta() {
    let mut rng = rng_from_seed(0x5EED_0003);
    let dim = 6;
    let h = random_hermitian(&mut rng, dim, 1.0);
    let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(40.0)).unwrap();
    let a = random_operator(&mut rng, dim, 1.0);
    assert_close(
        state.duhamel(&a, &a),
        quadrature_duhamel(&state, &a, &a, 8192),
        "large beta (A, A)",
    );
}

#[test]
fn self_inner_product_is_real_and_nonnegative() {
    let mut rng = rng_from_seed(0x5EED_0004);
    for _ in 0..20 {
        let h = random_hermitian(&mut rng, 8, 1.0);
        let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(1.0)).unwrap();
        let a = random_operator(&mut rng, 8, 1.0);
        let v = state.duhamel(&a, &a);
        assert!(v.im.abs() < 1e-12 * (1.0 + v.re.abs()));
        assert!(v.re >= -1e-12);
    }
}
