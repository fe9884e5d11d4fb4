//! Cross-validation of the diagonalization engine against an independent
//! reference implementation.
//!
//! Every number below was produced by a separate dense-diagonalization
//! program (different language, different eigensolver, different summation
//! order) on three small systems, then frozen. The two routes share no
//! code, so agreement pins the Hamiltonian convention (unrestricted double
//! sum over ordered pairs, descending σ-basis, periodized couplings), the
//! Gibbs weights, and every observable formula at once.

use approx::assert_relative_eq;
use spincert_core::couplings::{CouplingFamily, CouplingTable};
use spincert_core::gibbs::{Beta, GibbsState, Spectrum};
use spincert_core::hamiltonian::{Field, SpinSystem, build_hamiltonian};
use spincert_core::lattice::{Momentum, Torus};
use spincert_core::observables::ObservableContext;
use spincert_core::verify::{verify_irb_corr, verify_irb_duhamel};

const RTOL: f64 = 1e-9;

fn nn(js: [f64; 3]) -> [CouplingFamily; 3] {
    js.map(|j| CouplingFamily::NearestNeighbour { j })
}

fn build(
    d: usize,
    ell: usize,
    two_s: u32,
    js: [f64; 3],
    beta: f64,
) -> (SpinSystem, CouplingTable, GibbsState) {
    let torus = Torus::new(d, ell).unwrap();
    let system = SpinSystem::new(&torus, two_s).unwrap();
    let table = CouplingTable::build(&torus, &nn(js), 1e-12).unwrap();
    let ham = build_hamiltonian(&system, &table, &Field::Uniform(0.0));
    let state = GibbsState::new(Spectrum::new(&ham).unwrap(), Beta::Finite(beta)).unwrap();
    (system, table, state)
}

/// XXZ pair on the 2-ring, spin 1/2: the smallest system where the
/// periodization doubles the bond and the Duhamel spectral formula has
/// genuinely degenerate gaps.
#[test]
fn two_site_xxz_spin_half() {
    let (system, table, state) = build(1, 2, 1, [0.5, 0.0, 1.0], 1.0);
    let expected = [-1.5, -0.5, 0.5, 1.5];
    for (lam, want) in state.spectrum.eigenvalues.iter().zip(expected) {
        assert_relative_eq!(*lam, want, max_relative = RTOL);
    }
    assert_relative_eq!(state.log_z.unwrap(), 1.940189698561195, max_relative = RTOL);
    assert_relative_eq!(state.free_energy(2), -0.970094849280598, max_relative = RTOL);

    let ctx = ObservableContext::new(&system, &table, &state);
    let corr = ctx.correlations();
    assert_relative_eq!(corr.get(0, 1), 0.115529289315002, max_relative = RTOL);
    assert_relative_eq!(corr.get(1, 1), -0.087986431584029, max_relative = RTOL);
    assert_relative_eq!(corr.get(2, 1), 0.190398538988941, max_relative = RTOL);
    // alpha uses the bare nearest-neighbour constants, not the doubled
    // periodized entries
    let alpha = 0.5 * corr.get(0, 1);
    assert_relative_eq!(alpha, 0.057764644657501, max_relative = RTOL);

    let k_pi = Momentum { m: vec![1] };
    assert_relative_eq!(table.epsilon_k(&k_pi), 4.0, max_relative = 1e-12);
    assert_relative_eq!(ctx.eta_hat(&k_pi), 0.055085715461948, max_relative = RTOL);
    assert_relative_eq!(ctx.corr_hat(&k_pi), 0.059601461011059, max_relative = RTOL);
    assert_relative_eq!(ctx.e_of_k(&k_pi, &corr), 0.013771428865487, max_relative = RTOL);
    assert_relative_eq!(ctx.long_range_order(), 0.220199269494471, max_relative = RTOL);

    // Plancherel: (1/l) sum_k corr_hat(k) = <(S0^3)^2> = 1/4
    let k_zero = Momentum { m: vec![0] };
    assert_relative_eq!(
        ctx.corr_hat(&k_zero) + ctx.corr_hat(&k_pi),
        0.5,
        max_relative = 1e-12
    );
    assert!(ctx.sum_rule_defect() < 1e-12);
}

/// Four-site ring with all three axes active (J2 < 0), spin 1/2.
#[test]
fn four_site_ring_all_axes() {
    let (system, table, state) = build(1, 4, 1, [1.0, -0.25, 1.0], 2.0);
    assert_relative_eq!(state.log_z.unwrap(), 6.400519188545894, max_relative = RTOL);
    assert_relative_eq!(state.free_energy(4), -0.800064898568237, max_relative = RTOL);

    let ctx = ObservableContext::new(&system, &table, &state);
    let corr = ctx.correlations();
    assert_relative_eq!(corr.get(0, 1), 0.163746691177637, max_relative = RTOL);
    assert_relative_eq!(corr.get(1, 1), -0.109795560538737, max_relative = RTOL);
    assert_relative_eq!(corr.get(2, 1), 0.163746691177637, max_relative = RTOL);
    let alpha = 1.0 * corr.get(0, 1) + (-0.25) * corr.get(1, 1);
    assert_relative_eq!(alpha, 0.191195581312321, max_relative = RTOL);

    let k_half = Momentum { m: vec![1] };
    assert_relative_eq!(table.epsilon_k(&k_half), 2.0, max_relative = 1e-12);
    assert_relative_eq!(ctx.eta_hat(&k_half), 0.050738925925837, max_relative = RTOL);
    assert_relative_eq!(ctx.corr_hat(&k_half), 0.137233553735429, max_relative = RTOL);
    // at k = pi/2 the cosine term drops and e(k) reduces to alpha itself
    assert_relative_eq!(ctx.e_of_k(&k_half, &corr), alpha, max_relative = RTOL);

    let k_pi = Momentum { m: vec![2] };
    assert_relative_eq!(table.epsilon_k(&k_pi), 4.0, max_relative = 1e-12);
    assert_relative_eq!(ctx.eta_hat(&k_pi), 0.018099807732644, max_relative = RTOL);
    assert_relative_eq!(ctx.corr_hat(&k_pi), 0.035273063909298, max_relative = RTOL);
    assert_relative_eq!(ctx.e_of_k(&k_pi, &corr), 0.040463347979174, max_relative = RTOL);

    assert_relative_eq!(ctx.long_range_order(), 0.172564957154961, max_relative = RTOL);
    assert!(ctx.sum_rule_defect() < 1e-12);

    // the frozen numbers satisfy the very bounds the engine asserts
    let field = Field::Uniform(0.0);
    assert!(verify_irb_duhamel(&ctx, &field, 1e-9).unwrap().pass);
    assert!(verify_irb_corr(&ctx, &field, 1e-9).unwrap().pass);
}

/// Spin-1 XXZ on the 2x2 torus at high temperature.
#[test]
fn two_by_two_torus_spin_one() {
    let (system, table, state) = build(2, 2, 2, [0.5, 0.0, 1.0], 0.5);
    assert_relative_eq!(
        state.spectrum.ground_energy(),
        -16.38562107513661,
        max_relative = RTOL
    );
    assert_relative_eq!(state.log_z.unwrap(), 9.006928452265052, max_relative = RTOL);
    assert_relative_eq!(state.free_energy(4), -4.503464226132526, max_relative = RTOL);

    let ctx = ObservableContext::new(&system, &table, &state);
    let corr = ctx.correlations();
    let e1 = system.torus.rank(&[1, 0]);
    assert_relative_eq!(corr.get(0, e1), 0.130465392668857, max_relative = RTOL);
    assert_relative_eq!(corr.get(1, e1), -0.077614481922152, max_relative = RTOL);
    assert_relative_eq!(corr.get(2, e1), 0.899094018040973, max_relative = RTOL);
    let alpha = 0.5 * corr.get(0, e1);
    assert_relative_eq!(alpha, 0.065232696334428, max_relative = RTOL);

    let k_edge = Momentum { m: vec![0, 1] };
    assert_relative_eq!(table.epsilon_k(&k_edge), 4.0, max_relative = 1e-12);
    assert_relative_eq!(ctx.eta_hat(&k_edge), 0.044137038452966, max_relative = RTOL);
    assert_relative_eq!(ctx.corr_hat(&k_edge), 0.060607305514994, max_relative = RTOL);
    assert_relative_eq!(ctx.e_of_k(&k_edge, &corr), 0.130465392668857, max_relative = RTOL);

    let k_corner = Momentum { m: vec![1, 1] };
    assert_relative_eq!(table.epsilon_k(&k_corner), 8.0, max_relative = 1e-12);
    assert_relative_eq!(ctx.eta_hat(&k_corner), 0.025043932096259, max_relative = RTOL);
    assert_relative_eq!(ctx.corr_hat(&k_corner), 0.032352581478474, max_relative = RTOL);
    assert_relative_eq!(ctx.e_of_k(&k_corner, &corr), 0.052850910746704, max_relative = RTOL);

    assert_relative_eq!(ctx.long_range_order(), 0.907182163410591, max_relative = RTOL);
    assert!(ctx.sum_rule_defect() < 1e-12);

    let field = Field::Uniform(0.0);
    assert!(verify_irb_duhamel(&ctx, &field, 1e-9).unwrap().pass);
    assert!(verify_irb_corr(&ctx, &field, 1e-9).unwrap().pass);
}
