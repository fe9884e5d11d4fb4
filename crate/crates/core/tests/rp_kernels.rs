//! Reflection-positivity kernels of the periodized coupling tables.
//!
//! Every admissible coupling family must yield a positive semidefinite
//! cross-coupling kernel for every edge reflection of the torus. The
//! checks here sweep all families over small tori, pin one kernel whose
//! entries are known in closed form, and confirm that a sign-violating
//! table is flagged rather than waved through.

use spincert_core::couplings::{CouplingFamily, CouplingTable};
use spincert_core::lattice::Torus;
use spincert_core::rp::{cross_kernel, rp_check, ReflectionPlane, DEFAULT_PSD_TOL};

fn families_for(d: usize) -> Vec<CouplingFamily> {
    let (s, u, lambda) = match d {
        1 => (3.0, 1.5, 0.5),
        _ => (4.5, 2.25, 0.6),
    };
    vec![
        CouplingFamily::NearestNeighbour { j: 1.0 },
        CouplingFamily::Yukawa { a: 1.0, b: 1.0 },
        CouplingFamily::PowerLawL1 { a: 1.0, s },
        CouplingFamily::RandomWalk { c: 1.0, lambda },
        CouplingFamily::EuclideanPower { a: 1.0, u },
        CouplingFamily::ConvexCombination {
            terms: vec![
                (0.5, CouplingFamily::NearestNeighbour { j: 1.0 }),
                (0.5, CouplingFamily::Yukawa { a: 2.0, b: 0.7 }),
            ],
        },
    ]
}

#[test]
fn all_families_give_psd_kernels() {
    let cases = [(1usize, 4usize), (1, 8), (2, 4)];
    for (d, ell) in cases {
        let torus = Torus::new(d, ell).unwrap();
        for family in families_for(d) {
            let table = CouplingTable::single_axis(&torus, 2, &family, 1e-9).unwrap();
            let report = rp_check(&table, DEFAULT_PSD_TOL);
            assert!(
                report.pass,
                "d = {d}, ell = {ell}, family = {family:?}: {:?}",
                report
                    .verdicts
                    .iter()
                    .filter(|v| !v.pass)
                    .collect::<Vec<_>>()
            );
            for v in &report.verdicts {
                // no kernel should sit deeper than numerical noise below zero
                assert!(
                    v.min_eigenvalue >= -DEFAULT_PSD_TOL * v.max_abs_entry.max(1e-300),
                    "d = {d}, ell = {ell}, family = {family:?}, axis {}: min eig {}",
                    v.axis,
                    v.min_eigenvalue
                );
            }
        }
    }
}

#[test]
fn nearest_neighbour_cross_kernel_is_identity() {
    // ring of four sites, plane at ε = ½: Λ_left = {0, 3}, and each left
    // site couples only to its own mirror image, giving the 2×2 identity
    let torus = Torus::new(1, 4).unwrap();
    let family = CouplingFamily::NearestNeighbour { j: 1.0 };
    let table = CouplingTable::single_axis(&torus, 2, &family, 1e-12).unwrap();
    let plane = ReflectionPlane {
        direction: 0,
        offset_index: 0,
    };
    let k = cross_kernel(&torus, &table.axes[2].values, &plane);
    assert_eq!(k.nrows(), 2);
    assert_eq!(k.ncols(), 2);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((k[(i, j)] - want).abs() < 1e-15, "k[{i},{j}] = {}", k[(i, j)]);
        }
    }
}

#[test]
fn every_plane_is_checked() {
    let torus = Torus::new(2, 4).unwrap();
    let planes = ReflectionPlane::all(&torus);
    assert_eq!(planes.len(), 4); // two directions × two offsets
    let table = CouplingTable::single_axis(
        &torus,
        2,
        &CouplingFamily::NearestNeighbour { j: 1.0 },
        1e-12,
    )
    .unwrap();
    let report = rp_check(&table, DEFAULT_PSD_TOL);
    assert_eq!(report.verdicts.len(), 3 * planes.len());
}

#[test]
fn antiferromagnetic_sign_is_flagged() {
    let torus = Torus::new(1, 4).unwrap();
    let family = CouplingFamily::NearestNeighbour { j: -1.0 };
    let table = CouplingTable::single_axis(&torus, 2, &family, 1e-12).unwrap();
    let report = rp_check(&table, DEFAULT_PSD_TOL);
    assert!(!report.pass);
    let worst = report
        .verdicts
        .iter()
        .map(|v| v.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    assert!(worst < -0.5, "expected a clearly negative eigenvalue, got {worst}");
}

#[test]
fn transverse_axis_admits_negative_sign() {
    // J² ≤ 0 is the admissible sign on the second axis, so the same
    // antiferromagnetic values must pass there
    let torus = Torus::new(1, 4).unwrap();
    let family = CouplingFamily::NearestNeighbour { j: -1.0 };
    let table = CouplingTable::single_axis(&torus, 1, &family, 1e-12).unwrap();
    assert!(rp_check(&table, DEFAULT_PSD_TOL).pass);
}
