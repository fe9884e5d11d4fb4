//! Reflection positivity of coupling tables.
//!
//! For an even torus, reflections act across planes that cut edges: in
//! direction i the plane sits at offset ε = j + ½ (j = 0,…,ℓ/2 − 1) and
//! maps x ↦ x + 2(ε − xᵢ)eᵢ mod ℓ. The half-torus Λ_left collects the
//! sites with xᵢ ∈ (ε − ℓ/2, ε) mod ℓ. The coupling kernel between the
//! halves,
//!
//! ```text
//!   K(u, v) = J_per(u − Rv),      u, v ∈ Λ_left,
//! ```
//!
//! picks up every interaction crossing the cut plane or its antipodal
//! partner; positive semidefiniteness of K for each axis (axis 2 with the
//! sign flipped) is the concrete content of reflection positivity for
//! these models, and is what the partition-function inequalities verified
//! in [`crate::verify`] rest on.

use nalgebra::DMatrix;

use crate::couplings::CouplingTable;
use crate::lattice::Torus;

/// Default eigenvalue tolerance, scaled by the kernel's largest entry.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// An edge-cutting reflection plane: direction i, offset ε = j + ½.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReflectionPlane {
    pub direction: usize,
    /// ε = offset_index + ½.
    pub offset_index: usize,
}

impl ReflectionPlane {
    /// All ℓ/2 · d distinct edge reflections of the torus.
    pub fn all(torus: &Torus) -> Vec<Self> {
        let mut v = Vec::new();
        for direction in 0..torus.dimension() {
            for offset_index in 0..torus.side() / 2 {
                v.push(Self {
                    direction,
                    offset_index,
                });
            }
        }
        v
    }

    /// Image of a site under the reflection.
    pub fn reflect(&self, torus: &Torus, x: &[usize]) -> Vec<usize> {
        let ell = torus.side();
        let two_eps = 2 * self.offset_index + 1; // 2ε is an odd integer
        let mut y = x.to_vec();
        y[self.direction] = (two_eps + ell - x[self.direction] % ell) % ell;
        y
    }

    /// Site ranks of the half-torus Λ_left, in lexicographic order.
    pub fn lam_left(&self, torus: &Torus) -> Vec<usize> {
        let ell = torus.side() as i64;
        let eps2 = (2 * self.offset_index + 1) as i64; // 2ε
        let lo2 = eps2 - ell; // 2(ε − ℓ/2)
        (0..torus.n_sites())
            .filter(|&r| {
                let xi = torus.site(r)[self.direction] as i64;
                [-1i64, 0, 1]
                    .iter()
                    .any(|&w| lo2 < 2 * (xi + w * ell) && 2 * (xi + w * ell) < eps2)
            })
            .collect()
    }
}

/// Cross-plane kernel K(u,v) = J_per(u − Rv) on Λ_left × Λ_left for one
/// axis table (pass the values with sign already adjusted for axis 2).
pub fn cross_kernel(
    torus: &Torus,
    values: &[f64],
    plane: &ReflectionPlane,
) -> DMatrix<f64> {
    let left = plane.lam_left(torus);
    let n = left.len();
    let mut k = DMatrix::<f64>::zeros(n, n);
    for (col, &v) in left.iter().enumerate() {
        let rv = torus.rank(&plane.reflect(torus, &torus.site(v)));
        for (row, &u) in left.iter().enumerate() {
            k[(row, col)] = values[torus.diff_rank(u, rv)];
        }
    }
    k
}

/// Verdict for one (axis, plane) pair.
#[derive(Debug, Clone)]
pub struct PlaneVerdict {
    pub axis: usize,
    pub plane: ReflectionPlane,
    pub min_eigenvalue: f64,
    pub max_abs_entry: f64,
    pub symmetry_defect: f64,
    pub pass: bool,
}

/// Aggregate reflection-positivity report for a coupling table.
#[derive(Debug, Clone)]
pub struct RpReport {
    pub verdicts: Vec<PlaneVerdict>,
    pub pass: bool,
}

/// Check every (axis, plane) kernel for positive semidefiniteness.
///
/// Axis 2 enters with the sign flipped (its admissible couplings are ≤ 0).
/// `tol` is relative to the kernel's largest absolute entry; a FAIL is a
/// result, not an error.
pub fn rp_check(table: &CouplingTable, tol: f64) -> RpReport {
    let torus = &table.torus;
    let mut verdicts = Vec::new();
    for axis in 0..3 {
        let values: Vec<f64> = if axis == 1 {
            table.axes[axis].values.iter().map(|&v| -v).collect()
        } else {
            table.axes[axis].values.clone()
        };
        for plane in ReflectionPlane::all(torus) {
            let k = cross_kernel(torus, &values, &plane);
            let scale = k.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let defect = (&k - k.transpose())
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            let sym = (&k + k.transpose()).scale(0.5);
            let min_eig = sym
                .symmetric_eigenvalues()
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            let floor = tol * scale;
            let pass = min_eig >= -floor && defect <= floor.max(f64::MIN_POSITIVE);
            verdicts.push(PlaneVerdict {
                axis,
                plane,
                min_eigenvalue: min_eig,
                max_abs_entry: scale,
                symmetry_defect: defect,
                pass,
            });
        }
    }
    let pass = verdicts.iter().all(|v| v.pass);
    RpReport { verdicts, pass }
}
