//! Thermal observables of a spin system: two-point functions, Fourier
//! transforms, Duhamel susceptibilities, and the quantities entering the
//! momentum-space correlation bounds.
//!
//! The axis-3 Fourier operator Ŝₖ = Σ_x e^{ik·x} S_x⁽³⁾ is diagonal in
//! the σ-basis, so its eigenbasis transform costs one matrix product per
//! momentum, and the symmetrized structure factor reduces to a weighted
//! sum over the diagonal of ρ.

use crate::couplings::CouplingTable;
use crate::gibbs::{Beta, GibbsState};
use crate::hamiltonian::SpinSystem;
use crate::lattice::Momentum;
use crate::{C64, CMatrix};

/// Real two-point functions ⟨S₀⁽ⁱ⁾ S_x⁽ⁱ⁾⟩ indexed by the site rank of x.
#[derive(Debug, Clone)]
pub struct Correlations {
    pub axis: [Vec<f64>; 3],
}

impl Correlations {
    pub fn get(&self, axis: usize, x: usize) -> f64 {
        self.axis[axis][x]
    }
}

/// Cached state for observable evaluation: the Gibbs state plus its dense
/// density matrix and σ-basis diagonal.
pub struct ObservableContext<'a> {
    pub system: &'a SpinSystem,
    pub table: &'a CouplingTable,
    pub state: &'a GibbsState,
    rho: CMatrix,
    rho_diag: Vec<f64>,
}

impl<'a> ObservableContext<'a> {
    pub fn new(
        system: &'a SpinSystem,
        table: &'a CouplingTable,
        state: &'a GibbsState,
    ) -> Self {
        let rho = state.density_matrix();
        let rho_diag = (0..rho.nrows()).map(|s| rho[(s, s)].re).collect();
        Self { system, table, state, rho, rho_diag }
    }

    pub fn n_sites(&self) -> usize {
        self.system.n_sites()
    }

    /// ⟨S_a⁽ⁱ⁾ S_b⁽ⁱ⁾⟩ by sparse application of the pair operator against
    /// the cached density matrix.
    pub fn two_point(&self, axis: usize, a: usize, b: usize) -> f64 {
        let ops = [&self.system.ops.s1, &self.system.ops.s2, &self.system.ops.s3];
        let entries = SpinSystem::local_entries(ops[axis]);
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..self.system.dim {
            for (mid, amp_b) in self.system.apply_local(&entries, b, col) {
                for (row, amp_a) in self.system.apply_local(&entries, a, mid) {
                    acc += self.rho[(col, row)] * amp_a * amp_b;
                }
            }
        }
        acc.re
    }

    /// All ⟨S₀⁽ⁱ⁾ S_x⁽ⁱ⁾⟩, x ranging over the torus in rank order.
    pub fn correlations(&self) -> Correlations {
        let n = self.n_sites();
        let axis = [0, 1, 2].map(|i| (0..n).map(|x| self.two_point(i, 0, x)).collect());
        Correlations { axis }
    }

    /// σ-basis diagonal of Ŝₖ = Σ_x e^{−ik·x} S_x⁽³⁾.
    pub fn fourier_diagonal(&self, k: &Momentum) -> Vec<C64> {
        let torus = &self.system.torus;
        let trig = self.table.trig();
        let m = self.system.ops.s3_diagonal();
        let phases: Vec<C64> = torus
            .sites()
            .into_iter()
            .map(|x| {
                let t = k.phase(&x);
                C64::new(trig.cos(t), -trig.sin(t))
            })
            .collect();
        (0..self.system.dim)
            .map(|state| {
                (0..self.n_sites())
                    .map(|x| phases[x] * m[self.system.digit(state, x)])
                    .sum()
            })
            .collect()
    }

    /// Eigenbasis transform U† diag(d) U of a σ-basis diagonal operator.
    pub fn transform_diagonal(&self, d: &[C64]) -> CMatrix {
        let u = &self.state.spectrum.vectors;
        let mut scaled = u.clone();
        for (s, &ds) in d.iter().enumerate() {
            for c in 0..scaled.ncols() {
                scaled[(s, c)] = u[(s, c)] * ds;
            }
        }
        u.adjoint() * scaled
    }

    /// Duhamel susceptibility η̂(k) = (Ŝₖ, Ŝₖ)/|Λ|.
    pub fn eta_hat(&self, k: &Momentum) -> f64 {
        let d = self.fourier_diagonal(k);
        let a_tilde = self.transform_diagonal(&d);
        self.state.duhamel_transformed(&a_tilde, &a_tilde).re / self.n_sites() as f64
    }

    /// Symmetrized structure factor ½⟨Ŝₖ†Ŝₖ + ŜₖŜₖ†⟩/|Λ|. Both products
    /// share the diagonal |d_σ|², so this is Σ_σ ρ_σσ |d_σ|² / |Λ|.
    pub fn corr_hat(&self, k: &Momentum) -> f64 {
        let d = self.fourier_diagonal(k);
        self.rho_diag
            .iter()
            .zip(&d)
            .map(|(&r, ds)| r * ds.norm_sqr())
            .sum::<f64>()
            / self.n_sites() as f64
    }

    /// Transverse kinetic coefficient
    /// e(k) = ½ Σ_x [(J⁽¹⁾(x) − J⁽²⁾(x) cos k·x)⟨S₀¹S_x¹⟩
    ///              + (J⁽²⁾(x) − J⁽¹⁾(x) cos k·x)⟨S₀²S_x²⟩],
    /// with J the periodized couplings.
    pub fn e_of_k(&self, k: &Momentum, corr: &Correlations) -> f64 {
        let torus = &self.system.torus;
        let trig = self.table.trig();
        let mut acc = 0.0;
        for (x_rank, x) in torus.sites().into_iter().enumerate() {
            let c = trig.cos(k.phase(&x));
            let j1 = self.table.j_per(0, x_rank);
            let j2 = self.table.j_per(1, x_rank);
            acc += (j1 - j2 * c) * corr.get(0, x_rank) + (j2 - j1 * c) * corr.get(1, x_rank);
        }
        0.5 * acc
    }

    /// Order parameter ⟨M²⟩/|Λ|² with M = Σ_x S_x⁽³⁾, i.e. corr_hat(0)/|Λ|.
    pub fn long_range_order(&self) -> f64 {
        let torus = &self.system.torus;
        let zero = Momentum { m: vec![0; torus.dimension()] };
        self.corr_hat(&zero) / self.n_sites() as f64
    }

    /// (⟨M²⟩/|Λ|², ⟨|M|⟩/|Λ|): M is σ-basis diagonal, so |M| is exact.
    pub fn magnetisation_moments(&self) -> (f64, f64) {
        let m = self.system.magnetisation_diagonal();
        let n = self.n_sites() as f64;
        let m2: f64 = self
            .rho_diag
            .iter()
            .zip(&m)
            .map(|(&r, &v)| r * v * v)
            .sum();
        let m_abs: f64 = self
            .rho_diag
            .iter()
            .zip(&m)
            .map(|(&r, &v)| r * v.abs())
            .sum();
        (m2 / (n * n), m_abs / n)
    }

    /// |⟨(S₀³)²⟩ − (1/|Λ|)Σ_k corr_hat(k)|: the Plancherel sum rule that
    /// ties the structure factor back to the on-site moment.
    pub fn sum_rule_defect(&self) -> f64 {
        let grid = crate::lattice::MomentumGrid::new(&self.system.torus);
        let total: f64 = grid.iter().map(|k| self.corr_hat(k)).sum();
        let onsite = self.two_point(2, 0, 0);
        (total / self.n_sites() as f64 - onsite).abs()
    }
}

/// ⟨[A†, [K, A]]⟩ with K = βH, evaluated spectrally:
/// Σ_{ij} (w_i − w_j)(κ_j − κ_i)|Ã_ij|², κ_i = βλ_i.
///
/// Requires finite β; the commutator with K has no β = ∞ meaning.
pub fn double_commutator(state: &GibbsState, a_tilde: &CMatrix) -> Option<f64> {
    let beta = match state.beta {
        Beta::Finite(b) => b,
        Beta::Infinite => return None,
    };
    let lam = &state.spectrum.eigenvalues;
    let w = &state.weights;
    let dim = state.dim();
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let factor = (w[i] - w[j]) * beta * (lam[j] - lam[i]);
            if factor != 0.0 {
                acc += factor * a_tilde[(i, j)].norm_sqr();
            }
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::CouplingFamily;
    use crate::gibbs::Spectrum;
    use crate::hamiltonian::{Field, build_hamiltonian};
    use crate::lattice::{MomentumGrid, Torus};
    use approx::assert_relative_eq;

    fn xxz_context(
        d: usize,
        ell: usize,
        two_s: u32,
        js: [f64; 3],
        beta: f64,
        h: f64,
    ) -> (SpinSystem, CouplingTable, GibbsState) {
        let torus = Torus::new(d, ell).unwrap();
        let system = SpinSystem::new(&torus, two_s).unwrap();
        let table = CouplingTable::build(
            &torus,
            &[
                CouplingFamily::NearestNeighbour { j: js[0] },
                CouplingFamily::NearestNeighbour { j: js[1] },
                CouplingFamily::NearestNeighbour { j: js[2] },
            ],
            1e-12,
        )
        .unwrap();
        let hmat = build_hamiltonian(&system, &table, &Field::Uniform(h));
        let state = GibbsState::new(Spectrum::new(&hmat).unwrap(), Beta::Finite(beta)).unwrap();
        (system, table, state)
    }

    #[test]
    fn product_state_correlations_factorize() {
        // decoupled spins in a field: ⟨S₀³S_x³⟩ = ⟨S³⟩² for x ≠ 0
        let (system, table, state) = xxz_context(1, 4, 1, [0.0, 0.0, 0.0], 1.3, 0.9);
        let ctx = ObservableContext::new(&system, &table, &state);
        let m = 0.5 * (1.3f64 * 0.9 / 2.0).tanh();
        assert_relative_eq!(ctx.two_point(2, 0, 1), m * m, max_relative = 1e-12);
        assert_relative_eq!(ctx.two_point(2, 0, 0), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn fourier_diagonal_at_zero_is_total_magnetisation() {
        let (system, table, state) = xxz_context(1, 4, 2, [0.3, 0.1, 0.7], 0.8, 0.0);
        let ctx = ObservableContext::new(&system, &table, &state);
        let zero = Momentum { m: vec![0] };
        let d = ctx.fourier_diagonal(&zero);
        let m = system.magnetisation_diagonal();
        for (ds, &ms) in d.iter().zip(&m) {
            assert_relative_eq!(ds.re, ms, epsilon = 1e-14);
            assert!(ds.im.abs() < 1e-14);
        }
    }

    #[test]
    fn sum_rule_holds_on_anisotropic_chain() {
        let (system, table, state) = xxz_context(1, 4, 1, [0.5, -0.2, 1.0], 1.1, 0.4);
        let ctx = ObservableContext::new(&system, &table, &state);
        assert!(ctx.sum_rule_defect() < 1e-12);
    }

    #[test]
    fn conserved_magnetisation_makes_eta_hat_static_at_k_zero() {
        // J¹ = J² means [M, H] = 0, so the Duhamel and static
        // susceptibilities coincide at k = 0
        let (system, table, state) = xxz_context(1, 4, 1, [0.5, 0.5, 1.0], 0.9, 0.0);
        let ctx = ObservableContext::new(&system, &table, &state);
        let zero = Momentum { m: vec![0] };
        assert_relative_eq!(
            ctx.eta_hat(&zero),
            ctx.corr_hat(&zero),
            max_relative = 1e-10
        );
    }

    #[test]
    fn double_commutator_matches_direct_matrices() {
        let (system, table, state) = xxz_context(1, 4, 1, [1.0, -0.25, 1.0], 1.7, 0.3);
        let ctx = ObservableContext::new(&system, &table, &state);
        let hmat = build_hamiltonian(&system, &table, &Field::Uniform(0.3));
        let beta = 1.7;
        let grid = MomentumGrid::new(&system.torus);
        for k in grid.iter() {
            let d = ctx.fourier_diagonal(k);
            let a_tilde = ctx.transform_diagonal(&d);
            let spectral = double_commutator(&state, &a_tilde).unwrap();
            // direct: A = diag(d), K = βH, ⟨[A†,[K,A]]⟩
            let dim = system.dim;
            let mut a = CMatrix::zeros(dim, dim);
            for (s, &ds) in d.iter().enumerate() {
                a[(s, s)] = ds;
            }
            let kmat = &hmat * C64::new(beta, 0.0);
            let inner = &kmat * &a - &a * &kmat;
            let outer = a.adjoint() * &inner - &inner * a.adjoint();
            let direct = state.expectation(&outer).re;
            assert_relative_eq!(spectral, direct, epsilon = 1e-10, max_relative = 1e-9);
        }
    }

    #[test]
    fn double_commutator_equals_4_beta_n_e_of_k() {
        let (system, table, state) = xxz_context(1, 4, 1, [1.0, -0.25, 1.0], 2.0, 0.0);
        let ctx = ObservableContext::new(&system, &table, &state);
        let corr = ctx.correlations();
        let beta = 2.0;
        let n = system.n_sites() as f64;
        for k in MomentumGrid::new(&system.torus).iter() {
            let d = ctx.fourier_diagonal(k);
            let a_tilde = ctx.transform_diagonal(&d);
            let dc = double_commutator(&state, &a_tilde).unwrap();
            let e = ctx.e_of_k(k, &corr);
            assert_relative_eq!(dc, 4.0 * beta * n * e, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn long_range_order_matches_magnetisation_second_moment() {
        let (system, table, state) = xxz_context(2, 2, 1, [0.5, 0.0, 1.0], 0.5, 0.0);
        let ctx = ObservableContext::new(&system, &table, &state);
        let (m2, _) = ctx.magnetisation_moments();
        assert_relative_eq!(ctx.long_range_order(), m2, max_relative = 1e-12);
    }
}
