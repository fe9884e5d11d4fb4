//! Spin systems on tori and dense Hamiltonian assembly.
//!
//! The Hamiltonian is
//!
//! ```text
//!   H = −Σᵢ Σ_{x,y ∈ Λ} J_per⁽ⁱ⁾(x−y) S_x⁽ⁱ⁾ S_y⁽ⁱ⁾ − Σ_x h_x S_x⁽³⁾,
//! ```
//!
//! with the double sum over *all* ordered pairs, including x = y (the
//! self-image coupling J_per(0) then multiplies (S⁽ⁱ⁾)², a constant only
//! when all axes share it — it is kept exactly as written). Matrix entries
//! are assembled by walking the base-n digits of each basis state rather
//! than by Kronecker products of full site operators, so the only dense
//! dim×dim object ever held is H itself.

use crate::couplings::CouplingTable;
use crate::lattice::Torus;
use crate::spin::SpinOperators;
use crate::{C64, CMatrix, Error, HILBERT_DIM_CAP, Result};

/// A spin-S system on a torus, with a capped Hilbert dimension.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    pub torus: Torus,
    pub ops: SpinOperators,
    pub dim: usize,
}

impl SpinSystem {
    pub fn new(torus: &Torus, two_s: u32) -> Result<Self> {
        let n = two_s as usize + 1;
        let sites = torus.n_sites();
        // n^sites with overflow care
        let mut dim = 1usize;
        for _ in 0..sites {
            dim = dim
                .checked_mul(n)
                .filter(|&d| d <= HILBERT_DIM_CAP)
                .ok_or(Error::DimensionCap {
                    dim: usize::MAX,
                    cap: HILBERT_DIM_CAP,
                })?;
        }
        Ok(Self {
            torus: torus.clone(),
            ops: SpinOperators::new(two_s),
            dim,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.torus.n_sites()
    }

    /// Local dimension n = 2S + 1.
    pub fn local_dim(&self) -> usize {
        self.ops.dim
    }

    /// The base-n digit of basis state `state` at `site` (site 0 is the
    /// most significant digit, matching lexicographic site order).
    pub fn digit(&self, state: usize, site: usize) -> usize {
        let n = self.local_dim();
        (state / self.stride(site)) % n
    }

    /// n^(N−1−site): moving site's digit by ±1 moves the state by ±stride.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim().pow((self.n_sites() - 1 - site) as u32)
    }

    /// Nonzero entries (row, col, value) of a local operator.
    pub(crate) fn local_entries(op: &CMatrix) -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for c in 0..op.ncols() {
            for r in 0..op.nrows() {
                if op[(r, c)] != C64::new(0.0, 0.0) {
                    v.push((r, c, op[(r, c)]));
                }
            }
        }
        v
    }

    /// Apply the single-site operator with entry list `entries` at `site`
    /// to basis state `state`, yielding (new_state, amplitude) pairs.
    pub(crate) fn apply_local(
        &self,
        entries: &[(usize, usize, C64)],
        site: usize,
        state: usize,
    ) -> Vec<(usize, C64)> {
        let digit = self.digit(state, site);
        let stride = self.stride(site);
        entries
            .iter()
            .filter(|&&(_, c, _)| c == digit)
            .map(|&(r, _, v)| (state + r * stride - digit * stride, v))
            .collect()
    }

    /// The σ-basis diagonal of the total magnetisation M = Σ_x S_x⁽³⁾.
    pub fn magnetisation_diagonal(&self) -> Vec<f64> {
        let m = self.ops.s3_diagonal();
        (0..self.dim)
            .map(|state| (0..self.n_sites()).map(|x| m[self.digit(state, x)]).sum())
            .collect()
    }
}

/// External field: uniform along axis 3, or site-dependent.
#[derive(Debug, Clone)]
pub enum Field {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl Field {
    fn at(&self, site: usize) -> f64 {
        match self {
            Field::Uniform(h) => *h,
            Field::PerSite(v) => v[site],
        }
    }
}

/// Site field h = Δv induced by a smearing field v through the axis-3
/// couplings: (Δv)_x = Σ_y J_per⁽³⁾(x−y)·(v_y − v_x).
pub fn laplacian_field(table: &CouplingTable, v: &[f64]) -> Vec<f64> {
    let torus = &table.torus;
    let n = torus.n_sites();
    assert_eq!(v.len(), n);
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| table.j_per(2, torus.diff_rank(x, y)) * (v[y] - v[x]))
                .sum()
        })
        .collect()
}

/// Assemble the Hamiltonian with the field coupled to an arbitrary spin
/// axis: H = −Σᵢ Σ_{x,y} J⁽ⁱ⁾(x−y) S_xⁱ S_yⁱ − Σ_x h_x S_x^{(axis)}.
pub fn build_hamiltonian_with_axis(
    system: &SpinSystem,
    table: &CouplingTable,
    field: &Field,
    field_axis: usize,
) -> CMatrix {
    let mut h = coupling_part(system, table);
    let ops = [&system.ops.s1, &system.ops.s2, &system.ops.s3];
    let entries = SpinSystem::local_entries(ops[field_axis]);
    for state in 0..system.dim {
        for x in 0..system.n_sites() {
            let hx = field.at(x);
            if hx == 0.0 {
                continue;
            }
            for (row, amp) in system.apply_local(&entries, x, state) {
                h[(row, state)] -= C64::new(hx, 0.0) * amp;
            }
        }
    }
    h
}

/// Assemble the dense Hamiltonian for the system, couplings, and field.
pub fn build_hamiltonian(
    system: &SpinSystem,
    table: &CouplingTable,
    field: &Field,
) -> CMatrix {
    let mut h = coupling_part(system, table);
    // field term: −Σ_x h_x S_x⁽³⁾ is diagonal in the σ-basis
    let m = system.ops.s3_diagonal();
    for state in 0..system.dim {
        let mut acc = 0.0;
        for x in 0..system.n_sites() {
            acc += field.at(x) * m[system.digit(state, x)];
        }
        h[(state, state)] -= C64::new(acc, 0.0);
    }
    h
}

/// The exchange part −Σᵢ Σ_{x,y} J⁽ⁱ⁾(x−y) S_xⁱ S_yⁱ alone.
fn coupling_part(system: &SpinSystem, table: &CouplingTable) -> CMatrix {
    assert_eq!(system.torus, table.torus, "system and table must share a torus");
    let n_sites = system.n_sites();
    let dim = system.dim;
    let torus = &system.torus;
    let axes = [&system.ops.s1, &system.ops.s2, &system.ops.s3];
    let mut h = CMatrix::zeros(dim, dim);

    for (axis, op) in axes.iter().enumerate() {
        let entries = SpinSystem::local_entries(op);
        // ordered site pairs with a nonzero periodized coupling
        let mut pairs = Vec::new();
        for x in 0..n_sites {
            for y in 0..n_sites {
                let j = table.j_per(axis, torus.diff_rank(x, y));
                if j != 0.0 {
                    pairs.push((x, y, j));
                }
            }
        }
        if pairs.is_empty() {
            continue;
        }
        for state in 0..dim {
            for &(x, y, j) in &pairs {
                for (mid, amp_y) in system.apply_local(&entries, y, state) {
                    for (row, amp_x) in system.apply_local(&entries, x, mid) {
                        h[(row, state)] -= C64::new(j, 0.0) * amp_x * amp_y;
                    }
                }
            }
        }
    }
    h
}
