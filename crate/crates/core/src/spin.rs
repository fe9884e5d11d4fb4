//! Spin-S matrices on ℂⁿ, n = 2S + 1.
//!
//! The basis is ordered by descending S³ eigenvalue (S, S−1, …, −S), so
//! that for S = ½ the three operators are exactly half the Pauli matrices
//! and, for every S, S¹ and S⁺ are entrywise real and nonnegative while S²
//! is purely imaginary with |S²| = S¹ entrywise. That reality structure is
//! what the reflection-positivity arguments downstream rely on.

use crate::{C64, CMatrix};

/// The five standard operators for one spin.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub two_s: u32,
    /// n = 2S + 1.
    pub dim: usize,
    pub s1: CMatrix,
    pub s2: CMatrix,
    pub s3: CMatrix,
    pub splus: CMatrix,
    pub sminus: CMatrix,
}

impl SpinOperators {
    pub fn new(two_s: u32) -> Self {
        assert!(two_s >= 1, "spin must be at least ½");
        let n = two_s as usize + 1;
        let s = two_s as f64 / 2.0;
        // m_i = S − i for row/column i
        let m = |i: usize| s - i as f64;
        let mut splus = CMatrix::zeros(n, n);
        for i in 1..n {
            // raises m(i) to m(i) + 1 = m(i−1)
            let amp = (s * (s + 1.0) - m(i) * (m(i) + 1.0)).sqrt();
            splus[(i - 1, i)] = C64::new(amp, 0.0);
        }
        let sminus = splus.adjoint();
        let s1 = (&splus + &sminus).scale(0.5);
        let s2 = (&splus - &sminus) * C64::new(0.0, -0.5);
        let mut s3 = CMatrix::zeros(n, n);
        for i in 0..n {
            s3[(i, i)] = C64::new(m(i), 0.0);
        }
        Self {
            two_s,
            dim: n,
            s1,
            s2,
            s3,
            splus,
            sminus,
        }
    }

    /// S³ eigenvalues in basis order (descending).
    pub fn s3_diagonal(&self) -> Vec<f64> {
        let s = self.two_s as f64 / 2.0;
        (0..self.dim).map(|i| s - i as f64).collect()
    }

    /// The operator a₁S¹ + a₂S² + a₃S³.
    pub fn along(&self, a: [f64; 3]) -> CMatrix {
        &self.s1 * C64::new(a[0], 0.0)
            + &self.s2 * C64::new(a[1], 0.0)
            + &self.s3 * C64::new(a[2], 0.0)
    }

    /// Single-spin rotation U = exp(−i a·S), via the spectral theorem.
    pub fn rotation_unitary(&self, a: [f64; 3]) -> CMatrix {
        hermitian_exp_scaled(&self.along(a), C64::new(0.0, -1.0))
    }
}

/// exp(c·A) for Hermitian A and any complex scalar c.
pub fn hermitian_exp_scaled(a: &CMatrix, c: C64) -> CMatrix {
    let eig = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut result = CMatrix::zeros(n, n);
    // V·diag(exp(cλ))·V†
    let v = &eig.eigenvectors;
    for j in 0..n {
        let w = (c * C64::new(eig.eigenvalues[j], 0.0)).exp();
        let col = v.column(j);
        for r in 0..n {
            for s in 0..n {
                result[(r, s)] += w * col[r] * col[s].conj();
            }
        }
    }
    result
}

/// Embed a single-site operator at `site` in a chain of `n_sites` spins
/// (Kronecker product with identities elsewhere). Intended for small
/// systems; dimension grows as dimᵒᵖ^n_sites.
pub fn site_operator(op: &CMatrix, site: usize, n_sites: usize) -> CMatrix {
    let n = op.nrows();
    let mut out = CMatrix::identity(1, 1);
    for i in 0..n_sites {
        out = if i == site {
            out.kronecker(op)
        } else {
            out.kronecker(&CMatrix::identity(n, n))
        };
    }
    out
}
