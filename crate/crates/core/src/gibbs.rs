//! Spectral decompositions and Gibbs states, including the β = 0 and
//! β = ∞ endpoints and the Duhamel (Bogolubov) inner product.
//!
//! All thermal quantities are computed from a single Hermitian
//! eigendecomposition. Weights are evaluated with the ground energy
//! subtracted, so large β never overflows:
//!
//! ```text
//!   w_i = e^{−β(λ_i−λ₀)} / Σ_j e^{−β(λ_j−λ₀)},
//!   log Z = log Σ_j e^{−β(λ_j−λ₀)} − β λ₀.
//! ```
//!
//! At β = ∞ the state is the normalized projector onto the ground space,
//! with degeneracy resolved at 10⁻¹⁰ of the spectral width.

use nalgebra::SymmetricEigen;

use crate::{C64, CMatrix, Error, Result};

/// Relative eigenvalue tolerance for ground-space membership at β = ∞.
pub const GROUND_DEGENERACY_RTOL: f64 = 1e-10;

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns
/// of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Decompose a Hermitian matrix. The input is symmetrized first; a
    /// Hermiticity defect beyond rounding noise is an error rather than
    /// something to silently average away.
    pub fn new(h: &CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::Eigen(format!(
                "matrix is {}x{}, expected square",
                h.nrows(),
                h.ncols()
            )));
        }
        let scale = h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let defect = (h - h.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if defect > 1e-8 * scale.max(1.0) {
            return Err(Error::Eigen(format!(
                "Hermiticity defect {defect:.3e} exceeds tolerance at scale {scale:.3e}"
            )));
        }
        let sym = (h + h.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        // nalgebra returns eigenvalues in no particular order
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let dim = eigenvalues.len();
        let mut vectors = CMatrix::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Self { eigenvalues, vectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// λ_max − λ_min, the scale against which degeneracies are judged.
    pub fn width(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }
}

/// Inverse temperature, with both endpoints admitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(*b),
            Beta::Infinite => None,
        }
    }
}

// JSON has no literal for infinity, so β serializes as a number when
// finite and as the string "inf" otherwise.
impl serde::Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => serializer.serialize_f64(*b),
            Beta::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Beta;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "a non-negative number or the string \"inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Beta, E> {
                if v.is_infinite() && v > 0.0 {
                    Ok(Beta::Infinite)
                } else if v.is_finite() && v >= 0.0 {
                    Ok(Beta::Finite(v))
                } else {
                    Err(E::custom(format!("invalid inverse temperature {v}")))
                }
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Beta, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Beta, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Beta, E> {
                match v {
                    "inf" | "infinity" | "Inf" | "Infinity" => Ok(Beta::Infinite),
                    other => Err(E::custom(format!(
                        "invalid inverse temperature {other:?}; use a number or \"inf\""
                    ))),
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// A Gibbs state ρ = e^{−βH}/Z in the eigenbasis of H.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub spectrum: Spectrum,
    pub beta: Beta,
    /// Probabilities w_i, ascending-eigenvalue order, summing to 1.
    pub weights: Vec<f64>,
    /// log Z; absent at β = ∞ where Z has no meaning.
    pub log_z: Option<f64>,
    /// β(λ_i − λ₀) for finite β; unused at β = ∞.
    shifted: Vec<f64>,
    /// Number of ground states within tolerance (β = ∞ support size).
    ground_count: usize,
}

impl GibbsState {
    pub fn new(spectrum: Spectrum, beta: Beta) -> Result<Self> {
        let dim = spectrum.dim();
        if dim == 0 {
            return Err(Error::Eigen("empty spectrum".into()));
        }
        let lam0 = spectrum.ground_energy();
        let deg_tol = GROUND_DEGENERACY_RTOL * spectrum.width();
        let ground_count = spectrum
            .eigenvalues
            .iter()
            .take_while(|&&l| l - lam0 <= deg_tol)
            .count();
        match beta {
            Beta::Finite(b) => {
                if !b.is_finite() || b < 0.0 {
                    return Err(Error::Parameter(format!(
                        "inverse temperature must be finite and nonnegative, got {b}"
                    )));
                }
                let shifted: Vec<f64> =
                    spectrum.eigenvalues.iter().map(|&l| b * (l - lam0)).collect();
                let z_shift: f64 = shifted.iter().map(|&a| (-a).exp()).sum();
                let weights: Vec<f64> =
                    shifted.iter().map(|&a| (-a).exp() / z_shift).collect();
                let log_z = z_shift.ln() - b * lam0;
                Ok(Self {
                    spectrum,
                    beta,
                    weights,
                    log_z: Some(log_z),
                    shifted,
                    ground_count,
                })
            }
            Beta::Infinite => {
                let mut weights = vec![0.0; dim];
                for w in weights.iter_mut().take(ground_count) {
                    *w = 1.0 / ground_count as f64;
                }
                Ok(Self {
                    spectrum,
                    beta,
                    weights,
                    log_z: None,
                    shifted: Vec::new(),
                    ground_count,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// Free energy per site: −log Z / (β |Λ|) for 0 < β < ∞, the ground
    /// energy per site at β = ∞, and −log(dim) at β = 0.
    pub fn free_energy(&self, n_sites: usize) -> f64 {
        match self.beta {
            Beta::Infinite => self.spectrum.ground_energy() / n_sites as f64,
            Beta::Finite(b) if b == 0.0 => -(self.dim() as f64).ln(),
            Beta::Finite(b) => -self.log_z.unwrap() / (b * n_sites as f64),
        }
    }

    /// Transform an operator into the eigenbasis: Ã = U† A U.
    pub fn transform(&self, a: &CMatrix) -> CMatrix {
        self.spectrum.vectors.adjoint() * a * &self.spectrum.vectors
    }

    /// ⟨A⟩ from an eigenbasis operator: Σ_i w_i Ã_ii.
    pub fn expectation_transformed(&self, a_tilde: &CMatrix) -> C64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| a_tilde[(i, i)] * C64::new(w, 0.0))
            .sum()
    }

    /// ⟨A⟩ = Tr(ρA).
    pub fn expectation(&self, a: &CMatrix) -> C64 {
        // Σ_i w_i ⟨v_i|A|v_i⟩ without forming the full transform
        let mut acc = C64::new(0.0, 0.0);
        for (i, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let v = self.spectrum.vectors.column(i);
            let av = a * v;
            acc += C64::new(w, 0.0) * v.dotc(&av);
        }
        acc
    }

    /// Dense density matrix U diag(w) U†.
    pub fn density_matrix(&self) -> CMatrix {
        let u = &self.spectrum.vectors;
        let mut scaled = u.clone();
        for (i, &w) in self.weights.iter().enumerate() {
            scaled.column_mut(i).scale_mut(w);
        }
        scaled * u.adjoint()
    }

    /// Diagonal of ρ in the original (σ) basis: ρ_σσ = Σ_i w_i |U_σi|².
    pub fn rho_diagonal(&self) -> Vec<f64> {
        let u = &self.spectrum.vectors;
        (0..self.dim())
            .map(|s| {
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| w * u[(s, i)].norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Duhamel inner product (A, B) of eigenbasis operators:
    ///
    /// ```text
    ///   (A, B) = (1/Z) Σ_{ij} conj(Ã_ij) B̃_ij φ(βλ_i, βλ_j),
    ///   φ(a, b) = (e^{−a} − e^{−b})/(b − a).
    /// ```
    ///
    /// At β = ∞ only matrix elements within the ground space survive.
    pub fn duhamel_transformed(&self, a_tilde: &CMatrix, b_tilde: &CMatrix) -> C64 {
        let dim = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        match self.beta {
            Beta::Finite(_) => {
                let z_shift: f64 = self.shifted.iter().map(|&a| (-a).exp()).sum();
                for i in 0..dim {
                    for j in 0..dim {
                        let w = phi(self.shifted[i], self.shifted[j]);
                        if w == 0.0 {
                            continue;
                        }
                        acc += a_tilde[(i, j)].conj() * b_tilde[(i, j)] * C64::new(w, 0.0);
                    }
                }
                acc / C64::new(z_shift, 0.0)
            }
            Beta::Infinite => {
                let g = self.ground_count;
                for i in 0..g {
                    for j in 0..g {
                        acc += a_tilde[(i, j)].conj() * b_tilde[(i, j)];
                    }
                }
                acc / C64::new(g as f64, 0.0)
            }
        }
    }

    /// Duhamel inner product of σ-basis operators.
    pub fn duhamel(&self, a: &CMatrix, b: &CMatrix) -> C64 {
        let a_tilde = self.transform(a);
        let b_tilde = if std::ptr::eq(a, b) {
            a_tilde.clone()
        } else {
            self.transform(b)
        };
        self.duhamel_transformed(&a_tilde, &b_tilde)
    }
}

/// φ(a, b) = (e^{−a} − e^{−b})/(b − a), continued across the diagonal by
/// its series e^{−a}(1 − δ/2 + δ²/6), δ = b − a.
pub fn phi(a: f64, b: f64) -> f64 {
    let delta = b - a;
    if delta.abs() < 1e-8 {
        (-a).exp() * (1.0 - delta / 2.0 + delta * delta / 6.0)
    } else {
        ((-a).exp() - (-b).exp()) / delta
    }
}
