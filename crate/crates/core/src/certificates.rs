//! Closed-form lower-bound certificates for long-range order.
//!
//! No Hilbert space appears in this module: a certificate is a number
//! assembled from momentum sums ([`crate::momentum_sums`]) and a handful
//! of model parameters. A positive value proves that the spin-3
//! structure factor at zero momentum grows like the volume, i.e. that
//! the model orders; a non-positive value proves nothing.
//!
//! Two certificate routes are implemented and played against each other:
//!
//! * [`theorem32_bounds`]: nearest-neighbour couplings normalized to
//!   J⁽³⁾ = 1, producing the pair (bound1, bound2) whose max is the
//!   certificate.
//! * [`theorem31_bound`]: any reflection-positive coupling table, with
//!   an explicit majorant for the transverse energy density e(k).
//!
//! On nearest-neighbour inputs with the majorant α·Σᵢ(1 + r cos kᵢ) the
//! general route reproduces bound1 exactly; tests pin that equality.

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingTable;
use crate::gibbs::Beta;
use crate::lattice::MomentumGrid;
use crate::momentum_sums::{MomentumSums, limit_constants};
use crate::rp::{DEFAULT_PSD_TOL, rp_check};
use crate::{Error, Result};

/// Lattice size: a concrete even torus or the infinite-volume limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ell {
    Finite(usize),
    Limit,
}

impl serde::Serialize for Ell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ell::Finite(l) => serializer.serialize_u64(*l as u64),
            Ell::Limit => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Ell {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Ell;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "an even positive integer or the string \"inf\"")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Ell, E> {
                Ok(Ell::Finite(v as usize))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Ell, E> {
                if v < 0 {
                    return Err(E::custom("lattice side must be positive"));
                }
                Ok(Ell::Finite(v as usize))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Ell, E> {
                match v {
                    "inf" | "infinity" | "limit" => Ok(Ell::Limit),
                    other => Err(E::custom(format!(
                        "invalid lattice side {other:?}; use an even integer or \"inf\""
                    ))),
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Where the transverse energy amplitude α comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaMode {
    /// A measured value, e.g. from exact diagonalization.
    Measured { value: f64 },
    /// Operator-norm worst case (J⁽¹⁾ + |J⁽²⁾|)S².
    WorstCase,
    /// Variational ground-state lower bound; β = ∞ only.
    KuboKishi,
}

/// Inputs for the nearest-neighbour certificate (J⁽³⁾ normalized to 1).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateInput {
    pub d: usize,
    pub two_s: u32,
    pub beta: Beta,
    pub j1: f64,
    pub j2: f64,
    pub alpha_mode: AlphaMode,
    pub ell: Ell,
}

/// The evaluated certificate with its inputs echoed.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub d: usize,
    pub two_s: u32,
    pub beta: Beta,
    pub ell: Ell,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j2: Option<f64>,
    /// The α actually used, when the certificate involves one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub bound1: Option<f64>,
    pub bound2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound2_skipped: Option<String>,
    pub lro_proven: bool,
    /// Whether the dimension-wide positivity condition holds at this
    /// ratio (infinite-volume integrals; `None` when unavailable).
    pub condition39: Option<bool>,
    pub kk_bound_used: bool,
    /// Error bound carried by infinite-volume integrals, when used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_error_bound: Option<f64>,
}

impl CertificateReport {
    /// The certified lower bound: the larger of the two bounds.
    pub fn best_bound(&self) -> Option<f64> {
        match (self.bound1, self.bound2) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }
}

/// Variational lower bound on the ground-state transverse amplitude α
/// as a function of ratio = −J⁽²⁾/J⁽¹⁾ ∈ [0,1]: α(∞) ≥ ¼/(2 − ratio).
pub fn kk_alpha_bound(ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::Parameter(format!(
            "ratio must lie in [0,1], got {ratio}"
        )));
    }
    Ok(0.25 / (2.0 - ratio))
}

/// Outcome of the dimension-wide positivity condition
/// 1 + ratio < (4/3)S(S+1)/(I⁽ᵈ⁾Ĩ⁽ᵈ⁾).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Condition39 {
    pub holds: bool,
    /// Critical ratio (4/3)S(S+1)/(I⁽ᵈ⁾Ĩ⁽ᵈ⁾) − 1, clamped to [0,1].
    pub threshold: f64,
    /// The right-hand side (4/3)S(S+1)/(I⁽ᵈ⁾Ĩ⁽ᵈ⁾).
    pub rhs: f64,
}

pub fn condition39(d: usize, two_s: u32, ratio: f64) -> Result<Condition39> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::Parameter(format!(
            "ratio must lie in [0,1], got {ratio}"
        )));
    }
    if two_s == 0 {
        return Err(Error::Parameter("spin must be positive".into()));
    }
    let c = limit_constants(d)?;
    let s = two_s as f64 / 2.0;
    let rhs = (4.0 / 3.0) * s * (s + 1.0) / (c.i.value * c.i_tilde.value);
    Ok(Condition39 {
        holds: 1.0 + ratio < rhs,
        threshold: (rhs - 1.0).clamp(0.0, 1.0),
        rhs,
    })
}

fn beta_penalty(beta: Beta, sum: f64) -> Result<f64> {
    match beta {
        Beta::Infinite => Ok(0.0),
        Beta::Finite(b) if b > 0.0 => Ok(sum / (2.0 * b)),
        Beta::Finite(b) => Err(Error::Parameter(format!(
            "certificates need beta > 0 or beta = inf, got {b}"
        ))),
    }
}

/// The pair of nearest-neighbour lower bounds at J⁽³⁾ = 1.
pub fn theorem32_bounds(input: &CertificateInput) -> Result<CertificateReport> {
    let CertificateInput {
        d,
        two_s,
        beta,
        j1,
        j2,
        alpha_mode,
        ell,
    } = *input;
    if d == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    if two_s == 0 {
        return Err(Error::Parameter("spin must be positive".into()));
    }
    if !(j2 <= 0.0 && -j2 <= j1 && j1 <= 1.0) {
        return Err(Error::Config(format!(
            "couplings must satisfy 1 = J3 >= J1 >= -J2 >= 0, got J1 = {j1}, J2 = {j2}"
        )));
    }
    let s = two_s as f64 / 2.0;
    let ratio = if j1 > 0.0 { Some(-j2 / j1) } else { None };
    let alpha = match alpha_mode {
        AlphaMode::Measured { value } => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Parameter(format!(
                    "measured alpha must be finite and non-negative, got {value}"
                )));
            }
            value
        }
        AlphaMode::WorstCase => (j1 + j2.abs()) * s * s,
        AlphaMode::KuboKishi => {
            if !beta.is_infinite() {
                return Err(Error::Config(
                    "the variational alpha bound concerns the ground state; use beta = inf"
                        .into(),
                ));
            }
            let r = ratio.ok_or_else(|| {
                Error::Config("the variational alpha bound needs J1 > 0".into())
            })?;
            kk_alpha_bound(r)?
        }
    };

    // momentum sums: exact at finite ℓ, extrapolated at ℓ = ∞
    let (i_sum, i_tilde, pi_allowance, inv, invc, integral_error) = match ell {
        Ell::Finite(l) => {
            let ms = MomentumSums::compute(d, l)?;
            let vol = (l as f64).powi(d as i32);
            (
                ms.i_ell,
                ms.i_tilde_ell,
                std::f64::consts::SQRT_2 / vol,
                ms.sum_inv_eps,
                ms.sum_inv_eps_cosplus,
                None,
            )
        }
        Ell::Limit => {
            let c = limit_constants(d)?;
            let (inv, invc, mut err) = match beta {
                Beta::Infinite => (0.0, 0.0, 0.0),
                Beta::Finite(_) => {
                    let (a, b) = match (c.inv_eps, c.inv_eps_cosplus) {
                        (Some(a), Some(b)) => (a, b),
                        _ => {
                            return Err(Error::Domain(
                                "the 1/β penalty diverges as ℓ → ∞ for d = 2; \
                                 use beta = inf or a finite lattice"
                                    .into(),
                            ));
                        }
                    };
                    (a.value, b.value, a.error.max(b.error))
                }
            };
            err = err.max(c.i.error).max(c.i_tilde.error);
            (c.i.value, c.i_tilde.value, 0.0, inv, invc, Some(err))
        }
    };

    let bound1 =
        s * (s + 1.0) / 3.0 - 0.5 * (i_sum + pi_allowance) * alpha.sqrt() - beta_penalty(beta, inv)?;
    let (bound2, bound2_skipped) = if j1 > 0.0 {
        let denom = 1.0 - j2 / j1; // = 1 + ratio ≥ 1
        let b2 = alpha.sqrt() * (alpha.sqrt() / denom - 0.5 * i_tilde)
            - beta_penalty(beta, invc)?;
        (Some(b2), None)
    } else {
        (
            None,
            Some("transverse coupling J1 = 0 leaves the ratio J2/J1 undefined".to_string()),
        )
    };

    let condition = ratio.and_then(|r| condition39(d, two_s, r).ok().map(|c| c.holds));
    let lro_proven = bound1 > 0.0 || bound2.is_some_and(|b| b > 0.0);
    Ok(CertificateReport {
        d,
        two_s,
        beta,
        ell,
        j1: Some(j1),
        j2: Some(j2),
        alpha: Some(alpha),
        bound1: Some(bound1),
        bound2,
        bound2_skipped,
        lro_proven,
        condition39: condition,
        kk_bound_used: matches!(alpha_mode, AlphaMode::KuboKishi),
        integral_error_bound: integral_error,
    })
}

/// A majorant for the transverse energy density e(k).
#[derive(Debug, Clone)]
pub enum EBound {
    /// (S²/2) Σ_x (|J⁽¹⁾_per(x)| + |J⁽²⁾_per(x)|)(1 + |cos k·x|),
    /// from bounding every correlation by the operator norm S.
    WorstCase,
    /// Explicit values, one per nonzero momentum in lexicographic order.
    PerMomentum(Vec<f64>),
    /// Nearest-neighbour form α Σᵢ(1 + r cos kᵢ); the k = π term is
    /// replaced by the √2/ℓ^d allowance so this route matches the
    /// nearest-neighbour certificate identically.
    NnAlpha { alpha: f64, r: f64 },
}

/// The general-coupling certificate: reflection-positive table, any
/// admissible e(k) majorant, finite lattice only.
pub fn theorem31_bound(
    table: &CouplingTable,
    two_s: u32,
    beta: Beta,
    e_bound: &EBound,
) -> Result<CertificateReport> {
    if two_s == 0 {
        return Err(Error::Parameter("spin must be positive".into()));
    }
    let rp = rp_check(table, DEFAULT_PSD_TOL);
    if !rp.pass {
        return Err(Error::Config(
            "coupling kernels are not reflection positive on every plane; \
             the certificate hypotheses fail"
                .into(),
        ));
    }
    let torus = &table.torus;
    let d = torus.dimension();
    let ell = torus.side();
    let vol = torus.n_sites() as f64;
    let s = two_s as f64 / 2.0;
    let grid = MomentumGrid::new(torus);
    let trig = table.trig();

    let j3_scale = (0..torus.n_sites())
        .map(|r| table.j_per(2, r).abs())
        .sum::<f64>()
        .max(1.0);
    let mut dispersions = Vec::new();
    for k in grid.iter_nonzero() {
        let eps = table.epsilon_k(k);
        if eps <= 1e-12 * j3_scale {
            return Err(Error::DegenerateCouplings(format!(
                "dispersion vanishes at nonzero momentum {:?}",
                k.m
            )));
        }
        dispersions.push(eps);
    }

    if let EBound::PerMomentum(values) = e_bound {
        if values.len() != dispersions.len() {
            return Err(Error::Parameter(format!(
                "e_bound has {} entries for {} nonzero momenta",
                values.len(),
                dispersions.len()
            )));
        }
        if values.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::Parameter(
                "e_bound entries must be finite and non-negative".into(),
            ));
        }
    }
    if let EBound::NnAlpha { alpha, r } = e_bound {
        if !(alpha.is_finite() && *alpha >= 0.0) {
            return Err(Error::Parameter(format!(
                "alpha must be finite and non-negative, got {alpha}"
            )));
        }
        if !(-1.0..=1.0).contains(r) {
            return Err(Error::Parameter(format!("r must lie in [−1,1], got {r}")));
        }
    }

    let mut sqrt_sum = 0.0;
    let mut alpha_used = None;
    for (idx, k) in grid.iter_nonzero().enumerate() {
        let eps = dispersions[idx];
        let e_k = match e_bound {
            EBound::WorstCase => {
                let mut total = 0.0;
                for x in 0..torus.n_sites() {
                    let weight = table.j_per(0, x).abs() + table.j_per(1, x).abs();
                    if weight != 0.0 {
                        total += weight * (1.0 + trig.cos(k.phase(&torus.site(x))).abs());
                    }
                }
                0.5 * s * s * total
            }
            EBound::PerMomentum(values) => values[idx],
            EBound::NnAlpha { alpha, r } => {
                alpha_used = Some(*alpha);
                if k.is_pi(ell) {
                    continue; // replaced by the √2/ℓ^d allowance below
                }
                let c: f64 = k.m.iter().map(|&mi| trig.cos(mi)).sum();
                (alpha * (d as f64 + r * c)).max(0.0)
            }
        };
        sqrt_sum += (e_k / (2.0 * eps)).sqrt();
    }
    sqrt_sum /= vol;
    if let EBound::NnAlpha { alpha, .. } = e_bound {
        sqrt_sum += 0.5 * alpha.sqrt() * std::f64::consts::SQRT_2 / vol;
    }

    let inv_sum = dispersions.iter().map(|&e| 1.0 / e).sum::<f64>() / vol;
    let bound = s * (s + 1.0) / 3.0 - sqrt_sum - beta_penalty(beta, inv_sum)?;
    Ok(CertificateReport {
        d,
        two_s,
        beta,
        ell: Ell::Finite(ell),
        j1: None,
        j2: None,
        alpha: alpha_used,
        bound1: Some(bound),
        bound2: None,
        bound2_skipped: None,
        lro_proven: bound > 0.0,
        condition39: None,
        kk_bound_used: false,
        integral_error_bound: None,
    })
}

/// Largest ratio in [0,1] for which `f` stays positive, assuming `f`
/// starts positive and crosses zero at most once (bisection to `tol`).
pub fn critical_ratio<F>(mut f: F, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    if f(1.0)? > 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One grid point of a certificate scan; J⁽¹⁾ = 1 and J⁽²⁾ = −ratio.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanPoint {
    pub d: usize,
    pub two_s: u32,
    pub ratio: f64,
    pub beta: Beta,
}

/// A scan row: the certificate, or the error that point produced.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub point: ScanPoint,
    pub report: std::result::Result<CertificateReport, String>,
}

/// Evaluate the nearest-neighbour certificate over a grid of points,
/// collecting per-point failures instead of aborting the scan.
pub fn scan(points: &[ScanPoint], alpha_mode: AlphaMode, ell: Ell) -> Vec<ScanRow> {
    points
        .iter()
        .map(|p| {
            let input = CertificateInput {
                d: p.d,
                two_s: p.two_s,
                beta: p.beta,
                j1: 1.0,
                j2: -p.ratio,
                alpha_mode,
                ell,
            };
            ScanRow {
                point: *p,
                report: theorem32_bounds(&input).map_err(|e| e.to_string()),
            }
        })
        .collect()
}
