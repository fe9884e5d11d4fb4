//! Momentum-space lattice sums and their infinite-volume limits.
//!
//! Everything here is a deterministic sum over the dual torus for the
//! nearest-neighbour dispersion ε(k) = 2Σᵢ(1 − cos kᵢ), normalized by
//! the volume ℓ^d. Writing C = Σᵢ cos kᵢ, the shifted dispersion is
//! ε(k+π) = 2(d + C), so every summand is a function of C alone:
//!
//! * I_ℓ: Σ over k ∉ {0, π} of √((d+C)/(d−C)); the k = π term (which
//!   vanishes at r = 1) is left out and the certificates account for it
//!   by the separate √2/ℓ^d allowance.
//! * Ĩ_ℓ: Σ over k ≠ 0 of the same ratio weighted by (C/d)₊.
//! * Σ 1/ε and its (C/d)₊-weighted variant, the 1/β penalty terms.
//!
//! Infinite-volume limits use midpoint sums on half-cell-offset grids
//! (no grid point ever hits the k = 0 singularity) with Richardson
//! extrapolation whose order matches the singularity class.

use std::sync::OnceLock;

use crate::lattice::{MomentumGrid, Torus, TrigTable};
use crate::{Error, Result};

/// The finite-ℓ sums entering the closed-form certificates.
#[derive(Debug, Clone)]
pub struct MomentumSums {
    pub d: usize,
    pub ell: usize,
    /// (1/ℓ^d) Σ_{k≠0} 1/ε(k).
    pub sum_inv_eps: f64,
    /// (1/ℓ^d) Σ_{k≠0} (d⁻¹Σcos kᵢ)₊ / ε(k).
    pub sum_inv_eps_cosplus: f64,
    /// (1/ℓ^d) Σ_{k∉{0,π}} √(ε(k+π)/ε(k)).
    pub i_ell: f64,
    /// (1/ℓ^d) Σ_{k≠0} √(ε(k+π)/ε(k)) (d⁻¹Σcos kᵢ)₊.
    pub i_tilde_ell: f64,
    /// (Σᵢ cos kᵢ, k = π) per nonzero momentum, lexicographic.
    cos_sums: Vec<(f64, bool)>,
}

impl MomentumSums {
    pub fn compute(d: usize, ell: usize) -> Result<Self> {
        let torus = Torus::new(d, ell)?;
        let trig = TrigTable::new(ell);
        let grid = MomentumGrid::new(&torus);
        let cos_sums: Vec<(f64, bool)> = grid
            .iter_nonzero()
            .map(|k| {
                let c: f64 = k.m.iter().map(|&mi| trig.cos(mi)).sum();
                (c, k.is_pi(ell))
            })
            .collect();
        let vol = torus.n_sites() as f64;
        let df = d as f64;
        let mut sum_inv_eps = 0.0;
        let mut sum_inv_eps_cosplus = 0.0;
        for &(c, _) in &cos_sums {
            let inv = 1.0 / (2.0 * (df - c));
            sum_inv_eps += inv;
            sum_inv_eps_cosplus += (c / df).max(0.0) * inv;
        }
        let mut sums = Self {
            d,
            ell,
            sum_inv_eps: sum_inv_eps / vol,
            sum_inv_eps_cosplus: sum_inv_eps_cosplus / vol,
            i_ell: 0.0,
            i_tilde_ell: 0.0,
            cos_sums,
        };
        sums.i_ell = sums.i_r(1.0);
        sums.i_tilde_ell = sums.i_tilde_r(1.0);
        Ok(sums)
    }

    /// I_ℓ(r) = (1/ℓ^d) Σ_{k∉{0,π}} √((d + rΣcos kᵢ)/(d − Σcos kᵢ)).
    pub fn i_r(&self, r: f64) -> f64 {
        let df = self.d as f64;
        let total: f64 = self
            .cos_sums
            .iter()
            .filter(|&&(_, is_pi)| !is_pi)
            .map(|&(c, _)| ((df + r * c).max(0.0) / (df - c)).sqrt())
            .sum();
        total / (self.ell as f64).powi(self.d as i32)
    }

    /// Ĩ_ℓ(r): as [`Self::i_r`] but over k ≠ 0 with weight (d⁻¹Σcos kᵢ)₊.
    pub fn i_tilde_r(&self, r: f64) -> f64 {
        let df = self.d as f64;
        let total: f64 = self
            .cos_sums
            .iter()
            .map(|&(c, _)| ((df + r * c).max(0.0) / (df - c)).sqrt() * (c / df).max(0.0))
            .sum();
        total / (self.ell as f64).powi(self.d as i32)
    }
}

/// An extrapolated value with an error estimate that is designed to
/// bracket the true limit (observed ratios, doubled for safety).
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct RawSums {
    i: f64,
    i_tilde: f64,
    inv: f64,
    invc: f64,
}

/// Midpoint sums over the half-cell-offset grid kᵢ = (2π/n)(mᵢ + ½).
fn midpoint_sums(d: usize, n: usize) -> RawSums {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let cos_axis: Vec<f64> = (0..n).map(|m| (step * (m as f64 + 0.5)).cos()).collect();
    let df = d as f64;
    let mut total = RawSums::default();
    // odometer over the outer d−1 digits; the innermost axis is a tight loop
    let outer = d - 1;
    let mut idx = vec![0usize; outer];
    loop {
        let c_prefix: f64 = idx.iter().map(|&i| cos_axis[i]).sum();
        let mut row = RawSums::default();
        for &ci in &cos_axis {
            let c = c_prefix + ci;
            let ratio = ((df + c) / (df - c)).sqrt();
            let w = (c / df).max(0.0);
            let inv = 1.0 / (2.0 * (df - c));
            row.i += ratio;
            row.i_tilde += ratio * w;
            row.inv += inv;
            row.invc += w * inv;
        }
        total.i += row.i;
        total.i_tilde += row.i_tilde;
        total.inv += row.inv;
        total.invc += row.invc;
        // advance the odometer
        let mut pos = outer;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    let vol = (n as f64).powi(d as i32);
    RawSums {
        i: total.i / vol,
        i_tilde: total.i_tilde / vol,
        inv: total.inv / vol,
        invc: total.invc / vol,
    }
}

/// One generic-ratio Richardson pass of order p on consecutive pairs.
fn richardson(seq: &[(f64, f64)], p: i32) -> Vec<(f64, f64)> {
    seq.windows(2)
        .map(|w| {
            let (n1, v1) = w[0];
            let (n2, v2) = w[1];
            let rp = (n2 / n1).powi(p);
            (n2, (rp * v2 - v1) / (rp - 1.0))
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Ladder {
    /// First-order pass over consecutive pairs, then a second-order
    /// pass on the result (leading error ~ 1/n, next ~ 1/n²).
    P1ThenP2,
    /// Single second-order pass, last value (leading error ~ 1/n²).
    P2Last,
}

fn extrapolate(raw: &[(f64, f64)], ladder: Ladder) -> Estimate {
    let (value, prev) = match ladder {
        Ladder::P1ThenP2 => {
            let r1 = richardson(raw, 1);
            let r2 = richardson(&r1, 2);
            (r2.last().unwrap().1, r1.last().unwrap().1)
        }
        Ladder::P2Last => {
            let r2 = richardson(raw, 2);
            (r2.last().unwrap().1, raw.last().unwrap().1)
        }
    };
    Estimate {
        value,
        error: 2.0 * (value - prev).abs(),
    }
}

fn ladder_grids(d: usize) -> &'static [usize] {
    match d {
        2 => &[64, 128, 256, 512],
        3 => &[32, 64, 128],
        4 => &[16, 24, 48],
        _ => unreachable!("grids exist only for d in 2..=4"),
    }
}

fn raw_ladder(d: usize) -> &'static [(f64, RawSums)] {
    static CACHE: [OnceLock<Vec<(f64, RawSums)>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[d - 2].get_or_init(|| {
        ladder_grids(d)
            .iter()
            .map(|&n| (n as f64, midpoint_sums(d, n)))
            .collect()
    })
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 1 {
        return Err(Error::Domain(
            "the k = 0 singularity is not integrable in one dimension; \
             refusing to extrapolate a divergent limit"
                .into(),
        ));
    }
    if !(2..=4).contains(&d) {
        return Err(Error::Parameter(format!(
            "infinite-volume integrals are tabulated for d in 2..=4, got {d}"
        )));
    }
    Ok(())
}

/// Infinite-volume limits (I⁽ᵈ⁾, Ĩ⁽ᵈ⁾) for d ∈ {2,3,4}, with error
/// estimates; errors above `target_tol` are reported as a convergence
/// failure rather than returned silently.
pub fn limit_integrals(d: usize, target_tol: f64) -> Result<(Estimate, Estimate)> {
    check_dimension(d)?;
    let raw = raw_ladder(d);
    let sqrt_ladder = if d == 2 { Ladder::P1ThenP2 } else { Ladder::P2Last };
    let seq = |f: fn(&RawSums) -> f64| -> Vec<(f64, f64)> {
        raw.iter().map(|&(n, ref s)| (n, f(s))).collect()
    };
    let i = extrapolate(&seq(|s| s.i), sqrt_ladder);
    let i_tilde = extrapolate(&seq(|s| s.i_tilde), sqrt_ladder);
    for (name, est) in [("I", &i), ("I_tilde", &i_tilde)] {
        if est.error > target_tol {
            return Err(Error::Convergence(format!(
                "{name} limit at d = {d}: error estimate {:.3e} exceeds target {:.3e} \
                 (value {:.9})",
                est.error, target_tol, est.value
            )));
        }
    }
    Ok((i, i_tilde))
}

/// Infinite-volume limits of (1/ℓ^d)Σ1/ε and its (·)₊-weighted variant,
/// for d ∈ {3,4}. These diverge as ℓ → ∞ for d ≤ 2.
pub fn limit_inverse_sums(d: usize, target_tol: f64) -> Result<(Estimate, Estimate)> {
    check_dimension(d)?;
    if d == 2 {
        return Err(Error::Domain(
            "(1/ℓ²)Σ 1/ε(k) diverges as ℓ → ∞ in two dimensions; \
             finite-β certificates need d ≥ 3"
                .into(),
        ));
    }
    let raw = raw_ladder(d);
    let ladder = if d == 3 { Ladder::P1ThenP2 } else { Ladder::P2Last };
    let seq = |f: fn(&RawSums) -> f64| -> Vec<(f64, f64)> {
        raw.iter().map(|&(n, ref s)| (n, f(s))).collect()
    };
    let inv = extrapolate(&seq(|s| s.inv), ladder);
    let invc = extrapolate(&seq(|s| s.invc), ladder);
    for (name, est) in [("inv_eps", &inv), ("inv_eps_cosplus", &invc)] {
        if est.error > target_tol {
            return Err(Error::Convergence(format!(
                "{name} limit at d = {d}: error estimate {:.3e} exceeds target {:.3e}",
                est.error, target_tol
            )));
        }
    }
    Ok((inv, invc))
}

/// All four limits for a dimension, computed once per process; the
/// inverse sums are `None` for d = 2 where they diverge.
#[derive(Debug, Clone, Copy)]
pub struct LimitConstants {
    pub i: Estimate,
    pub i_tilde: Estimate,
    pub inv_eps: Option<Estimate>,
    pub inv_eps_cosplus: Option<Estimate>,
}

pub fn limit_constants(d: usize) -> Result<&'static LimitConstants> {
    check_dimension(d)?;
    static CACHE: [OnceLock<LimitConstants>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    Ok(CACHE[d - 2].get_or_init(|| {
        let (i, i_tilde) = limit_integrals(d, 1e-3).expect("dimension already validated");
        let (inv_eps, inv_eps_cosplus) = if d == 2 {
            (None, None)
        } else {
            let (a, b) = limit_inverse_sums(d, 1e-3).expect("dimension already validated");
            (Some(a), Some(b))
        };
        LimitConstants {
            i,
            i_tilde,
            inv_eps,
            inv_eps_cosplus,
        }
    }))
}
