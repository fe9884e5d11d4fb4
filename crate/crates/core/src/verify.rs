//! Inequality and identity verification.
//!
//! Each function checks one rigorous fact about a finite spin system —
//! an infrared bound, a convexity or transfer inequality, a reflection
//! or rotation identity — and reports the worst margin observed. The
//! margin is the slack of the inequality (negative = violated); for
//! identities it is minus the observed deviation. Verdicts use absolute
//! tolerances; defaults follow the contracts of the calling suites.
//!
//! Throughout, K = βH: Duhamel products, commutators with K, and the
//! transfer function all refer to the temperature-scaled generator.

use crate::couplings::CouplingTable;
use crate::gibbs::{Beta, GibbsState, Spectrum};
use crate::hamiltonian::{
    Field, SpinSystem, build_hamiltonian, build_hamiltonian_with_axis, laplacian_field,
};
use crate::lattice::{Momentum, MomentumGrid, Torus};
use crate::observables::{ObservableContext, double_commutator};
use crate::report::CheckResult;
use crate::spin::SpinOperators;
use crate::{C64, CMatrix, Error, Result};

/// Default slack for inequality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Transfer function Φ(s) = √s · coth(1/√s) for s ≥ 0, with the series
/// value s + 1/3 once 1/√s < 1e−8. Satisfies √s ≤ Φ(s) ≤ √s + s.
pub fn transfer_function(s: f64) -> f64 {
    assert!(s >= 0.0, "transfer function requires s >= 0, got {s}");
    let root = s.sqrt();
    let x = 1.0 / root;
    if x < 1e-8 {
        s + 1.0 / 3.0
    } else {
        root / x.tanh()
    }
}

/// ⟨A†A + AA†⟩ for an eigenbasis operator.
fn symmetrized_square(state: &GibbsState, a_tilde: &CMatrix) -> f64 {
    let dim = state.dim();
    let mut acc = 0.0;
    for i in 0..dim {
        let w = state.weights[i];
        if w == 0.0 {
            continue;
        }
        for j in 0..dim {
            acc += w * (a_tilde[(j, i)].norm_sqr() + a_tilde[(i, j)].norm_sqr());
        }
    }
    acc
}

/// The three quantities of the transfer inequality for A (eigenbasis):
/// sym = ⟨A†A + AA†⟩, duh = (A, A), dc = ⟨[A†, [K, A]]⟩.
/// `None` at β = ∞, where K is undefined.
pub struct FbQuantities {
    pub sym: f64,
    pub duh: f64,
    pub dc: f64,
}

pub fn fb_quantities(state: &GibbsState, a_tilde: &CMatrix) -> Option<FbQuantities> {
    let dc = double_commutator(state, a_tilde)?;
    Some(FbQuantities {
        sym: symmetrized_square(state, a_tilde),
        duh: state.duhamel_transformed(a_tilde, a_tilde).re,
        dc,
    })
}

/// 2⟨A†A+AA†⟩/D ≤ Φ(4(A,A)/D) with D = ⟨[A†,[K,A]]⟩; skipped when D is
/// degenerate (≤ 1e−10) or β = ∞.
pub fn verify_falk_bruch(state: &GibbsState, a_tilde: &CMatrix, tol: f64) -> CheckResult {
    let check = CheckResult::new(
        "falk_bruch",
        "2<A*A+AA*>/D <= Phi(4(A,A)/D) with D = <[A*,[K,A]]>, K = beta H",
    );
    let Some(q) = fb_quantities(state, a_tilde) else {
        return check.skip("beta infinite: commutator with K = beta H undefined");
    };
    if q.dc <= 1e-10 {
        return check
            .param("denominator", format!("{:.3e}", q.dc))
            .skip("double-commutator denominator not above 1e-10");
    }
    let lhs = 2.0 * q.sym / q.dc;
    let rhs = transfer_function(4.0 * q.duh / q.dc);
    check
        .param("lhs", format!("{:.12e}", lhs))
        .param("rhs", format!("{:.12e}", rhs))
        .with_margin(rhs - lhs, tol)
}

/// ½⟨A†A+AA†⟩ ≤ ½√((A,A)·D) + (A,A): the surrogate of the transfer
/// inequality actually used by the momentum-space bounds.
pub fn verify_fb_corollary(state: &GibbsState, a_tilde: &CMatrix, tol: f64) -> CheckResult {
    let check = CheckResult::new(
        "fb_corollary",
        "(1/2)<A*A+AA*> <= (1/2)sqrt((A,A) <[A*,[K,A]]>) + (A,A)",
    );
    let Some(q) = fb_quantities(state, a_tilde) else {
        return check.skip("beta infinite: commutator with K = beta H undefined");
    };
    let lhs = 0.5 * q.sym;
    let rhs = 0.5 * (q.duh * q.dc.max(0.0)).sqrt() + q.duh;
    check.with_margin(rhs - lhs, tol)
}

/// |⟨[B,A†]⟩|² ≤ ½⟨A†A+AA†⟩ · ⟨[[B,K],B†]⟩ for eigenbasis A, B.
pub fn verify_bogolubov(
    state: &GibbsState,
    a_tilde: &CMatrix,
    b_tilde: &CMatrix,
    tol: f64,
) -> CheckResult {
    let check = CheckResult::new(
        "bogolubov",
        "|<[B,A*]>|^2 <= (1/2)<A*A+AA*> <[[B,K],B*]>",
    );
    // ⟨[[B,K],B†]⟩ equals the double commutator of B by operator algebra
    let Some(dcb) = double_commutator(state, b_tilde) else {
        return check.skip("beta infinite: commutator with K = beta H undefined");
    };
    let comm = b_tilde * a_tilde.adjoint() - a_tilde.adjoint() * b_tilde;
    let expect = state.expectation_transformed(&comm);
    let lhs = expect.norm_sqr();
    let rhs = 0.5 * symmetrized_square(state, a_tilde) * dcb.max(0.0);
    check
        .param("lhs", format!("{:.12e}", lhs))
        .with_margin(rhs - lhs, tol)
}

/// (A,A) ≤ ½⟨A†A+AA†⟩, with equality forced when [A,H] = 0 within
/// 1e−12 of the operator scale. Returns the inequality check and, when
/// the commutation premise holds, the equality check.
pub fn verify_duhamel_upper(
    state: &GibbsState,
    a_tilde: &CMatrix,
    tol: f64,
) -> Vec<CheckResult> {
    let sym = symmetrized_square(state, a_tilde);
    let duh = state.duhamel_transformed(a_tilde, a_tilde).re;
    let diff = 0.5 * sym - duh;
    let mut out = vec![
        CheckResult::new("duhamel_upper", "(A,A) <= (1/2)<A*A+AA*>").with_margin(diff, tol),
    ];
    // ‖[A,H]‖_max in the eigenbasis is max |A_ij (λ_j − λ_i)|
    let lam = &state.spectrum.eigenvalues;
    let mut comm_norm = 0.0f64;
    let mut op_scale = 0.0f64;
    for i in 0..state.dim() {
        for j in 0..state.dim() {
            comm_norm = comm_norm.max((a_tilde[(i, j)] * (lam[j] - lam[i])).norm());
            op_scale = op_scale.max(a_tilde[(i, j)].norm());
        }
    }
    let width = state.spectrum.width().max(1.0);
    if comm_norm <= 1e-12 * op_scale.max(1.0) * width {
        out.push(
            CheckResult::new(
                "duhamel_upper_equality",
                "(A,A) = (1/2)<A*A+AA*> when [A,H] = 0",
            )
            .with_margin(-diff.abs(), tol),
        );
    }
    out
}

/// The axis sign chain J⁽³⁾(x) ≥ J⁽¹⁾(x) ≥ −J⁽²⁾(x) ≥ 0 on every
/// periodized entry; violated → configuration error.
pub fn check_sign_assumptions(table: &CouplingTable) -> Result<()> {
    let scale = (0..3)
        .flat_map(|a| table.axes[a].values.iter())
        .fold(1.0f64, |m, &v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    for r in 0..table.torus.n_sites() {
        let (j1, j2, j3) = (table.j_per(0, r), table.j_per(1, r), table.j_per(2, r));
        let ok = j3 >= j1 - slack && j1 >= -j2 - slack && -j2 >= -slack;
        if !ok {
            return Err(Error::Config(format!(
                "coupling sign chain J3 >= J1 >= -J2 >= 0 fails at site rank {r}: \
                 J1 = {j1:.6e}, J2 = {j2:.6e}, J3 = {j3:.6e}"
            )));
        }
    }
    Ok(())
}

fn ensure_zero_field(field: &Field) -> Result<()> {
    let zero = match field {
        Field::Uniform(h) => *h == 0.0,
        Field::PerSite(v) => v.iter().all(|&h| h == 0.0),
    };
    if zero {
        Ok(())
    } else {
        Err(Error::Config(
            "this bound requires a vanishing external field".into(),
        ))
    }
}

/// All nonzero momenta with their dispersions, erroring if ε(k) = 0
/// anywhere it must not be.
fn nonzero_momenta(table: &CouplingTable) -> Result<Vec<(Momentum, f64)>> {
    let grid = MomentumGrid::new(&table.torus);
    let scale = table
        .axes[2]
        .values
        .iter()
        .fold(1.0f64, |m, &v| m.max(v.abs()));
    let mut out = Vec::new();
    for k in grid.iter_nonzero() {
        let eps = table.epsilon_k(k);
        if eps <= 1e-12 * scale {
            return Err(Error::Config(format!(
                "dispersion vanishes at nonzero momentum {:?}: axis-3 couplings degenerate",
                k.m
            )));
        }
        out.push((k.clone(), eps));
    }
    Ok(out)
}

/// Infrared bound on the Duhamel susceptibility:
/// η̂(k) ≤ 1/(2βε(k)) for every k ≠ 0. Requires h = 0 and finite β > 0.
pub fn verify_irb_duhamel(
    ctx: &ObservableContext,
    field: &Field,
    tol: f64,
) -> Result<CheckResult> {
    let check = CheckResult::new("irb_duhamel", "eta_hat(k) <= 1/(2 beta eps(k)) for k != 0");
    ensure_zero_field(field)?;
    check_sign_assumptions(ctx.table)?;
    let beta = match ctx.state.beta {
        Beta::Finite(b) if b > 0.0 => b,
        Beta::Finite(_) => return Ok(check.skip("beta = 0: the bound is vacuous")),
        Beta::Infinite => {
            return Ok(check.skip("beta infinite: the right-hand side degenerates to 0"));
        }
    };
    let momenta = nonzero_momenta(ctx.table)?;
    let mut worst: Option<(f64, Vec<i64>)> = None;
    for (k, eps) in &momenta {
        let margin = 1.0 / (2.0 * beta * eps) - ctx.eta_hat(k);
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            worst = Some((margin, k.m.clone()));
        }
    }
    let (margin, k) = worst.expect("even torus has nonzero momenta");
    Ok(check
        .param("momenta_checked", momenta.len())
        .param("worst_k", format!("{k:?}"))
        .with_margin(margin, tol))
}

/// Infrared bound on the symmetrized correlation:
/// corr_hat(k) ≤ √(e(k)/2ε(k)) + 1/(2βε(k)) for every k ≠ 0.
/// At β = ∞ the 1/β term is dropped (the limiting statement).
pub fn verify_irb_corr(
    ctx: &ObservableContext,
    field: &Field,
    tol: f64,
) -> Result<CheckResult> {
    let check = CheckResult::new(
        "irb_corr",
        "corr_hat(k) <= sqrt(e(k)/(2 eps(k))) + 1/(2 beta eps(k)) for k != 0",
    );
    ensure_zero_field(field)?;
    check_sign_assumptions(ctx.table)?;
    let inv_beta_term = |eps: f64| match ctx.state.beta {
        Beta::Finite(b) if b > 0.0 => Some(1.0 / (2.0 * b * eps)),
        Beta::Finite(_) => None,
        Beta::Infinite => Some(0.0),
    };
    if inv_beta_term(1.0).is_none() {
        return Ok(check.skip("beta = 0: the bound is vacuous"));
    }
    let momenta = nonzero_momenta(ctx.table)?;
    let corr = ctx.correlations();
    let mut worst: Option<(f64, Vec<i64>)> = None;
    for (k, eps) in &momenta {
        let e = ctx.e_of_k(k, &corr).max(0.0);
        let bound = (e / (2.0 * eps)).sqrt() + inv_beta_term(*eps).unwrap();
        let margin = bound - ctx.corr_hat(k);
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            worst = Some((margin, k.m.clone()));
        }
    }
    let (margin, k) = worst.expect("even torus has nonzero momenta");
    Ok(check
        .param("momenta_checked", momenta.len())
        .param("worst_k", format!("{k:?}"))
        .with_margin(margin, tol))
}

/// |⟨S₀⁽²⁾S_x⁽²⁾⟩| ≤ ⟨S₀⁽¹⁾S_x⁽¹⁾⟩ for all x, valid at any field
/// provided |J⁽²⁾(x)| ≤ J⁽¹⁾(x) pointwise.
pub fn verify_corr_ineq(ctx: &ObservableContext, tol: f64) -> Result<CheckResult> {
    let table = ctx.table;
    let scale = (0..2)
        .flat_map(|a| table.axes[a].values.iter())
        .fold(1.0f64, |m, &v| m.max(v.abs()));
    for r in 0..table.torus.n_sites() {
        if table.j_per(1, r).abs() > table.j_per(0, r) + 1e-12 * scale {
            return Err(Error::Config(format!(
                "requires |J2(x)| <= J1(x) for all x; fails at site rank {r}"
            )));
        }
    }
    let corr = ctx.correlations();
    let mut worst: Option<(f64, usize)> = None;
    for x in 0..ctx.n_sites() {
        let margin = corr.get(0, x) - corr.get(1, x).abs();
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            worst = Some((margin, x));
        }
    }
    let (margin, x) = worst.unwrap();
    Ok(CheckResult::new(
        "corr_ineq",
        "|<S0^2 Sx^2>| <= <S0^1 Sx^1> when |J2| <= J1 pointwise",
    )
    .param("worst_x", x)
    .with_margin(margin, tol))
}

/// ⟨M²⟩/|Λ|² ≤ S·⟨|M|⟩/|Λ|, the moment comparison behind reading the
/// certificate as a statement about spontaneous magnetisation.
pub fn verify_magnetisation(ctx: &ObservableContext, tol: f64) -> CheckResult {
    let (m2, m_abs) = ctx.magnetisation_moments();
    let s = ctx.system.ops.two_s as f64 / 2.0;
    CheckResult::new("magnetisation", "<M^2>/|L|^2 <= S <|M|>/|L|")
        .param("m2_per_site2", format!("{:.12e}", m2))
        .param("abs_m_per_site", format!("{:.12e}", m_abs))
        .with_margin(s * m_abs - m2, tol)
}

/// log Z for the Hamiltonian with field h = Δv.
pub fn log_partition(
    system: &SpinSystem,
    table: &CouplingTable,
    beta: f64,
    v: &[f64],
) -> Result<f64> {
    let h = laplacian_field(table, v);
    let ham = build_hamiltonian(system, table, &Field::PerSite(h));
    let spectrum = Spectrum::new(&ham)?;
    let state = GibbsState::new(spectrum, Beta::Finite(beta))?;
    Ok(state.log_z.expect("finite beta has a partition function"))
}

/// Merge two full-torus fields across a reflection plane: take `left`
/// on Λ_left and `right` elsewhere.
fn compose_fields(
    torus: &Torus,
    plane: &crate::rp::ReflectionPlane,
    left: &[f64],
    right: &[f64],
) -> Vec<f64> {
    let left_sites = plane.lam_left(torus);
    let mut is_left = vec![false; torus.n_sites()];
    for &s in &left_sites {
        is_left[s] = true;
    }
    (0..torus.n_sites())
        .map(|x| if is_left[x] { left[x] } else { right[x] })
        .collect()
}

/// The reflected field (Rv)_x = v_{Rx}.
fn reflect_field(torus: &Torus, plane: &crate::rp::ReflectionPlane, v: &[f64]) -> Vec<f64> {
    (0..torus.n_sites())
        .map(|x| v[torus.rank(&plane.reflect(torus, &torus.site(x)))])
        .collect()
}

/// log Z̃(v) = β(v,Δv)/4 + log Z(v), the functional whose maximiser is
/// v ≡ 0 and whose reflection bound `verify_rp_fields` checks.
fn log_tilde_partition(
    system: &SpinSystem,
    table: &CouplingTable,
    beta: f64,
    v: &[f64],
) -> Result<f64> {
    let dv = laplacian_field(table, v);
    let quad: f64 = v.iter().zip(&dv).map(|(a, b)| a * b).sum();
    Ok(0.25 * beta * quad + log_partition(system, table, beta, v)?)
}

/// Reflection bound for the field-dependent partition function:
/// Z̃(v₁⊕v₂)² ≤ Z̃(v₁⊕Rv₁) · Z̃(Rv₂⊕v₂) with Z̃(v) = e^{β(v,Δv)/4} Z(v),
/// compared in log space so the slack is relative. The quadratic
/// prefactor is essential: the Cauchy-Schwarz combination cancels the
/// diagonal part of (v,Δv) but not the coupling part, so the bare
/// partition function satisfies no such bound.
pub fn verify_rp_fields(
    system: &SpinSystem,
    table: &CouplingTable,
    beta: f64,
    plane: &crate::rp::ReflectionPlane,
    v1: &[f64],
    v2: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    check_sign_assumptions(table)?;
    let torus = &system.torus;
    let mixed = compose_fields(torus, plane, v1, v2);
    let left_refl = compose_fields(torus, plane, v1, &reflect_field(torus, plane, v1));
    let right_refl = compose_fields(torus, plane, &reflect_field(torus, plane, v2), v2);
    let lhs = 2.0 * log_tilde_partition(system, table, beta, &mixed)?;
    let rhs = log_tilde_partition(system, table, beta, &left_refl)?
        + log_tilde_partition(system, table, beta, &right_refl)?;
    Ok(CheckResult::new(
        "rp_fields",
        "2 log Zt(v1+v2) <= log Zt(v1+Rv1) + log Zt(Rv2+v2), Zt(v) = exp(beta (v,Dv)/4) Z(v)",
    )
    .param("axis", plane.direction)
    .param("plane_offset", plane.offset_index)
    .with_margin(rhs - lhs, tol))
}

/// Gaussian domination: log Z̃(v) ≤ log Z̃(0) with
/// Z̃(v) = e^{β(v,Δv)/4} Z(v), compared in log space.
pub fn verify_gaussian_domination(
    system: &SpinSystem,
    table: &CouplingTable,
    beta: f64,
    v: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    check_sign_assumptions(table)?;
    let dv = laplacian_field(table, v);
    let quad: f64 = v.iter().zip(&dv).map(|(a, b)| a * b).sum();
    let log_zt_v = log_tilde_partition(system, table, beta, v)?;
    let zero = vec![0.0; v.len()];
    let log_zt_0 = log_partition(system, table, beta, &zero)?;
    Ok(CheckResult::new(
        "gaussian_domination",
        "log Ztilde(v) <= log Ztilde(0), Ztilde(v) = exp(beta (v,Dv)/4) Z(v)",
    )
    .param("field_quadratic_form", format!("{:.12e}", quad))
    .with_margin(log_zt_0 - log_zt_v, tol))
}

/// The s²-order consequence of Gaussian domination at v = cos(k·x):
/// ½β²ε(k)² (C,C) ≤ ¼βε(k) Σ_x cos²(k·x), C = Σ_x cos(k·x) S_x⁽³⁾.
pub fn verify_gd_second_order(
    ctx: &ObservableContext,
    k: &Momentum,
    tol: f64,
) -> Result<CheckResult> {
    let check = CheckResult::new(
        "gd_second_order",
        "(1/2) beta^2 eps(k)^2 (C,C) <= (1/4) beta eps(k) sum_x cos^2(kx)",
    );
    let beta = match ctx.state.beta {
        Beta::Finite(b) => b,
        Beta::Infinite => return Ok(check.skip("beta infinite: expansion term undefined")),
    };
    let torus = &ctx.system.torus;
    let trig = ctx.table.trig();
    let cos_x: Vec<f64> = torus
        .sites()
        .into_iter()
        .map(|x| trig.cos(k.phase(&x)))
        .collect();
    let m = ctx.system.ops.s3_diagonal();
    let diag: Vec<C64> = (0..ctx.system.dim)
        .map(|state| {
            let v: f64 = (0..ctx.n_sites())
                .map(|x| cos_x[x] * m[ctx.system.digit(state, x)])
                .sum();
            C64::new(v, 0.0)
        })
        .collect();
    let c_tilde = ctx.transform_diagonal(&diag);
    let cc = ctx.state.duhamel_transformed(&c_tilde, &c_tilde).re;
    let eps = ctx.table.epsilon_k(k);
    let sum_cos2: f64 = cos_x.iter().map(|c| c * c).sum();
    let lhs = 0.5 * beta * beta * eps * eps * cc;
    let rhs = 0.25 * beta * eps * sum_cos2;
    Ok(check
        .param("k", format!("{:?}", k.m))
        .with_margin(rhs - lhs, tol))
}

/// Rotate a 3-vector around `a` by the angle ‖a‖ (right-handed).
pub fn rodrigues(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    let theta = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if theta == 0.0 {
        return *b;
    }
    let u = [a[0] / theta, a[1] / theta, a[2] / theta];
    let (c, s) = (theta.cos(), theta.sin());
    let cross = [
        u[1] * b[2] - u[2] * b[1],
        u[2] * b[0] - u[0] * b[2],
        u[0] * b[1] - u[1] * b[0],
    ];
    let dot = u[0] * b[0] + u[1] * b[1] + u[2] * b[2];
    [
        b[0] * c + cross[0] * s + u[0] * dot * (1.0 - c),
        b[1] * c + cross[1] * s + u[1] * dot * (1.0 - c),
        b[2] * c + cross[2] * s + u[2] * dot * (1.0 - c),
    ]
}

/// Spin rotation identity e^{−iS⁽ᵃ⁾} S⁽ᵇ⁾ e^{iS⁽ᵃ⁾} = S^{(R_a b)},
/// checked entrywise to `tol` (default 1e−10).
pub fn verify_rotation(two_s: u32, a: &[f64; 3], b: &[f64; 3], tol: f64) -> CheckResult {
    let ops = SpinOperators::new(two_s);
    let u = ops.rotation_unitary(*a);
    let lhs = &u * ops.along(*b) * u.adjoint();
    let rhs = ops.along(rodrigues(a, b));
    let defect = (&lhs - &rhs).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    CheckResult::new(
        "rotation_identity",
        "exp(-i S(a)) S(b) exp(i S(a)) = S(R_a b)",
    )
    .param("two_s", two_s)
    .param("angle", format!("{:.6}", (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()))
    .with_margin(-defect, tol)
}

/// Axis permutation and sign twist leaving the partition function
/// invariant: with ρ a permutation of the axes and σ ∈ {−1,+1}³,
/// σ₁σ₂σ₃ = +1, the couplings J̃⁽ⁱ⁾(x) = σ_{ρ(i)}^{|x|} J^{(ρ(i))}(x)
/// and field h̃_x = σ_{ρ⁻¹(3)}^{|x|} h on axis ρ⁻¹(3) satisfy
/// Tr e^{−βH} = Tr e^{−βH̃}. |x| is the coordinate sum, whose parity is
/// well defined on an even torus.
pub fn verify_trace_invariance(
    system: &SpinSystem,
    table: &CouplingTable,
    beta: f64,
    h: f64,
    perm: [usize; 3],
    signs: [i32; 3],
    tol: f64,
) -> Result<CheckResult> {
    let mut seen = [false; 3];
    for &p in &perm {
        if p > 2 || seen[p] {
            return Err(Error::Config(format!("not a permutation of the axes: {perm:?}")));
        }
        seen[p] = true;
    }
    if signs.iter().any(|s| s.abs() != 1) || signs.iter().product::<i32>() != 1 {
        return Err(Error::Config(format!(
            "sign pattern must be in {{-1,+1}}^3 with product +1, got {signs:?}"
        )));
    }
    let torus = &system.torus;
    let parity: Vec<bool> = torus
        .sites()
        .into_iter()
        .map(|x| x.iter().sum::<usize>() % 2 == 1)
        .collect();
    let twisted = |axis: usize| -> Vec<f64> {
        (0..torus.n_sites())
            .map(|r| {
                let sign = if parity[r] { signs[perm[axis]] as f64 } else { 1.0 };
                sign * table.j_per(perm[axis], r)
            })
            .collect()
    };
    let table2 = CouplingTable::from_values(torus, [twisted(0), twisted(1), twisted(2)])?;
    let field_axis = perm
        .iter()
        .position(|&p| p == 2)
        .expect("permutation covers axis 3");
    let field2: Vec<f64> = (0..torus.n_sites())
        .map(|r| if parity[r] { signs[field_axis] as f64 * h } else { h })
        .collect();

    let h1 = build_hamiltonian(system, table, &Field::Uniform(h));
    let h2 = build_hamiltonian_with_axis(system, &table2, &Field::PerSite(field2), field_axis);
    let log_z = |m: &CMatrix| -> Result<f64> {
        let state = GibbsState::new(Spectrum::new(m)?, Beta::Finite(beta))?;
        Ok(state.log_z.unwrap())
    };
    let (z1, z2) = (log_z(&h1)?, log_z(&h2)?);
    Ok(CheckResult::new(
        "trace_invariance",
        "Tr exp(-beta H) unchanged under axis permutation with sign twist",
    )
    .param("perm", format!("{perm:?}"))
    .param("signs", format!("{signs:?}"))
    .with_margin(-(z1 - z2).abs(), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::CouplingFamily;
    use crate::rp::ReflectionPlane;
    use approx::assert_relative_eq;

    fn nn_families(js: [f64; 3]) -> [CouplingFamily; 3] {
        [
            CouplingFamily::NearestNeighbour { j: js[0] },
            CouplingFamily::NearestNeighbour { j: js[1] },
            CouplingFamily::NearestNeighbour { j: js[2] },
        ]
    }

    struct Fixture {
        system: SpinSystem,
        table: CouplingTable,
        state: GibbsState,
        field: Field,
    }

    fn fixture(d: usize, ell: usize, two_s: u32, js: [f64; 3], beta: f64, h: f64) -> Fixture {
        let torus = Torus::new(d, ell).unwrap();
        let system = SpinSystem::new(&torus, two_s).unwrap();
        let table = CouplingTable::build(&torus, &nn_families(js), 1e-12).unwrap();
        let field = Field::Uniform(h);
        let ham = build_hamiltonian(&system, &table, &field);
        let state = GibbsState::new(Spectrum::new(&ham).unwrap(), Beta::Finite(beta)).unwrap();
        Fixture { system, table, state, field }
    }

    #[test]
    fn transfer_function_bounds_and_shape() {
        let mut prev = 0.0;
        let mut values = Vec::new();
        for i in 0..=80 {
            let s = 10f64.powf(-4.0 + 8.0 * i as f64 / 80.0);
            let phi = transfer_function(s);
            assert!(phi >= s.sqrt() - 1e-13, "lower bound fails at s = {s}");
            assert!(phi <= s.sqrt() + s + 1e-13, "upper bound fails at s = {s}");
            assert!(phi > prev, "not increasing at s = {s}");
            prev = phi;
            values.push((s, phi));
        }
        // midpoint concavity on the sampled grid
        for pair in values.windows(2) {
            let (s1, p1) = pair[0];
            let (s2, p2) = pair[1];
            let mid = transfer_function(0.5 * (s1 + s2));
            assert!(mid >= 0.5 * (p1 + p2) - 1e-12);
        }
    }

    #[test]
    fn transfer_function_series_is_continuous_at_crossover() {
        // the series kicks in at s = 1e16
        let below = transfer_function(0.99e16);
        let above = transfer_function(1.01e16);
        assert_relative_eq!(below, 0.99e16 + 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(above, 1.01e16 + 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn falk_bruch_saturates_on_a_single_dirac_mass() {
        // one spin-½ in a field: A = S⁺ has a single spectral line
        let ops = SpinOperators::new(1);
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = C64::new(0.9, 0.0);
        h[(1, 1)] = C64::new(-0.9, 0.0);
        let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(1.0)).unwrap();
        let a_tilde = state.transform(&ops.splus);
        let q = fb_quantities(&state, &a_tilde).unwrap();
        let lhs = 2.0 * q.sym / q.dc;
        let rhs = transfer_function(4.0 * q.duh / q.dc);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        let check = verify_falk_bruch(&state, &a_tilde, 1e-9);
        assert!(check.pass);
    }

    #[test]
    fn falk_bruch_skips_on_degenerate_denominator() {
        // A commuting with H has vanishing double commutator
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = C64::new(1.0, 0.0);
        h[(1, 1)] = C64::new(-1.0, 0.0);
        let state = GibbsState::new(Spectrum::new(&h).unwrap(), Beta::Finite(1.0)).unwrap();
        let a_tilde = state.transform(&h);
        let check = verify_falk_bruch(&state, &a_tilde, 1e-9);
        assert!(check.skipped.is_some());
        assert!(check.pass);
    }

    #[test]
    fn duhamel_upper_reaches_equality_for_commuting_observable() {
        let f = fixture(1, 4, 1, [0.5, -0.25, 1.0], 1.2, 0.0);
        let h = build_hamiltonian(&f.system, &f.table, &f.field);
        let a_tilde = f.state.transform(&h);
        let checks = verify_duhamel_upper(&f.state, &a_tilde, 1e-9);
        assert_eq!(checks.len(), 2, "equality branch must trigger for A = H");
        assert!(checks.iter().all(|c| c.pass));
    }

    #[test]
    fn irb_margins_are_positive_on_ising_chain() {
        let f = fixture(1, 4, 1, [0.0, 0.0, 1.0], 1.0, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        let duh = verify_irb_duhamel(&ctx, &f.field, 1e-9).unwrap();
        assert!(duh.pass && duh.margin.unwrap() > 0.0);
        let corr = verify_irb_corr(&ctx, &f.field, 1e-9).unwrap();
        assert!(corr.pass && corr.margin.unwrap() > 0.0);
    }

    #[test]
    fn irb_rejects_nonzero_field() {
        let f = fixture(1, 4, 1, [0.5, 0.0, 1.0], 1.0, 0.3);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        assert!(matches!(
            verify_irb_duhamel(&ctx, &f.field, 1e-9),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn irb_rejects_degenerate_dispersion() {
        let f = fixture(1, 4, 1, [0.0, 0.0, 0.0], 1.0, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        assert!(matches!(
            verify_irb_duhamel(&ctx, &f.field, 1e-9),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn corr_ineq_equality_under_transverse_symmetry() {
        let f = fixture(1, 4, 1, [0.5, 0.5, 1.0], 1.0, 0.4);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        let check = verify_corr_ineq(&ctx, 1e-9).unwrap();
        assert!(check.pass);
        assert!(check.margin.unwrap().abs() < 1e-10, "symmetry forces equality");
    }

    #[test]
    fn corr_ineq_rejects_dominant_axis2() {
        let f = fixture(1, 4, 1, [0.1, 0.5, 1.0], 1.0, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        assert!(matches!(verify_corr_ineq(&ctx, 1e-9), Err(Error::Config(_))));
    }

    #[test]
    fn magnetisation_inequality_at_infinite_temperature() {
        let f = fixture(1, 4, 1, [0.5, 0.0, 1.0], 0.0, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        let check = verify_magnetisation(&ctx, 1e-9);
        assert!(check.pass);
        // counting over uniform σ-configurations: ⟨M²⟩/16 = 1/16,
        // S⟨|M|⟩/4 = 3/32, margin 1/32
        assert_relative_eq!(check.margin.unwrap(), 1.0 / 32.0, max_relative = 1e-12);
    }

    #[test]
    fn rp_fields_equality_when_right_is_reflected_left() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, -0.25, 1.0]), 1e-12).unwrap();
        let plane = ReflectionPlane { direction: 0, offset_index: 0 };
        let v1 = vec![0.7, -0.3, 0.2, 0.9];
        let rv1 = reflect_field(&torus, &plane, &v1);
        let check = verify_rp_fields(&system, &table, 1.0, &plane, &v1, &rv1, 1e-9).unwrap();
        assert!(check.pass);
        assert!(check.margin.unwrap().abs() < 1e-10, "equality case");
    }

    #[test]
    fn rp_fields_strict_inequality_on_generic_fields() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.0, 0.0, 1.0]), 1e-12).unwrap();
        let plane = ReflectionPlane { direction: 0, offset_index: 1 };
        let v1 = vec![0.4, -0.8, 0.1, 0.3];
        let v2 = vec![-0.2, 0.5, 0.9, -0.6];
        let check = verify_rp_fields(&system, &table, 2.0, &plane, &v1, &v2, 1e-9).unwrap();
        assert!(check.pass);
        // frozen against an independent diagonalisation of the same ring
        assert_relative_eq!(check.margin.unwrap(), 0.533415623561032, max_relative = 1e-10);
    }

    #[test]
    fn rp_fields_strict_inequality_spin_one() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 2).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, 0.0, 1.0]), 1e-12).unwrap();
        let plane = ReflectionPlane { direction: 0, offset_index: 1 };
        let v1 = vec![0.4, -0.8, 0.1, 0.3];
        let v2 = vec![-0.2, 0.5, 0.9, -0.6];
        let check = verify_rp_fields(&system, &table, 1.0, &plane, &v1, &v2, 1e-9).unwrap();
        assert!(check.pass);
        assert_relative_eq!(check.margin.unwrap(), 1.034726879797198, max_relative = 1e-10);
    }

    #[test]
    fn gaussian_domination_equality_for_constant_field() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, 0.0, 1.0]), 1e-12).unwrap();
        let v = vec![0.8; 4];
        let check = verify_gaussian_domination(&system, &table, 1.5, &v, 1e-9).unwrap();
        assert!(check.pass);
        assert!(check.margin.unwrap().abs() < 1e-10);
    }

    #[test]
    fn gaussian_domination_on_cosine_and_random_fields() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, -0.25, 1.0]), 1e-12).unwrap();
        let cosine = vec![0.2, 0.0, -0.2, 0.0]; // 0.2·cos(πx/2)
        let check = verify_gaussian_domination(&system, &table, 1.0, &cosine, 1e-9).unwrap();
        assert!(check.pass && check.margin.unwrap() >= 0.0);
        let generic = vec![0.9, -0.4, 0.15, 0.55];
        let check = verify_gaussian_domination(&system, &table, 1.0, &generic, 1e-9).unwrap();
        assert!(check.pass && check.margin.unwrap() > 0.0);
    }

    #[test]
    fn gd_second_order_holds_at_every_nonzero_momentum() {
        let f = fixture(1, 6, 1, [0.5, -0.25, 1.0], 2.0, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        for k in MomentumGrid::new(&f.system.torus).iter_nonzero() {
            let check = verify_gd_second_order(&ctx, k, 1e-9).unwrap();
            assert!(check.pass, "violated at k = {:?}", k.m);
        }
    }

    #[test]
    fn partition_second_derivative_matches_duhamel_form() {
        // d²/ds² Z(sv)|₀ = β² Z(0) Σ_{x,y} h_x h_y η(x−y), h = Δv
        let f = fixture(1, 4, 1, [0.5, -0.25, 1.0], 1.3, 0.0);
        let ctx = ObservableContext::new(&f.system, &f.table, &f.state);
        let v = vec![0.6, -0.1, 0.4, -0.9];
        let beta = 1.3;
        let h = laplacian_field(&f.table, &v);
        let m = f.system.ops.s3_diagonal();
        let diag: Vec<C64> = (0..f.system.dim)
            .map(|state| {
                let val: f64 = (0..4).map(|x| h[x] * m[f.system.digit(state, x)]).sum();
                C64::new(val, 0.0)
            })
            .collect();
        let d_tilde = ctx.transform_diagonal(&diag);
        let smeared = f.state.duhamel_transformed(&d_tilde, &d_tilde).re;
        let log_z0 = log_partition(&f.system, &f.table, beta, &vec![0.0; 4]).unwrap();
        let delta = 1e-3;
        let scaled = |s: f64| -> f64 {
            let vs: Vec<f64> = v.iter().map(|x| s * x).collect();
            log_partition(&f.system, &f.table, beta, &vs).unwrap()
        };
        let z = |s: f64| (scaled(s) - log_z0).exp();
        let second = (z(delta) - 2.0 * z(0.0) + z(-delta)) / (delta * delta);
        assert_relative_eq!(second, beta * beta * smeared, max_relative = 1e-4);
    }

    #[test]
    fn rotation_identity_pi_about_axis3_and_random_axes() {
        for two_s in 1..=3 {
            let check = verify_rotation(two_s, &[0.0, 0.0, std::f64::consts::PI], &[1.0, 0.0, 0.0], 1e-10);
            assert!(check.pass);
            let check = verify_rotation(two_s, &[0.0, 0.0, 0.0], &[0.3, -0.4, 0.8], 1e-10);
            assert!(check.pass, "zero angle must be the identity");
            let check = verify_rotation(two_s, &[0.7, -1.2, 0.4], &[-0.5, 0.9, 1.1], 1e-10);
            assert!(check.pass);
        }
    }

    #[test]
    fn trace_invariance_under_axis_swap_and_sign_twist() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, -0.25, 1.0]), 1e-12).unwrap();
        // swap transverse axes
        let check =
            verify_trace_invariance(&system, &table, 1.1, 0.3, [1, 0, 2], [1, 1, 1], 1e-9)
                .unwrap();
        assert!(check.pass, "margin {:?}", check.margin);
        // stagger-flip both transverse axes
        let check =
            verify_trace_invariance(&system, &table, 1.1, 0.3, [0, 1, 2], [-1, -1, 1], 1e-9)
                .unwrap();
        assert!(check.pass, "margin {:?}", check.margin);
        // full cycle with a twist
        let check =
            verify_trace_invariance(&system, &table, 0.7, 0.2, [2, 0, 1], [-1, 1, -1], 1e-9)
                .unwrap();
        assert!(check.pass, "margin {:?}", check.margin);
    }

    #[test]
    fn trace_invariance_rejects_odd_sign_pattern() {
        let torus = Torus::new(1, 4).unwrap();
        let system = SpinSystem::new(&torus, 1).unwrap();
        let table = CouplingTable::build(&torus, &nn_families([0.5, 0.0, 1.0]), 1e-12).unwrap();
        assert!(matches!(
            verify_trace_invariance(&system, &table, 1.0, 0.0, [0, 1, 2], [-1, 1, 1], 1e-9),
            Err(Error::Config(_))
        ));
    }
}
