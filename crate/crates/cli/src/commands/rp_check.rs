//! The `rp-check` subcommand: positivity of every cross-coupling kernel
//! of a periodized table, one check per (axis, reflection plane).

use spincert_core::report::{CheckResult, RunReport};
use spincert_core::rp::{rp_check, RpReport};

use crate::commands::ModelSpec;
use crate::config::{RunConfig, Tolerances};
use crate::output::{checks_csv, CommandOutput, Format};
use crate::CliError;

/// Convert kernel verdicts into checks; margins are eigenvalues
/// normalized by the kernel's largest entry so tolerances are relative.
pub fn kernel_checks(rp: &RpReport, tol: &Tolerances) -> Vec<CheckResult> {
    rp.verdicts
        .iter()
        .map(|v| {
            let scale = v.max_abs_entry.max(1e-300);
            CheckResult::new(
                "rp_kernel_psd",
                "cross-coupling kernel over the reflection plane is positive semidefinite",
            )
            .param("axis", v.axis + 1)
            .param("plane_direction", v.plane.direction)
            .param("plane_offset", v.plane.offset_index)
            .param("min_eigenvalue", format!("{:.6e}", v.min_eigenvalue))
            .param("symmetry_defect", format!("{:.3e}", v.symmetry_defect))
            .with_margin(v.min_eigenvalue / scale, tol.psd)
        })
        .collect()
}

pub fn run(config: &RunConfig, seed: u64) -> Result<CommandOutput, CliError> {
    config.validate_for("rp-check", &["dimension", "ell", "couplings", "tolerances"])?;
    let tol = config.tolerances();
    let spec = ModelSpec {
        d: config.require_dimension()?,
        ell: config.require_finite_ell()?,
        two_s: 1, // irrelevant: kernels depend only on the couplings
        beta: spincert_core::gibbs::Beta::Finite(1.0),
        families: config.require_couplings()?.clone(),
        label: "rp-check".into(),
    };
    let (_, table) = spec.build_table(&tol)?;
    let rp = rp_check(&table, tol.psd);
    let mut report = RunReport::new("rp-check", seed, config.echo());
    report.extend(kernel_checks(&rp, &tol));
    let exit = report.exit_code();
    Ok(CommandOutput {
        json: report.to_json(),
        csv: checks_csv(&report.checks),
        exit,
        default_format: Format::Json,
    })
}
