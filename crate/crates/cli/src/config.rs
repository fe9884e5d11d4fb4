//! Run configuration: a single JSON document per invocation.
//!
//! Unknown keys are rejected at parse time; keys that a given subcommand
//! cannot use are rejected afterwards, so a config never silently
//! carries dead settings. `beta` and `ell` accept the string "inf" for
//! their infinite-volume variants.

use serde::{Deserialize, Serialize};
use spincert_core::certificates::{AlphaMode, Ell};
use spincert_core::couplings::CouplingFamily;
use spincert_core::gibbs::Beta;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional echo of the subcommand; must match when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<Ell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_times_two: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Beta>,
    /// One family per spin axis, in axis order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub couplings: Option<[CouplingFamily; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_mode: Option<AlphaMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config schema: {e}")))
    }

    /// Reject keys the subcommand cannot use, and a mismatched `command`.
    pub fn validate_for(&self, subcommand: &str, allowed: &[&str]) -> Result<(), CliError> {
        if let Some(cmd) = &self.command {
            if cmd != subcommand {
                return Err(CliError::Config(format!(
                    "config is for command {cmd:?} but {subcommand:?} was invoked"
                )));
            }
        }
        let present: [(&str, bool); 8] = [
            ("dimension", self.dimension.is_some()),
            ("ell", self.ell.is_some()),
            ("spin_times_two", self.spin_times_two.is_some()),
            ("beta", self.beta.is_some()),
            ("couplings", self.couplings.is_some()),
            ("alpha_mode", self.alpha_mode.is_some()),
            ("grid", self.grid.is_some()),
            ("tolerances", self.tolerances.is_some()),
        ];
        for (key, is_set) in present {
            if is_set && !allowed.contains(&key) {
                return Err(CliError::Config(format!(
                    "key {key:?} is not meaningful for the {subcommand} command"
                )));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn require_dimension(&self) -> Result<usize, CliError> {
        self.dimension
            .ok_or_else(|| CliError::Config("config key \"dimension\" is required".into()))
    }

    pub fn require_spin(&self) -> Result<u32, CliError> {
        match self.spin_times_two {
            Some(s) if s > 0 => Ok(s),
            Some(_) => Err(CliError::Config("spin_times_two must be positive".into())),
            None => Err(CliError::Config(
                "config key \"spin_times_two\" is required".into(),
            )),
        }
    }

    pub fn require_beta(&self) -> Result<Beta, CliError> {
        self.beta
            .ok_or_else(|| CliError::Config("config key \"beta\" is required".into()))
    }

    pub fn require_ell(&self) -> Result<Ell, CliError> {
        self.ell
            .ok_or_else(|| CliError::Config("config key \"ell\" is required".into()))
    }

    pub fn require_finite_ell(&self) -> Result<usize, CliError> {
        match self.require_ell()? {
            Ell::Finite(l) => Ok(l),
            Ell::Limit => Err(CliError::Config(
                "this command needs a finite lattice side, not \"inf\"".into(),
            )),
        }
    }

    pub fn require_couplings(&self) -> Result<&[CouplingFamily; 3], CliError> {
        self.couplings
            .as_ref()
            .ok_or_else(|| CliError::Config("config key \"couplings\" is required".into()))
    }

    pub fn require_alpha_mode(&self) -> Result<AlphaMode, CliError> {
        self.alpha_mode
            .ok_or_else(|| CliError::Config("config key \"alpha_mode\" is required".into()))
    }

    pub fn require_grid(&self) -> Result<&GridSpec, CliError> {
        self.grid
            .as_ref()
            .ok_or_else(|| CliError::Config("config key \"grid\" is required".into()))
    }

    /// The config echoed into reports: the parsed, normalized document.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialization")
    }
}

/// Scan grid: the cross product of the four axes, ratios innermost.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dims: Vec<usize>,
    pub spins_times_two: Vec<u32>,
    pub ratios: RatioSpec,
    pub betas: Vec<Beta>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RatioSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl RatioSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            RatioSpec::List(v) => Ok(v.clone()),
            RatioSpec::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite() && *step > 0.0) {
                    return Err(CliError::Config(format!(
                        "ratio range needs finite start/stop and step > 0, \
                         got start = {start}, stop = {stop}, step = {step}"
                    )));
                }
                let count = ((stop - start) / step + 1e-9).floor();
                if count < 0.0 {
                    return Err(CliError::Config(format!(
                        "ratio range is empty: start = {start} > stop = {stop}"
                    )));
                }
                if count > 100_000.0 {
                    return Err(CliError::Config(format!(
                        "ratio range has {count} points; refusing more than 100000"
                    )));
                }
                Ok((0..=count as usize).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

/// Numerical tolerances, each optional in the config.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Slack allowed on inequality margins.
    pub check: f64,
    /// Allowed deviation in exact-equality cases.
    pub equality: f64,
    /// Relative eigenvalue floor for kernel positivity.
    pub psd: f64,
    /// Truncation budget for periodizing long-range couplings.
    pub tail: f64,
    /// Bisection width for critical-ratio summaries.
    pub critical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            check: 1e-9,
            equality: 1e-10,
            psd: 1e-9,
            tail: 1e-9,
            critical: 1e-4,
        }
    }
}
