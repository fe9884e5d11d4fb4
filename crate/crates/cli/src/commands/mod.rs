//! Subcommand implementations and the pieces they share.

pub mod certify;
pub mod rp_check;
pub mod scan;
pub mod table1;
pub mod verify;

use rand_chacha::ChaCha8Rng;
use spincert_core::couplings::{CouplingFamily, CouplingTable};
use spincert_core::gibbs::Beta;
use spincert_core::lattice::Torus;
use spincert_core::sampling::rng_from_seed;

use crate::config::Tolerances;
use crate::CliError;

/// One fully specified model: lattice, spin, couplings, temperature.
pub struct ModelSpec {
    pub d: usize,
    pub ell: usize,
    pub two_s: u32,
    pub beta: Beta,
    pub families: [CouplingFamily; 3],
    /// Short label stamped into every check's parameters.
    pub label: String,
}

impl ModelSpec {
    pub fn build_table(&self, tol: &Tolerances) -> Result<(Torus, CouplingTable), CliError> {
        let torus = Torus::new(self.d, self.ell).map_err(CliError::from)?;
        let table =
            CouplingTable::build(&torus, &self.families, tol.tail).map_err(CliError::from)?;
        Ok((torus, table))
    }
}

/// Independent random stream for the configuration at `ordinal`:
/// a golden-ratio stride keeps the streams distinct for any base seed.
pub fn config_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    rng_from_seed(seed.wrapping_add(ordinal.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}
