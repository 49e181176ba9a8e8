//! Flux decomposition, mollification commutators, energy residuals and the
//! uniqueness experiment.

pub mod commutator;
pub mod energy;
pub mod flux;
pub mod gronwall;
mod mixed;

pub use commutator::{
    analytic_test_field, decay_study, flux_pairing, log2_slope, mollified_commutators,
    CommutatorTerms, DecayReport, DecayRow,
};
pub use energy::energy_residual;
pub use flux::{direct_flux, flux_decompose, write_flux_csv, FluxBreakdown};
pub use gronwall::{uniqueness_experiment, GronwallReport};
