//! Partition probability functions: evaluation, tables, shifts, laws and
//! convergence diagnostics.

mod convergence;
mod eval;
mod frequency;
mod law;
mod table;

pub use convergence::{
    convergence_profile, convergence_profile_auto, convergence_profile_by_chain,
    ConvergenceProfile, ProfileRoute,
};
pub use eval::{extreme_peppf, mc_peppf, paintbox_eppf};
pub use frequency::{FrequencyVector, MASS_TOL};
pub use law::{partition_law, tv_distance, PartitionLaw};
pub use table::{
    build_table, check_addition_rules, is_symmetric, shift_in_place_increment, shift_peppf,
    PeppfTable, ResidualReport, SymmetryReport, TableFile, TableHeader, ADDITION_TOL,
    NORMALIZATION_TOL, TABLE_CAP,
};
