//! Order-of-appearance frequencies under shifts: forward top-to-random moves,
//! reverse move-to-front moves, exact finite kernels and moment identities.

mod identities;
mod kernel;
mod steps;

pub use identities::{moment_identity, Identity, IdentityReport, Mode};
pub use kernel::{
    exact_kernel, random_to_top_kernel, reversal_check, stationary_distribution, worst_start_tv,
    FiniteOrderChain, STATE_CAP, STATIONARY_TOL,
};
pub use steps::{insert_first_at, move_to_front, random_to_top_step, top_to_random_step};
