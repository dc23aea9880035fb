//! Seeded random generation. Every sampler takes an explicit RNG stream.

mod model;
mod restaurant;
mod x;

pub(crate) use model::same_values;
pub use model::{
    size_biased_orderings, size_biased_permutation, stickbreaking_freqs, RandomFreqModel,
    StickBreaking, DEFAULT_TAIL_TOLERANCE,
};
pub use restaurant::{
    coupled_sample, coupling_bound, crp_sample, paintbox_sample, CoupledDraw, CouplingEstimate,
};
pub(crate) use x::hazards;
pub use x::{sample_x, x_pmf, x_tail, XDraw, STEP_CAP};
