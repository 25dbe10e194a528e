//! Finite-dimensional states, metrics and classical-quantum constructions.

mod cq;
pub mod io;
mod layout;
mod metrics;
mod purify;
pub mod random;
mod state;

pub use cq::{cq_embed, CqState};
pub use layout::SystemLayout;
pub use metrics::{
    fidelity, generalized_fidelity, invsqrt_on_support, positive_part_projector,
    purified_distance, purified_distance_plain, trace_distance,
};
pub use purify::{purify, purify_cq, purify_with_label, REFERENCE_LABEL};
pub use state::{DensityOperator, PureState};

#[cfg(test)]
pub(crate) use metrics::{fidelity_mat, trace_distance_mat};

/// `partial_trace` as a free function.
pub fn partial_trace(rho: &DensityOperator, keep: &[&str]) -> crate::Result<DensityOperator> {
    rho.partial_trace(keep)
}
