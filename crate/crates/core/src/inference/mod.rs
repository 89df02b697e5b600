//! Exact inference by variable elimination, joint enumeration, and Markov
//! blankets.

mod blanket;
mod brute;
mod elimination;
mod factor;

pub(crate) use blanket::induced_edges;
pub use blanket::{blanket_closure, markov_blanket, MarkovBlanket};
pub use brute::{brute_force_joint, conditional_from_joint, MAX_JOINT_CELLS};
pub use elimination::{all_marginals, eliminate, eliminate_with_order, Evidence};
pub use factor::Factor;
