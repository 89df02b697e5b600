//! Discrete Bayesian networks: graph, BIC scoring, structure search and
//! parameter fitting.

mod dag;
mod network;
mod score;
mod search;

pub(crate) use dag::dot_id;
pub use dag::Dag;
pub use network::{fit_parameters, BayesianNetwork, Cpt, NetworkDocument, NodeDocument, DEFAULT_ALPHA};
pub use score::{family_bic, family_log_likelihood, family_parameters, network_bic};
pub use search::{
    hill_climb, hill_climb_traced, Move, Operator, SearchConfig, SearchStep, SearchTrace, MIN_IMPROVEMENT,
    TIE_TOLERANCE,
};
