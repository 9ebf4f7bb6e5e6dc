//! Brute-force ground truth for small instances: exhaustive enumeration of
//! conforming trees, best errors per complexity, certification of the
//! near-best inequality against an algorithm trace, and minimal conforming
//! completions by search.

mod completion;
mod enumerate;
mod sigma;

pub use completion::{minimal_completion, DEFAULT_SEARCH_CAP};
pub use enumerate::{
    count_conforming_by_internal_nodes, enumerate_conforming, enumerate_levels, Enumeration, MeshState, Truncation,
    DEFAULT_STATE_CAP,
};
pub use sigma::{
    certify_near_best, near_best_bound, state_error, CertificationReport, CertificationRow, SigmaEntry, SigmaTable,
    CERTIFICATION_SLACK,
};
