//! The greedy tree algorithms.
//!
//! Both algorithms repeatedly mark the leaf with the largest marking
//! indicator `μ = (1/err + λ)⁻¹` and subdivide a necessary patch for it. They
//! differ in how the penalisation `λ` evolves:
//!
//! * [`Algorithm::Conforming`] adds `1/err(m)` to the marked cell's `λ`
//!   every time it is marked. Children inherit their parent's `λ`, so a
//!   marked cell that had to wait for a neighbour keeps getting penalised.
//! * [`Algorithm::Simple`] fixes `λ(c) = 1/err(parent) + λ(parent)` when `c`
//!   is created and never touches it again.
//!
//! When every patch is a single cell the two coincide; the code is arranged
//! so that they then perform exactly the same floating-point operations.

mod engine;
mod extended;
mod trace;

pub use engine::{
    global_error, Algorithm, ErrorFunctional, Greedy, LeafState, LocalErrors, StepOutcome, StoppingRule,
    DEFAULT_ITERATION_CAP,
};
pub use extended::{marking_indicator, CompensatedSum, ExtendedReal};
pub use trace::{write_convergence_csv, RunTrace, StopReason, TraceRow};
