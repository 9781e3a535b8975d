//! Svetlichny polynomials and the communication patterns that can or cannot
//! reach their bounds.
//!
//! The crate covers exact Mermin/Svetlichny coefficient tables, directed
//! communication graphs and their partially/totally paired classification,
//! exact maximization of the Svetlichny functional over graph-constrained
//! deterministic strategies, no-signalling mixtures reaching the algebraic
//! maximum, and GHZ measurement statistics reaching the quantum maximum.

pub mod bits;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod graphs;
pub mod nosignal;
pub mod quantum;
pub mod scalar;
pub mod strategies;
pub mod table;

pub use bits::{parity, BitWord, InputVector, OutcomeVector};
pub use coeffs::{
    evaluate, mermin_coeffs, svetlichny_coeffs, theory_bounds, CoefficientKind, CoefficientTable, Method,
    TheoryBounds,
};
pub use error::{Error, Result};
pub use graphs::{catalog, classify, dependency_sets, is_separable, Classification, CommGraph, DependencyProfile};
pub use scalar::{ExactScalar, Value};
pub use strategies::{
    brute_force_max, eval_strategy, max_over_graph, parity_basis, strategy_to_table, tp_strategy,
    DeterministicStrategy, MaxOptions, ParityFunction, ParitySubspace,
};
pub use table::{CorrelationTable, TableViolation};
