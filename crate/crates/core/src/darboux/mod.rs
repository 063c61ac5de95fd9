//! First-order Darboux operators, the stepwise chain engine, the closed-form
//! (bordered Wronskian) engine, and the scalar Crum-Krein reduction.

mod chain;
mod jet;
mod operator;
mod scalar;

pub use chain::{chain_stepwise, closed_form_chain, y_matrix_closed_form, ChainDiagnostics, ChainResult, Engine, YMatrix};
pub use jet::{apply_jet, log_derivative_jet};
pub use operator::{apply_operator, make_first_order, transform_potential_once, FirstOrderOperator};
pub use scalar::{scalar_crum, ScalarCrum};

/// Largest fraction of singular grid nodes tolerated in a generator.
pub const DEGENERATE_FRACTION: f64 = 0.2;
