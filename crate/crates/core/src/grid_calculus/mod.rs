//! Grids, matrix-valued functions with derivative tables, potentials and the
//! matrix Schrödinger ODE solver that supplies transformation functions for
//! non-trivial potentials.

mod fd;
mod forms;
mod function;
mod grid;
mod ode;
mod potential;
mod sampled;

pub use fd::{Sample, finite_difference, masked_derivative, second_difference, FIRST_DERIVATIVE_WIDTH};
pub use forms::ScalarForm;
pub use function::{AnalyticColumn, BasisTerm, FunctionSource, MatrixFunction};
pub use grid::Grid;
pub use ode::{solve_matrix_schrodinger, OdeSolution};
pub use potential::{eval_potential, PotentialKind, PotentialSpec, PotentialTerm, StateSpec, StateSource};
pub use sampled::SampledMatrix;

/// Binomial coefficient as `f64`; exact for the small orders used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
