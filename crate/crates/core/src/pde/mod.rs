//! The p-capacitary Dirichlet problem on a rasterized ring.

mod cg;
mod field;
mod operator;

pub use field::ScalarField;
pub use operator::{
    gradient_magnitude, gradient_magnitude_with_mask, nonlinear_residual, solve_p_capacitary, PLaplaceConfig,
    SolveStats,
};
