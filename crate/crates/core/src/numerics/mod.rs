//! Numerical kernels shared by the physics modules.

mod eigen;
mod grid;
mod poly;
mod quad;

pub use eigen::{eigh3, hermiticity_defect, EigenSystem3, HERMITICITY_TOL};
pub use grid::derivative_on_grid;
pub use poly::{solve_polynomial, ComplexPolynomial, MAX_DEGREE};
pub use quad::{
    integrate_semi_infinite, integrate_semi_infinite_with, split_point, CVec, QuadValue,
    QuadratureOptions, QuadratureResult,
};
