//! Exact linear algebra over ℤ: finitely generated abelian groups and their homomorphisms.

mod group;
mod hom;
mod matrix;
mod smith;
mod solve;

pub use group::{Canonical, CanonicalForm, FgAbGroup};
pub use hom::{colim_sequence, direct_sum, Cokernel, ColimResult, DirectSum, ExactnessReport, GroupHom, Kernel};
pub use matrix::IntMatrix;
pub use smith::{smith_normal_form, SmithForm};
pub use solve::{column_lattice_basis, hermite_rows, nullspace, solve, solve_matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbGroupError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("homomorphism is not well-defined: {0}")]
    IllDefined(String),
    #[error("homomorphism is not invertible")]
    NotInvertible,
}
