//! Computable rings: ℤ, ℤ/n, finite fields, and (twisted) polynomial/Laurent extensions.
//!
//! Twisted convention: in `R_φ[t, t⁻¹]` we have `t·a = φ(a)·t`, hence
//! `(a·tʲ)(b·tⁱ) = a·φʲ(b)·t^{i+j}`.

mod field;
mod hom;
mod matrix;
mod ring;

pub use field::{prime_power, FiniteField};
pub use hom::{HomKind, RingHom, Structural};
pub use matrix::RMatrix;
pub use ring::{laurent_mul, Elem, Extension, LaurentElem, RingAutomorphism, RingDesc, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("invalid ring data: {0}")]
    Invalid(String),
    #[error("ring selector parse error: {0}")]
    Parse(String),
    #[error("ring mismatch: {0}")]
    Mismatch(String),
    #[error("unrelated rings for this homomorphism: {0}")]
    Unrelated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
