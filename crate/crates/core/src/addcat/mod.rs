//! Additive categories realized as matrix categories: Laurent and twisted Laurent categories
//! with convolution composition, idempotent completion, the interval groupoid product, and
//! Nil objects with their χ complex.

mod category;
mod equiv;
mod functor;
mod nil;

pub use category::{laurent_compose, Category, IdemObject, LaurentMorphism, Morphism, Object};
pub use equiv::{matcat_laurent_equiv_check, EquivReport};
pub use functor::{
    build_functor, invert_morphism, natiso_to_interval_functor, Functor, FunctorKind, IntervalFunctor, NatTrans,
};
pub use nil::{chi_complex, twisted_power, ChiComplex, NilObject, DEFAULT_NIL_SEARCH_BOUND};

use crate::rings::RingError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AddCatError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a member of the category: {0}")]
    NotInCategory(String),
    #[error("morphism is not invertible")]
    NotInvertible,
    #[error("transformation is not natural: {0}")]
    NotNatural(String),
    #[error("endomorphism is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("functor not applicable: {0}")]
    Inapplicable(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}
