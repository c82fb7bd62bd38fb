//! Algebraic K-theory workbench: exact abelian-group algebra, computable rings, matrix
//! categories, K₀/K₁ engines and the Bass delooping machinery at the level of homotopy groups.

pub mod abgroup;
pub mod addcat;
pub mod delooper;
pub mod kengine;
pub mod oracle;
pub mod rings;
