//! Independent computation of K₀ and K₁ for tractable rings.
//!
//! Every ring is split into Chinese-remainder components; each component is connected and has
//! `K₀ = ℤ`. K₁ is the unit group, and `SK₁ = 0` is witnessed by running the elementary
//! reducer on random samples rather than assumed.

mod class;
mod facts;
mod reduce;
mod units;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abgroup::{AbGroupError, FgAbGroup, GroupHom, IntMatrix};
use crate::rings::{Elem, RingDesc, RingError, RingHom};

pub use class::{classify, crt_components, euclid_quotient, lift, norm_value, project, Component, Norm, RingClass};
pub use facts::{finite_field_higher_k, ground_facts, GroundFacts};
pub use reduce::{certify_sk1, matrix_k1_reduce, random_elementary_product, ElemOp, K1Reduction, Sk1Certificate};
pub use units::{k1_coords, k1_generators, UnitGen};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix is not invertible")]
    Singular,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("elementary reduction stalled: {0}")]
    Stalled(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

/// Which K-theory: of the category of finitely generated free modules, or of its idempotent
/// completion (finitely generated projective modules).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Flavor {
    Free,
    #[default]
    IdempotentComplete,
}

/// A K-group with a description of each presentation generator.
#[derive(Clone, Debug)]
pub struct KValue {
    pub degree: i64,
    pub group: FgAbGroup,
    pub generator_semantics: Vec<String>,
    pub sk1_witness: Option<Sk1Certificate>,
}

/// Samples per component used by [`k1`] to witness `SK₁ = 0`.
pub const K1_WITNESS_SAMPLES: usize = 12;

fn check_k0_support(ring: &RingDesc) -> Result<Vec<Component>, KError> {
    let comps = crt_components(ring);
    for c in &comps {
        match classify(&c.ring) {
            RingClass::Unsupported { reason } => return Err(KError::Unsupported(reason)),
            RingClass::ProductOfLocals { .. } => unreachable!("components are connected"),
            _ => {}
        }
    }
    Ok(comps)
}

pub fn k0(ring: &RingDesc, flavor: Flavor) -> Result<KValue, KError> {
    let comps = check_k0_support(ring)?;
    let (rank, semantics) = match flavor {
        _ if comps.is_empty() => (0, Vec::new()),
        Flavor::Free => (1, vec!["class of the free rank-1 object".to_string()]),
        Flavor::IdempotentComplete if comps.len() == 1 => (1, vec!["class of the free rank-1 object".to_string()]),
        Flavor::IdempotentComplete => (
            comps.len(),
            comps.iter().map(|c| format!("class of the projective {} summand", c.ring)).collect(),
        ),
    };
    Ok(KValue { degree: 0, group: FgAbGroup::free(rank), generator_semantics: semantics, sk1_witness: None })
}

pub fn k1(ring: &RingDesc) -> Result<KValue, KError> {
    let comps = check_k0_support(ring)?;
    let mut orders = Vec::new();
    let mut semantics = Vec::new();
    let mut witness = Sk1Certificate { ring: ring.to_string(), sizes: vec![2, 3], ..Default::default() };
    for c in &comps {
        for g in k1_generators(&c.ring)? {
            orders.push(g.order);
            semantics.push(if comps.len() > 1 { format!("{} in {}", g.semantics, c.ring) } else { g.semantics });
        }
        let cert = certify_sk1(&c.ring, &[2, 3], K1_WITNESS_SAMPLES, 0x5eed);
        if !cert.complete() {
            return Err(KError::Stalled(format!("{}: {:?}", c.ring, cert.failures)));
        }
        witness.samples += cert.samples;
        witness.reduced += cert.reduced;
        witness.max_log_length = witness.max_log_length.max(cert.max_log_length);
    }
    Ok(KValue {
        degree: 1,
        group: FgAbGroup::from_orders(&orders),
        generator_semantics: semantics,
        sk1_witness: Some(witness),
    })
}

/// `K_degree(ring)` for `degree ∈ {0, 1}`.
pub fn k_group(ring: &RingDesc, degree: i64, flavor: Flavor) -> Result<KValue, KError> {
    match degree {
        0 => k0(ring, flavor),
        1 => k1(ring),
        _ => Err(KError::Unsupported(format!("the engine computes K₀ and K₁ only, not K_{degree}"))),
    }
}

/// Coordinates of a unit of `ring` in the generators of [`k1`].
pub fn unit_class(ring: &RingDesc, x: &Elem) -> Result<Vec<BigInt>, KError> {
    let comps = crt_components(ring);
    let mut out = Vec::new();
    for c in &comps {
        out.extend(k1_coords(&c.ring, &project(x, &c.ring))?);
    }
    Ok(out)
}

fn component_unit(comps: &[Component], ring: &RingDesc, j: usize, x: &Elem) -> Elem {
    let parts: Vec<Elem> = comps
        .iter()
        .enumerate()
        .map(|(l, c)| if l == j { x.clone() } else { c.ring.one() })
        .collect();
    lift(&parts, comps, ring)
}

/// The homomorphism `K_degree(h)` in the generators of [`k0`] / [`k1`].
pub fn induced_k_map(h: &RingHom, degree: i64, flavor: Flavor) -> Result<GroupHom, KError> {
    let (s, t) = (&h.source, &h.target);
    let src = k_group(s, degree, flavor)?;
    let tgt = k_group(t, degree, flavor)?;
    let s_comps = crt_components(s);
    let t_comps = crt_components(t);
    let mut columns: Vec<Vec<BigInt>> = Vec::new();
    match degree {
        0 => {
            let free_like = flavor == Flavor::Free || s_comps.len() <= 1;
            if free_like && !(flavor == Flavor::IdempotentComplete && t_comps.len() > 1) {
                // rank-1 free object goes to the rank-1 free object
                for _ in 0..src.group.num_generators() {
                    columns.push(vec![BigInt::one(); tgt.group.num_generators()]);
                }
            } else {
                for j in 0..s_comps.len() {
                    let e = if s_comps.len() == 1 {
                        s.one()
                    } else {
                        let parts: Vec<Elem> = s_comps
                            .iter()
                            .enumerate()
                            .map(|(l, c)| if l == j { c.ring.one() } else { c.ring.zero() })
                            .collect();
                        lift(&parts, &s_comps, s)
                    };
                    let he = h.apply(&e);
                    let mut col = Vec::new();
                    for c in &t_comps {
                        let p = project(&he, &c.ring);
                        col.push(if c.ring.is_one(&p) {
                            BigInt::one()
                        } else if c.ring.is_zero(&p) {
                            BigInt::zero()
                        } else {
                            return Err(KError::Unsupported(format!("{} is not connected", c.ring)));
                        });
                    }
                    columns.push(col);
                }
            }
        }
        1 => {
            for (j, c) in s_comps.iter().enumerate() {
                for g in k1_generators(&c.ring)? {
                    let u = component_unit(&s_comps, s, j, &g.rep);
                    columns.push(unit_class(t, &h.apply(&u))?);
                }
            }
        }
        _ => unreachable!("k_group rejected the degree"),
    }
    let matrix = IntMatrix::from_columns(tgt.group.num_generators(), &columns);
    Ok(GroupHom::new(src.group, tgt.group, matrix)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::CanonicalForm;
    use crate::rings::{HomKind, Structural};

    fn form(g: &FgAbGroup) -> String {
        g.canonical_form().to_string()
    }

    #[test]
    fn k0_examples() {
        assert_eq!(form(&k0(&RingDesc::finite_field(5).unwrap(), Flavor::IdempotentComplete).unwrap().group), "Z");
        assert_eq!(form(&k0(&RingDesc::IntegersMod(6), Flavor::IdempotentComplete).unwrap().group), "Z^2");
        assert_eq!(form(&k0(&RingDesc::IntegersMod(6), Flavor::Free).unwrap().group), "Z");
        assert_eq!(form(&k0(&RingDesc::Integers, Flavor::IdempotentComplete).unwrap().group), "Z");
        assert!(k0(&RingDesc::IntegersMod(1), Flavor::Free).unwrap().group.is_trivial());
        assert!(k0(&RingDesc::Integers.laurent("t").laurent("s"), Flavor::Free).is_err());
    }

    #[test]
    fn k1_examples() {
        assert_eq!(k1(&RingDesc::Integers).unwrap().group.canonical_form(), CanonicalForm { free_rank: 0, invariant_factors: vec![2.into()] });
        assert_eq!(form(&k1(&RingDesc::finite_field(4).unwrap()).unwrap().group), "Z/3");
        assert_eq!(form(&k1(&RingDesc::finite_field(2).unwrap().laurent("t")).unwrap().group), "Z");
        assert_eq!(form(&k1(&RingDesc::finite_field(5).unwrap().laurent("t")).unwrap().group), "Z/4 + Z");
        assert_eq!(form(&k1(&RingDesc::IntegersMod(6).laurent("t")).unwrap().group), "Z/2 + Z^2");
        assert!(matches!(k1(&RingDesc::IntegersMod(4).polynomial("t")), Err(KError::Unsupported(_))));
        assert!(k1(&RingDesc::IntegersMod(1)).unwrap().group.is_trivial());
    }

    #[test]
    fn induced_map_examples() {
        let z = RingDesc::Integers;
        let ip = RingHom::structural(Structural::IPlus, &z, "t");
        assert!(induced_k_map(&ip, 0, Flavor::IdempotentComplete).unwrap().is_isomorphism());
        let f5 = RingDesc::finite_field(5).unwrap();
        let jp = RingHom::structural(Structural::JPlus, &f5, "t");
        let m = induced_k_map(&jp, 1, Flavor::IdempotentComplete).unwrap();
        assert!(m.is_injective() && !m.is_surjective());
        let zt = z.polynomial("t");
        let ev1 = RingHom::new(zt, z.clone(), HomKind::VarEval(z.one())).unwrap();
        assert!(induced_k_map(&ev1, 1, Flavor::IdempotentComplete).unwrap().is_isomorphism());
        // ℤ → ℤ/6 on K₀: [ℤ] ↦ [ℤ/6] = e₁ + e₂
        let red = RingHom::new(z.clone(), RingDesc::IntegersMod(6), HomKind::Reduction).unwrap();
        let k = induced_k_map(&red, 0, Flavor::IdempotentComplete).unwrap();
        assert_eq!(k.matrix().to_rows(), vec![vec![BigInt::one()], vec![BigInt::one()]]);
        // ℤ → ℤ/6 on K₁: -1 ↦ (1, 1) in ℤ/1 ⊕ ℤ/2
        let k = induced_k_map(&red, 1, Flavor::IdempotentComplete).unwrap();
        assert_eq!(k.codomain().canonical_form().to_string(), "Z/2");
        assert!(k.is_surjective());
    }
}
