use crate::rings::{RMatrix, RingAutomorphism, RingDesc, VarKind};

use super::category::{Category, LaurentMorphism};
use super::AddCatError;

/// Search bound for the nilpotency exponent when no witness is supplied.
pub const DEFAULT_NIL_SEARCH_BOUND: usize = 16;

/// An object `(A, ν: Φ(A) → A)` of `Nil(matcat(R), Φ)`, where `Φ` acts entrywise and fixes objects.
///
/// Nilpotency convention: `ν ∘ Φ(ν) ∘ ⋯ ∘ Φⁿ⁻¹(ν) = 0` for the witness `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilObject {
    pub ring: RingDesc,
    pub twist: Option<RingAutomorphism>,
    pub carrier: usize,
    pub nu: RMatrix,
    pub witness: usize,
}

/// `ν ∘ Φ(ν) ∘ ⋯ ∘ Φⁿ⁻¹(ν)`; the empty composite (`n = 0`) is the identity.
pub fn twisted_power(ring: &RingDesc, twist: Option<&RingAutomorphism>, nu: &RMatrix, n: usize) -> RMatrix {
    let mut acc = RMatrix::identity(ring, nu.rows());
    for k in 0..n {
        let term = match twist {
            Some(phi) if !phi.is_identity() => nu.map_with(|x| phi.apply_pow(ring, x, k as i64)),
            _ => nu.clone(),
        };
        acc = acc.mul(ring, &term);
    }
    acc
}

impl NilObject {
    pub fn new(
        ring: &RingDesc,
        twist: Option<RingAutomorphism>,
        nu: RMatrix,
        witness: Option<usize>,
    ) -> Result<Self, AddCatError> {
        Self::with_search_bound(ring, twist, nu, witness, DEFAULT_NIL_SEARCH_BOUND)
    }

    pub fn with_search_bound(
        ring: &RingDesc,
        twist: Option<RingAutomorphism>,
        nu: RMatrix,
        witness: Option<usize>,
        bound: usize,
    ) -> Result<Self, AddCatError> {
        if !nu.is_square() {
            return Err(AddCatError::Shape("ν must be square".into()));
        }
        if let Some(phi) = &twist {
            phi.check_on(ring)?;
        }
        let found = match witness {
            Some(n) => (twisted_power(ring, twist.as_ref(), &nu, n).is_zero(ring)).then_some(n),
            None => (0..=bound).find(|&n| twisted_power(ring, twist.as_ref(), &nu, n).is_zero(ring)),
        };
        let witness = found.ok_or_else(|| {
            AddCatError::NotNilpotent(match witness {
                Some(n) => format!("the {n}-fold twisted composite is nonzero"),
                None => format!("no twisted composite of length ≤ {bound} vanishes"),
            })
        })?;
        Ok(NilObject {
            ring: ring.clone(),
            twist,
            carrier: nu.rows(),
            nu,
            witness,
        })
    }

    /// `Φ(A) --(id·t − ν·t⁰)--> A` in `A_Φ[t]`.
    pub fn chi_complex(&self) -> ChiComplex {
        let r = &self.ring;
        let differential = LaurentMorphism::from_terms(
            r,
            self.carrier,
            self.carrier,
            [
                (0, self.nu.map_with(|x| r.neg(x))),
                (1, RMatrix::identity(r, self.carrier)),
            ],
        )
        .expect("square terms");
        ChiComplex {
            category: Category::Laurent {
                base: r.clone(),
                kind: VarKind::Polynomial,
                twist: self.twist.clone(),
            },
            degree1: self.carrier,
            degree0: self.carrier,
            differential,
        }
    }
}

/// The two-term chain complex `χ(A, ν)` concentrated in degrees 1 and 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiComplex {
    pub category: Category,
    pub degree1: usize,
    pub degree0: usize,
    pub differential: LaurentMorphism,
}

pub fn chi_complex(nil: &NilObject) -> ChiComplex {
    nil.chi_complex()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_endomap() {
        let z = RingDesc::Integers;
        let nil = NilObject::new(&z, None, RMatrix::zeros(&z, 1, 1), None).unwrap();
        assert_eq!(nil.witness, 1);
        let chi = nil.chi_complex();
        assert_eq!(chi.differential, LaurentMorphism::identity_times_t(&z, 1, 1));
    }

    #[test]
    fn two_is_not_nilpotent() {
        let z = RingDesc::Integers;
        let two = RMatrix::from_rows(vec![vec![z.from_int(2)]]);
        assert!(matches!(NilObject::new(&z, None, two.clone(), None), Err(AddCatError::NotNilpotent(_))));
        assert!(NilObject::new(&z, None, two, Some(5)).is_err());
    }

    #[test]
    fn strictly_upper_triangular() {
        let z = RingDesc::Integers;
        let nu = RMatrix::from_rows(vec![vec![z.zero(), z.from_int(3)], vec![z.zero(), z.zero()]]);
        let nil = NilObject::new(&z, None, nu.clone(), Some(2)).unwrap();
        let d = nil.chi_complex().differential;
        assert_eq!(d.term(1), Some(&RMatrix::identity(&z, 2)));
        assert_eq!(d.term(0), Some(&nu.map_with(|x| z.neg(x))));
        assert!(NilObject::new(&z, None, nu, Some(1)).is_err());
    }
}
