use std::fmt;
use std::sync::Arc;

use crate::rings::{RMatrix, RingAutomorphism, RingDesc, VarKind};

use super::category::{Category, IdemObject, LaurentMorphism, Morphism, Object};
use super::AddCatError;

/// The structural functors between matrix categories and their Laurent, idempotent and
/// interval companions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctorKind {
    Identity,
    /// `A → A[t, t⁻¹]`, `f ↦ f·t⁰`.
    I0,
    /// `A → A[t]`.
    IPlus,
    /// `A → A[t⁻¹]`.
    IMinus,
    /// `A[t] → A[t, t⁻¹]`.
    JPlus,
    /// `A[t⁻¹] → A[t, t⁻¹]`.
    JMinus,
    /// `A[t] → A`, `Σ fₖ tᵏ ↦ f₀`.
    Ev0Plus,
    /// `A[t⁻¹] → A`.
    Ev0Minus,
    /// `A → Idem(A)`, `n ↦ (n, id)`.
    IdemEta,
    /// `A → A × I` at the object `0`.
    J0,
    /// `A → A × I` at the object `1`.
    J1,
}

/// An additive functor between two of the constructed categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub kind: FunctorKind,
    pub source: Category,
    pub target: Category,
}

/// Builds `kind` on `source`. The Laurent companions inherit `twist` where they are created
/// from a plain matrix category, and keep the source twist otherwise.
pub fn build_functor(kind: FunctorKind, source: &Category, twist: Option<RingAutomorphism>) -> Result<Functor, AddCatError> {
    use FunctorKind::*;
    let inapplicable = || AddCatError::Inapplicable(format!("{kind:?} on {source:?}"));
    let laurent = |base: &RingDesc, kind, twist| Category::Laurent {
        base: base.clone(),
        kind,
        twist,
    };
    if let Some(phi) = &twist {
        phi.check_on(source.ring())?;
    }
    let target = match (kind, source) {
        (Identity, c) => c.clone(),
        (I0, Category::Mat(r)) => laurent(r, VarKind::Laurent, twist),
        (IPlus, Category::Mat(r)) => laurent(r, VarKind::Polynomial, twist),
        (IMinus, Category::Mat(r)) => laurent(r, VarKind::NegPolynomial, twist),
        (JPlus, Category::Laurent { base, kind: VarKind::Polynomial, twist })
        | (JMinus, Category::Laurent { base, kind: VarKind::NegPolynomial, twist }) => {
            laurent(base, VarKind::Laurent, twist.clone())
        }
        (Ev0Plus, Category::Laurent { base, kind: VarKind::Polynomial, .. })
        | (Ev0Minus, Category::Laurent { base, kind: VarKind::NegPolynomial, .. }) => Category::Mat(base.clone()),
        (IdemEta, Category::Mat(r)) => Category::Idem(r.clone()),
        (J0 | J1, c) if !matches!(c, Category::Interval(_)) => Category::Interval(Box::new(c.clone())),
        _ => return Err(inapplicable()),
    };
    Ok(Functor {
        kind,
        source: source.clone(),
        target,
    })
}

impl Functor {
    pub fn apply_object(&self, a: &Object) -> Result<Object, AddCatError> {
        use FunctorKind::*;
        if !self.source.contains_object(a) {
            return Err(AddCatError::NotInCategory(format!("{a:?}")));
        }
        Ok(match (self.kind, a) {
            (Identity, _) => a.clone(),
            (I0 | IPlus | IMinus | JPlus | JMinus | Ev0Plus | Ev0Minus, Object::Free(n)) => Object::Free(*n),
            (IdemEta, Object::Free(n)) => Object::Idem(IdemObject::free(self.source.ring(), *n)),
            (J0, _) => Object::Interval(Box::new(a.clone()), 0),
            (J1, _) => Object::Interval(Box::new(a.clone()), 1),
            _ => return Err(AddCatError::NotInCategory(format!("{a:?}"))),
        })
    }

    pub fn apply(&self, f: &Morphism) -> Result<Morphism, AddCatError> {
        use FunctorKind::*;
        if !self.source.contains(f) {
            return Err(AddCatError::NotInCategory(format!("{f:?}")));
        }
        let r = self.source.ring();
        Ok(match (self.kind, f) {
            (Identity, _) => f.clone(),
            (I0 | IPlus | IMinus, Morphism::Plain(m)) => Morphism::Laurent(LaurentMorphism::monomial(r, m.clone(), 0)),
            (JPlus | JMinus, Morphism::Laurent(l)) => Morphism::Laurent(l.clone()),
            (Ev0Plus | Ev0Minus, Morphism::Laurent(l)) => {
                Morphism::Plain(l.term(0).cloned().unwrap_or_else(|| RMatrix::zeros(r, l.codomain, l.domain)))
            }
            (IdemEta, Morphism::Plain(m)) => Morphism::Idem {
                domain: IdemObject::free(r, m.cols()),
                codomain: IdemObject::free(r, m.rows()),
                matrix: m.clone(),
            },
            (J0, _) => Morphism::Interval {
                inner: Box::new(f.clone()),
                from: 0,
                to: 0,
            },
            (J1, _) => Morphism::Interval {
                inner: Box::new(f.clone()),
                from: 1,
                to: 1,
            },
            _ => return Err(AddCatError::NotInCategory(format!("{f:?}"))),
        })
    }
}

type ComponentRule = Arc<dyn Fn(&Object) -> Result<Morphism, AddCatError> + Send + Sync>;

/// A family of morphisms `T_A: F₀(A) → F₁(A)` given by a component rule.
#[derive(Clone)]
pub struct NatTrans {
    component: ComponentRule,
}

impl NatTrans {
    pub fn new(component: impl Fn(&Object) -> Result<Morphism, AddCatError> + Send + Sync + 'static) -> Self {
        NatTrans {
            component: Arc::new(component),
        }
    }

    /// `T_A = id_{F(A)}` in the category `cat`.
    pub fn identity(f: &Functor) -> Self {
        let f = f.clone();
        NatTrans::new(move |a| f.target.identity(&f.apply_object(a)?))
    }

    pub fn component(&self, a: &Object) -> Result<Morphism, AddCatError> {
        (self.component)(a)
    }
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NatTrans(..)")
    }
}

/// Two-sided inverse of `f` in `cat`, when one can be computed.
pub fn invert_morphism(cat: &Category, f: &Morphism) -> Result<Morphism, AddCatError> {
    let r = cat.ring();
    let candidate = match f {
        Morphism::Plain(m) => m.inverse(r).map(Morphism::Plain),
        Morphism::Laurent(l) => invert_laurent(cat, l)?.map(Morphism::Laurent),
        Morphism::Idem { domain, codomain, matrix } => {
            // an inverse of p'·g·p with g invertible on the ambient is found only in the free case
            if domain.idempotent.is_identity(r) && codomain.idempotent.is_identity(r) {
                matrix.inverse(r).map(|m| Morphism::Idem {
                    domain: codomain.clone(),
                    codomain: domain.clone(),
                    matrix: m,
                })
            } else {
                None
            }
        }
        Morphism::Interval { inner, from, to } => {
            let Category::Interval(c) = cat else {
                return Err(AddCatError::NotInCategory("interval morphism".into()));
            };
            Some(Morphism::Interval {
                inner: Box::new(invert_morphism(c, inner)?),
                from: *to,
                to: *from,
            })
        }
    };
    let g = candidate.ok_or(AddCatError::NotInvertible)?;
    let one = cat.compose(&g, f)?;
    let other = cat.compose(f, &g)?;
    if one == cat.identity(&cat.domain(f))? && other == cat.identity(&cat.codomain(f))? {
        Ok(g)
    } else {
        Err(AddCatError::NotInvertible)
    }
}

fn invert_laurent(cat: &Category, l: &LaurentMorphism) -> Result<Option<LaurentMorphism>, AddCatError> {
    let r = cat.ring();
    if l.domain != l.codomain {
        return Ok(None);
    }
    let terms: Vec<_> = l.terms().collect();
    if let [(k, m)] = terms[..] {
        let Some(inv) = m.inverse(r) else { return Ok(None) };
        let inv = match cat.twist() {
            Some(phi) if !phi.is_identity() => inv.map_with(|x| phi.apply_pow(r, x, -k)),
            _ => inv,
        };
        let Category::Laurent { kind, .. } = cat else { return Ok(None) };
        return Ok(kind.allows(-k).then(|| LaurentMorphism::monomial(r, inv, -k)));
    }
    // general untwisted Laurent case: invert over R[t, t⁻¹]
    match cat {
        Category::Laurent { kind: VarKind::Laurent, twist, .. } if twist.as_ref().is_none_or(|p| p.is_identity()) => {
            let lr = r.laurent("t");
            let m = l.to_ring_matrix(r, &lr);
            Ok(m.inverse(&lr).map(|inv| LaurentMorphism::from_ring_matrix(r, &inv)))
        }
        _ => Ok(None),
    }
}

/// The functor `H: A × I → B` with `H ∘ j₀ = F₀` and `H ∘ j₁ = F₁` induced by a natural
/// isomorphism `T: F₀ ⇒ F₁`.
#[derive(Clone, Debug)]
pub struct IntervalFunctor {
    pub f0: Functor,
    pub f1: Functor,
    transformation: NatTrans,
    pub source: Category,
}

impl IntervalFunctor {
    fn component(&self, a: &Object, b: u8) -> Result<Morphism, AddCatError> {
        if b == 0 {
            self.f0.target.identity(&self.f0.apply_object(a)?)
        } else {
            self.transformation.component(a)
        }
    }

    pub fn apply_object(&self, a: &Object) -> Result<Object, AddCatError> {
        match a {
            Object::Interval(inner, 0) => self.f0.apply_object(inner),
            Object::Interval(inner, 1) => self.f1.apply_object(inner),
            _ => Err(AddCatError::NotInCategory(format!("{a:?}"))),
        }
    }

    /// `H(f, b → b') = T^{b'} ∘ F₀(f) ∘ (T^b)⁻¹` with `T⁰ = id`, `T¹ = T`.
    pub fn apply(&self, f: &Morphism) -> Result<Morphism, AddCatError> {
        let Morphism::Interval { inner, from, to } = f else {
            return Err(AddCatError::NotInCategory(format!("{f:?}")));
        };
        let Category::Interval(a_cat) = &self.source else { unreachable!() };
        let b = &self.f0.target;
        let dom = a_cat.domain(inner);
        let cod = a_cat.codomain(inner);
        let right = invert_morphism(b, &self.component(&dom, *from)?)?;
        let left = self.component(&cod, *to)?;
        b.compose(&left, &b.compose(&self.f0.apply(inner)?, &right)?)
    }
}

/// Builds `H` after checking that every sampled component of `T` is an isomorphism and that
/// `T` is natural on the sampled morphisms; then verifies `H ∘ jᵦ = Fᵦ` on the samples.
pub fn natiso_to_interval_functor(
    f0: &Functor,
    f1: &Functor,
    t: NatTrans,
    sample_objects: &[Object],
    sample_morphisms: &[Morphism],
) -> Result<IntervalFunctor, AddCatError> {
    if f0.source != f1.source || f0.target != f1.target {
        return Err(AddCatError::Inapplicable("functors are not parallel".into()));
    }
    let a_cat = &f0.source;
    let b = &f0.target;
    let mut objects: Vec<Object> = sample_objects.to_vec();
    for f in sample_morphisms {
        objects.push(a_cat.domain(f));
        objects.push(a_cat.codomain(f));
    }
    for a in &objects {
        let ta = t.component(a)?;
        if !b.contains(&ta) || b.domain(&ta) != f0.apply_object(a)? || b.codomain(&ta) != f1.apply_object(a)? {
            return Err(AddCatError::NotNatural(format!("component at {a:?} has the wrong type")));
        }
        invert_morphism(b, &ta)?;
    }
    for f in sample_morphisms {
        let lhs = b.compose(&t.component(&a_cat.codomain(f))?, &f0.apply(f)?)?;
        let rhs = b.compose(&f1.apply(f)?, &t.component(&a_cat.domain(f))?)?;
        if lhs != rhs {
            return Err(AddCatError::NotNatural(format!("square fails on {f:?}")));
        }
    }
    let h = IntervalFunctor {
        f0: f0.clone(),
        f1: f1.clone(),
        transformation: t,
        source: Category::Interval(Box::new(a_cat.clone())),
    };
    for (kind, fb) in [(FunctorKind::J0, f0), (FunctorKind::J1, f1)] {
        let j = build_functor(kind, a_cat, None)?;
        for f in sample_morphisms {
            if h.apply(&j.apply(f)?)? != fb.apply(f)? {
                return Err(AddCatError::NotNatural(format!("H∘{kind:?} differs from its functor on {f:?}")));
            }
        }
        for a in &objects {
            if h.apply_object(&j.apply_object(a)?)? != fb.apply_object(a)? {
                return Err(AddCatError::NotNatural(format!("H∘{kind:?} differs on object {a:?}")));
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn samples(cat: &Category) -> Vec<Morphism> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        (0..20).map(|k| cat.random_morphism(&mut rng, 1 + k % 3, 1 + (k / 3) % 3, 2)).collect()
    }

    #[test]
    fn structural_examples() {
        let z = RingDesc::Integers;
        let mat = Category::Mat(z.clone());
        let f = RMatrix::from_rows(vec![vec![z.from_int(4), z.from_int(-1)]]);
        let ip = build_functor(FunctorKind::IPlus, &mat, None).unwrap();
        let g = ip.apply(&Morphism::Plain(f.clone())).unwrap();
        assert_eq!(g, Morphism::Laurent(LaurentMorphism::monomial(&z, f.clone(), 0)));
        let ev = build_functor(FunctorKind::Ev0Plus, &ip.target, None).unwrap();
        let h = LaurentMorphism::from_terms(&z, 2, 1, [(0, f.clone()), (3, f.clone())]).unwrap();
        assert_eq!(ev.apply(&Morphism::Laurent(h)).unwrap(), Morphism::Plain(f));
        let eta = build_functor(FunctorKind::IdemEta, &mat, None).unwrap();
        assert_eq!(eta.apply_object(&Object::Free(3)).unwrap(), Object::Idem(IdemObject::free(&z, 3)));
        assert!(build_functor(FunctorKind::Ev0Plus, &mat, None).is_err());
        assert!(build_functor(FunctorKind::JPlus, &ip.target, None).is_ok());
        assert!(build_functor(FunctorKind::JMinus, &ip.target, None).is_err());
    }

    #[test]
    fn identity_transformation_gives_projection() {
        let mat = Category::Mat(RingDesc::Integers);
        let id = build_functor(FunctorKind::Identity, &mat, None).unwrap();
        let s = samples(&mat);
        let h = natiso_to_interval_functor(&id, &id, NatTrans::identity(&id), &[Object::Free(2)], &s).unwrap();
        for f in &s {
            for (a, b) in [(0, 1), (1, 0), (1, 1)] {
                let g = Morphism::Interval { inner: Box::new(f.clone()), from: a, to: b };
                assert_eq!(&h.apply(&g).unwrap(), f);
            }
        }
    }

    #[test]
    fn shift_by_t_gives_interval_functor() {
        let z = RingDesc::Integers;
        let mat = Category::Mat(z.clone());
        let i0 = build_functor(FunctorKind::I0, &mat, None).unwrap();
        let zc = z.clone();
        let t = NatTrans::new(move |a| match a {
            Object::Free(n) => Ok(Morphism::Laurent(LaurentMorphism::identity_times_t(&zc, *n, 1))),
            _ => Err(AddCatError::NotInCategory(format!("{a:?}"))),
        });
        let s = samples(&mat);
        let h = natiso_to_interval_functor(&i0, &i0, t, &[Object::Free(1)], &s).unwrap();
        // the structural iso (A,0) → (A,1) goes to id·t
        let iso = Morphism::Interval { inner: Box::new(Morphism::Plain(RMatrix::identity(&z, 2))), from: 0, to: 1 };
        assert_eq!(h.apply(&iso).unwrap(), Morphism::Laurent(LaurentMorphism::identity_times_t(&z, 2, 1)));
    }

    #[test]
    fn non_invertible_component_is_rejected() {
        let z = RingDesc::Integers;
        let mat = Category::Mat(z.clone());
        let id = build_functor(FunctorKind::Identity, &mat, None).unwrap();
        let zc = z.clone();
        let t = NatTrans::new(move |a| match a {
            Object::Free(n) => Ok(Morphism::Plain(RMatrix::identity(&zc, *n).map_with(|x| zc.scale_int(&2.into(), x)))),
            _ => Err(AddCatError::NotInCategory(String::new())),
        });
        let err = natiso_to_interval_functor(&id, &id, t, &[Object::Free(1)], &samples(&mat)).unwrap_err();
        assert_eq!(err, AddCatError::NotInvertible);
    }
}
