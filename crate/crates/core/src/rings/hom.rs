use std::fmt;

use super::ring::{Elem, LaurentElem, RingAutomorphism, RingDesc, VarKind};
use super::RingError;

/// The structural maps between a ring and its one-variable extensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Structural {
    /// `R → R[t,t⁻¹]`
    I0,
    /// `R → R[t]`
    IPlus,
    /// `R → R[t⁻¹]`
    IMinus,
    /// `R[t] → R[t,t⁻¹]`
    JPlus,
    /// `R[t⁻¹] → R[t,t⁻¹]`
    JMinus,
    /// `R[t] → R`, `t ↦ 0`
    Ev0Plus,
    /// `R[t⁻¹] → R`, `t⁻¹ ↦ 0`
    Ev0Minus,
}

impl Structural {
    pub const ALL: [Structural; 7] = [
        Structural::I0,
        Structural::IPlus,
        Structural::IMinus,
        Structural::JPlus,
        Structural::JMinus,
        Structural::Ev0Plus,
        Structural::Ev0Minus,
    ];

    /// `(source kind, target kind)`, with `None` meaning the base ring itself.
    pub fn endpoints(self) -> (Option<VarKind>, Option<VarKind>) {
        use VarKind::*;
        match self {
            Structural::I0 => (None, Some(Laurent)),
            Structural::IPlus => (None, Some(Polynomial)),
            Structural::IMinus => (None, Some(NegPolynomial)),
            Structural::JPlus => (Some(Polynomial), Some(Laurent)),
            Structural::JMinus => (Some(NegPolynomial), Some(Laurent)),
            Structural::Ev0Plus => (Some(Polynomial), None),
            Structural::Ev0Minus => (Some(NegPolynomial), None),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Structural::I0 => "i0",
            Structural::IPlus => "i_plus",
            Structural::IMinus => "i_minus",
            Structural::JPlus => "j_plus",
            Structural::JMinus => "j_minus",
            Structural::Ev0Plus => "ev0_plus",
            Structural::Ev0Minus => "ev0_minus",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomKind {
    Identity,
    Structural(Structural),
    /// Evaluate the outermost variable at a base element (a unit when negative powers occur).
    VarEval(Elem),
    /// Embedding of finite fields sending the source generator to `root`.
    FieldEmbedding { root: u64 },
    /// `ℤ → ℤ/n` or `ℤ/m → ℤ/n` with `n | m`.
    Reduction,
    /// Apply a base homomorphism to the coefficients of the outermost variable.
    Coefficientwise(Box<RingHom>),
    Automorphism(RingAutomorphism),
}

/// An evaluable ring homomorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct RingHom {
    pub source: RingDesc,
    pub target: RingDesc,
    pub kind: HomKind,
}

fn with_kind(base: &RingDesc, var: &str, kind: Option<VarKind>, twist: Option<&RingAutomorphism>) -> Result<RingDesc, RingError> {
    match (kind, twist) {
        (None, _) => Ok(base.clone()),
        (Some(k), None) => Ok(base.extend(var, k)),
        (Some(k), Some(t)) => base.twisted(var, k, t.clone()),
    }
}

impl RingHom {
    pub fn identity(r: &RingDesc) -> Self {
        RingHom {
            source: r.clone(),
            target: r.clone(),
            kind: HomKind::Identity,
        }
    }

    /// A structural map for the variable `var` adjoined to `base`.
    pub fn structural(kind: Structural, base: &RingDesc, var: &str) -> Self {
        Self::structural_twisted(kind, base, var, None).expect("untwisted structural maps always exist")
    }

    pub fn structural_twisted(
        kind: Structural,
        base: &RingDesc,
        var: &str,
        twist: Option<&RingAutomorphism>,
    ) -> Result<Self, RingError> {
        let (s, t) = kind.endpoints();
        Ok(RingHom {
            source: with_kind(base, var, s, twist)?,
            target: with_kind(base, var, t, twist)?,
            kind: HomKind::Structural(kind),
        })
    }

    /// Validating constructor.
    pub fn new(source: RingDesc, target: RingDesc, kind: HomKind) -> Result<Self, RingError> {
        let unrelated = || RingError::Unrelated(format!("{kind:?}: {source} -> {target}"));
        match &kind {
            HomKind::Identity => {
                if source != target {
                    return Err(unrelated());
                }
            }
            HomKind::Structural(k) => {
                let ext = source.extension().or(target.extension()).ok_or_else(unrelated)?;
                let base = &ext.base;
                let expect = RingHom::structural_twisted(*k, base, &ext.var, ext.twist.as_ref())?;
                if expect.source != source || expect.target != target {
                    return Err(unrelated());
                }
            }
            HomKind::VarEval(v) => {
                let e = source.extension().ok_or_else(unrelated)?;
                if e.base != target || !target.contains(v) || e.twist.as_ref().is_some_and(|t| !t.is_identity()) {
                    return Err(unrelated());
                }
                if e.kind != VarKind::Polynomial && !target.is_unit(v)? {
                    return Err(RingError::Invalid("evaluation of negative powers needs a unit".into()));
                }
            }
            HomKind::FieldEmbedding { root } => {
                let (RingDesc::FiniteField(a), RingDesc::FiniteField(b)) = (&source, &target) else {
                    return Err(unrelated());
                };
                let valid = if a.degree() == 1 {
                    *root == b.from_int(a.generator() as i64)
                } else {
                    // root must satisfy the source defining polynomial
                    let mut acc = b.pow(*root, a.degree() as u64);
                    for (i, &c) in a.modulus().iter().enumerate() {
                        acc = b.add(acc, b.mul(b.from_int(c as i64), b.pow(*root, i as u64)));
                    }
                    a.characteristic() == b.characteristic() && b.degree() % a.degree() == 0 && acc == 0
                };
                if !valid {
                    return Err(unrelated());
                }
            }
            HomKind::Reduction => match (&source, &target) {
                (RingDesc::Integers, RingDesc::IntegersMod(_)) => {}
                (RingDesc::IntegersMod(m), RingDesc::IntegersMod(n)) if m % n == 0 => {}
                _ => return Err(unrelated()),
            },
            HomKind::Coefficientwise(h) => {
                let (Some(a), Some(b)) = (source.extension(), target.extension()) else {
                    return Err(unrelated());
                };
                if a.kind != b.kind || a.var != b.var || a.twist.is_some() || b.twist.is_some() {
                    return Err(unrelated());
                }
                if h.source != a.base || h.target != b.base {
                    return Err(unrelated());
                }
            }
            HomKind::Automorphism(phi) => {
                if source != target {
                    return Err(unrelated());
                }
                phi.check_on(&source)?;
            }
        }
        Ok(RingHom { source, target, kind })
    }

    /// Embedding `GF(q₁) → GF(q₂)`, if `q₂` is a power of `q₁`.
    pub fn field_embedding(source: &RingDesc, target: &RingDesc) -> Result<Self, RingError> {
        let (RingDesc::FiniteField(a), RingDesc::FiniteField(b)) = (source, target) else {
            return Err(RingError::Unrelated(format!("{source} -> {target}")));
        };
        let root = b
            .embedding_root(a)
            .ok_or_else(|| RingError::Unrelated(format!("{source} does not embed in {target}")))?;
        RingHom::new(source.clone(), target.clone(), HomKind::FieldEmbedding { root })
    }

    pub fn apply(&self, x: &Elem) -> Elem {
        debug_assert!(self.source.contains(x), "element outside the source ring");
        match &self.kind {
            HomKind::Identity => x.clone(),
            HomKind::Structural(k) => match k {
                Structural::I0 | Structural::IPlus | Structural::IMinus => {
                    let base = &self.source;
                    Elem::Laurent(LaurentElem::monomial(x.clone(), 0, base))
                }
                Structural::JPlus | Structural::JMinus => x.clone(),
                Structural::Ev0Plus | Structural::Ev0Minus => match x {
                    Elem::Laurent(l) => l.coeff(0).cloned().unwrap_or_else(|| self.target.zero()),
                    _ => unreachable!("extension element expected"),
                },
            },
            HomKind::VarEval(v) => {
                let Elem::Laurent(l) = x else { unreachable!() };
                let r = &self.target;
                let inv = r.unit_inverse(v).ok().flatten();
                let mut acc = r.zero();
                for (k, c) in l.terms() {
                    let p = if k >= 0 {
                        r.pow(v, k as u64)
                    } else {
                        r.pow(inv.as_ref().expect("validated unit"), (-k) as u64)
                    };
                    acc = r.add(&acc, &r.mul(c, &p));
                }
                acc
            }
            HomKind::FieldEmbedding { root } => {
                let (RingDesc::FiniteField(a), RingDesc::FiniteField(b), Elem::Ff(v)) = (&self.source, &self.target, x)
                else {
                    unreachable!()
                };
                Elem::Ff(b.embed_from(a, *root, *v))
            }
            HomKind::Reduction => match x {
                Elem::Int(n) => self.target.from_bigint(n),
                Elem::Mod(n) => self.target.from_int(*n as i64),
                _ => unreachable!(),
            },
            HomKind::Coefficientwise(h) => {
                let Elem::Laurent(l) = x else { unreachable!() };
                let tb = &self.target.extension().expect("extension target").base;
                Elem::Laurent(LaurentElem::from_terms(l.terms().map(|(k, c)| (k, h.apply(c))), tb))
            }
            HomKind::Automorphism(phi) => phi.apply(&self.source, x),
        }
    }
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match &self.kind {
            HomKind::Structural(s) => s.name().to_string(),
            other => format!("{other:?}"),
        };
        write!(f, "{k}: {} -> {}", self.source, self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn structural_examples() {
        let z = RingDesc::Integers;
        let zt = z.polynomial("t");
        let x = zt.add(&zt.from_int(5), &zt.monomial(z.from_int(3), 1).unwrap());
        let ev = RingHom::structural(Structural::Ev0Plus, &z, "t");
        assert_eq!(ev.apply(&x), z.from_int(5));
        let jp = RingHom::structural(Structural::JPlus, &z, "t");
        assert_eq!(jp.target, z.laurent("t"));
        assert!(jp.target.contains(&jp.apply(&x)));
        let eval = RingHom::new(zt.clone(), z.clone(), HomKind::VarEval(z.from_int(1))).unwrap();
        assert_eq!(eval.apply(&x), z.from_int(8));
    }

    #[test]
    fn composite_identities_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for base in [RingDesc::Integers, RingDesc::finite_field(4).unwrap(), RingDesc::IntegersMod(6)] {
            let h = |k| RingHom::structural(k, &base, "t");
            for _ in 0..50 {
                let a = base.random(&mut rng, 9, 2);
                assert_eq!(h(Structural::Ev0Plus).apply(&h(Structural::IPlus).apply(&a)), a);
                assert_eq!(h(Structural::Ev0Minus).apply(&h(Structural::IMinus).apply(&a)), a);
                let i0 = h(Structural::I0).apply(&a);
                assert_eq!(h(Structural::JPlus).apply(&h(Structural::IPlus).apply(&a)), i0);
                assert_eq!(h(Structural::JMinus).apply(&h(Structural::IMinus).apply(&a)), i0);
            }
        }
    }

    #[test]
    fn unrelated_pairs_rejected() {
        let z = RingDesc::Integers;
        let f2 = RingDesc::finite_field(2).unwrap();
        assert!(RingHom::new(z.clone(), f2.clone(), HomKind::Identity).is_err());
        assert!(RingHom::new(z.clone(), z.laurent("s"), HomKind::Structural(Structural::IPlus)).is_err());
        assert!(RingHom::field_embedding(&RingDesc::finite_field(4).unwrap(), &RingDesc::finite_field(8).unwrap()).is_err());
        assert!(RingHom::new(z.clone(), RingDesc::IntegersMod(6), HomKind::Reduction).is_ok());
    }
}
