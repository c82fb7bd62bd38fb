use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::rings::{prime_power, Elem, Extension, LaurentElem, RingDesc, VarKind};

use super::KError;

/// Euclidean norm attached to a ring class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Norm {
    /// `|x|` on ℤ.
    Abs,
    /// Degree in the variable (`-bottom` for `R[t⁻¹]`).
    Degree,
    /// `top − bottom` on `F[t, t⁻¹]`.
    Span,
    /// `0` on units, `1` on other nonzero elements (fields and local rings).
    UnitPivot,
}

/// Classification of a ring for the independent engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RingClass {
    /// `ℤ/1`.
    Zero,
    /// A finite field of order `q`.
    Field { q: u64 },
    Integers,
    /// `ℤ/pᵏ`, `k ≥ 2`.
    LocalZModPk { p: u64, k: u32 },
    /// A Chinese-remainder product of connected components.
    ProductOfLocals { components: Vec<RingClass> },
    /// `F_q[t]` or `F_q[t⁻¹]`.
    EuclideanDomain { q: u64, norm: Norm },
    /// `F_q[t, t⁻¹]`.
    LaurentOverField { q: u64 },
    /// `ℤ[t]`, `ℤ[t⁻¹]` or `ℤ[t, t⁻¹]`.
    IntegralExtension { kind: VarKind },
    /// `ℤ/pᵏ[t^±]` with `k ≥ 2`: K₀ only.
    LocalExtension { p: u64, k: u32, kind: VarKind },
    Unsupported { reason: String },
}

impl fmt::Display for RingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl RingClass {
    pub fn norm(&self) -> Option<Norm> {
        match self {
            RingClass::Field { .. } | RingClass::LocalZModPk { .. } => Some(Norm::UnitPivot),
            RingClass::Integers => Some(Norm::Abs),
            RingClass::EuclideanDomain { norm, .. } => Some(*norm),
            RingClass::LaurentOverField { .. } => Some(Norm::Span),
            _ => None,
        }
    }

    pub fn is_supported(&self) -> bool {
        match self {
            RingClass::Unsupported { .. } => false,
            RingClass::ProductOfLocals { components } => components.iter().all(RingClass::is_supported),
            _ => true,
        }
    }
}

/// One Chinese-remainder component of a ring: the same variable chain over `ℤ/pᵏ`
/// (or the ring itself when its ground ring is not a composite `ℤ/n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub ring: RingDesc,
    /// `pᵏ` when the ground ring was split.
    pub modulus: Option<u64>,
}

fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut pk = 1;
            while n.is_multiple_of(p) {
                n /= p;
                pk *= p;
            }
            out.push(pk);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn rebuild(ring: &RingDesc, ground: &RingDesc) -> RingDesc {
    match ring {
        RingDesc::Extension(e) => RingDesc::Extension(Arc::new(Extension {
            base: rebuild(&e.base, ground),
            var: e.var.clone(),
            kind: e.kind,
            twist: e.twist.clone(),
        })),
        _ => ground.clone(),
    }
}

/// Components in increasing order of their prime. The zero ring has no components.
pub fn crt_components(ring: &RingDesc) -> Vec<Component> {
    match ring.ground() {
        RingDesc::IntegersMod(1) => Vec::new(),
        RingDesc::IntegersMod(n) => {
            let parts = factor(*n);
            if parts.len() == 1 {
                return vec![Component {
                    ring: ring.clone(),
                    modulus: None,
                }];
            }
            parts
                .into_iter()
                .map(|m| Component {
                    ring: rebuild(ring, &RingDesc::IntegersMod(m)),
                    modulus: Some(m),
                })
                .collect()
        }
        _ => vec![Component {
            ring: ring.clone(),
            modulus: None,
        }],
    }
}

/// Image of `x ∈ ring` in a component ring.
pub fn project(x: &Elem, component: &RingDesc) -> Elem {
    match (component, x) {
        (RingDesc::Extension(e), Elem::Laurent(l)) => {
            Elem::Laurent(LaurentElem::from_terms(l.terms().map(|(k, c)| (k, project(c, &e.base))), &e.base))
        }
        (RingDesc::IntegersMod(m), Elem::Mod(v)) => Elem::Mod(v % m),
        _ => x.clone(),
    }
}

/// The element of `ring` with the given component images.
pub fn lift(parts: &[Elem], components: &[Component], ring: &RingDesc) -> Elem {
    if components.len() == 1 {
        return parts[0].clone();
    }
    match ring {
        RingDesc::Extension(e) => {
            let exps: BTreeSet<i64> = parts
                .iter()
                .flat_map(|p| match p {
                    Elem::Laurent(l) => l.terms().map(|(k, _)| k).collect::<Vec<_>>(),
                    _ => unreachable!(),
                })
                .collect();
            let sub: Vec<Component> = components
                .iter()
                .map(|c| Component {
                    ring: c.ring.extension().expect("component mirrors the extension").base.clone(),
                    modulus: c.modulus,
                })
                .collect();
            let terms = exps.into_iter().map(|k| {
                let coeffs: Vec<Elem> = parts
                    .iter()
                    .zip(&sub)
                    .map(|(p, c)| match p {
                        Elem::Laurent(l) => l.coeff(k).cloned().unwrap_or_else(|| c.ring.zero()),
                        _ => unreachable!(),
                    })
                    .collect();
                (k, lift(&coeffs, &sub, &e.base))
            });
            Elem::Laurent(LaurentElem::from_terms(terms, &e.base))
        }
        RingDesc::IntegersMod(n) => {
            let mut acc = BigInt::zero();
            let n_big = BigInt::from(*n);
            for (p, c) in parts.iter().zip(components) {
                let (Elem::Mod(v), Some(m)) = (p, c.modulus) else { unreachable!() };
                let m_big = BigInt::from(m);
                let cofactor = &n_big / &m_big;
                let inv = cofactor.extended_gcd(&m_big).x.mod_floor(&m_big);
                acc += BigInt::from(*v) * cofactor * inv;
            }
            Elem::Mod(acc.mod_floor(&n_big).to_u64().expect("fits"))
        }
        _ => unreachable!("only ℤ/n grounds split"),
    }
}

fn untwisted(e: &Extension) -> bool {
    e.twist.as_ref().is_none_or(|t| t.is_identity())
}

fn classify_connected(ring: &RingDesc) -> RingClass {
    let unsupported = |reason: String| RingClass::Unsupported { reason };
    match ring {
        RingDesc::Integers => RingClass::Integers,
        RingDesc::IntegersMod(1) => RingClass::Zero,
        RingDesc::IntegersMod(n) => match prime_power(*n) {
            Some((p, 1)) => RingClass::Field { q: p },
            Some((p, k)) => RingClass::LocalZModPk { p, k },
            None => unreachable!("components are local"),
        },
        RingDesc::FiniteField(f) => RingClass::Field { q: f.order() },
        RingDesc::Extension(e) => {
            if !untwisted(e) {
                return unsupported(format!("{ring}: twisted extensions are outside the independent engine"));
            }
            if e.base.extension().is_some() {
                return unsupported(format!("{ring}: several variables are outside the independent engine"));
            }
            match (classify_connected(&e.base), e.kind) {
                (RingClass::Field { q }, VarKind::Laurent) => RingClass::LaurentOverField { q },
                (RingClass::Field { q }, _) => RingClass::EuclideanDomain { q, norm: Norm::Degree },
                (RingClass::Integers, kind) => RingClass::IntegralExtension { kind },
                (RingClass::LocalZModPk { p, k }, kind) => RingClass::LocalExtension { p, k, kind },
                (c, _) => unsupported(format!("{ring}: base class {c}")),
            }
        }
    }
}

/// Deterministic classification.
pub fn classify(ring: &RingDesc) -> RingClass {
    if let RingDesc::IntegersMod(1) = ring.ground() {
        return RingClass::Zero;
    }
    let comps = crt_components(ring);
    if comps.len() == 1 {
        classify_connected(&comps[0].ring)
    } else {
        RingClass::ProductOfLocals {
            components: comps.iter().map(|c| classify_connected(&c.ring)).collect(),
        }
    }
}

/// Value of the Euclidean norm; `None` for zero.
pub fn norm_value(ring: &RingDesc, norm: Norm, x: &Elem) -> Result<Option<BigInt>, KError> {
    if ring.is_zero(x) {
        return Ok(None);
    }
    Ok(Some(match (norm, x) {
        (Norm::Abs, Elem::Int(v)) => v.abs(),
        (Norm::Degree, Elem::Laurent(l)) => {
            let e = ring.extension().expect("extension");
            BigInt::from(if e.kind == VarKind::NegPolynomial { -l.bottom().unwrap() } else { l.top().unwrap() })
        }
        (Norm::Span, Elem::Laurent(l)) => BigInt::from(l.span().unwrap()),
        (Norm::UnitPivot, _) => BigInt::from(u8::from(!ring.is_unit(x)?)),
        _ => return Err(KError::Unsupported(format!("norm {norm:?} on {ring}"))),
    }))
}

/// A quotient `q` with `norm(a − q·b) < norm(b)` (or `a − q·b = 0`), when the division
/// algorithm provides one.
pub fn euclid_quotient(ring: &RingDesc, norm: Norm, a: &Elem, b: &Elem) -> Result<Option<Elem>, KError> {
    if ring.is_zero(b) {
        return Ok(None);
    }
    Ok(match norm {
        Norm::Abs => {
            let (Elem::Int(x), Elem::Int(y)) = (a, b) else { unreachable!() };
            // nearest-integer quotient keeps |r| ≤ |y|/2
            let (q, r) = x.div_mod_floor(y);
            let q = if BigInt::from(2) * r.abs() > y.abs() { q + 1 } else { q };
            Some(Elem::Int(q))
        }
        Norm::UnitPivot => ring.unit_inverse(b)?.map(|bi| ring.mul(a, &bi)),
        Norm::Degree | Norm::Span => {
            let e = ring.extension().expect("extension");
            let (Elem::Laurent(x), Elem::Laurent(y)) = (a, b) else { unreachable!() };
            if x.is_zero() {
                return Ok(Some(ring.zero()));
            }
            // normalize to polynomials in s = t (or t⁻¹), divide, shift back
            let flip = e.kind == VarKind::NegPolynomial;
            let s = |k: i64| if flip { -k } else { k };
            let (xb, yb) = match norm {
                Norm::Span => (x.bottom().unwrap(), y.bottom().unwrap()),
                _ => (0, 0),
            };
            let xp: Vec<(i64, Elem)> = x.terms().map(|(k, c)| (s(k) - xb, c.clone())).collect();
            let yp: Vec<(i64, Elem)> = y.terms().map(|(k, c)| (s(k) - yb, c.clone())).collect();
            let base = &e.base;
            let mut rem = LaurentElem::from_terms(xp, base);
            let div = LaurentElem::from_terms(yp, base);
            let (dy, lc) = (div.top().unwrap(), div.coeff(div.top().unwrap()).unwrap().clone());
            let lci = base.unit_inverse(&lc)?.expect("field coefficient");
            let mut quot: Vec<(i64, Elem)> = Vec::new();
            while let Some(dr) = rem.top() {
                if dr < dy {
                    break;
                }
                let c = base.mul(rem.coeff(dr).unwrap(), &lci);
                let shift = dr - dy;
                quot.push((shift, c.clone()));
                let sub = LaurentElem::from_terms(div.terms().map(|(k, d)| (k + shift, base.mul(&c, d))), base);
                rem = LaurentElem::from_terms(
                    rem.terms()
                        .map(|(k, v)| (k, v.clone()))
                        .chain(sub.terms().map(|(k, v)| (k, base.neg(v)))),
                    base,
                );
            }
            // quotient in original variable: q = t^{xb − yb}·q'(t) (or its flip)
            let shift = xb - yb;
            let q = LaurentElem::from_terms(quot.into_iter().map(|(k, c)| (s(k + shift), c)), base);
            Some(Elem::Laurent(q))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&RingDesc::IntegersMod(1)), RingClass::Zero);
        assert_eq!(classify(&RingDesc::IntegersMod(5)), RingClass::Field { q: 5 });
        assert_eq!(classify(&RingDesc::IntegersMod(8)), RingClass::LocalZModPk { p: 2, k: 3 });
        assert_eq!(
            classify(&RingDesc::IntegersMod(6)),
            RingClass::ProductOfLocals { components: vec![RingClass::Field { q: 2 }, RingClass::Field { q: 3 }] }
        );
        let f4 = RingDesc::finite_field(4).unwrap();
        assert_eq!(classify(&f4.laurent("t")), RingClass::LaurentOverField { q: 4 });
        assert!(!classify(&f4.laurent("t").laurent("s")).is_supported());
        assert_eq!(classify(&RingDesc::Integers.laurent("t")), RingClass::IntegralExtension { kind: VarKind::Laurent });
    }

    #[test]
    fn crt_round_trip() {
        let r = RingDesc::IntegersMod(12).laurent("t");
        let comps = crt_components(&r);
        assert_eq!(comps.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = r.random(&mut rng, 0, 3);
            let parts: Vec<Elem> = comps.iter().map(|c| project(&x, &c.ring)).collect();
            assert_eq!(lift(&parts, &comps, &r), x);
        }
    }

    #[test]
    fn division_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f3 = RingDesc::finite_field(3).unwrap();
        let cases = [
            (RingDesc::Integers, Norm::Abs),
            (f3.polynomial("t"), Norm::Degree),
            (f3.neg_polynomial("t"), Norm::Degree),
            (f3.laurent("t"), Norm::Span),
            (RingDesc::IntegersMod(9), Norm::UnitPivot),
        ];
        for (r, norm) in cases {
            for _ in 0..200 {
                let a = r.random(&mut rng, 50, 4);
                let b = r.random(&mut rng, 50, 3);
                if r.is_zero(&b) || (norm == Norm::UnitPivot && !r.is_unit(&b).unwrap()) {
                    continue;
                }
                let q = euclid_quotient(&r, norm, &a, &b).unwrap().unwrap();
                let rem = r.sub(&a, &r.mul(&q, &b));
                if let Some(nr) = norm_value(&r, norm, &rem).unwrap() {
                    assert!(nr < norm_value(&r, norm, &b).unwrap().unwrap(), "{r}: {a:?} / {b:?}");
                }
            }
        }
    }
}
