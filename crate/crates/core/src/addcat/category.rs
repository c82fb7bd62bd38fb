use std::collections::BTreeMap;
use std::fmt;

use crate::rings::{Elem, LaurentElem, RMatrix, RingAutomorphism, RingDesc, VarKind};

use super::AddCatError;

/// A morphism `Σ fₖ·tᵏ` of a Laurent category over a matrix category; each `fₖ` is a
/// `codomain × domain` matrix and no stored term is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentMorphism {
    pub domain: usize,
    pub codomain: usize,
    terms: BTreeMap<i64, RMatrix>,
}

impl LaurentMorphism {
    pub fn zero(domain: usize, codomain: usize) -> Self {
        LaurentMorphism {
            domain,
            codomain,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        ring: &RingDesc,
        domain: usize,
        codomain: usize,
        terms: impl IntoIterator<Item = (i64, RMatrix)>,
    ) -> Result<Self, AddCatError> {
        let mut out = Self::zero(domain, codomain);
        for (k, m) in terms {
            if m.rows() != codomain || m.cols() != domain {
                return Err(AddCatError::Shape(format!(
                    "term t^{k} is {}x{}, expected {codomain}x{domain}",
                    m.rows(),
                    m.cols()
                )));
            }
            let sum = match out.terms.remove(&k) {
                Some(prev) => prev.add(ring, &m),
                None => m,
            };
            if !sum.is_zero(ring) {
                out.terms.insert(k, sum);
            }
        }
        Ok(out)
    }

    pub fn monomial(ring: &RingDesc, m: RMatrix, exp: i64) -> Self {
        let (d, c) = (m.cols(), m.rows());
        Self::from_terms(ring, d, c, [(exp, m)]).expect("monomial shape is consistent")
    }

    pub fn identity_times_t(ring: &RingDesc, n: usize, exp: i64) -> Self {
        Self::monomial(ring, RMatrix::identity(ring, n), exp)
    }

    pub fn term(&self, k: i64) -> Option<&RMatrix> {
        self.terms.get(&k)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RMatrix)> {
        self.terms.iter().map(|(&k, m)| (k, m))
    }

    pub fn support(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, ring: &RingDesc, other: &LaurentMorphism) -> Result<Self, AddCatError> {
        if (self.domain, self.codomain) != (other.domain, other.codomain) {
            return Err(AddCatError::Shape("sum of non-parallel morphisms".into()));
        }
        Self::from_terms(
            ring,
            self.domain,
            self.codomain,
            self.terms().chain(other.terms()).map(|(k, m)| (k, m.clone())),
        )
    }

    pub fn neg(&self, ring: &RingDesc) -> Self {
        LaurentMorphism {
            terms: self.terms.iter().map(|(&k, m)| (k, m.map_with(|x| ring.neg(x)))).collect(),
            ..self.clone()
        }
    }

    /// The matrix over `R[t, t⁻¹]` with the same coefficients (untwisted identification).
    pub fn to_ring_matrix(&self, ring: &RingDesc, laurent_ring: &RingDesc) -> RMatrix {
        let mut m = RMatrix::zeros(laurent_ring, self.codomain, self.domain);
        for i in 0..self.codomain {
            for j in 0..self.domain {
                let l = LaurentElem::from_terms(self.terms().map(|(k, t)| (k, t.get(i, j).clone())), ring);
                m.set(i, j, Elem::Laurent(l));
            }
        }
        m
    }

    /// Inverse of [`to_ring_matrix`](Self::to_ring_matrix).
    pub fn from_ring_matrix(ring: &RingDesc, m: &RMatrix) -> Self {
        let mut terms: BTreeMap<i64, RMatrix> = BTreeMap::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let Elem::Laurent(l) = m.get(i, j) else {
                    panic!("entry is not a Laurent element");
                };
                for (k, c) in l.terms() {
                    terms
                        .entry(k)
                        .or_insert_with(|| RMatrix::zeros(ring, m.rows(), m.cols()))
                        .set(i, j, c.clone());
                }
            }
        }
        LaurentMorphism {
            domain: m.cols(),
            codomain: m.rows(),
            terms,
        }
    }
}

impl fmt::Debug for LaurentMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} {{", self.domain, self.codomain)?;
        for (k, m) in self.terms() {
            write!(f, " {m:?}·t^{k}")?;
        }
        write!(f, " }}")
    }
}

/// `g ∘ f = Σₖ (Σ_{i+j=k} gⱼ ∘ Φʲ(fᵢ))·tᵏ`, with `Φ` acting entrywise on matrices.
pub fn laurent_compose(
    ring: &RingDesc,
    g: &LaurentMorphism,
    f: &LaurentMorphism,
    twist: Option<&RingAutomorphism>,
) -> Result<LaurentMorphism, AddCatError> {
    if f.codomain != g.domain {
        return Err(AddCatError::Shape(format!(
            "cannot compose {}->{} after {}->{}",
            g.domain, g.codomain, f.domain, f.codomain
        )));
    }
    let mut terms = Vec::new();
    for (j, gj) in g.terms() {
        for (i, fi) in f.terms() {
            let fi = match twist {
                Some(phi) if !phi.is_identity() => fi.map_with(|x| phi.apply_pow(ring, x, j)),
                _ => fi.clone(),
            };
            terms.push((i + j, gj.mul(ring, &fi)));
        }
    }
    LaurentMorphism::from_terms(ring, f.domain, g.codomain, terms)
}

/// An object `(n, p)` of the idempotent completion of `matcat(R)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IdemObject {
    pub ambient: usize,
    pub idempotent: RMatrix,
}

impl IdemObject {
    pub fn new(ring: &RingDesc, idempotent: RMatrix) -> Result<Self, AddCatError> {
        if !idempotent.is_square() {
            return Err(AddCatError::Shape("idempotent must be square".into()));
        }
        if idempotent.mul(ring, &idempotent) != idempotent {
            return Err(AddCatError::NotInCategory("p·p ≠ p".into()));
        }
        Ok(IdemObject {
            ambient: idempotent.rows(),
            idempotent,
        })
    }

    /// `(n, id)`.
    pub fn free(ring: &RingDesc, n: usize) -> Self {
        IdemObject {
            ambient: n,
            idempotent: RMatrix::identity(ring, n),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Object {
    /// The free object of rank `n` (matrix and Laurent categories).
    Free(usize),
    Idem(IdemObject),
    /// `(A, b)` in `A × I`, `b ∈ {0, 1}`.
    Interval(Box<Object>, u8),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Morphism {
    Plain(RMatrix),
    Laurent(LaurentMorphism),
    Idem {
        domain: IdemObject,
        codomain: IdemObject,
        matrix: RMatrix,
    },
    /// `(f, b → b')` in `A × I`.
    Interval {
        inner: Box<Morphism>,
        from: u8,
        to: u8,
    },
}

/// The categories the workbench constructs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Category {
    /// Finitely generated free modules over a ring: objects `n`, morphisms `n × m` matrices.
    Mat(RingDesc),
    /// `matcat(R)[t]`, `[t⁻¹]` or `[t, t⁻¹]`, optionally twisted by an automorphism of `R`.
    Laurent {
        base: RingDesc,
        kind: VarKind,
        twist: Option<RingAutomorphism>,
    },
    /// Idempotent completion of `matcat(R)`.
    Idem(RingDesc),
    /// `A × I` for the groupoid `I` with two uniquely isomorphic objects.
    Interval(Box<Category>),
}

impl Category {
    pub fn ring(&self) -> &RingDesc {
        match self {
            Category::Mat(r) | Category::Idem(r) => r,
            Category::Laurent { base, .. } => base,
            Category::Interval(c) => c.ring(),
        }
    }

    pub fn laurent(base: &RingDesc, kind: VarKind) -> Self {
        Category::Laurent {
            base: base.clone(),
            kind,
            twist: None,
        }
    }

    pub fn twist(&self) -> Option<&RingAutomorphism> {
        match self {
            Category::Laurent { twist, .. } => twist.as_ref(),
            _ => None,
        }
    }

    pub fn domain(&self, f: &Morphism) -> Object {
        match f {
            Morphism::Plain(m) => Object::Free(m.cols()),
            Morphism::Laurent(l) => Object::Free(l.domain),
            Morphism::Idem { domain, .. } => Object::Idem(domain.clone()),
            Morphism::Interval { inner, from, .. } => {
                let Category::Interval(c) = self else { panic!("interval morphism outside A×I") };
                Object::Interval(Box::new(c.domain(inner)), *from)
            }
        }
    }

    pub fn codomain(&self, f: &Morphism) -> Object {
        match f {
            Morphism::Plain(m) => Object::Free(m.rows()),
            Morphism::Laurent(l) => Object::Free(l.codomain),
            Morphism::Idem { codomain, .. } => Object::Idem(codomain.clone()),
            Morphism::Interval { inner, to, .. } => {
                let Category::Interval(c) = self else { panic!("interval morphism outside A×I") };
                Object::Interval(Box::new(c.codomain(inner)), *to)
            }
        }
    }

    pub fn contains_object(&self, a: &Object) -> bool {
        match (self, a) {
            (Category::Mat(_) | Category::Laurent { .. }, Object::Free(_)) => true,
            (Category::Idem(r), Object::Idem(o)) => IdemObject::new(r, o.idempotent.clone()).is_ok(),
            (Category::Interval(c), Object::Interval(inner, b)) => *b <= 1 && c.contains_object(inner),
            _ => false,
        }
    }

    /// Whether `f` is a well-formed morphism of this category.
    pub fn contains(&self, f: &Morphism) -> bool {
        let r = self.ring();
        match (self, f) {
            (Category::Mat(_), Morphism::Plain(m)) => m.entries().iter().all(|x| r.contains(x)),
            (Category::Laurent { kind, .. }, Morphism::Laurent(l)) => l.terms().all(|(k, m)| {
                kind.allows(k) && m.rows() == l.codomain && m.cols() == l.domain && m.entries().iter().all(|x| r.contains(x))
            }),
            (Category::Idem(_), Morphism::Idem { domain, codomain, matrix }) => {
                matrix.rows() == codomain.ambient
                    && matrix.cols() == domain.ambient
                    && codomain.idempotent.mul(r, matrix).mul(r, &domain.idempotent) == *matrix
            }
            (Category::Interval(c), Morphism::Interval { inner, from, to }) => *from <= 1 && *to <= 1 && c.contains(inner),
            _ => false,
        }
    }

    pub fn identity(&self, a: &Object) -> Result<Morphism, AddCatError> {
        let r = self.ring();
        Ok(match (self, a) {
            (Category::Mat(_), Object::Free(n)) => Morphism::Plain(RMatrix::identity(r, *n)),
            (Category::Laurent { .. }, Object::Free(n)) => Morphism::Laurent(LaurentMorphism::identity_times_t(r, *n, 0)),
            (Category::Idem(_), Object::Idem(o)) => Morphism::Idem {
                domain: o.clone(),
                codomain: o.clone(),
                matrix: o.idempotent.clone(),
            },
            (Category::Interval(c), Object::Interval(inner, b)) => Morphism::Interval {
                inner: Box::new(c.identity(inner)?),
                from: *b,
                to: *b,
            },
            _ => return Err(AddCatError::NotInCategory(format!("{a:?}"))),
        })
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism, AddCatError> {
        let r = self.ring();
        if self.codomain(f) != self.domain(g) {
            return Err(AddCatError::Shape("codomain of f differs from domain of g".into()));
        }
        Ok(match (self, g, f) {
            (Category::Mat(_), Morphism::Plain(a), Morphism::Plain(b)) => Morphism::Plain(a.mul(r, b)),
            (Category::Laurent { twist, .. }, Morphism::Laurent(a), Morphism::Laurent(b)) => {
                Morphism::Laurent(laurent_compose(r, a, b, twist.as_ref())?)
            }
            (Category::Idem(_), Morphism::Idem { codomain, matrix: a, .. }, Morphism::Idem { domain, matrix: b, .. }) => {
                Morphism::Idem {
                    domain: domain.clone(),
                    codomain: codomain.clone(),
                    matrix: a.mul(r, b),
                }
            }
            (Category::Interval(c), Morphism::Interval { inner: a, to, .. }, Morphism::Interval { inner: b, from, .. }) => {
                Morphism::Interval {
                    inner: Box::new(c.compose(a, b)?),
                    from: *from,
                    to: *to,
                }
            }
            _ => return Err(AddCatError::NotInCategory("morphism kinds do not match the category".into())),
        })
    }

    /// Sum of parallel morphisms.
    pub fn add(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, AddCatError> {
        let r = self.ring();
        if self.domain(f) != self.domain(g) || self.codomain(f) != self.codomain(g) {
            return Err(AddCatError::Shape("sum of non-parallel morphisms".into()));
        }
        Ok(match (f, g) {
            (Morphism::Plain(a), Morphism::Plain(b)) => Morphism::Plain(a.add(r, b)),
            (Morphism::Laurent(a), Morphism::Laurent(b)) => Morphism::Laurent(a.add(r, b)?),
            (Morphism::Idem { domain, codomain, matrix: a }, Morphism::Idem { matrix: b, .. }) => Morphism::Idem {
                domain: domain.clone(),
                codomain: codomain.clone(),
                matrix: a.add(r, b),
            },
            (Morphism::Interval { inner: a, from, to }, Morphism::Interval { inner: b, .. }) => {
                let Category::Interval(c) = self else { unreachable!() };
                Morphism::Interval {
                    inner: Box::new(c.add(a, b)?),
                    from: *from,
                    to: *to,
                }
            }
            _ => return Err(AddCatError::NotInCategory("mixed morphism kinds".into())),
        })
    }

    /// Biproduct of two morphisms (block sum) in matrix-based categories.
    pub fn biproduct(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, AddCatError> {
        let r = self.ring();
        let block = |a: &RMatrix, b: &RMatrix| {
            let mut m = RMatrix::zeros(r, a.rows() + b.rows(), a.cols() + b.cols());
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    m.set(i, j, a.get(i, j).clone());
                }
            }
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m.set(a.rows() + i, a.cols() + j, b.get(i, j).clone());
                }
            }
            m
        };
        Ok(match (f, g) {
            (Morphism::Plain(a), Morphism::Plain(b)) => Morphism::Plain(block(a, b)),
            (Morphism::Laurent(a), Morphism::Laurent(b)) => {
                let zero_a = RMatrix::zeros(r, a.codomain, a.domain);
                let zero_b = RMatrix::zeros(r, b.codomain, b.domain);
                let mut exps: Vec<i64> = a.support();
                exps.extend(b.support());
                exps.sort_unstable();
                exps.dedup();
                Morphism::Laurent(LaurentMorphism::from_terms(
                    r,
                    a.domain + b.domain,
                    a.codomain + b.codomain,
                    exps.into_iter().map(|k| {
                        (k, block(a.term(k).unwrap_or(&zero_a), b.term(k).unwrap_or(&zero_b)))
                    }),
                )?)
            }
            (Morphism::Idem { domain: da, codomain: ca, matrix: a }, Morphism::Idem { domain: db, codomain: cb, matrix: b }) => {
                Morphism::Idem {
                    domain: IdemObject::new(r, block(&da.idempotent, &db.idempotent))?,
                    codomain: IdemObject::new(r, block(&ca.idempotent, &cb.idempotent))?,
                    matrix: block(a, b),
                }
            }
            _ => return Err(AddCatError::NotInCategory("biproduct not available for these morphisms".into())),
        })
    }

    /// Random morphism `m → n` with small entries (support within `[-deg, deg]`).
    pub fn random_morphism<R: rand::Rng + ?Sized>(&self, rng: &mut R, m: usize, n: usize, deg: i64) -> Morphism {
        let r = self.ring();
        let rand_matrix = |rng: &mut R| {
            RMatrix::from_rows((0..n).map(|_| (0..m).map(|_| r.random(rng, 4, 1)).collect()).collect())
        };
        let fix = |mat: RMatrix| if n == 0 || m == 0 { RMatrix::zeros(r, n, m) } else { mat };
        match self {
            Category::Mat(_) => Morphism::Plain(fix(rand_matrix(rng))),
            Category::Laurent { kind, .. } => {
                let mut terms = Vec::new();
                for k in (-deg..=deg).filter(|&k| kind.allows(k)) {
                    if rng.gen_bool(0.6) {
                        terms.push((k, fix(rand_matrix(rng))));
                    }
                }
                Morphism::Laurent(LaurentMorphism::from_terms(r, m, n, terms).expect("shapes agree"))
            }
            Category::Idem(_) => {
                let d = IdemObject::free(r, m);
                let c = IdemObject::free(r, n);
                Morphism::Idem {
                    domain: d,
                    codomain: c,
                    matrix: fix(rand_matrix(rng)),
                }
            }
            Category::Interval(c) => Morphism::Interval {
                inner: Box::new(c.random_morphism(rng, m, n, deg)),
                from: rng.gen_range(0..2),
                to: rng.gen_range(0..2),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zm(x: i64) -> RMatrix {
        RMatrix::from_rows(vec![vec![RingDesc::Integers.from_int(x)]])
    }

    #[test]
    fn convolution_examples() {
        let z = RingDesc::Integers;
        let g = LaurentMorphism::identity_times_t(&z, 1, -1);
        let f = LaurentMorphism::identity_times_t(&z, 1, 1);
        assert_eq!(laurent_compose(&z, &g, &f, None).unwrap(), LaurentMorphism::identity_times_t(&z, 1, 0));
        let f = LaurentMorphism::from_terms(&z, 1, 1, [(0, zm(1)), (1, zm(2))]).unwrap();
        let g = LaurentMorphism::monomial(&z, zm(3), 1);
        let want = LaurentMorphism::from_terms(&z, 1, 1, [(1, zm(3)), (2, zm(6))]).unwrap();
        assert_eq!(laurent_compose(&z, &g, &f, None).unwrap(), want);
        let zero = LaurentMorphism::zero(1, 1);
        assert!(laurent_compose(&z, &zero, &f, None).unwrap().is_zero());
    }

    #[test]
    fn idem_object_validation() {
        let z = RingDesc::Integers;
        let p = RMatrix::from_rows(vec![vec![z.from_int(1), z.from_int(0)], vec![z.from_int(0), z.from_int(0)]]);
        assert!(IdemObject::new(&z, p).is_ok());
        assert!(IdemObject::new(&z, zm(2)).is_err());
    }
}
