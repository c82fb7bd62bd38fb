use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::field::{is_prime, prime_power, FiniteField};
use super::RingError;

/// An element of some [`RingDesc`]. The variant must match the ring it is used with.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Int(BigInt),
    Mod(u64),
    Ff(u64),
    Laurent(LaurentElem),
}

/// A finitely supported sum `Σ cₖ tᵏ` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentElem {
    terms: BTreeMap<i64, Elem>,
}

impl LaurentElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Elem, exp: i64, base: &RingDesc) -> Self {
        let mut l = Self::zero();
        l.set(exp, coeff, base);
        l
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeats and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Elem)>, base: &RingDesc) -> Self {
        let mut l = Self::zero();
        for (e, c) in terms {
            let cur = l.coeff(e).cloned().unwrap_or_else(|| base.zero());
            l.set(e, base.add(&cur, &c), base);
        }
        l
    }

    fn set(&mut self, exp: i64, c: Elem, base: &RingDesc) {
        if base.is_zero(&c) {
            self.terms.remove(&exp);
        } else {
            self.terms.insert(exp, c);
        }
    }

    pub fn coeff(&self, exp: i64) -> Option<&Elem> {
        self.terms.get(&exp)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Elem)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn top(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// `top − bottom`, or `None` for zero.
    pub fn span(&self) -> Option<i64> {
        Some(self.top()? - self.bottom()?)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum VarKind {
    /// `R[t]`
    Polynomial,
    /// `R[t⁻¹]`
    NegPolynomial,
    /// `R[t, t⁻¹]`
    Laurent,
}

impl VarKind {
    pub fn allows(self, exp: i64) -> bool {
        match self {
            VarKind::Polynomial => exp >= 0,
            VarKind::NegPolynomial => exp <= 0,
            VarKind::Laurent => true,
        }
    }
}

/// One adjoined variable over a base ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub base: RingDesc,
    pub var: String,
    pub kind: VarKind,
    /// Twist `φ` of the base: `t·a = φ(a)·t`.
    pub twist: Option<RingAutomorphism>,
}

/// A computable ring with exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingDesc {
    Integers,
    /// `ℤ/n` for `n ≥ 1`; `ℤ/1` is the zero ring.
    IntegersMod(u64),
    FiniteField(Arc<FiniteField>),
    Extension(Arc<Extension>),
}

/// A ring automorphism, described symbolically so that it can be inverted and iterated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingAutomorphism {
    Identity,
    /// `x ↦ x^{p^power}` on a finite field.
    Frobenius { power: u32 },
    /// Apply an automorphism of the base coefficientwise on an extension.
    Coefficientwise(Box<RingAutomorphism>),
    /// `t ↦ c·t` for a base unit `c` (untwisted extensions only).
    VarScale { unit: Elem },
    /// `t ↦ t⁻¹` on an untwisted Laurent extension.
    VarInvert,
}

impl RingDesc {
    pub fn integers() -> Self {
        RingDesc::Integers
    }

    pub fn integers_mod(n: u64) -> Result<Self, RingError> {
        if n == 0 {
            return Err(RingError::Invalid("Z/0 is Z; use Integers".into()));
        }
        Ok(RingDesc::IntegersMod(n))
    }

    pub fn finite_field(q: u64) -> Result<Self, RingError> {
        if prime_power(q).is_none() {
            return Err(RingError::Invalid(format!("{q} is not a prime power")));
        }
        if q >= 1 << 20 {
            return Err(RingError::Invalid(format!("field of order {q} is too large")));
        }
        Ok(RingDesc::FiniteField(Arc::new(FiniteField::new(q))))
    }

    pub fn extend(&self, var: &str, kind: VarKind) -> Self {
        RingDesc::Extension(Arc::new(Extension {
            base: self.clone(),
            var: var.to_string(),
            kind,
            twist: None,
        }))
    }

    pub fn polynomial(&self, var: &str) -> Self {
        self.extend(var, VarKind::Polynomial)
    }

    pub fn neg_polynomial(&self, var: &str) -> Self {
        self.extend(var, VarKind::NegPolynomial)
    }

    pub fn laurent(&self, var: &str) -> Self {
        self.extend(var, VarKind::Laurent)
    }

    /// `R_φ[t^k]` with `t·a = φ(a)·t`.
    pub fn twisted(&self, var: &str, kind: VarKind, twist: RingAutomorphism) -> Result<Self, RingError> {
        twist.check_on(self)?;
        Ok(RingDesc::Extension(Arc::new(Extension {
            base: self.clone(),
            var: var.to_string(),
            kind,
            twist: Some(twist),
        })))
    }

    pub fn twisted_laurent(&self, var: &str, twist: RingAutomorphism) -> Result<Self, RingError> {
        self.twisted(var, VarKind::Laurent, twist)
    }

    pub fn extension(&self) -> Option<&Extension> {
        match self {
            RingDesc::Extension(e) => Some(e),
            _ => None,
        }
    }

    /// The ring with the outermost variable removed (or itself for ground rings).
    pub fn ground(&self) -> &RingDesc {
        match self {
            RingDesc::Extension(e) => e.base.ground(),
            r => r,
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            RingDesc::Extension(e) => {
                e.base.is_commutative() && e.twist.as_ref().is_none_or(RingAutomorphism::is_identity)
            }
            _ => true,
        }
    }

    pub fn is_domain(&self) -> bool {
        match self {
            RingDesc::Integers | RingDesc::FiniteField(_) => true,
            RingDesc::IntegersMod(n) => is_prime(*n),
            RingDesc::Extension(e) => e.base.is_domain(),
        }
    }

    pub fn is_zero_ring(&self) -> bool {
        match self {
            RingDesc::IntegersMod(1) => true,
            RingDesc::Extension(e) => e.base.is_zero_ring(),
            _ => false,
        }
    }

    pub fn zero(&self) -> Elem {
        match self {
            RingDesc::Integers => Elem::Int(BigInt::zero()),
            RingDesc::IntegersMod(_) => Elem::Mod(0),
            RingDesc::FiniteField(_) => Elem::Ff(0),
            RingDesc::Extension(_) => Elem::Laurent(LaurentElem::zero()),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            RingDesc::Integers => Elem::Int(n.clone()),
            RingDesc::IntegersMod(m) => Elem::Mod(reduce_mod(n, *m)),
            RingDesc::FiniteField(f) => Elem::Ff(f.from_int(reduce_mod(n, f.characteristic()) as i64)),
            RingDesc::Extension(e) => Elem::Laurent(LaurentElem::monomial(e.base.from_bigint(n), 0, &e.base)),
        }
    }

    /// The variable `t` raised to `exp` (must be an allowed exponent).
    pub fn var_power(&self, exp: i64) -> Result<Elem, RingError> {
        let e = self.extension().ok_or_else(|| RingError::Invalid("ring has no variable".into()))?;
        if !e.kind.allows(exp) {
            return Err(RingError::Invalid(format!("exponent {exp} not allowed in {self}")));
        }
        Ok(Elem::Laurent(LaurentElem::monomial(e.base.one(), exp, &e.base)))
    }

    pub fn monomial(&self, coeff: Elem, exp: i64) -> Result<Elem, RingError> {
        let e = self.extension().ok_or_else(|| RingError::Invalid("ring has no variable".into()))?;
        if !e.kind.allows(exp) {
            return Err(RingError::Invalid(format!("exponent {exp} not allowed in {self}")));
        }
        Ok(Elem::Laurent(LaurentElem::monomial(coeff, exp, &e.base)))
    }

    /// Whether `x` is a well-formed element of this ring.
    pub fn contains(&self, x: &Elem) -> bool {
        match (self, x) {
            (RingDesc::Integers, Elem::Int(_)) => true,
            (RingDesc::IntegersMod(n), Elem::Mod(a)) => a < n,
            (RingDesc::FiniteField(f), Elem::Ff(a)) => *a < f.order(),
            (RingDesc::Extension(e), Elem::Laurent(l)) => l
                .terms()
                .all(|(k, c)| e.kind.allows(k) && e.base.contains(c) && !e.base.is_zero(c)),
            _ => false,
        }
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        match x {
            Elem::Int(a) => a.is_zero(),
            Elem::Mod(a) | Elem::Ff(a) => *a == 0,
            Elem::Laurent(l) => l.is_zero(),
        }
    }

    pub fn is_one(&self, x: &Elem) -> bool {
        *x == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (RingDesc::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (RingDesc::IntegersMod(n), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 + *y as u128) % *n as u128) as u64)
            }
            (RingDesc::FiniteField(f), Elem::Ff(x), Elem::Ff(y)) => Elem::Ff(f.add(*x, *y)),
            (RingDesc::Extension(e), Elem::Laurent(x), Elem::Laurent(y)) => {
                let mut out = x.clone();
                for (k, c) in y.terms() {
                    let s = match x.coeff(k) {
                        Some(d) => e.base.add(d, c),
                        None => c.clone(),
                    };
                    out.set(k, s, &e.base);
                }
                Elem::Laurent(out)
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (RingDesc::Integers, Elem::Int(x)) => Elem::Int(-x),
            (RingDesc::IntegersMod(n), Elem::Mod(x)) => Elem::Mod((n - x) % n),
            (RingDesc::FiniteField(f), Elem::Ff(x)) => Elem::Ff(f.neg(*x)),
            (RingDesc::Extension(e), Elem::Laurent(x)) => Elem::Laurent(LaurentElem {
                terms: x.terms().map(|(k, c)| (k, e.base.neg(c))).collect(),
            }),
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (RingDesc::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
            (RingDesc::IntegersMod(n), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 * *y as u128) % *n as u128) as u64)
            }
            (RingDesc::FiniteField(f), Elem::Ff(x), Elem::Ff(y)) => Elem::Ff(f.mul(*x, *y)),
            (RingDesc::Extension(e), Elem::Laurent(x), Elem::Laurent(y)) => {
                Elem::Laurent(convolve(&e.base, x, y, e.twist.as_ref()))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn pow(&self, a: &Elem, e: u64) -> Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Scalar `n·a`.
    pub fn scale_int(&self, n: &BigInt, a: &Elem) -> Elem {
        self.mul(&self.from_bigint(n), a)
    }

    /// Two-sided inverse of a unit, or `None` for non-units.
    ///
    /// Over extensions of non-domains the unit group contains non-monomial units
    /// (`1 + 2t` over `ℤ/4`), which are not classified; that case is an error.
    pub fn unit_inverse(&self, a: &Elem) -> Result<Option<Elem>, RingError> {
        Ok(match (self, a) {
            (RingDesc::Integers, Elem::Int(x)) => (x.abs().is_one()).then(|| a.clone()),
            (RingDesc::IntegersMod(n), Elem::Mod(x)) => mod_inverse(*x, *n).map(Elem::Mod),
            (RingDesc::FiniteField(f), Elem::Ff(x)) => f.inv(*x).map(Elem::Ff),
            (RingDesc::Extension(e), Elem::Laurent(_)) => match self.classify_unit(a)? {
                None => None,
                Some((c, n)) => {
                    let ci = e.base.unit_inverse(&c)?.expect("classified coefficient is a unit");
                    let coeff = match &e.twist {
                        Some(phi) => phi.apply_pow(&e.base, &ci, -n),
                        None => ci,
                    };
                    Some(Elem::Laurent(LaurentElem::monomial(coeff, -n, &e.base)))
                }
            },
            _ => panic!("element does not belong to {self}"),
        })
    }

    pub fn is_unit(&self, a: &Elem) -> Result<bool, RingError> {
        Ok(self.unit_inverse(a)?.is_some())
    }

    /// For a domain base, units of `R[t^±]` are exactly `c·tⁿ` with `c` a unit of `R`
    /// (with `n = 0` forced for polynomial kinds). Returns `(c, n)` or `None`.
    pub fn classify_unit(&self, a: &Elem) -> Result<Option<(Elem, i64)>, RingError> {
        let RingDesc::Extension(e) = self else {
            return Err(RingError::Unsupported("classify_unit needs an extension ring".into()));
        };
        if !e.base.is_domain() {
            return Err(RingError::Unsupported(format!(
                "units of {self} are not classified: base is not a domain"
            )));
        }
        let Elem::Laurent(l) = a else {
            panic!("element does not belong to {self}");
        };
        if l.len() != 1 {
            return Ok(None);
        }
        let (n, c) = l.terms().next().expect("one term");
        if !e.base.is_unit(c)? {
            return Ok(None);
        }
        if n != 0 && e.kind != VarKind::Laurent {
            return Ok(None);
        }
        Ok(Some((c.clone(), n)))
    }

    /// A random element with small coefficients and support in `[-deg, deg]`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, size: i64, deg: i64) -> Elem {
        match self {
            RingDesc::Integers => Elem::Int(BigInt::from(rng.gen_range(-size..=size))),
            RingDesc::IntegersMod(n) => Elem::Mod(rng.gen_range(0..*n)),
            RingDesc::FiniteField(f) => Elem::Ff(rng.gen_range(0..f.order())),
            RingDesc::Extension(e) => {
                let mut terms = Vec::new();
                for k in (-deg..=deg).filter(|&k| e.kind.allows(k)) {
                    if rng.gen_bool(0.5) {
                        terms.push((k, e.base.random(rng, size, deg.min(1))));
                    }
                }
                Elem::Laurent(LaurentElem::from_terms(terms, &e.base))
            }
        }
    }

    /// Enumerate every element whose coefficients are drawn from `coeffs` and whose support
    /// lies in `exps` (used for exhaustive checks on small finite slices).
    pub fn enumerate_slice(&self, exps: &[i64], coeffs: &[Elem]) -> Vec<Elem> {
        let RingDesc::Extension(e) = self else {
            return coeffs.to_vec();
        };
        let exps: Vec<i64> = exps.iter().copied().filter(|&k| e.kind.allows(k)).collect();
        let mut out = vec![LaurentElem::zero()];
        for &k in &exps {
            out = out
                .into_iter()
                .flat_map(|l| {
                    coeffs.iter().map(move |c| {
                        let mut m = l.clone();
                        m.set(k, c.clone(), &e.base);
                        m
                    })
                })
                .collect();
        }
        out.into_iter().map(Elem::Laurent).collect()
    }

    /// All elements of a finite ground ring.
    pub fn finite_elements(&self) -> Option<Vec<Elem>> {
        match self {
            RingDesc::IntegersMod(n) => Some((0..*n).map(Elem::Mod).collect()),
            RingDesc::FiniteField(f) => Some((0..f.order()).map(Elem::Ff).collect()),
            _ => None,
        }
    }

    pub fn fmt_elem(&self, a: &Elem) -> String {
        match (self, a) {
            (_, Elem::Int(x)) => x.to_string(),
            (_, Elem::Mod(x)) => x.to_string(),
            (RingDesc::FiniteField(f), Elem::Ff(x)) => {
                if f.degree() == 1 {
                    x.to_string()
                } else if *x == 0 {
                    "0".into()
                } else {
                    format!("g^{}", f.dlog(*x).unwrap_or(0))
                }
            }
            (RingDesc::Extension(e), Elem::Laurent(l)) => {
                if l.is_zero() {
                    return "0".into();
                }
                let parts: Vec<String> = l
                    .terms()
                    .map(|(k, c)| {
                        let cs = e.base.fmt_elem(c);
                        let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
                        match k {
                            0 => cs,
                            1 => format!("{cs}*{}", e.var),
                            _ => format!("{cs}*{}^{}", e.var, k),
                        }
                    })
                    .collect();
                parts.join(" + ")
            }
            _ => format!("{a:?}"),
        }
    }

    /// Parses selectors like `Z`, `F4`, `Zmod6`, `F3[t]`, `Z[t,t^-1]`, `F2[t][s^-1]`.
    pub fn parse(s: &str) -> Result<Self, RingError> {
        let s = s.trim();
        let (head, mut rest) = match s.find('[') {
            Some(i) => (&s[..i], &s[i..]),
            None => (s, ""),
        };
        let mut ring = if head == "Z" {
            RingDesc::Integers
        } else if let Some(n) = head.strip_prefix("Zmod") {
            let n: u64 = n.parse().map_err(|_| RingError::Parse(format!("bad modulus in {head:?}")))?;
            RingDesc::integers_mod(n).map_err(|e| RingError::Parse(e.to_string()))?
        } else if let Some(q) = head.strip_prefix('F') {
            let q: u64 = q.parse().map_err(|_| RingError::Parse(format!("bad field order in {head:?}")))?;
            RingDesc::finite_field(q).map_err(|e| RingError::Parse(e.to_string()))?
        } else {
            return Err(RingError::Parse(format!("unknown base ring {head:?}")));
        };
        while !rest.is_empty() {
            let end = rest
                .find(']')
                .ok_or_else(|| RingError::Parse(format!("unclosed bracket in {s:?}")))?;
            let inner: String = rest[1..end].chars().filter(|c| !c.is_whitespace()).collect();
            rest = &rest[end + 1..];
            let parts: Vec<&str> = inner.split(',').collect();
            let var_of = |p: &str| p.strip_suffix("^-1").map(|v| (v.to_string(), true)).unwrap_or((p.to_string(), false));
            let (var, kind) = match parts.as_slice() {
                [p] => {
                    let (v, neg) = var_of(p);
                    (v, if neg { VarKind::NegPolynomial } else { VarKind::Polynomial })
                }
                [a, b] => {
                    let ((va, na), (vb, nb)) = (var_of(a), var_of(b));
                    if va != vb || na == nb {
                        return Err(RingError::Parse(format!("expected [t,t^-1], got [{inner}]")));
                    }
                    (va, VarKind::Laurent)
                }
                _ => return Err(RingError::Parse(format!("bad adjunction [{inner}]"))),
            };
            if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(RingError::Parse(format!("bad variable name {var:?}")));
            }
            if ring.variables().contains(&var) {
                return Err(RingError::Parse(format!("variable {var} adjoined twice")));
            }
            ring = ring.extend(&var, kind);
        }
        Ok(ring)
    }

    /// Names of adjoined variables, innermost first.
    pub fn variables(&self) -> Vec<String> {
        match self {
            RingDesc::Extension(e) => {
                let mut v = e.base.variables();
                v.push(e.var.clone());
                v
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDesc::Integers => write!(f, "Z"),
            RingDesc::IntegersMod(n) => write!(f, "Zmod{n}"),
            RingDesc::FiniteField(k) => write!(f, "F{}", k.order()),
            RingDesc::Extension(e) => {
                write!(f, "{}", e.base)?;
                if e.twist.as_ref().is_some_and(|t| !t.is_identity()) {
                    write!(f, "_phi")?;
                }
                match e.kind {
                    VarKind::Polynomial => write!(f, "[{}]", e.var),
                    VarKind::NegPolynomial => write!(f, "[{}^-1]", e.var),
                    VarKind::Laurent => write!(f, "[{0},{0}^-1]", e.var),
                }
            }
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Int(x) => write!(f, "{x}"),
            Elem::Mod(x) => write!(f, "{x}̄"),
            Elem::Ff(x) => write!(f, "ff{x}"),
            Elem::Laurent(l) => write!(f, "{l:?}"),
        }
    }
}

impl fmt::Debug for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(k, c)| format!("{c:?}·t^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn reduce_mod(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    u64::try_from(r).expect("residue fits")
}

fn mod_inverse(x: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (x as i128).extended_gcd(&(n as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i128) as u64)
}

/// Convolution `(Σ xⱼ tʲ)(Σ yᵢ tⁱ) = Σ xⱼ φʲ(yᵢ) t^{i+j}`.
pub(crate) fn convolve(base: &RingDesc, x: &LaurentElem, y: &LaurentElem, twist: Option<&RingAutomorphism>) -> LaurentElem {
    let mut acc: BTreeMap<i64, Elem> = BTreeMap::new();
    for (j, a) in x.terms() {
        for (i, b) in y.terms() {
            let b = match twist {
                Some(phi) if !phi.is_identity() => phi.apply_pow(base, b, j),
                _ => b.clone(),
            };
            let p = base.mul(a, &b);
            let slot = acc.entry(i + j).or_insert_with(|| base.zero());
            *slot = base.add(slot, &p);
        }
    }
    LaurentElem {
        terms: acc.into_iter().filter(|(_, c)| !base.is_zero(c)).collect(),
    }
}

/// Product in a Laurent ring over `base`, optionally twisted.
pub fn laurent_mul(ring: &RingDesc, x: &Elem, y: &Elem) -> Result<Elem, RingError> {
    if !ring.contains(x) || !ring.contains(y) {
        return Err(RingError::Mismatch(format!("operands are not elements of {ring}")));
    }
    if ring.extension().is_none() {
        return Err(RingError::Mismatch(format!("{ring} is not a Laurent-type ring")));
    }
    Ok(ring.mul(x, y))
}

impl RingAutomorphism {
    pub fn is_identity(&self) -> bool {
        match self {
            RingAutomorphism::Identity => true,
            RingAutomorphism::Coefficientwise(a) => a.is_identity(),
            _ => false,
        }
    }

    /// Whether this automorphism makes sense on `ring`.
    pub fn check_on(&self, ring: &RingDesc) -> Result<(), RingError> {
        let bad = || RingError::Invalid(format!("{self:?} is not an automorphism of {ring}"));
        match (self, ring) {
            (RingAutomorphism::Identity, _) => Ok(()),
            (RingAutomorphism::Frobenius { .. }, RingDesc::FiniteField(_)) => Ok(()),
            (RingAutomorphism::Coefficientwise(a), RingDesc::Extension(e)) => {
                if e.twist.as_ref().is_some_and(|t| !t.is_identity()) && !a.is_identity() {
                    // Commuting with the twist is not checked symbolically; refuse.
                    return Err(bad());
                }
                a.check_on(&e.base)
            }
            (RingAutomorphism::VarScale { unit }, RingDesc::Extension(e)) if e.twist.is_none() => {
                if e.base.contains(unit) && e.base.is_unit(unit)? {
                    Ok(())
                } else {
                    Err(bad())
                }
            }
            (RingAutomorphism::VarInvert, RingDesc::Extension(e))
                if e.twist.is_none() && e.kind == VarKind::Laurent =>
            {
                Ok(())
            }
            _ => Err(bad()),
        }
    }

    pub fn apply(&self, ring: &RingDesc, x: &Elem) -> Elem {
        match (self, ring, x) {
            (RingAutomorphism::Identity, _, _) => x.clone(),
            (RingAutomorphism::Frobenius { power }, RingDesc::FiniteField(f), Elem::Ff(a)) => {
                Elem::Ff(f.frobenius(*a, *power))
            }
            (RingAutomorphism::Coefficientwise(a), RingDesc::Extension(e), Elem::Laurent(l)) => Elem::Laurent(
                LaurentElem::from_terms(l.terms().map(|(k, c)| (k, a.apply(&e.base, c))), &e.base),
            ),
            (RingAutomorphism::VarScale { unit }, RingDesc::Extension(e), Elem::Laurent(l)) => {
                let inv = e.base.unit_inverse(unit).ok().flatten().expect("scale by a unit");
                Elem::Laurent(LaurentElem::from_terms(
                    l.terms().map(|(k, c)| {
                        let s = if k >= 0 {
                            e.base.pow(unit, k as u64)
                        } else {
                            e.base.pow(&inv, (-k) as u64)
                        };
                        (k, e.base.mul(c, &s))
                    }),
                    &e.base,
                ))
            }
            (RingAutomorphism::VarInvert, RingDesc::Extension(e), Elem::Laurent(l)) => Elem::Laurent(
                LaurentElem::from_terms(l.terms().map(|(k, c)| (-k, c.clone())), &e.base),
            ),
            _ => panic!("automorphism {self:?} applied outside its ring {ring}"),
        }
    }

    pub fn inverse(&self, ring: &RingDesc) -> RingAutomorphism {
        match (self, ring) {
            (RingAutomorphism::Frobenius { power }, RingDesc::FiniteField(f)) => RingAutomorphism::Frobenius {
                power: (f.degree() - power % f.degree()) % f.degree(),
            },
            (RingAutomorphism::Coefficientwise(a), RingDesc::Extension(e)) => {
                RingAutomorphism::Coefficientwise(Box::new(a.inverse(&e.base)))
            }
            (RingAutomorphism::VarScale { unit }, RingDesc::Extension(e)) => RingAutomorphism::VarScale {
                unit: e.base.unit_inverse(unit).ok().flatten().expect("scale by a unit"),
            },
            _ => self.clone(),
        }
    }

    /// `φⁿ(x)` for any integer `n`.
    pub fn apply_pow(&self, ring: &RingDesc, x: &Elem, n: i64) -> Elem {
        if self.is_identity() || n == 0 {
            return x.clone();
        }
        let step = if n > 0 { self.clone() } else { self.inverse(ring) };
        let mut y = x.clone();
        for _ in 0..n.unsigned_abs() {
            y = step.apply(ring, &y);
        }
        y
    }
}
