//! Sources synthesized from ground data with the splitting formula
//! `K_i(B[t,t⁻¹]) = K_{i−1}(B) ⊕ K_i(B) ⊕ NK⁺_i(B) ⊕ NK⁻_i(B)`, `K_i(B[t^±]) = K_i(B) ⊕ NK^±_i(B)`,
//! iterated along the chain. Iterated nil terms (`NNK`, …) are taken to be zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;

use crate::abgroup::{direct_sum, DirectSum, FgAbGroup, GroupHom, IntMatrix};
use crate::kengine::{finite_field_higher_k, ground_facts};
use crate::rings::{Structural, VarKind};

use super::expr::{Base, ExprMap, Expression};
use super::source::{Delooped, KSource, SourceMode};
use super::{DeloopError, Sign};

/// A ground group with a note on where it came from.
#[derive(Clone, Debug)]
pub struct GroundValue {
    pub group: FgAbGroup,
    pub provenance: String,
}

/// Ground data: `K_j(B)` and `NK^±_j(B)` for the base `B` of an expression.
pub trait Ground: Send + Sync {
    fn k(&self, base: &Base, j: i64) -> Result<GroundValue, DeloopError>;
    fn nk(&self, base: &Base, sign: Sign, j: i64) -> Result<GroundValue, DeloopError>;
}

/// Explicit ground tables for one named base.
#[derive(Clone, Debug, Default)]
pub struct TableGround {
    pub base: String,
    pub k: BTreeMap<i64, FgAbGroup>,
    pub nk_plus: BTreeMap<i64, FgAbGroup>,
    pub nk_minus: BTreeMap<i64, FgAbGroup>,
    /// Missing degrees are zero instead of a gap.
    pub zero_outside: bool,
}

impl TableGround {
    pub fn new(base: &str) -> Self {
        TableGround {
            base: base.to_string(),
            zero_outside: true,
            ..Default::default()
        }
    }

    pub fn with_k(mut self, j: i64, g: FgAbGroup) -> Self {
        self.k.insert(j, g);
        self
    }

    pub fn with_nk(mut self, sign: Sign, j: i64, g: FgAbGroup) -> Self {
        match sign {
            Sign::Plus => self.nk_plus.insert(j, g),
            Sign::Minus => self.nk_minus.insert(j, g),
        };
        self
    }

    fn lookup(&self, base: &Base, table: &BTreeMap<i64, FgAbGroup>, j: i64, what: &str) -> Result<GroundValue, DeloopError> {
        if *base != Base::Object(self.base.clone()) {
            return Err(DeloopError::Gap(format!("no ground data for {base}")));
        }
        match table.get(&j) {
            Some(g) => Ok(GroundValue {
                group: g.clone(),
                provenance: "table".into(),
            }),
            None if self.zero_outside => Ok(GroundValue {
                group: FgAbGroup::trivial(),
                provenance: "table (zero outside listed degrees)".into(),
            }),
            None => Err(DeloopError::Gap(format!("{what}_{j}({base}) not tabulated"))),
        }
    }
}

impl Ground for TableGround {
    fn k(&self, base: &Base, j: i64) -> Result<GroundValue, DeloopError> {
        self.lookup(base, &self.k, j, "K")
    }

    fn nk(&self, base: &Base, sign: Sign, j: i64) -> Result<GroundValue, DeloopError> {
        match sign {
            Sign::Plus => self.lookup(base, &self.nk_plus, j, "NK⁺"),
            Sign::Minus => self.lookup(base, &self.nk_minus, j, "NK⁻"),
        }
    }
}

type GroundCache = Mutex<HashMap<(String, i64, i8), Result<GroundValue, DeloopError>>>;

/// Ground data read off another source: its own values where it has them, Bass cokernels
/// for negative degrees, and structural vanishing facts for what remains.
pub struct InnerGround {
    inner: Arc<dyn KSource>,
    cache: GroundCache,
}

impl InnerGround {
    pub fn new(inner: Arc<dyn KSource>) -> Self {
        InnerGround {
            inner,
            cache: Mutex::default(),
        }
    }

    fn memo(&self, base: &Base, j: i64, tag: i8, f: impl FnOnce() -> Result<GroundValue, DeloopError>) -> Result<GroundValue, DeloopError> {
        let key = (base.to_string(), j, tag);
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = f();
        self.cache.lock().expect("cache lock").insert(key, v.clone());
        v
    }

    /// The source that serves degree `j` at ground level: the inner source itself, or its
    /// `|j|`-fold delooping when the inner source is connective and `j < 0`.
    fn level(&self, j: i64) -> (Arc<dyn KSource>, String) {
        if j >= 0 || !self.inner.connective() {
            (self.inner.clone(), self.inner.mode().to_string())
        } else {
            let n = j.unsigned_abs() as usize;
            (Delooped::iterate(self.inner.clone(), n), format!("Bass cokernel of {} data", self.inner.mode()))
        }
    }
}

impl Ground for InnerGround {
    fn k(&self, base: &Base, j: i64) -> Result<GroundValue, DeloopError> {
        self.memo(base, j, 0, || {
            let x = Expression {
                base: base.clone(),
                chain: Vec::new(),
            };
            let (src, prov) = self.level(j);
            let err = match src.group(&x, j) {
                Ok(g) => {
                    return Ok(GroundValue {
                        group: g.canonical_group(),
                        provenance: prov,
                    })
                }
                Err(e @ DeloopError::Gap(_)) => e,
                Err(e) => return Err(e),
            };
            if let Base::Ring(r) = base {
                if let Some(g) = finite_field_higher_k(r, j) {
                    return Ok(GroundValue {
                        group: g,
                        provenance: format!("K_{j}({r}) of a finite field"),
                    });
                }
                if let Some(f) = ground_facts(r).filter(|f| j < 0 && f.negative_k_vanish) {
                    return Ok(GroundValue {
                        group: FgAbGroup::trivial(),
                        provenance: format!("K_{j}({r}) = 0: {}", f.reason),
                    });
                }
            }
            Err(err)
        })
    }

    fn nk(&self, base: &Base, sign: Sign, j: i64) -> Result<GroundValue, DeloopError> {
        self.memo(base, j, if sign == Sign::Plus { 1 } else { -1 }, || {
            let x = Expression {
                base: base.clone(),
                chain: Vec::new(),
            };
            let (src, prov) = self.level(j);
            let err = match src.map(&ExprMap::last(&x, sign.ev0()), j) {
                Ok(ev) => {
                    return Ok(GroundValue {
                        group: ev.kernel().group,
                        provenance: prov,
                    })
                }
                Err(e @ DeloopError::Gap(_)) => e,
                Err(e) => return Err(e),
            };
            if let Base::Ring(r) = base {
                if let Some(f) = ground_facts(r).filter(|f| f.nk_vanish_through.is_some_and(|d| j <= d)) {
                    return Ok(GroundValue {
                        group: FgAbGroup::trivial(),
                        provenance: format!("NK_{j}({r}) = 0: {}", f.reason),
                    });
                }
            }
            Err(err)
        })
    }
}

/// State of one chain slot in a summand of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Const,
    Shift,
    Nil(Sign),
}

fn slots_for(kind: VarKind) -> &'static [Slot] {
    match kind {
        VarKind::Polynomial => &[Slot::Const, Slot::Nil(Sign::Plus)],
        VarKind::NegPolynomial => &[Slot::Const, Slot::Nil(Sign::Minus)],
        VarKind::Laurent => &[Slot::Const, Slot::Shift, Slot::Nil(Sign::Plus), Slot::Nil(Sign::Minus)],
    }
}

fn terms(chain: &[VarKind]) -> Vec<Vec<Slot>> {
    let mut out: Vec<Vec<Slot>> = vec![Vec::new()];
    for &k in chain {
        out = out
            .into_iter()
            .flat_map(|t| {
                slots_for(k).iter().map(move |s| {
                    let mut t = t.clone();
                    t.push(*s);
                    t
                })
            })
            .filter(|t| t.iter().filter(|s| matches!(s, Slot::Nil(_))).count() <= 1)
            .collect();
    }
    out
}

#[derive(Clone)]
struct Layout {
    terms: Vec<Vec<Slot>>,
    sum: DirectSum,
}

/// A source synthesized from ground data by the splitting formula.
pub struct ModelSource {
    ground: Box<dyn Ground>,
    mode: SourceMode,
    connective_below: Option<i64>,
    layouts: Mutex<HashMap<(String, i64), Result<Layout, DeloopError>>>,
    notes: Mutex<BTreeSet<String>>,
}

impl ModelSource {
    pub fn new(ground: Box<dyn Ground>, mode: SourceMode) -> Self {
        ModelSource {
            ground,
            mode,
            connective_below: None,
            layouts: Mutex::default(),
            notes: Mutex::default(),
        }
    }

    /// Bhs-extended source over `inner`: ground values from `inner`, everything else by formula.
    pub fn bhs_extended(inner: Arc<dyn KSource>) -> Self {
        Self::new(Box::new(InnerGround::new(inner)), SourceMode::BhsExtended)
    }

    /// Serve the connective cover: all groups in degrees below `d` are zero.
    pub fn connective_below(mut self, d: i64) -> Self {
        self.connective_below = Some(d);
        self
    }

    fn chain_kinds(e: &Expression) -> Result<Vec<VarKind>, DeloopError> {
        if e.is_twisted() {
            return Err(DeloopError::Gap(format!("the formula model has no twisted data ({e})")));
        }
        Ok(e.chain.iter().map(|a| a.kind).collect())
    }

    fn term_group(&self, base: &Base, term: &[Slot], i: i64) -> Result<FgAbGroup, DeloopError> {
        let shift = term.iter().filter(|s| **s == Slot::Shift).count() as i64;
        let j = i - shift;
        let v = match term.iter().find_map(|s| if let Slot::Nil(sg) = s { Some(*sg) } else { None }) {
            Some(sg) => self.ground.nk(base, sg, j)?,
            None => self.ground.k(base, j)?,
        };
        if !v.provenance.starts_with("table") && v.provenance != self.mode.name() {
            self.notes.lock().expect("notes lock").insert(v.provenance.clone());
        }
        Ok(v.group.canonical_group())
    }

    fn truncated(&self, i: i64) -> bool {
        self.connective_below.is_some_and(|c| i < c)
    }

    fn layout(&self, e: &Expression, i: i64) -> Result<Layout, DeloopError> {
        let key = (e.key(), i);
        if let Some(l) = self.layouts.lock().expect("layout lock").get(&key) {
            return l.clone();
        }
        let l = (|| {
            let kinds = Self::chain_kinds(e)?;
            let ts = if self.truncated(i) { Vec::new() } else { terms(&kinds) };
            let groups = ts.iter().map(|t| self.term_group(&e.base, t, i)).collect::<Result<Vec<_>, _>>()?;
            Ok(Layout {
                terms: ts,
                sum: direct_sum(&groups),
            })
        })();
        self.layouts.lock().expect("layout lock").insert(key, l.clone());
        l
    }
}

fn offsets(sum: &DirectSum) -> Vec<usize> {
    let mut acc = 0;
    sum.summands
        .iter()
        .map(|g| {
            let o = acc;
            acc += g.num_generators();
            o
        })
        .collect()
}

impl KSource for ModelSource {
    fn mode(&self) -> SourceMode {
        self.mode
    }

    fn connective(&self) -> bool {
        self.connective_below.is_some_and(|c| c <= 0)
    }

    fn group(&self, e: &Expression, degree: i64) -> Result<FgAbGroup, DeloopError> {
        Ok(self.layout(e, degree)?.sum.group)
    }

    fn map(&self, m: &ExprMap, degree: i64) -> Result<GroupHom, DeloopError> {
        let (src, tgt) = (m.source(), m.target());
        let a = self.layout(&src, degree)?;
        let b = self.layout(&tgt, degree)?;
        let p = m.prefix.depth();
        let (oa, ob) = (offsets(&a.sum), offsets(&b.sum));
        let mut mat = IntMatrix::zeros(b.sum.group.num_generators(), a.sum.group.num_generators());
        for (ia, t) in a.terms.iter().enumerate() {
            let image: Option<Vec<Slot>> = match m.kind {
                Structural::I0 | Structural::IPlus | Structural::IMinus => {
                    let mut u = t.clone();
                    u.insert(p, Slot::Const);
                    Some(u)
                }
                Structural::JPlus | Structural::JMinus => Some(t.clone()),
                Structural::Ev0Plus | Structural::Ev0Minus => (t[p] == Slot::Const).then(|| {
                    let mut u = t.clone();
                    u.remove(p);
                    u
                }),
            };
            let Some(u) = image else { continue };
            let ib = b
                .terms
                .iter()
                .position(|x| *x == u)
                .ok_or_else(|| DeloopError::Inconsistent(format!("{m}: summand {t:?} has no image")))?;
            for k in 0..a.sum.summands[ia].num_generators() {
                mat[(ob[ib] + k, oa[ia] + k)] = BigInt::one();
            }
        }
        Ok(GroupHom::new(a.sum.group, b.sum.group, mat)?)
    }

    fn notes(&self) -> Vec<String> {
        self.notes.lock().expect("notes lock").iter().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_counts() {
        assert_eq!(terms(&[VarKind::Laurent]).len(), 4);
        // L·L: 4·4 minus the 4 terms with two nil slots
        assert_eq!(terms(&[VarKind::Laurent, VarKind::Laurent]).len(), 12);
        assert_eq!(terms(&[VarKind::Polynomial, VarKind::Polynomial]).len(), 3);
    }

    #[test]
    fn synthetic_laurent_groups() {
        let g = TableGround::new("A")
            .with_k(0, FgAbGroup::free(1))
            .with_k(-1, FgAbGroup::free(1))
            .with_nk(Sign::Plus, 0, FgAbGroup::cyclic(2));
        let s = ModelSource::new(Box::new(g), SourceMode::Oracle);
        let a = Expression::object("A");
        assert_eq!(s.group(&a.extend(VarKind::Laurent), 0).unwrap().to_string(), "Z/2 + Z^2");
        assert_eq!(s.group(&a.extend(VarKind::Polynomial), 0).unwrap().to_string(), "Z/2 + Z");
        let ev = s.map(&ExprMap::last(&a, Structural::Ev0Plus), 0).unwrap();
        let ip = s.map(&ExprMap::last(&a, Structural::IPlus), 0).unwrap();
        assert!(ev.compose(&ip).unwrap().equals(&GroupHom::identity(&s.group(&a, 0).unwrap())));
        assert_eq!(ev.kernel().group.to_string(), "Z/2");
    }
}
