use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::abgroup::{direct_sum, Cokernel, FgAbGroup, GroupHom};
use crate::kengine::{self, Flavor, KError};
use crate::rings::{Structural, VarKind};

use super::expr::{Adjunction, ExprMap, Expression};
use super::DeloopError;

/// Where the K-group data of a source comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceMode {
    /// Computed by the engines only.
    Independent,
    /// Synthesized from ground data with the splitting formula; never evidence for that formula.
    BhsExtended,
    /// User-supplied tables.
    Oracle,
}

impl SourceMode {
    pub fn name(self) -> &'static str {
        match self {
            SourceMode::Independent => "independent",
            SourceMode::BhsExtended => "bhs-extended",
            SourceMode::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [SourceMode::Independent, SourceMode::BhsExtended, SourceMode::Oracle]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A retraction of the restricted splitting map, given by its three components
/// `K_i(A[t,t⁻¹]) → K_i(A)`, `→ K_i(A[t])`, `→ K_i(A[t⁻¹])`. The last two must land in the
/// kernels of evaluation at zero.
#[derive(Clone, Debug)]
pub struct Rho {
    pub base: GroupHom,
    pub plus: GroupHom,
    pub minus: GroupHom,
}

/// K-data of the category of twisted-nilpotent endomorphisms in one degree.
#[derive(Clone, Debug)]
pub struct NilTable {
    pub k_nil: FgAbGroup,
    /// `K_i(A) → K_i(Nil)`, induced by `A ↦ (A, 0)`.
    pub section: Option<GroupHom>,
    /// `NK_{i+1}` of the twisted polynomial extension, when supplied directly.
    pub nk_shift: Option<FgAbGroup>,
}

/// A provider of K-groups of expressions and of the maps induced by structural maps.
///
/// Implementations must return identical presentations for repeated queries, so that maps
/// compose with the groups they connect.
pub trait KSource: Send + Sync {
    fn mode(&self) -> SourceMode;

    /// Where the data was originally produced; differs from [`KSource::mode`] for files
    /// written from another source.
    fn origin(&self) -> SourceMode {
        self.mode()
    }

    fn group(&self, e: &Expression, degree: i64) -> Result<FgAbGroup, DeloopError>;

    fn map(&self, m: &ExprMap, degree: i64) -> Result<GroupHom, DeloopError>;

    /// Negative-degree groups are those of a connective theory (zero) rather than
    /// negative K-groups.
    fn connective(&self) -> bool {
        false
    }

    /// `K_i(Φ⁻¹)` on `K_i(e)` for the automorphism labelled `twist`.
    fn phi_inverse(&self, e: &Expression, twist: &str, degree: i64) -> Result<GroupHom, DeloopError> {
        Err(DeloopError::Gap(format!("no automorphism {twist} on {e} in degree {degree}")))
    }

    fn rho(&self, _e: &Expression, _degree: i64) -> Result<Option<Rho>, DeloopError> {
        Ok(None)
    }

    fn nil(&self, e: &Expression, twist: Option<&str>, degree: i64) -> Result<NilTable, DeloopError> {
        let t = twist.unwrap_or("id");
        Err(DeloopError::Gap(format!("no Nil data for ({e}, {t}) in degree {degree}")))
    }

    /// Assumptions and provenance remarks accumulated so far.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

fn k_error(e: KError, what: String) -> DeloopError {
    match e {
        KError::Unsupported(r) => DeloopError::Gap(format!("{what}: {r}")),
        other => DeloopError::Inconsistent(format!("{what}: {other}")),
    }
}

type Cache<T> = Mutex<HashMap<(String, i64), Result<T, DeloopError>>>;

fn cached<T: Clone>(cache: &Cache<T>, key: (String, i64), f: impl FnOnce() -> Result<T, DeloopError>) -> Result<T, DeloopError> {
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return v.clone();
    }
    let v = f();
    cache.lock().expect("cache lock").insert(key, v.clone());
    v
}

/// The independent engines: connective K-theory of rings in degrees 0 and 1.
pub struct EngineSource {
    flavor: Flavor,
    groups: Cache<FgAbGroup>,
    maps: Cache<GroupHom>,
}

impl EngineSource {
    pub fn new(flavor: Flavor) -> Self {
        EngineSource {
            flavor,
            groups: Mutex::default(),
            maps: Mutex::default(),
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }
}

impl Default for EngineSource {
    fn default() -> Self {
        Self::new(Flavor::IdempotentComplete)
    }
}

impl KSource for EngineSource {
    fn mode(&self) -> SourceMode {
        SourceMode::Independent
    }

    fn connective(&self) -> bool {
        true
    }

    fn group(&self, e: &Expression, degree: i64) -> Result<FgAbGroup, DeloopError> {
        let ring = e
            .to_ring()
            .ok_or_else(|| DeloopError::Gap(format!("{e} is not a ring the engine knows")))?;
        if degree < 0 {
            return Ok(FgAbGroup::trivial());
        }
        cached(&self.groups, (e.key(), degree), || {
            kengine::k_group(&ring, degree, self.flavor)
                .map(|v| v.group)
                .map_err(|err| k_error(err, format!("K_{degree}({e})")))
        })
    }

    fn map(&self, m: &ExprMap, degree: i64) -> Result<GroupHom, DeloopError> {
        let h = m
            .to_ring_hom()
            .ok_or_else(|| DeloopError::Gap(format!("{m} is not a ring homomorphism the engine knows")))?;
        if degree < 0 {
            return Ok(GroupHom::zero(&FgAbGroup::trivial(), &FgAbGroup::trivial()));
        }
        cached(&self.maps, (m.to_string(), degree), || {
            kengine::induced_k_map(&h, degree, self.flavor).map_err(|err| k_error(err, format!("K_{degree}({m})")))
        })
    }

    fn notes(&self) -> Vec<String> {
        vec![format!("engine flavor: {:?}", self.flavor)]
    }
}

/// Cokernel of `K_d(j₊) ⊕ K_d(j₋)` for the next variable over `x`, with the summed map.
#[derive(Clone, Debug)]
pub struct BassCokernel {
    pub sum: GroupHom,
    pub cokernel: Cokernel,
}

pub(crate) fn bass_cokernel(source: &dyn KSource, x: &Expression, d: i64) -> Result<BassCokernel, DeloopError> {
    let jp = source.map(&ExprMap::last(x, Structural::JPlus), d)?;
    let jm = source.map(&ExprMap::last(x, Structural::JMinus), d)?;
    if !jp.codomain().same_presentation(jm.codomain()) {
        return Err(DeloopError::Inconsistent(format!("j₊ and j₋ over {x} disagree on K_{d} of the Laurent extension")));
    }
    let sum = direct_sum(&[jp.domain().clone(), jm.domain().clone()]);
    let total = GroupHom::copair(&sum, &[&jp, &jm])?;
    let cokernel = total.cokernel();
    Ok(BassCokernel { sum: total, cokernel })
}

/// The source `ΩL E`: `π_i(ΩL E)(X) = coker(π_{i+1} E(X[t]) ⊕ π_{i+1} E(X[t⁻¹]) → π_{i+1} E(X[t,t⁻¹]))`,
/// with maps induced on cokernels.
pub struct Delooped {
    inner: Arc<dyn KSource>,
    cokernels: Cache<BassCokernel>,
    maps: Cache<GroupHom>,
}

impl Delooped {
    pub fn new(inner: Arc<dyn KSource>) -> Self {
        Delooped {
            inner,
            cokernels: Mutex::default(),
            maps: Mutex::default(),
        }
    }

    /// `n`-fold iterate, starting from `source` itself.
    pub fn iterate(source: Arc<dyn KSource>, n: usize) -> Arc<dyn KSource> {
        (0..n).fold(source, |s, _| Arc::new(Delooped::new(s)) as Arc<dyn KSource>)
    }

    pub fn inner(&self) -> &Arc<dyn KSource> {
        &self.inner
    }

    pub fn cokernel(&self, x: &Expression, degree: i64) -> Result<BassCokernel, DeloopError> {
        cached(&self.cokernels, (x.key(), degree), || bass_cokernel(self.inner.as_ref(), x, degree + 1))
    }
}

impl KSource for Delooped {
    fn mode(&self) -> SourceMode {
        self.inner.mode()
    }

    fn group(&self, e: &Expression, degree: i64) -> Result<FgAbGroup, DeloopError> {
        Ok(self.cokernel(e, degree)?.cokernel.group)
    }

    fn map(&self, m: &ExprMap, degree: i64) -> Result<GroupHom, DeloopError> {
        cached(&self.maps, (m.to_string(), degree), || {
            let cx = self.cokernel(&m.source(), degree)?;
            let cy = self.cokernel(&m.target(), degree)?;
            let f = self.inner.map(&m.extended(Adjunction::plain(VarKind::Laurent)), degree + 1)?;
            if !cy.cokernel.projection.compose(&f)?.compose(&cx.sum)?.is_zero() {
                return Err(DeloopError::Inconsistent(format!("{m} does not preserve the image of j₊ ⊕ j₋ in degree {}", degree + 1)));
            }
            let mat = cy.cokernel.projection.matrix().mul(f.matrix()).mul(&cx.cokernel.lift);
            Ok(GroupHom::new(cx.cokernel.group.clone(), cy.cokernel.group.clone(), mat)?)
        })
    }

    fn notes(&self) -> Vec<String> {
        self.inner.notes()
    }
}
