use std::sync::Arc;

use serde::Serialize;

use crate::abgroup::{colim_sequence, CanonicalForm, ColimResult, FgAbGroup, GroupHom};
use crate::kengine::{induced_k_map, k_group, Flavor};
use crate::rings::{RingDesc, RingHom, Structural, VarKind};

use super::expr::{Adjunction, ExprMap, Expression};
use super::source::{Delooped, KSource};
use super::DeloopError;

/// One negative K-group, or the reason it could not be computed.
#[derive(Clone, Debug, Serialize)]
pub struct NegativeLevel {
    pub degree: i64,
    pub group: Option<CanonicalForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
    /// Degree-0 expressions whose data the iterated cokernel reads.
    pub consumed: Vec<String>,
}

fn chains(depth: usize) -> Vec<Vec<VarKind>> {
    const KINDS: [VarKind; 3] = [VarKind::Polynomial, VarKind::NegPolynomial, VarKind::Laurent];
    (0..depth).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|c| {
                KINDS.iter().map(move |k| {
                    let mut c = c.clone();
                    c.push(*k);
                    c
                })
            })
            .collect()
    })
}

/// `K_{−1}(base), …, K_{−depth}(base)` by iterated cokernels. Levels after the first gap are
/// still attempted, since a later level may be served by other data.
pub fn negative_k(source: Arc<dyn KSource>, base: &Expression, depth: usize) -> Vec<NegativeLevel> {
    (1..=depth)
        .map(|d| {
            let s = Delooped::iterate(source.clone(), d);
            let degree = -(d as i64);
            let consumed = chains(d)
                .into_iter()
                .map(|c| base.concat(&c.into_iter().map(Adjunction::plain).collect::<Vec<_>>()).to_string())
                .collect();
            match s.group(base, degree) {
                Ok(g) => NegativeLevel {
                    degree,
                    group: Some(g.canonical_form()),
                    gap: None,
                    consumed,
                },
                Err(e) => NegativeLevel {
                    degree,
                    group: None,
                    gap: Some(e.to_string()),
                    consumed,
                },
            }
        })
        .collect()
}

/// Stabilization of one degree along the tower.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeStability {
    pub degree: i64,
    /// Least `n` with `π_i(E[m]) ≅ π_i(E[n])` for all computed `m ≥ n`.
    pub stable_from: Option<usize>,
    pub value: Option<CanonicalForm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    pub lo: i64,
    pub hi: i64,
    /// `levels[n][i − lo]` is `π_i(E[n])`.
    pub levels: Vec<Vec<Option<CanonicalForm>>>,
    pub gaps: Vec<String>,
    pub stability: Vec<DegreeStability>,
}

impl Tower {
    pub fn at(&self, n: usize, degree: i64) -> Option<&CanonicalForm> {
        self.levels.get(n)?.get((degree - self.lo) as usize)?.as_ref()
    }

    pub fn stability(&self, degree: i64) -> Option<&DegreeStability> {
        self.stability.iter().find(|s| s.degree == degree)
    }

    /// Every degree is the same at every level.
    pub fn constant(&self) -> bool {
        self.stability.iter().all(|s| s.stable_from == Some(0))
    }

    /// `π_i(E[n]) ≅ π_i(E[n+1])` for all `i ≥ −c` and all computed `n`.
    pub fn stable_above(&self, c: i64) -> bool {
        self.stability.iter().filter(|s| s.degree >= -c).all(|s| s.stable_from == Some(0))
    }
}

/// `π_i(E[n])` for `E[n+1] = ΩL E[n]`, `n ≤ n_max`, `i ∈ [lo, hi]`. Structure maps of the
/// tower are not part of the data, so stabilization compares groups up to isomorphism.
pub fn shadow_tower(source: Arc<dyn KSource>, base: &Expression, lo: i64, hi: i64, n_max: usize) -> Tower {
    let mut gaps = Vec::new();
    let levels: Vec<Vec<Option<CanonicalForm>>> = (0..=n_max)
        .map(|n| {
            let e = Delooped::iterate(source.clone(), n);
            (lo..=hi)
                .map(|i| match e.group(base, i) {
                    Ok(g) => Some(g.canonical_form()),
                    Err(err) => {
                        gaps.push(format!("π_{i}(E[{n}]): {err}"));
                        None
                    }
                })
                .collect()
        })
        .collect();
    let stability = (lo..=hi)
        .map(|i| {
            let col: Vec<Option<&CanonicalForm>> = levels.iter().map(|l| l[(i - lo) as usize].as_ref()).collect();
            let last = col.last().copied().flatten();
            let stable_from = last.map(|v| {
                let mut n = col.len() - 1;
                while n > 0 && col[n - 1] == Some(v) {
                    n -= 1;
                }
                n
            });
            DegreeStability {
                degree: i,
                stable_from,
                value: last.cloned(),
            }
        })
        .collect();
    Tower {
        lo,
        hi,
        levels,
        gaps,
        stability,
    }
}

/// Homotopy K-group `KH_i` as the colimit along `K_i(A) → K_i(A[t₁]) → K_i(A[t₁,t₂]) → …`.
#[derive(Clone, Debug, Serialize)]
pub struct KhReport {
    pub degree: i64,
    pub chain: Vec<CanonicalForm>,
    pub stable_at: Option<usize>,
    pub value: Option<CanonicalForm>,
    /// `K_i(ev₀⁺)` and `K_i(i₊)` are inverse isomorphisms at the stable level.
    pub ev0_inverse: Option<bool>,
    /// `NK_i` of the stabilized data vanishes.
    pub nk_vanishes: Option<bool>,
    pub gaps: Vec<String>,
}

impl KhReport {
    pub fn passed(&self) -> bool {
        self.value.is_some() && self.ev0_inverse == Some(true) && self.nk_vanishes == Some(true)
    }
}

pub fn kh_groups(source: &dyn KSource, base: &Expression, i: i64, n_bound: usize) -> KhReport {
    let mut gaps = Vec::new();
    let stage = |n: usize| base.concat(&vec![Adjunction::plain(VarKind::Polynomial); n]);
    let mut groups = Vec::new();
    let mut maps = Vec::new();
    for n in 0..=n_bound {
        match source.group(&stage(n), i) {
            Ok(g) => groups.push(g),
            Err(e) => {
                gaps.push(format!("K_{i}({}): {e}", stage(n)));
                break;
            }
        }
        if n > 0 {
            match source.map(&ExprMap::last(&stage(n - 1), Structural::IPlus), i) {
                Ok(f) => maps.push(f),
                Err(e) => {
                    gaps.push(format!("K_{i}(i₊) into {}: {e}", stage(n)));
                    groups.pop();
                    break;
                }
            }
        }
    }
    let mut report = KhReport {
        degree: i,
        chain: groups.iter().map(FgAbGroup::canonical_form).collect(),
        stable_at: None,
        value: None,
        ev0_inverse: None,
        nk_vanishes: None,
        gaps,
    };
    let colim = match colim_sequence(&groups, &maps, n_bound) {
        Ok(c) => c,
        Err(e) => {
            report.gaps.push(e.to_string());
            return report;
        }
    };
    let ColimResult::Stable { group, index } = colim else { return report };
    // a stable value read off fewer stages than asked for is not yet a verdict
    if groups.len() < n_bound + 1 {
        report.gaps.push(format!("only {} of {} stages served", groups.len(), n_bound + 1));
        return report;
    }
    report.stable_at = Some(index);
    report.value = Some(group.canonical_form());
    let x = stage(index);
    let ev = source.map(&ExprMap::last(&x, Structural::Ev0Plus), i);
    let ip = source.map(&ExprMap::last(&x, Structural::IPlus), i);
    match (ev, ip) {
        (Ok(ev), Ok(ip)) => {
            let both = ev.compose(&ip).is_ok_and(|c| c.equals(&GroupHom::identity(ip.domain())))
                && ip.compose(&ev).is_ok_and(|c| c.equals(&GroupHom::identity(ev.domain())));
            report.ev0_inverse = Some(both);
            report.nk_vanishes = Some(ev.kernel().group.is_trivial());
        }
        (Err(e), _) | (_, Err(e)) => report.gaps.push(format!("ev₀⁺/i₊ at {x}: {e}")),
    }
    report
}

/// A directed sequence of rings with an optional colimit the engine can evaluate.
#[derive(Clone, Debug)]
pub struct RingDiagram {
    pub stages: Vec<RingDesc>,
    pub maps: Vec<RingHom>,
    pub colimit: Option<RingDesc>,
}

impl RingDiagram {
    /// `stages[k] → stages[k+1]` for consecutive stages, with the obvious homomorphism.
    pub fn chain(stages: Vec<RingDesc>, colimit: Option<RingDesc>) -> Result<Self, DeloopError> {
        let maps = stages
            .windows(2)
            .map(|w| canonical_hom(&w[0], &w[1]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RingDiagram { stages, maps, colimit })
    }

    /// `stages` followed by identities on the last stage, `len` stages in all; the colimit
    /// is the last stage.
    pub fn eventually_constant(mut stages: Vec<RingDesc>, len: usize) -> Result<Self, DeloopError> {
        let last = stages
            .last()
            .cloned()
            .ok_or_else(|| DeloopError::Gap("empty diagram".into()))?;
        while stages.len() < len {
            stages.push(last.clone());
        }
        Self::chain(stages, Some(last))
    }
}

fn canonical_hom(a: &RingDesc, b: &RingDesc) -> Result<RingHom, DeloopError> {
    use crate::rings::HomKind;
    let err = |e: crate::rings::RingError| DeloopError::Gap(format!("{a} → {b}: {e}"));
    if a == b {
        return RingHom::new(a.clone(), b.clone(), HomKind::Identity).map_err(err);
    }
    if let Ok(h) = RingHom::field_embedding(a, b) {
        return Ok(h);
    }
    if let Ok(h) = RingHom::new(a.clone(), b.clone(), HomKind::Reduction) {
        return Ok(h);
    }
    let Some(e) = b.extension() else {
        return Err(DeloopError::Gap(format!("no canonical map {a} → {b}")));
    };
    if &e.base == a {
        let kind = match e.kind {
            VarKind::Polynomial => Structural::IPlus,
            VarKind::NegPolynomial => Structural::IMinus,
            VarKind::Laurent => Structural::I0,
        };
        return Ok(RingHom::structural(kind, a, &e.var));
    }
    Err(DeloopError::Gap(format!("no canonical map {a} → {b}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum ColimitVerdict {
    Equal,
    Different { colimit: CanonicalForm, of_colimit: CanonicalForm },
    Unstable { inspected: usize },
    /// Stages stabilize but the colimit ring is not computable.
    NoComparison { colimit: CanonicalForm },
    Gap { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct ColimitReport {
    pub degree: i64,
    pub stages: Vec<CanonicalForm>,
    pub verdict: ColimitVerdict,
}

/// Compares `colim K_i(stages)` with `K_i(colimit)`.
pub fn filtered_colimit_check(diagram: &RingDiagram, i: i64, bound: usize, flavor: Flavor) -> ColimitReport {
    let mut report = ColimitReport {
        degree: i,
        stages: Vec::new(),
        verdict: ColimitVerdict::Gap { reason: String::new() },
    };
    let run = |report: &mut ColimitReport| -> Result<ColimitVerdict, String> {
        let groups = diagram
            .stages
            .iter()
            .map(|r| k_group(r, i, flavor).map(|v| v.group))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        report.stages = groups.iter().map(FgAbGroup::canonical_form).collect();
        let maps = diagram
            .maps
            .iter()
            .map(|h| induced_k_map(h, i, flavor))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let colim = colim_sequence(&groups, &maps, bound).map_err(|e| e.to_string())?;
        let group = match colim {
            ColimResult::Unstable { inspected } => return Ok(ColimitVerdict::Unstable { inspected }),
            ColimResult::Stable { group, .. } => group.canonical_form(),
        };
        let Some(c) = &diagram.colimit else {
            return Ok(ColimitVerdict::NoComparison { colimit: group });
        };
        let direct = k_group(c, i, flavor).map_err(|e| e.to_string())?.group.canonical_form();
        Ok(if direct == group {
            ColimitVerdict::Equal
        } else {
            ColimitVerdict::Different {
                colimit: group,
                of_colimit: direct,
            }
        })
    };
    report.verdict = run(&mut report).unwrap_or_else(|reason| ColimitVerdict::Gap { reason });
    report
}
