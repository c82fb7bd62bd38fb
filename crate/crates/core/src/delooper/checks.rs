use serde::Serialize;

use crate::abgroup::{direct_sum, CanonicalForm, FgAbGroup, GroupHom};

use super::expr::Expression;
use super::instance::{restricted_sum, DegreeData, StructuredKInstance};
use super::source::{bass_cokernel, KSource, Rho};
use super::{DeloopError, Sign};

/// `NK_i = ker K_i(ev₀^±)` with the splitting `K_i(A) ⊕ NK_i ≅ K_i(A[t^±])`.
#[derive(Clone, Debug)]
pub struct NkResult {
    pub group: FgAbGroup,
    pub inclusion: GroupHom,
    /// `K_i(A[t^±]) → NK_i`, induced by `id − i_± ∘ ev₀^±`.
    pub retraction: GroupHom,
    /// `(K_i(i_±), inclusion): K_i(A) ⊕ NK_i → K_i(A[t^±])`, an isomorphism.
    pub splitting: GroupHom,
}

pub fn nk_of(data: &DegreeData, sign: Sign) -> Result<NkResult, DeloopError> {
    let (ev, i) = match sign {
        Sign::Plus => (&data.ev0_plus, &data.i_plus),
        Sign::Minus => (&data.ev0_minus, &data.i_minus),
    };
    let ker = ev.kernel();
    let ambient = ev.domain();
    let proj = GroupHom::identity(ambient).sub(&i.compose(ev)?)?;
    let retraction = proj
        .lift_through(&ker.inclusion)
        .ok_or_else(|| DeloopError::Inconsistent("id − i∘ev₀ does not land in ker ev₀".into()))?;
    let sum = direct_sum(&[data.k_a.clone(), ker.group.clone()]);
    let splitting = GroupHom::copair(&sum, &[i, &ker.inclusion])?;
    if !splitting.is_isomorphism() {
        return Err(DeloopError::Inconsistent("K(A) ⊕ NK → K(A[t^±]) is not an isomorphism".into()));
    }
    Ok(NkResult {
        group: ker.group,
        inclusion: ker.inclusion,
        retraction,
        splitting,
    })
}

pub fn nk(inst: &StructuredKInstance, i: i64, sign: Sign) -> Result<NkResult, DeloopError> {
    nk_of(inst.at(i)?, sign)
}

/// `K_{i−1}` by the cokernel formula, with the boundary projection `∂_i`.
#[derive(Clone, Debug)]
pub struct BassStep {
    pub degree: i64,
    pub group: FgAbGroup,
    pub boundary: GroupHom,
    pub sum: GroupHom,
}

/// `coker(K_i(j₊) ⊕ K_i(j₋))` over `expr`.
pub fn bass_step(source: &dyn KSource, expr: &Expression, i: i64) -> Result<BassStep, DeloopError> {
    let b = bass_cokernel(source, expr, i)?;
    Ok(BassStep {
        degree: i,
        group: b.cokernel.group,
        boundary: b.cokernel.projection,
        sum: b.sum,
    })
}

/// The restricted splitting map `BHS_r = (i₀, j₊|NK⁺, j₋|NK⁻)` and the two nil results.
pub(crate) fn bhs_r_map(data: &DegreeData) -> Result<(GroupHom, [NkResult; 2]), DeloopError> {
    let p = nk_of(data, Sign::Plus)?;
    let m = nk_of(data, Sign::Minus)?;
    let sum = restricted_sum(&data.k_a, &p.group, &m.group);
    let bp = data.j_plus.compose(&p.inclusion)?;
    let bm = data.j_minus.compose(&m.inclusion)?;
    let f = GroupHom::copair(&sum, &[&data.i0, &bp, &bm])?;
    Ok((f, [p, m]))
}

/// A declared retraction as a single map into `K_i(A) ⊕ NK⁺ ⊕ NK⁻`.
pub(crate) fn rho_map(data: &DegreeData, rho: &Rho) -> Result<GroupHom, DeloopError> {
    let p = nk_of(data, Sign::Plus)?;
    let m = nk_of(data, Sign::Minus)?;
    let lift = |c: &GroupHom, n: &NkResult, s: &str| {
        c.lift_through(&n.inclusion)
            .ok_or_else(|| DeloopError::Inconsistent(format!("rho component {s} does not land in NK")))
    };
    let (rp, rm) = (lift(&rho.plus, &p, "plus")?, lift(&rho.minus, &m, "minus")?);
    let sum = restricted_sum(&data.k_a, &p.group, &m.group);
    Ok(GroupHom::pair(&data.k_laurent, &sum, &[&rho.base, &rp, &rm])?)
}

/// Outcome of one exactness spot.
#[derive(Clone, Debug, Serialize)]
pub struct Spot {
    pub spot: u8,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Where `K_{i−1}` in the fundamental sequence came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryTarget {
    /// The cokernel itself.
    BassCokernel,
    /// The source's own `K_{i−1}`, identified with the cokernel.
    Declared,
}

/// `0 → K_i(A) → K_i(A[t]) ⊕ K_i(A[t⁻¹]) → K_i(A[t,t⁻¹]) → K_{i−1}(A) → 0` with its checks.
#[derive(Clone, Debug)]
pub struct FundamentalSequence {
    pub degree: i64,
    pub terms: [FgAbGroup; 4],
    pub first: GroupHom,
    pub second: GroupHom,
    pub boundary: GroupHom,
    pub target: BoundaryTarget,
    pub section: Option<GroupHom>,
    pub spots: Vec<Spot>,
}

impl FundamentalSequence {
    pub fn exact(&self) -> bool {
        self.spots.iter().all(|s| s.exact)
    }

    pub fn passed(&self) -> bool {
        self.exact() && self.section.is_some()
    }

    pub fn first_failure(&self) -> Option<u8> {
        self.spots.iter().find(|s| !s.exact).map(|s| s.spot)
    }

    pub fn forms(&self) -> [CanonicalForm; 4] {
        self.terms.clone().map(|g| g.canonical_form())
    }
}

fn vec_str(v: &[num_bigint::BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Exactness of `f` then `g`, with a witness element when it fails.
fn spot(n: u8, f: &GroupHom, g: &GroupHom) -> Result<Spot, DeloopError> {
    let r = GroupHom::is_exact_at(f, g)?;
    let detail = if !r.image_in_kernel {
        let j = (0..f.matrix().cols())
            .find(|&j| !g.codomain().is_zero_element(&g.apply(&f.matrix().column(j))))
            .unwrap_or(0);
        Some(format!("image of generator {j} of the previous term is not killed: {}", vec_str(&f.matrix().column(j))))
    } else if !r.kernel_in_image {
        let ker = g.kernel();
        let q = f.cokernel();
        let bad = (0..ker.inclusion.matrix().cols())
            .map(|j| ker.inclusion.matrix().column(j))
            .find(|v| !q.group.is_zero_element(&q.projection.apply(v)))
            .unwrap_or_default();
        Some(format!("kernel element {} is not in the image", vec_str(&bad)))
    } else {
        None
    };
    Ok(Spot {
        spot: n,
        exact: r.exact(),
        detail,
    })
}

pub fn fundamental_sequence(inst: &StructuredKInstance, i: i64) -> Result<FundamentalSequence, DeloopError> {
    let data = inst.at(i)?;
    let mid = direct_sum(&[data.k_plus.clone(), data.k_minus.clone()]);
    let first = GroupHom::pair(&data.k_a, &mid, &[&data.i_plus, &data.i_minus.neg()])?;
    let second = GroupHom::copair(&mid, &[&data.j_plus, &data.j_minus])?;
    let coker = second.cokernel();
    let mut spots = Vec::new();
    let zero_in = GroupHom::zero(&FgAbGroup::trivial(), &data.k_a);
    spots.push(spot(1, &zero_in, &first)?);
    spots.push(spot(2, &first, &second)?);
    let (boundary, target, mismatch) = match inst.declared_below(i) {
        Some(k) if k.is_isomorphic(&coker.group) => {
            let iso = GroupHom::from_canonical(k);
            (iso.compose(&coker.projection)?, BoundaryTarget::Declared, None)
        }
        Some(k) => (
            coker.projection.clone(),
            BoundaryTarget::Declared,
            Some(format!("coker(j₊ ⊕ j₋) = {} but K_{}(A) = {}", coker.group, i - 1, k)),
        ),
        None => (coker.projection.clone(), BoundaryTarget::BassCokernel, None),
    };
    let mut s3 = spot(3, &second, &boundary)?;
    if let Some(m) = mismatch {
        s3.exact = false;
        s3.detail = Some(m);
    }
    spots.push(s3);
    let zero_out = GroupHom::zero(boundary.codomain(), &FgAbGroup::trivial());
    spots.push(spot(4, &boundary, &zero_out)?);
    let section = boundary.has_section();
    let k_below = boundary.codomain().clone();
    Ok(FundamentalSequence {
        degree: i,
        terms: [data.k_a.clone(), mid.group, data.k_laurent.clone(), k_below],
        first,
        second,
        boundary,
        target,
        section,
        spots,
    })
}

/// Verdict of a splitting comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum BhsVerdict {
    Iso,
    NotIso { kernel: CanonicalForm, cokernel: CanonicalForm },
    /// No section of `∂_i`, so the map cannot be assembled.
    SplittingMissing,
}

#[derive(Clone, Debug)]
pub struct BhsReport {
    pub degree: i64,
    pub k_below: FgAbGroup,
    pub k: FgAbGroup,
    pub nk_plus: FgAbGroup,
    pub nk_minus: FgAbGroup,
    pub k_laurent: FgAbGroup,
    pub map: Option<GroupHom>,
    pub verdict: BhsVerdict,
}

impl BhsReport {
    pub fn passed(&self) -> bool {
        self.verdict == BhsVerdict::Iso
    }
}

/// `(s_{i−1}, K_i(i₀), K_i(j₊)|NK⁺, K_i(j₋)|NK⁻): K_{i−1} ⊕ K_i ⊕ NK⁺_i ⊕ NK⁻_i → K_i(A[t,t⁻¹])`.
pub fn bhs_check(inst: &StructuredKInstance, i: i64) -> Result<BhsReport, DeloopError> {
    let data = inst.at(i)?;
    let fs = fundamental_sequence(inst, i)?;
    let (_, [p, m]) = bhs_r_map(data)?;
    let k_below = fs.terms[3].clone();
    let mut report = BhsReport {
        degree: i,
        k_below: k_below.clone(),
        k: data.k_a.clone(),
        nk_plus: p.group.clone(),
        nk_minus: m.group.clone(),
        k_laurent: data.k_laurent.clone(),
        map: None,
        verdict: BhsVerdict::SplittingMissing,
    };
    let Some(s) = fs.section else { return Ok(report) };
    let sum = direct_sum(&[k_below, data.k_a.clone(), p.group.clone(), m.group.clone()]);
    let bp = data.j_plus.compose(&p.inclusion)?;
    let bm = data.j_minus.compose(&m.inclusion)?;
    let f = GroupHom::copair(&sum, &[&s, &data.i0, &bp, &bm])?;
    let (ker, cok) = (f.kernel().group, f.cokernel().group);
    report.verdict = if ker.is_trivial() && cok.is_trivial() {
        BhsVerdict::Iso
    } else {
        BhsVerdict::NotIso {
            kernel: ker.canonical_form(),
            cokernel: cok.canonical_form(),
        }
    };
    report.map = Some(f);
    Ok(report)
}

/// Per-degree outcome of a contractedness check.
#[derive(Clone, Debug, Serialize)]
pub struct ContractedDegree {
    pub degree: i64,
    /// A retraction of `BHS_r` exists (found by the solver, or declared and verified).
    pub retraction: bool,
    pub retraction_declared: bool,
    /// `None` when the splitting is not required in this degree.
    pub bhs: Option<BhsVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
}

impl ContractedDegree {
    pub fn passed(&self) -> bool {
        self.gap.is_none() && self.retraction && self.bhs.as_ref().is_none_or(|v| *v == BhsVerdict::Iso)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractedReport {
    pub c: i64,
    pub degrees: Vec<ContractedDegree>,
}

impl ContractedReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(ContractedDegree::passed)
    }

    pub fn first_failure(&self) -> Option<i64> {
        self.degrees.iter().find(|d| !d.passed()).map(|d| d.degree)
    }
}

/// Retractions of `BHS_r` in every degree of the window, and the full splitting for `i ≥ 1 − c`.
pub fn contracted_check(inst: &StructuredKInstance, c: i64) -> ContractedReport {
    let degrees = (inst.lo..=inst.hi)
        .map(|i| {
            let mut out = ContractedDegree {
                degree: i,
                retraction: false,
                retraction_declared: false,
                bhs: None,
                gap: None,
            };
            let run = |out: &mut ContractedDegree| -> Result<(), DeloopError> {
                let data = inst.at(i)?;
                let (f, _) = bhs_r_map(data)?;
                out.retraction = match &data.rho {
                    Some(rho) => {
                        out.retraction_declared = true;
                        rho_map(data, rho)?.compose(&f)?.equals(&GroupHom::identity(f.domain()))
                    }
                    None => f.has_retraction().is_some(),
                };
                if i >= 1 - c {
                    out.bhs = Some(bhs_check(inst, i)?.verdict);
                }
                Ok(())
            };
            if let Err(e) = run(&mut out) {
                out.gap = Some(e.to_string());
            }
            out
        })
        .collect();
    ContractedReport { c, degrees }
}

/// `K_i(A[t,t⁻¹]) / im BHS_r`, the complement the cokernel formula should reproduce.
pub fn bhs_complement(inst: &StructuredKInstance, i: i64) -> Result<FgAbGroup, DeloopError> {
    let (f, _) = bhs_r_map(inst.at(i)?)?;
    Ok(f.cokernel().group)
}
