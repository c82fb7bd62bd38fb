use serde::Serialize;

use crate::abgroup::{direct_sum, CanonicalForm, FgAbGroup, GroupHom};
use crate::rings::Structural;

use super::checks::{bhs_check, nk_of, BhsVerdict};
use super::expr::{ExprMap, Expression};
use super::instance::StructuredKInstance;
use super::source::KSource;
use super::{DeloopError, Sign};

/// The two Wang-sequence pieces of `π_i` of the mapping torus of `K(Φ⁻¹)`:
/// `0 → coker(1 − φ_i) → π_i(T) → ker(1 − φ_{i−1}) → 0`.
#[derive(Clone, Debug)]
pub struct TorusPi {
    pub coker: FgAbGroup,
    pub ker: FgAbGroup,
    /// Present when the extension is forced.
    pub resolved: Option<FgAbGroup>,
}

/// `phi_i` acts on `K_i`, `phi_below` on `K_{i−1}`.
pub fn mapping_torus_pi(phi_i: &GroupHom, phi_below: &GroupHom) -> Result<TorusPi, DeloopError> {
    let one_minus = |f: &GroupHom| GroupHom::identity(f.domain()).sub(f);
    let coker = one_minus(phi_i)?.cokernel().group;
    let ker = one_minus(phi_below)?.kernel().group;
    let identity_twist = phi_i.equals(&GroupHom::identity(phi_i.domain())) && phi_below.equals(&GroupHom::identity(phi_below.domain()));
    // Ext(ker, coker) = 0 when ker is free; with the identity the torus is E ∧ (S¹)₊, which splits
    let ker_free = ker.canonical_form().invariant_factors.is_empty();
    let forced = identity_twist || ker_free || coker.is_trivial();
    let resolved = forced.then(|| direct_sum(&[coker.clone(), ker.clone()]).group.canonical_group());
    Ok(TorusPi { coker, ker, resolved })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum TwistedVerdict {
    Pass,
    Fail { reason: String },
    /// Ranks and orders agree but the torus group is only known up to extension.
    ConsistentUpToExtension,
    Gap { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    pub degree: i64,
    pub identity_twist: bool,
    pub torus_coker: Option<CanonicalForm>,
    pub torus_ker: Option<CanonicalForm>,
    pub nk_plus: Option<CanonicalForm>,
    pub nk_minus: Option<CanonicalForm>,
    pub k_laurent: Option<CanonicalForm>,
    pub verdict: TwistedVerdict,
}

fn is_identity_label(twist: Option<&str>) -> bool {
    twist.is_none_or(|t| t == "id")
}

/// `T ⊕ NK⁺_i ⊕ NK⁻_i ≅ K_i(A_Φ[t,t⁻¹])`, with `T` the torus group in degree `i`.
pub fn twisted_bhs_check(source: &dyn KSource, base: &Expression, twist: Option<&str>, i: i64) -> TwistedReport {
    let mut report = TwistedReport {
        degree: i,
        identity_twist: is_identity_label(twist),
        torus_coker: None,
        torus_ker: None,
        nk_plus: None,
        nk_minus: None,
        k_laurent: None,
        verdict: TwistedVerdict::Gap { reason: String::new() },
    };
    let verdict = if report.identity_twist {
        identity_case(source, base, i, &mut report)
    } else {
        twisted_case(source, base, twist.unwrap_or_default(), i, &mut report)
    };
    report.verdict = verdict.unwrap_or_else(|e| TwistedVerdict::Gap { reason: e.to_string() });
    report
}

fn identity_case(source: &dyn KSource, base: &Expression, i: i64, report: &mut TwistedReport) -> Result<TwistedVerdict, DeloopError> {
    let inst = StructuredKInstance::from_source(source, base, None, i, i)?;
    let b = bhs_check(&inst, i)?;
    report.torus_coker = Some(b.k.canonical_form());
    report.torus_ker = Some(b.k_below.canonical_form());
    report.nk_plus = Some(b.nk_plus.canonical_form());
    report.nk_minus = Some(b.nk_minus.canonical_form());
    report.k_laurent = Some(b.k_laurent.canonical_form());
    Ok(match b.verdict {
        BhsVerdict::Iso => TwistedVerdict::Pass,
        BhsVerdict::NotIso { kernel, cokernel } => TwistedVerdict::Fail {
            reason: format!("splitting map has kernel {kernel} and cokernel {cokernel}"),
        },
        BhsVerdict::SplittingMissing => TwistedVerdict::Fail {
            reason: "no section of the boundary map".into(),
        },
    })
}

fn twisted_case(source: &dyn KSource, base: &Expression, twist: &str, i: i64, report: &mut TwistedReport) -> Result<TwistedVerdict, DeloopError> {
    let phi_i = source.phi_inverse(base, twist, i)?;
    let phi_below = source.phi_inverse(base, twist, i - 1)?;
    let torus = mapping_torus_pi(&phi_i, &phi_below)?;
    let inst = StructuredKInstance::from_source(source, base, Some(twist), i, i)?;
    let data = inst.at(i)?;
    let p = nk_of(data, Sign::Plus)?.group;
    let m = nk_of(data, Sign::Minus)?.group;
    let l = data.k_laurent.clone();
    report.torus_coker = Some(torus.coker.canonical_form());
    report.torus_ker = Some(torus.ker.canonical_form());
    report.nk_plus = Some(p.canonical_form());
    report.nk_minus = Some(m.canonical_form());
    report.k_laurent = Some(l.canonical_form());
    let nil = direct_sum(&[p, m]).group;
    if let Some(t) = &torus.resolved {
        let lhs = direct_sum(&[t.clone(), nil]).group;
        return Ok(if lhs.is_isomorphic(&l) {
            TwistedVerdict::Pass
        } else {
            TwistedVerdict::Fail {
                reason: format!("{} ≇ {}", lhs.canonical_form(), l.canonical_form()),
            }
        });
    }
    // 0 → coker ⊕ nil → K_i(A_Φ[t^±]) → ker → 0 constrains rank and torsion order
    let sub = direct_sum(&[torus.coker.clone(), nil]).group.canonical_form();
    let q = torus.ker.canonical_form();
    let lf = l.canonical_form();
    let rank_ok = lf.free_rank == sub.free_rank + q.free_rank;
    let bound = sub.torsion_order() * q.torsion_order();
    let torsion_ok = (&bound % lf.torsion_order()) == num_bigint::BigInt::from(0);
    Ok(if rank_ok && torsion_ok {
        TwistedVerdict::ConsistentUpToExtension
    } else {
        TwistedVerdict::Fail {
            reason: format!("rank or torsion order of {lf} incompatible with an extension of {q} by {sub}"),
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NilReport {
    pub degree: i64,
    pub k_nil: Option<CanonicalForm>,
    pub k: Option<CanonicalForm>,
    pub nk_shift: Option<CanonicalForm>,
    pub section_split: Option<bool>,
    pub verdict: TwistedVerdict,
}

/// `K_i(Nil(A, Φ)) ≅ K_i(A) ⊕ NK_{i+1}(A_Φ[t])`, with the section `A ↦ (A, 0)` split injective.
pub fn nil_decomposition_check(source: &dyn KSource, base: &Expression, twist: Option<&str>, i: i64) -> NilReport {
    let mut report = NilReport {
        degree: i,
        k_nil: None,
        k: None,
        nk_shift: None,
        section_split: None,
        verdict: TwistedVerdict::Gap { reason: String::new() },
    };
    let run = |report: &mut NilReport| -> Result<TwistedVerdict, DeloopError> {
        let table = source.nil(base, twist, i)?;
        let k = source.group(base, i)?;
        let nk = match table.nk_shift {
            Some(g) => g,
            None => {
                let tw = twist.filter(|t| *t != "id");
                source.map(&ExprMap::last_twisted(base, Structural::Ev0Plus, tw), i + 1)?.kernel().group
            }
        };
        report.k_nil = Some(table.k_nil.canonical_form());
        report.k = Some(k.canonical_form());
        report.nk_shift = Some(nk.canonical_form());
        let rhs = direct_sum(&[k.clone(), nk.clone()]).group;
        if !table.k_nil.is_isomorphic(&rhs) {
            return Ok(TwistedVerdict::Fail {
                reason: format!("K_{i}(Nil) = {} but K_{i}(A) ⊕ NK_{} = {}", table.k_nil.canonical_form(), i + 1, rhs.canonical_form()),
            });
        }
        if let Some(s) = &table.section {
            let split = s.has_retraction().is_some() && s.cokernel().group.is_isomorphic(&nk);
            report.section_split = Some(split);
            if !split {
                return Ok(TwistedVerdict::Fail {
                    reason: "the section A ↦ (A, 0) is not split injective with complement NK".into(),
                });
            }
        }
        Ok(TwistedVerdict::Pass)
    };
    report.verdict = run(&mut report).unwrap_or_else(|e| TwistedVerdict::Gap { reason: e.to_string() });
    report
}
