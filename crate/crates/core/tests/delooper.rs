use std::sync::Arc;

use kwb_core::abgroup::{FgAbGroup, GroupHom, IntMatrix};
use kwb_core::delooper::*;
use kwb_core::kengine::Flavor;
use kwb_core::rings::RingDesc;

fn ring(s: &str) -> Expression {
    Expression::ring(&RingDesc::parse(s).unwrap())
}

fn engine() -> Arc<dyn KSource> {
    Arc::new(EngineSource::default())
}

fn extended() -> Arc<dyn KSource> {
    Arc::new(ModelSource::bhs_extended(engine()))
}

/// The synthetic 0-contracted source: `K₀ = ℤ`, `K₋₁ = ℤ` behind a connective cut at 0.
fn synthetic(cut: Option<i64>) -> Arc<dyn KSource> {
    let g = TableGround::new("A").with_k(0, FgAbGroup::free(1)).with_k(-1, FgAbGroup::free(1));
    let s = ModelSource::new(Box::new(g), SourceMode::Oracle);
    Arc::new(match cut {
        Some(c) => s.connective_below(c),
        None => s,
    })
}

fn form(g: &FgAbGroup) -> String {
    g.canonical_form().to_string()
}

#[test]
fn fundamental_sequences_on_engine_data() {
    let src = engine();
    for r in ["F2", "F3", "F5", "Z", "Zmod6"] {
        let inst = StructuredKInstance::from_source(src.as_ref(), &ring(r), None, 0, 1).unwrap();
        for i in [0, 1] {
            let fs = fundamental_sequence(&inst, i).unwrap();
            assert!(fs.passed(), "{r} at {i}: {:?}", fs.spots);
            let b = bhs_check(&inst, i).unwrap();
            assert!(b.passed(), "{r} at {i}: {:?}", b.verdict);
            assert!(fs.terms[3].is_isomorphic(&bhs_complement(&inst, i).unwrap()));
        }
    }
}

#[test]
fn bhs_over_f5() {
    let inst = StructuredKInstance::from_source(engine().as_ref(), &ring("F5"), None, 1, 1).unwrap();
    let b = bhs_check(&inst, 1).unwrap();
    assert_eq!(form(&b.k_below), "Z");
    assert_eq!(form(&b.k), "Z/4");
    assert_eq!(form(&b.k_laurent), "Z/4 + Z");
    assert!(b.nk_plus.is_trivial() && b.nk_minus.is_trivial());
}

#[test]
fn zmod4_at_degree_one_is_a_gap() {
    let r = StructuredKInstance::from_source(engine().as_ref(), &ring("Zmod4"), None, 1, 1);
    assert!(matches!(r, Err(DeloopError::Gap(_))));
}

#[test]
fn negative_k_of_regular_rings() {
    for r in ["F2", "F3", "Z", "Zmod1"] {
        let levels = negative_k(extended(), &ring(r), 2);
        for l in &levels {
            assert_eq!(l.group.as_ref().map(|g| g.to_string()), Some("0".into()), "{r}: {l:?}");
        }
    }
    // depth 1 needs only one-variable data, so the engine alone serves it
    let l = negative_k(engine(), &ring("Z"), 1);
    assert!(l[0].group.as_ref().unwrap().is_trivial());
    let l = negative_k(engine(), &ring("F3"), 2);
    assert!(l[1].gap.is_some());
}

#[test]
fn synthetic_negative_k() {
    let l = negative_k(synthetic(Some(0)), &Expression::object("A"), 1);
    assert_eq!(l[0].group.as_ref().unwrap().to_string(), "Z");
}

#[test]
fn contracted_on_engine_data() {
    for r in ["F2", "F4", "F9", "Z", "Zmod6"] {
        let inst = StructuredKInstance::from_source(engine().as_ref(), &ring(r), None, 0, 1).unwrap();
        let rep = contracted_check(&inst, 0);
        assert!(rep.passed(), "{r}: {rep:?}");
        assert!(rep.degrees.iter().all(|d| d.retraction));
    }
}

#[test]
fn tower_over_f2() {
    let t = shadow_tower(extended(), &ring("F2"), -2, 1, 3);
    assert!(t.gaps.is_empty(), "{:?}", t.gaps);
    assert!(t.constant());
    assert_eq!(t.at(0, 0).unwrap().to_string(), "Z");
    assert_eq!(t.at(3, 1).unwrap().to_string(), "0");
}

#[test]
fn tower_of_synthetic_fixture() {
    let a = Expression::object("A");
    let t = shadow_tower(synthetic(Some(0)), &a, -1, 0, 4);
    assert!(t.gaps.is_empty(), "{:?}", t.gaps);
    assert_eq!(t.stability(0).unwrap().stable_from, Some(0));
    assert_eq!(t.at(0, -1).unwrap().to_string(), "0");
    assert_eq!(t.stability(-1).unwrap().stable_from, Some(1));
    assert_eq!(t.stability(-1).unwrap().value.as_ref().unwrap().to_string(), "Z");
    let t = shadow_tower(synthetic(None), &a, -3, 1, 4);
    assert!(t.constant());
}

#[test]
fn kh_of_finite_fields() {
    for (q, expect) in [(2u64, "0"), (3, "Z/2"), (4, "Z/3"), (5, "Z/4")] {
        let rep = kh_groups(extended().as_ref(), &ring(&format!("F{q}")), 1, 4);
        assert_eq!(rep.value.as_ref().map(|v| v.to_string()), Some(expect.to_string()), "{rep:?}");
        assert_eq!(rep.stable_at, Some(0));
        assert!(rep.passed());
    }
}

#[test]
fn colimits() {
    let f = |q| RingDesc::finite_field(q).unwrap();
    let d = RingDiagram::eventually_constant(vec![f(2), f(4)], 6).unwrap();
    let r = filtered_colimit_check(&d, 1, 8, Flavor::IdempotentComplete);
    assert_eq!(r.verdict, ColimitVerdict::Equal, "{r:?}");
    let d = RingDiagram::chain(vec![f(2), f(4), f(16), f(256)], None).unwrap();
    let r = filtered_colimit_check(&d, 1, 8, Flavor::IdempotentComplete);
    assert!(matches!(r.verdict, ColimitVerdict::Unstable { .. }), "{r:?}");
}

#[test]
fn torus_examples() {
    let z = FgAbGroup::free(1);
    let id = GroupHom::identity(&z);
    let t = mapping_torus_pi(&id, &id).unwrap();
    assert_eq!(form(t.resolved.as_ref().unwrap()), "Z^2");
    let neg = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_rows(&[vec![-1]])).unwrap();
    let zero = GroupHom::identity(&FgAbGroup::trivial());
    let t = mapping_torus_pi(&neg, &zero).unwrap();
    assert_eq!(form(t.resolved.as_ref().unwrap()), "Z/2");
    let z4 = FgAbGroup::cyclic(4);
    let t = mapping_torus_pi(&zero, &GroupHom::identity(&z4)).unwrap();
    assert_eq!(form(t.resolved.as_ref().unwrap()), "Z/4");
}

#[test]
fn twisted_identity_matches_bhs() {
    for r in ["F2", "F3", "Z"] {
        let rep = twisted_bhs_check(engine().as_ref(), &ring(r), None, 1);
        assert_eq!(rep.verdict, TwistedVerdict::Pass, "{r}: {rep:?}");
    }
}

#[test]
fn conjugation_preserves_verdicts() {
    let inst = StructuredKInstance::from_source(engine().as_ref(), &ring("F5"), None, 0, 1).unwrap();
    for seed in 0..5 {
        let c = inst.conjugated(seed);
        c.validate().unwrap();
        for i in [0, 1] {
            assert!(fundamental_sequence(&c, i).unwrap().passed());
            assert_eq!(bhs_check(&c, i).unwrap().verdict, bhs_check(&inst, i).unwrap().verdict);
        }
    }
}
