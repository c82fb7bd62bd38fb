#[path = "../examples/fixtures/mod.rs"]
mod fixtures;

use std::path::PathBuf;

use kwb_core::abgroup::CanonicalForm;
use kwb_core::delooper::{
    bhs_check, contracted_check, fundamental_sequence, kh_groups, negative_k, nil_decomposition_check, twisted_bhs_check, BhsVerdict,
    Expression, KSource, StructuredKInstance, TwistedVerdict,
};
use kwb_core::oracle::{self, OracleSource};
use std::sync::Arc;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load(name: &str) -> OracleSource {
    oracle::load(&dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn a() -> Expression {
    Expression::object("A")
}

fn z(r: usize) -> CanonicalForm {
    CanonicalForm { free_rank: r, invariant_factors: vec![] }
}

#[test]
fn checked_in_fixtures_match_the_builders() {
    for (name, file) in fixtures::all() {
        let on_disk = std::fs::read_to_string(dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, file.to_json(), "{name} is stale; rerun the make_fixtures example");
    }
}

#[test]
fn all_but_the_spot_one_control_validate() {
    for (name, _) in fixtures::all() {
        let r = oracle::load(&dir().join(name));
        assert_eq!(r.is_err(), name == "corrupt_spot1.json", "{name}: {:?}", r.err());
    }
}

#[test]
fn z_cokernel_gives_k_minus_one() {
    let src: Arc<dyn KSource> = Arc::new(load("z_cokernel.json"));
    let levels = negative_k(src.clone(), &a(), 1);
    assert_eq!(levels[0].group, Some(z(1)));
    let inst = StructuredKInstance::from_source(src.as_ref(), &a(), None, 0, 1).unwrap();
    for i in 0..=1 {
        assert!(fundamental_sequence(&inst, i).unwrap().passed(), "degree {i}");
        assert_eq!(bhs_check(&inst, i).unwrap().verdict, BhsVerdict::Iso);
    }
    assert!(contracted_check(&inst, 0).degrees.iter().all(|d| d.retraction_declared));
}

#[test]
fn corrupt_fixtures_fail_at_their_spot() {
    for (name, expected) in [("corrupt_spot1.json", 1u8), ("corrupt_spot2.json", 2), ("corrupt_spot3.json", 3)] {
        let src = oracle::load_unvalidated(&dir().join(name)).unwrap();
        let inst = StructuredKInstance::new_unchecked(&src, &a(), None, 0, 0).unwrap();
        let fs = fundamental_sequence(&inst, 0).unwrap();
        assert_eq!(fs.first_failure(), Some(expected), "{name}");
    }
}

#[test]
fn killed_nil_class_has_no_retraction() {
    let src = load("corrupt_spot2.json");
    let inst = StructuredKInstance::from_source(&src, &a(), None, 0, 0).unwrap();
    let r = contracted_check(&inst, 0);
    assert_eq!(r.first_failure(), Some(0));
    assert!(!r.degrees[0].retraction);
}

#[test]
fn twisted_fixtures() {
    let neg = load("twisted_neg.json");
    let r = twisted_bhs_check(&neg, &a(), Some("phi"), 1);
    assert_eq!(r.verdict, TwistedVerdict::Pass, "{r:?}");
    let amb = load("twisted_ambiguous.json");
    let r = twisted_bhs_check(&amb, &a(), Some("phi"), 1);
    assert_eq!(r.verdict, TwistedVerdict::ConsistentUpToExtension, "{r:?}");
}

#[test]
fn nil_fixtures() {
    let ok = nil_decomposition_check(&load("nil_z2.json"), &a(), None, 0);
    assert_eq!(ok.verdict, TwistedVerdict::Pass, "{ok:?}");
    let bad = nil_decomposition_check(&load("nil_mismatch.json"), &a(), None, 0);
    assert!(matches!(bad.verdict, TwistedVerdict::Fail { .. }), "{bad:?}");
    let f3 = nil_decomposition_check(&load("nil_f3.json"), &Expression::object("F3"), None, 0);
    assert_eq!(f3.verdict, TwistedVerdict::Pass, "{f3:?}");
}

#[test]
fn kh_stabilizes_after_one_step() {
    let r = kh_groups(&load("kh_nk.json"), &Expression::object("B"), 0, 3);
    assert_eq!(r.stable_at, Some(1), "{r:?}");
    assert!(r.passed(), "{r:?}");
}

#[test]
fn free_flavor_is_one_contracted() {
    let src = load("free_zmod6.json");
    let base = src.base_objects()[0].clone();
    let inst = StructuredKInstance::from_source(&src, &base, None, 0, 1).unwrap();
    let r = contracted_check(&inst, 1);
    assert!(r.passed(), "{r:?}");
    assert!(r.degrees.iter().all(|d| d.bhs.is_some()));
}
