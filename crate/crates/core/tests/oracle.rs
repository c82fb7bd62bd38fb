mod common;

use common::{identities_hold, mutate};
use kwb_core::delooper::*;
use kwb_core::oracle::{self, ExportRequest, OracleError};
use kwb_core::rings::{RingDesc, Structural};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring(s: &str) -> Expression {
    Expression::ring(&RingDesc::parse(s).unwrap())
}

fn engine_file(r: &str, lo: i64, hi: i64) -> oracle::OracleFile {
    oracle::export(&EngineSource::default(), &[ExportRequest::plain(ring(r))], lo, hi).unwrap()
}

/// Served groups and maps agree in canonical coordinates.
fn same_slice(a: &dyn KSource, b: &dyn KSource, base: &Expression, lo: i64, hi: i64) {
    for d in lo..=hi {
        for k in [None, Some(kwb_core::rings::VarKind::Polynomial), Some(kwb_core::rings::VarKind::NegPolynomial), Some(kwb_core::rings::VarKind::Laurent)] {
            let e = k.map_or(base.clone(), |k| base.extend(k));
            assert_eq!(a.group(&e, d).unwrap().canonical_form(), b.group(&e, d).unwrap().canonical_form(), "{e} in {d}");
        }
        for k in Structural::ALL {
            let m = ExprMap::last(base, k);
            assert_eq!(oracle::canonical_entries(&a.map(&m, d).unwrap()), oracle::canonical_entries(&b.map(&m, d).unwrap()), "{m} in {d}");
        }
    }
}

#[test]
fn round_trip_engine_slices() {
    for r in ["F2", "F3", "F4", "F5", "F7", "F8", "F9", "Z", "Zmod6", "Zmod1"] {
        let f = engine_file(r, 0, 1);
        let text = f.to_json();
        let loaded = oracle::from_json(&text, true).unwrap();
        same_slice(&EngineSource::default(), &loaded, &ring(r), 0, 1);
        // writing the loaded data again gives the same file, apart from the mode tag
        let again = oracle::export(&loaded, &[ExportRequest::plain(ring(r))], 0, 1).unwrap();
        assert_eq!(again, f);
    }
}

#[test]
fn export_keeps_mode_tag() {
    let src = ModelSource::bhs_extended(std::sync::Arc::new(EngineSource::default()));
    let f = oracle::export(&src, &[ExportRequest::plain(ring("F3"))], 0, 1).unwrap();
    assert_eq!(f.mode, SourceMode::BhsExtended);
    let loaded = oracle::from_json(&f.to_json(), true).unwrap();
    assert_eq!(loaded.origin(), SourceMode::BhsExtended);
    assert_eq!(loaded.mode(), SourceMode::Oracle);
}

#[test]
fn empty_files() {
    let f = oracle::export(&EngineSource::default(), &[], 0, 1).unwrap();
    let s = oracle::from_json(&f.to_json(), true).unwrap();
    assert!(s.objects().is_empty());
    assert!(s.group(&ring("F2"), 0).is_err());
}

#[test]
fn broken_identity_is_named() {
    let mut f = engine_file("Z", 0, 1);
    let m = f.maps.iter_mut().find(|m| m.name == "ev0_plus" && m.degree == "0").unwrap();
    m.matrix = vec![vec!["2".into()]];
    match oracle::from_file(&f, true) {
        Err(OracleError::Identity { identity, degree, .. }) => {
            assert!(identity.contains("ev0_plus ∘ i_plus"), "{identity}");
            assert_eq!(degree, 0);
        }
        other => panic!("{other:?}"),
    }
    assert!(oracle::from_file(&f, false).is_ok());
}

#[test]
fn parse_errors_have_positions() {
    match oracle::from_json("{\n  \"schema_version\": \"1\",\n  oops", true) {
        Err(OracleError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let mut f = engine_file("F2", 0, 1);
    f.groups[0].invariant_factors = vec!["1".into()];
    assert!(matches!(oracle::from_file(&f, true), Err(OracleError::Schema { .. })));
}

#[test]
fn fuzzed_files_never_crash_or_lie() {
    let bases = [engine_file("F3", 0, 1), engine_file("Z", 0, 1), engine_file("Zmod6", 0, 1), engine_file("F5", 0, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut rejected, mut accepted) = (0, 0);
    for n in 0..200 {
        let mut v = serde_json::to_value(&bases[n % bases.len()]).unwrap();
        mutate(&mut v, &mut rng);
        let text = if rng.gen_bool(0.05) { v.to_string()[..v.to_string().len() / 2].to_string() } else { v.to_string() };
        match oracle::from_json(&text, true) {
            Ok(s) => {
                accepted += 1;
                assert!(identities_hold(&s), "accepted a file with a broken identity: {text}");
            }
            Err(_) => rejected += 1,
        }
    }
    assert_eq!(rejected + accepted, 200);
    assert!(rejected > 0);
}

#[test]
fn oversized_windows_are_rejected() {
    let mut f = engine_file("F2", 0, 1);
    f.degrees.lo = "-1000000007".into();
    match oracle::from_file(&f, true) {
        Err(OracleError::Schema { field, .. }) => assert_eq!(field, "degrees"),
        other => panic!("{other:?}"),
    }
}
