//! Builders for the JSON fixtures under `fixtures/`.

use kwb_core::abgroup::{direct_sum, FgAbGroup, GroupHom};
use kwb_core::delooper::{nk_of, EngineSource, Expression, ModelSource, Sign, SourceMode, StructuredKInstance, TableGround};
use kwb_core::kengine::Flavor;
use kwb_core::oracle::{self, ExportRequest, MapEntry, NilEntry, OracleFile};
use kwb_core::rings::RingDesc;
use serde_json::json;

fn ring(s: &str) -> Expression {
    Expression::ring(&RingDesc::parse(s).unwrap())
}

fn rows(f: &GroupHom) -> Vec<Vec<String>> {
    oracle::canonical_entries(f).iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// Appends a retraction of the restricted splitting map in every degree.
fn with_rho(mut f: OracleFile, base: &Expression) -> OracleFile {
    let src = oracle::from_file(&f, true).unwrap();
    let (lo, hi) = src.window();
    let inst = StructuredKInstance::from_source(&src, base, None, lo, hi).unwrap();
    for (d, data) in &inst.degrees {
        let p = nk_of(data, Sign::Plus).unwrap();
        let m = nk_of(data, Sign::Minus).unwrap();
        let sum = direct_sum(&[data.k_a.clone(), p.group.clone(), m.group.clone()]);
        let bp = data.j_plus.compose(&p.inclusion).unwrap();
        let bm = data.j_minus.compose(&m.inclusion).unwrap();
        let r = GroupHom::copair(&sum, &[&data.i0, &bp, &bm]).unwrap().has_retraction().unwrap();
        let comps = [
            ("base", sum.projections[0].compose(&r).unwrap()),
            ("plus", p.inclusion.compose(&sum.projections[1]).unwrap().compose(&r).unwrap()),
            ("minus", m.inclusion.compose(&sum.projections[2]).unwrap().compose(&r).unwrap()),
        ];
        for (c, g) in comps {
            f.maps.push(MapEntry {
                object: base.key(),
                suffix: Vec::new(),
                twist: None,
                name: "rho".into(),
                degree: d.to_string(),
                component: Some(c.into()),
                matrix: rows(&g),
            });
        }
    }
    f
}

fn model(g: TableGround) -> ModelSource {
    ModelSource::new(Box::new(g), SourceMode::Oracle)
}

fn object(name: &str) -> Expression {
    Expression::object(name)
}

/// `K₀(A) = ℤ`, `K₀(A[t^±]) = ℤ²` with `j₊ ⊕ j₋` hitting `ℤ ⊕ 0`, so `K₋₁(A) = ℤ`.
pub fn z_cokernel() -> OracleFile {
    let g = TableGround::new("A").with_k(0, FgAbGroup::free(1)).with_k(-1, FgAbGroup::free(1));
    let f = oracle::export(&model(g), &[ExportRequest::plain(object("A"))], 0, 1).unwrap();
    with_rho(f, &object("A"))
}

/// `K₀(A) = ℤ` with `NK₀⁺ = NK₀⁻ = ℤ/2` and `K₋₁(A) = ℤ`.
pub fn nk_z2() -> OracleFile {
    let g = TableGround::new("A")
        .with_k(0, FgAbGroup::free(1))
        .with_k(-1, FgAbGroup::free(1))
        .with_nk(Sign::Plus, 0, FgAbGroup::cyclic(2))
        .with_nk(Sign::Minus, 0, FgAbGroup::cyclic(2));
    oracle::export(&model(g), &[ExportRequest::plain(object("A"))], 0, 0).unwrap()
}

fn map_mut<'a>(f: &'a mut OracleFile, name: &str, degree: &str) -> &'a mut MapEntry {
    f.maps.iter_mut().find(|m| m.name == name && m.degree == degree).unwrap()
}

/// `K₀(i₊)` and `K₀(i₋)` replaced by zero: the first map of the sequence is not injective.
pub fn corrupt_spot1() -> OracleFile {
    let mut f = z_cokernel();
    f.maps.retain(|m| m.name != "rho");
    for name in ["i_plus", "i_minus"] {
        for row in &mut map_mut(&mut f, name, "0").matrix {
            row.iter_mut().for_each(|x| *x = "0".into());
        }
    }
    f
}

/// `K₀(j₊)` kills the generator of `NK₀⁺`.
pub fn corrupt_spot2() -> OracleFile {
    let mut f = nk_z2();
    // canonical generators of K₀(A[t]) = ℤ/2 ⊕ ℤ put the nil class first
    for row in &mut map_mut(&mut f, "j_plus", "0").matrix {
        row[0] = "0".into();
    }
    f
}

/// An extra `ℤ/3` summand in `K₀(A[t,t⁻¹])` that no map reaches.
pub fn corrupt_spot3() -> OracleFile {
    let mut f = z_cokernel();
    f.maps.retain(|m| m.name != "rho");
    let laurent = object("A").extend(kwb_core::rings::VarKind::Laurent).key();
    let g = f.groups.iter_mut().find(|g| g.object == laurent && g.degree == "0").unwrap();
    g.invariant_factors.insert(0, "3".into());
    for m in f.maps.iter_mut().filter(|m| m.degree == "0" && ["i0", "j_plus", "j_minus"].contains(&m.name.as_str())) {
        let width = m.matrix.first().map_or(0, Vec::len);
        m.matrix.insert(0, vec!["0".into(); width]);
    }
    f
}

/// Engine data for `F₃` over degrees 0 and 1.
pub fn field_f3() -> OracleFile {
    let f = oracle::export(&EngineSource::default(), &[ExportRequest::plain(ring("F3"))], 0, 1).unwrap();
    with_rho(f, &ring("F3"))
}

/// Engine data for `ℤ/6` in the free-module flavor, where `K₀` only sees ranks.
pub fn free_zmod6() -> OracleFile {
    oracle::export(&EngineSource::new(Flavor::Free), &[ExportRequest::plain(ring("Zmod6"))], 0, 1).unwrap()
}

fn twisted(k_a: [u32; 2], torsion: Option<&str>, phi: &str, i0: &str) -> serde_json::Value {
    // one generator everywhere; K₁ of the three extensions equals K₁(A) for the polynomial
    // sides and the torus group for the Laurent side
    let a_group = |d: &str| match torsion {
        Some(t) => json!({"object": "A", "degree": d, "free_rank": "0", "invariant_factors": [t]}),
        None => json!({"object": "A", "degree": d, "free_rank": k_a[0].to_string(), "invariant_factors": []}),
    };
    let ext = |name: &str, factors: Vec<&str>, rank: &str| json!({"object": name, "degree": "1", "free_rank": rank, "invariant_factors": factors});
    let (poly_rank, poly_tors) = match torsion {
        Some(t) => ("0", vec![t]),
        None => ("1", vec![]),
    };
    let laurent_tors = if torsion.is_some() { vec!["4"] } else { vec!["2"] };
    let m = |name: &str, mat: &str| json!({"object": "A", "twist": "phi", "name": name, "degree": "1", "matrix": [[mat]]});
    json!({
        "schema_version": "1",
        "mode": "oracle",
        "objects": [
            {"name": "A", "base": "A", "chain": []},
            {"name": "A_phi[t]", "base": "A", "chain": ["polynomial"], "twist": "phi"},
            {"name": "A_phi[t^-1]", "base": "A", "chain": ["neg_polynomial"], "twist": "phi"},
            {"name": "A_phi[t,t^-1]", "base": "A", "chain": ["laurent"], "twist": "phi"}
        ],
        "degrees": {"lo": "1", "hi": "1"},
        "groups": [
            a_group("0"), a_group("1"),
            ext("A_phi[t]", poly_tors.clone(), poly_rank),
            ext("A_phi[t^-1]", poly_tors, poly_rank),
            ext("A_phi[t,t^-1]", laurent_tors, "0")
        ],
        "maps": [
            m("i0", i0), m("i_plus", "1"), m("i_minus", "1"), m("j_plus", i0), m("j_minus", i0),
            m("ev0_plus", "1"), m("ev0_minus", "1"),
            {"object": "A", "twist": "phi", "name": "phi_inverse", "degree": "0", "matrix": [[phi]]},
            {"object": "A", "twist": "phi", "name": "phi_inverse", "degree": "1", "matrix": [[phi]]}
        ]
    })
}

/// `K₀(A) = K₁(A) = ℤ` with `Φ⁻¹ = −1`: the torus group in degree 1 is `ℤ/2`.
pub fn twisted_neg() -> OracleFile {
    serde_json::from_value(twisted([1, 1], None, "-1", "1")).unwrap()
}

/// `K₀(A) = ℤ/2`, `K₁(A) = ℤ/4` with `Φ⁻¹ = −1`: the torus group is an extension of `ℤ/2` by
/// `ℤ/2`, and the file declares the non-split one.
pub fn twisted_ambiguous() -> OracleFile {
    let mut v = twisted([0, 0], Some("4"), "-1", "2");
    v["groups"][0]["invariant_factors"] = json!(["2"]);
    v["maps"][7]["matrix"] = json!([["1"]]);
    serde_json::from_value(v).unwrap()
}

fn nil_file(nk: &str) -> OracleFile {
    serde_json::from_value(json!({
        "schema_version": "1",
        "mode": "oracle",
        "objects": [{"name": "A", "base": "A", "chain": []}],
        "degrees": {"lo": "0", "hi": "0"},
        "groups": [{"object": "A", "degree": "0", "free_rank": "1", "invariant_factors": []}],
        "maps": [],
        "nil": [{
            "object": "A", "degree": "0",
            "k_nil": {"free_rank": "1", "invariant_factors": ["2"]},
            "nk_shift": {"free_rank": "0", "invariant_factors": [nk]},
            "section": [["0"], ["1"]]
        }]
    }))
    .unwrap()
}

/// `K₀(Nil) = ℤ ⊕ ℤ/2` against `NK₁ = ℤ/2`.
pub fn nil_z2() -> OracleFile {
    nil_file("2")
}

/// The same Nil data against `NK₁ = ℤ/3`.
pub fn nil_mismatch() -> OracleFile {
    nil_file("3")
}

/// Engine data for `F₃` with `K₀(Nil(F₃, id)) = ℤ` and the zero-endomorphism section.
pub fn nil_f3() -> OracleFile {
    let mut f = oracle::export(&EngineSource::default(), &[ExportRequest::plain(ring("F3"))], 0, 1).unwrap();
    f.nil.push(NilEntry {
        object: "F3".into(),
        twist: None,
        degree: "0".into(),
        k_nil: oracle::group_form(&FgAbGroup::free(1)),
        nk_shift: None,
        section: Some(vec![vec!["1".into()]]),
    });
    f
}

/// `K₀(B) = ℤ`, `K₀(B[t]) = ℤ ⊕ ℤ/2`, and no further change for more variables.
pub fn kh_nk() -> OracleFile {
    let names = ["B", "B[t]", "B[t][s]", "B[t][s][u]", "B[t][s][u][v]"];
    let objects: Vec<_> = names
        .iter()
        .enumerate()
        .map(|(n, name)| json!({"name": name, "base": "B", "chain": vec!["polynomial"; n]}))
        .collect();
    let groups: Vec<_> = names
        .iter()
        .enumerate()
        .map(|(n, name)| json!({"object": name, "degree": "0", "free_rank": "1", "invariant_factors": if n == 0 { vec![] } else { vec!["2"] }}))
        .collect();
    let mut maps = vec![
        json!({"object": "B", "name": "i_plus", "degree": "0", "matrix": [["0"], ["1"]]}),
        json!({"object": "B", "name": "ev0_plus", "degree": "0", "matrix": [["0", "1"]]}),
    ];
    for name in &names[1..names.len() - 1] {
        let id = json!([["1", "0"], ["0", "1"]]);
        maps.push(json!({"object": name, "name": "i_plus", "degree": "0", "matrix": id}));
        maps.push(json!({"object": name, "name": "ev0_plus", "degree": "0", "matrix": id}));
    }
    serde_json::from_value(json!({
        "schema_version": "1",
        "mode": "oracle",
        "objects": objects,
        "degrees": {"lo": "0", "hi": "0"},
        "groups": groups,
        "maps": maps
    }))
    .unwrap()
}

pub fn all() -> Vec<(&'static str, OracleFile)> {
    vec![
        ("field_f3.json", field_f3()),
        ("free_zmod6.json", free_zmod6()),
        ("z_cokernel.json", z_cokernel()),
        ("nk_z2.json", nk_z2()),
        ("corrupt_spot1.json", corrupt_spot1()),
        ("corrupt_spot2.json", corrupt_spot2()),
        ("corrupt_spot3.json", corrupt_spot3()),
        ("twisted_neg.json", twisted_neg()),
        ("twisted_ambiguous.json", twisted_ambiguous()),
        ("nil_z2.json", nil_z2()),
        ("nil_mismatch.json", nil_mismatch()),
        ("nil_f3.json", nil_f3()),
        ("kh_nk.json", kh_nk()),
    ]
}

