//! User-supplied K-group tables: loading with full validation, and export from any source.

mod schema;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::abgroup::{CanonicalForm, FgAbGroup, GroupHom, IntMatrix};
use crate::delooper::{Adjunction, Base, DegreeData, DeloopError, ExprMap, Expression, KSource, NilTable, Rho, SourceMode};
use crate::rings::{Structural, VarKind};

pub use schema::{GroupEntry, GroupForm, MapEntry, NilEntry, ObjectDecl, OracleFile, Window, SCHEMA_VERSION};

/// Upper bound on generators per group, so hostile files cannot request huge matrices.
pub const MAX_GENERATORS: usize = 256;
/// Largest accepted `hi − lo`.
pub const MAX_WINDOW: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema violation at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("identity violation: {identity} fails for {object} in degree {degree}")]
    Identity { identity: String, object: String, degree: i64 },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> OracleError {
    OracleError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

pub fn kind_name(k: VarKind) -> &'static str {
    match k {
        VarKind::Polynomial => "polynomial",
        VarKind::NegPolynomial => "neg_polynomial",
        VarKind::Laurent => "laurent",
    }
}

pub fn parse_kind(s: &str) -> Option<VarKind> {
    [VarKind::Polynomial, VarKind::NegPolynomial, VarKind::Laurent]
        .into_iter()
        .find(|k| kind_name(*k) == s)
}

fn parse_int<T: std::str::FromStr>(field: &str, s: &str) -> Result<T, OracleError> {
    s.parse().map_err(|_| schema(field, format!("{s:?} is not a valid integer here")))
}

pub fn parse_group(field: &str, free_rank: &str, factors: &[String]) -> Result<FgAbGroup, OracleError> {
    let rank: usize = parse_int(&format!("{field}.free_rank"), free_rank)?;
    let ds = factors
        .iter()
        .enumerate()
        .map(|(k, d)| parse_int::<BigInt>(&format!("{field}.invariant_factors[{k}]"), d))
        .collect::<Result<Vec<_>, _>>()?;
    if rank + ds.len() > MAX_GENERATORS {
        return Err(schema(field, format!("more than {MAX_GENERATORS} generators")));
    }
    for (k, d) in ds.iter().enumerate() {
        if *d < BigInt::from(2) {
            return Err(schema(format!("{field}.invariant_factors[{k}]"), "invariant factors must be at least 2"));
        }
        if k > 0 && !(d % &ds[k - 1]).is_zero() {
            return Err(schema(format!("{field}.invariant_factors[{k}]"), "invariant factors must divide their successors"));
        }
    }
    Ok(FgAbGroup::from_canonical_form(&CanonicalForm {
        free_rank: rank,
        invariant_factors: ds,
    }))
}

pub fn group_form(g: &FgAbGroup) -> GroupForm {
    let f = g.canonical_form();
    GroupForm {
        free_rank: f.free_rank.to_string(),
        invariant_factors: f.invariant_factors.iter().map(BigInt::to_string).collect(),
    }
}

fn parse_matrix(field: &str, rows: &[Vec<String>], src: &FgAbGroup, tgt: &FgAbGroup) -> Result<IntMatrix, OracleError> {
    let (r, c) = (tgt.num_generators(), src.num_generators());
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(schema(field, format!("expected a {r}x{c} matrix")));
    }
    let mut m = IntMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_int(&format!("{field}[{i}][{j}]"), x)?;
        }
    }
    Ok(m)
}

fn matrix_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect()
}

type MapKey = (String, i64);

/// What a map entry denotes once resolved against the declared objects.
#[derive(Clone, Debug)]
enum MapRole {
    Structural(ExprMap),
    PhiInverse { object: String, twist: String },
    Rho { object: String, component: usize },
}

/// K-data read from a file. Serves exactly what the file declares.
#[derive(Clone, Debug)]
pub struct OracleSource {
    origin: SourceMode,
    lo: i64,
    hi: i64,
    objects: Vec<(String, Expression)>,
    groups: HashMap<MapKey, FgAbGroup>,
    maps: HashMap<MapKey, GroupHom>,
    phi: HashMap<(String, String, i64), GroupHom>,
    rho: HashMap<MapKey, [Option<GroupHom>; 3]>,
    nil: HashMap<(String, Option<String>, i64), NilTable>,
}

impl OracleSource {
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Declared objects by name.
    pub fn objects(&self) -> &[(String, Expression)] {
        &self.objects
    }

    pub fn object(&self, name: &str) -> Option<&Expression> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Objects that are not an extension of another declared object.
    pub fn base_objects(&self) -> Vec<&Expression> {
        let keys: HashSet<String> = self.objects.iter().map(|(_, e)| e.key()).collect();
        self.objects
            .iter()
            .map(|(_, e)| e)
            .filter(|e| {
                let mut p = (*e).clone();
                p.chain.pop().is_none() || !keys.contains(&p.key())
            })
            .collect()
    }

    /// Twist labels used on extensions of `base`.
    pub fn twists_over(&self, base: &Expression) -> Vec<String> {
        let mut out: Vec<String> = self
            .objects
            .iter()
            .filter_map(|(_, e)| {
                let last = e.chain.last()?;
                let mut p = e.clone();
                p.chain.pop();
                (p == *base).then(|| last.twist.clone()).flatten()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Loads and validates a file.
pub fn load(path: &Path) -> Result<OracleSource, OracleError> {
    from_json(&read(path)?, true)
}

/// Loads a file, checking only what is needed to build the maps.
pub fn load_unvalidated(path: &Path) -> Result<OracleSource, OracleError> {
    from_json(&read(path)?, false)
}

fn read(path: &Path) -> Result<String, OracleError> {
    std::fs::read_to_string(path).map_err(|e| OracleError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_file(text: &str) -> Result<OracleFile, OracleError> {
    serde_json::from_str(text).map_err(|e| OracleError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn from_json(text: &str, validate: bool) -> Result<OracleSource, OracleError> {
    from_file(&parse_file(text)?, validate)
}

pub fn from_file(f: &OracleFile, validate: bool) -> Result<OracleSource, OracleError> {
    if f.schema_version != SCHEMA_VERSION {
        return Err(schema("schema_version", format!("unsupported version {:?}", f.schema_version)));
    }
    let lo: i64 = parse_int("degrees.lo", &f.degrees.lo)?;
    let hi: i64 = parse_int("degrees.hi", &f.degrees.hi)?;
    if lo > hi {
        return Err(schema("degrees", "lo exceeds hi"));
    }
    if hi.checked_sub(lo).is_none_or(|w| w > MAX_WINDOW) {
        return Err(schema("degrees", format!("window wider than {MAX_WINDOW}")));
    }
    let in_window = |field: &str, d: &str| -> Result<i64, OracleError> {
        let d: i64 = parse_int(field, d)?;
        if d < lo.saturating_sub(1) || d > hi {
            return Err(schema(field, format!("degree {d} outside [{}, {hi}]", lo.saturating_sub(1))));
        }
        Ok(d)
    };

    let mut objects: Vec<(String, Expression)> = Vec::new();
    let mut by_name: HashMap<String, Expression> = HashMap::new();
    let mut keys = HashSet::new();
    for (k, o) in f.objects.iter().enumerate() {
        let field = format!("objects[{k}]");
        if o.name.is_empty() || o.base.is_empty() {
            return Err(schema(field, "name and base must be non-empty"));
        }
        let mut chain = o
            .chain
            .iter()
            .enumerate()
            .map(|(j, s)| parse_kind(s).map(Adjunction::plain).ok_or_else(|| schema(format!("{field}.chain[{j}]"), format!("unknown kind {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(t) = &o.twist {
            let last = chain.last_mut().ok_or_else(|| schema(format!("{field}.twist"), "a twist needs an adjoined variable"))?;
            if t.is_empty() || t == "id" {
                return Err(schema(format!("{field}.twist"), "twist labels must be non-empty and not \"id\""));
            }
            last.twist = Some(t.clone());
        }
        let e = Expression {
            base: Base::Object(o.base.clone()),
            chain,
        };
        if by_name.contains_key(&o.name) || !keys.insert(e.key()) {
            return Err(schema(field, format!("object {} is declared twice", o.name)));
        }
        by_name.insert(o.name.clone(), e.clone());
        objects.push((o.name.clone(), e));
    }
    let object = |field: String, name: &str| by_name.get(name).cloned().ok_or_else(|| schema(field, format!("unknown object {name:?}")));

    let mut groups = HashMap::new();
    for (k, g) in f.groups.iter().enumerate() {
        let field = format!("groups[{k}]");
        let e = object(format!("{field}.object"), &g.object)?;
        let d = in_window(&format!("{field}.degree"), &g.degree)?;
        let grp = parse_group(&field, &g.free_rank, &g.invariant_factors)?;
        if groups.insert((e.key(), d), grp).is_some() {
            return Err(schema(field, "duplicate group entry"));
        }
    }
    let group_of = |field: &str, e: &Expression, d: i64| {
        groups
            .get(&(e.key(), d))
            .cloned()
            .ok_or_else(|| schema(field, format!("K_{d}({e}) is not declared")))
    };

    let mut src = OracleSource {
        origin: f.mode,
        lo,
        hi,
        objects,
        groups: HashMap::new(),
        maps: HashMap::new(),
        phi: HashMap::new(),
        rho: HashMap::new(),
        nil: HashMap::new(),
    };
    let mut structural: Vec<(ExprMap, i64)> = Vec::new();
    let mut seen = HashSet::new();
    for (k, m) in f.maps.iter().enumerate() {
        let field = format!("maps[{k}]");
        let base = object(format!("{field}.object"), &m.object)?;
        let d = in_window(&format!("{field}.degree"), &m.degree)?;
        let suffix = m
            .suffix
            .iter()
            .enumerate()
            .map(|(j, s)| parse_kind(s).map(Adjunction::plain).ok_or_else(|| schema(format!("{field}.suffix[{j}]"), format!("unknown kind {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let role = match m.name.as_str() {
            "phi_inverse" => {
                let twist = m.twist.clone().ok_or_else(|| schema(format!("{field}.twist"), "phi_inverse needs a twist label"))?;
                MapRole::PhiInverse { object: base.key(), twist }
            }
            "rho" => {
                let component = match m.component.as_deref() {
                    Some("base") => 0,
                    Some("plus") => 1,
                    Some("minus") => 2,
                    _ => return Err(schema(format!("{field}.component"), "rho needs component base, plus or minus")),
                };
                MapRole::Rho { object: base.key(), component }
            }
            name => {
                let kind = Structural::from_name(name).ok_or_else(|| schema(format!("{field}.name"), format!("unknown map {name:?}")))?;
                MapRole::Structural(ExprMap {
                    prefix: base.clone(),
                    kind,
                    twist: m.twist.clone(),
                    suffix,
                })
            }
        };
        if !matches!(role, MapRole::Structural(_)) && !m.suffix.is_empty() {
            return Err(schema(format!("{field}.suffix"), "only structural maps take a suffix"));
        }
        if matches!(role, MapRole::Structural(_)) && m.component.is_some() {
            return Err(schema(format!("{field}.component"), "only rho has components"));
        }
        let (s_expr, t_expr) = match &role {
            MapRole::Structural(em) => (em.source(), em.target()),
            MapRole::PhiInverse { .. } => (base.clone(), base.clone()),
            MapRole::Rho { component, .. } => {
                let t = [base.clone(), base.extend(VarKind::Polynomial), base.extend(VarKind::NegPolynomial)];
                (base.extend(VarKind::Laurent), t[*component].clone())
            }
        };
        let s_grp = group_of(&format!("{field}.object"), &s_expr, d)?;
        let t_grp = group_of(&format!("{field}.object"), &t_expr, d)?;
        let mat = parse_matrix(&format!("{field}.matrix"), &m.matrix, &s_grp, &t_grp)?;
        let hom = if validate {
            GroupHom::new(s_grp, t_grp, mat).map_err(|_| OracleError::Identity {
                identity: format!("well-definedness of {}", m.name),
                object: m.object.clone(),
                degree: d,
            })?
        } else {
            GroupHom::new_unchecked(s_grp, t_grp, mat).map_err(|e| schema(format!("{field}.matrix"), e.to_string()))?
        };
        let dup = match role {
            MapRole::Structural(em) => {
                let key = (em.to_string(), d);
                structural.push((em, d));
                !seen.insert(key.clone()) || src.maps.insert(key, hom).is_some()
            }
            MapRole::PhiInverse { object, twist } => src.phi.insert((object, twist, d), hom).is_some(),
            MapRole::Rho { object, component } => src.rho.entry((object, d)).or_default()[component].replace(hom).is_some(),
        };
        if dup {
            return Err(schema(field, "duplicate map entry"));
        }
    }

    for (k, n) in f.nil.iter().enumerate() {
        let field = format!("nil[{k}]");
        let e = object(format!("{field}.object"), &n.object)?;
        let d = in_window(&format!("{field}.degree"), &n.degree)?;
        let k_nil = parse_group(&format!("{field}.k_nil"), &n.k_nil.free_rank, &n.k_nil.invariant_factors)?;
        let nk_shift = n
            .nk_shift
            .as_ref()
            .map(|g| parse_group(&format!("{field}.nk_shift"), &g.free_rank, &g.invariant_factors))
            .transpose()?;
        let section = match &n.section {
            Some(rows) => {
                let k_a = group_of(&format!("{field}.object"), &e, d)?;
                let m = parse_matrix(&format!("{field}.section"), rows, &k_a, &k_nil)?;
                Some(if validate {
                    GroupHom::new(k_a, k_nil.clone(), m).map_err(|_| OracleError::Identity {
                        identity: "well-definedness of the Nil section".into(),
                        object: n.object.clone(),
                        degree: d,
                    })?
                } else {
                    GroupHom::new_unchecked(k_a, k_nil.clone(), m).map_err(|e| schema(format!("{field}.section"), e.to_string()))?
                })
            }
            None => None,
        };
        let twist = n.twist.clone().filter(|t| t != "id");
        if src.nil.insert((e.key(), twist, d), NilTable { k_nil, section, nk_shift }).is_some() {
            return Err(schema(field, "duplicate nil entry"));
        }
    }
    src.groups = groups;
    if validate {
        check_identities(&src, &structural)?;
    }
    Ok(src)
}

fn check_identities(src: &OracleSource, structural: &[(ExprMap, i64)]) -> Result<(), OracleError> {
    let get = |em: &ExprMap, kind: Structural, d: i64| {
        let m = ExprMap { kind, ..em.clone() };
        src.maps.get(&(m.to_string(), d))
    };
    let fail = |identity: &str, em: &ExprMap, d: i64| OracleError::Identity {
        identity: identity.to_string(),
        object: em.prefix.to_string(),
        degree: d,
    };
    for (em, d) in structural {
        let d = *d;
        let m = |k| get(em, k, d);
        match em.kind {
            Structural::IPlus | Structural::IMinus => {
                let (ev, j, name, jname) = if em.kind == Structural::IPlus {
                    (Structural::Ev0Plus, Structural::JPlus, "ev0_plus ∘ i_plus = id", "j_plus ∘ i_plus = i0")
                } else {
                    (Structural::Ev0Minus, Structural::JMinus, "ev0_minus ∘ i_minus = id", "j_minus ∘ i_minus = i0")
                };
                let i = m(em.kind).expect("map was just inserted");
                if let Some(ev) = m(ev) {
                    if !ev.compose(i).is_ok_and(|c| c.equals(&GroupHom::identity(i.domain()))) {
                        return Err(fail(name, em, d));
                    }
                }
                if let (Some(j), Some(i0)) = (m(j), m(Structural::I0)) {
                    if !j.compose(i).is_ok_and(|c| c.equals(i0)) {
                        return Err(fail(jname, em, d));
                    }
                }
            }
            _ => {}
        }
    }
    for ((object, twist, d), phi) in &src.phi {
        if !phi.is_isomorphism() {
            return Err(OracleError::Identity {
                identity: format!("phi_inverse for {twist} is an automorphism"),
                object: object.clone(),
                degree: *d,
            });
        }
    }
    let mut rho_keys: Vec<&MapKey> = src.rho.keys().collect();
    rho_keys.sort();
    for key in rho_keys {
        let (object, d) = key;
        let parts = &src.rho[key];
        let missing = || schema(format!("maps (rho of {object} in degree {d})"), "rho needs all three components and the seven structural maps");
        let [Some(b), Some(p), Some(m)] = parts.clone() else { return Err(missing()) };
        let base = src
            .objects
            .iter()
            .map(|(_, e)| e)
            .find(|e| e.key() == *object)
            .cloned()
            .ok_or_else(missing)?;
        let data = degree_data(src, &base, *d).ok_or_else(missing)?;
        let data = DegreeData {
            rho: Some(Rho { base: b, plus: p, minus: m }),
            ..data
        };
        if data.validate(*d).is_err() {
            return Err(OracleError::Identity {
                identity: "rho ∘ BHS_r = id".into(),
                object: object.clone(),
                degree: *d,
            });
        }
    }
    Ok(())
}

fn degree_data(src: &OracleSource, base: &Expression, d: i64) -> Option<DegreeData> {
    let m = |k| src.maps.get(&(ExprMap::last(base, k).to_string(), d)).cloned();
    let g = |e: &Expression| src.groups.get(&(e.key(), d)).cloned();
    Some(DegreeData {
        k_a: g(base)?,
        k_plus: g(&base.extend(VarKind::Polynomial))?,
        k_minus: g(&base.extend(VarKind::NegPolynomial))?,
        k_laurent: g(&base.extend(VarKind::Laurent))?,
        i0: m(Structural::I0)?,
        i_plus: m(Structural::IPlus)?,
        i_minus: m(Structural::IMinus)?,
        j_plus: m(Structural::JPlus)?,
        j_minus: m(Structural::JMinus)?,
        ev0_plus: m(Structural::Ev0Plus)?,
        ev0_minus: m(Structural::Ev0Minus)?,
        rho: None,
        phi_inverse: None,
    })
}

impl KSource for OracleSource {
    fn mode(&self) -> SourceMode {
        SourceMode::Oracle
    }

    fn origin(&self) -> SourceMode {
        self.origin
    }

    fn group(&self, e: &Expression, degree: i64) -> Result<FgAbGroup, DeloopError> {
        self.groups
            .get(&(e.key(), degree))
            .cloned()
            .ok_or_else(|| DeloopError::Gap(format!("the oracle has no K_{degree}({e})")))
    }

    fn map(&self, m: &ExprMap, degree: i64) -> Result<GroupHom, DeloopError> {
        self.maps
            .get(&(m.to_string(), degree))
            .cloned()
            .ok_or_else(|| DeloopError::Gap(format!("the oracle has no K_{degree}({m})")))
    }

    fn phi_inverse(&self, e: &Expression, twist: &str, degree: i64) -> Result<GroupHom, DeloopError> {
        self.phi
            .get(&(e.key(), twist.to_string(), degree))
            .cloned()
            .ok_or_else(|| DeloopError::Gap(format!("the oracle has no K_{degree}(Φ⁻¹) for {twist} on {e}")))
    }

    fn rho(&self, e: &Expression, degree: i64) -> Result<Option<Rho>, DeloopError> {
        Ok(match self.rho.get(&(e.key(), degree)) {
            Some([Some(b), Some(p), Some(m)]) => Some(Rho {
                base: b.clone(),
                plus: p.clone(),
                minus: m.clone(),
            }),
            _ => None,
        })
    }

    fn nil(&self, e: &Expression, twist: Option<&str>, degree: i64) -> Result<NilTable, DeloopError> {
        let t = twist.filter(|t| *t != "id").map(str::to_string);
        self.nil
            .get(&(e.key(), t, degree))
            .cloned()
            .ok_or_else(|| DeloopError::Gap(format!("the oracle has no Nil data for {e} in degree {degree}")))
    }
}

/// One base object to export, with an optional twist label for its Laurent-type extensions.
#[derive(Clone, Debug)]
pub struct ExportRequest {
    pub base: Expression,
    pub twist: Option<String>,
}

impl ExportRequest {
    pub fn plain(base: Expression) -> Self {
        ExportRequest { base, twist: None }
    }
}

fn decl(e: &Expression) -> ObjectDecl {
    ObjectDecl {
        name: e.key(),
        base: e.base.to_string(),
        chain: e.chain.iter().map(|a| kind_name(a.kind).to_string()).collect(),
        twist: e.chain.last().and_then(|a| a.twist.clone()),
    }
}

fn map_entry(object: &Expression, name: &str, twist: Option<&str>, component: Option<&str>, d: i64, f: &GroupHom) -> MapEntry {
    MapEntry {
        object: object.key(),
        suffix: Vec::new(),
        twist: twist.map(str::to_string),
        name: name.to_string(),
        degree: d.to_string(),
        component: component.map(str::to_string),
        matrix: matrix_rows(&f.canonical_matrix()),
    }
}

/// Writes what `source` serves for the requested objects over `[lo, hi]`. `K_{lo−1}` of
/// each base is included when the source has it and it is a genuine (not connective) value.
pub fn export(source: &dyn KSource, requests: &[ExportRequest], lo: i64, hi: i64) -> Result<OracleFile, DeloopError> {
    let mut file = OracleFile::empty(source.origin(), lo, hi);
    let mut objects: BTreeMap<String, Expression> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut add = |e: Expression, order: &mut Vec<String>| {
        if objects.insert(e.key(), e.clone()).is_none() {
            order.push(e.key());
        }
    };
    for r in requests {
        add(r.base.clone(), &mut order);
        for k in [VarKind::Polynomial, VarKind::NegPolynomial, VarKind::Laurent] {
            add(r.base.extend_twisted(k, r.twist.as_deref()), &mut order);
        }
    }
    let below = lo - 1;
    let with_below = !source.connective() || below >= 0;
    let bases: HashSet<String> = requests.iter().map(|r| r.base.key()).collect();
    for key in &order {
        let e = &objects[key];
        file.objects.push(decl(e));
        let first = if with_below && bases.contains(key) { below } else { lo };
        for d in first..=hi {
            match source.group(e, d) {
                Ok(g) => {
                    let f = group_form(&g);
                    file.groups.push(GroupEntry {
                        object: e.key(),
                        degree: d.to_string(),
                        free_rank: f.free_rank,
                        invariant_factors: f.invariant_factors,
                    });
                }
                Err(DeloopError::Gap(_)) if d == below => {}
                Err(err) => return Err(err),
            }
        }
    }
    for r in requests {
        let tw = r.twist.as_deref();
        for d in lo..=hi {
            for k in Structural::ALL {
                let f = source.map(&ExprMap::last_twisted(&r.base, k, tw), d)?;
                file.maps.push(map_entry(&r.base, k.name(), tw, None, d, &f));
            }
            if tw.is_none() {
                if let Some(rho) = source.rho(&r.base, d)? {
                    for (c, f) in [("base", &rho.base), ("plus", &rho.plus), ("minus", &rho.minus)] {
                        file.maps.push(map_entry(&r.base, "rho", None, Some(c), d, f));
                    }
                }
            }
        }
        if let Some(t) = tw {
            let first = if with_below { below } else { lo };
            for d in first..=hi {
                match source.phi_inverse(&r.base, t, d) {
                    Ok(f) => file.maps.push(map_entry(&r.base, "phi_inverse", Some(t), None, d, &f)),
                    Err(DeloopError::Gap(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        for d in lo..=hi {
            match source.nil(&r.base, tw, d) {
                Ok(n) => file.nil.push(NilEntry {
                    object: r.base.key(),
                    twist: tw.map(str::to_string),
                    degree: d.to_string(),
                    k_nil: group_form(&n.k_nil),
                    nk_shift: n.nk_shift.as_ref().map(group_form),
                    section: n.section.as_ref().map(|s| matrix_rows(&s.canonical_matrix())),
                }),
                Err(DeloopError::Gap(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(file)
}

/// Writes `file` to `path` as pretty JSON.
pub fn write(file: &OracleFile, path: &Path) -> Result<(), OracleError> {
    std::fs::write(path, file.to_json()).map_err(|e| OracleError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Entries of a map matrix in canonical coordinates, for comparisons.
pub fn canonical_entries(f: &GroupHom) -> Vec<Vec<BigInt>> {
    f.canonical_matrix().to_rows()
}
