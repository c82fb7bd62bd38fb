//! Serialized form of K-group tables, schema version 1.
//!
//! Every integer is a decimal string. Groups are given by canonical invariants, torsion
//! generators first, and map matrices are row-major in those canonical generators.

use serde::{Deserialize, Serialize};

use crate::delooper::SourceMode;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub schema_version: String,
    pub mode: SourceMode,
    pub objects: Vec<ObjectDecl>,
    pub degrees: Window,
    pub groups: Vec<GroupEntry>,
    pub maps: Vec<MapEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nil: Vec<NilEntry>,
}

/// A base object followed by adjoined variables; `twist` labels the last one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDecl {
    pub name: String,
    pub base: String,
    #[serde(default)]
    pub chain: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupForm {
    pub free_rank: String,
    pub invariant_factors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub object: String,
    pub degree: String,
    pub free_rank: String,
    pub invariant_factors: Vec<String>,
}

/// A structural map for the variable adjoined after `object` (followed by `suffix`), or
/// `phi_inverse` on `object`, or one component of `rho` out of `object[t,t⁻¹]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub object: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suffix: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    pub name: String,
    pub degree: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NilEntry {
    pub object: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    pub degree: String,
    pub k_nil: GroupForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nk_shift: Option<GroupForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<Vec<String>>>,
}

impl OracleFile {
    pub fn empty(mode: SourceMode, lo: i64, hi: i64) -> Self {
        OracleFile {
            schema_version: SCHEMA_VERSION.into(),
            mode,
            objects: Vec::new(),
            degrees: Window {
                lo: lo.to_string(),
                hi: hi.to_string(),
            },
            groups: Vec::new(),
            maps: Vec::new(),
            nil: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("oracle files serialize");
        s.push('\n');
        s
    }
}
