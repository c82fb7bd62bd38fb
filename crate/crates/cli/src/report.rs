use std::collections::BTreeMap;
use std::fmt::Write;

use kwb_core::abgroup::{CanonicalForm, FgAbGroup, GroupHom};
use kwb_core::oracle::canonical_entries;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// A check could not run because some K-data was unavailable.
    Gap,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Gap | Verdict::Fail => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Gap => "gap",
            Verdict::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    /// `--ring` value or oracle path as given.
    pub selector: String,
    pub object: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    pub mode: String,
    pub flavor: String,
}

/// One check at one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    pub groups: BTreeMap<String, String>,
    /// Integer matrices in canonical generators, entries as decimal strings.
    pub witnesses: BTreeMap<String, Vec<Vec<String>>>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl Section {
    pub fn new(check: &str, degree: Option<i64>) -> Self {
        Section {
            check: check.into(),
            degree,
            groups: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn group(&mut self, name: impl Into<String>, g: &FgAbGroup) {
        self.form(name, &g.canonical_form());
    }

    pub fn form(&mut self, name: impl Into<String>, f: &CanonicalForm) {
        self.groups.insert(name.into(), f.to_string());
    }

    pub fn witness(&mut self, name: impl Into<String>, f: &GroupHom) {
        let rows = canonical_entries(f).into_iter().map(|r| r.into_iter().map(|x| x.to_string()).collect()).collect();
        self.witnesses.insert(name.into(), rows);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn gap(mut self, reason: impl Into<String>) -> Self {
        self.notes.push(reason.into());
        self.verdict = self.verdict.max(Verdict::Gap);
        self
    }

    pub fn fail(&mut self, reason: impl Into<String>) {
        self.notes.push(reason.into());
        self.verdict = Verdict::Fail;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub instances: Vec<Instance>,
    pub sections: Vec<Section>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: &str, instances: Vec<Instance>, sections: Vec<Section>) -> Self {
        let verdict = sections.iter().map(|s| s.verdict).max().unwrap_or(Verdict::Pass);
        Report {
            command: command.into(),
            instances,
            sections,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.instances {
            let twist = i.twist.as_deref().map(|t| format!(" twisted by {t}")).unwrap_or_default();
            let _ = writeln!(out, "{} {}{twist} [{}; mode {}; {}]", self.command, i.object, i.selector, i.mode, i.flavor);
        }
        for s in &self.sections {
            let degree = s.degree.map(|d| format!(" i={d}")).unwrap_or_default();
            let _ = writeln!(out, "{}{degree}: {}", s.check, s.verdict.name());
            for (k, v) in &s.groups {
                let _ = writeln!(out, "  {k} = {v}");
            }
            for (k, m) in &s.witnesses {
                let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.join(" "))).collect();
                let _ = writeln!(out, "  {k}: {}", if rows.is_empty() { "[]".into() } else { rows.join(" ") });
            }
            for n in &s.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict.name());
        out
    }
}
