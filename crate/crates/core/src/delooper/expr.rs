use std::fmt;

use crate::rings::{HomKind, RingDesc, RingError, RingHom, Structural, VarKind};

/// The ground of an expression: a computable ring or a named oracle object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Ring(RingDesc),
    Object(String),
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Ring(r) => write!(f, "{r}"),
            Base::Object(n) => write!(f, "{n}"),
        }
    }
}

/// One adjoined variable, optionally twisted by a labelled automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Adjunction {
    pub kind: VarKind,
    pub twist: Option<String>,
}

impl Adjunction {
    pub fn plain(kind: VarKind) -> Self {
        Adjunction { kind, twist: None }
    }

    pub fn twisted(kind: VarKind, twist: Option<&str>) -> Self {
        Adjunction {
            kind,
            twist: twist.map(str::to_string),
        }
    }
}

/// Variable names by chain position.
pub fn var_name(position: usize) -> String {
    const NAMES: [&str; 8] = ["t", "s", "u", "v", "w", "x", "y", "z"];
    NAMES
        .get(position)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("t{position}"))
}

/// A base followed by an ordered chain of adjunctions, innermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    pub base: Base,
    pub chain: Vec<Adjunction>,
}

impl Expression {
    pub fn ring(r: &RingDesc) -> Self {
        Expression {
            base: Base::Ring(r.clone()),
            chain: Vec::new(),
        }
    }

    pub fn object(name: &str) -> Self {
        Expression {
            base: Base::Object(name.to_string()),
            chain: Vec::new(),
        }
    }

    /// Splits a ring with adjoined variables into its ground ring and untwisted chain.
    pub fn from_ring(r: &RingDesc) -> Result<Self, RingError> {
        let mut chain = Vec::new();
        let mut cur = r;
        while let Some(e) = cur.extension() {
            if e.twist.as_ref().is_some_and(|t| !t.is_identity()) {
                return Err(RingError::Unsupported(format!("twisted ring {r} as an expression")));
            }
            chain.push(Adjunction::plain(e.kind));
            cur = &e.base;
        }
        chain.reverse();
        Ok(Expression {
            base: Base::Ring(cur.clone()),
            chain,
        })
    }

    pub fn with(&self, adj: Adjunction) -> Self {
        let mut e = self.clone();
        e.chain.push(adj);
        e
    }

    pub fn extend(&self, kind: VarKind) -> Self {
        self.with(Adjunction::plain(kind))
    }

    pub fn extend_twisted(&self, kind: VarKind, twist: Option<&str>) -> Self {
        self.with(Adjunction::twisted(kind, twist))
    }

    pub fn concat(&self, suffix: &[Adjunction]) -> Self {
        let mut e = self.clone();
        e.chain.extend_from_slice(suffix);
        e
    }

    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    pub fn is_twisted(&self) -> bool {
        self.chain.iter().any(|a| a.twist.is_some())
    }

    /// The ring, with variables named by position. `None` for object bases or twisted chains.
    pub fn to_ring(&self) -> Option<RingDesc> {
        self.to_ring_named(&(0..self.chain.len()).map(var_name).collect::<Vec<_>>())
    }

    fn to_ring_named(&self, names: &[String]) -> Option<RingDesc> {
        let Base::Ring(r) = &self.base else { return None };
        let mut ring = r.clone();
        for (a, n) in self.chain.iter().zip(names) {
            if a.twist.is_some() {
                return None;
            }
            ring = ring.extend(n, a.kind);
        }
        Some(ring)
    }

    /// Stable textual key used for lookups.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for (p, a) in self.chain.iter().enumerate() {
            let v = var_name(p);
            if let Some(t) = &a.twist {
                write!(f, "_{t}")?;
            }
            match a.kind {
                VarKind::Polynomial => write!(f, "[{v}]")?,
                VarKind::NegPolynomial => write!(f, "[{v}^-1]")?,
                VarKind::Laurent => write!(f, "[{v},{v}^-1]")?,
            }
        }
        Ok(())
    }
}

/// A structural map applied at one slot of a chain: the source is
/// `prefix + slot(kind.source) + suffix`, the target `prefix + slot(kind.target) + suffix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprMap {
    pub prefix: Expression,
    pub kind: Structural,
    pub twist: Option<String>,
    pub suffix: Vec<Adjunction>,
}

impl ExprMap {
    /// The structural map for a variable adjoined last to `base`.
    pub fn last(base: &Expression, kind: Structural) -> Self {
        ExprMap {
            prefix: base.clone(),
            kind,
            twist: None,
            suffix: Vec::new(),
        }
    }

    pub fn last_twisted(base: &Expression, kind: Structural, twist: Option<&str>) -> Self {
        ExprMap {
            twist: twist.map(str::to_string),
            ..Self::last(base, kind)
        }
    }

    fn side(&self, kind: Option<VarKind>) -> Expression {
        let mut e = self.prefix.clone();
        if let Some(k) = kind {
            e.chain.push(Adjunction {
                kind: k,
                twist: self.twist.clone(),
            });
        }
        e.concat(&self.suffix)
    }

    pub fn source(&self) -> Expression {
        self.side(self.kind.endpoints().0)
    }

    pub fn target(&self) -> Expression {
        self.side(self.kind.endpoints().1)
    }

    /// The same map with one more adjunction appended to both ends.
    pub fn extended(&self, adj: Adjunction) -> Self {
        let mut m = self.clone();
        m.suffix.push(adj);
        m
    }

    /// Evaluable ring homomorphism, for ring bases and untwisted chains.
    pub fn to_ring_hom(&self) -> Option<RingHom> {
        if self.twist.is_some() || self.prefix.is_twisted() || self.suffix.iter().any(|a| a.twist.is_some()) {
            return None;
        }
        // variables are named by their position in the chain that contains the slot
        let p = self.prefix.depth();
        let names: Vec<String> = (0..p + 1 + self.suffix.len()).map(var_name).collect();
        let base_ring = self.prefix.to_ring_named(&names[..p])?;
        let mut h = RingHom::structural(self.kind, &base_ring, &names[p]);
        for (a, var) in self.suffix.iter().zip(&names[p + 1..]) {
            let src = h.source.extend(var, a.kind);
            let tgt = h.target.extend(var, a.kind);
            h = RingHom::new(src, tgt, HomKind::Coefficientwise(Box::new(h))).ok()?;
        }
        Some(h)
    }
}

impl fmt::Display for ExprMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.kind.name(), self.source(), self.target())
    }
}
