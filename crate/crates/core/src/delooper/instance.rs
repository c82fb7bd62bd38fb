use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abgroup::{direct_sum, FgAbGroup, GroupHom, IntMatrix};
use crate::rings::{Structural, VarKind};

use super::expr::{ExprMap, Expression};
use super::source::{KSource, Rho, SourceMode};
use super::DeloopError;

/// K-data of one base object and its three Laurent-type extensions in one degree.
#[derive(Clone, Debug)]
pub struct DegreeData {
    pub k_a: FgAbGroup,
    pub k_plus: FgAbGroup,
    pub k_minus: FgAbGroup,
    pub k_laurent: FgAbGroup,
    pub i0: GroupHom,
    pub i_plus: GroupHom,
    pub i_minus: GroupHom,
    pub j_plus: GroupHom,
    pub j_minus: GroupHom,
    pub ev0_plus: GroupHom,
    pub ev0_minus: GroupHom,
    pub rho: Option<Rho>,
    pub phi_inverse: Option<GroupHom>,
}

impl DegreeData {
    pub fn map(&self, kind: Structural) -> &GroupHom {
        match kind {
            Structural::I0 => &self.i0,
            Structural::IPlus => &self.i_plus,
            Structural::IMinus => &self.i_minus,
            Structural::JPlus => &self.j_plus,
            Structural::JMinus => &self.j_minus,
            Structural::Ev0Plus => &self.ev0_plus,
            Structural::Ev0Minus => &self.ev0_minus,
        }
    }

    fn map_mut(&mut self, kind: Structural) -> &mut GroupHom {
        match kind {
            Structural::I0 => &mut self.i0,
            Structural::IPlus => &mut self.i_plus,
            Structural::IMinus => &mut self.i_minus,
            Structural::JPlus => &mut self.j_plus,
            Structural::JMinus => &mut self.j_minus,
            Structural::Ev0Plus => &mut self.ev0_plus,
            Structural::Ev0Minus => &mut self.ev0_minus,
        }
    }

    /// The trivial instance in one degree.
    pub fn zero() -> Self {
        let z = FgAbGroup::trivial();
        let m = GroupHom::identity(&z);
        DegreeData {
            k_a: z.clone(),
            k_plus: z.clone(),
            k_minus: z.clone(),
            k_laurent: z,
            i0: m.clone(),
            i_plus: m.clone(),
            i_minus: m.clone(),
            j_plus: m.clone(),
            j_minus: m.clone(),
            ev0_plus: m.clone(),
            ev0_minus: m,
            rho: None,
            phi_inverse: None,
        }
    }

    /// Checks the composite identities and the declared retraction.
    pub fn validate(&self, degree: i64) -> Result<(), DeloopError> {
        let fail = |what: &str| Err(DeloopError::Inconsistent(format!("degree {degree}: {what}")));
        let id_a = GroupHom::identity(&self.k_a);
        for (ev, i, name) in [(&self.ev0_plus, &self.i_plus, "ev0_plus ∘ i_plus"), (&self.ev0_minus, &self.i_minus, "ev0_minus ∘ i_minus")] {
            if !ev.compose(i).is_ok_and(|c| c.equals(&id_a)) {
                return fail(&format!("{name} ≠ id"));
            }
        }
        if !self.j_plus.compose(&self.i_plus).is_ok_and(|c| c.equals(&self.i0)) {
            return fail("j_plus ∘ i_plus ≠ i0");
        }
        if !self.j_minus.compose(&self.i_minus).is_ok_and(|c| c.equals(&self.i0)) {
            return fail("j_minus ∘ i_minus ≠ i0");
        }
        if let Some(rho) = &self.rho {
            let (bhs_r, _) = super::checks::bhs_r_map(self)?;
            let r = super::checks::rho_map(self, rho)?;
            if !r.compose(&bhs_r).is_ok_and(|c| c.equals(&GroupHom::identity(bhs_r.domain()))) {
                return fail("rho ∘ BHS_r ≠ id");
            }
        }
        if let Some(phi) = &self.phi_inverse {
            if !phi.is_isomorphism() {
                return fail("phi_inverse is not an automorphism");
            }
        }
        Ok(())
    }
}

/// K-groups of a base object `A`, of `A[t]`, `A[t⁻¹]`, `A[t,t⁻¹]` (possibly twisted) over a
/// degree window, with the structure maps and the declared groups `K_j(A)` for
/// `j ∈ [lo − 1, hi]` where the source has them.
#[derive(Clone, Debug)]
pub struct StructuredKInstance {
    pub base: Expression,
    pub twist: Option<String>,
    pub lo: i64,
    pub hi: i64,
    pub mode: SourceMode,
    pub connective: bool,
    pub degrees: BTreeMap<i64, DegreeData>,
    pub declared: BTreeMap<i64, FgAbGroup>,
    pub notes: Vec<String>,
}

impl StructuredKInstance {
    /// Reads the instance off a source, without validating it.
    pub fn new_unchecked(source: &dyn KSource, base: &Expression, twist: Option<&str>, lo: i64, hi: i64) -> Result<Self, DeloopError> {
        let laurent = |kind| base.extend_twisted(kind, twist);
        let map = |kind, d| source.map(&ExprMap::last_twisted(base, kind, twist), d);
        let mut degrees = BTreeMap::new();
        for d in lo..=hi {
            let rho = if twist.is_none() { source.rho(base, d)? } else { None };
            let phi_inverse = match twist {
                Some(t) => match source.phi_inverse(base, t, d) {
                    Ok(p) => Some(p),
                    Err(DeloopError::Gap(_)) => None,
                    Err(e) => return Err(e),
                },
                None => None,
            };
            degrees.insert(
                d,
                DegreeData {
                    k_a: source.group(base, d)?,
                    k_plus: source.group(&laurent(VarKind::Polynomial), d)?,
                    k_minus: source.group(&laurent(VarKind::NegPolynomial), d)?,
                    k_laurent: source.group(&laurent(VarKind::Laurent), d)?,
                    i0: map(Structural::I0, d)?,
                    i_plus: map(Structural::IPlus, d)?,
                    i_minus: map(Structural::IMinus, d)?,
                    j_plus: map(Structural::JPlus, d)?,
                    j_minus: map(Structural::JMinus, d)?,
                    ev0_plus: map(Structural::Ev0Plus, d)?,
                    ev0_minus: map(Structural::Ev0Minus, d)?,
                    rho,
                    phi_inverse,
                },
            );
        }
        let mut declared = BTreeMap::new();
        for d in lo - 1..=hi {
            match source.group(base, d) {
                Ok(g) => {
                    declared.insert(d, g);
                }
                Err(DeloopError::Gap(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(StructuredKInstance {
            base: base.clone(),
            twist: twist.map(str::to_string),
            lo,
            hi,
            mode: source.mode(),
            connective: source.connective(),
            degrees,
            declared,
            notes: source.notes(),
        })
    }

    /// Reads and validates the instance.
    pub fn from_source(source: &dyn KSource, base: &Expression, twist: Option<&str>, lo: i64, hi: i64) -> Result<Self, DeloopError> {
        let inst = Self::new_unchecked(source, base, twist, lo, hi)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), DeloopError> {
        self.degrees.iter().try_for_each(|(d, data)| data.validate(*d))
    }

    pub fn at(&self, degree: i64) -> Result<&DegreeData, DeloopError> {
        self.degrees
            .get(&degree)
            .ok_or_else(|| DeloopError::Gap(format!("degree {degree} is outside the window [{}, {}]", self.lo, self.hi)))
    }

    /// `K_{i−1}(A)` as the source declares it, if it is meaningful there: a connective source
    /// has no negative K-groups to declare.
    pub fn declared_below(&self, i: i64) -> Option<&FgAbGroup> {
        if self.connective && i - 1 < 0 {
            return None;
        }
        self.declared.get(&(i - 1))
    }

    /// The same instance with every group re-presented by a random unimodular change of
    /// generators and every map conjugated accordingly.
    pub fn conjugated(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for data in out.degrees.values_mut() {
            let mut basis = |g: &FgAbGroup| random_change(g, &mut rng);
            let (a, p, m, l) = (basis(&data.k_a), basis(&data.k_plus), basis(&data.k_minus), basis(&data.k_laurent));
            for (k, (src, tgt)) in [
                (Structural::I0, (&a, &l)),
                (Structural::IPlus, (&a, &p)),
                (Structural::IMinus, (&a, &m)),
                (Structural::JPlus, (&p, &l)),
                (Structural::JMinus, (&m, &l)),
                (Structural::Ev0Plus, (&p, &a)),
                (Structural::Ev0Minus, (&m, &a)),
            ] {
                let f = data.map_mut(k);
                *f = conjugate(f, src, tgt);
            }
            if let Some(rho) = &mut data.rho {
                rho.base = conjugate(&rho.base, &l, &a);
                rho.plus = conjugate(&rho.plus, &l, &p);
                rho.minus = conjugate(&rho.minus, &l, &m);
            }
            if let Some(phi) = &mut data.phi_inverse {
                *phi = conjugate(phi, &a, &a);
            }
            data.k_a = a.group;
            data.k_plus = p.group;
            data.k_minus = m.group;
            data.k_laurent = l.group;
        }
        out
    }
}

struct Change {
    group: FgAbGroup,
    u: IntMatrix,
    u_inv: IntMatrix,
}

fn random_change(g: &FgAbGroup, rng: &mut ChaCha8Rng) -> Change {
    let n = g.num_generators();
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    if n >= 2 {
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            let c = BigInt::from(rng.gen_range(-3i64..=3));
            u.add_row_multiple(a, b, &c);
            u_inv.add_column_multiple(b, a, &-c);
        }
    }
    // new coordinates x' = U x, so relation rows r become U r
    let rel = g.relations().mul(&u.transpose());
    Change {
        group: FgAbGroup::new(n, rel).expect("same shape"),
        u,
        u_inv,
    }
}

fn conjugate(f: &GroupHom, src: &Change, tgt: &Change) -> GroupHom {
    let m = tgt.u.mul(f.matrix()).mul(&src.u_inv);
    GroupHom::new(src.group.clone(), tgt.group.clone(), m).expect("conjugated map is well-defined")
}

/// The sum `K_i(A) ⊕ NK⁺ ⊕ NK⁻` as a direct sum, for callers that need the layout.
pub(crate) fn restricted_sum(a: &FgAbGroup, nkp: &FgAbGroup, nkm: &FgAbGroup) -> crate::abgroup::DirectSum {
    direct_sum(&[a.clone(), nkp.clone(), nkm.clone()])
}
