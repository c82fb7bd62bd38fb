use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::smith::smith_normal_form;
use super::AbGroupError;

/// Isomorphism invariant of a finitely generated abelian group: `ℤ^r ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k`
/// with every `dⱼ ≥ 2` and `dⱼ | dⱼ₊₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl CanonicalForm {
    pub fn trivial() -> Self {
        CanonicalForm {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().fold(BigInt::one(), |a, d| a * d)
    }

    /// Generator orders of the canonical presentation: torsion first, then `0` for each free generator.
    pub fn orders(&self) -> Vec<BigInt> {
        let mut o = self.invariant_factors.clone();
        o.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        o
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical coordinates for a presented group.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `k × n`: presentation coordinates to canonical coordinates.
    pub to_canonical: IntMatrix,
    /// `n × k`: canonical generators written in the presentation.
    pub from_canonical: IntMatrix,
}

/// A finitely generated abelian group `ℤⁿ / ⟨relations⟩`.
///
/// Relations are stored as rows over the generators. The canonical form is computed on first
/// use and cached; group equality in the abstract sense always goes through it.
#[derive(Clone)]
pub struct FgAbGroup {
    num_generators: usize,
    relations: IntMatrix,
    canonical: OnceLock<Arc<Canonical>>,
}

impl FgAbGroup {
    pub fn new(num_generators: usize, relations: IntMatrix) -> Result<Self, AbGroupError> {
        if relations.cols() != num_generators {
            return Err(AbGroupError::Shape(format!(
                "relation rows have {} entries but the group has {} generators",
                relations.cols(),
                num_generators
            )));
        }
        Ok(FgAbGroup {
            num_generators,
            relations,
            canonical: OnceLock::new(),
        })
    }

    /// Diagonal presentation with one generator per entry; order `0` means a free generator.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let rows: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| {
                let mut r = vec![BigInt::zero(); orders.len()];
                r[i] = d.abs();
                r
            })
            .collect();
        let rel = if rows.is_empty() {
            IntMatrix::zeros(0, orders.len())
        } else {
            IntMatrix::from_rows(&rows)
        };
        FgAbGroup::new(orders.len(), rel).expect("diagonal presentation is well-shaped")
    }

    /// The canonical group with the given invariants (torsion generators first).
    pub fn from_canonical_form(form: &CanonicalForm) -> Self {
        Self::from_orders(&form.orders())
    }

    pub fn from_invariants(free_rank: usize, factors: &[i64]) -> Self {
        let mut o: Vec<BigInt> = factors.iter().map(|&d| BigInt::from(d)).collect();
        o.extend(std::iter::repeat_n(BigInt::zero(), free_rank));
        Self::from_orders(&o)
    }

    pub fn trivial() -> Self {
        Self::from_orders(&[])
    }

    pub fn free(rank: usize) -> Self {
        Self::from_orders(&vec![BigInt::zero(); rank])
    }

    pub fn cyclic(order: i64) -> Self {
        Self::from_orders(&[BigInt::from(order)])
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Relations as columns (`n × r`).
    pub fn relation_columns(&self) -> IntMatrix {
        self.relations.transpose()
    }

    pub fn canonical(&self) -> &Canonical {
        self.canonical.get_or_init(|| Arc::new(self.compute_canonical()))
    }

    fn compute_canonical(&self) -> Canonical {
        let n = self.num_generators;
        let s = smith_normal_form(&self.relation_columns());
        let mut factors = Vec::new();
        let mut idx = Vec::new();
        for i in 0..s.rank {
            let d = s.d[(i, i)].clone();
            if !d.is_one() {
                factors.push(d);
                idx.push(i);
            }
        }
        idx.extend(s.rank..n);
        let mut to_canonical = s.u.select_rows(&idx);
        for (r, d) in factors.iter().enumerate() {
            for j in 0..n {
                let v = to_canonical[(r, j)].mod_floor(d);
                to_canonical[(r, j)] = v;
            }
        }
        Canonical {
            form: CanonicalForm {
                free_rank: n - s.rank,
                invariant_factors: factors,
            },
            to_canonical,
            from_canonical: s.u_inv.select_columns(&idx),
        }
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical().form.clone()
    }

    pub fn is_isomorphic(&self, other: &FgAbGroup) -> bool {
        self.canonical().form == other.canonical().form
    }

    pub fn is_trivial(&self) -> bool {
        self.canonical().form.is_trivial()
    }

    pub fn free_rank(&self) -> usize {
        self.canonical().form.free_rank
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        let f = &self.canonical().form;
        (f.free_rank == 0).then(|| f.torsion_order())
    }

    /// Whether this group is already presented in canonical (diagonal, ordered) form.
    pub fn is_canonically_presented(&self) -> bool {
        let f = &self.canonical().form;
        self.same_presentation(&FgAbGroup::from_canonical_form(f))
    }

    pub fn same_presentation(&self, other: &FgAbGroup) -> bool {
        self.num_generators == other.num_generators && self.relations == other.relations
    }

    /// Canonical coordinates of an element, torsion entries reduced into `[0, d)`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.num_generators, "element length mismatch");
        let c = self.canonical();
        let mut out = c.to_canonical.mul_vec(v);
        for (x, d) in out.iter_mut().zip(&c.form.invariant_factors) {
            *x = x.mod_floor(d);
        }
        out
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn elements_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        let d: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero_element(&d)
    }

    /// The canonically presented group isomorphic to this one.
    pub fn canonical_group(&self) -> FgAbGroup {
        FgAbGroup::from_canonical_form(&self.canonical().form)
    }

    /// Enumerate all elements (in canonical coordinates) of a finite group.
    pub fn enumerate_canonical(&self) -> Option<Vec<Vec<BigInt>>> {
        let f = &self.canonical().form;
        if f.free_rank > 0 {
            return None;
        }
        let mut out = vec![Vec::new()];
        for d in &f.invariant_factors {
            let d: i64 = d.try_into().ok()?;
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for prefix in &out {
                for x in 0..d {
                    let mut p = prefix.clone();
                    p.push(BigInt::from(x));
                    next.push(p);
                }
            }
            out = next;
        }
        Some(out)
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FgAbGroup({} gens, rels {:?}; ≅ {})",
            self.num_generators,
            self.relations,
            self.canonical().form
        )
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical().form)
    }
}
