use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::FgAbGroup;
use super::matrix::IntMatrix;
use super::solve::{column_lattice_basis, hermite_rows, nullspace, solve};
use super::AbGroupError;

/// A homomorphism between presented groups, given by its action on generators
/// (`codomain generators × domain generators`).
#[derive(Clone)]
pub struct GroupHom {
    domain: FgAbGroup,
    codomain: FgAbGroup,
    matrix: IntMatrix,
}

/// Kernel of a homomorphism: a canonically presented group with its inclusion.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub group: FgAbGroup,
    pub inclusion: GroupHom,
}

/// Cokernel of a homomorphism: a canonically presented group with the quotient map.
///
/// `lift` sends each canonical generator of the quotient to a chosen preimage in the
/// codomain presentation. It is a set-theoretic choice, not in general a homomorphism.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub group: FgAbGroup,
    pub projection: GroupHom,
    pub lift: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub image_in_kernel: bool,
    pub kernel_in_image: bool,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.image_in_kernel && self.kernel_in_image
    }
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: FgAbGroup,
    pub summands: Vec<FgAbGroup>,
    pub injections: Vec<GroupHom>,
    pub projections: Vec<GroupHom>,
}

/// Outcome of a sequential colimit computation.
#[derive(Clone, Debug)]
pub enum ColimResult {
    /// Every map from `index` on (within the bound) is an isomorphism.
    Stable { group: FgAbGroup, index: usize },
    /// Some map near the end of the inspected range is not an isomorphism.
    Unstable { inspected: usize },
}

impl ColimResult {
    pub fn group(&self) -> Option<&FgAbGroup> {
        match self {
            ColimResult::Stable { group, .. } => Some(group),
            ColimResult::Unstable { .. } => None,
        }
    }
}

fn torsion_diag(orders: &[BigInt], rows: usize) -> IntMatrix {
    // Columns `orders[i]·eᵢ` for every torsion index i (torsion indices come first).
    let t = orders.iter().take_while(|d| !d.is_zero()).count();
    let mut m = IntMatrix::zeros(rows, t);
    for (i, d) in orders.iter().take(t).enumerate() {
        m[(i, i)] = d.clone();
    }
    m
}

impl GroupHom {
    pub fn new(domain: FgAbGroup, codomain: FgAbGroup, matrix: IntMatrix) -> Result<Self, AbGroupError> {
        let f = Self::new_unchecked(domain, codomain, matrix)?;
        f.validate()?;
        Ok(f)
    }

    /// Shape-checked construction that skips the well-definedness test.
    pub fn new_unchecked(
        domain: FgAbGroup,
        codomain: FgAbGroup,
        matrix: IntMatrix,
    ) -> Result<Self, AbGroupError> {
        if matrix.rows() != codomain.num_generators() || matrix.cols() != domain.num_generators() {
            return Err(AbGroupError::Shape(format!(
                "matrix is {}x{} but the map needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.num_generators(),
                domain.num_generators()
            )));
        }
        Ok(GroupHom {
            domain,
            codomain,
            matrix,
        })
    }

    /// Checks that every domain relation is sent into the codomain relations.
    pub fn validate(&self) -> Result<(), AbGroupError> {
        let images = self.matrix.mul(&self.domain.relation_columns());
        for j in 0..images.cols() {
            if !self.codomain.is_zero_element(&images.column(j)) {
                return Err(AbGroupError::IllDefined(format!(
                    "relation {} maps to a nonzero element",
                    j
                )));
            }
        }
        Ok(())
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        GroupHom {
            domain: g.clone(),
            codomain: g.clone(),
            matrix: IntMatrix::identity(g.num_generators()),
        }
    }

    pub fn zero(domain: &FgAbGroup, codomain: &FgAbGroup) -> Self {
        GroupHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: IntMatrix::zeros(codomain.num_generators(), domain.num_generators()),
        }
    }

    /// Isomorphism from `g` onto its canonical presentation.
    pub fn to_canonical(g: &FgAbGroup) -> Self {
        GroupHom {
            domain: g.clone(),
            codomain: g.canonical_group(),
            matrix: g.canonical().to_canonical.clone(),
        }
    }

    /// Isomorphism from the canonical presentation of `g` back to `g`.
    pub fn from_canonical(g: &FgAbGroup) -> Self {
        GroupHom {
            domain: g.canonical_group(),
            codomain: g.clone(),
            matrix: g.canonical().from_canonical.clone(),
        }
    }

    pub fn domain(&self) -> &FgAbGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FgAbGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    /// Matrix in canonical coordinates of domain and codomain, torsion rows reduced.
    pub fn canonical_matrix(&self) -> IntMatrix {
        let cd = self.codomain.canonical();
        let mut m = cd
            .to_canonical
            .mul(&self.matrix)
            .mul(&self.domain.canonical().from_canonical);
        for (i, d) in cd.form.invariant_factors.iter().enumerate() {
            for j in 0..m.cols() {
                let v = m[(i, j)].mod_floor(d);
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, AbGroupError> {
        if !inner.codomain.same_presentation(&self.domain) {
            return Err(AbGroupError::Shape(
                "composition: codomain of the inner map differs from the domain of the outer map".into(),
            ));
        }
        GroupHom::new(inner.domain.clone(), self.codomain.clone(), self.matrix.mul(&inner.matrix))
    }

    fn check_parallel(&self, other: &GroupHom) -> Result<(), AbGroupError> {
        if self.domain.same_presentation(&other.domain) && self.codomain.same_presentation(&other.codomain) {
            Ok(())
        } else {
            Err(AbGroupError::Shape("maps are not parallel".into()))
        }
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom, AbGroupError> {
        self.check_parallel(other)?;
        Ok(GroupHom {
            matrix: self.matrix.add(&other.matrix),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom, AbGroupError> {
        self.check_parallel(other)?;
        Ok(GroupHom {
            matrix: self.matrix.sub(&other.matrix),
            ..self.clone()
        })
    }

    pub fn neg(&self) -> GroupHom {
        GroupHom {
            matrix: self.matrix.neg(),
            ..self.clone()
        }
    }

    /// Equality as homomorphisms (agreement on every generator modulo codomain relations).
    pub fn equals(&self, other: &GroupHom) -> bool {
        self.check_parallel(other).is_ok() && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.codomain.is_zero_element(&self.matrix.column(j)))
    }

    pub fn kernel(&self) -> Kernel {
        let dc = self.domain.canonical();
        let od = dc.form.orders();
        let oc = self.codomain.canonical().form.orders();
        let f = self.canonical_matrix();
        let a = f.cols();
        let system = f.hstack(&torsion_diag(&oc, f.rows()).neg());
        let null = nullspace(&system);
        let idx: Vec<usize> = (0..a).collect();
        let span = null.select_rows(&idx);
        let basis = column_lattice_basis(&span);
        let mut rels = Vec::new();
        for (j, d) in od.iter().enumerate().filter(|(_, d)| !d.is_zero()) {
            let mut target = vec![BigInt::zero(); a];
            target[j] = d.clone();
            rels.push(solve(&basis, &target).expect("domain relations lie in the kernel lattice"));
        }
        let k = basis.cols();
        let rel = if rels.is_empty() {
            IntMatrix::zeros(0, k)
        } else {
            IntMatrix::from_rows(&rels)
        };
        let pres = FgAbGroup::new(k, rel).expect("kernel presentation shape");
        let group = pres.canonical_group();
        let inc = dc.from_canonical.mul(&basis).mul(&pres.canonical().from_canonical);
        Kernel {
            inclusion: GroupHom {
                domain: group.clone(),
                codomain: self.domain.clone(),
                matrix: inc,
            },
            group,
        }
    }

    pub fn cokernel(&self) -> Cokernel {
        let rel = self.codomain.relations().vstack(&self.matrix.transpose());
        let pres = FgAbGroup::new(self.codomain.num_generators(), rel).expect("cokernel presentation shape");
        let c = pres.canonical();
        let group = pres.canonical_group();
        Cokernel {
            projection: GroupHom {
                domain: self.codomain.clone(),
                codomain: group.clone(),
                matrix: c.to_canonical.clone(),
            },
            lift: c.from_canonical.clone(),
            group,
        }
    }

    /// The image as a canonically presented group.
    pub fn image(&self) -> FgAbGroup {
        // im f ≅ domain / ker f
        self.kernel().inclusion.cokernel().group
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().group.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn inverse(&self) -> Result<GroupHom, AbGroupError> {
        if !self.is_isomorphism() {
            return Err(AbGroupError::NotInvertible);
        }
        self.has_section().ok_or(AbGroupError::NotInvertible)
    }

    /// Some `r` with `r ∘ self = id_domain`, if one exists.
    pub fn has_retraction(&self) -> Option<GroupHom> {
        let a_orders = self.domain.canonical().form.orders();
        let c_orders = self.codomain.canonical().form.orders();
        let f = self.canonical_matrix();
        let (na, nc) = (a_orders.len(), c_orders.len());
        let tc = c_orders.iter().take_while(|d| !d.is_zero()).count();
        let mut r = IntMatrix::zeros(na, nc);
        for (i, oi) in a_orders.iter().enumerate() {
            let slack = !oi.is_zero();
            let cols = nc + if slack { tc + na } else { 0 };
            let mut sys = IntMatrix::zeros(tc + na, cols);
            let mut rhs = vec![BigInt::zero(); tc + na];
            // Row i of r must kill the torsion relations of the codomain.
            for k in 0..tc {
                sys[(k, k)] = c_orders[k].clone();
                if slack {
                    sys[(k, nc + k)] = -oi;
                }
            }
            // (r·f)[i, j] = δᵢⱼ modulo the order of generator i.
            for j in 0..na {
                for k in 0..nc {
                    sys[(tc + j, k)] = f[(k, j)].clone();
                }
                if slack {
                    sys[(tc + j, nc + tc + j)] = -oi;
                }
                if i == j {
                    rhs[tc + j] = BigInt::one();
                }
            }
            let x = solve(&sys, &rhs)?;
            for k in 0..nc {
                r[(i, k)] = x[k].clone();
            }
        }
        let m = self
            .domain
            .canonical()
            .from_canonical
            .mul(&r)
            .mul(&self.codomain.canonical().to_canonical);
        GroupHom::new(self.codomain.clone(), self.domain.clone(), m).ok()
    }

    /// Some `s` with `self ∘ s = id_codomain`, if one exists.
    pub fn has_section(&self) -> Option<GroupHom> {
        GroupHom::identity(&self.codomain).lift_through(self)
    }

    /// Some `l` with `g ∘ l = self`, if one exists (`self: X → C`, `g: B → C`).
    pub fn lift_through(&self, g: &GroupHom) -> Option<GroupHom> {
        if !self.codomain.same_presentation(&g.codomain) {
            return None;
        }
        let x_orders = self.domain.canonical().form.orders();
        let b_orders = g.domain.canonical().form.orders();
        let c_orders = self.codomain.canonical().form.orders();
        let h = self.canonical_matrix();
        let gc = g.canonical_matrix();
        let (nb, nc) = (b_orders.len(), c_orders.len());
        let dc = torsion_diag(&c_orders, nc);
        let db = torsion_diag(&b_orders, nb);
        let (tc, tb) = (dc.cols(), db.cols());
        let top = gc.hstack(&dc.neg()).hstack(&IntMatrix::zeros(nc, tb));
        let mut l = IntMatrix::zeros(nb, x_orders.len());
        for (j, xj) in x_orders.iter().enumerate() {
            let mut rhs = h.column(j);
            let sys = if xj.is_zero() {
                top.clone()
            } else {
                rhs.extend(std::iter::repeat_n(BigInt::zero(), nb));
                let bottom = IntMatrix::identity(nb)
                    .scale(xj)
                    .hstack(&IntMatrix::zeros(nb, tc))
                    .hstack(&db.neg());
                top.vstack(&bottom)
            };
            let sol = solve(&sys, &rhs)?;
            for i in 0..nb {
                l[(i, j)] = sol[i].clone();
            }
        }
        let m = g
            .domain
            .canonical()
            .from_canonical
            .mul(&l)
            .mul(&self.domain.canonical().to_canonical);
        GroupHom::new(self.domain.clone(), g.domain.clone(), m).ok()
    }

    /// Exactness of `f` then `g` at their common group.
    pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> Result<ExactnessReport, AbGroupError> {
        if !f.codomain.same_presentation(&g.domain) {
            return Err(AbGroupError::Shape("exactness: maps do not meet".into()));
        }
        let image_in_kernel = g.compose(f)?.is_zero();
        let ker = g.kernel();
        let q = f.cokernel();
        let kernel_in_image = q.projection.compose(&ker.inclusion)?.is_zero();
        Ok(ExactnessReport {
            image_in_kernel,
            kernel_in_image,
        })
    }

    /// Hermite form of the subgroup generated by the columns of `gens` (in `group` coordinates),
    /// augmented with the relations of `group`. Equal forms mean equal subgroups.
    pub fn subgroup_form(group: &FgAbGroup, gens: &IntMatrix) -> IntMatrix {
        let c = group.canonical();
        let orders = c.form.orders();
        let img = c.to_canonical.mul(gens).transpose();
        let rel = torsion_diag(&orders, orders.len()).transpose();
        hermite_rows(&img.vstack(&rel))
    }

    /// Whether `im self` and `im other` coincide as subgroups of the shared codomain.
    pub fn same_image(&self, other: &GroupHom) -> bool {
        self.codomain.same_presentation(&other.codomain)
            && Self::subgroup_form(&self.codomain, &self.matrix) == Self::subgroup_form(&other.codomain, &other.matrix)
    }

    /// `[f₁ … fₙ]: ⊕ domains → codomain`.
    pub fn copair(sum: &DirectSum, maps: &[&GroupHom]) -> Result<GroupHom, AbGroupError> {
        let first = maps
            .first()
            .ok_or_else(|| AbGroupError::Shape("copair of no maps".into()))?;
        let mut m = IntMatrix::zeros(first.codomain.num_generators(), 0);
        for (f, s) in maps.iter().zip(&sum.summands) {
            if !f.domain.same_presentation(s) || !f.codomain.same_presentation(&first.codomain) {
                return Err(AbGroupError::Shape("copair: summand mismatch".into()));
            }
            m = m.hstack(&f.matrix);
        }
        if maps.len() != sum.summands.len() {
            return Err(AbGroupError::Shape("copair: wrong number of maps".into()));
        }
        GroupHom::new(sum.group.clone(), first.codomain.clone(), m)
    }

    /// `(f₁, …, fₙ): domain → ⊕ codomains`.
    pub fn pair(domain: &FgAbGroup, sum: &DirectSum, maps: &[&GroupHom]) -> Result<GroupHom, AbGroupError> {
        if maps.len() != sum.summands.len() {
            return Err(AbGroupError::Shape("pair: wrong number of maps".into()));
        }
        let mut m = IntMatrix::zeros(0, domain.num_generators());
        for (f, s) in maps.iter().zip(&sum.summands) {
            if !f.codomain.same_presentation(s) || !f.domain.same_presentation(domain) {
                return Err(AbGroupError::Shape("pair: summand mismatch".into()));
            }
            m = m.vstack(&f.matrix);
        }
        GroupHom::new(domain.clone(), sum.group.clone(), m)
    }

    /// `f₁ ⊕ … ⊕ fₙ` between the given sums.
    pub fn block_sum(from: &DirectSum, to: &DirectSum, maps: &[&GroupHom]) -> Result<GroupHom, AbGroupError> {
        let blocks: Vec<&IntMatrix> = maps.iter().map(|f| &f.matrix).collect();
        GroupHom::new(from.group.clone(), to.group.clone(), IntMatrix::block_diag(&blocks))
    }
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({} -> {}, {:?})", self.domain, self.codomain, self.matrix)
    }
}

/// Block presentation of a direct sum, with injections and projections.
pub fn direct_sum(groups: &[FgAbGroup]) -> DirectSum {
    let n: usize = groups.iter().map(FgAbGroup::num_generators).sum();
    let rels: Vec<&IntMatrix> = groups.iter().map(FgAbGroup::relations).collect();
    let rel = if groups.is_empty() {
        IntMatrix::zeros(0, 0)
    } else {
        IntMatrix::block_diag(&rels)
    };
    let group = FgAbGroup::new(n, rel).expect("block presentation shape");
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let mut off = 0;
    for g in groups {
        let k = g.num_generators();
        let mut inj = IntMatrix::zeros(n, k);
        let mut proj = IntMatrix::zeros(k, n);
        for i in 0..k {
            inj[(off + i, i)] = BigInt::one();
            proj[(i, off + i)] = BigInt::one();
        }
        injections.push(GroupHom {
            domain: g.clone(),
            codomain: group.clone(),
            matrix: inj,
        });
        projections.push(GroupHom {
            domain: group.clone(),
            codomain: g.clone(),
            matrix: proj,
        });
        off += k;
    }
    DirectSum {
        group,
        summands: groups.to_vec(),
        injections,
        projections,
    }
}

/// Colimit of `groups[0] → groups[1] → …`, treating the input as the start of an
/// infinite sequence. Only the first `bound` maps are inspected.
pub fn colim_sequence(groups: &[FgAbGroup], maps: &[GroupHom], bound: usize) -> Result<ColimResult, AbGroupError> {
    if groups.is_empty() {
        return Ok(ColimResult::Stable {
            group: FgAbGroup::trivial(),
            index: 0,
        });
    }
    if maps.len() + 1 != groups.len() {
        return Err(AbGroupError::Shape(format!(
            "{} groups need {} maps, got {}",
            groups.len(),
            groups.len() - 1,
            maps.len()
        )));
    }
    for (k, f) in maps.iter().enumerate() {
        if !f.domain.same_presentation(&groups[k]) || !f.codomain.same_presentation(&groups[k + 1]) {
            return Err(AbGroupError::Shape(format!("map {k} does not connect consecutive groups")));
        }
    }
    let m = maps.len().min(bound);
    if maps.is_empty() {
        return Ok(ColimResult::Stable {
            group: groups[0].canonical_group(),
            index: 0,
        });
    }
    let mut s = m;
    while s > 0 && maps[s - 1].is_isomorphism() {
        s -= 1;
    }
    if s == m {
        return Ok(ColimResult::Unstable { inspected: m });
    }
    Ok(ColimResult::Stable {
        group: groups[m].canonical_group(),
        index: s,
    })
}
