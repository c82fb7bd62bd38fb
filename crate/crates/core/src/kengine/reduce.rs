use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::rings::{Elem, LaurentElem, RMatrix, RingDesc, VarKind};

use super::class::{classify, crt_components, euclid_quotient, lift, norm_value, project, Norm, RingClass};
use super::KError;

/// An elementary operation on a square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElemOp {
    /// `row[target] += factor·row[source]`.
    Row { target: usize, source: usize, factor: Elem },
    /// `col[target] += col[source]·factor`.
    Col { target: usize, source: usize, factor: Elem },
}

impl ElemOp {
    pub fn apply(&self, ring: &RingDesc, m: &mut RMatrix) {
        match self {
            ElemOp::Row { target, source, factor } => m.add_row_multiple(ring, *target, *source, factor),
            ElemOp::Col { target, source, factor } => m.add_column_multiple(ring, *target, *source, factor),
        }
    }
}

/// `diag(unit, 1, …, 1)` is obtained from the (possibly stabilized) input by replaying `log`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K1Reduction {
    pub unit: Elem,
    pub log: Vec<ElemOp>,
    /// Number of identity blocks appended before reducing.
    pub stabilized: usize,
}

impl K1Reduction {
    /// Replays the log on `m ⊕ 1_stabilized` and checks the diagonal result.
    pub fn verify(&self, ring: &RingDesc, m: &RMatrix) -> bool {
        let mut w = m.stabilize(ring, self.stabilized);
        for op in &self.log {
            op.apply(ring, &mut w);
        }
        let mut target = RMatrix::identity(ring, w.rows());
        if w.rows() > 0 {
            target.set(0, 0, self.unit.clone());
        }
        w == target
    }
}

struct Reducer<'a> {
    ring: &'a RingDesc,
    m: RMatrix,
    log: Vec<ElemOp>,
}

impl<'a> Reducer<'a> {
    fn row(&mut self, target: usize, source: usize, factor: Elem) {
        if self.ring.is_zero(&factor) {
            return;
        }
        let op = ElemOp::Row { target, source, factor };
        op.apply(self.ring, &mut self.m);
        self.log.push(op);
    }

    fn col(&mut self, target: usize, source: usize, factor: Elem) {
        if self.ring.is_zero(&factor) {
            return;
        }
        let op = ElemOp::Col { target, source, factor };
        op.apply(self.ring, &mut self.m);
        self.log.push(op);
    }

    fn push(&mut self, op: ElemOp) {
        op.apply(self.ring, &mut self.m);
        self.log.push(op);
    }

    /// `row a ↦ row b`, `row b ↦ −row a` by three elementary moves.
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let (one, minus) = (self.ring.one(), self.ring.neg(&self.ring.one()));
            self.row(a, b, one.clone());
            self.row(b, a, minus);
            self.row(a, b, one);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            let (one, minus) = (self.ring.one(), self.ring.neg(&self.ring.one()));
            self.col(a, b, one.clone());
            self.col(b, a, minus);
            self.col(a, b, one);
        }
    }

    /// With column `c` zero below/above except a unit at row `p ≥ c`, move the unit to `(c, c)`
    /// and clear row `c` to the right.
    fn settle(&mut self, c: usize, p: usize) -> Result<(), KError> {
        let r = self.ring;
        if p != c {
            self.row(c, p, r.one());
            let back = r.neg(&r.one());
            self.row(p, c, back);
        }
        let u = self.m.get(c, c).clone();
        let ui = r.unit_inverse(&u)?.ok_or(KError::Singular)?;
        for j in c + 1..self.m.cols() {
            let f = r.neg(&r.mul(&ui, self.m.get(c, j)));
            self.col(j, c, f);
        }
        Ok(())
    }

    /// Euclidean elimination of column `c` below the diagonal.
    fn euclid_column(&mut self, c: usize, norm: Norm) -> Result<(), KError> {
        let r = self.ring;
        let n = self.m.rows();
        loop {
            let mut best: Option<(BigInt, usize)> = None;
            for i in c..n {
                if let Some(v) = norm_value(r, norm, self.m.get(i, c))? {
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, i));
                    }
                }
            }
            let Some((_, p)) = best else { return Err(KError::Singular) };
            let others: Vec<usize> = (c..n).filter(|&i| i != p && !r.is_zero(self.m.get(i, c))).collect();
            if others.is_empty() {
                return self.settle(c, p);
            }
            for i in others {
                let q = euclid_quotient(r, norm, self.m.get(i, c), self.m.get(p, c))?.ok_or(KError::Singular)?;
                self.row(i, p, r.neg(&q));
            }
        }
    }

    /// `diag(u₀, …, uₙ₋₁) ↦ diag(u₀⋯uₙ₋₁, 1, …, 1)` by Whitehead moves.
    fn collect_units(&mut self) -> Result<(), KError> {
        let r = self.ring;
        for k in 1..self.m.rows() {
            let a = self.m.get(k, k).clone();
            if r.is_one(&a) {
                continue;
            }
            let ai = r.unit_inverse(&a)?.ok_or(KError::Singular)?;
            let b = self.m.get(0, 0).clone();
            // [[a,0],[0,b]] on rows/cols (k, 0) → [[1,0],[0,ab]]
            self.row(0, k, ai);
            let one_minus_a = r.sub(&r.one(), &a);
            self.row(k, 0, one_minus_a.clone());
            self.row(0, k, r.neg(&r.one()));
            self.col(0, k, r.neg(&r.mul(&one_minus_a, &b)));
        }
        Ok(())
    }
}

/// Reduces an invertible matrix over a certified Euclidean ring, a supported product of such
/// rings, or `ℤ[t]`, `ℤ[t⁻¹]`, `ℤ[t, t⁻¹]` (heuristic, may stall).
pub fn matrix_k1_reduce(ring: &RingDesc, m: &RMatrix) -> Result<K1Reduction, KError> {
    if !m.is_square() {
        return Err(KError::Shape("K₁ reduction needs a square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(K1Reduction { unit: ring.one(), log: Vec::new(), stabilized: 0 });
    }
    match classify(ring) {
        RingClass::Zero => Ok(K1Reduction { unit: ring.one(), log: Vec::new(), stabilized: 0 }),
        RingClass::ProductOfLocals { .. } => reduce_product(ring, m),
        RingClass::IntegralExtension { kind } => reduce_heuristic(ring, m, kind),
        class => {
            let norm = class.norm().ok_or_else(|| KError::Unsupported(format!("no Euclidean norm for {ring} ({class})")))?;
            let mut red = Reducer { ring, m: m.clone(), log: Vec::new() };
            for c in 0..n {
                red.euclid_column(c, norm)?;
            }
            red.collect_units()?;
            Ok(K1Reduction { unit: red.m.get(0, 0).clone(), log: red.log, stabilized: 0 })
        }
    }
}

/// Componentwise reduction; an operation with factor lifted from `(0, …, c, …, 0)` acts only
/// on its own component.
fn reduce_product(ring: &RingDesc, m: &RMatrix) -> Result<K1Reduction, KError> {
    let comps = crt_components(ring);
    let zeros: Vec<Elem> = comps.iter().map(|c| c.ring.zero()).collect();
    let mut log = Vec::new();
    let mut units = Vec::new();
    let mut stabilized = 0;
    let mut parts = Vec::new();
    for c in &comps {
        let mc = m.map_with(|x| project(x, &c.ring));
        let red = matrix_k1_reduce(&c.ring, &mc)?;
        stabilized = stabilized.max(red.stabilized);
        parts.push(red);
    }
    for (j, red) in parts.into_iter().enumerate() {
        let embed = |x: &Elem| {
            let mut v = zeros.clone();
            v[j] = x.clone();
            lift(&v, &comps, ring)
        };
        for op in red.log {
            log.push(match op {
                ElemOp::Row { target, source, factor } => ElemOp::Row { target, source, factor: embed(&factor) },
                ElemOp::Col { target, source, factor } => ElemOp::Col { target, source, factor: embed(&factor) },
            });
        }
        units.push(red.unit);
    }
    if stabilized > 0 {
        // component logs were produced for different sizes; only size-compatible logs combine
        return Err(KError::Unsupported("stabilized reduction over a product ring".into()));
    }
    Ok(K1Reduction { unit: lift(&units, &comps, ring), log, stabilized: 0 })
}

fn bits(x: &BigInt) -> u64 {
    x.abs().bits()
}

/// Size of a column entry for the heuristic: span first, then coefficient sizes.
fn weight(x: &Elem) -> u64 {
    match x {
        Elem::Laurent(l) if l.is_zero() => 0,
        Elem::Laurent(l) => {
            let coeffs: u64 = l
                .terms()
                .map(|(_, c)| match c {
                    Elem::Int(v) => bits(v),
                    _ => 1,
                })
                .sum();
            1 + 64 * l.span().unwrap() as u64 + coeffs
        }
        _ => unreachable!(),
    }
}

fn int_coeff(l: &LaurentElem, k: i64) -> BigInt {
    match l.coeff(k) {
        Some(Elem::Int(v)) => v.clone(),
        _ => unreachable!(),
    }
}

/// Candidate quotients `c·tᵏ` aligning the top or bottom term of `a` with that of `b`.
fn candidates(a: &LaurentElem, b: &LaurentElem, kind: VarKind) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    let (at, ab, bt, bb) = (a.top().unwrap(), a.bottom().unwrap(), b.top().unwrap(), b.bottom().unwrap());
    for (k, x, y) in [(at - bt, int_coeff(a, at), int_coeff(b, bt)), (ab - bb, int_coeff(a, ab), int_coeff(b, bb))] {
        if !kind.allows(k) {
            continue;
        }
        let q_floor = num_integer::Integer::div_floor(&x, &y);
        for q in [q_floor.clone(), q_floor + 1] {
            if !num_traits::Zero::is_zero(&q) {
                out.push((q, k));
            }
        }
    }
    out
}

const HEURISTIC_BUDGET: usize = 4000;
const HEURISTIC_RESTARTS: u64 = 8;

/// Greedy weight-decreasing elimination for `ℤ[t^±]`, with random escapes and one
/// stabilization step.
fn reduce_heuristic(ring: &RingDesc, m: &RMatrix, kind: VarKind) -> Result<K1Reduction, KError> {
    for stab in 0..=1 {
        for seed in 0..HEURISTIC_RESTARTS {
            if let Some(red) = try_heuristic(ring, m, kind, stab, seed)? {
                return Ok(red);
            }
        }
    }
    Err(KError::Stalled(format!("elementary reduction over {ring} exhausted its budget")))
}

fn try_heuristic(ring: &RingDesc, m: &RMatrix, kind: VarKind, stab: usize, seed: u64) -> Result<Option<K1Reduction>, KError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = &ring.extension().expect("extension").base;
    let mut red = Reducer { ring, m: m.stabilize(ring, stab), log: Vec::new() };
    let n = red.m.rows();
    let mut steps = 0;
    for c in 0..n {
        loop {
            steps += 1;
            if steps > HEURISTIC_BUDGET {
                return Ok(None);
            }
            // any unit in the minor becomes the pivot
            let unit_at = (c..n)
                .flat_map(|i| (c..n).map(move |j| (i, j)))
                .find(|&(i, j)| ring.is_unit(red.m.get(i, j)).unwrap_or(false));
            if let Some((i, j)) = unit_at {
                red.swap_rows(c, i);
                red.swap_cols(c, j);
                let ui = ring.unit_inverse(red.m.get(c, c))?.expect("unit");
                for r in c + 1..n {
                    let f = ring.neg(&ring.mul(red.m.get(r, c), &ui));
                    red.row(r, c, f);
                }
                red.settle(c, c)?;
                break;
            }
            // best single-entry improvement by a monomial row or column operation
            // gains are (whole line, single entry); the line gain decides when positive
            let mut best: Vec<(ElemOp, (i64, i64))> = Vec::new();
            let mut consider = |op: ElemOp, gain: (i64, i64)| {
                let key = |g: (i64, i64)| if g.0 > 0 { (1, g.0, g.1) } else { (0, g.1, g.0) };
                if key(gain).1 <= 0 {
                    return;
                }
                match best.first().map(|(_, g)| key(*g).cmp(&key(gain))) {
                    Some(std::cmp::Ordering::Greater) => {}
                    Some(std::cmp::Ordering::Less) => {
                        best.clear();
                        best.push((op, gain));
                    }
                    _ => best.push((op, gain)),
                }
            };
            for i in c..n {
                for j in c..n {
                    let Elem::Laurent(a) = red.m.get(i, j) else { unreachable!() };
                    if a.is_zero() {
                        continue;
                    }
                    let wa = weight(red.m.get(i, j)) as i64;
                    // row i -= q·row k, judged on column j
                    for k in (c..n).filter(|&k| k != i) {
                        let Elem::Laurent(b) = red.m.get(k, j) else { unreachable!() };
                        if b.is_zero() {
                            continue;
                        }
                        for (q, e) in candidates(a, b, kind) {
                            let qe = Elem::Laurent(LaurentElem::monomial(Elem::Int(q), e, base));
                            let new = ring.sub(red.m.get(i, j), &ring.mul(&qe, red.m.get(k, j)));
                            let line: i64 = (c..n)
                                .map(|x| {
                                    let v = ring.sub(red.m.get(i, x), &ring.mul(&qe, red.m.get(k, x)));
                                    weight(red.m.get(i, x)) as i64 - weight(&v) as i64
                                })
                                .sum();
                            consider(ElemOp::Row { target: i, source: k, factor: ring.neg(&qe) }, (line, wa - weight(&new) as i64));
                        }
                    }
                    // col j -= col l·q, judged on row i
                    for l in (c..n).filter(|&l| l != j) {
                        let Elem::Laurent(b) = red.m.get(i, l) else { unreachable!() };
                        if b.is_zero() {
                            continue;
                        }
                        for (q, e) in candidates(a, b, kind) {
                            let qe = Elem::Laurent(LaurentElem::monomial(Elem::Int(q), e, base));
                            let new = ring.sub(red.m.get(i, j), &ring.mul(red.m.get(i, l), &qe));
                            let line: i64 = (c..n)
                                .map(|x| {
                                    let v = ring.sub(red.m.get(x, j), &ring.mul(red.m.get(x, l), &qe));
                                    weight(red.m.get(x, j)) as i64 - weight(&v) as i64
                                })
                                .sum();
                            consider(ElemOp::Col { target: j, source: l, factor: ring.neg(&qe) }, (line, wa - weight(&new) as i64));
                        }
                    }
                }
            }
            if !best.is_empty() {
                let (op, _) = best.swap_remove(rng.gen_range(0..best.len()));
                red.push(op);
                continue;
            }
            // escape: a random monomial row or column operation inside the minor
            if n - c < 2 {
                return Err(KError::Singular);
            }
            let i = rng.gen_range(c..n);
            let j = loop {
                let j = rng.gen_range(c..n);
                if j != i {
                    break j;
                }
            };
            let exp = if kind == VarKind::NegPolynomial { -rng.gen_range(0..2) } else { rng.gen_range(0..2) };
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let f = ring.monomial(base.from_int(sign), exp)?;
            if rng.gen_bool(0.5) {
                red.row(i, j, f);
            } else {
                red.col(i, j, f);
            }
        }
    }
    red.collect_units()?;
    let out = K1Reduction { unit: red.m.get(0, 0).clone(), log: red.log, stabilized: stab };
    Ok(Some(out))
}

/// Outcome of reducing random elementary products.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Sk1Certificate {
    pub ring: String,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub reduced: usize,
    pub max_log_length: usize,
    pub failures: Vec<String>,
}

impl Sk1Certificate {
    pub fn complete(&self) -> bool {
        self.failures.is_empty() && self.reduced == self.samples
    }
}

/// A random product of `len` elementary matrices with small entries.
pub fn random_elementary_product<R: Rng + ?Sized>(ring: &RingDesc, n: usize, len: usize, rng: &mut R) -> RMatrix {
    let mut m = RMatrix::identity(ring, n);
    if n < 2 {
        return m;
    }
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = ring.random(rng, 2, 1);
        m.add_row_multiple(ring, i, j, &c);
    }
    m
}

/// Reduces `samples` random elementary products of each size in `sizes` and checks that every
/// replayed log ends at the identity with unit `det = 1`. The generating sequence is not shown
/// to the reducer.
pub fn certify_sk1(ring: &RingDesc, sizes: &[usize], samples: usize, seed: u64) -> Sk1Certificate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = Sk1Certificate { ring: ring.to_string(), sizes: sizes.to_vec(), ..Default::default() };
    let commutative = ring.is_commutative();
    for i in 0..samples {
        let n = sizes[i % sizes.len()];
        let m = random_elementary_product(ring, n, 4 + i % 5, &mut rng);
        cert.samples += 1;
        match matrix_k1_reduce(ring, &m) {
            Ok(red) => {
                let ok = red.verify(ring, &m) && ring.is_one(&red.unit) && (!commutative || m.determinant(ring) == red.unit);
                if ok {
                    cert.reduced += 1;
                    cert.max_log_length = cert.max_log_length.max(red.log.len());
                } else {
                    cert.failures.push(format!("sample {i}: log does not reach the identity"));
                }
            }
            Err(e) => cert.failures.push(format!("sample {i}: {e}")),
        }
    }
    cert
}
