use std::collections::HashMap;
use std::fmt;

use super::hom::RingHom;
use super::ring::{Elem, RingDesc};

/// A dense row-major matrix over some [`RingDesc`]; the ring is passed to each operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl RMatrix {
    pub fn zeros(ring: &RingDesc, rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &RingDesc, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        RMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diagonal(ring: &RingDesc, entries: &[Elem]) -> Self {
        let mut m = Self::zeros(ring, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn mul(&self, ring: &RingDesc, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !ring.is_zero(b) {
                        let v = ring.add(out.get(i, j), &ring.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, ring: &RingDesc, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, ring: &RingDesc, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn is_zero(&self, ring: &RingDesc) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn is_identity(&self, ring: &RingDesc) -> bool {
        self.is_square() && *self == Self::identity(ring, self.rows)
    }

    /// Apply a ring homomorphism entrywise.
    pub fn map(&self, h: &RingHom) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| h.apply(x)).collect(),
        }
    }

    pub fn map_with(&self, f: impl Fn(&Elem) -> Elem) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// `self ⊕ 1ₖ`.
    pub fn stabilize(&self, ring: &RingDesc, extra: usize) -> RMatrix {
        assert!(self.is_square());
        let n = self.rows + extra;
        let mut m = Self::identity(ring, n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// `row[target] += c·row[source]` (left multiplication by `c`).
    pub fn add_row_multiple(&mut self, ring: &RingDesc, target: usize, source: usize, c: &Elem) {
        for j in 0..self.cols {
            let v = ring.add(self.get(target, j), &ring.mul(c, self.get(source, j)));
            self.set(target, j, v);
        }
    }

    /// `col[target] += col[source]·c` (right multiplication by `c`).
    pub fn add_column_multiple(&mut self, ring: &RingDesc, target: usize, source: usize, c: &Elem) {
        for i in 0..self.rows {
            let v = ring.add(self.get(i, target), &ring.mul(self.get(i, source), c));
            self.set(i, target, v);
        }
    }

    /// Determinant over a commutative ring (division-free, exponential in `n` via subset DP).
    pub fn determinant(&self, ring: &RingDesc) -> Elem {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        assert!(n <= 16, "determinant size limit");
        // dp over the set of used columns, filling rows in order.
        let mut dp: HashMap<u32, Elem> = HashMap::new();
        dp.insert(0, ring.one());
        for i in 0..n {
            let mut next: HashMap<u32, Elem> = HashMap::new();
            for (mask, val) in &dp {
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let a = self.get(i, j);
                    if ring.is_zero(a) {
                        continue;
                    }
                    // Sign: number of used columns greater than j.
                    let inversions = (mask >> (j + 1)).count_ones();
                    let mut term = ring.mul(val, a);
                    if inversions % 2 == 1 {
                        term = ring.neg(&term);
                    }
                    let slot = next.entry(mask | (1 << j)).or_insert_with(|| ring.zero());
                    *slot = ring.add(slot, &term);
                }
            }
            dp = next;
        }
        dp.remove(&((1u32 << n) - 1)).unwrap_or_else(|| if n == 0 { ring.one() } else { ring.zero() })
    }

    /// Inverse over a commutative ring via the adjugate, or `None` when not invertible.
    pub fn inverse(&self, ring: &RingDesc) -> Option<RMatrix> {
        let n = self.rows;
        let d = self.determinant(ring);
        let dinv = ring.unit_inverse(&d).ok().flatten()?;
        let mut inv = Self::zeros(ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(ring, j, i);
                let mut c = ring.mul(&minor.determinant(ring), &dinv);
                if (i + j) % 2 == 1 {
                    c = ring.neg(&c);
                }
                inv.set(i, j, c);
            }
        }
        Some(inv)
    }

    fn minor(&self, ring: &RingDesc, r: usize, c: usize) -> RMatrix {
        let rows: Vec<Vec<Elem>> = (0..self.rows)
            .filter(|&i| i != r)
            .map(|i| (0..self.cols).filter(|&j| j != c).map(|j| self.get(i, j).clone()).collect())
            .collect();
        if rows.is_empty() {
            return Self::zeros(ring, 0, 0);
        }
        Self::from_rows(rows)
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| format!("{x:?}")).collect();
            write!(f, "{}", r.join(", "))?;
        }
        write!(f, "]")
    }
}
