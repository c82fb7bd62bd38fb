//! Smith normal form over ℤ with tracked unimodular transforms.
//!
//! For an `m × n` integer matrix `A` we compute unimodular `U` (`m × m`) and `V` (`n × n`)
//! with `U·A·V = D`, where `D` is diagonal, its nonzero diagonal entries are positive and
//! each divides the next. The inverses of `U` and `V` are maintained alongside so callers
//! never need to invert a unimodular matrix after the fact.
//!
//! The pivot is always the entry of smallest absolute value in the active submatrix, ties
//! broken by row-major position. This makes the transforms (not only `D`) reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Full diagonal of length `min(m, n)`, trailing zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_columns(i, j);
    }

    fn swap_columns(&mut self, i: usize, j: usize) {
        self.a.swap_columns(i, j);
        self.v.swap_columns(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_column(i);
    }

    /// row[target] += c * row[source]
    fn add_row(&mut self, target: usize, source: usize, c: &BigInt) {
        self.a.add_row_multiple(target, source, c);
        self.u.add_row_multiple(target, source, c);
        self.u_inv.add_column_multiple(source, target, &-c);
    }

    /// col[target] += c * col[source]
    fn add_column(&mut self, target: usize, source: usize, c: &BigInt) {
        self.a.add_column_multiple(target, source, c);
        self.v.add_column_multiple(target, source, c);
        self.v_inv.add_row_multiple(source, target, &-c);
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form of an arbitrary integer matrix (empty shapes included).
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let mut rank = 0;
    for t in 0..m.min(n) {
        let Some((pi, pj)) = r.find_pivot(t) else {
            break;
        };
        r.swap_rows(t, pi);
        r.swap_columns(t, pj);
        loop {
            if r.a[(t, t)].is_negative() {
                r.negate_row(t);
            }
            let p = r.a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if r.a[(i, t)].is_zero() {
                    continue;
                }
                let q = r.a[(i, t)].div_floor(&p);
                r.add_row(i, t, &-q);
                dirty |= !r.a[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if r.a[(t, j)].is_zero() {
                    continue;
                }
                let q = r.a[(t, j)].div_floor(&p);
                r.add_column(j, t, &-q);
                dirty |= !r.a[(t, j)].is_zero();
            }
            if !dirty {
                // Row and column are clear; enforce divisibility of the remaining block.
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !r.a[(i, j)].is_multiple_of(&p));
                match offender {
                    Some((i, _)) => r.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            let (pi, pj) = r.find_pivot(t).expect("active block is nonzero");
            r.swap_rows(t, pi);
            r.swap_columns(t, pj);
        }
        rank += 1;
    }
    SmithForm {
        u: r.u,
        u_inv: r.u_inv,
        d: r.a,
        v: r.v,
        v_inv: r.v_inv,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.cols()));
        s
    }

    #[test]
    fn two_by_two_example() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check(&IntMatrix::zeros(2, 3));
        assert!(s.d.is_zero());
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn empty_shapes() {
        check(&IntMatrix::zeros(0, 0));
        check(&IntMatrix::zeros(0, 4));
        let s = check(&IntMatrix::zeros(3, 0));
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2,3) must become diag(1,6).
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn deterministic_transforms() {
        let a = IntMatrix::from_rows(&[vec![3, -7, 2], vec![5, 1, -4], vec![0, 6, 9]]);
        let s1 = smith_normal_form(&a);
        let s2 = smith_normal_form(&a);
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.v, s2.v);
    }
}
