//! Integer linear systems and lattice utilities built on the Smith form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;
use super::smith::smith_normal_form;

/// One integer solution of `A·x = b`, or `None` when no integer solution exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let s = smith_normal_form(a);
    let c = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let d = &s.d[(i, i)];
            if !ci.is_multiple_of(d) {
                return None;
            }
            y[i] = ci / d;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Solve `A·X = B` column by column.
pub fn solve_matrix(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows());
    let s = smith_normal_form(a);
    let c = s.u.mul(b);
    let mut y = IntMatrix::zeros(a.cols(), b.cols());
    for j in 0..b.cols() {
        for i in 0..c.rows() {
            let ci = &c[(i, j)];
            if i < s.rank {
                let d = &s.d[(i, i)];
                if !ci.is_multiple_of(d) {
                    return None;
                }
                y[(i, j)] = ci / d;
            } else if !ci.is_zero() {
                return None;
            }
        }
    }
    Some(s.v.mul(&y))
}

/// A ℤ-basis (as columns) of `{x : A·x = 0}`.
pub fn nullspace(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let idx: Vec<usize> = (s.rank..a.cols()).collect();
    s.v.select_columns(&idx)
}

/// A ℤ-basis (as columns) of the lattice spanned by the columns of `gens`.
pub fn column_lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(gens);
    // gens·V = U⁻¹·D, whose first `rank` columns are a basis and the rest vanish.
    let gv = gens.mul(&s.v);
    let idx: Vec<usize> = (0..s.rank).collect();
    gv.select_columns(&idx)
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `gens`.
///
/// The result has no zero rows, strictly increasing pivot columns, positive pivots and
/// entries above each pivot reduced into `[0, pivot)`. Two generating sets span the same
/// lattice iff their Hermite forms are equal.
pub fn hermite_rows(gens: &IntMatrix) -> IntMatrix {
    let mut a = gens.clone();
    let (m, n) = (a.rows(), a.cols());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclid down the column until only row r is nonzero in rows r..m.
        loop {
            let best = (r..m)
                .filter(|&i| !a[(i, c)].is_zero())
                .min_by(|&i, &j| a[(i, c)].abs().cmp(&a[(j, c)].abs()));
            let Some(p) = best else { break };
            a.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let q = a[(i, c)].div_floor(&a[(r, c)]);
                a.add_row_multiple(i, r, &-q);
                done &= a[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if a[(r, c)].is_zero() {
            continue;
        }
        if a[(r, c)].is_negative() {
            a.negate_row(r);
        }
        for i in 0..r {
            let q = a[(i, c)].div_floor(&a[(r, c)]);
            a.add_row_multiple(i, r, &-q);
        }
        pivots.push(c);
        r += 1;
    }
    let idx: Vec<usize> = (0..r).collect();
    a.select_rows(&idx)
}
