use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::rings::{Elem, RMatrix, RingDesc, VarKind};

use super::category::{laurent_compose, Category, LaurentMorphism, Morphism};

/// Exponent window used for exhaustive enumeration over finite rings.
const WINDOW: [i64; 3] = [-1, 0, 1];
/// Largest hom-set slice enumerated exhaustively.
const EXHAUSTIVE_LIMIT: usize = 1 << 12;
const SAMPLES: usize = 200;

/// Outcome of comparing `matcat(R)[t, t⁻¹]` with `matcat(R[t, t⁻¹])`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub size_bound: usize,
    pub objects_checked: usize,
    pub morphisms_checked: usize,
    pub compositions_checked: usize,
    pub failures: Vec<String>,
}

impl EquivReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn all_matrices(ring: &RingDesc, elems: &[Elem], rows: usize, cols: usize) -> Vec<RMatrix> {
    let mut out = vec![Vec::new()];
    for _ in 0..rows * cols {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Elem>| {
                elems.iter().map(move |e| {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|flat| {
            if rows == 0 || cols == 0 {
                RMatrix::zeros(ring, rows, cols)
            } else {
                RMatrix::from_rows(flat.chunks(cols).map(<[Elem]>::to_vec).collect())
            }
        })
        .collect()
}

/// Checks that the evident identity-on-objects functor `matcat(R)[t, t⁻¹] → matcat(R[t, t⁻¹])`
/// is bijective on hom-sets and preserves identities and composition, for objects up to
/// `size_bound`. Finite rings are enumerated exhaustively on a low-degree slice when it is small
/// enough; otherwise morphisms are sampled.
pub fn matcat_laurent_equiv_check(ring: &RingDesc, size_bound: usize) -> EquivReport {
    let lr = ring.laurent("t");
    let cat = Category::laurent(ring, VarKind::Laurent);
    let mut report = EquivReport {
        size_bound,
        objects_checked: size_bound + 1,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c61_7572);
    let slice = ring.finite_elements().map(|coeffs| lr.enumerate_slice(&WINDOW, &coeffs));
    let hom = |m: usize, n: usize, rng: &mut ChaCha8Rng| -> Vec<LaurentMorphism> {
        if let Some(slice) = &slice {
            if slice.len().checked_pow((m * n) as u32).is_some_and(|c| c <= EXHAUSTIVE_LIMIT) {
                return all_matrices(&lr, slice, n, m)
                    .iter()
                    .map(|x| LaurentMorphism::from_ring_matrix(ring, x))
                    .collect();
            }
        }
        (0..SAMPLES)
            .map(|_| match cat.random_morphism(rng, m, n, 2) {
                Morphism::Laurent(l) => l,
                _ => unreachable!(),
            })
            .collect()
    };

    for n in 1..=size_bound {
        let id = LaurentMorphism::identity_times_t(ring, n, 0);
        if id.to_ring_matrix(ring, &lr) != RMatrix::identity(&lr, n) {
            report.failures.push(format!("identity on {n} is not preserved"));
        }
    }
    for m in 1..=size_bound {
        for n in 1..=size_bound {
            let fs = hom(m, n, &mut rng);
            for f in &fs {
                report.morphisms_checked += 1;
                let e = f.to_ring_matrix(ring, &lr);
                if LaurentMorphism::from_ring_matrix(ring, &e) != *f {
                    report.failures.push(format!("round trip fails on {f:?}"));
                }
            }
            // surjectivity: every sampled target matrix comes from a Laurent morphism
            let mut targets: Vec<RMatrix> = fs.iter().take(SAMPLES).map(|f| f.to_ring_matrix(ring, &lr)).collect();
            for _ in 0..20 {
                targets.push(RMatrix::from_rows((0..n).map(|_| (0..m).map(|_| lr.random(&mut rng, 5, 3)).collect()).collect()));
            }
            for x in &targets {
                if LaurentMorphism::from_ring_matrix(ring, x).to_ring_matrix(ring, &lr) != *x {
                    report.failures.push(format!("{x:?} has no preimage"));
                }
            }
            for l in 1..=size_bound {
                let gs = hom(n, l, &mut rng);
                let exhaustive = fs.len() * gs.len() <= EXHAUSTIVE_LIMIT;
                let pairs: Vec<(usize, usize)> = if exhaustive {
                    (0..gs.len()).flat_map(|g| (0..fs.len()).map(move |f| (g, f))).collect()
                } else {
                    use rand::Rng;
                    (0..SAMPLES).map(|_| (rng.gen_range(0..gs.len()), rng.gen_range(0..fs.len()))).collect()
                };
                for (gi, fi) in pairs {
                    let (g, f) = (&gs[gi], &fs[fi]);
                    report.compositions_checked += 1;
                    let lhs = laurent_compose(ring, g, f, None).expect("shapes agree").to_ring_matrix(ring, &lr);
                    let rhs = g.to_ring_matrix(ring, &lr).mul(&lr, &f.to_ring_matrix(ring, &lr));
                    if lhs != rhs {
                        report.failures.push(format!("composition differs for {g:?} ∘ {f:?}"));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_bound_is_vacuous() {
        let r = matcat_laurent_equiv_check(&RingDesc::Integers, 0);
        assert!(r.passed());
        assert_eq!(r.morphisms_checked, 0);
    }

    #[test]
    fn integers_sampled() {
        let r = matcat_laurent_equiv_check(&RingDesc::Integers, 2);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.compositions_checked > 0);
    }
}
