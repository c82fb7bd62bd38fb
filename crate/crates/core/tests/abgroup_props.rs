use std::collections::BTreeSet;

use kwb_core::abgroup::{smith_normal_form, FgAbGroup, GroupHom, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix_strategy(max: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max, 0..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntMatrix::from_shape_vec(r, c, v.into_iter().map(BigInt::from).collect())
        })
    })
}

/// A well-defined map between diagonal finite groups: entry (i, j) is a multiple of
/// `cᵢ / gcd(cᵢ, oⱼ)`, which is exactly the condition `oⱼ·M[i][j] ≡ 0 (mod cᵢ)`.
fn finite_hom_strategy(max_gens: usize, max_order: i64) -> impl Strategy<Value = GroupHom> {
    (
        prop::collection::vec(1..=max_order, 1..=max_gens),
        prop::collection::vec(1..=max_order, 1..=max_gens),
    )
        .prop_flat_map(|(dom, cod)| {
            let n = dom.len() * cod.len();
            (Just(dom), Just(cod), prop::collection::vec(0i64..12, n))
        })
        .prop_map(|(dom, cod, ks)| hom_from_seed(&dom, &cod, &ks))
}

fn hom_from_seed(dom: &[i64], cod: &[i64], ks: &[i64]) -> GroupHom {
    let mut m = IntMatrix::zeros(cod.len(), dom.len());
    for i in 0..cod.len() {
        for j in 0..dom.len() {
            let step = cod[i] / cod[i].gcd(&dom[j]);
            m[(i, j)] = BigInt::from((ks[i * dom.len() + j] * step) % cod[i]);
        }
    }
    GroupHom::new(orders(dom), orders(cod), m).unwrap()
}

fn orders(o: &[i64]) -> FgAbGroup {
    FgAbGroup::from_orders(&o.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
}

fn diag_orders(g: &FgAbGroup) -> Vec<i64> {
    // Only used on diagonal presentations built by `orders`.
    (0..g.num_generators())
        .map(|j| {
            (0..g.relations().rows())
                .map(|r| g.relations()[(r, j)].clone())
                .find(|x| !x.is_zero())
                .map_or(0, |x| i64::try_from(x).unwrap())
        })
        .collect()
}

fn elements(o: &[i64]) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for &d in o {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |x| {
                    let mut q = p.clone();
                    q.push(BigInt::from(x));
                    q
                })
            })
            .collect();
    }
    out
}

fn all_matrices(rows: usize, cols: usize, row_orders: &[i64]) -> Vec<IntMatrix> {
    let mut out = vec![IntMatrix::zeros(rows, cols)];
    for i in 0..rows {
        for j in 0..cols {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..row_orders[i]).map(move |x| {
                        let mut n = m.clone();
                        n[(i, j)] = BigInt::from(x);
                        n
                    })
                })
                .collect();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_invariants(a in matrix_strategy(6, 20)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.determinant().abs(), BigInt::one());
        prop_assert_eq!(s.v.determinant().abs(), BigInt::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.nonzero_diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(diag.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn retraction_matches_exhaustive_search(f in finite_hom_strategy(2, 6)) {
        let dom = diag_orders(f.domain());
        let cod = diag_orders(f.codomain());
        let found = f.has_retraction();
        if let Some(r) = &found {
            prop_assert!(r.compose(&f).unwrap().equals(&GroupHom::identity(f.domain())));
        }
        let brute = all_matrices(dom.len(), cod.len(), &dom).into_iter().any(|m| {
            GroupHom::new(f.codomain().clone(), f.domain().clone(), m)
                .map(|r| r.compose(&f).unwrap().equals(&GroupHom::identity(f.domain())))
                .unwrap_or(false)
        });
        prop_assert_eq!(found.is_some(), brute);
    }

    #[test]
    fn section_matches_exhaustive_search(f in finite_hom_strategy(2, 6)) {
        let dom = diag_orders(f.domain());
        let cod = diag_orders(f.codomain());
        let found = f.has_section();
        if let Some(s) = &found {
            prop_assert!(f.compose(s).unwrap().equals(&GroupHom::identity(f.codomain())));
        }
        let brute = all_matrices(dom.len(), cod.len(), &dom).into_iter().any(|m| {
            GroupHom::new(f.codomain().clone(), f.domain().clone(), m)
                .map(|s| f.compose(&s).unwrap().equals(&GroupHom::identity(f.codomain())))
                .unwrap_or(false)
        });
        prop_assert_eq!(found.is_some(), brute);
    }

    #[test]
    fn kernel_image_orders(f in finite_hom_strategy(3, 8)) {
        let k = f.kernel().group.order().unwrap();
        let i = f.image().order().unwrap();
        prop_assert_eq!(k * i, f.domain().order().unwrap());
        // Independent count of the kernel by enumeration.
        let count = elements(&diag_orders(f.domain()))
            .iter()
            .filter(|x| f.codomain().is_zero_element(&f.apply(x)))
            .count();
        prop_assert_eq!(f.kernel().group.order().unwrap(), BigInt::from(count));
    }

    #[test]
    fn exactness_matches_enumeration(
        a in prop::collection::vec(1i64..=4, 1..=2),
        b in prop::collection::vec(1i64..=4, 1..=3),
        c in prop::collection::vec(1i64..=4, 1..=2),
        ks in prop::collection::vec(0i64..8, 24),
        ls in prop::collection::vec(0i64..8, 24),
        force_zero in any::<bool>(),
    ) {
        let f = hom_from_seed(&a, &b, &ks);
        let mut g = hom_from_seed(&b, &c, &ls);
        if force_zero {
            g = GroupHom::zero(g.domain(), g.codomain());
        }
        let rep = GroupHom::is_exact_at(&f, &g).unwrap();
        let mid = f.codomain();
        let image: BTreeSet<Vec<BigInt>> = elements(&a).iter().map(|x| mid.reduce(&f.apply(x))).collect();
        let kernel: BTreeSet<Vec<BigInt>> = elements(&b)
            .iter()
            .filter(|y| g.codomain().is_zero_element(&g.apply(y)))
            .map(|y| mid.reduce(y))
            .collect();
        prop_assert_eq!(rep.image_in_kernel, image.is_subset(&kernel));
        prop_assert_eq!(rep.kernel_in_image, kernel.is_subset(&image));
    }

    #[test]
    fn cokernel_order_by_enumeration(f in finite_hom_strategy(3, 6)) {
        let image: BTreeSet<Vec<BigInt>> = elements(&diag_orders(f.domain()))
            .iter()
            .map(|x| f.codomain().reduce(&f.apply(x)))
            .collect();
        let total = f.codomain().order().unwrap();
        prop_assert_eq!(f.cokernel().group.order().unwrap() * BigInt::from(image.len()), total);
    }
}
