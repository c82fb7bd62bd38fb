use kwb_core::addcat::{
    build_functor, laurent_compose, matcat_laurent_equiv_check, twisted_power, Category, FunctorKind, LaurentMorphism,
    Morphism, NilObject,
};
use kwb_core::rings::{RMatrix, RingAutomorphism, RingDesc, VarKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn categories() -> Vec<Category> {
    let z = RingDesc::Integers;
    let f4 = RingDesc::finite_field(4).unwrap();
    vec![
        Category::Mat(z.clone()),
        Category::Mat(RingDesc::IntegersMod(6)),
        Category::laurent(&z, VarKind::Laurent),
        Category::laurent(&z, VarKind::Polynomial),
        Category::laurent(&RingDesc::finite_field(3).unwrap(), VarKind::NegPolynomial),
        Category::Laurent { base: f4.clone(), kind: VarKind::Laurent, twist: Some(RingAutomorphism::Frobenius { power: 1 }) },
        Category::Laurent { base: z.laurent("s"), kind: VarKind::Laurent, twist: Some(RingAutomorphism::VarInvert) },
        Category::Idem(z.clone()),
        Category::Interval(Box::new(Category::laurent(&z, VarKind::Laurent))),
    ]
}

fn laurent(m: Morphism) -> LaurentMorphism {
    match m {
        Morphism::Laurent(l) => l,
        other => panic!("expected a Laurent morphism, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn category_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for cat in categories() {
            let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=3)).collect();
            let f = cat.random_morphism(&mut rng, dims[0], dims[1], 2);
            let mut g = cat.random_morphism(&mut rng, dims[1], dims[2], 2);
            let mut h = cat.random_morphism(&mut rng, dims[2], dims[3], 2);
            // interval morphisms must chain through matching objects
            if let (Morphism::Interval { to, .. }, Morphism::Interval { from, .. }) = (&f, &mut g) { *from = *to; }
            if let (Morphism::Interval { to, .. }, Morphism::Interval { from, .. }) = (&g.clone(), &mut h) { *from = *to; }
            prop_assert!(cat.contains(&f) && cat.contains(&g) && cat.contains(&h));
            let hg_f = cat.compose(&cat.compose(&h, &g).unwrap(), &f).unwrap();
            let h_gf = cat.compose(&h, &cat.compose(&g, &f).unwrap()).unwrap();
            prop_assert_eq!(hg_f, h_gf, "associativity in {:?}", cat);
            let id_d = cat.identity(&cat.domain(&f)).unwrap();
            let id_c = cat.identity(&cat.codomain(&f)).unwrap();
            prop_assert_eq!(cat.compose(&f, &id_d).unwrap(), f.clone());
            prop_assert_eq!(cat.compose(&id_c, &f).unwrap(), f.clone());
        }
    }

    #[test]
    fn convolution_bilinear_and_support(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f9 = RingDesc::finite_field(9).unwrap();
        let cases = [
            (RingDesc::Integers, None),
            (f9.clone(), Some(RingAutomorphism::Frobenius { power: 1 })),
        ];
        for (r, twist) in cases {
            let cat = Category::Laurent { base: r.clone(), kind: VarKind::Laurent, twist: twist.clone() };
            let f1 = laurent(cat.random_morphism(&mut rng, 2, 2, 3));
            let f2 = laurent(cat.random_morphism(&mut rng, 2, 2, 3));
            let g = laurent(cat.random_morphism(&mut rng, 2, 2, 3));
            let tw = twist.as_ref();
            let lhs = laurent_compose(&r, &g, &f1.add(&r, &f2).unwrap(), tw).unwrap();
            let rhs = laurent_compose(&r, &g, &f1, tw).unwrap().add(&r, &laurent_compose(&r, &g, &f2, tw).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs = laurent_compose(&r, &f1.add(&r, &f2).unwrap(), &g, tw).unwrap();
            let rhs = laurent_compose(&r, &f1, &g, tw).unwrap().add(&r, &laurent_compose(&r, &f2, &g, tw).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let gf = laurent_compose(&r, &g, &f1, tw).unwrap();
            for k in gf.support() {
                prop_assert!(g.support().iter().any(|j| f1.support().contains(&(k - j))));
            }
        }
    }

    #[test]
    fn functor_identities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in [RingDesc::Integers, RingDesc::finite_field(8).unwrap(), RingDesc::IntegersMod(4)] {
            let mat = Category::Mat(r.clone());
            let ip = build_functor(FunctorKind::IPlus, &mat, None).unwrap();
            let im = build_functor(FunctorKind::IMinus, &mat, None).unwrap();
            let i0 = build_functor(FunctorKind::I0, &mat, None).unwrap();
            let jp = build_functor(FunctorKind::JPlus, &ip.target, None).unwrap();
            let jm = build_functor(FunctorKind::JMinus, &im.target, None).unwrap();
            let evp = build_functor(FunctorKind::Ev0Plus, &ip.target, None).unwrap();
            let evm = build_functor(FunctorKind::Ev0Minus, &im.target, None).unwrap();
            let (m, n, l) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
            let f = mat.random_morphism(&mut rng, m, n, 0);
            let g = mat.random_morphism(&mut rng, n, l, 0);
            prop_assert_eq!(evp.apply(&ip.apply(&f).unwrap()).unwrap(), f.clone());
            prop_assert_eq!(evm.apply(&im.apply(&f).unwrap()).unwrap(), f.clone());
            let a = i0.apply(&f).unwrap();
            prop_assert_eq!(jp.apply(&ip.apply(&f).unwrap()).unwrap(), a.clone());
            prop_assert_eq!(jm.apply(&im.apply(&f).unwrap()).unwrap(), a);
            // composition, identities and biproducts are preserved
            for func in [&ip, &im, &i0] {
                let gf = mat.compose(&g, &f).unwrap();
                let lhs = func.apply(&gf).unwrap();
                let rhs = func.target.compose(&func.apply(&g).unwrap(), &func.apply(&f).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                let id = mat.identity(&mat.domain(&f)).unwrap();
                prop_assert_eq!(func.apply(&id).unwrap(), func.target.identity(&func.apply_object(&mat.domain(&f)).unwrap()).unwrap());
                let fg = mat.biproduct(&f, &g).unwrap();
                let lhs = func.apply(&fg).unwrap();
                let rhs = func.target.biproduct(&func.apply(&f).unwrap(), &func.apply(&g).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
            let poly = ip.target.clone();
            let p = poly.random_morphism(&mut rng, m, n, 3);
            let q = poly.random_morphism(&mut rng, n, l, 3);
            let lhs = evp.apply(&poly.compose(&q, &p).unwrap()).unwrap();
            let rhs = mat.compose(&evp.apply(&q).unwrap(), &evp.apply(&p).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn identity_twist_is_untwisted(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in [RingDesc::Integers, RingDesc::finite_field(9).unwrap()] {
            let plain = Category::laurent(&r, VarKind::Laurent);
            let twisted = Category::Laurent { base: r.clone(), kind: VarKind::Laurent, twist: Some(RingAutomorphism::Identity) };
            let f = plain.random_morphism(&mut rng, 2, 3, 2);
            let g = plain.random_morphism(&mut rng, 3, 2, 2);
            prop_assert!(twisted.contains(&f) && twisted.contains(&g));
            prop_assert_eq!(plain.compose(&g, &f).unwrap(), twisted.compose(&g, &f).unwrap());
        }
    }

    #[test]
    fn accepted_nil_objects_vanish(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f4 = RingDesc::finite_field(4).unwrap();
        let phi = RingAutomorphism::Frobenius { power: 1 };
        for (r, twist) in [(RingDesc::Integers, None), (f4.clone(), Some(phi.clone())), (RingDesc::IntegersMod(8), None)] {
            // strictly upper triangular matrices and random matrices both go through the constructor
            let mut nu = RMatrix::zeros(&r, n, n);
            let dense = rng.gen_bool(0.3);
            for i in 0..n {
                for j in 0..n {
                    if dense || j > i {
                        nu.set(i, j, r.random(&mut rng, 3, 0));
                    }
                }
            }
            if let Ok(nil) = NilObject::new(&r, twist.clone(), nu.clone(), None) {
                prop_assert!(twisted_power(&r, twist.as_ref(), &nil.nu, nil.witness).is_zero(&r));
            } else {
                prop_assert!(dense);
            }
        }
    }
}

#[test]
fn laurent_equivalence_over_f2_exhaustive() {
    let report = matcat_laurent_equiv_check(&RingDesc::finite_field(2).unwrap(), 2);
    assert!(report.passed(), "{:?}", report.failures);
    assert!(report.morphisms_checked >= 4096);
}

#[test]
fn laurent_equivalence_over_integers_sampled() {
    let report = matcat_laurent_equiv_check(&RingDesc::Integers, 2);
    assert!(report.passed(), "{:?}", report.failures);
}
