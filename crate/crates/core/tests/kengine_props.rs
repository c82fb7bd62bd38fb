use kwb_core::kengine::{
    induced_k_map, k0, k1, matrix_k1_reduce, random_elementary_product, unit_class, Flavor,
};
use kwb_core::rings::{Elem, RMatrix, RingDesc, RingHom, Structural};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reducible_rings() -> Vec<RingDesc> {
    let f4 = RingDesc::finite_field(4).unwrap();
    vec![
        RingDesc::Integers,
        RingDesc::IntegersMod(8),
        RingDesc::IntegersMod(12),
        f4.clone(),
        f4.polynomial("t"),
        RingDesc::finite_field(3).unwrap().neg_polynomial("t"),
        RingDesc::finite_field(5).unwrap().laurent("t"),
        RingDesc::IntegersMod(6).laurent("t"),
        RingDesc::Integers.laurent("t"),
        RingDesc::Integers.polynomial("t"),
    ]
}

fn random_unit<R: Rng>(ring: &RingDesc, rng: &mut R) -> Elem {
    // c·tⁿ with c a unit of the ground ring is a unit in every ring here
    let base = ring.extension().map_or(ring.clone(), |e| e.base.clone());
    loop {
        let c = base.random(rng, 1, 0);
        if !base.is_unit(&c).unwrap() {
            continue;
        }
        return match ring.extension() {
            Some(e) if e.kind == kwb_core::rings::VarKind::Laurent => ring.monomial(c, rng.gen_range(-3..=3)).unwrap(),
            Some(_) => ring.monomial(c, 0).unwrap(),
            None => c,
        };
    }
}

/// `E · diag(u, 1, …) · E'` for random elementary products `E`, `E'`.
fn random_invertible<R: Rng>(ring: &RingDesc, n: usize, rng: &mut R) -> (RMatrix, Elem) {
    let u = random_unit(ring, rng);
    let mut d = RMatrix::identity(ring, n);
    d.set(rng.gen_range(0..n), rng.gen_range(0..n).min(n - 1), ring.one());
    let k = rng.gen_range(0..n);
    d.set(k, k, u.clone());
    let a = random_elementary_product(ring, n, 3, rng);
    let b = random_elementary_product(ring, n, 3, rng);
    (a.mul(ring, &d).mul(ring, &b), u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_replays_to_determinant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in reducible_rings() {
            let n = rng.gen_range(1..=3);
            let (m, _) = random_invertible(&r, n, &mut rng);
            let red = matrix_k1_reduce(&r, &m).unwrap();
            prop_assert!(red.verify(&r, &m), "{}: log does not replay", r);
            prop_assert_eq!(&red.unit, &m.determinant(&r), "{}", r);
        }
    }

    #[test]
    fn conjugate_matrices_have_the_same_class(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in reducible_rings() {
            let (m, _) = random_invertible(&r, 2, &mut rng);
            // g = E₀₁(a)·E₁₀(b), g⁻¹ = E₁₀(−b)·E₀₁(−a)
            let (a, b) = (r.random(&mut rng, 3, 1), r.random(&mut rng, 3, 1));
            let mut g = RMatrix::identity(&r, 2);
            g.add_row_multiple(&r, 1, 0, &b);
            g.add_row_multiple(&r, 0, 1, &a);
            let mut gi = RMatrix::identity(&r, 2);
            gi.add_row_multiple(&r, 0, 1, &r.neg(&a));
            gi.add_row_multiple(&r, 1, 0, &r.neg(&b));
            prop_assert!(g.mul(&r, &gi).is_identity(&r));
            let conj = g.mul(&r, &m).mul(&r, &gi);
            let a = matrix_k1_reduce(&r, &m).unwrap().unit;
            let b = matrix_k1_reduce(&r, &conj).unwrap().unit;
            prop_assert_eq!(unit_class(&r, &a).unwrap(), unit_class(&r, &b).unwrap());
        }
    }
}

#[test]
fn evaluation_splits_inclusion() {
    let bases = [
        RingDesc::Integers,
        RingDesc::finite_field(2).unwrap(),
        RingDesc::finite_field(9).unwrap(),
        RingDesc::IntegersMod(7),
    ];
    for base in bases {
        for (inc, ev) in [(Structural::IPlus, Structural::Ev0Plus), (Structural::IMinus, Structural::Ev0Minus)] {
            for degree in [0, 1] {
                let i = induced_k_map(&RingHom::structural(inc, &base, "t"), degree, Flavor::IdempotentComplete).unwrap();
                let e = induced_k_map(&RingHom::structural(ev, &base, "t"), degree, Flavor::IdempotentComplete).unwrap();
                let comp = e.compose(&i).unwrap();
                assert!(comp.equals(&kwb_core::abgroup::GroupHom::identity(i.domain())), "{base} degree {degree}");
            }
        }
    }
}

#[test]
fn k0_of_inclusion_is_an_isomorphism() {
    let bases = [
        RingDesc::Integers,
        RingDesc::finite_field(4).unwrap(),
        RingDesc::IntegersMod(9),
        RingDesc::IntegersMod(6),
        RingDesc::IntegersMod(1),
    ];
    for base in bases {
        for flavor in [Flavor::Free, Flavor::IdempotentComplete] {
            for kind in [Structural::IPlus, Structural::IMinus] {
                let h = RingHom::structural(kind, &base, "t");
                assert!(induced_k_map(&h, 0, flavor).unwrap().is_isomorphism(), "{base} {flavor:?}");
            }
        }
    }
}

#[test]
fn unit_groups_of_finite_fields() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
        let f = RingDesc::finite_field(q).unwrap();
        let g = k1(&f).unwrap().group;
        assert_eq!(g.order(), Some((q - 1).into()));
        assert_eq!(k0(&f, Flavor::Free).unwrap().group.free_rank(), 1);
        let l = k1(&f.laurent("t")).unwrap();
        assert_eq!(l.group.free_rank(), 1);
        assert!(l.sk1_witness.unwrap().complete());
    }
}
