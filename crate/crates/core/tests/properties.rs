use hgc_verify::arith::{CycloField, FiniteSpec, FiniteTower, Scalar, SymbolicTower, Tower};
use hgc_verify::function_field::{Automorphism, Curve, CurveFunction, FieldHandle};
use hgc_verify::quotients::{cyclic_cover_genus, hyperelliptic_classification, SuperellipticModel};
use num_integer::gcd;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finite(n: usize, seed: u64) -> FiniteTower {
    FiniteTower::new(n, &FiniteSpec::from_seed(FiniteSpec::default_prime(n, 1000), seed)).unwrap()
}

fn check_field<S: Scalar>(a: S, b: S, c: S) {
    assert_eq!(a.add(&b.add(&c)), a.add(&b).add(&c));
    assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
    assert_eq!(a.add(&b), b.add(&a));
    assert_eq!(a.mul(&b), b.mul(&a));
    assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    assert!(a.sub(&a).is_zero());
    if !a.is_zero() {
        assert!(a.mul(&a.inv().unwrap()).is_one());
        assert_eq!(a.mul(&b).div(&a).unwrap(), b);
    }
}

fn random_function<T: Tower>(c: &Curve<T>, rng: &mut ChaCha8Rng) -> CurveFunction<T> {
    let mut f = c.zero();
    while f.is_zero() {
        for _ in 0..2 {
            let (m, k) = (rng.gen_range(-1i64..=2), rng.gen_range(-1i64..=2));
            f = f.add(&c.monomial(m, k).unwrap().scale(&c.tower().random(rng)));
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cyclotomic_field_axioms(n in prop::sample::select(vec![3usize, 4, 5, 6]), v in prop::collection::vec(-9i64..9, 9)) {
        let k = CycloField::new(n);
        let e = |i: usize| k.int(v[i]).add(&k.zeta_pow(v[i + 1]).mul(&k.int(v[i + 2])));
        check_field(e(0), e(3), e(6));
    }

    #[test]
    fn tower_field_axioms(n in 2usize..6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = SymbolicTower::new(n);
        check_field(t.random(&mut rng), t.random(&mut rng), t.random(&mut rng));
        let f = finite(n, seed % 7);
        check_field(f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
    }

    #[test]
    fn automorphisms_are_ring_maps(seed: u64, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Curve::new(finite(3, 1));
        let sigma = [Automorphism::Group(1, 0), Automorphism::Group(0, 1), Automorphism::Alpha, Automorphism::Swap][which].clone();
        let (f, g) = (random_function(&c, &mut rng), random_function(&c, &mut rng));
        let ap = |h: &CurveFunction<_>| c.apply(&sigma, h).unwrap();
        prop_assert_eq!(ap(&f.mul(&g)), ap(&f).mul(&ap(&g)));
        prop_assert_eq!(ap(&f.add(&g)), ap(&f).add(&ap(&g)));
        prop_assert_eq!(c.apply(&sigma.inverse(), &ap(&f)).unwrap(), f);
    }

    #[test]
    fn valuations_transport_along_automorphisms(seed: u64, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Curve::new(finite(3, 2));
        let sigma = [Automorphism::Group(1, 0), Automorphism::Group(0, 1), Automorphism::Alpha, Automorphism::Swap][which].clone();
        let f = random_function(&c, &mut rng);
        let g = c.apply(&sigma, &f).unwrap();
        for p in c.cusps() {
            prop_assert_eq!(c.ord_at(&g, &p).unwrap(), c.ord_at(&f, &c.act(&sigma, &p).unwrap()).unwrap());
        }
    }

    #[test]
    fn genus_is_an_isomorphism_invariant(n in 2i64..=7, a in 1i64..7, b in 1i64..7, j in 1i64..7) {
        prop_assume!(a < n && b < n && j < n && gcd(j, n) == 1);
        let g = cyclic_cover_genus(&SuperellipticModel::quotient(n, a, b)).ok();
        prop_assert_eq!(g, cyclic_cover_genus(&SuperellipticModel::quotient(n, a * j % n, b * j % n)).ok());
        prop_assert_eq!(g, cyclic_cover_genus(&SuperellipticModel::quotient(n, b, a)).ok());
    }

    #[test]
    fn genus_two_quotients_are_classified_hyperelliptic(n in 2i64..=12, a in 1i64..12, b in 1i64..12) {
        prop_assume!(a < n && b < n);
        if let (Ok(2), Ok(h)) = (cyclic_cover_genus(&SuperellipticModel::quotient(n, a, b)), hyperelliptic_classification(n, a, b)) {
            prop_assert!(h);
        }
    }
}
