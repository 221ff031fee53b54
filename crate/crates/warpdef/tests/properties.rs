use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use warpdef::deform::{
    check_additivity, deform_momentum, deform_operator, free_hamiltonian, DeformationSpec,
};
use warpdef::gauge::{extract_gauge_field, field_strength};
use warpdef::models::catalog;
use warpdef::opalg::scalar::{c_i, rat};
use warpdef::opalg::{
    adjoint, commutator, coord_equals, equals, from_json, multiply, parse, to_json, CoordFunction, DeformationMatrix,
    OperatorExpr, Scalar,
};
use warpdef::verify::{catalog_generators, random_expr, random_skew};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_spec(r: &mut ChaCha8Rng, which: usize) -> DeformationSpec {
    let gens = catalog_generators();
    DeformationSpec::new(random_skew(r), gens[which % gens.len()].clone())
}

fn random_coord(r: &mut ChaCha8Rng) -> CoordFunction {
    let a = random_expr(r, 4);
    let mut f = CoordFunction::zero();
    for (_, c) in a.terms() {
        f.add_assign_ref(c);
    }
    f
}

fn small_rational() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Scalar::from_rational(rat(n, d)))
}

#[test]
fn canonical_commutation_relations() {
    for i in 0..3 {
        for j in 0..3 {
            let x = OperatorExpr::coordinate(i);
            let p = OperatorExpr::momentum(j);
            assert!(commutator(&x, &OperatorExpr::coordinate(j)).is_zero());
            assert!(commutator(&p, &OperatorExpr::momentum(i)).is_zero());
            let expected = if i == j { OperatorExpr::scalar(Scalar::i()) } else { OperatorExpr::zero() };
            assert_eq!(commutator(&x, &p), expected, "[X{}, P{}]", i + 1, j + 1);
        }
    }
}

#[test]
fn deformed_free_hamiltonian_is_self_adjoint() {
    let h0 = free_hamiltonian();
    for preset in catalog() {
        for spec in &preset.specs {
            let h = deform_operator(&h0, spec).unwrap();
            assert!(equals(&adjoint(&h), &h), "{}", preset.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn associativity_and_distributivity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_expr(&mut r, 3), random_expr(&mut r, 3), random_expr(&mut r, 3));
        let ab = multiply(&a, &b);
        prop_assert!(equals(&multiply(&ab, &c), &multiply(&a, &multiply(&b, &c))));
        prop_assert!(equals(&multiply(&a, &(&b + &c)), &(&ab + &multiply(&a, &c))));
        prop_assert!(equals(&multiply(&(&a + &b), &c), &(&multiply(&a, &c) + &multiply(&b, &c))));
    }

    #[test]
    fn commutator_is_bilinear(seed in any::<u64>(), lambda in small_rational()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_expr(&mut r, 3), random_expr(&mut r, 3), random_expr(&mut r, 3));
        let left = commutator(&(&a.scale(&lambda) + &b), &c);
        let split = &commutator(&a, &c).scale(&lambda) + &commutator(&b, &c);
        prop_assert!(equals(&left, &split));
        prop_assert!((&commutator(&a, &b) + &commutator(&b, &a)).is_zero());
    }

    #[test]
    fn jacobi_identity_is_exactly_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_expr(&mut r, 3), random_expr(&mut r, 3), random_expr(&mut r, 3));
        let sum = &(&commutator(&a, &commutator(&b, &c)) + &commutator(&b, &commutator(&c, &a)))
            + &commutator(&c, &commutator(&a, &b));
        prop_assert!(sum.is_zero(), "{}", sum);
    }

    #[test]
    fn adjoint_is_an_anti_multiplicative_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_expr(&mut r, 3), random_expr(&mut r, 3));
        prop_assert!(equals(&adjoint(&adjoint(&a)), &a));
        prop_assert!(equals(&adjoint(&multiply(&a, &b)), &multiply(&adjoint(&b), &adjoint(&a))));
    }

    #[test]
    fn partial_derivatives_commute(seed in any::<u64>(), i in 0usize..3, j in 0usize..3) {
        let f = random_coord(&mut rng(seed));
        let ij = f.partial_derivative(i).partial_derivative(j);
        let ji = f.partial_derivative(j).partial_derivative(i);
        prop_assert!(coord_equals(&ij, &ji));
    }

    #[test]
    fn text_and_json_round_trip(seed in any::<u64>()) {
        let a = random_expr(&mut rng(seed), 4);
        let text = a.to_string();
        let back = parse(&text).unwrap();
        prop_assert!(equals(&back, &a), "{}", text);
        prop_assert_eq!(from_json(&to_json(&a)).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn deformation_is_linear(seed in any::<u64>(), which in 0usize..5, lambda in small_rational()) {
        let mut r = rng(seed);
        let spec = random_spec(&mut r, which);
        let (a, b) = (random_expr(&mut r, 2), random_expr(&mut r, 2));
        let whole = deform_operator(&(&a.scale(&lambda) + &b), &spec).unwrap();
        let parts = &deform_operator(&a, &spec).unwrap().scale(&lambda) + &deform_operator(&b, &spec).unwrap();
        prop_assert!(equals(&whole, &parts));
    }

    #[test]
    fn zero_matrix_is_the_identity_map(seed in any::<u64>(), which in 0usize..5) {
        let a = random_expr(&mut rng(seed), 4);
        let spec = DeformationSpec::new(DeformationMatrix::zero(), catalog_generators()[which].clone());
        prop_assert!(equals(&deform_operator(&a, &spec).unwrap(), &a));
    }

    #[test]
    fn deformations_compose_additively(seed in any::<u64>(), which in 0usize..5) {
        let mut r = rng(seed);
        let s1 = random_spec(&mut r, which);
        let s2 = DeformationSpec::new(random_skew(&mut r), s1.generator.clone());
        let a = random_expr(&mut r, 2);
        prop_assert!(check_additivity(&a, &s1, &s2).unwrap());
        prop_assert!(check_additivity(&free_hamiltonian(), &s1, &s2).unwrap());
    }

    #[test]
    fn momenta_commute_exactly_where_the_field_vanishes(seed in any::<u64>(), which in 0usize..5) {
        let spec = random_spec(&mut rng(seed), which);
        let p = deform_momentum(&spec).unwrap();
        let f = field_strength(&spec, &Scalar::one()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let c = commutator(&p[i], &p[j]);
                prop_assert_eq!(equals(&c, &OperatorExpr::zero()), coord_equals(f.get(i, j), &CoordFunction::zero()));
            }
        }
    }

    #[test]
    fn momentum_commutator_is_the_field_strength(seed in any::<u64>(), which in 0usize..5) {
        // [P_i - gA_i, P_j - gA_j] = i g F_ij
        let mut r = rng(seed);
        let spec = random_spec(&mut r, which);
        let g = Scalar::from_rational(rat(-3, 2));
        let p = deform_momentum(&spec).unwrap();
        let f = field_strength(&spec, &g).unwrap();
        let factor = &Scalar::from_complex(c_i()) * &g;
        for i in 0..3 {
            for j in 0..3 {
                let expected = OperatorExpr::from_coord(f.get(i, j).scale(&factor));
                prop_assert!(equals(&commutator(&p[i], &p[j]), &expected));
            }
        }
    }

    #[test]
    fn field_strength_is_antisymmetric(seed in any::<u64>(), which in 0usize..5) {
        let spec = random_spec(&mut rng(seed), which);
        let f = field_strength(&spec, &Scalar::constant("e")).unwrap();
        prop_assert!(f.is_antisymmetric());
    }

    #[test]
    fn gauge_field_scales_with_the_matrix(seed in any::<u64>(), which in 0usize..5, lambda in small_rational()) {
        let spec = random_spec(&mut rng(seed), which);
        let scaled = DeformationSpec::new(spec.matrix.scale(&lambda), spec.generator.clone());
        let g = Scalar::constant("e");
        let a = extract_gauge_field(&spec, &g).unwrap();
        let b = extract_gauge_field(&scaled, &g).unwrap();
        for k in 0..3 {
            prop_assert!(coord_equals(&b.a[k], &a.a[k].scale(&lambda)));
        }
    }
}
