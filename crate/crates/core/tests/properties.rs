use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pellspace::associahedron::{arcs, crossing, dihedral_residues, triangulations, Arc};
use pellspace::binary_geometry::{interior_witness, jacobian_rank};
use pellspace::linalg::{IntVec, RatVec};
use pellspace::pellytope::{
    build_fan, build_m, build_u_equations, closed_form_minv, compatibility, pellytope_polynomial, trop_eval,
    Character, PellModel,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn model(d: usize) -> PellModel {
    PellModel::new(d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_exact(d in 1usize..=12) {
        let prod = build_m(d).unwrap().mat_mul(&closed_form_minv(d).unwrap()).unwrap();
        prop_assert!(prod.is_identity());
    }

    #[test]
    fn nonnegative_multiplicities_round_trip(d in 1usize..=5, seed in any::<u64>()) {
        let m = model(d);
        let n = m.num_vars();
        let lambda: Vec<i64> = (0..n).map(|k| ((seed >> (k % 60)) & 7) as i64).collect();
        let lambda = IntVec::from_i64s(&lambda);
        let chi = m.character_of(&lambda).unwrap();
        prop_assert!(m.is_bounded(&chi).unwrap());
        prop_assert_eq!(m.factor_character(&chi).unwrap(), lambda);
    }

    #[test]
    fn negative_image_is_unbounded(d in 1usize..=5, image in prop::collection::vec(-5i64..=5, 14), k in 0usize..14) {
        let m = model(d);
        let n = m.num_vars();
        let mut image = image[..n].to_vec();
        image[k % n] = -1 - image[k % n].abs();
        let chi = m.character_of(&IntVec::from_i64s(&image)).unwrap();
        prop_assert!(!m.is_bounded(&chi).unwrap());
        prop_assert!(m.factor_character(&chi).is_err());
    }

    #[test]
    fn tropicalization_is_additive_and_homogeneous(
        d in 1usize..=5,
        a in prop::collection::vec(-4i64..=4, 14),
        b in prop::collection::vec(-4i64..=4, 14),
        y in prop::collection::vec(-9i64..=9, 5),
        t in 1i64..=6,
    ) {
        let n = 3 * d - 1;
        let chi1 = Character::from_i64s(d, &a[..n]).unwrap();
        let chi2 = Character::from_i64s(d, &b[..n]).unwrap();
        let sum: Vec<i64> = a[..n].iter().zip(&b[..n]).map(|(x, y)| x + y).collect();
        let chi12 = Character::from_i64s(d, &sum).unwrap();
        let point = RatVec::from_i64s(&y[..d]);
        let scaled = RatVec::from_i64s(&y[..d].iter().map(|v| v * t).collect::<Vec<_>>());
        let lhs = trop_eval(&chi12, &point).unwrap();
        prop_assert_eq!(lhs, trop_eval(&chi1, &point).unwrap() + trop_eval(&chi2, &point).unwrap());
        prop_assert_eq!(
            trop_eval(&chi1, &scaled).unwrap(),
            trop_eval(&chi1, &point).unwrap() * BigRational::from_integer(t.into())
        );
    }

    #[test]
    fn interior_points_lie_in_open_cube(d in 1usize..=4, seed in any::<u64>()) {
        let m = model(d);
        let w = interior_witness(&m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(w.iter().all(|x| x > &BigRational::zero() && x < &BigRational::one()));
        prop_assert!(m.uequations().is_solution(w.entries()).unwrap());
        prop_assert_eq!(jacobian_rank(&m, &w).unwrap(), 2 * d - 1);
    }

    #[test]
    fn generators_evaluate_consistently(d in 1usize..=4, ys in prop::collection::vec((1i64..=50, 1i64..=20), 4)) {
        // u-monomials evaluated at y satisfy the u-equations
        let m = model(d);
        let y: Vec<BigRational> = ys[..d].iter().map(|&(n, k)| rat(n, k)).collect();
        let u: Vec<BigRational> = m.generators().iter().map(|g| g.eval(&y)).collect();
        prop_assert!(m.uequations().is_solution(&u).unwrap());
    }

    #[test]
    fn pellytope_polynomial_matches_factors(d in 1usize..=5, ys in prop::collection::vec((-20i64..=20, 1i64..=7), 5)) {
        let y: Vec<BigRational> = ys[..d].iter().map(|&(n, k)| rat(n, k)).collect();
        let one = BigRational::one();
        let mut expected = BigRational::one();
        for yi in &y {
            expected *= &one + yi;
        }
        for j in 0..d - 1 {
            expected *= &one + &y[j] + &y[j] * &y[j + 1];
        }
        prop_assert_eq!(pellytope_polynomial(d).unwrap().eval(&y), expected);
    }

    #[test]
    fn fan_covers_space(d in 1usize..=6, seed in any::<u64>()) {
        let fan = build_fan(d).unwrap();
        let hits = fan.check_completeness(20, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(hits <= 20);
    }

    #[test]
    fn dihedral_identities_hold(xs in prop::collection::btree_set(-60i64..=60, 4..=8), shift in 0usize..8) {
        let mut x: Vec<BigRational> = xs.into_iter().map(|v| BigRational::from_integer(v.into())).collect();
        let len = x.len();
        x.rotate_left(shift % len);
        for (arc, residue) in dihedral_residues(&x).unwrap() {
            prop_assert!(residue.is_zero(), "arc {}", arc);
        }
    }

    #[test]
    fn crossing_is_symmetric_and_irreflexive(n in 4usize..=10) {
        let all = arcs(n).unwrap();
        prop_assert_eq!(all.len(), n * (n - 3) / 2);
        for a in &all {
            prop_assert!(!crossing(a, a));
            for b in &all {
                prop_assert_eq!(crossing(a, b), crossing(b, a));
            }
        }
    }
}

#[test]
fn incompatibility_relations_agree_up_to_six() {
    for d in 2..=6 {
        let fan_non_edges = build_fan(d).unwrap().flag_complex().unwrap().non_edges().clone();
        assert_eq!(build_u_equations(d).unwrap().non_edges(), fan_non_edges);
        for (i, j) in fan_non_edges {
            assert!(!compatibility(i, j, d));
        }
    }
}

#[test]
fn stars_of_rays_drop_one_dimension() {
    for d in 2..=5 {
        let fan = build_fan(d).unwrap();
        for v in 0..fan.num_rays() {
            let star = fan.star(&[v]).unwrap();
            assert_eq!(star.fan.dim(), d - 1);
            assert_eq!(star.fan.num_maximal_cones(), fan.cones_containing(&[v]).len());
        }
    }
}

#[test]
fn triangulations_are_maximal_noncrossing_sets() {
    for n in 4..=8 {
        for t in triangulations(n).unwrap() {
            assert_eq!(t.len(), n - 3);
            for a in &t {
                for b in &t {
                    assert!(!crossing(a, b));
                }
            }
        }
    }
    let expected = Arc::new(1, 3, 4).unwrap();
    assert_eq!(triangulations(4).unwrap()[0], [expected]);
    assert_eq!(BigInt::from(triangulations(8).unwrap().len()), BigInt::from(132));
}
