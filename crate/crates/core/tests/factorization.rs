use g2loop::factorization::*;
use g2loop::grassmannian::GrassmannPoint;
use g2loop::lattice::{gamma_xi, morphism_with_psi, precedes, w_xi, ChainElement, LatticeElement};
use g2loop::sampling::{random_unstable_point, ExtendedFamily, DEFAULT_SIGMA};
use g2loop::{Cyclo8, Error, Tol};
use num_complex::Complex64 as C;

type E = Cyclo8;

fn tol() -> Tol {
    Tol::default()
}

fn le(k: i64, l: i64) -> LatticeElement {
    LatticeElement::new(k, l).unwrap()
}

#[test]
fn chain_examples() {
    let kl = |x: &LatticeElement| (x.k, x.l);
    let c: Vec<_> = canonical_chain(&le(3, 1)).iter().map(kl).collect();
    assert_eq!(c, vec![(3, 1), (2, 1), (1, 0), (0, 0)]);
    let c: Vec<_> = canonical_chain(&le(1, 0)).iter().map(kl).collect();
    assert_eq!(c, vec![(1, 0), (0, 0)]);
    let c: Vec<_> = canonical_chain(&le(6, 3)).iter().map(kl).collect();
    assert_eq!(c, vec![(6, 3), (4, 2), (2, 1), (0, 0)]);
    assert_eq!(canonical_chain(&LatticeElement::ZERO).len(), 1);
}

#[test]
fn chains_are_dominated() {
    for k in 1..=7 {
        for l in 0..=k / 2 {
            let xi = le(k, l);
            let chain = canonical_chain(&xi);
            let expected_len = if 2 * l == k { l + 1 } else { k + 1 };
            assert_eq!(chain.len() as i64, expected_len);
            assert_eq!(chain.last(), Some(&LatticeElement::ZERO));
            for x in &chain {
                assert!(precedes(&xi.chain(), &x.chain()), "({k},{l}) -> {x}");
            }
        }
    }
}

#[test]
fn model_chains_are_model_points() {
    for (k, l) in [(1, 0), (2, 1), (3, 1), (3, 0), (4, 1), (4, 2), (5, 2), (5, 1), (6, 3)] {
        let xi = le(k, l);
        let subs = canonical_subspaces(&w_xi::<E>(&xi.chain(), tol()), &xi).unwrap();
        for (w, x) in subs.iter().zip(canonical_chain(&xi)) {
            assert_eq!(*w, w_xi::<E>(&x.chain(), tol()), "({k},{l}) stage {x}");
        }
    }
}

#[test]
fn the_two_middle_formulas_agree() {
    for (k, l) in [(3, 1), (5, 1), (5, 2)] {
        let (ki, li) = (k as i32, l as i32);
        let i = ki - 2 * li;
        let first = IntersectionFormula::new(vec![(i, -ki), (0, -li), (-i, li + i)], None);
        let second = IntersectionFormula::new(
            vec![(ki - 2 * li, -ki), (0, -li), (0, 0), (-ki + 2 * li, ki - li)],
            Some(2 * li),
        );
        let w = random_unstable_point(&le(k, l).chain(), 4, DEFAULT_SIGMA, tol()).point;
        assert!(first.apply(&w).same_point(&second.apply(&w)));
    }
}

#[test]
fn explicit_stages_of_the_first_case() {
    let xi = le(3, 1);
    let w = random_unstable_point(&xi.chain(), 9, DEFAULT_SIGMA, tol()).point;
    let subs = canonical_subspaces(&w, &xi).unwrap();
    let w2 = IntersectionFormula::new(vec![(1, -3), (0, -1), (-1, 2)], None).apply(&w);
    let w1 = IntersectionFormula::new(vec![(1, -2), (-1, 1)], Some(1)).apply(&w);
    assert!(subs[1].same_point(&w2));
    assert!(subs[2].same_point(&w1));
    assert!(subs[3].same_point(&GrassmannPoint::h_plus(tol())));
}

#[test]
fn stages_match_known_psi() {
    for (k, l) in [(3, 1), (4, 1), (5, 2), (3, 0), (4, 2)] {
        let xi = le(k, l);
        let rp = random_unstable_point(&xi.chain(), 17, DEFAULT_SIGMA, tol());
        let subs = canonical_subspaces(&rp.point, &xi).unwrap();
        for (w, x) in subs.iter().zip(canonical_chain(&xi)) {
            let expected = morphism_with_psi(&rp.psi, &xi.chain(), &x.chain(), tol()).unwrap();
            assert!(w.same_point(&expected), "({k},{l}) stage {x}");
        }
    }
}

#[test]
fn model_factors_are_homomorphism_quotients() {
    let xi = le(3, 1);
    let f = factors(&w_xi::<E>(&xi.chain(), tol()), &xi).unwrap();
    assert_eq!(f.type_vector, vec![1, 1, 1]);
    let chain = canonical_chain(&xi);
    for i in 1..=3 {
        let (prev, cur) = (chain[3 - i + 1].chain(), chain[3 - i].chain());
        let expected = gamma_xi::<E>(&ChainElement::ZERO.sub(&prev)).mul(&gamma_xi(&cur));
        assert_eq!(f.factors[i - 1], expected);
        assert_eq!(f.factors[i - 1].support(), Some((-1, 1)));
    }
    assert_eq!(f.product(), gamma_xi(&xi.chain()));
}

#[test]
fn trivial_factorization() {
    let f = factors(&GrassmannPoint::<E>::h_plus(tol()), &LatticeElement::ZERO).unwrap();
    assert_eq!(f.length(), 0);
    assert!(f.type_vector.is_empty());
}

#[test]
fn random_factorizations() {
    for (k, l, types) in [(3, 1, vec![1, 1, 1]), (4, 2, vec![2, 2]), (3, 0, vec![1, 1, 1]), (5, 2, vec![1; 5])] {
        let xi = le(k, l);
        let w = random_unstable_point(&xi.chain(), 23, DEFAULT_SIGMA, tol()).point;
        let f = factors(&w, &xi).unwrap();
        assert_eq!(f.type_vector, types);
        let gamma = w.extract_loop().unwrap();
        assert!(f.product_residual(&gamma, 16, &tol()).unwrap() < 1e-8);
        assert!(f.support_excess() < 1e-8);
        assert!(f.min_extreme_coefficient() > 1e-6);
    }
}

#[test]
fn points_outside_the_stratum_are_rejected() {
    let w = w_xi::<E>(&le(2, 1).chain(), tol());
    assert!(matches!(canonical_subspaces(&w, &le(3, 1)), Err(Error::StageMembership { .. })));
}

#[test]
fn normalizing_model_points() {
    for (k, l, n) in [(5, 2, (3, 1)), (3, 0, (1, 0)), (4, 2, (2, 1)), (3, 1, (3, 1))] {
        let xi = le(k, l);
        let r = normalize(&w_xi::<E>(&xi.chain(), tol()), &xi).unwrap();
        assert_eq!((r.xi_n.k, r.xi_n.l), n);
        let diff = xi.chain().sub(&r.xi_n.chain());
        assert_eq!(r.gamma, gamma_xi::<E>(&ChainElement::ZERO.sub(&diff)));
        assert_eq!(r.w_n, w_xi::<E>(&r.xi_n.chain(), tol()));
    }
}

fn family(xi: &LatticeElement, seed: u64) -> Vec<GrassmannPoint<C>> {
    let fam = ExtendedFamily::random(&xi.chain(), seed, DEFAULT_SIGMA);
    [C::new(0.0, 0.0), C::new(0.7, -0.2), C::new(-0.4, 0.9), C::new(1.3, 0.5)]
        .iter()
        .map(|&z| fam.at(z, tol()).point)
        .collect()
}

#[test]
fn normalizing_extended_families() {
    for (k, l, b) in [(5, 2, 3), (4, 2, 2), (3, 0, 1)] {
        let xi = le(k, l);
        for seed in 0..3 {
            let (results, var) = normalize_family(&family(&xi, seed), &xi, 1e-9).unwrap();
            assert!(var < 1e-9);
            for r in &results {
                assert_eq!(r.bound, b);
                assert!(r.w_n.is_in_gr_g2().verdict);
                assert!(r.w_n.contains_point(&GrassmannPoint::power(b as i32, tol())));
                assert!(GrassmannPoint::power(-(b as i32), tol()).contains_point(&r.w_n));
            }
        }
    }
}

#[test]
fn normalized_first_case_factors_in_three_steps() {
    let xi = le(5, 2);
    let w = family(&xi, 5)[1].clone();
    let r = normalize(&w, &xi).unwrap();
    let f = factors(&r.w_n, &r.xi_n).unwrap();
    assert_eq!(f.type_vector, vec![1, 1, 1]);
    let gamma = r.w_n.extract_loop().unwrap();
    assert!(f.product_residual(&gamma, 16, &tol()).unwrap() < 1e-8);
}

#[test]
fn generic_families_are_not_normalized_by_a_fixed_loop() {
    let xi = le(5, 2);
    let pts: Vec<_> = (0..3).map(|s| random_unstable_point(&xi.chain(), s, DEFAULT_SIGMA, tol()).point).collect();
    assert!(matches!(normalize_family(&pts, &xi, 1e-9), Err(Error::NotConstant(_))));
}
