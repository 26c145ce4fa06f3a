use g2loop::grassmannian::GrassmannPoint;
use g2loop::laurent::LoopMatrix;
use g2loop::lattice::*;
use g2loop::linalg::Mat;
use g2loop::octonion::{root_vectors, DIM};
use g2loop::sampling::{random_unstable_point, DEFAULT_SIGMA};
use g2loop::{Cyclo8, Scalar, Tol};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn tol() -> Tol {
    Tol::default()
}

fn xi(k: i64, l: i64) -> ChainElement {
    LatticeElement::new(k, l).unwrap().chain()
}

fn circle(n: usize, offset: f64) -> Vec<C> {
    (0..n).map(|t| C::from_polar(1.0, 2.0 * std::f64::consts::PI * (t as f64 + offset) / n as f64)).collect()
}

#[test]
fn coordinates_and_eigenvalues() {
    let x = xi(3, 1);
    assert_eq!((x.h1, x.h2), (1, 1));
    let m = x.exponents();
    assert_eq!((m[1], m[2], m[6]), (3, 1, 2));
    assert_eq!((m[4], m[5], m[3], m[0]), (-3, -1, -2, 0));
    assert_eq!(x.kl(), (3, 1));
    assert!(LatticeElement::new(3, 2).is_err());
}

#[test]
fn kappa_values() {
    assert_eq!(kappa(&xi(3, 1)), 3);
    assert_eq!(kappa(&xi(0, 0)), 0);
    assert_eq!(kappa(&xi(2, 1)), 2);
    assert_eq!(kappa(&ChainElement { h1: 1, h2: -4 }), 3);
}

#[test]
fn first_homomorphism_is_a_three_term_loop() {
    let g = gamma_xi::<Cyclo8>(&xi(1, 0));
    let d = [4usize, 3];
    let dbar = [1usize, 6];
    let proj = |idx: &[usize]| {
        let mut m = Mat::<Cyclo8>::zeros(DIM, DIM);
        for &i in idx {
            m[(i, i)] = Cyclo8::from_i64(1);
        }
        m
    };
    let expected = LoopMatrix::from_terms([(-1, proj(&d)), (0, proj(&[0, 2, 5])), (1, proj(&dbar))]);
    assert_eq!(g, expected);
    let id = g.evaluate_at(&Cyclo8::from_i64(1));
    assert_eq!(id, Mat::identity(DIM));
    assert_eq!(gamma_xi::<Cyclo8>(&ChainElement::ZERO), LoopMatrix::identity());
    assert!(w_xi::<Cyclo8>(&ChainElement::ZERO, tol()).same_point(&GrassmannPoint::h_plus(tol())));
}

#[test]
fn conjugating_root_vectors() {
    let rv = root_vectors::<C>();
    for x in [xi(1, 0), xi(2, 1), xi(3, 1)] {
        let g = gamma_xi::<C>(&x);
        for r in &rv {
            let j = r.root.0 * x.h1 + r.root.1 * x.h2;
            for lam in circle(8, 0.3) {
                let gl = g.evaluate(lam, &tol()).unwrap();
                let gi = g.adjoint().evaluate(lam, &tol()).unwrap();
                let lhs = gl.matmul(&r.matrix).matmul(&gi);
                let rhs = r.matrix.scale(&lam.powi(j as i32));
                assert!(lhs.sub(&rhs).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn precedence_examples() {
    assert!(precedes(&xi(3, 1), &xi(2, 1)));
    assert!(precedes(&xi(3, 1), &xi(3, 1)));
    assert!(!precedes(&xi(1, 0), &xi(3, 1)));
    assert!(precedes(&xi(3, 1), &ChainElement::ZERO));
}

#[test]
fn precedence_is_a_preorder_on_the_chamber() {
    let grid: Vec<ChainElement> = (0..=6).flat_map(|k| (0..=k / 2).map(move |l| xi(k, l))).collect();
    for a in &grid {
        assert!(precedes(a, a));
        for b in &grid {
            for c in &grid {
                if precedes(a, b) && precedes(b, c) {
                    assert!(precedes(a, c), "{a:?} {b:?} {c:?}");
                }
            }
        }
    }
}

#[test]
fn u_xi_fixes_model_and_constant_translates() {
    let x = xi(3, 1);
    let w = w_xi::<Cyclo8>(&x, tol());
    assert_eq!(u_xi(&w, &x).unwrap(), w);
    let g = g2loop::octonion::random_g2_element(3);
    let wc = w_xi::<C>(&x, tol());
    let gw = wc.apply_constant(&g, &g.adjoint());
    assert!(u_xi(&gw, &x).unwrap().same_point(&gw));
}

#[test]
fn u_xi_reads_psi_at_zero() {
    for (k, l) in [(1, 0), (2, 1), (3, 1)] {
        let x = xi(k, l);
        for seed in 0..3 {
            let rp = random_unstable_point(&x, seed, DEFAULT_SIGMA, tol());
            let u = u_xi(&rp.point, &x).unwrap();
            let p0 = rp.psi.coeff(0);
            let expected = w_xi::<C>(&x, tol()).apply_constant(&p0, &p0.inverse(&tol()).unwrap());
            assert!(u.same_point(&expected));
            assert!(u_xi(&u, &x).unwrap().same_point(&u));
            assert_eq!(stratum_readout(&rp.point, 6).unwrap(), LatticeElement::new(k, l).unwrap());
        }
    }
}

#[test]
fn u_xi_rejects_other_strata() {
    let w = w_xi::<Cyclo8>(&xi(2, 1), tol());
    assert!(u_xi(&w, &xi(3, 1)).is_err());
    assert!(u_xi(&w, &xi(1, 0)).is_err());
}

#[test]
fn projected_loops_are_homomorphisms() {
    let x = xi(3, 1);
    let rp = random_unstable_point(&x, 11, DEFAULT_SIGMA, tol());
    let g = u_xi(&rp.point, &x).unwrap().extract_loop().unwrap();
    for a in circle(8, 0.1) {
        for b in circle(8, 0.37) {
            let lhs = g.evaluate(a * b, &tol()).unwrap();
            let rhs = g.evaluate(a, &tol()).unwrap().matmul(&g.evaluate(b, &tol()).unwrap());
            assert!(lhs.sub(&rhs).norm() < 1e-8);
        }
    }
}

#[test]
fn morphism_examples() {
    let (x, y) = (xi(3, 1), xi(2, 1));
    let id = LoopMatrix::<Cyclo8>::identity();
    assert_eq!(morphism_with_psi(&id, &x, &y, tol()).unwrap(), w_xi(&y, tol()));
    let rp = random_unstable_point(&x, 2, DEFAULT_SIGMA, tol());
    let h = morphism_with_psi(&rp.psi, &x, &ChainElement::ZERO, tol()).unwrap();
    assert!(h.same_point(&GrassmannPoint::h_plus(tol())));
    assert!(morphism_with_psi(&rp.psi, &xi(1, 0), &x, tol()).is_err());
    let singular = LoopMatrix::<C>::from_terms([(1, Mat::identity(DIM))]);
    assert!(morphism_with_psi(&singular, &x, &y, tol()).is_err());
}

proptest! {
    #[test]
    fn homomorphisms_multiply(a in -3i64..4, b in -3i64..4, c in -3i64..4, d in -3i64..4) {
        let (x, y) = (ChainElement { h1: a, h2: b }, ChainElement { h1: c, h2: d });
        let lhs = gamma_xi::<Cyclo8>(&x.add(&y));
        let rhs = gamma_xi::<Cyclo8>(&x).mul(&gamma_xi(&y));
        prop_assert_eq!(lhs, rhs);
    }
}
