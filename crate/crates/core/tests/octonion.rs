use g2loop::linalg::{Mat, Subspace};
use g2loop::octonion::*;
use g2loop::{Cyclo8, Scalar, Tol};
use num_complex::Complex64;
use proptest::prelude::*;

type E = Cyclo8;
type F = Complex64;

fn tol() -> Tol {
    Tol::default()
}

fn apply(g: &Mat<F>, v: &Vector7<F>) -> Vector7<F> {
    Vector7::from_slice(&g.apply(v.as_slice()))
}

#[test]
fn fano_lines_of_the_standard_product() {
    let lines = [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5)];
    for (i, j, k) in lines {
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            assert_eq!(standard_product(a - 1, b - 1), Some((1, c - 1)), "e{a}e{b}");
            assert_eq!(standard_product(b - 1, a - 1), Some((-1, c - 1)), "e{b}e{a}");
        }
    }
}

#[test]
fn torus_eigenvalues_in_weight_order() {
    let f = build_weight_frame::<E>().unwrap();
    let i = E::imag_unit();
    let h1 = [0, 2, 1, -1, -2, -1, 1];
    let h2 = [0, 1, 0, -1, -1, 0, 1];
    for a in 0..DIM {
        assert_eq!(f.h1[(a, a)], i.clone() * E::from_i64(h1[a]));
        assert_eq!(f.h2[(a, a)], i.clone() * E::from_i64(h2[a]));
    }
    assert_eq!(f.change.adjoint().matmul(&f.change), Mat::identity(DIM));
}

#[test]
fn phase_convention_of_weight_vectors() {
    let f = build_weight_frame::<E>().unwrap();
    for col in 0..DIM {
        let first = (0..DIM).map(|r| f.change[(r, col)].clone()).find(|v| !v.is_zero()).unwrap();
        let c = first.to_c64();
        assert!(c.re > 0.0 && c.im.abs() < 1e-15, "column {col}");
    }
}

#[test]
fn table_matches_weight_addition() {
    for i in 0..DIM {
        for j in 0..DIM {
            let (a, b) = (WEIGHTS[i], WEIGHTS[j]);
            let expected = if i == 0 && j == 0 { None } else { line_of_weight((a.0 + b.0, a.1 + b.1)) };
            assert_eq!(TABLE[i][j], expected, "cell ({i},{j})");
        }
    }
}

#[test]
fn product_pattern_matches_table_exactly() {
    for i in 0..DIM {
        for j in 0..DIM {
            let p = oct_product(&Vector7::<E>::unit(i), &Vector7::unit(j));
            let support: Vec<usize> = (0..DIM).filter(|&k| !p[k].is_zero()).collect();
            match TABLE[i][j] {
                Some(k) => assert_eq!(support, vec![k], "cell ({i},{j})"),
                None => assert!(support.is_empty(), "cell ({i},{j})"),
            }
        }
    }
}

#[test]
fn product_agrees_with_standard_basis_brute_force() {
    let f = build_weight_frame::<E>().unwrap();
    for i in 0..DIM {
        for j in 0..DIM {
            let (x, y) = (f.change.column(i), f.change.column(j));
            let mut prod = vec![E::zero(); DIM];
            for a in 0..DIM {
                for b in 0..DIM {
                    if let Some((s, c)) = standard_product(a, b) {
                        prod[c] = prod[c].clone() + E::from_i64(s) * x[a].clone() * y[b].clone();
                    }
                }
            }
            let w = f.to_weight(&prod);
            assert_eq!(w, oct_product(&Vector7::unit(i), &Vector7::unit(j)));
        }
    }
}

#[test]
fn l1_times_l1bar_lands_in_l0() {
    let p = oct_product(&Vector7::<E>::unit(1), &Vector7::unit(4));
    assert!(!p[0].is_zero());
    assert!((1..DIM).all(|k| p[k].is_zero()));
    assert!(oct_product(&Vector7::<E>::unit(1), &Vector7::unit(2)).is_zero());
}

#[test]
fn inner_products_on_weight_lines() {
    let l1 = Vector7::<E>::unit(1);
    assert!(inner_bilinear(&l1, &l1).is_zero());
    assert_eq!(inner_hermitian(&l1, &l1), E::one());
    assert_eq!(inner_bilinear(&l1, &Vector7::unit(4)), E::one());
    let x = Vector7::<E>(std::array::from_fn(|k| E::from_ints([k as i64, 1, -2, 0])));
    let y = Vector7::<E>(std::array::from_fn(|k| E::from_ints([1, 0, k as i64, 3])));
    assert_eq!(inner_hermitian(&x, &y), inner_bilinear(&x, &y.conj()));
}

#[test]
fn derivation_algebra_has_dimension_14_exactly() {
    let alg = derivation_basis::<E>();
    assert_eq!(alg.basis.len(), 14);
    let f = frame::<E>();
    for d in &alg.basis {
        assert_eq!(d.transpose(), d.scale(&-E::one()));
        assert_eq!(derivation_residual(&f.matrix_to_weight(d)), 0.0);
    }
    assert_eq!(derivation_residual(&f.h1), 0.0);
    assert_eq!(derivation_residual(&f.h2), 0.0);
}

#[test]
fn root_vectors_are_torus_eigenvectors() {
    let f = frame::<E>();
    let rv = root_vectors::<E>();
    assert_eq!(rv.len(), 12);
    for r in &rv {
        assert_eq!(derivation_residual(&r.matrix), 0.0);
        for (h, val) in [(&f.h1, r.root.0), (&f.h2, r.root.1)] {
            let ad = h.matmul(&r.matrix).sub(&r.matrix.matmul(h));
            assert_eq!(ad, r.matrix.scale(&(E::imag_unit() * E::from_i64(val))));
        }
    }
}

#[test]
fn random_g2_elements_preserve_everything() {
    for seed in 0..5 {
        let g = random_g2_element(seed);
        assert!(automorphism_residual(&g) < 1e-10);
        assert!(g.adjoint().matmul(&g).sub(&Mat::identity(DIM)).norm() < 1e-10);
        let x = Vector7::<F>::unit(1);
        let y = Vector7::<F>::unit(4);
        let b = inner_bilinear(&apply(&g, &x), &apply(&g, &y));
        assert!((b - F::new(1.0, 0.0)).norm() < 1e-10);
    }
    let id = g2_exp(&[0.0; 14]);
    assert!(id.sub(&Mat::identity(DIM)).norm() < 1e-15);
}

#[test]
fn annihilator_and_stabilizer_of_l1() {
    let d = weight_subspace::<E>(&[1], tol());
    let a = annihilator(&d).unwrap();
    let s = stabilizer(&d).unwrap();
    assert!(a.same(&weight_subspace(&[1, 2, 6], tol())));
    assert!(s.same(&weight_subspace(&[0, 1, 2, 6], tol())));
    assert!(s.same(&conj_subspace(&a).orth_complement()));
}

#[test]
fn annihilator_rejects_non_isotropic_input() {
    let d = weight_subspace::<E>(&[0], tol());
    assert!(annihilator(&d).is_err());
    assert!(stabilizer(&d).is_err());
}

#[test]
fn coassociative_planes() {
    let d = weight_subspace::<E>(&[4, 3], tol());
    assert!(is_coassociative_2plane(&d).unwrap().verdict);
    let a = associative_complement(&d).unwrap();
    assert!(a.same(&weight_subspace(&[0, 2, 5], tol())));
    assert!(!is_coassociative_2plane(&weight_subspace::<E>(&[1, 4], tol())).unwrap().verdict);
    // isotropic but not closed: L₁·L₃ ⊆ L₂
    assert!(!is_coassociative_2plane(&weight_subspace::<E>(&[1, 3], tol())).unwrap().verdict);
    assert!(is_coassociative_2plane(&weight_subspace::<E>(&[1], tol())).is_err());
}

fn image(g: &Mat<F>, lines: &[usize]) -> Subspace<F> {
    let vs: Vec<Vector7<F>> = lines.iter().map(|&i| apply(g, &Vector7::unit(i))).collect();
    subspace_of(&vs, tol())
}

#[test]
fn equivariance_of_classifiers() {
    for seed in 10..20 {
        let g = random_g2_element(seed);
        let d = image(&g, &[1]);
        assert!(annihilator(&d).unwrap().same(&image(&g, &[1, 2, 6])));
        let p = image(&g, &[4, 3]);
        assert!(is_coassociative_2plane(&p).unwrap().verdict);
        assert!(associative_complement(&p).unwrap().same(&image(&g, &[0, 2, 5])));
    }
}

#[test]
fn frame_export_has_all_entries() {
    let e = export_frame();
    assert_eq!(e.change_of_basis.len(), 7);
    assert_eq!(e.structure_constants.len(), 30);
    let json = serde_json::to_string(&e).unwrap();
    assert!(json.contains("structure_constants"));
}

fn vec7() -> impl Strategy<Value = Vector7<F>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), DIM)
        .prop_map(|v| Vector7(std::array::from_fn(|k| F::new(v[k].0, v[k].1))))
}

proptest! {
    #[test]
    fn product_is_antisymmetric(x in vec7(), y in vec7()) {
        let r = oct_product(&x, &y) + oct_product(&y, &x);
        prop_assert!(r.max_abs() < 1e-12);
        prop_assert!(oct_product(&x, &x).max_abs() < 1e-12);
    }

    #[test]
    fn derivations_act_by_leibniz(x in vec7(), y in vec7(), c in proptest::collection::vec(-1.0f64..1.0, 14)) {
        let alg = derivation_basis::<F>();
        let f = frame::<F>();
        let mut d = Mat::zeros(DIM, DIM);
        for (t, b) in c.iter().zip(&alg.basis) {
            d = d.add(&b.scale(&F::new(*t, 0.0)));
        }
        let d = f.matrix_to_weight(&d);
        let dx = apply(&d, &x);
        let dy = apply(&d, &y);
        let r = apply(&d, &oct_product(&x, &y)) - oct_product(&dx, &y) - oct_product(&x, &dy);
        prop_assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn isotropic_lines_have_three_dimensional_annihilators(seed in 0u64..1000) {
        let g = random_g2_element(seed);
        let d = image(&g, &[1]);
        let a = annihilator(&d).unwrap();
        prop_assert_eq!(a.dim(), 3);
        prop_assert!(stabilizer(&d).unwrap().same(&conj_subspace(&a).orth_complement()));
    }
}
