use g2loop::frenet::*;
use g2loop::grassmannian::GrassmannPoint;
use g2loop::factorization::canonical_subspaces;
use g2loop::laurent::{LaurentVector, LoopMatrix};
use g2loop::lattice::{kappa, w_xi, ChainElement, LatticeElement};
use g2loop::sampling::{point_from_exponent, random_algebra_element, truncate_grading};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use g2loop::linalg::{Mat, Subspace};
use g2loop::octonion::*;
use g2loop::laurent::vector_to_json;
use g2loop::{Cyclo8, Error, Tol};
use num_complex::Complex64 as C;

fn tol() -> Tol {
    Tol::default()
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn e(i: usize) -> Vector7<C> {
    Vector7::unit(i)
}

fn rot(g: &Mat<C>, v: &Vector7<C>) -> Vector7<C> {
    Vector7::from_slice(&g.apply(v.as_slice()))
}

fn model(k: i64, l: i64) -> GrassmannPoint<C> {
    w_xi::<Cyclo8>(&LatticeElement::new(k, l).unwrap().chain(), tol()).to_c64()
}

/// `s = λ⁻¹a(z)`, `w = λ⁻¹b(z)` with `a, b` given by z-coefficients.
fn plane_curve(case: CaseTag, a: &[Vector7<C>], b: &[Vector7<C>]) -> PolyCurve {
    let sec = |v: &[Vector7<C>]| ZSection::from_terms(&v.iter().enumerate().map(|(j, x)| (j, -1, x.clone())).collect::<Vec<_>>());
    PolyCurve::new(case, vec![sec(a), sec(b)]).unwrap()
}

#[test]
fn constant_plane_gives_the_model_point() {
    let curve = plane_curve(CaseTag::K1l0, &[e(4)], &[e(3)]);
    assert_eq!(frenet_residual(&curve).norm, 0.0);
    let w = build_w(&curve, C::new(0.3, 0.1), tol()).unwrap();
    assert!(w.same_point(&model(1, 0)));
}

#[test]
fn moving_coassociative_plane() {
    let g = random_g2_element(4);
    let curve = plane_curve(CaseTag::K1l0, &[rot(&g, &e(4))], &[rot(&g, &e(3)), rot(&g, &e(5)).scale(&c(0.8))]);
    let r = frenet_residual(&curve);
    assert!(r.norm < 1e-12, "{}", r.norm);
    for z in grid(5) {
        let w = build_w(&curve, z, tol()).unwrap();
        assert!(w.is_in_gr_g2().verdict);
    }
}

#[test]
fn non_coassociative_plane_has_a_residual() {
    let lines = |a: usize, b: usize| weight_subspace::<Cyclo8>(&[a, b], tol());
    let (a, b) = (0..DIM)
        .flat_map(|a| (a + 1..DIM).map(move |b| (a, b)))
        .find(|&(a, b)| isotropy_residual(&lines(a, b)) == 0.0 && !is_coassociative_2plane(&lines(a, b)).unwrap().verdict)
        .unwrap();
    let curve = plane_curve(CaseTag::K1l0, &[e(a)], &[e(b)]);
    let r = frenet_residual(&curve);
    assert!(r.norm > 0.5);
    assert!(r.witness.is_some());
    assert!(!build_w(&curve, c(0.0), tol()).unwrap().is_in_gr_g2().verdict);
}

#[test]
fn solving_the_first_order_template() {
    let t = Template::new(CaseTag::K1l0, vec![1, 1]);
    let opts = SolveOptions { require_nonconstant: true, ..SolveOptions::default() };
    let sol = solve_frenet(&t, 7, &opts).unwrap();
    assert!(sol.residual.norm < 1e-9 && sol.gauge_residual < 1e-9);
    assert!(is_nonconstant(&sol.curve, tol()));
    for z in grid(5) {
        let w = build_w(&sol.curve, z, tol()).unwrap();
        assert!(w.is_in_gr().verdict && w.is_in_gr_so7().verdict && w.is_in_gr_g2().verdict);
        assert!(verify_segal(&sol.curve, z, tol()).unwrap().verdict);
        assert!(evaluate_phi(&sol.curve, z, tol()).unwrap().in_g2(1e-8));
    }
    let again = solve_frenet(&t, 7, &opts).unwrap();
    assert_eq!(again.curve, sol.curve);
}

#[test]
fn constant_templates_give_constant_solutions() {
    let sol = solve_frenet(&Template::new(CaseTag::K1l0, vec![0, 0]), 1, &SolveOptions::default()).unwrap();
    assert!(sol.curve.is_constant());
    assert!(!is_nonconstant(&sol.curve, tol()));
    assert!(build_w(&sol.curve, C::new(0.0, 0.0), tol()).unwrap().is_in_gr_g2().verdict);
}

#[test]
fn non_isotropic_leading_coefficient_is_infeasible() {
    let mut t = Template::new(CaseTag::K3l1, vec![0]);
    t.gauge.clear();
    t.pinned.push(Pin { slot: Slot { gen: 0, zdeg: 0, ldeg: -3 }, vec: vector_to_json(&e(0)) });
    let opts = SolveOptions { restarts: 3, max_iter: 40, ..SolveOptions::default() };
    match solve_frenet(&t, 0, &opts) {
        Err(Error::NoConvergence(best)) => assert!(best > 0.5),
        other => panic!("expected failure, got {other:?}"),
    }
}

#[test]
fn curves_serialize_and_validate() {
    let curve = moving_plane(CaseTag::K1l0, 6);
    let text = serde_json::to_string(&curve.to_json()).unwrap();
    let back = PolyCurve::from_json(serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, curve);
    assert!(serde_json::from_str::<CurveJson>(r#"{"case":"k1l0","generators":[],"x":1}"#).is_err());
    let bad = r#"{"case":"k1l0","generators":[{"terms":[{"zdeg":0,"ldeg":-2,"vec":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}]},{"terms":[]}]}"#;
    assert!(PolyCurve::from_json(serde_json::from_str(bad).unwrap()).is_err());
    let t: Template = serde_json::from_str(r#"{"case":"sym-k1l0","zdegs":[1,1]}"#).unwrap();
    assert!(t.gauge.is_empty());
}

fn moving_plane(case: CaseTag, seed: u64) -> PolyCurve {
    let g = random_g2_element(seed);
    plane_curve(case, &[rot(&g, &e(4))], &[rot(&g, &e(3)), rot(&g, &e(5)).scale(&C::new(0.6, 0.3))])
}

#[test]
fn constant_symmetric_plane() {
    let g = random_g2_element(11);
    let (a, b) = (rot(&g, &e(4)), rot(&g, &e(3)));
    let curve = plane_curve(CaseTag::SymK1l0, &[a.clone()], &[b.clone()]);
    let d = Subspace::span(&[a.to_vec(), b.to_vec()], DIM, tol());
    let expected = associative_complement(&d).unwrap();
    let mut first: Option<Mat<C>> = None;
    for z in grid(3) {
        let s = symmetric_reduction(&curve, z, tol()).unwrap();
        assert!(s.square_residual < 1e-8 && s.in_g2(1e-8));
        let sym = s.symmetric.as_ref().unwrap();
        assert_eq!(sym.even_dim_sum, 3);
        assert!(Subspace::span(&sym.plane, DIM, tol()).same(&expected));
        assert!(sym.projector_residual < 1e-8 && sym.associativity_residual < 1e-8);
        match &first {
            None => first = Some(s.phi.clone()),
            Some(p) => assert!(p.sub(&s.phi).norm() < 1e-8),
        }
    }
}

#[test]
fn moving_symmetric_plane() {
    let curve = moving_plane(CaseTag::SymK1l0, 2);
    assert!(frenet_residual(&curve).norm < 1e-12);
    assert!(is_nonconstant(&curve, tol()));
    for z in grid(5) {
        let s = symmetric_reduction(&curve, z, tol()).unwrap();
        assert_eq!(s.symmetric.as_ref().unwrap().even_dim_sum, 3);
        assert!(s.square_residual < 1e-8 && s.in_g2(1e-8));
        assert!(verify_segal(&curve, z, tol()).unwrap().verdict);
    }
}

#[test]
fn segal_fails_without_the_derivative_terms() {
    let curve = moving_plane(CaseTag::K1l0, 3);
    let z = C::new(0.2, -0.4);
    assert!(verify_segal(&curve, z, tol()).unwrap().verdict);
    let s = ZSection::from_terms(&[(0, -3, e(4)), (1, -3, e(3)), (0, -1, e(2))]);
    let line = PolyCurve::new(CaseTag::K3l1, vec![s]).unwrap();
    let sections = frame_sections(&line);
    let truncated = generated_point(&sections, 3, z, tol()).unwrap();
    let cert = segal_certificate(&truncated, &sections, z);
    assert!(!cert.verdict);
    assert!(cert.witness.unwrap().vector.is_some());
}

#[test]
fn derivative_spans() {
    let curve = plane_curve(CaseTag::K1l0, &[e(4)], &[e(3)]);
    for i in 0..3 {
        assert_eq!(derivative_span(&curve, i, C::new(0.5, 0.5), &tol()).len(), 7);
    }
    let s = ZSection::from_terms(&[(0, -1, e(4)), (1, -1, e(2)), (1, 0, e(1))]);
    let line = PolyCurve::new(CaseTag::K3l1, vec![s.clone()]).unwrap();
    let z = C::new(0.3, -0.2);
    assert_eq!(derivative_span(&line, 0, z, &tol()).len(), 1);
    let span = derivative_span(&line, 1, z, &tol());
    assert_eq!(span.len(), 2);
    let sub = |vs: &[LaurentVector<C>]| {
        let rows: Vec<Vec<C>> = vs.iter().map(|v| (-1..1).flat_map(|d| v.coeff(d).to_vec()).collect()).collect();
        Subspace::span(&rows, 2 * DIM, tol())
    };
    assert!(sub(&span).same(&sub(&[s.at(z), s.derivative(1).at(z)])));
}

#[test]
fn random_derivative_spans_match_the_stacked_rank() {
    let mut rng = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng % 2000) as f64 / 1000.0 - 1.0
    };
    for zdeg in [0usize, 1, 2] {
        let mut terms = Vec::new();
        for j in 0..=zdeg {
            for d in [-3, -2] {
                terms.push((j, d, Vector7::from_slice(&(0..DIM).map(|_| C::new(next(), next())).collect::<Vec<_>>())));
            }
        }
        let curve = PolyCurve::new(CaseTag::K3l1, vec![ZSection::from_terms(&terms)]).unwrap();
        let z = C::new(0.1, 0.7);
        for i in 0..4 {
            let s = &curve.generators()[0];
            let rows: Vec<Vec<C>> =
                (0..=i).map(|t| (-3..-1).flat_map(|d| s.derivative(t).at(z).coeff(d).to_vec()).collect()).collect();
            let rank = Subspace::span(&rows, 2 * DIM, tol()).dim();
            assert_eq!(derivative_span(&curve, i, z, &tol()).len(), rank);
            assert_eq!(rank, (i + 1).min(zdeg + 1));
        }
    }
}

/// `e₄` spans `A`; the rest of `A^a` and a vector completing `\overline{A^a}^⊥`.
fn flag_vectors() -> (Vector7<C>, Vector7<C>, Vector7<C>, Vector7<C>) {
    let a = weight_subspace::<C>(&[4], tol());
    let aa = annihilator(&a).unwrap();
    let off_a: Vec<Vec<C>> = aa
        .basis()
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v[4] = C::new(0.0, 0.0);
            v
        })
        .collect();
    let rest = Subspace::span(&off_a, DIM, tol());
    let big = conj_subspace(&aa).orth_complement();
    let v0 = big.basis().iter().find(|v| !aa.contains(v)).unwrap().clone();
    let b = rest.basis();
    (e(4), Vector7::from_slice(&b[0]), Vector7::from_slice(&b[1]), Vector7::from_slice(&v0))
}

#[test]
fn constant_second_case_data() {
    let (s, w, u, v) = flag_vectors();
    let one = |d: i32, x: &Vector7<C>| ZSection::from_terms(&[(0, d, x.clone())]);
    let curve = PolyCurve::new(CaseTag::K2l1, vec![one(-2, &s), one(-1, &u), one(-1, &w), one(0, &v)]).unwrap();
    assert!(frenet_residual(&curve).norm < 1e-12);
    assert!(build_w(&curve, C::new(0.4, 0.0), tol()).unwrap().same_point(&model(2, 1)));
    let sym = PolyCurve::new(CaseTag::SymK2l1, vec![one(-2, &s), one(-1, &w), one(-1, &u)]).unwrap();
    assert!(frenet_residual(&sym).norm < 1e-12);
    let z = C::new(-0.3, 0.2);
    assert!(build_w(&sym, z, tol()).unwrap().same_point(&model(2, 1)));
    let r = symmetric_reduction(&sym, z, tol()).unwrap();
    assert_eq!(r.symmetric.unwrap().even_dim_sum, 3);
}

/// `Xᵢ` with ξ-grading in `[1, i+1]`, so `exp(zX)` is polynomial in `z`;
/// only even `i` when `even_only`.
fn nilpotent_exponent(xi: &ChainElement, seed: u64, even_only: bool) -> Vec<Mat<C>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..2 * kappa(xi) as usize)
        .map(|i| {
            let x = random_algebra_element(&mut rng, 0.5, true);
            let x = x.sub(&truncate_grading(&x, xi, 0));
            if even_only && i % 2 == 1 {
                Mat::zeros(DIM, DIM)
            } else {
                truncate_grading(&x, xi, i as i64 + 1)
            }
        })
        .collect()
}

/// `s(z) = exp(zX(λ))λ⁻³e₄ mod λ³H₊`.
fn line_from_exponent(x: &[Mat<C>]) -> ZSection {
    let op = LoopMatrix::from_terms(x.iter().enumerate().map(|(i, m)| (i as i32, m.clone())));
    let mut v = LaurentVector::monomial(-3, e(4));
    let mut coeffs = vec![v.clone()];
    for n in 1..=7 {
        v = op.apply(&v).truncate(-3, 3).scale(&c(1.0 / n as f64));
        coeffs.push(v.clone());
    }
    assert!(v.is_zero());
    ZSection::from_z_coeffs(&coeffs)
}

#[test]
fn first_case_line_reproduces_extended_families() {
    let xi = LatticeElement::new(3, 1).unwrap();
    for (case, even) in [(CaseTag::K3l1, false), (CaseTag::SymK3l1, true)] {
        let x = nilpotent_exponent(&xi.chain(), 5, even);
        let curve = PolyCurve::new(case, vec![line_from_exponent(&x)]).unwrap();
        assert_eq!(curve.lead_rank(&tol()), 7);
        let r = frenet_residual(&curve);
        assert!(r.norm < 1e-9, "{case:?} {}", r.norm);
        for z in [C::new(0.3, -0.5), C::new(-0.8, 0.1)] {
            let zx: Vec<Mat<C>> = x.iter().map(|m| m.scale(&z)).collect();
            let expected = point_from_exponent(&xi.chain(), &zx, tol()).point;
            let w = build_w(&curve, z, tol()).unwrap();
            assert!(w.same_point(&expected), "{case:?}");
            assert!(verify_segal(&curve, z, tol()).unwrap().verdict);
            if even {
                let s = symmetric_reduction(&curve, z, tol()).unwrap();
                assert!(s.in_g2(1e-8) && s.square_residual < 1e-8);
            }
        }
    }
}

#[test]
fn first_case_generating_spans_match_the_chain() {
    let xi = LatticeElement::new(3, 1).unwrap();
    for seed in [8, 9] {
        let s = line_from_exponent(&nilpotent_exponent(&xi.chain(), seed, false));
        let curve = PolyCurve::new(CaseTag::K3l1, vec![s.clone()]).unwrap();
        let z = C::new(0.25, 0.6);
        let subs = canonical_subspaces(&build_w(&curve, z, tol()).unwrap(), &xi).unwrap();
        let spans = first_case_spans(&curve).unwrap();
        assert!(generated_point(&expand(&spans.x2, 2), 2, z, tol()).unwrap().same_point(&subs[1]));
        assert!(generated_point(&expand(&spans.x1, 1), 1, z, tol()).unwrap().same_point(&subs[2]));
        let short = [s.shift(2), s.derivative(1).shift(2), s.derivative(3).shift(3)];
        let w = generated_point(&expand(&short, 1), 1, z, tol()).unwrap();
        assert_eq!(w.dim(), 6);
        assert!(subs[2].contains_point(&w));
    }
}
