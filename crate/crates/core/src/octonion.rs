//! `Im(𝕆) ⊗ ℂ` in the weight basis of a maximal torus of G₂.
//!
//! Standard imaginary units `e₁…e₇` come from the Cayley–Dickson doubling of
//! the quaternions with `e₄` the new unit and `e_{4+m} = e_m e₄`; this gives
//! `e₁e₂ = e₃`, `e₁e₄ = e₅`, `e₂e₄ = e₆`, `e₃e₄ = e₇`. The torus is generated
//! by the derivations `H₁ = R₂₃ + R₄₅ + 2R₆₇` and `H₂ = R₄₅ + R₆₇`, where
//! `R_pq` rotates `e_p` towards `e_q`.
//!
//! Weight coordinates are ordered `L₀, L₁, L₂, L₃, L̄₁, L̄₂, L̄₃`.

use std::ops::{Add, Index, IndexMut, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kernel, unit, Mat, Subspace};
use crate::scalar::{Cyclo8, Scalar, Tol};

pub const DIM: usize = 7;

/// `(H₁, H₂)` eigenvalues divided by `√−1`, per weight line.
pub const WEIGHTS: [(i64, i64); DIM] = [(0, 0), (2, 1), (1, 0), (-1, -1), (-2, -1), (-1, 0), (1, 1)];

pub const LINE_NAMES: [&str; DIM] = ["L0", "L1", "L2", "L3", "L1bar", "L2bar", "L3bar"];

/// Positive roots in the simple-root coordinates `(c₁, c₂)` of `c₁α₁ + c₂α₂`.
pub const POSITIVE_ROOTS: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)];

/// The twelve roots, positive ones first.
pub fn roots() -> Vec<(i64, i64)> {
    POSITIVE_ROOTS.iter().copied().chain(POSITIVE_ROOTS.iter().map(|&(a, b)| (-a, -b))).collect()
}

/// Weight line containing `L_i · L_j`, `None` where the product vanishes.
pub const TABLE: [[Option<usize>; DIM]; DIM] = {
    const Z: Option<usize> = None;
    [
        [Z, Some(1), Some(2), Some(3), Some(4), Some(5), Some(6)],
        [Some(1), Z, Z, Some(2), Some(0), Some(6), Z],
        [Some(2), Z, Z, Z, Some(3), Some(0), Some(1)],
        [Some(3), Some(2), Z, Z, Z, Some(4), Some(0)],
        [Some(4), Some(0), Some(3), Z, Z, Z, Some(5)],
        [Some(5), Some(6), Some(0), Some(4), Z, Z, Z],
        [Some(6), Z, Some(1), Some(0), Some(5), Z, Z],
    ]
};

/// Index of the conjugate line: `Lᵢ ↔ L̄ᵢ`, `L₀` fixed.
pub const fn conj_index(i: usize) -> usize {
    match i {
        0 => 0,
        1..=3 => i + 3,
        _ => i - 3,
    }
}

/// Line carrying the weight `w`, if any.
pub fn line_of_weight(w: (i64, i64)) -> Option<usize> {
    WEIGHTS.iter().position(|&x| x == w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector7<S>(pub [S; DIM]);

impl<S: Scalar> Vector7<S> {
    pub fn zero() -> Self {
        Vector7(std::array::from_fn(|_| S::zero()))
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = S::one();
        v
    }

    pub fn from_slice(s: &[S]) -> Self {
        assert_eq!(s.len(), DIM);
        Vector7(std::array::from_fn(|i| s[i].clone()))
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<S> {
        self.0.to_vec()
    }

    /// Complex conjugation of `Im(𝕆) ⊗ ℂ`: swaps `Lᵢ ↔ L̄ᵢ` and conjugates.
    pub fn conj(&self) -> Self {
        Vector7(std::array::from_fn(|j| self.0[conj_index(j)].conj()))
    }

    pub fn scale(&self, s: &S) -> Self {
        Vector7(std::array::from_fn(|j| self.0[j].clone() * s.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(S::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> Vector7<Complex64> {
        Vector7(std::array::from_fn(|j| self.0[j].to_c64()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.to_c64().norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<S> Index<usize> for Vector7<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vector7<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S: Scalar> Add for Vector7<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a, b] = [self.0, rhs.0];
        let mut b = b.into_iter();
        Vector7(a.map(|x| x + b.next().expect("length 7")))
    }
}

impl<S: Scalar> Sub for Vector7<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Vector7<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vector7(self.0.map(|x| -x))
    }
}

/// `Im(x ∘ y)` in weight coordinates.
pub fn oct_product<S: Scalar>(x: &Vector7<S>, y: &Vector7<S>) -> Vector7<S> {
    let mut out = Vector7::<S>::zero();
    for (i, j, k, c) in S::oct_terms() {
        let (a, b) = (&x.0[*i], &y.0[*j]);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        out.0[*k] = out.0[*k].clone() + c.clone() * a.clone() * b.clone();
    }
    out
}

/// Complex-bilinear extension of the real inner product.
pub fn inner_bilinear<S: Scalar>(x: &Vector7<S>, y: &Vector7<S>) -> S {
    let mut acc = x[0].clone() * y[0].clone();
    for i in 1..=3 {
        let ib = conj_index(i);
        acc = acc + x[i].clone() * y[ib].clone() + x[ib].clone() * y[i].clone();
    }
    acc
}

/// Hermitian inner product, linear in the first slot.
pub fn inner_hermitian<S: Scalar>(x: &Vector7<S>, y: &Vector7<S>) -> S {
    x.0.iter().zip(&y.0).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.conj())
}

// Quaternions as [w, x, y, z] over the integers.
fn quat_mul(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn quat_conj(a: [i64; 4]) -> [i64; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

/// Cayley–Dickson product `(a,b)(c,d) = (ac − d̄b, da + bc̄)` on `ℤ⁸`.
fn cd_mul(x: [i64; 8], y: [i64; 8]) -> [i64; 8] {
    let (a, b) = ([x[0], x[1], x[2], x[3]], [x[4], x[5], x[6], x[7]]);
    let (c, d) = ([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]]);
    let ac = quat_mul(a, c);
    let db = quat_mul(quat_conj(d), b);
    let da = quat_mul(d, a);
    let bc = quat_mul(b, quat_conj(c));
    let mut out = [0; 8];
    for m in 0..4 {
        out[m] = ac[m] - db[m];
        out[4 + m] = da[m] + bc[m];
    }
    out
}

/// `e_{a+1} e_{b+1}` for standard imaginary units, as `(sign, index)`;
/// `None` on the diagonal, where the imaginary part vanishes.
pub fn standard_product(a: usize, b: usize) -> Option<(i64, usize)> {
    if a == b {
        return None;
    }
    let mut x = [0; 8];
    let mut y = [0; 8];
    x[a + 1] = 1;
    y[b + 1] = 1;
    let p = cd_mul(x, y);
    let c = (1..8).find(|&m| p[m] != 0).expect("distinct units multiply to a unit");
    Some((p[c], c - 1))
}

/// Rotation generator `R_pq` on standard coordinates (1-based unit labels).
fn rotation<S: Scalar>(p: usize, q: usize) -> Mat<S> {
    let mut m = Mat::zeros(DIM, DIM);
    m[(q - 1, p - 1)] = S::one();
    m[(p - 1, q - 1)] = -S::one();
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<S> {
    /// Nonzero entries `(i, j, k, c)`.
    pub terms: Vec<(usize, usize, usize, S)>,
}

impl<S: Scalar> StructureConstants<S> {
    pub fn get(&self, i: usize, j: usize, k: usize) -> S {
        self.terms
            .iter()
            .find(|t| (t.0, t.1, t.2) == (i, j, k))
            .map_or_else(S::zero, |t| t.3.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightFrame<S> {
    /// Columns are the weight vectors in standard coordinates.
    pub change: Mat<S>,
    /// Torus generators in weight coordinates.
    pub h1: Mat<S>,
    pub h2: Mat<S>,
    pub constants: StructureConstants<S>,
}

impl<S: Scalar> WeightFrame<S> {
    pub fn to_weight(&self, std: &[S]) -> Vector7<S> {
        Vector7::from_slice(&self.change.adjoint().apply(std))
    }

    pub fn to_standard(&self, w: &Vector7<S>) -> Vec<S> {
        self.change.apply(w.as_slice())
    }

    /// Conjugates a standard-coordinate matrix into weight coordinates.
    pub fn matrix_to_weight(&self, m: &Mat<S>) -> Mat<S> {
        self.change.adjoint().matmul(m).matmul(&self.change)
    }

    pub fn matrix_to_standard(&self, m: &Mat<S>) -> Mat<S> {
        self.change.matmul(m).matmul(&self.change.adjoint())
    }
}

fn weight_vectors<S: Scalar>() -> Mat<S> {
    let h = S::frac_1_sqrt2();
    let ih = S::imag_unit() * h.clone();
    let mut f = Mat::zeros(DIM, DIM);
    f[(0, 0)] = S::one();
    // L₁ = (e₆ − i e₇)/√2, L₂ = (e₂ − i e₃)/√2, L₃ = (e₄ + i e₅)/√2
    let lines = [(1, 5, 6, false), (2, 1, 2, false), (3, 3, 4, true)];
    for (col, re, im, plus) in lines {
        let s = if plus { ih.clone() } else { -ih.clone() };
        f[(re, col)] = h.clone();
        f[(im, col)] = s.clone();
        f[(re, conj_index(col))] = h.clone();
        f[(im, conj_index(col))] = -s;
    }
    f
}

/// Weight frame with its torus and product constants. Fails only if the
/// built-in eigenbasis does not diagonalize the torus.
pub fn build_weight_frame<S: Scalar>() -> Result<WeightFrame<S>> {
    let change = weight_vectors::<S>();
    let gram = change.adjoint().matmul(&change);
    let tol = Tol::default();
    if gram.sub(&Mat::identity(DIM)).max_abs() > tol.eps {
        return Err(Error::Invalid("weight frame is not unitary".into()));
    }
    let r = |p, q| rotation::<S>(p, q);
    let two = S::from_i64(2);
    let h1_std = r(2, 3).add(&r(4, 5)).add(&r(6, 7).scale(&two));
    let h2_std = r(4, 5).add(&r(6, 7));
    let h1 = change.adjoint().matmul(&h1_std).matmul(&change);
    let h2 = change.adjoint().matmul(&h2_std).matmul(&change);
    let i = S::imag_unit();
    for (m, pick) in [(&h1, 0usize), (&h2, 1)] {
        let expected = Mat::from_fn(DIM, DIM, |a, b| {
            if a == b {
                let w = if pick == 0 { WEIGHTS[a].0 } else { WEIGHTS[a].1 };
                i.clone() * S::from_i64(w)
            } else {
                S::zero()
            }
        });
        if m.sub(&expected).max_abs() > tol.eps {
            return Err(Error::Invalid("torus is not diagonal in the weight frame".into()));
        }
    }
    let mut terms = Vec::new();
    for a in 0..DIM {
        for b in 0..DIM {
            let mut prod = vec![S::zero(); DIM];
            for p in 0..DIM {
                for q in 0..DIM {
                    let Some((sign, c)) = standard_product(p, q) else { continue };
                    let (x, y) = (&change[(p, a)], &change[(q, b)]);
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    prod[c] = prod[c].clone() + S::from_i64(sign) * x.clone() * y.clone();
                }
            }
            let w = change.adjoint().apply(&prod);
            for (k, c) in w.into_iter().enumerate() {
                if !c.negligible(1.0, tol.eps) {
                    terms.push((a, b, k, c));
                }
            }
        }
    }
    Ok(WeightFrame { change, h1, h2, constants: StructureConstants { terms } })
}

pub(crate) fn exact_structure_terms() -> Vec<(usize, usize, usize, Cyclo8)> {
    build_weight_frame::<Cyclo8>().expect("shipped frame diagonalizes the torus").constants.terms
}

/// Frame shared across the crate.
pub fn frame<S: Scalar>() -> WeightFrame<S> {
    static EXACT: OnceLock<WeightFrame<Cyclo8>> = OnceLock::new();
    let f = EXACT.get_or_init(|| build_weight_frame().expect("shipped frame diagonalizes the torus"));
    let conv = |m: &Mat<Cyclo8>| m.map_scalar(S::from_cyclo8);
    WeightFrame {
        change: conv(&f.change),
        h1: conv(&f.h1),
        h2: conv(&f.h2),
        constants: StructureConstants { terms: S::oct_terms().to_vec() },
    }
}

/// Matrix of `x ↦ d·x` in weight coordinates.
pub fn left_mult<S: Scalar>(d: &Vector7<S>) -> Mat<S> {
    let mut m = Mat::<S>::zeros(DIM, DIM);
    for (i, j, k, c) in S::oct_terms() {
        if d[*i].is_zero() {
            continue;
        }
        m[(*k, *j)] = m[(*k, *j)].clone() + c.clone() * d[*i].clone();
    }
    m
}

pub fn subspace_of<S: Scalar>(vs: &[Vector7<S>], tol: Tol) -> Subspace<S> {
    Subspace::span(&vs.iter().map(Vector7::to_vec).collect::<Vec<_>>(), DIM, tol)
}

/// Sum of weight lines.
pub fn weight_subspace<S: Scalar>(lines: &[usize], tol: Tol) -> Subspace<S> {
    let vs: Vec<Vec<S>> = lines.iter().map(|&i| unit(DIM, i)).collect();
    Subspace::span(&vs, DIM, tol)
}

/// Complex conjugate of a subspace of `ℂ⁷`.
pub fn conj_subspace<S: Scalar>(d: &Subspace<S>) -> Subspace<S> {
    let vs: Vec<Vector7<S>> = basis_vectors(d).iter().map(Vector7::conj).collect();
    subspace_of(&vs, d.tol())
}

fn basis_vectors<S: Scalar>(d: &Subspace<S>) -> Vec<Vector7<S>> {
    d.basis().iter().map(|r| Vector7::from_slice(r)).collect()
}

/// Largest `|(x, y)|` over basis pairs of `d`.
pub fn isotropy_residual<S: Scalar>(d: &Subspace<S>) -> f64 {
    let b = basis_vectors(d);
    let mut worst: f64 = 0.0;
    for x in &b {
        for y in &b {
            worst = worst.max(inner_bilinear(x, y).magnitude());
        }
    }
    worst
}

fn require_isotropic<S: Scalar>(d: &Subspace<S>) -> Result<()> {
    let r = isotropy_residual(d);
    let ok = if S::EXACT { r == 0.0 } else { r <= d.tol().rank };
    if ok {
        Ok(())
    } else {
        Err(Error::NotIsotropic(r))
    }
}

/// `{x : x·D = 0}`.
pub fn annihilator<S: Scalar>(d: &Subspace<S>) -> Result<Subspace<S>> {
    require_isotropic(d)?;
    let tol = d.tol();
    let mut rows = Vec::new();
    for v in basis_vectors(d) {
        // x·v = −v·x
        rows.extend(left_mult(&v).to_rows());
    }
    if rows.is_empty() {
        return Ok(Subspace::full(DIM, tol));
    }
    Ok(Subspace::span(&kernel(&Mat::from_rows(&rows), &tol), DIM, tol))
}

/// `{x : x·D ⊆ D}`.
pub fn stabilizer<S: Scalar>(d: &Subspace<S>) -> Result<Subspace<S>> {
    require_isotropic(d)?;
    let tol = d.tol();
    let normals = d.orth_complement();
    let mut rows = Vec::new();
    for v in basis_vectors(d) {
        let m = left_mult(&v);
        for n in normals.basis() {
            // ⟨v·x, n⟩ = Σ_k (M x)_k conj(n_k)
            let nc: Vec<S> = n.iter().map(S::conj).collect();
            rows.push(m.transpose().apply(&nc));
        }
    }
    if rows.is_empty() {
        return Ok(Subspace::full(DIM, tol));
    }
    Ok(Subspace::span(&kernel(&Mat::from_rows(&rows), &tol), DIM, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneCertificate {
    pub verdict: bool,
    pub isotropy_residual: f64,
    pub product_residual: f64,
}

/// Isotropic 2-plane closed under `D·D = 0`.
pub fn is_coassociative_2plane<S: Scalar>(d: &Subspace<S>) -> Result<PlaneCertificate> {
    if d.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: d.dim() });
    }
    let b = basis_vectors(d);
    let iso = isotropy_residual(d);
    let prod = oct_product(&b[0], &b[1]).max_abs();
    let ok = |r: f64| if S::EXACT { r == 0.0 } else { r <= d.tol().rank };
    Ok(PlaneCertificate { verdict: ok(iso) && ok(prod), isotropy_residual: iso, product_residual: prod })
}

/// `(D ⊕ D̄)^⊥`.
pub fn associative_complement<S: Scalar>(d: &Subspace<S>) -> Result<Subspace<S>> {
    if d.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: d.dim() });
    }
    let a = d.sum(&conj_subspace(d)).orth_complement();
    if a.dim() != 3 {
        return Err(Error::WrongDimension { expected: 3, got: a.dim() });
    }
    Ok(a)
}

/// Real basis of `Der(𝕆)` in standard coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraG2<S> {
    pub basis: Vec<Mat<S>>,
}

fn skew_pairs() -> Vec<(usize, usize)> {
    (0..DIM).flat_map(|p| (p + 1..DIM).map(move |q| (p, q))).collect()
}

/// Coefficient matrix of `D(e_a e_b) − De_a·e_b − e_a·De_b = 0` over the
/// 21 skew parameters `D[p][q] = t, D[q][p] = −t`.
fn derivation_system() -> Vec<Vec<i64>> {
    let pairs = skew_pairs();
    let mut rows = Vec::new();
    for a in 0..DIM {
        for b in 0..DIM {
            if a == b {
                continue;
            }
            let (sab, c) = standard_product(a, b).expect("distinct units");
            for m in 0..DIM {
                let mut row = vec![0i64; pairs.len()];
                for (col, &(p, q)) in pairs.iter().enumerate() {
                    let d = |row_i: usize, col_j: usize| -> i64 {
                        if (row_i, col_j) == (p, q) {
                            1
                        } else if (row_i, col_j) == (q, p) {
                            -1
                        } else {
                            0
                        }
                    };
                    let mut v = sab * d(m, c);
                    for r in 0..DIM {
                        let da = d(r, a);
                        if da != 0 {
                            if let Some((s, t)) = standard_product(r, b) {
                                if t == m {
                                    v -= da * s;
                                }
                            }
                        }
                        let db = d(r, b);
                        if db != 0 {
                            if let Some((s, t)) = standard_product(a, r) {
                                if t == m {
                                    v -= db * s;
                                }
                            }
                        }
                    }
                    row[col] = v;
                }
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Kernel of the derivation system, solved exactly.
pub fn derivation_basis<S: Scalar>() -> LieAlgebraG2<S> {
    static EXACT: OnceLock<LieAlgebraG2<Cyclo8>> = OnceLock::new();
    let alg = EXACT.get_or_init(solve_derivations);
    LieAlgebraG2 { basis: alg.basis.iter().map(|m| m.map_scalar(S::from_cyclo8)).collect() }
}

fn solve_derivations() -> LieAlgebraG2<Cyclo8> {
    let sys = derivation_system();
    let m = Mat::from_rows(
        &sys.iter().map(|r| r.iter().map(|&v| Cyclo8::from_i64(v)).collect()).collect::<Vec<Vec<_>>>(),
    );
    let pairs = skew_pairs();
    let basis = kernel(&m, &Tol::default())
        .into_iter()
        .map(|v| {
            let mut d = Mat::<Cyclo8>::zeros(DIM, DIM);
            for (t, &(p, q)) in v.iter().zip(&pairs) {
                let t = t.clone();
                d[(p, q)] = t.clone();
                d[(q, p)] = -t;
            }
            d
        })
        .collect();
    LieAlgebraG2 { basis }
}

/// Largest residual of the derivation identity over weight-basis pairs,
/// for a matrix in weight coordinates.
pub fn derivation_residual<S: Scalar>(d: &Mat<S>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            let (x, y) = (Vector7::<S>::unit(a), Vector7::<S>::unit(b));
            let dx = Vector7::from_slice(&d.apply(x.as_slice()));
            let dy = Vector7::from_slice(&d.apply(y.as_slice()));
            let lhs = Vector7::from_slice(&d.apply(oct_product(&x, &y).as_slice()));
            let r = lhs - oct_product(&dx, &y) - oct_product(&x, &dy);
            worst = worst.max(r.max_abs());
        }
    }
    worst
}

/// Largest residual of `g(x·y) = gx·gy` over weight-basis pairs.
pub fn automorphism_residual<S: Scalar>(g: &Mat<S>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            let (x, y) = (Vector7::<S>::unit(a), Vector7::<S>::unit(b));
            let gx = Vector7::from_slice(&g.apply(x.as_slice()));
            let gy = Vector7::from_slice(&g.apply(y.as_slice()));
            let lhs = Vector7::from_slice(&g.apply(oct_product(&x, &y).as_slice()));
            worst = worst.max((lhs - oct_product(&gx, &gy)).max_abs());
        }
    }
    worst
}

/// Root vector for each of the twelve roots, in weight coordinates, scaled
/// so its first nonzero entry (row-major) is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RootVector<S> {
    pub root: (i64, i64),
    pub matrix: Mat<S>,
}

pub fn root_vectors<S: Scalar>() -> Vec<RootVector<S>> {
    let f = frame::<S>();
    let basis: Vec<Mat<S>> =
        derivation_basis::<S>().basis.iter().map(|d| f.matrix_to_weight(d)).collect();
    let tol = Tol::default();
    roots()
        .into_iter()
        .map(|root| {
            let masked = basis.iter().find_map(|d| {
                let m = Mat::from_fn(DIM, DIM, |p, q| {
                    let (wp, wq) = (WEIGHTS[p], WEIGHTS[q]);
                    if (wp.0 - wq.0, wp.1 - wq.1) == root {
                        d[(p, q)].clone()
                    } else {
                        S::zero()
                    }
                });
                let lead = (0..DIM * DIM)
                    .map(|n| m[(n / DIM, n % DIM)].clone())
                    .find(|v| !v.negligible(1.0, tol.rank))?;
                Some(m.scale(&(S::one() / lead)))
            });
            RootVector { root, matrix: masked.expect("every root space meets Der(𝕆)") }
        })
        .collect()
}

/// Root values `α(ξ)/√−1` for `ξ = h₁H₁ + h₂H₂`.
pub fn root_value(root: (i64, i64), h: (i64, i64)) -> i64 {
    root.0 * h.0 + root.1 * h.1
}

/// `exp(Σ tᵢ Dᵢ)` in weight coordinates.
pub fn g2_exp(coeffs: &[f64]) -> Mat<Complex64> {
    let alg = derivation_basis::<Complex64>();
    assert_eq!(coeffs.len(), alg.basis.len());
    let mut x = Mat::zeros(DIM, DIM);
    for (t, d) in coeffs.iter().zip(&alg.basis) {
        x = x.add(&d.scale(&Complex64::new(*t, 0.0)));
    }
    frame::<Complex64>().matrix_to_weight(&x.expm())
}

/// Random element of G₂ (weight coordinates): exponential of a standard
/// normal combination of the derivation basis.
pub fn random_g2_element(seed: u64) -> Mat<Complex64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..14).map(|_| StandardNormal.sample(&mut rng)).collect();
    g2_exp(&coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameExport {
    pub basis_order: Vec<&'static str>,
    /// Row-major; columns are weight vectors in `e₁…e₇` coordinates.
    pub change_of_basis: Vec<Vec<[f64; 2]>>,
    pub h1: Vec<Vec<[f64; 2]>>,
    pub h2: Vec<Vec<[f64; 2]>>,
    pub structure_constants: Vec<TensorEntry>,
}

pub fn complex_json(c: &Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn matrix_json<S: Scalar>(m: &Mat<S>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| complex_json(&v.to_c64())).collect())
        .collect()
}

pub fn export_frame() -> FrameExport {
    let f = frame::<Complex64>();
    FrameExport {
        basis_order: LINE_NAMES.to_vec(),
        change_of_basis: matrix_json(&f.change),
        h1: matrix_json(&f.h1),
        h2: matrix_json(&f.h2),
        structure_constants: f
            .constants
            .terms
            .iter()
            .map(|(i, j, k, c)| TensorEntry { i: *i, j: *j, k: *k, value: [c.re, c.im] })
            .collect(),
    }
}
