//! Finitely supported Laurent series in `λ` with `ℂ⁷` or matrix coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::octonion::{inner_hermitian, oct_product, Vector7, DIM};
use crate::scalar::{Scalar, Tol};

/// Default bound on `|degree|`.
pub const DEGREE_GUARD: i32 = 16;

pub fn check_degree(deg: i32) -> Result<()> {
    if deg.abs() > DEGREE_GUARD {
        Err(Error::DegreeGuard { deg, guard: DEGREE_GUARD })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentVector<S> {
    coeffs: BTreeMap<i32, Vector7<S>>,
}

impl<S: Scalar> Default for LaurentVector<S> {
    fn default() -> Self {
        LaurentVector { coeffs: BTreeMap::new() }
    }
}

impl<S: Scalar> LaurentVector<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(deg: i32, v: Vector7<S>) -> Self {
        Self::from_terms([(deg, v)])
    }

    /// Sums repeated degrees and drops zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Vector7<S>)>) -> Self {
        let mut out = Self::zero();
        for (d, v) in terms {
            out.add_term(d, v);
        }
        out
    }

    pub fn add_term(&mut self, deg: i32, v: Vector7<S>) {
        let sum = match self.coeffs.remove(&deg) {
            Some(old) => old + v,
            None => v,
        };
        if !sum.is_zero() {
            self.coeffs.insert(deg, sum);
        }
    }

    pub fn coeff(&self, deg: i32) -> Vector7<S> {
        self.coeffs.get(&deg).cloned().unwrap_or_else(Vector7::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Vector7<S>)> {
        self.coeffs.iter().map(|(d, v)| (*d, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn check_guard(&self) -> Result<()> {
        self.coeffs.keys().try_for_each(|&d| check_degree(d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, v) in other.terms() {
            out.add_term(d, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_terms(self.terms().map(|(d, v)| (d, v.scale(s))))
    }

    /// Multiplication by `λⁿ`.
    pub fn shift(&self, n: i32) -> Result<Self> {
        let out = self.shifted(n);
        out.check_guard()?;
        Ok(out)
    }

    pub(crate) fn shifted(&self, n: i32) -> Self {
        LaurentVector { coeffs: self.coeffs.iter().map(|(d, v)| (d + n, v.clone())).collect() }
    }

    /// Terms with degree in `[lo, hi)`.
    pub fn truncate(&self, lo: i32, hi: i32) -> Self {
        LaurentVector { coeffs: self.coeffs.range(lo..hi).map(|(d, v)| (*d, v.clone())).collect() }
    }

    /// `f(λ)` on the circle, where `λ̄ = λ⁻¹`: degree `i` becomes the
    /// conjugate of degree `−i`.
    pub fn conj_laurent(&self) -> Self {
        LaurentVector { coeffs: self.coeffs.iter().map(|(d, v)| (-d, v.conj())).collect() }
    }

    pub fn evaluate(&self, lambda: Complex64) -> Vector7<Complex64> {
        let mut out = Vector7::<Complex64>::zero();
        for (d, v) in self.terms() {
            out = out + v.to_c64().scale(&lambda.powi(d));
        }
        out
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LaurentVector<T> {
        LaurentVector::from_terms(self.terms().map(|(d, v)| (d, Vector7(std::array::from_fn(|j| f(&v[j]))))))
    }

    pub fn to_c64(&self) -> LaurentVector<Complex64> {
        self.map_scalar(S::to_c64)
    }

    /// Drops coefficients whose entries are all below `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        LaurentVector {
            coeffs: self.coeffs.iter().filter(|(_, v)| v.max_abs() > eps).map(|(d, v)| (*d, v.clone())).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(Vector7::max_abs).fold(0.0, f64::max)
    }
}

/// `⟨f, g⟩_H = Σᵢ ⟨fᵢ, gᵢ⟩`.
pub fn pairing_h<S: Scalar>(f: &LaurentVector<S>, g: &LaurentVector<S>) -> S {
    f.terms().fold(S::zero(), |acc, (d, v)| match g.coeffs.get(&d) {
        Some(w) => acc + inner_hermitian(v, w),
        None => acc,
    })
}

/// `(f·g)(λ) = f(λ)·g(λ)`.
pub fn pointwise_product<S: Scalar>(f: &LaurentVector<S>, g: &LaurentVector<S>) -> Result<LaurentVector<S>> {
    let out = product_unchecked(f, g);
    out.check_guard()?;
    Ok(out)
}

pub(crate) fn product_unchecked<S: Scalar>(f: &LaurentVector<S>, g: &LaurentVector<S>) -> LaurentVector<S> {
    let mut out = LaurentVector::zero();
    for (i, x) in f.terms() {
        for (j, y) in g.terms() {
            out.add_term(i + j, oct_product(x, y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopMatrix<S> {
    coeffs: BTreeMap<i32, Mat<S>>,
}

impl<S: Scalar> LoopMatrix<S> {
    pub fn identity() -> Self {
        Self::constant(Mat::identity(DIM))
    }

    pub fn constant(m: Mat<S>) -> Self {
        Self::from_terms([(0, m)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Mat<S>)>) -> Self {
        let mut coeffs: BTreeMap<i32, Mat<S>> = BTreeMap::new();
        for (d, m) in terms {
            let sum = match coeffs.remove(&d) {
                Some(old) => old.add(&m),
                None => m,
            };
            if !sum.is_zero() {
                coeffs.insert(d, sum);
            }
        }
        LoopMatrix { coeffs }
    }

    pub fn coeff(&self, deg: i32) -> Mat<S> {
        self.coeffs.get(&deg).cloned().unwrap_or_else(|| Mat::zeros(DIM, DIM))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Mat<S>)> {
        self.coeffs.iter().map(|(d, m)| (*d, m))
    }

    pub fn support(&self) -> Option<(i32, i32)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                terms.push((i + j, a.matmul(b)));
            }
        }
        Self::from_terms(terms)
    }

    /// `λ ↦ γ(λ)^H` on the circle; equals `γ⁻¹` for unitary loops.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms().map(|(d, m)| (-d, m.adjoint())))
    }

    pub fn apply(&self, f: &LaurentVector<S>) -> LaurentVector<S> {
        let mut out = LaurentVector::zero();
        for (i, m) in self.terms() {
            for (j, v) in f.terms() {
                out.add_term(i + j, Vector7::from_slice(&m.apply(v.as_slice())));
            }
        }
        out
    }

    /// Horner-free evaluation at an arbitrary scalar.
    pub fn evaluate_at(&self, lambda: &S) -> Mat<S> {
        let inv = S::one() / lambda.clone();
        let mut out = Mat::zeros(DIM, DIM);
        for (d, m) in self.terms() {
            let base = if d >= 0 { lambda.clone() } else { inv.clone() };
            let mut p = S::one();
            for _ in 0..d.unsigned_abs() {
                p = p * base.clone();
            }
            out = out.add(&m.scale(&p));
        }
        out
    }

    /// Value at a point of the unit circle.
    pub fn evaluate(&self, lambda: Complex64, tol: &Tol) -> Result<Mat<Complex64>> {
        if (lambda.norm() - 1.0).abs() > tol.eps {
            return Err(Error::OffCircle(lambda.norm()));
        }
        Ok(self.to_c64().evaluate_at(&lambda))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> LoopMatrix<T> {
        LoopMatrix::from_terms(self.terms().map(|(d, m)| (d, m.map_scalar(f))))
    }

    pub fn to_c64(&self) -> LoopMatrix<Complex64> {
        self.map_scalar(S::to_c64)
    }

    /// Largest coefficient entry outside degree range `[lo, hi]`.
    pub fn mass_outside(&self, lo: i32, hi: i32) -> f64 {
        self.terms().filter(|(d, _)| *d < lo || *d > hi).map(|(_, m)| m.max_abs()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    deg: i32,
    vec: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentJson {
    coeffs: Vec<TermJson>,
}

pub fn vector_to_json<S: Scalar>(v: &Vector7<S>) -> Vec<[f64; 2]> {
    v.0.iter().map(|x| { let c = x.to_c64(); [c.re, c.im] }).collect()
}

pub fn vector_from_json<S: Scalar>(v: &[[f64; 2]]) -> std::result::Result<Vector7<S>, String> {
    if v.len() != DIM {
        return Err(format!("vector has {} entries, expected 7", v.len()));
    }
    if v.iter().flatten().any(|x| !x.is_finite()) {
        return Err("non-finite vector entry".into());
    }
    Ok(Vector7(std::array::from_fn(|j| S::from_c64(Complex64::new(v[j][0], v[j][1])))))
}

impl<S: Scalar> Serialize for LaurentVector<S> {
    fn serialize<Z: Serializer>(&self, ser: Z) -> std::result::Result<Z::Ok, Z::Error> {
        LaurentJson { coeffs: self.terms().map(|(deg, v)| TermJson { deg, vec: vector_to_json(v) }).collect() }
            .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for LaurentVector<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = LaurentJson::deserialize(de)?;
        let mut out = LaurentVector::zero();
        for t in raw.coeffs {
            check_degree(t.deg).map_err(serde::de::Error::custom)?;
            out.add_term(t.deg, vector_from_json(&t.vec).map_err(serde::de::Error::custom)?);
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct MatrixTermJson {
    deg: i32,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct LoopJson {
    coeffs: Vec<MatrixTermJson>,
}

impl<S: Scalar> Serialize for LoopMatrix<S> {
    fn serialize<Z: Serializer>(&self, ser: Z) -> std::result::Result<Z::Ok, Z::Error> {
        LoopJson {
            coeffs: self
                .terms()
                .map(|(deg, m)| MatrixTermJson { deg, matrix: crate::octonion::matrix_json(m) })
                .collect(),
        }
        .serialize(ser)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo8;

    #[test]
    fn monomial_arithmetic() {
        let v = Vector7::<Cyclo8>::unit(1);
        let f = LaurentVector::monomial(2, v.clone());
        assert_eq!(f.shift(-3).unwrap(), LaurentVector::monomial(-1, v.clone()));
        assert!(f.shift(15).is_err());
        assert!(f.sub(&f).is_zero());
        assert_eq!(f.conj_laurent(), LaurentVector::monomial(-2, Vector7::unit(4)));
    }

    #[test]
    fn unitary_inverse_of_a_diagonal_loop() {
        let mut m = Mat::<Cyclo8>::zeros(DIM, DIM);
        for j in 0..DIM {
            m[(j, j)] = Cyclo8::one();
        }
        let mut p = Mat::<Cyclo8>::zeros(DIM, DIM);
        p[(1, 1)] = Cyclo8::one();
        let g = LoopMatrix::from_terms([(0, m.sub(&p)), (1, p)]);
        assert_eq!(g.mul(&g.adjoint()), LoopMatrix::identity());
    }

    #[test]
    fn off_circle_evaluation_is_rejected() {
        let g = LoopMatrix::<Complex64>::identity();
        assert!(g.evaluate(Complex64::new(1.5, 0.0), &Tol::default()).is_err());
        let v = g.evaluate(Complex64::from_polar(1.0, 0.3), &Tol::default()).unwrap();
        assert_eq!(v, Mat::identity(DIM));
    }
}
