//! Scalar backends.
//!
//! Two fields implement [`Scalar`]: double-precision complex numbers and the
//! cyclotomic field `Q(ζ₈)`, which contains the Gaussian rationals together
//! with `√2`. The weight-basis structure constants of the octonion product
//! live in `Q(ζ₈)`, so every structural identity can be checked with exact
//! zero residual.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Global tolerances for the floating backend. Ignored by exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    /// Relative threshold for rank decisions (scaled by the largest entry).
    pub rank: f64,
    /// Absolute comparison threshold for residual checks.
    pub eps: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rank: 1e-8, eps: 1e-9 }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn imag_unit() -> Self;
    fn frac_1_sqrt2() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact for the rational backend: every finite double is a dyadic rational.
    fn from_c64(v: Complex64) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;
    fn from_cyclo8(v: &Cyclo8) -> Self;
    /// Nonzero structure constants `(i, j, k, c)` of the product in the weight
    /// basis, `(x·y)_k = Σ c x_i y_j`.
    fn oct_terms() -> &'static [(usize, usize, usize, Self)];

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Zero test used by elimination: exact zero for exact scalars, otherwise
    /// `|x| <= tol * scale`.
    fn negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol * scale
        }
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn frac_1_sqrt2() -> Self {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_c64(v: Complex64) -> Self {
        v
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn from_cyclo8(v: &Cyclo8) -> Self {
        v.to_c64()
    }
    fn oct_terms() -> &'static [(usize, usize, usize, Self)] {
        static TERMS: OnceLock<Vec<(usize, usize, usize, Complex64)>> = OnceLock::new();
        TERMS.get_or_init(|| {
            Cyclo8::oct_terms()
                .iter()
                .map(|(i, j, k, c)| (*i, *j, *k, c.to_c64()))
                .collect()
        })
    }
}

/// Element `c₀ + c₁ζ + c₂ζ² + c₃ζ³` of `Q(ζ₈)` with `ζ = e^{iπ/4}`, `ζ⁴ = −1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo8 {
    c: [BigRational; 4],
}

impl Cyclo8 {
    pub fn new(c0: BigRational, c1: BigRational, c2: BigRational, c3: BigRational) -> Self {
        Cyclo8 { c: [c0, c1, c2, c3] }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Cyclo8 {
            c: c.map(|v| BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn sqrt2() -> Self {
        Self::from_ints([0, 1, 0, -1])
    }

    /// Galois automorphism `ζ ↦ ζ^k`, `k ∈ {1, 3, 5, 7}`.
    fn galois(&self, k: u8) -> Self {
        let [c0, c1, c2, c3] = self.c.clone();
        match k {
            1 => self.clone(),
            3 => Cyclo8 { c: [c0, c3, -c2, c1] },
            5 => Cyclo8 { c: [c0, -c1, c2, -c3] },
            7 => Cyclo8 { c: [c0, -c3, -c2, -c1] },
            _ => unreachable!("not a unit mod 8"),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let others = self.galois(3) * self.galois(5) * self.galois(7);
        let norm = (self.clone() * others.clone()).c[0].clone();
        Some(Cyclo8 {
            c: others.c.map(|v| v / norm.clone()),
        })
    }
}

impl fmt::Debug for Cyclo8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}ζ + {}ζ² + {}ζ³)",
            self.c[0], self.c[1], self.c[2], self.c[3]
        )
    }
}

impl Add for Cyclo8 {
    type Output = Cyclo8;
    fn add(self, rhs: Cyclo8) -> Cyclo8 {
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        Cyclo8 { c: [a0 + b0, a1 + b1, a2 + b2, a3 + b3] }
    }
}

impl Sub for Cyclo8 {
    type Output = Cyclo8;
    fn sub(self, rhs: Cyclo8) -> Cyclo8 {
        self + (-rhs)
    }
}

impl Neg for Cyclo8 {
    type Output = Cyclo8;
    fn neg(self) -> Cyclo8 {
        Cyclo8 { c: self.c.map(|v| -v) }
    }
}

impl Mul for Cyclo8 {
    type Output = Cyclo8;
    fn mul(self, rhs: Cyclo8) -> Cyclo8 {
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                let d = i + j;
                if d < 4 {
                    out[d] += p;
                } else {
                    out[d - 4] -= p;
                }
            }
        }
        Cyclo8 { c: out }
    }
}

impl Div for Cyclo8 {
    type Output = Cyclo8;
    fn div(self, rhs: Cyclo8) -> Cyclo8 {
        self * rhs.inverse().expect("division by zero in Q(ζ8)")
    }
}

fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("non-finite value cannot be made exact")
}

impl Scalar for Cyclo8 {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn zero() -> Self {
        Self::from_ints([0, 0, 0, 0])
    }
    fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }
    fn imag_unit() -> Self {
        Self::from_ints([0, 0, 1, 0])
    }
    fn frac_1_sqrt2() -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Cyclo8 {
            c: [BigRational::zero(), half.clone(), BigRational::zero(), -half],
        }
    }
    fn from_i64(v: i64) -> Self {
        Self::from_ints([v, 0, 0, 0])
    }
    fn from_c64(v: Complex64) -> Self {
        Cyclo8 {
            c: [
                rational_from_f64(v.re),
                BigRational::zero(),
                rational_from_f64(v.im),
                BigRational::zero(),
            ],
        }
    }
    fn conj(&self) -> Self {
        self.galois(7)
    }
    fn to_c64(&self) -> Complex64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zeta = [
            Complex64::new(1.0, 0.0),
            Complex64::new(h, h),
            Complex64::new(0.0, 1.0),
            Complex64::new(-h, h),
        ];
        self.c
            .iter()
            .zip(zeta)
            .map(|(c, z)| z * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
    fn magnitude(&self) -> f64 {
        // Cheap upper bound; only used to pick nonzero pivots.
        self.c.iter().map(|v| v.abs().to_f64().unwrap_or(0.0)).sum()
    }
    fn from_cyclo8(v: &Cyclo8) -> Self {
        v.clone()
    }
    fn oct_terms() -> &'static [(usize, usize, usize, Self)] {
        static TERMS: OnceLock<Vec<(usize, usize, usize, Cyclo8)>> = OnceLock::new();
        TERMS.get_or_init(crate::octonion::exact_structure_terms)
    }
}
