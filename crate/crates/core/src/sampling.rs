//! Seeded random points of a Bruhat stratum, `Ψγ_ξH₊` with `Ψ = exp X(λ)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::grassmannian::GrassmannPoint;
use crate::laurent::LoopMatrix;
use crate::lattice::{kappa, w_xi, ChainElement};
use crate::linalg::Mat;
use crate::octonion::{derivation_basis, frame, DIM};
use crate::scalar::Tol;

/// Name of the random source, reported by the CLI.
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.9), seed_from_u64";

type C = Complex64;

#[derive(Clone, Debug)]
pub struct RandomPoint {
    pub point: GrassmannPoint<C>,
    /// `Ψ mod λ^{2κ}`; higher modes act trivially in the stratum window.
    pub psi: LoopMatrix<C>,
}

/// `exp X(λ) mod λⁿ` for `X(λ) = Σ_{j<n} λʲXⱼ`, through the lower block-
/// Toeplitz operator of multiplication by `X` on `H₊/λⁿH₊`.
pub fn exp_truncated(x: &[Mat<C>]) -> LoopMatrix<C> {
    let n = x.len();
    if n == 0 {
        return LoopMatrix::identity();
    }
    let mut t = Mat::zeros(DIM * n, DIM * n);
    for (j, xj) in x.iter().enumerate() {
        for d in j..n {
            for r in 0..DIM {
                for c in 0..DIM {
                    t[(DIM * d + r, DIM * (d - j) + c)] = xj[(r, c)];
                }
            }
        }
    }
    let e = t.expm();
    LoopMatrix::from_terms((0..n).map(|d| (d as i32, Mat::from_fn(DIM, DIM, |r, c| e[(DIM * d + r, c)]))))
}

/// Random element of `𝔤^ℂ` in weight coordinates, coefficients `N(0, σ²)`
/// (real and imaginary parts independent when `complex`).
pub fn random_algebra_element(rng: &mut ChaCha20Rng, sigma: f64, complex: bool) -> Mat<C> {
    let normal = Normal::new(0.0, sigma).expect("positive deviation");
    let alg = derivation_basis::<C>();
    let mut x = Mat::zeros(DIM, DIM);
    for d in &alg.basis {
        let re = normal.sample(rng);
        let im = if complex { normal.sample(rng) } else { 0.0 };
        x = x.add(&d.scale(&C::new(re, im)));
    }
    frame::<C>().matrix_to_weight(&x)
}

/// `exp(X(λ))·W_ξ` with `X(λ) = X₀ + λX₁ + ⋯ + λ^{2κ−1}X_{2κ−1}`, each `Xⱼ`
/// a random element of the complexified algebra.
pub fn random_unstable_point(xi: &ChainElement, seed: u64, sigma: f64, tol: Tol) -> RandomPoint {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = (2 * kappa(xi)).max(1) as usize;
    let x: Vec<Mat<C>> = (0..n).map(|_| random_algebra_element(&mut rng, sigma, true)).collect();
    point_from_exponent(xi, &x, tol)
}

pub fn point_from_exponent(xi: &ChainElement, x: &[Mat<C>], tol: Tol) -> RandomPoint {
    let psi = exp_truncated(x);
    let point = w_xi::<C>(xi, tol).apply_positive_loop(&psi);
    RandomPoint { point, psi }
}

/// Default coefficient spread for sampled exponents.
pub const DEFAULT_SIGMA: f64 = 0.4;

/// Part of `x` (weight coordinates) in `⊕_{j ≤ top} 𝔤_j^ξ`.
pub fn truncate_grading(x: &Mat<C>, xi: &ChainElement, top: i64) -> Mat<C> {
    let m = xi.exponents();
    Mat::from_fn(DIM, DIM, |r, c| if m[r] - m[c] <= top { x[(r, c)] } else { C::new(0.0, 0.0) })
}

/// Holomorphic family `z ↦ exp(zX(λ))·W_ξ` with `Xᵢ ∈ 𝔭^ξ_{i+1}`, so that
/// `Ψ⁻¹Ψ_z = X(λ)` meets the extended-solution condition.
#[derive(Clone, Debug)]
pub struct ExtendedFamily {
    pub xi: ChainElement,
    pub x: Vec<Mat<C>>,
}

impl ExtendedFamily {
    pub fn random(xi: &ChainElement, seed: u64, sigma: f64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = (2 * kappa(xi)).max(1) as usize;
        let x = (0..n)
            .map(|i| truncate_grading(&random_algebra_element(&mut rng, sigma, true), xi, i as i64 + 1))
            .collect();
        ExtendedFamily { xi: *xi, x }
    }

    pub fn at(&self, z: C, tol: Tol) -> RandomPoint {
        let zx: Vec<Mat<C>> = self.x.iter().map(|m| m.scale(&z)).collect();
        point_from_exponent(&self.xi, &zx, tol)
    }
}
