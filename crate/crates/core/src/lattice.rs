//! Integer lattice of the maximal torus, homomorphism loops `γ_ξ`, their
//! Grassmannian points `W_ξ = γ_ξH₊`, and the Bruhat-stratum projections.
//!
//! `ξ = h₁H₁ + h₂H₂` acts on `L_j` by `√−1·m_j` with `m_j = ⟨weight_j, (h₁,h₂)⟩`,
//! and `γ_ξ(λ) = exp(−√−1 ln(λ) ξ)` is `λ^{m_j}` on `L_j`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmannian::{GrassmannPoint, Window};
use crate::laurent::{LaurentVector, LoopMatrix};
use crate::linalg::Mat;
use crate::octonion::{roots, root_value, Vector7, DIM, WEIGHTS};
use crate::scalar::{Scalar, Tol};

/// Lattice element in `(H₁, H₂)` coordinates, any chamber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainElement {
    pub h1: i64,
    pub h2: i64,
}

/// `ξ` with eigenvalues `(k, l, k−l)` on `(L₁, L₂, L̄₃)`, `0 ≤ 2l ≤ k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeElement {
    pub k: i64,
    pub l: i64,
}

impl LatticeElement {
    pub fn new(k: i64, l: i64) -> Result<Self> {
        if l < 0 || 2 * l > k {
            return Err(Error::Invalid(format!("({k},{l}) is outside the chamber 0 ≤ 2l ≤ k")));
        }
        Ok(LatticeElement { k, l })
    }

    pub const ZERO: LatticeElement = LatticeElement { k: 0, l: 0 };

    pub fn chain(&self) -> ChainElement {
        ChainElement::from_kl(self.k, self.l)
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

impl ChainElement {
    pub const ZERO: ChainElement = ChainElement { h1: 0, h2: 0 };

    /// `(k, l) ↦ (h₁, h₂) = (l, k − 2l)`, valid off the chamber as well.
    pub fn from_kl(k: i64, l: i64) -> Self {
        ChainElement { h1: l, h2: k - 2 * l }
    }

    pub fn kl(&self) -> (i64, i64) {
        (2 * self.h1 + self.h2, self.h1)
    }

    /// Canonical form when it lies in the chamber.
    pub fn canonical(&self) -> Option<LatticeElement> {
        let (k, l) = self.kl();
        LatticeElement::new(k, l).ok()
    }

    pub fn add(&self, o: &Self) -> Self {
        ChainElement { h1: self.h1 + o.h1, h2: self.h2 + o.h2 }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ChainElement { h1: self.h1 - o.h1, h2: self.h2 - o.h2 }
    }

    /// Exponents `m_j` of `γ_ξ` per weight line.
    pub fn exponents(&self) -> [i64; DIM] {
        std::array::from_fn(|j| WEIGHTS[j].0 * self.h1 + WEIGHTS[j].1 * self.h2)
    }

    pub fn root_values(&self) -> Vec<((i64, i64), i64)> {
        roots().into_iter().map(|r| (r, root_value(r, (self.h1, self.h2)))).collect()
    }
}

pub fn kappa(xi: &ChainElement) -> i64 {
    xi.exponents().iter().map(|m| m.abs()).max().unwrap_or(0)
}

/// `ξ ⪯ ξ′`: every root with `α(ξ) ≥ 0` has `0 ≤ α(ξ′) ≤ α(ξ)`.
pub fn precedes(xi: &ChainElement, xi2: &ChainElement) -> bool {
    roots().into_iter().all(|r| {
        let a = root_value(r, (xi.h1, xi.h2));
        let b = root_value(r, (xi2.h1, xi2.h2));
        a < 0 || (0 <= b && b <= a)
    })
}

pub fn gamma_xi<S: Scalar>(xi: &ChainElement) -> LoopMatrix<S> {
    let m = xi.exponents();
    LoopMatrix::from_terms((0..DIM).map(|j| {
        let mut p = Mat::zeros(DIM, DIM);
        p[(j, j)] = S::one();
        (m[j] as i32, p)
    }))
}

/// Stratum window `[−κ, κ)`.
pub fn stratum_window(xi: &ChainElement) -> Window {
    Window::symmetric(kappa(xi) as i32)
}

pub fn w_xi<S: Scalar>(xi: &ChainElement, tol: Tol) -> GrassmannPoint<S> {
    let w = stratum_window(xi);
    let gens: Vec<_> = xi
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &m)| (m as i32) < w.hi)
        .map(|(j, &m)| LaurentVector::monomial(m as i32, Vector7::unit(j)))
        .collect();
    GrassmannPoint::from_generators(w, &gens, tol).expect("exponents lie in [−κ, κ]")
}

fn stratum_error(xi: &ChainElement, detail: String) -> Error {
    let (k, l) = xi.kl();
    Error::NotInStratum { k, l, detail }
}

/// Places `W` in the window `[−κ, κ)` of `ξ`, failing if it does not fit.
pub fn fit_window<S: Scalar>(w: &GrassmannPoint<S>, xi: &ChainElement) -> Result<GrassmannPoint<S>> {
    let target = stratum_window(xi);
    let t = w.tighten();
    let tw = t.window();
    if tw.lo < target.lo || tw.hi > target.hi {
        return Err(stratum_error(xi, format!("window [{}, {}) exceeds [{}, {})", tw.lo, tw.hi, target.lo, target.hi)));
    }
    Ok(t.rewindow(target))
}

/// `u_ξ(W) = Σ λⁱ pᵢ(W ∩ λⁱH₊) + λ^κH₊`, after checking the flag ranks
/// against those of `W_ξ`.
pub fn u_xi<S: Scalar>(w: &GrassmannPoint<S>, xi: &ChainElement) -> Result<GrassmannPoint<S>> {
    let fitted = fit_window(w, xi)?;
    let model = w_xi::<S>(xi, w.tol());
    let win = fitted.window();
    let mut gens = Vec::new();
    for i in win.lo..win.hi {
        let a = fitted.project_p(i);
        let expected = model.project_p(i).dim();
        if a.dim() != expected {
            return Err(stratum_error(xi, format!("dim A_{i} = {} but the stratum has {expected}", a.dim())));
        }
        gens.extend(a.basis().iter().map(|v| LaurentVector::monomial(i, Vector7::from_slice(v))));
    }
    GrassmannPoint::from_generators(win, &gens, w.tol())
}

/// Lattice element whose flag ranks `dim Aᵢ` match those of `W`, searched
/// over the chamber with `k ≤ k_max`.
pub fn stratum_readout<S: Scalar>(w: &GrassmannPoint<S>, k_max: i64) -> Result<LatticeElement> {
    let t = w.tighten();
    let flags = |p: &GrassmannPoint<S>, lo: i32, hi: i32| (lo..=hi).map(|i| p.project_p(i).dim()).collect::<Vec<_>>();
    for k in 0..=k_max {
        for l in 0..=k / 2 {
            let xi = LatticeElement { k, l }.chain();
            let win = stratum_window(&xi);
            if t.window().lo < win.lo || t.window().hi > win.hi {
                continue;
            }
            let model = w_xi::<S>(&xi, w.tol());
            if flags(&t, win.lo, win.hi) == flags(&model, win.lo, win.hi) {
                return Ok(LatticeElement { k, l });
            }
        }
    }
    Err(Error::NotInStratum { k: -1, l: -1, detail: "no stratum matches the flag ranks".into() })
}

/// `U_{ξ,ξ′}(Ψγ_ξH₊) = Ψγ_{ξ′}H₊` for `Ψ` with non-negative Fourier support.
pub fn morphism_with_psi<S: Scalar>(
    psi: &LoopMatrix<S>,
    xi: &ChainElement,
    xi2: &ChainElement,
    tol: Tol,
) -> Result<GrassmannPoint<S>> {
    if !precedes(xi, xi2) {
        return Err(Error::Precedence(xi.kl(), xi2.kl()));
    }
    if psi.support().is_some_and(|(lo, _)| lo < 0) {
        return Err(Error::Invalid("Ψ has negative Fourier modes".into()));
    }
    if psi.coeff(0).inverse(&tol).is_none() {
        return Err(Error::NotInvertible);
    }
    Ok(w_xi::<S>(xi2, tol).apply_positive_loop(psi))
}

impl<S: Scalar> GrassmannPoint<S> {
    /// `ΨW` for `Ψ ∈ Λ⁺` with `Ψ(0)` invertible; `ΨH₊ = H₊` keeps the tail.
    pub fn apply_positive_loop(&self, psi: &LoopMatrix<S>) -> Self {
        self.apply_loop(psi, &LoopMatrix::identity())
    }
}
