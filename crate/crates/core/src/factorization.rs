//! Canonical uniton factorizations along the chains `ξ = ξ_N ⪰ … ⪰ ξ₀ = 0`
//! and the normalization `W ↦ γW` into the strata `(3,1)`, `(2,1)`, `(1,0)`.
//!
//! Every intermediate subspace is intrinsic to `W`: a sum of shifted
//! intersections `λᵃ(W ∩ λᵇH₊)`, which commutes with any `Ψ ∈ Λ⁺`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmannian::GrassmannPoint;
use crate::laurent::LoopMatrix;
use crate::lattice::{fit_window, kappa, u_xi, LatticeElement};
use crate::scalar::{Scalar, Tol};

/// `Σ λᵃ(W ∩ λᵇH₊) + λᶜH₊` with `terms = [(a, b)]` and `tail = c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionFormula {
    pub terms: Vec<(i32, i32)>,
    pub tail: Option<i32>,
}

impl IntersectionFormula {
    pub fn new(terms: Vec<(i32, i32)>, tail: Option<i32>) -> Self {
        IntersectionFormula { terms, tail }
    }

    pub fn apply<S: Scalar>(&self, w: &GrassmannPoint<S>) -> GrassmannPoint<S> {
        let tol = w.tol();
        let mut acc: Option<GrassmannPoint<S>> = self.tail.map(|c| GrassmannPoint::power(c, tol));
        for &(a, b) in &self.terms {
            let part = cap(w, b).shift(a);
            acc = Some(match acc {
                Some(s) => s.sum(&part),
                None => part,
            });
        }
        acc.unwrap_or_else(|| GrassmannPoint::h_plus(tol)).tighten()
    }
}

/// `W ∩ λᵇH₊` for any `b`.
fn cap<S: Scalar>(w: &GrassmannPoint<S>, b: i32) -> GrassmannPoint<S> {
    let win = w.window();
    if b <= win.lo {
        w.clone()
    } else if b >= win.hi {
        GrassmannPoint::power(b, w.tol())
    } else {
        w.intersect_power(b).expect("index inside the window")
    }
}

/// `ξ_N, …, ξ₀` for the canonical factorization of a loop in `U_ξ`.
pub fn canonical_chain(xi: &LatticeElement) -> Vec<LatticeElement> {
    let (k, l) = (xi.k, xi.l);
    if k == 0 {
        return vec![LatticeElement::ZERO];
    }
    let chain: Vec<(i64, i64)> = if l == 0 {
        (0..=k).rev().map(|r| (r, 0)).collect()
    } else if 2 * l == k {
        (0..=l).rev().map(|i| (2 * i, i)).collect()
    } else {
        (0..=k).rev().map(|r| if r >= 2 * l { (r, l) } else { (r, r / 2) }).collect()
    };
    chain.into_iter().map(|(k, l)| LatticeElement { k, l }).collect()
}

/// Formulas producing `W^N, …, W⁰` from `W`, aligned with `canonical_chain`.
pub fn canonical_formulas(xi: &LatticeElement) -> Vec<IntersectionFormula> {
    let (k, l) = (xi.k as i32, xi.l as i32);
    let f = IntersectionFormula::new;
    if k == 0 {
        return vec![f(vec![], Some(0))];
    }
    if l == 0 {
        return (0..=k).map(|i| f(vec![(i, -k), (0, 0), (-i, i)], None)).collect();
    }
    if 2 * l == k {
        return (0..=l).map(|i| f(vec![(i, -2 * l + i), (-i, i)], Some(2 * (l - i)))).collect();
    }
    (0..=k)
        .rev()
        .map(|r| {
            if r >= 2 * l {
                let i = k - r;
                f(vec![(i, -k), (0, -l), (-i, l + i)], None)
            } else if r == 0 {
                f(vec![], Some(0))
            } else if r % 2 == 0 {
                let j = l - r / 2;
                f(vec![(k - 2 * l + j, -k + j), (j, -l), (-j, j), (-k + 2 * l - j, k - l)], Some(r))
            } else {
                let j = l - (r + 1) / 2;
                f(
                    vec![(k - 2 * l + j, -k + j + 1), (j + 1, -l), (-j - 1, j + 1), (-k + 2 * l - j, k - l - 1)],
                    Some(r),
                )
            }
        })
        .collect()
}

/// Certifies stage `r` as a G₂ point with the flag ranks of `W_{ξ_r}`,
/// returned in the window of `ξ_r`.
fn check_stage<S: Scalar>(stage: usize, w: &GrassmannPoint<S>, xi: &LatticeElement) -> Result<GrassmannPoint<S>> {
    let cert = w.is_in_gr_g2();
    if !cert.verdict {
        let detail = cert.witness.map_or_else(String::new, |wt| format!("{} (residual {:e})", wt.relation, wt.residual));
        return Err(Error::StageMembership { stage, detail });
    }
    u_xi(w, &xi.chain()).map_err(|e| Error::StageMembership { stage, detail: e.to_string() })?;
    fit_window(w, &xi.chain()).map_err(|e| Error::StageMembership { stage, detail: e.to_string() })
}

/// `W = W^N, …, W⁰ = H₊` along the canonical chain.
pub fn canonical_subspaces<S: Scalar>(w: &GrassmannPoint<S>, xi: &LatticeElement) -> Result<Vec<GrassmannPoint<S>>> {
    let chain = canonical_chain(xi);
    let n = chain.len() - 1;
    let top = check_stage(n, w, xi)?;
    let mut out = vec![top.clone()];
    for (t, (f, x)) in canonical_formulas(xi).iter().zip(&chain).enumerate().skip(1) {
        out.push(check_stage(n - t, &f.apply(&top), x)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FactorizationResult<S> {
    /// `ξ_N, …, ξ₀`.
    pub chain: Vec<LatticeElement>,
    /// `W^N, …, W⁰`.
    pub subspaces: Vec<GrassmannPoint<S>>,
    /// `γ_N, …, γ₀` with `γ_r H₊ = W^r`.
    pub loops: Vec<LoopMatrix<S>>,
    /// `β₁, …, β_N`.
    pub factors: Vec<LoopMatrix<S>>,
    pub type_vector: Vec<i64>,
}

impl<S: Scalar> FactorizationResult<S> {
    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> LoopMatrix<S> {
        self.factors.iter().fold(LoopMatrix::identity(), |acc, b| acc.mul(b))
    }

    /// Largest coefficient of `βᵢ` outside `[−kᵢ, kᵢ]`.
    pub fn support_excess(&self) -> f64 {
        self.factors
            .iter()
            .zip(&self.type_vector)
            .map(|(b, &k)| b.mass_outside(-k as i32, k as i32))
            .fold(0.0, f64::max)
    }

    /// Smallest extreme coefficient `max(|ζ_{−kᵢ}|, |ζ_{kᵢ}|)` over the factors.
    pub fn min_extreme_coefficient(&self) -> f64 {
        self.factors
            .iter()
            .zip(&self.type_vector)
            .map(|(b, &k)| b.coeff(k as i32).max_abs().max(b.coeff(-k as i32).max_abs()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |β₁⋯β_N(λ) − γ(λ)|` over `n` circle samples.
    pub fn product_residual(&self, gamma: &LoopMatrix<S>, n: usize, tol: &Tol) -> Result<f64> {
        let p = self.product();
        let mut worst = 0.0f64;
        for t in 0..n {
            let lam = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (t as f64 + 0.5) / n as f64);
            let d = p.evaluate(lam, tol)?.sub(&gamma.evaluate(lam, tol)?);
            worst = worst.max(d.max_abs());
        }
        Ok(worst)
    }
}

pub fn factors<S: Scalar>(w: &GrassmannPoint<S>, xi: &LatticeElement) -> Result<FactorizationResult<S>> {
    let chain = canonical_chain(xi);
    let subspaces = canonical_subspaces(w, xi)?;
    let loops = subspaces.iter().map(|p| p.extract_loop()).collect::<Result<Vec<_>>>()?;
    let n = chain.len() - 1;
    // β_i = γ_{i−1}⁻¹ γ_i, where position t in the lists holds index n − t.
    let factors = (1..=n).map(|i| loops[n - i + 1].adjoint().mul(&loops[n - i])).collect();
    let kap: Vec<i64> = chain.iter().map(|x| kappa(&x.chain())).collect();
    let type_vector = (1..=n).map(|i| kap[n - i] - kap[n - i + 1]).collect();
    Ok(FactorizationResult { chain, subspaces, loops, factors, type_vector })
}

/// Target of the normalization and the formula for `V = γ⁻¹H₊`.
pub fn normalization_case(xi: &LatticeElement) -> (LatticeElement, IntersectionFormula) {
    let (k, l) = (xi.k as i32, xi.l as i32);
    let f = IntersectionFormula::new;
    if k == 0 {
        (LatticeElement::ZERO, f(vec![], Some(0)))
    } else if l == 0 {
        (LatticeElement { k: 1, l: 0 }, f(vec![(1, -k), (0, 0)], Some(k - 1)))
    } else if 2 * l == k {
        (LatticeElement { k: 2, l: 1 }, f(vec![(2, -k), (1, -l), (0, 0), (-1, l)], Some(k - 2)))
    } else {
        (
            LatticeElement { k: 3, l: 1 },
            f(vec![(3, -k), (2, -k + l), (1, -l), (0, 0), (-1, l), (-2, k - l)], Some(k - 3)),
        )
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationResult<S> {
    /// Loop `γ` with `γW ∈ U_{ξⁿ}`; `γ⁻¹H₊ = V`.
    pub gamma: LoopMatrix<S>,
    pub xi_n: LatticeElement,
    pub w_n: GrassmannPoint<S>,
    /// `b` with `λᵇH₊ ⊆ Wⁿ ⊆ λ⁻ᵇH₊`.
    pub bound: i64,
}

pub fn normalize<S: Scalar>(w: &GrassmannPoint<S>, xi: &LatticeElement) -> Result<NormalizationResult<S>> {
    let (xi_n, formula) = normalization_case(xi);
    let w = fit_window(w, &xi.chain())?;
    let v = formula.apply(&w);
    let cert = v.is_in_gr_g2();
    if !cert.verdict {
        let detail = cert.witness.map_or_else(String::new, |wt| wt.relation);
        return Err(Error::NotInStratum { k: xi.k, l: xi.l, detail: format!("V is not a G₂ point: {detail}") });
    }
    let gamma = v.extract_loop()?.adjoint();
    let w_n = w.apply_unitary_loop(&gamma);
    let bound = kappa(&xi_n.chain());
    let b = bound as i32;
    let tol = w.tol();
    let inside = w_n.contains_point(&GrassmannPoint::power(b, tol))
        && GrassmannPoint::power(-b, tol).contains_point(&w_n);
    if !inside {
        return Err(Error::NotInStratum { k: xi_n.k, l: xi_n.l, detail: format!("Wⁿ escapes λ^±{b}H₊") });
    }
    let w_n = fit_window(&w_n, &xi_n.chain())?;
    Ok(NormalizationResult { gamma, xi_n, w_n, bound })
}

/// Largest coefficient deviation of the loops from the first one.
pub fn loop_variation<S: Scalar>(loops: &[LoopMatrix<S>]) -> f64 {
    let Some(first) = loops.first() else { return 0.0 };
    let mut worst = 0.0f64;
    for g in &loops[1..] {
        let (a, b) = (first.support().unwrap_or((0, 0)), g.support().unwrap_or((0, 0)));
        for d in a.0.min(b.0)..=a.1.max(b.1) {
            worst = worst.max(g.coeff(d).sub(&first.coeff(d)).max_abs());
        }
    }
    worst
}

/// Normalizes every member of a family and checks that `γ` does not vary.
pub fn normalize_family<S: Scalar>(
    family: &[GrassmannPoint<S>],
    xi: &LatticeElement,
    eps: f64,
) -> Result<(Vec<NormalizationResult<S>>, f64)> {
    let results = family.iter().map(|w| normalize(w, xi)).collect::<Result<Vec<_>>>()?;
    let loops: Vec<_> = results.iter().map(|r| r.gamma.clone()).collect();
    let var = loop_variation(&loops);
    if var > eps {
        return Err(Error::NotConstant(var));
    }
    Ok((results, var))
}

