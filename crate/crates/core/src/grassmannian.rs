//! Points of the algebraic Grassmannian in a finite window.
//!
//! A point `W` with `λ^{k⁺}H₊ ⊆ W ⊆ λ^{k⁻}H₊` is stored as the echelon basis
//! of `W/λ^{k⁺}H₊` inside `λ^{k⁻}H₊/λ^{k⁺}H₊ ≅ ℂ^{7(k⁺−k⁻)}`. Coordinate
//! `7(d − k⁻) + j` holds the `L_j` component of degree `d`, so pivots order
//! by degree first and weight index second.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{product_unchecked, LaurentVector, LoopMatrix};
use crate::linalg::{orthogonal_basis, orthogonal_basis_scaled, project_out, Mat, RowEchelon, Subspace};
use crate::octonion::{inner_bilinear, Vector7, DIM};
use crate::scalar::{Scalar, Tol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl From<[i32; 2]> for Window {
    fn from(w: [i32; 2]) -> Self {
        Window { lo: w[0], hi: w[1] }
    }
}

impl From<Window> for [i32; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Invalid(format!("empty window [{lo}, {hi})")));
        }
        crate::laurent::check_degree(lo)?;
        crate::laurent::check_degree(hi)?;
        Ok(Window { lo, hi })
    }

    /// `[−k, k)` for a stratum of depth `k ≥ 1`; `[0, 1)` for `k = 0`.
    pub fn symmetric(k: i32) -> Self {
        if k == 0 {
            Window { lo: 0, hi: 1 }
        } else {
            Window { lo: -k, hi: k }
        }
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn ambient_dim(&self) -> usize {
        DIM * self.width()
    }

    pub fn hull(&self, other: &Window) -> Window {
        Window { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipClass {
    Gr,
    GrSo7,
    GrG2,
    GrInvolution,
    Segal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub relation: String,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<LaurentVector<Complex64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub class: MembershipClass,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl MembershipCertificate {
    fn pass(class: MembershipClass) -> Self {
        MembershipCertificate { class, verdict: true, witness: None }
    }

    fn fail(class: MembershipClass, relation: String, residual: f64, vector: Option<LaurentVector<Complex64>>) -> Self {
        MembershipCertificate { class, verdict: false, witness: Some(Witness { relation, residual, vector }) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint<S> {
    window: Window,
    ech: RowEchelon<S>,
    tol: Tol,
}

fn flatten<S: Scalar>(f: &LaurentVector<S>, w: Window) -> Vec<S> {
    let mut row = vec![S::zero(); w.ambient_dim()];
    for (d, v) in f.terms() {
        if d < w.lo || d >= w.hi {
            continue;
        }
        let base = DIM * (d - w.lo) as usize;
        for j in 0..DIM {
            row[base + j] = v[j].clone();
        }
    }
    row
}

fn unflatten<S: Scalar>(row: &[S], w: Window) -> LaurentVector<S> {
    LaurentVector::from_terms(
        row.chunks(DIM).enumerate().map(|(t, c)| (w.lo + t as i32, Vector7::from_slice(c))),
    )
}

impl<S: Scalar> GrassmannPoint<S> {
    /// λ-closure of the generators plus `λ^{k⁺}H₊`.
    pub fn from_generators(window: Window, generators: &[LaurentVector<S>], tol: Tol) -> Result<Self> {
        for g in generators {
            for (d, _) in g.terms() {
                if d < window.lo || d >= window.hi {
                    return Err(Error::OutsideWindow { deg: d, lo: window.lo, hi: window.hi });
                }
            }
        }
        Ok(Self::closure(window, generators, tol))
    }

    /// Like `from_generators`, silently truncating at `k⁺`; support below
    /// `k⁻` is a caller bug.
    fn closure(window: Window, generators: &[LaurentVector<S>], tol: Tol) -> Self {
        let mut rows = Vec::new();
        let mut scales = Vec::new();
        for g in generators {
            debug_assert!(g.min_degree().is_none_or(|d| d >= window.lo));
            let Some(lo) = g.min_degree() else { continue };
            let norm = g.terms().map(|(_, v)| v.norm().powi(2)).sum::<f64>().sqrt();
            for t in 0..(window.hi - lo).max(0) {
                rows.push(flatten(&g.shifted(t), window));
                scales.push(norm);
            }
        }
        let ech = RowEchelon::from_scaled_rows(rows, &scales, window.ambient_dim(), &tol);
        GrassmannPoint { window, ech, tol }
    }

    /// `λ^{k}H₊`.
    pub fn power(k: i32, tol: Tol) -> Self {
        let window = Window { lo: k, hi: k + 1 };
        let gens: Vec<_> = (0..DIM).map(|m| LaurentVector::monomial(k, Vector7::unit(m))).collect();
        Self::closure(window, &gens, tol)
    }

    pub fn h_plus(tol: Tol) -> Self {
        Self::power(0, tol)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn with_tol(mut self, tol: Tol) -> Self {
        self.tol = tol;
        self
    }

    /// `dim W/λ^{k⁺}H₊`.
    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    /// `dim W/(W∩H₊) − dim H₊/(W∩H₊)`.
    pub fn virtual_dim(&self) -> i64 {
        self.dim() as i64 - DIM as i64 * self.window.hi as i64
    }

    pub fn basis(&self) -> Vec<LaurentVector<S>> {
        self.ech.rows().iter().map(|r| unflatten(r, self.window)).collect()
    }

    /// Basis of `W/λ^{k⁺}H₊` for numerical checks: orthonormal in floating
    /// mode, the echelon basis when exact.
    pub fn conditioned_basis(&self) -> Vec<LaurentVector<S>> {
        self.ech.conditioned_rows().iter().map(|r| unflatten(r, self.window)).collect()
    }

    pub fn echelon(&self) -> &RowEchelon<S> {
        &self.ech
    }

    /// Tail monomials `λ^d e_m` for `d` in `[from, to)`.
    fn tail(from: i32, to: i32) -> Vec<LaurentVector<S>> {
        (from..to)
            .flat_map(|d| (0..DIM).map(move |m| LaurentVector::monomial(d, Vector7::unit(m))))
            .collect()
    }

    /// Same point in a wider window.
    pub fn rewindow(&self, window: Window) -> Self {
        assert!(window.lo <= self.window.lo && window.hi >= self.window.hi, "rewindow must widen");
        let before = DIM * (self.window.lo - window.lo) as usize;
        let after = DIM * (window.hi - self.window.hi) as usize;
        GrassmannPoint { window, ech: self.ech.pad(before, after), tol: self.tol }
    }

    /// Same point in the smallest window containing it.
    pub fn tighten(&self) -> Self {
        let lo = self.ech.pivots().first().map_or(self.window.hi, |&p| self.window.lo + (p / DIM) as i32);
        let mut hi = self.window.hi;
        while hi - 1 > lo && Self::tail(hi - 1, hi).iter().all(|t| self.contains(t)) {
            hi -= 1;
        }
        if lo >= hi {
            return Self::power(hi, self.tol);
        }
        // Rows pivoting below the cut stay reduced after dropping the columns
        // of λ^{hi}H₊ and the empty leading block.
        let off = DIM * (lo - self.window.lo) as usize;
        let cut = DIM * (hi - self.window.lo) as usize;
        GrassmannPoint { window: Window { lo, hi }, ech: self.ech.restrict(off, cut), tol: self.tol }
    }

    pub fn contains(&self, f: &LaurentVector<S>) -> bool {
        let scale = f.max_abs().max(1.0);
        let mut below = f.terms().filter(|(d, _)| *d < self.window.lo);
        if below.any(|(_, v)| if S::EXACT { !v.is_zero() } else { v.max_abs() > self.tol.rank * scale }) {
            return false;
        }
        self.ech.contains(&flatten(f, self.window), &self.tol)
    }

    /// `other ⊆ self`.
    pub fn contains_point(&self, other: &Self) -> bool {
        let w = self.window.hull(&other.window);
        let (a, b) = (self.rewindow(w), other.rewindow(w));
        a.ech.contains_all(&b.ech, &self.tol)
    }

    pub fn same_point(&self, other: &Self) -> bool {
        let w = self.window.hull(&other.window);
        self.rewindow(w).ech.same_span(&other.rewindow(w).ech, &self.tol)
    }

    /// `λⁿW`.
    pub fn shift(&self, n: i32) -> Self {
        GrassmannPoint { window: Window { lo: self.window.lo + n, hi: self.window.hi + n }, ech: self.ech.clone(), tol: self.tol }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let w = self.window.hull(&other.window);
        let mut gens = self.rewindow(w).conditioned_basis();
        gens.extend(other.rewindow(w).conditioned_basis());
        Self::closure(w, &gens, self.tol)
    }

    /// `W ∩ λⁱH₊`.
    pub fn intersect_power(&self, i: i32) -> Result<Self> {
        if i < self.window.lo || i > self.window.hi {
            return Err(Error::IndexOutsideWindow(i));
        }
        if i == self.window.hi {
            return Ok(Self::power(i, self.tol));
        }
        let cut = DIM * (i - self.window.lo) as usize;
        let window = Window { lo: i, hi: self.window.hi };
        let gens: Vec<_> = self
            .ech
            .rows()
            .iter()
            .zip(self.ech.pivots())
            .filter(|(_, &p)| p >= cut)
            .map(|(r, _)| unflatten(r, self.window))
            .collect();
        Ok(Self::closure(window, &gens, self.tol))
    }

    /// `Aᵢ = pᵢ(W ∩ λⁱH₊)`; everything of `ℂ⁷` from `k⁺` on, nothing below `k⁻`.
    pub fn project_p(&self, i: i32) -> Subspace<S> {
        if i >= self.window.hi {
            return Subspace::full(DIM, self.tol);
        }
        if i < self.window.lo {
            return Subspace::zero(DIM, self.tol);
        }
        let cut = DIM * (i - self.window.lo) as usize;
        let vs: Vec<Vec<S>> = self
            .ech
            .rows()
            .iter()
            .zip(self.ech.pivots())
            .filter(|(_, &p)| p >= cut && p < cut + DIM)
            .map(|(r, _)| r[cut..cut + DIM].to_vec())
            .collect();
        Subspace::span(&vs, DIM, self.tol)
    }

    /// `dim Aᵢ` for `i` in `[k⁻, k⁺]`.
    pub fn flag_dims(&self) -> Vec<(i32, usize)> {
        (self.window.lo..=self.window.hi).map(|i| (i, self.project_p(i).dim())).collect()
    }

    fn small(&self, x: &S, scale: f64) -> bool {
        x.negligible(scale.max(1.0), self.tol.rank)
    }

    /// λ-stability of the stored basis.
    pub fn is_in_gr(&self) -> MembershipCertificate {
        for b in self.conditioned_basis() {
            let s = b.shifted(1).truncate(self.window.lo, self.window.hi);
            if !self.contains(&s) {
                return MembershipCertificate::fail(MembershipClass::Gr, "λ·b ∉ W".into(), s.max_abs(), Some(s.to_c64()));
            }
        }
        MembershipCertificate::pass(MembershipClass::Gr)
    }

    /// `conj(W)^⊥ = λW`: isotropy of the `λ⁻¹` coefficient of `(f, g)` plus
    /// virtual dimension zero.
    pub fn is_in_gr_so7(&self) -> MembershipCertificate {
        let class = MembershipClass::GrSo7;
        let vd = self.virtual_dim();
        if vd != 0 {
            return MembershipCertificate::fail(class, format!("virtual dimension {vd} ≠ 0"), vd as f64, None);
        }
        let basis = self.conditioned_basis();
        let mut others = basis.clone();
        others.extend(Self::tail(self.window.hi, -self.window.lo));
        for (a, f) in basis.iter().enumerate() {
            for (b, g) in others.iter().enumerate().skip(a) {
                let v = residue_pairing(f, g);
                if !self.small(&v, f.max_abs() * g.max_abs()) {
                    return MembershipCertificate::fail(
                        class,
                        format!("⟨λ f_{a}, conj f_{b}⟩_H ≠ 0"),
                        v.magnitude(),
                        Some(f.to_c64()),
                    );
                }
            }
        }
        MembershipCertificate::pass(class)
    }

    /// Closure under the pointwise product. Tail products `b·λ^{k⁺+t}e_m`
    /// with `t ≥ k⁺ − k⁻` have degree `≥ 2k⁺`, inside `λ^{k⁺}H₊` when
    /// `k⁺ ≥ 0`, so the finite check set is complete.
    pub fn is_in_gr_g2(&self) -> MembershipCertificate {
        let class = MembershipClass::GrG2;
        let so7 = self.is_in_gr_so7();
        if !so7.verdict {
            let w = so7.witness.expect("failures carry witnesses");
            return MembershipCertificate::fail(class, format!("not in Gr(SO(7)): {}", w.relation), w.residual, w.vector);
        }
        let basis = self.conditioned_basis();
        let width = self.window.hi - self.window.lo;
        let tail = Self::tail(self.window.hi, self.window.hi + width);
        for (a, f) in basis.iter().enumerate() {
            for (b, g) in basis.iter().enumerate().skip(a + 1).chain(tail.iter().enumerate()) {
                let p = product_unchecked(f, g);
                if !self.contains(&p) {
                    return MembershipCertificate::fail(
                        class,
                        format!("b_{a} · g_{b} ∉ W"),
                        p.max_abs(),
                        Some(p.to_c64()),
                    );
                }
            }
        }
        MembershipCertificate::pass(class)
    }

    /// Invariance under `f(λ) ↦ f(−λ)`.
    pub fn is_in_gr_involution(&self) -> MembershipCertificate {
        for (a, b) in self.conditioned_basis().iter().enumerate() {
            let flipped = parity_flip(b);
            if !self.contains(&flipped) {
                return MembershipCertificate::fail(
                    MembershipClass::GrInvolution,
                    format!("b_{a}(−λ) ∉ W"),
                    flipped.sub(b).max_abs(),
                    Some(flipped.to_c64()),
                );
            }
        }
        MembershipCertificate::pass(MembershipClass::GrInvolution)
    }

    pub fn even_odd_split(&self) -> EvenOddSplit<S> {
        let (mut even, mut odd) = (Vec::new(), Vec::new());
        let basis = self.conditioned_basis();
        let scales: Vec<f64> = basis.iter().map(|b| b.terms().map(|(_, v)| v.norm().powi(2)).sum::<f64>().sqrt()).collect();
        for b in basis {
            let f = parity_flip(&b);
            let two = S::from_i64(2);
            even.push(flatten(&b.add(&f).scale(&(S::one() / two.clone())), self.window));
            odd.push(flatten(&b.sub(&f).scale(&(S::one() / two)), self.window));
        }
        let n = self.window.ambient_dim();
        let part = |rows: Vec<Vec<S>>| {
            RowEchelon::from_scaled_rows(rows, &scales, n, &self.tol).rows().iter().map(|r| unflatten(r, self.window)).collect()
        };
        let flags = self.flag_dims();
        let grading = flags.windows(2).map(|w| (w[1].0, w[1].1 - w[0].1)).collect::<Vec<_>>();
        let mut dims = vec![(self.window.lo, flags[0].1)];
        dims.extend(grading);
        dims.retain(|&(_, d)| d > 0);
        EvenOddSplit { even: part(even), odd: part(odd), dims }
    }

    /// `γW` for a loop with inverse `γ⁻¹`.
    pub fn apply_loop(&self, g: &LoopMatrix<S>, g_inv: &LoopMatrix<S>) -> Self {
        let (dmin, _) = g.support().unwrap_or((0, 0));
        let (emin, _) = g_inv.support().unwrap_or((0, 0));
        let window = Window { lo: self.window.lo + dmin, hi: (self.window.hi - emin).max(self.window.lo + dmin + 1) };
        let mut gens: Vec<_> = self.conditioned_basis();
        gens.extend(Self::tail(self.window.hi, window.hi - dmin));
        let images: Vec<_> = gens.iter().map(|f| g.apply(f)).collect();
        Self::closure(window, &images, self.tol).tighten()
    }

    /// `γW` for a loop that is unitary on the circle.
    pub fn apply_unitary_loop(&self, g: &LoopMatrix<S>) -> Self {
        self.apply_loop(g, &g.adjoint())
    }

    pub fn apply_constant(&self, m: &Mat<S>, m_inv: &Mat<S>) -> Self {
        self.apply_loop(&LoopMatrix::constant(m.clone()), &LoopMatrix::constant(m_inv.clone()))
    }

    /// Loop `γ` with `γ(1) = I` and `γH₊ = W`, read off from `W ⊖ λW`.
    pub fn extract_loop(&self) -> Result<LoopMatrix<S>> {
        let w = Window { lo: self.window.lo, hi: self.window.hi + 1 };
        let big = self.rewindow(w);
        let lam: Vec<Vec<S>> = self.conditioned_basis().iter().map(|f| flatten(&f.shifted(1), w)).collect();
        let lam_q = orthogonal_basis(&lam, &self.tol);
        let rows = big.ech.conditioned_rows();
        let residuals: Vec<Vec<S>> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                project_out(&mut r, &lam_q);
                r
            })
            .collect();
        let scales: Vec<f64> = rows.iter().map(|r| r.iter().map(|x| x.to_c64().norm_sqr()).sum::<f64>().sqrt()).collect();
        let comp = orthogonal_basis_scaled(&residuals, &scales, &self.tol);
        if comp.len() != DIM {
            return Err(Error::RankDefect { expected: DIM, got: comp.len() });
        }
        let cols: Vec<LaurentVector<S>> = comp.iter().map(|y| unflatten(y, w)).collect();
        let mut terms = Vec::new();
        for d in w.lo..w.hi {
            let m = Mat::from_fn(DIM, DIM, |r, col| cols[col].coeff(d)[r].clone());
            terms.push((d, m));
        }
        let tilde = LoopMatrix::from_terms(terms);
        let at_one = tilde.evaluate_at(&S::one());
        let inv = at_one.inverse(&self.tol).ok_or(Error::RankDefect { expected: DIM, got: DIM - 1 })?;
        Ok(tilde.mul(&LoopMatrix::constant(inv)))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GrassmannPoint<T> {
        let gens: Vec<_> = self.basis().iter().map(|b| b.map_scalar(f)).collect();
        GrassmannPoint::closure(self.window, &gens, self.tol)
    }

    pub fn to_c64(&self) -> GrassmannPoint<Complex64> {
        self.map_scalar(S::to_c64)
    }
}

/// Coefficient of `λ⁻¹` in `(f(λ), g(λ))`, i.e. `⟨λf, conj g⟩_H`.
pub fn residue_pairing<S: Scalar>(f: &LaurentVector<S>, g: &LaurentVector<S>) -> S {
    let mut acc = S::zero();
    for (i, x) in f.terms() {
        let y = g.coeff(-1 - i);
        if !y.is_zero() {
            acc = acc + inner_bilinear(x, &y);
        }
    }
    acc
}

pub fn parity_flip<S: Scalar>(f: &LaurentVector<S>) -> LaurentVector<S> {
    LaurentVector::from_terms(f.terms().map(|(d, v)| (d, if d % 2 == 0 { v.clone() } else { -v.clone() })))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvenOddSplit<S> {
    pub even: Vec<LaurentVector<S>>,
    pub odd: Vec<LaurentVector<S>>,
    /// `(i, dim Vᵢ)` for the nonzero pieces of the grading.
    pub dims: Vec<(i32, usize)>,
}

impl<S> EvenOddSplit<S> {
    pub fn even_dim_sum(&self) -> usize {
        self.dims.iter().filter(|(i, _)| i % 2 == 0).map(|(_, d)| d).sum()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().map(|(_, d)| d).sum()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct PointJson<S: Scalar> {
    pub window: Window,
    pub basis: Vec<LaurentVector<S>>,
}

impl<S: Scalar> GrassmannPoint<S> {
    pub fn to_json(&self) -> PointJson<S> {
        PointJson { window: self.window, basis: self.basis() }
    }

    pub fn from_json(p: PointJson<S>, tol: Tol) -> Result<Self> {
        let w = Window::new(p.window.lo, p.window.hi)?;
        Self::from_generators(w, &p.basis, tol)
    }
}
