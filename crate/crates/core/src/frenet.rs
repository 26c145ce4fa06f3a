//! Polynomial Frenet data: sections `u(z, λ) = Σ_j P^j(λ) zʲ`, the family
//! `W(z) = X + λX^{(1)} + ⋯ + λ^{2k−1}X^{(2k−1)} + λ^kH₊`, the quadratic and
//! cubic system it has to satisfy, and the harmonic map `Φ₋₁`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmannian::{GrassmannPoint, MembershipCertificate, MembershipClass, Window, Witness};
use crate::laurent::{vector_from_json, vector_to_json, LaurentVector};
use crate::linalg::{orthogonal_basis, Mat};
use crate::octonion::{automorphism_residual, conj_index, inner_bilinear, inner_hermitian, oct_product, Vector7, DIM};
use crate::scalar::Tol;

type C = Complex64;

/// Highest derivative order entering `W` and the system.
pub const MAX_ORDER: usize = 5;

fn czero() -> C {
    C::new(0.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "k3l1")]
    K3l1,
    #[serde(rename = "k2l1")]
    K2l1,
    #[serde(rename = "k1l0")]
    K1l0,
    #[serde(rename = "sym-k3l1")]
    SymK3l1,
    #[serde(rename = "sym-k2l1")]
    SymK2l1,
    #[serde(rename = "sym-k1l0")]
    SymK1l0,
}

/// `λ^d · (span of the listed coefficients)^{⊥B}`, `B` the bilinear form:
/// the bundles `D̄^⊥`, `Ā^⊥`, `\overline{A^a}^⊥` of the case builders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarPiece {
    pub shift: i32,
    /// `(generator, λ-degree)` of the spanning coefficients.
    pub span: Vec<(usize, i32)>,
}

impl CaseTag {
    pub fn k(self) -> i32 {
        match self {
            CaseTag::K3l1 | CaseTag::SymK3l1 => 3,
            CaseTag::K2l1 | CaseTag::SymK2l1 => 2,
            CaseTag::K1l0 | CaseTag::SymK1l0 => 1,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, CaseTag::SymK3l1 | CaseTag::SymK2l1 | CaseTag::SymK1l0)
    }

    /// Allowed λ-degrees, one list per generator.
    pub fn shapes(self) -> Vec<Vec<i32>> {
        match self {
            CaseTag::K3l1 => vec![vec![-3, -2, -1, 0, 1, 2]],
            CaseTag::K2l1 => vec![vec![-2, -1, 0, 1], vec![-1, 0, 1], vec![-1, 0, 1], vec![0, 1]],
            CaseTag::K1l0 => vec![vec![-1, 0], vec![-1, 0]],
            CaseTag::SymK3l1 => vec![vec![-3, -1, 1]],
            CaseTag::SymK2l1 => vec![vec![-2, 0], vec![-1, 1], vec![-1, 1]],
            CaseTag::SymK1l0 => vec![vec![-1], vec![-1]],
        }
    }

    pub fn polar_pieces(self) -> Vec<PolarPiece> {
        let p = |shift, span: &[(usize, i32)]| PolarPiece { shift, span: span.to_vec() };
        match self {
            CaseTag::K3l1 | CaseTag::SymK3l1 => vec![],
            CaseTag::K2l1 => vec![p(1, &[(0, -2)])],
            CaseTag::K1l0 | CaseTag::SymK1l0 => vec![p(0, &[(0, -1), (1, -1)])],
            CaseTag::SymK2l1 => vec![p(0, &[(0, -2), (1, -1), (2, -1)]), p(1, &[(0, -2)])],
        }
    }

    /// Coefficients spanning `A` (or `D` when `k = 1`).
    pub fn lead(self) -> Vec<(usize, i32)> {
        match self {
            CaseTag::K3l1 | CaseTag::SymK3l1 => vec![(0, -3)],
            CaseTag::K2l1 | CaseTag::SymK2l1 => vec![(0, -2)],
            CaseTag::K1l0 | CaseTag::SymK1l0 => vec![(0, -1), (1, -1)],
        }
    }
}

/// Dense section `Σ_{j<nz} Σ_{t<nl} c_{j,t} zʲ λ^{lo+t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZSection {
    lo: i32,
    nl: usize,
    nz: usize,
    data: Vec<Vector7<C>>,
}

impl ZSection {
    pub fn zero() -> Self {
        ZSection { lo: 0, nl: 0, nz: 0, data: Vec::new() }
    }

    fn blank(lo: i32, nl: usize, nz: usize) -> Self {
        ZSection { lo, nl, nz, data: vec![Vector7::zero(); nl * nz] }
    }

    /// From `(z-degree, λ-degree, coefficient)` terms; repeated terms add.
    pub fn from_terms(terms: &[(usize, i32, Vector7<C>)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.1).min().unwrap_or(0);
        let hi = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let nz = terms.iter().map(|t| t.0).max().unwrap_or(0) + 1;
        let mut s = Self::blank(lo, (hi - lo + 1) as usize, nz);
        for (j, d, v) in terms {
            let slot = s.slot(*j, *d);
            s.data[slot] = s.data[slot].clone() + v.clone();
        }
        s
    }

    /// Constant in `z`.
    pub fn constant(f: &LaurentVector<C>) -> Self {
        Self::from_z_coeffs(std::slice::from_ref(f))
    }

    /// `Σ_j fⱼ(λ) zʲ`.
    pub fn from_z_coeffs(fs: &[LaurentVector<C>]) -> Self {
        let terms: Vec<_> = fs
            .iter()
            .enumerate()
            .flat_map(|(j, f)| f.terms().map(move |(d, v)| (j, d, v.clone())).collect::<Vec<_>>())
            .collect();
        Self::from_terms(&terms)
    }

    fn slot(&self, j: usize, d: i32) -> usize {
        j * self.nl + (d - self.lo) as usize
    }

    pub fn coeff(&self, j: usize, d: i32) -> Vector7<C> {
        if j >= self.nz || d < self.lo || d >= self.lo + self.nl as i32 {
            return Vector7::zero();
        }
        self.data[self.slot(j, d)].clone()
    }

    pub fn terms(&self) -> Vec<(usize, i32, Vector7<C>)> {
        let mut out = Vec::new();
        for j in 0..self.nz {
            for t in 0..self.nl {
                let v = &self.data[j * self.nl + t];
                if !v.is_zero() {
                    out.push((j, self.lo + t as i32, v.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Highest z-degree with a nonzero coefficient.
    pub fn z_degree(&self) -> Option<usize> {
        self.terms().iter().map(|t| t.0).max()
    }

    /// Lowest λ-degree with a nonzero coefficient.
    pub fn min_ldeg(&self) -> Option<i32> {
        self.terms().iter().map(|t| t.1).min()
    }

    pub fn shift(&self, d: i32) -> Self {
        ZSection { lo: self.lo + d, ..self.clone() }
    }

    /// `∂ⁿ/∂zⁿ`, exact.
    pub fn derivative(&self, n: usize) -> Self {
        if n >= self.nz {
            return Self::zero();
        }
        let mut out = Self::blank(self.lo, self.nl, self.nz - n);
        for j in n..self.nz {
            let f: f64 = ((j - n + 1)..=j).map(|x| x as f64).product();
            for t in 0..self.nl {
                out.data[(j - n) * self.nl + t] = self.data[j * self.nl + t].scale(&C::new(f, 0.0));
            }
        }
        out
    }

    /// `u(z₀, λ)`.
    pub fn at(&self, z: C) -> LaurentVector<C> {
        let mut out = LaurentVector::zero();
        for t in 0..self.nl {
            let mut acc = Vector7::zero();
            let mut zp = C::new(1.0, 0.0);
            for j in 0..self.nz {
                acc = acc + self.data[j * self.nl + t].scale(&zp);
                zp *= z;
            }
            out.add_term(self.lo + t as i32, acc);
        }
        out
    }

    /// Coefficient of `λ^d` as a polynomial in `z`.
    pub fn ldeg_poly(&self, d: i32) -> Vec<Vector7<C>> {
        (0..self.nz).map(|j| self.coeff(j, d)).collect()
    }
}

/// Polynomial Frenet data of one of the six case shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    case: CaseTag,
    generators: Vec<ZSection>,
}

impl PolyCurve {
    pub fn new(case: CaseTag, generators: Vec<ZSection>) -> Result<Self> {
        let shapes = case.shapes();
        if generators.len() != shapes.len() {
            return Err(Error::Invalid(format!("{case:?} takes {} generators, got {}", shapes.len(), generators.len())));
        }
        for (m, (g, shape)) in generators.iter().zip(&shapes).enumerate() {
            for (_, d, _) in g.terms() {
                if !shape.contains(&d) {
                    return Err(Error::Invalid(format!("generator {m} has a λ^{d} term outside {shape:?}")));
                }
            }
        }
        Ok(PolyCurve { case, generators })
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn k(&self) -> i32 {
        self.case.k()
    }

    pub fn generators(&self) -> &[ZSection] {
        &self.generators
    }

    pub fn is_constant(&self) -> bool {
        self.generators.iter().all(|g| g.z_degree().unwrap_or(0) == 0)
    }

    /// Rank of the span of the z-coefficients of the leading coefficients;
    /// `A` (or `D`) is full when this is 7.
    pub fn lead_rank(&self, tol: &Tol) -> usize {
        let rows: Vec<Vec<C>> = self
            .case
            .lead()
            .iter()
            .flat_map(|&(m, d)| self.generators[m].ldeg_poly(d))
            .map(|v| v.to_vec())
            .collect();
        orthogonal_basis(&rows, tol).len()
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            case: self.case,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    terms: g
                        .terms()
                        .into_iter()
                        .map(|(j, d, v)| TermJson { zdeg: j, ldeg: d, vec: vector_to_json(&v) })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(c: CurveJson) -> Result<Self> {
        let mut gens = Vec::new();
        for g in c.generators {
            let mut terms = Vec::new();
            for t in g.terms {
                terms.push((t.zdeg, t.ldeg, vector_from_json::<C>(&t.vec).map_err(Error::Invalid)?));
            }
            gens.push(ZSection::from_terms(&terms));
        }
        Self::new(c.case, gens)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub zdeg: usize,
    pub ldeg: i32,
    pub vec: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub case: CaseTag,
    pub generators: Vec<GeneratorJson>,
}

/// `n × n` grid on the square `[−1, 1]²`; the single point `0` when `n = 1`.
pub fn grid(n: usize) -> Vec<C> {
    if n <= 1 {
        return vec![czero()];
    }
    let t = |a: usize| -1.0 + 2.0 * a as f64 / (n - 1) as f64;
    (0..n).flat_map(|a| (0..n).map(move |b| C::new(t(a), t(b)))).collect()
}

// Polynomials in z, lowest degree first.
type Poly = Vec<C>;

fn padd(a: &Poly, b: &Poly) -> Poly {
    (0..a.len().max(b.len())).map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default()).collect()
}

fn pneg(a: &Poly) -> Poly {
    a.iter().map(|x| -x).collect()
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn peval(a: &Poly, z: C) -> C {
    a.iter().rev().fold(czero(), |acc, c| acc * z + c)
}

fn pdet(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => vec![C::new(1.0, 0.0)],
        1 => m[0][0].clone(),
        n => {
            let mut acc = Vec::new();
            for c in 0..n {
                let minor: Vec<Vec<Poly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect()).collect();
                let term = pmul(&m[0][c], &pdet(&minor));
                acc = padd(&acc, &if c % 2 == 0 { term } else { pneg(&term) });
            }
            acc
        }
    }
}

fn adjugate(m: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = m.len();
    let mut adj = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Poly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, p)| p.clone()).collect())
                .collect();
            let d = pdet(&minor);
            adj[i][j] = if (i + j) % 2 == 0 { d } else { pneg(&d) };
        }
    }
    adj
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    if n < r {
        return vec![];
    }
    let mut out = subsets(n - 1, r);
    for mut s in subsets(n - 1, r - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Rows `B(aᵢ(z), e_c)` of the constraint matrix of a polar piece.
fn polar_constraints(curve: &PolyCurve, piece: &PolarPiece) -> Vec<Vec<Poly>> {
    piece
        .span
        .iter()
        .map(|&(m, d)| {
            let a = curve.generators[m].ldeg_poly(d);
            (0..DIM).map(|c| a.iter().map(|v| v[conj_index(c)]).collect()).collect()
        })
        .collect()
}

/// Pivot columns maximizing the smallest `|det N_P(z)|` over the probe set.
fn choose_pivots(n: &[Vec<Poly>], probes: &[C]) -> Vec<usize> {
    let r = n.len();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for p in subsets(DIM, r) {
        let np: Vec<Vec<Poly>> = n.iter().map(|row| p.iter().map(|&c| row[c].clone()).collect()).collect();
        let det = pdet(&np);
        let score = probes.iter().map(|&z| peval(&det, z).norm()).fold(f64::INFINITY, f64::min);
        if score > best.0 {
            best = (score, p);
        }
    }
    best.1
}

/// Polynomial frame `det(N_P)e_c − Σ_p (adj(N_P)N_c)_p e_p`, `c ∉ P`, of the
/// polar bundle; it spans wherever `det N_P ≠ 0`.
fn polar_frame(n: &[Vec<Poly>], pivots: &[usize], shift: i32) -> Vec<ZSection> {
    let np: Vec<Vec<Poly>> = n.iter().map(|row| pivots.iter().map(|&c| row[c].clone()).collect()).collect();
    let det = pdet(&np);
    let adj = adjugate(&np);
    let mut out = Vec::new();
    for c in (0..DIM).filter(|c| !pivots.contains(c)) {
        let mut comps: Vec<Poly> = vec![Vec::new(); DIM];
        comps[c] = det.clone();
        for (j, &p) in pivots.iter().enumerate() {
            let mut acc = Vec::new();
            for (i, row) in n.iter().enumerate() {
                acc = padd(&acc, &pmul(&adj[j][i], &row[c]));
            }
            comps[p] = pneg(&acc);
        }
        let nz = comps.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut s = ZSection::blank(shift, 1, nz);
        for (comp, p) in comps.iter().enumerate() {
            for (j, x) in p.iter().enumerate() {
                s.data[j].0[comp] = *x;
            }
        }
        out.push(s);
    }
    out
}

/// Pivot choice for each polar piece of the curve.
pub fn default_pivots(curve: &PolyCurve) -> Vec<Vec<usize>> {
    let probes = grid(5);
    curve.case.polar_pieces().iter().map(|p| choose_pivots(&polar_constraints(curve, p), &probes)).collect()
}

fn sections_with(curve: &PolyCurve, pivots: &[Vec<usize>]) -> Vec<ZSection> {
    let mut out = curve.generators.clone();
    for (piece, p) in curve.case.polar_pieces().iter().zip(pivots) {
        out.extend(polar_frame(&polar_constraints(curve, piece), p, piece.shift));
    }
    out
}

/// Polynomial sections spanning `X`: the generators followed by frames of
/// the polar pieces.
pub fn frame_sections(curve: &PolyCurve) -> Vec<ZSection> {
    sections_with(curve, &default_pivots(curve))
}

/// `λⁱσ^{(i)}` for every section and `i ≤ MAX_ORDER`, dropping those inside
/// `λ^kH₊`. Together with `λ^kH₊` they generate `Σ λⁱX^{(i)}`.
pub fn expand(sections: &[ZSection], k: i32) -> Vec<ZSection> {
    let mut out = Vec::new();
    for s in sections {
        for i in 0..=MAX_ORDER {
            let g = s.derivative(i).shift(i as i32);
            if g.min_ldeg().is_some_and(|d| d < k) {
                out.push(g);
            }
        }
    }
    out
}

pub fn w_generators(curve: &PolyCurve) -> Vec<ZSection> {
    expand(&frame_sections(curve), curve.k())
}

/// `span{gᵢ(z₀)} + λ^kH₊` in the window `[−k, k)`.
pub fn generated_point(gens: &[ZSection], k: i32, z: C, tol: Tol) -> Result<GrassmannPoint<C>> {
    let evaluated: Vec<LaurentVector<C>> = gens.iter().map(|g| g.at(z).truncate(-crate::laurent::DEGREE_GUARD, k)).collect();
    GrassmannPoint::from_generators(Window::symmetric(k), &evaluated, tol)
}

/// `W(z₀)`; a rank below `7k` means `z₀` is a point of the discrete set
/// where the data degenerates.
pub fn build_w(curve: &PolyCurve, z: C, tol: Tol) -> Result<GrassmannPoint<C>> {
    let k = curve.k();
    let w = generated_point(&w_generators(curve), k, z, tol)?;
    let expected = DIM * k as usize;
    if w.dim() < expected {
        return Err(Error::RankDefect { expected, got: w.dim() });
    }
    Ok(w)
}

/// Orthonormal basis of `X^{(i)}(z₀)`, the span of all sections of `X`
/// and their first `i` derivatives.
pub fn derivative_span(curve: &PolyCurve, i: usize, z: C, tol: &Tol) -> Vec<LaurentVector<C>> {
    let sections = frame_sections(curve);
    let vecs: Vec<LaurentVector<C>> =
        sections.iter().flat_map(|s| (0..=i).map(|t| s.derivative(t).at(z)).collect::<Vec<_>>()).collect();
    let lo = vecs.iter().filter_map(|v| v.min_degree()).min().unwrap_or(0);
    let hi = vecs.iter().filter_map(|v| v.max_degree()).max().unwrap_or(0) + 1;
    let rows: Vec<Vec<C>> = vecs
        .iter()
        .map(|v| (lo..hi).flat_map(|d| v.coeff(d).to_vec()).collect())
        .collect();
    orthogonal_basis(&rows, tol)
        .iter()
        .map(|r| LaurentVector::from_terms(r.chunks(DIM).enumerate().map(|(t, c)| (lo + t as i32, Vector7::from_slice(c)))))
        .collect()
}

/// Dense polynomial in `(z, λ)` with scalar coefficients.
struct ScalarGrid {
    lo: i32,
    nl: usize,
    nz: usize,
    data: Vec<C>,
}

fn pair_sections(f: &ZSection, g: &ZSection) -> ScalarGrid {
    if f.data.is_empty() || g.data.is_empty() {
        return ScalarGrid { lo: 0, nl: 0, nz: 0, data: Vec::new() };
    }
    let (nl, nz) = (f.nl + g.nl - 1, f.nz + g.nz - 1);
    let mut data = vec![czero(); nl * nz];
    for (a, x) in f.data.iter().enumerate() {
        let (ja, ta) = (a / f.nl, a % f.nl);
        for (b, y) in g.data.iter().enumerate() {
            let (jb, tb) = (b / g.nl, b % g.nl);
            data[(ja + jb) * nl + ta + tb] += inner_bilinear(x, y);
        }
    }
    ScalarGrid { lo: f.lo + g.lo, nl, nz, data }
}

fn cross_sections(f: &ZSection, g: &ZSection) -> ZSection {
    if f.data.is_empty() || g.data.is_empty() {
        return ZSection::zero();
    }
    let mut out = ZSection::blank(f.lo + g.lo, f.nl + g.nl - 1, f.nz + g.nz - 1);
    for (a, x) in f.data.iter().enumerate() {
        let (ja, ta) = (a / f.nl, a % f.nl);
        for (b, y) in g.data.iter().enumerate() {
            let (jb, tb) = (b / g.nl, b % g.nl);
            let slot = (ja + jb) * out.nl + ta + tb;
            out.data[slot] = out.data[slot].clone() + oct_product(x, y);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    /// `(gₐ, g_b)` at a negative λ-degree.
    Quadratic,
    /// `gₐ × g_b` at λ-degree below `−k`: closure against `λ^kH₊`.
    Tail,
    /// `(gₐ × g_b, g_c)` at a negative λ-degree.
    Cubic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub kind: EquationKind,
    /// Indices into [`w_generators`].
    pub generators: Vec<usize>,
    pub ldeg: i32,
    pub zdeg: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub value: C,
}

/// Coefficients in `z` of every pairing of the system; all vanish exactly
/// when `W(z)` is isotropic and closed under the product for every `z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrenetResidual {
    pub quadratic: Vec<C>,
    pub cubic: Vec<C>,
    pub norm: f64,
    /// Largest entry, when nonzero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ResidualEntry>,
}

/// Walks the system for generators `g` of `W` (excluding `λ^kH₊`).
///
/// Isotropy: `(λᵃgᵢ, λᵇgⱼ)` has no `λ⁻¹` term for `a, b ≥ 0`, i.e.
/// `(gᵢ, gⱼ)` vanishes in every negative degree. Closure: likewise
/// `(gᵢ × gⱼ, g_l)`, and `gᵢ × gⱼ` below degree `−k` (products with
/// `λ^kH₊`). The product is alternating, so `i < j < l` suffices.
fn walk_system(gens: &[ZSection], k: i32, mut sink: impl FnMut(EquationKind, &[usize], i32, usize, Option<usize>, C)) {
    let n = gens.len();
    for a in 0..n {
        for b in a..n {
            let p = pair_sections(&gens[a], &gens[b]);
            for j in 0..p.nz {
                for t in 0..p.nl {
                    let d = p.lo + t as i32;
                    if d <= -1 {
                        sink(EquationKind::Quadratic, &[a, b], d, j, None, p.data[j * p.nl + t]);
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let x = cross_sections(&gens[a], &gens[b]);
            for j in 0..x.nz {
                for t in 0..x.nl {
                    let d = x.lo + t as i32;
                    if d <= -1 - k {
                        for (comp, v) in x.data[j * x.nl + t].0.iter().enumerate() {
                            sink(EquationKind::Tail, &[a, b], d, j, Some(comp), *v);
                        }
                    }
                }
            }
            for c in b + 1..n {
                let p = pair_sections(&x, &gens[c]);
                for j in 0..p.nz {
                    for t in 0..p.nl {
                        let d = p.lo + t as i32;
                        if d <= -1 {
                            sink(EquationKind::Cubic, &[a, b, c], d, j, None, p.data[j * p.nl + t]);
                        }
                    }
                }
            }
        }
    }
}

fn residual_values(curve: &PolyCurve, pivots: &[Vec<usize>]) -> Vec<C> {
    let gens = expand(&sections_with(curve, pivots), curve.k());
    let mut out = Vec::new();
    walk_system(&gens, curve.k(), |_, _, _, _, _, v| out.push(v));
    out
}

pub fn frenet_residual(curve: &PolyCurve) -> FrenetResidual {
    let gens = w_generators(curve);
    let (mut quadratic, mut cubic) = (Vec::new(), Vec::new());
    let mut witness: Option<ResidualEntry> = None;
    walk_system(&gens, curve.k(), |kind, g, ldeg, zdeg, component, value| {
        match kind {
            EquationKind::Quadratic => quadratic.push(value),
            _ => cubic.push(value),
        }
        if value.norm() > 0.0 && witness.as_ref().is_none_or(|w| value.norm() > w.value.norm()) {
            witness = Some(ResidualEntry { kind, generators: g.to_vec(), ldeg, zdeg, component, value });
        }
    });
    let norm = quadratic.iter().chain(&cubic).map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    FrenetResidual { quadratic, cubic, norm, witness }
}

/// Coefficient `P_m^j` at `λ^d`: generator, z-degree, λ-degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub gen: usize,
    pub zdeg: usize,
    pub ldeg: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Gauge {
    /// `|c| = 1`.
    Unit { slot: Slot },
    /// `⟨a, b⟩ = 0`.
    Orthogonal { a: Slot, b: Slot },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pin {
    pub slot: Slot,
    pub vec: Vec<[f64; 2]>,
}

/// Unknowns of the solver: every coefficient allowed by the case shape up to
/// the given z-degrees, minus the pinned ones.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub case: CaseTag,
    pub zdegs: Vec<usize>,
    #[serde(default)]
    pub pinned: Vec<Pin>,
    #[serde(default)]
    pub gauge: Vec<Gauge>,
}

impl Template {
    /// Unit leading coefficients at `z⁰`, pairwise orthogonal, and a unit
    /// `z¹` coefficient on the first one when its degree allows.
    pub fn new(case: CaseTag, zdegs: Vec<usize>) -> Self {
        let lead = case.lead();
        let mut gauge: Vec<Gauge> = lead.iter().map(|&(gen, ldeg)| Gauge::Unit { slot: Slot { gen, zdeg: 0, ldeg } }).collect();
        for (i, &(ga, la)) in lead.iter().enumerate() {
            for &(gb, lb) in &lead[i + 1..] {
                gauge.push(Gauge::Orthogonal { a: Slot { gen: ga, zdeg: 0, ldeg: la }, b: Slot { gen: gb, zdeg: 0, ldeg: lb } });
            }
        }
        let (g0, l0) = lead[0];
        if zdegs.get(g0).is_some_and(|&n| n >= 1) {
            gauge.push(Gauge::Unit { slot: Slot { gen: g0, zdeg: 1, ldeg: l0 } });
        }
        Template { case, zdegs, pinned: Vec::new(), gauge }
    }

    fn validate(&self) -> Result<()> {
        let shapes = self.case.shapes();
        if self.zdegs.len() != shapes.len() {
            return Err(Error::Invalid(format!("{:?} takes {} z-degrees, got {}", self.case, shapes.len(), self.zdegs.len())));
        }
        let known = |s: &Slot| s.gen < shapes.len() && s.zdeg <= self.zdegs[s.gen] && shapes[s.gen].contains(&s.ldeg);
        for p in &self.pinned {
            if !known(&p.slot) {
                return Err(Error::Invalid(format!("pinned slot {:?} is not in the template", p.slot)));
            }
        }
        for g in &self.gauge {
            let slots = match g {
                Gauge::Unit { slot } => vec![*slot],
                Gauge::Orthogonal { a, b } => vec![*a, *b],
            };
            if let Some(s) = slots.iter().find(|s| !known(s)) {
                return Err(Error::Invalid(format!("gauge slot {s:?} is not in the template")));
            }
        }
        Ok(())
    }

    fn free_slots(&self) -> Vec<Slot> {
        let shapes = self.case.shapes();
        let mut out = Vec::new();
        for (gen, shape) in shapes.iter().enumerate() {
            for zdeg in 0..=self.zdegs[gen] {
                for &ldeg in shape {
                    let s = Slot { gen, zdeg, ldeg };
                    if !self.pinned.iter().any(|p| p.slot == s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Required residual norm.
    pub target: f64,
    /// Spread of the random starting coefficients.
    pub sigma: f64,
    /// Treat solutions with constant `W(z)` as failures.
    pub require_nonconstant: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { restarts: 50, max_iter: 200, target: 1e-9, sigma: 1.0, require_nonconstant: false }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub curve: PolyCurve,
    pub residual: FrenetResidual,
    pub gauge_residual: f64,
    /// Index of the successful restart.
    pub restart: usize,
    pub iterations: usize,
}

struct Problem<'a> {
    template: &'a Template,
    slots: Vec<Slot>,
    pinned: Vec<(Slot, Vector7<C>)>,
}

impl Problem<'_> {
    fn curve(&self, p: &[C]) -> PolyCurve {
        let mut terms: Vec<Vec<(usize, i32, Vector7<C>)>> = vec![Vec::new(); self.template.zdegs.len()];
        for (i, s) in self.slots.iter().enumerate() {
            terms[s.gen].push((s.zdeg, s.ldeg, Vector7::from_slice(&p[DIM * i..DIM * (i + 1)])));
        }
        for (s, v) in &self.pinned {
            terms[s.gen].push((s.zdeg, s.ldeg, v.clone()));
        }
        let gens = terms.iter().map(|t| ZSection::from_terms(t)).collect();
        PolyCurve { case: self.template.case, generators: gens }
    }

    fn slot_value(&self, p: &[C], s: &Slot) -> Vector7<C> {
        match self.slots.iter().position(|x| x == s) {
            Some(i) => Vector7::from_slice(&p[DIM * i..DIM * (i + 1)]),
            None => self.pinned.iter().find(|(x, _)| x == s).map(|(_, v)| v.clone()).unwrap_or_else(Vector7::zero),
        }
    }

    fn gauge(&self, p: &[C]) -> Vec<f64> {
        let mut out = Vec::new();
        for g in &self.template.gauge {
            match g {
                Gauge::Unit { slot } => out.push(self.slot_value(p, slot).norm().powi(2) - 1.0),
                Gauge::Orthogonal { a, b } => {
                    let h = inner_hermitian(&self.slot_value(p, a), &self.slot_value(p, b));
                    out.extend([h.re, h.im]);
                }
            }
        }
        out
    }

    /// Real residual `(Re R, Im R, gauge)` and its Jacobian in the real
    /// coordinates `(Re p, Im p)`. `R` is holomorphic in `p`, so one complex
    /// difference per unknown gives both column blocks.
    fn linearize(&self, p: &[C], pivots: &[Vec<usize>]) -> (DVector<f64>, DMatrix<f64>) {
        let n = p.len();
        let r = residual_values(&self.curve(p), pivots);
        let g = self.gauge(p);
        let (m, q) = (r.len(), g.len());
        let mut jac = DMatrix::zeros(2 * m + q, 2 * n);
        let h = 1e-6;
        let mut pp = p.to_vec();
        for i in 0..n {
            let orig = pp[i];
            pp[i] = orig + h;
            let rp = residual_values(&self.curve(&pp), pivots);
            pp[i] = orig - h;
            let rm = residual_values(&self.curve(&pp), pivots);
            pp[i] = orig;
            for row in 0..m {
                let d = (rp[row] - rm[row]) / (2.0 * h);
                jac[(row, i)] = d.re;
                jac[(m + row, i)] = d.im;
                jac[(row, n + i)] = -d.im;
                jac[(m + row, n + i)] = d.re;
            }
            for (col, step) in [(i, C::new(h, 0.0)), (n + i, C::new(0.0, h))] {
                pp[i] = orig + step;
                let gp = self.gauge(&pp);
                pp[i] = orig - step;
                let gm = self.gauge(&pp);
                pp[i] = orig;
                for row in 0..q {
                    jac[(2 * m + row, col)] = (gp[row] - gm[row]) / (2.0 * h);
                }
            }
        }
        let mut res = DVector::zeros(2 * m + q);
        for (row, v) in r.iter().enumerate() {
            res[row] = v.re;
            res[m + row] = v.im;
        }
        for (row, v) in g.iter().enumerate() {
            res[2 * m + row] = *v;
        }
        (res, jac)
    }

    fn cost(&self, p: &[C], pivots: &[Vec<usize>]) -> f64 {
        let r: f64 = residual_values(&self.curve(p), pivots).iter().map(|v| v.norm_sqr()).sum();
        r + self.gauge(p).iter().map(|v| v * v).sum::<f64>()
    }

    /// Damped Gauss–Newton from `p`; returns the final point and iteration count.
    fn levenberg_marquardt(&self, mut p: Vec<C>, opts: &SolveOptions) -> (Vec<C>, usize) {
        let n = p.len();
        let mut pivots = default_pivots(&self.curve(&p));
        let mut mu = 1e-3;
        let goal = (opts.target * 1e-2).powi(2);
        for it in 0..opts.max_iter {
            let (res, jac) = self.linearize(&p, &pivots);
            let cost = res.norm_squared();
            if cost < goal {
                return (p, it);
            }
            let jt = jac.transpose();
            let a = &jt * &jac;
            let grad = &jt * &res;
            let mut accepted = false;
            while mu < 1e12 {
                let mut damped = a.clone();
                for i in 0..2 * n {
                    damped[(i, i)] += mu * (a[(i, i)] + 1e-9);
                }
                let Some(chol) = damped.cholesky() else {
                    mu *= 4.0;
                    continue;
                };
                let step = chol.solve(&(-&grad));
                let trial: Vec<C> = (0..n).map(|i| p[i] + C::new(step[i], step[n + i])).collect();
                if self.cost(&trial, &pivots) < cost {
                    p = trial;
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                return (p, it);
            }
            pivots = default_pivots(&self.curve(&p));
        }
        (p, opts.max_iter)
    }
}

/// `W(z)` differs somewhere on the 5 × 5 grid.
pub fn is_nonconstant(curve: &PolyCurve, tol: Tol) -> bool {
    let pts = grid(5);
    let Ok(first) = build_w(curve, pts[0], tol) else { return true };
    pts[1..].iter().any(|&z| build_w(curve, z, tol).map_or(true, |w| !w.same_point(&first)))
}

/// Multi-start damped least squares for the system; restart `r` starts from
/// Gaussian coefficients drawn from stream `r` of the seeded generator.
pub fn solve_frenet(template: &Template, seed: u64, opts: &SolveOptions) -> Result<Solution> {
    template.validate()?;
    let mut pinned = Vec::new();
    for p in &template.pinned {
        pinned.push((p.slot, vector_from_json::<C>(&p.vec).map_err(Error::Invalid)?));
    }
    let problem = Problem { template, slots: template.free_slots(), pinned };
    let normal = Normal::new(0.0, opts.sigma).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut best = f64::INFINITY;
    for restart in 0..opts.restarts {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let start: Vec<C> =
            (0..DIM * problem.slots.len()).map(|_| C::new(normal.sample(&mut rng), normal.sample(&mut rng))).collect();
        let (p, iterations) = problem.levenberg_marquardt(start, opts);
        let curve = problem.curve(&p);
        let residual = frenet_residual(&curve);
        let gauge_residual = problem.gauge(&p).iter().map(|v| v * v).sum::<f64>().sqrt();
        best = best.min(residual.norm.max(gauge_residual));
        if residual.norm < opts.target && gauge_residual < opts.target {
            if opts.require_nonconstant && !is_nonconstant(&curve, Tol::default()) {
                continue;
            }
            return Ok(Solution { curve, residual, gauge_residual, restart, iterations });
        }
    }
    Err(Error::NoConvergence(best))
}

/// `∂_z g ∈ λ⁻¹W(z₀)` for each generator `g` of `W`. Anti-holomorphic
/// derivatives of polynomial data vanish identically.
pub fn segal_certificate(w: &GrassmannPoint<C>, gens: &[ZSection], z: C) -> MembershipCertificate {
    let k = w.window().hi;
    for (i, g) in gens.iter().enumerate() {
        let d = g.derivative(1).shift(1).at(z).truncate(-crate::laurent::DEGREE_GUARD, k);
        if !w.contains(&d) {
            let relation = format!("λ ∂g_{i}/∂z ∉ W");
            return MembershipCertificate {
                class: MembershipClass::Segal,
                verdict: false,
                witness: Some(Witness { relation, residual: d.max_abs(), vector: Some(d) }),
            };
        }
    }
    MembershipCertificate { class: MembershipClass::Segal, verdict: true, witness: None }
}

pub fn verify_segal(curve: &PolyCurve, z: C, tol: Tol) -> Result<MembershipCertificate> {
    let w = build_w(curve, z, tol)?;
    Ok(segal_certificate(&w, &w_generators(curve), z))
}

fn serialize_matrix<S: serde::Serializer>(m: &Mat<C>, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::octonion::matrix_json(m).serialize(s)
}

/// Value `φ(z₀) = Φ₋₁` of the harmonic map, with the 3-plane of the
/// symmetric reduction when requested.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicSample {
    pub z: C,
    #[serde(serialize_with = "serialize_matrix")]
    pub phi: Mat<C>,
    /// `‖φ*φ − I‖`.
    pub unitarity_residual: f64,
    /// Largest defect of `φ(x·y) = φx·φy`.
    pub automorphism_residual: f64,
    /// `‖φ² − I‖`.
    pub square_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<SymmetricData>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricData {
    /// `Σ_{i even} dim Vᵢ`.
    pub even_dim_sum: usize,
    /// Orthonormal basis of the `+1`-eigenspace of `φ`.
    pub plane: Vec<Vec<C>>,
    /// `‖φ − (π_𝒜 − π_𝒜⊥)‖`.
    pub projector_residual: f64,
    /// Largest component of `a × b` off the plane, `a, b` in the basis.
    pub associativity_residual: f64,
}

impl HarmonicSample {
    pub fn in_g2(&self, eps: f64) -> bool {
        self.unitarity_residual < eps && self.automorphism_residual < eps
    }
}

fn sample_of(w: &GrassmannPoint<C>, z: C) -> Result<HarmonicSample> {
    let tol = w.tol();
    let phi = w.extract_loop()?.evaluate(C::new(-1.0, 0.0), &tol)?;
    let id = Mat::identity(DIM);
    Ok(HarmonicSample {
        z,
        unitarity_residual: phi.adjoint().matmul(&phi).sub(&id).norm(),
        automorphism_residual: automorphism_residual(&phi),
        square_residual: phi.matmul(&phi).sub(&id).norm(),
        phi,
        symmetric: None,
    })
}

pub fn evaluate_phi(curve: &PolyCurve, z: C, tol: Tol) -> Result<HarmonicSample> {
    sample_of(&build_w(curve, z, tol)?, z)
}

/// `φ(z₀)` of a symmetric datum together with its associative 3-plane,
/// the `+1`-eigenspace of `φ`, i.e. the even part of `W ⊖ λW` at `λ = 1`.
pub fn symmetric_reduction(curve: &PolyCurve, z: C, tol: Tol) -> Result<HarmonicSample> {
    let w = build_w(curve, z, tol)?;
    let inv = w.is_in_gr_involution();
    if !inv.verdict {
        return Err(Error::Invalid(format!("W(z₀) is not fixed by the involution: {:?}", inv.witness.map(|x| x.relation))));
    }
    let even_dim_sum = w.even_odd_split().even_dim_sum();
    if even_dim_sum != 3 {
        return Err(Error::WrongDimension { expected: 3, got: even_dim_sum });
    }
    let mut sample = sample_of(&w, z)?;
    let id = Mat::identity(DIM);
    let plus = id.add(&sample.phi).scale(&C::new(0.5, 0.0));
    let cols: Vec<Vec<C>> = (0..DIM).map(|j| plus.column(j)).collect();
    let plane: Vec<Vec<C>> = orthogonal_basis(&cols, &tol).into_iter().map(|v| normalize(&v)).collect();
    if plane.len() != 3 {
        return Err(Error::WrongDimension { expected: 3, got: plane.len() });
    }
    let proj = Mat::from_fn(DIM, DIM, |r, c| plane.iter().map(|a| a[r] * a[c].conj()).sum());
    let projector_residual = sample.phi.sub(&proj.scale(&c2()).sub(&id)).norm();
    let mut associativity_residual: f64 = 0.0;
    for a in &plane {
        for b in &plane {
            let p = oct_product(&Vector7::from_slice(a), &Vector7::from_slice(b)).to_vec();
            let off: Vec<C> = p.iter().zip(proj.apply(&p)).map(|(x, y)| x - y).collect();
            associativity_residual = associativity_residual.max(off.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt());
        }
    }
    sample.symmetric = Some(SymmetricData { even_dim_sum, plane, projector_residual, associativity_residual });
    Ok(sample)
}

fn c2() -> C {
    C::new(2.0, 0.0)
}

fn normalize(v: &[C]) -> Vec<C> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Generating spans of the stages `W²` (window `[−2, 2)`) and `W¹`
/// (window `[−1, 1)`) of the canonical chain for a line `X = span{s}`.
#[derive(Clone, Debug)]
pub struct FirstCaseSpans {
    /// `λs, λ²s⁽²⁾, λ⁴s⁽⁵⁾`.
    pub x2: Vec<ZSection>,
    /// `λ²s, λ²s⁽¹⁾, λ³s⁽³⁾, λ³s⁽⁴⁾`.
    pub x1: Vec<ZSection>,
}

pub fn first_case_spans(curve: &PolyCurve) -> Result<FirstCaseSpans> {
    if !matches!(curve.case, CaseTag::K3l1 | CaseTag::SymK3l1) {
        return Err(Error::Invalid(format!("{:?} is not generated by a line", curve.case)));
    }
    let s = &curve.generators[0];
    Ok(FirstCaseSpans {
        x2: vec![s.shift(1), s.derivative(2).shift(2), s.derivative(5).shift(4)],
        x1: vec![s.shift(2), s.derivative(1).shift(2), s.derivative(3).shift(3), s.derivative(4).shift(3)],
    })
}
