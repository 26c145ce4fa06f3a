//! Dense linear algebra over a [`Scalar`] field.
//!
//! Row spaces are kept in reduced row-echelon form with pivots on the leading
//! (lowest-index) column of each row. The form is unique, so exact span
//! equality is entrywise comparison. In floating mode the rank is settled
//! first by pivoted Gram–Schmidt, then the orthonormal rows are reduced with
//! largest-modulus pivots; containment is tested by orthogonal projection.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::scalar::{Scalar, Tol};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().cloned());
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(S::conj).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-S::one()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> Mat<Complex64> {
        self.map_scalar(S::to_c64)
    }

    /// Gauss-Jordan inverse; `None` when singular at the given tolerance.
    pub fn inverse(&self, tol: &Tol) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = pick_pivot((c..n).map(|r| &a[(r, c)]))? + c;
            if a[(p, c)].negligible(scale, tol.rank) {
                return None;
            }
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / piv.clone();
                inv[(c, j)] = inv[(c, j)].clone() / piv.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl Mat<Complex64> {
    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let norm = self.norm();
        let mut squarings = 0u32;
        let mut s = 1.0;
        while norm * s > 0.5 {
            s *= 0.5;
            squarings += 1;
        }
        let a = self.scale(&Complex64::new(s, 0.0));
        let mut term = Self::identity(n);
        let mut sum = Self::identity(n);
        for k in 1..=20 {
            term = term.matmul(&a).scale(&Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.norm() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }
}

/// Index of the pivot among candidates: first nonzero for exact scalars,
/// largest modulus for floats. `None` if there are no candidates.
fn pick_pivot<'a, S: Scalar>(cands: impl Iterator<Item = &'a S>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in cands.enumerate() {
        if S::EXACT {
            if !v.is_zero() {
                return Some(i);
            }
            best.get_or_insert((i, 0.0));
        } else {
            let m = v.magnitude();
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((i, m));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Reduced row-echelon basis of a row space.
#[derive(Clone, Debug)]
pub struct RowEchelon<S> {
    ncols: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
    /// Orthonormal basis of the same span (floating mode).
    ortho: OnceLock<Vec<Vec<S>>>,
}

impl<S: PartialEq> PartialEq for RowEchelon<S> {
    fn eq(&self, other: &Self) -> bool {
        self.ncols == other.ncols && self.pivots == other.pivots && self.rows == other.rows
    }
}

fn normalized<S: Scalar>(rows: Vec<Vec<S>>) -> Vec<Vec<S>> {
    rows.into_iter()
        .map(|r| {
            let inv = S::from_c64(Complex64::new(1.0 / sq_norm(&r).sqrt(), 0.0));
            r.into_iter().map(|v| v * inv.clone()).collect()
        })
        .collect()
}

impl<S: Scalar> RowEchelon<S> {
    fn assemble(ncols: usize, rows: Vec<Vec<S>>, pivots: Vec<usize>) -> Self {
        RowEchelon { ncols, rows, pivots, ortho: OnceLock::new() }
    }

    pub fn empty(ncols: usize) -> Self {
        Self::assemble(ncols, Vec::new(), Vec::new())
    }

    fn ortho(&self) -> &[Vec<S>] {
        self.ortho.get_or_init(|| {
            let keep_all = Tol { rank: 0.0, eps: 0.0 };
            normalized(orthogonal_basis(&self.rows, &keep_all))
        })
    }

    pub fn from_rows(rows: Vec<Vec<S>>, ncols: usize, tol: &Tol) -> Self {
        let scales: Vec<f64> = rows.iter().map(|r| sq_norm(r).sqrt()).collect();
        Self::from_scaled_rows(rows, &scales, ncols, tol)
    }

    /// Row space where row `i` counts as negligible once its residual drops
    /// below `tol.rank * scales[i]`; the scale is the size of the vector
    /// the row was cut from.
    pub fn from_scaled_rows(mut rows: Vec<Vec<S>>, scales: &[f64], ncols: usize, tol: &Tol) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ncols, "row length does not match column count");
        }
        let mut ortho = None;
        if !S::EXACT {
            rows = normalized(orthogonal_basis_scaled(&rows, scales, tol));
            ortho = Some(rows.clone());
        }
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..ncols {
            if rank == rows.len() {
                break;
            }
            let Some(off) = pick_pivot(rows[rank..].iter().map(|r| &r[c])) else {
                break;
            };
            let p = rank + off;
            if rows[p][c].negligible(1.0, tol.rank) {
                for r in rows[rank..].iter_mut() {
                    r[c] = S::zero();
                }
                continue;
            }
            rows.swap(rank, p);
            let piv = rows[rank][c].clone();
            for v in rows[rank].iter_mut().skip(c) {
                *v = v.clone() / piv.clone();
            }
            rows[rank][c] = S::one();
            let prow = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for j in c..ncols {
                    if !prow[j].is_zero() {
                        row[j] = row[j].clone() - f.clone() * prow[j].clone();
                    }
                }
                row[c] = S::zero();
            }
            pivots.push(c);
            rank += 1;
            if !S::EXACT {
                // The rank is already known; keep the unreduced rows on a
                // common scale so the pivot floor stays meaningful.
                let rest = rows.split_off(rank);
                rows.extend(normalized(rest));
            }
        }
        rows.truncate(rank);
        let out = Self::assemble(ncols, rows, pivots);
        if let Some(o) = ortho.filter(|o| o.len() == out.rank()) {
            let _ = out.ortho.set(o);
        }
        out
    }

    /// Columns `[from, to)` of the rows pivoting there; still reduced.
    pub fn restrict(&self, from: usize, to: usize) -> Self {
        let (rows, pivots) = self
            .rows
            .iter()
            .zip(&self.pivots)
            .filter(|(_, &p)| p >= from && p < to)
            .map(|(r, &p)| (r[from..to].to_vec(), p - from))
            .unzip();
        Self::assemble(to - from, rows, pivots)
    }

    /// Embeds into `before + ncols + after` columns and appends the unit
    /// rows of the last `after` columns.
    pub fn pad(&self, before: usize, after: usize) -> Self {
        let ncols = before + self.ncols + after;
        let mut rows: Vec<Vec<S>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![S::zero(); ncols];
                v[before..before + self.ncols].clone_from_slice(r);
                v
            })
            .collect();
        let mut pivots: Vec<usize> = self.pivots.iter().map(|p| p + before).collect();
        for c in before + self.ncols..ncols {
            rows.push(unit(ncols, c));
            pivots.push(c);
        }
        Self::assemble(ncols, rows, pivots)
    }

    /// The echelon rows when exact, an orthonormal basis otherwise.
    pub fn conditioned_rows(&self) -> &[Vec<S>] {
        if S::EXACT {
            &self.rows
        } else {
            self.ortho()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating the pivot columns.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = out[p].clone();
            if f.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *o = o.clone() - f.clone() * r.clone();
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[S], tol: &Tol) -> bool {
        if S::EXACT {
            return self.reduce(v).iter().all(S::is_zero);
        }
        let scale = sq_norm(v).sqrt().max(1.0);
        let mut r = v.to_vec();
        project_out(&mut r, self.ortho());
        sq_norm(&r).sqrt() <= tol.rank * scale
    }

    pub fn contains_all(&self, other: &Self, tol: &Tol) -> bool {
        other.rows.iter().all(|r| self.contains(r, tol))
    }

    /// Same span: the normal form when exact, mutual containment otherwise.
    pub fn same_span(&self, other: &Self, tol: &Tol) -> bool {
        if self.ncols != other.ncols || self.rank() != other.rank() {
            return false;
        }
        if S::EXACT {
            return self == other;
        }
        self.contains_all(other, tol) && other.contains_all(self, tol)
    }

    pub fn sum(&self, other: &Self, tol: &Tol) -> Self {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self::from_rows(rows, self.ncols, tol)
    }
}

/// Hermitian product `Σ aᵢ conj(bᵢ)`.
pub fn hdot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.conj())
}

fn sq_norm<S: Scalar>(v: &[S]) -> f64 {
    hdot(v, v).to_c64().re
}

/// Removes the components of `v` along mutually orthogonal `qs`.
pub fn project_out<S: Scalar>(v: &mut [S], qs: &[Vec<S>]) {
    let passes = if S::EXACT { 1 } else { 2 };
    for _ in 0..passes {
        for q in qs {
            let c = hdot(v, q) / hdot(q, q);
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(q) {
                *x = x.clone() - c.clone() * y.clone();
            }
        }
    }
}

/// Mutually orthogonal vectors spanning the rows, by Gram–Schmidt taking the
/// largest remaining residual first. In floating mode rows are first scaled
/// to unit length and residuals below `tol.rank` count as dependent.
pub fn orthogonal_basis<S: Scalar>(rows: &[Vec<S>], tol: &Tol) -> Vec<Vec<S>> {
    let scales: Vec<f64> = rows.iter().map(|r| sq_norm(r).sqrt()).collect();
    orthogonal_basis_scaled(rows, &scales, tol)
}

/// As [`orthogonal_basis`], measuring each row against its own reference
/// norm `scales[i]` instead of its length.
pub fn orthogonal_basis_scaled<S: Scalar>(rows: &[Vec<S>], scales: &[f64], tol: &Tol) -> Vec<Vec<S>> {
    let cutoff = tol.rank;
    let mut rest: Vec<Vec<S>> = if S::EXACT {
        rows.to_vec()
    } else {
        rows.iter()
            .zip(scales)
            .filter(|(_, &sc)| sc > 0.0)
            .map(|(r, &sc)| {
                let inv = S::from_c64(Complex64::new(1.0 / sc, 0.0));
                r.iter().map(|v| v.clone() * inv.clone()).collect()
            })
            .collect()
    };
    let mut out: Vec<Vec<S>> = Vec::new();
    while !rest.is_empty() {
        let (best, norm) = rest
            .iter()
            .enumerate()
            .map(|(i, r)| (i, sq_norm(r).sqrt()))
            .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        let q = rest.swap_remove(best);
        let dependent = if S::EXACT { q.iter().all(S::is_zero) } else { norm <= cutoff };
        if dependent {
            break;
        }
        for r in rest.iter_mut() {
            project_out(r, std::slice::from_ref(&q));
        }
        out.push(q);
    }
    out
}

/// Basis of the right null space `{x : M x = 0}`.
pub fn kernel<S: Scalar>(m: &Mat<S>, tol: &Tol) -> Vec<Vec<S>> {
    let ech = RowEchelon::from_rows(m.to_rows(), m.ncols(), tol);
    let mut is_pivot = vec![false; m.ncols()];
    for &p in ech.pivots() {
        is_pivot[p] = true;
    }
    (0..m.ncols())
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![S::zero(); m.ncols()];
            x[f] = S::one();
            for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Subspace of `S^n`, stored in echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<S> {
    ech: RowEchelon<S>,
    tol: Tol,
}

impl<S: Scalar> Subspace<S> {
    pub fn span(vectors: &[Vec<S>], n: usize, tol: Tol) -> Self {
        Subspace { ech: RowEchelon::from_rows(vectors.to_vec(), n, &tol), tol }
    }

    pub fn zero(n: usize, tol: Tol) -> Self {
        Subspace { ech: RowEchelon::empty(n), tol }
    }

    pub fn full(n: usize, tol: Tol) -> Self {
        let basis: Vec<Vec<S>> = (0..n).map(|i| unit(n, i)).collect();
        Self::span(&basis, n, tol)
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ech.ncols()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        self.ech.rows()
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.ech.contains(v, &self.tol)
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        self.ech.contains_all(&other.ech, &self.tol)
    }

    pub fn same(&self, other: &Self) -> bool {
        self.ech.same_span(&other.ech, &self.tol)
    }

    pub fn sum(&self, other: &Self) -> Self {
        Subspace { ech: self.ech.sum(&other.ech, &self.tol), tol: self.tol }
    }

    /// Hermitian orthogonal complement.
    pub fn orth_complement(&self) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(n, self.tol);
        }
        let m = Mat::from_rows(&self.basis().iter().map(|r| r.iter().map(S::conj).collect()).collect::<Vec<_>>());
        Self::span(&kernel(&m, &self.tol), n, self.tol)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.orth_complement().sum(&other.orth_complement()).orth_complement()
    }

    pub fn map(&self, m: &Mat<S>) -> Self {
        let rows: Vec<Vec<S>> = self.basis().iter().map(|r| m.apply(r)).collect();
        Self::span(&rows, m.nrows(), self.tol)
    }

    /// Hermitian orthogonal projector onto the subspace.
    pub fn projector(&self) -> Mat<S> {
        let n = self.ambient_dim();
        let k = self.dim();
        if k == 0 {
            return Mat::zeros(n, n);
        }
        // P = B (B^H B)^{-1} B^H with B the n×k basis matrix.
        let b = Mat::from_rows(self.basis()).transpose();
        let gram = b.adjoint().matmul(&b);
        let ginv = gram.inverse(&self.tol).expect("basis Gram matrix is positive definite");
        b.matmul(&ginv).matmul(&b.adjoint())
    }
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo8;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn echelon_is_a_normal_form() {
        let tol = Tol::default();
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]];
        let b = vec![
            vec![c(1.0, 0.0), c(3.0, 0.0), c(1.0, 1.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0), c(0.0, 2.0)],
            vec![c(3.0, 0.0), c(7.0, 0.0), c(1.0, 3.0)],
        ];
        let ea = RowEchelon::from_rows(a, 3, &tol);
        let eb = RowEchelon::from_rows(b, 3, &tol);
        assert_eq!(eb.rank(), 2);
        assert!(ea.same_span(&eb, &tol));
    }

    #[test]
    fn kernel_dimension_and_membership() {
        let tol = Tol::default();
        let m = Mat::from_rows(&[
            vec![Cyclo8::from_i64(1), Cyclo8::from_i64(2), Cyclo8::from_i64(3)],
            vec![Cyclo8::from_i64(2), Cyclo8::from_i64(4), Cyclo8::from_i64(6)],
        ]);
        let k = kernel(&m, &tol);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let tol = Tol::default();
        let m = Mat::from_rows(&[vec![c(0.0, 1.0), c(2.0, 0.0)], vec![c(1.0, 0.0), c(1.0, -1.0)]]);
        let inv = m.inverse(&tol).unwrap();
        let id = m.matmul(&inv);
        assert!(id.sub(&Mat::identity(2)).norm() < 1e-14);
        let sing = Mat::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(sing.inverse(&tol).is_none());
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 0.7;
        let m = Mat::from_rows(&[vec![c(0.0, 0.0), c(-t, 0.0)], vec![c(t, 0.0), c(0.0, 0.0)]]);
        let e = m.expm();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn complement_and_intersection() {
        let tol = Tol::default();
        let v = Subspace::span(&[vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]], 3, tol);
        let w = v.orth_complement();
        assert_eq!(w.dim(), 2);
        assert!(v.intersect(&w).dim() == 0);
        let p = v.projector();
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let px = p.apply(&x);
        assert!(px.iter().zip(&x).all(|(a, b)| (a - b).norm() < 1e-14));
    }
}
