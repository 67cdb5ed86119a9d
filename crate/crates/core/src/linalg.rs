//! Dense complex kernels: cyclic Jacobi for Hermitian matrices, one-sided
//! (Hestenes) Jacobi for the SVD, plus rank and unitarity tests.
//!
//! Both solvers are deterministic. Output vectors are phase-canonicalized
//! (largest-magnitude entry made real positive, first index winning ties)
//! and sorted by descending value; exactly equal values are ordered by the
//! lexicographic order of their canonical vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Sweep budget shared by both Jacobi solvers.
pub const MAX_SWEEPS: usize = 100;

/// Relative width used when picking the leading entry of a vector, so that
/// entries equal up to rounding count as a tie.
const LEAD_TIE_REL: f64 = 1e-12;

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, checking length and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: col.len() });
            }
            for (i, &z) in col.iter().enumerate() {
                m.data[i * cols + j] = z;
            }
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, i: usize, j: usize) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product. Panics if the inner dimensions differ.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |self - other|` over entries. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

/// Numerical thresholds used by every decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    rank_rel: f64,
    degen_rel: f64,
    recon_abs: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances { rank_rel: 1e-10, degen_rel: 1e-8, recon_abs: 1e-10 };

    pub fn new(rank_rel: f64, degen_rel: f64, recon_abs: f64) -> Result<Self> {
        let ok = |t: f64| t > 0.0 && t < 1.0;
        if ok(rank_rel) && ok(degen_rel) && ok(recon_abs) {
            Ok(Self { rank_rel, degen_rel, recon_abs })
        } else {
            Err(Error::BadTolerance)
        }
    }

    /// Values at or below `rank_rel * max` count as zero.
    pub fn rank_rel(&self) -> f64 {
        self.rank_rel
    }

    /// Two eigenvalues within `degen_rel` (relative) are treated as equal.
    pub fn degen_rel(&self) -> f64 {
        self.degen_rel
    }

    /// Absolute threshold for reconstruction, normalization and symmetry checks.
    pub fn recon_abs(&self) -> f64 {
        self.recon_abs
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

/// Economy SVD `A = U diag(σ) V†` with `min(rows, cols)` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// `rows x k`, orthonormal columns.
    pub left_vectors: ComplexMatrix,
    /// `cols x k`, orthonormal columns.
    pub right_vectors: ComplexMatrix,
}

impl Svd {
    /// `U diag(σ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let u = &self.left_vectors;
        let v = &self.right_vectors;
        ComplexMatrix::from_fn(u.rows(), v.rows(), |i, j| {
            (0..k).map(|l| u[(i, l)] * self.singular_values[l] * v[(j, l)].conj()).sum()
        })
    }
}

impl HermitianEigen {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..self.eigenvalues.len()).map(|l| v[(i, l)] * self.eigenvalues[l] * v[(j, l)].conj()).sum()
        })
    }
}

/// 2x2 unitary `[[c, s], [-s·conj(φ), c·conj(φ)]]` that diagonalizes the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` under `G† H G`.
#[derive(Clone, Copy)]
struct Rotation {
    g00: C64,
    g01: C64,
    g10: C64,
    g11: C64,
}

impl Rotation {
    fn new(app: f64, aqq: f64, apq: C64) -> Self {
        let mag = apq.norm();
        let phase = apq / mag;
        let tau = (aqq - app) / (2.0 * mag);
        let t =
            if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        let pc = phase.conj();
        Rotation { g00: C64::new(c, 0.0), g01: C64::new(s, 0.0), g10: pc * (-s), g11: pc * c }
    }

    /// `M <- M G` on columns `p`, `q`.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            *m.at_mut(k, p) = mp * self.g00 + mq * self.g10;
            *m.at_mut(k, q) = mp * self.g01 + mq * self.g11;
        }
    }

    /// `M <- G† M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.cols() {
            let mp = m[(p, k)];
            let mq = m[(q, k)];
            *m.at_mut(p, k) = self.g00.conj() * mp + self.g10.conj() * mq;
            *m.at_mut(q, k) = self.g01.conj() * mp + self.g11.conj() * mq;
        }
    }
}

/// Unit phase of the leading (largest-magnitude, lowest index on ties) entry.
pub(crate) fn leading_phase(v: &[C64]) -> C64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let lead = v.iter().find(|z| z.norm() >= max * (1.0 - LEAD_TIE_REL)).copied().unwrap_or(C64::new(1.0, 0.0));
    lead / lead.norm()
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Permutation sorting `values` descending, exact ties broken by `vectors`.
fn descending_order(values: &[f64], vectors: &[Vec<C64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then_with(|| lexicographic(&vectors[i], &vectors[j])));
    order
}

fn max_hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
pub fn hermitian_eigendecompose(a: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let deviation = max_hermitian_deviation(a);
    if deviation > tol.recon_abs() {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    // Work on the exactly Hermitian part.
    let mut w = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();
    let eps = f64::EPSILON;

    let mut sweep = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= (n as f64) * eps * scale {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq.norm() <= eps * eps * scale {
                    continue;
                }
                let rot = Rotation::new(w[(p, p)].re, w[(q, q)].re, apq);
                rot.apply_right(&mut w, p, q);
                rot.apply_left_adjoint(&mut w, p, q);
                *w.at_mut(p, q) = C64::new(0.0, 0.0);
                *w.at_mut(q, p) = C64::new(0.0, 0.0);
                let (dp, dq) = (w[(p, p)].re, w[(q, q)].re);
                *w.at_mut(p, p) = C64::new(dp, 0.0);
                *w.at_mut(q, q) = C64::new(dq, 0.0);
                rot.apply_right(&mut v, p, q);
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let vectors: Vec<Vec<C64>> = v
        .columns()
        .into_iter()
        .map(|col| {
            let ph = leading_phase(&col).conj();
            col.into_iter().map(|z| z * ph).collect()
        })
        .collect();
    let order = descending_order(&values, &vectors);
    let sorted: Vec<Vec<C64>> = order.iter().map(|&k| vectors[k].clone()).collect();
    Ok(HermitianEigen {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: ComplexMatrix::from_columns(n, &sorted)?,
    })
}

/// One-sided Jacobi on a tall (`rows >= cols`) matrix. Returns the
/// orthogonalized columns `A V` and the accumulated `V`.
fn one_sided_jacobi(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let eps = f64::EPSILON;
    let orth_tol = (m as f64) * eps;
    let floor = eps * scale;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || alpha.sqrt() <= floor || beta.sqrt() <= floor {
                    continue;
                }
                if g <= orth_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

/// Replaces the flagged columns of `u` with unit vectors orthogonal to every
/// other column, picked greedily from the standard basis.
fn complete_orthonormal(u: &mut [Vec<C64>], missing: &[bool]) {
    let m = u.first().map_or(0, Vec::len);
    for j in 0..u.len() {
        if !missing[j] {
            continue;
        }
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..m {
            let mut cand = vec![C64::new(0.0, 0.0); m];
            cand[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for (k, col) in u.iter().enumerate() {
                    if k == j || (missing[k] && k > j) {
                        continue;
                    }
                    let proj: C64 = col.iter().zip(&cand).map(|(c, x)| c.conj() * x).sum();
                    for (x, c) in cand.iter_mut().zip(col) {
                        *x -= proj * c;
                    }
                }
            }
            let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b + 1e-12) {
                best = Some((norm, cand));
            }
        }
        if let Some((norm, cand)) = best {
            u[j] = cand.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Economy singular value decomposition by one-sided Jacobi.
pub fn svd(a: &ComplexMatrix, _tol: &Tolerances) -> Result<Svd> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::BadDims("SVD of an empty matrix"));
    }
    if a.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let wide = a.rows() < a.cols();
    let tall = if wide { a.adjoint() } else { a.clone() };
    let (w, v) = one_sided_jacobi(&tall)?;
    let k = tall.cols();
    let scale = a.frobenius_norm();
    let zero_floor = f64::EPSILON * scale * (tall.rows() as f64);

    let mut sigma = Vec::with_capacity(k);
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut missing = vec![false; k];
    for (j, gap) in missing.iter_mut().enumerate() {
        let col = w.column(j);
        let s = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        sigma.push(s);
        if s <= zero_floor || s == 0.0 {
            *gap = true;
            left.push(vec![C64::new(0.0, 0.0); col.len()]);
        } else {
            left.push(col.into_iter().map(|z| z / s).collect());
        }
    }
    complete_orthonormal(&mut left, &missing);
    let right = v.columns();
    let (mut u_cols, mut v_cols) = if wide { (right, left) } else { (left, right) };

    for (u, v) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        let ph = leading_phase(u).conj();
        u.iter_mut().for_each(|z| *z *= ph);
        v.iter_mut().for_each(|z| *z *= ph);
    }
    let order = descending_order(&sigma, &u_cols);
    let u_sorted: Vec<Vec<C64>> = order.iter().map(|&i| u_cols[i].clone()).collect();
    let v_sorted: Vec<Vec<C64>> = order.iter().map(|&i| v_cols[i].clone()).collect();
    Ok(Svd {
        singular_values: order.iter().map(|&i| sigma[i]).collect(),
        left_vectors: ComplexMatrix::from_columns(a.rows(), &u_sorted)?,
        right_vectors: ComplexMatrix::from_columns(a.cols(), &v_sorted)?,
    })
}

/// Number of entries strictly above `rank_rel * max(values)`.
pub fn numerical_rank(values: &[f64], tol: &Tolerances) -> usize {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    let cut = tol.rank_rel() * max;
    values.iter().filter(|&&v| v > cut).count()
}

/// `max |U†U - I|`; `None` if `u` is not square.
pub fn unitarity_deviation(u: &ComplexMatrix) -> Option<f64> {
    if !u.is_square() {
        return None;
    }
    Some(u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.rows())))
}

pub fn is_unitary(u: &ComplexMatrix, tol: &Tolerances) -> bool {
    unitarity_deviation(u).is_some_and(|d| d <= tol.recon_abs())
}

/// `max |⟨v_i|v_j⟩ - δ_ij|` over a list of vectors.
pub fn orthonormality_deviation(vectors: &[Vec<C64>]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((ip - target).norm());
        }
    }
    dev
}
