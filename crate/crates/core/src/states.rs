//! Pure states of two or three parties, partial inner products, partial
//! traces and local unitaries.
//!
//! Amplitudes are stored row-major with party A as the slowest index, so the
//! slices along A are contiguous `N_B x N_C` blocks.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianEigen, Tolerances};
use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// One of the (up to) three subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Party> {
        Party::ALL.get(i).copied()
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
        })
    }
}

/// Amplitude tensor over two or three parties.
///
/// The value may be unnormalized (slices produced by
/// [`partial_inner_product`] keep their norm); [`PureState::validate`]
/// enforces unit norm where an operation needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Structural checks only: 2 or 3 parties, each of dimension ≥ 1,
    /// matching amplitude count, finite entries. Norm is not checked.
    pub fn from_amplitudes(dims: &[usize], amplitudes: Vec<C64>) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(Error::BadDims("expected 2 or 3 parties"));
        }
        if dims.contains(&0) {
            return Err(Error::BadDims("party dimensions must be at least 1"));
        }
        let expected = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or(Error::BadDims("too large"))?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dims: dims.to_vec(), amplitudes })
    }

    /// Structural checks plus unit norm.
    pub fn new(dims: &[usize], amplitudes: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        Self::from_amplitudes(dims, amplitudes)?.validate(tol)
    }

    /// Returns the state unchanged if `|Σ|a|² - 1| ≤ recon_abs`.
    pub fn validate(self, tol: &Tolerances) -> Result<Self> {
        let deviation = self.norm_sqr() - 1.0;
        if deviation.abs() > tol.recon_abs() {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(self)
    }

    /// Bipartite (possibly unnormalized) state from an amplitude matrix.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        Self::from_amplitudes(&[m.rows(), m.cols()], m.as_slice().to_vec())
    }

    /// Computational basis state `|i j k⟩`.
    pub fn basis(dims: &[usize], index: &[usize]) -> Result<Self> {
        if index.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: index.len() });
        }
        if index.iter().zip(dims).any(|(&i, &d)| i >= d) {
            return Err(Error::BadDims("basis index out of range"));
        }
        let total = dims.iter().product();
        let flat = index.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i);
        let mut amps = vec![C64::new(0.0, 0.0); total];
        if flat < total {
            amps[flat] = C64::new(1.0, 0.0);
        }
        Self::from_amplitudes(dims, amps)
    }

    /// `|0…0⟩`.
    pub fn product(dims: &[usize]) -> Result<Self> {
        Self::basis(dims, &vec![0; dims.len()])
    }

    /// `Σ_{i<k} |i…i⟩ / √k` with `k = min(dims)`.
    pub fn ghz(dims: &[usize]) -> Result<Self> {
        let mut state = Self::product(dims)?;
        let k = *dims.iter().min().unwrap_or(&1);
        let amp = C64::new(1.0 / (k as f64).sqrt(), 0.0);
        state.amplitudes.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for i in 0..k {
            let flat = dims.iter().fold(0, |acc, &d| acc * d + i);
            state.amplitudes[flat] = amp;
        }
        Ok(state)
    }

    /// Single-excitation state: equal superposition of `|10…⟩, |01…⟩, …`.
    pub fn w(dims: &[usize]) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::BadDims("W state needs every party of dimension at least 2"));
        }
        let mut state = Self::product(dims)?;
        state.amplitudes[0] = C64::new(0.0, 0.0);
        let amp = C64::new(1.0 / (dims.len() as f64).sqrt(), 0.0);
        for p in 0..dims.len() {
            let flat = dims.iter().enumerate().fold(0, |acc, (q, &d)| acc * d + usize::from(q == p));
            state.amplitudes[flat] = amp;
        }
        Ok(state)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn is_tripartite(&self) -> bool {
        self.dims.len() == 3
    }

    pub fn dim(&self, party: Party) -> Option<usize> {
        self.dims.get(party.index()).copied()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Amplitude at a multi-index (one entry per party).
    pub fn amplitude(&self, index: &[usize]) -> C64 {
        let flat = index.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i);
        self.amplitudes[flat]
    }

    /// Rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { dims: self.dims.clone(), amplitudes: self.amplitudes.iter().map(|z| z / n).collect() })
    }

    /// Bipartite amplitudes as an `N_0 x N_1` matrix.
    pub fn as_matrix(&self) -> Result<ComplexMatrix> {
        if self.dims.len() != 2 {
            return Err(Error::BadDims("expected a bipartite state"));
        }
        ComplexMatrix::from_vec(self.dims[0], self.dims[1], self.amplitudes.clone())
    }

    /// Reshapes the tensor into a matrix whose row index runs over `rows`
    /// (in ascending party order) and whose column index runs over the
    /// remaining parties (also ascending).
    pub fn matricize(&self, rows: &[Party]) -> Result<ComplexMatrix> {
        let layout = Split::new(&self.dims, rows)?;
        let mut m = ComplexMatrix::zeros(layout.row_size, layout.col_size);
        for (flat, &z) in self.amplitudes.iter().enumerate() {
            let (r, c) = layout.locate(flat);
            *m.at_mut(r, c) = z;
        }
        Ok(m)
    }

    /// Inverse of [`PureState::matricize`].
    fn from_matricized(dims: &[usize], rows: &[Party], m: &ComplexMatrix) -> Result<Self> {
        let layout = Split::new(dims, rows)?;
        let total: usize = dims.iter().product();
        let amps = (0..total)
            .map(|flat| {
                let (r, c) = layout.locate(flat);
                m[(r, c)]
            })
            .collect();
        Self::from_amplitudes(dims, amps)
    }
}

/// Index bookkeeping for splitting the parties into row and column groups.
struct Split {
    dims: Vec<usize>,
    in_rows: [bool; 3],
    row_size: usize,
    col_size: usize,
}

impl Split {
    fn new(dims: &[usize], rows: &[Party]) -> Result<Self> {
        let mut in_rows = [false; 3];
        for p in rows {
            let i = p.index();
            if i >= dims.len() {
                return Err(Error::BadDims("party not present in state"));
            }
            if in_rows[i] {
                return Err(Error::BadDims("party listed twice"));
            }
            in_rows[i] = true;
        }
        let row_size = dims.iter().enumerate().filter(|(i, _)| in_rows[*i]).map(|(_, d)| d).product();
        let col_size = dims.iter().enumerate().filter(|(i, _)| !in_rows[*i]).map(|(_, d)| d).product();
        Ok(Self { dims: dims.to_vec(), in_rows, row_size, col_size })
    }

    fn locate(&self, mut flat: usize) -> (usize, usize) {
        let mut digits = [0usize; 3];
        for (i, &d) in self.dims.iter().enumerate().rev() {
            digits[i] = flat % d;
            flat /= d;
        }
        let (mut r, mut c) = (0, 0);
        for (i, &d) in self.dims.iter().enumerate() {
            if self.in_rows[i] {
                r = r * d + digits[i];
            } else {
                c = c * d + digits[i];
            }
        }
        (r, c)
    }
}

/// Reduced density matrix of a normalized state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = linalg::hermitian_eigendecompose(&matrix, tol)?;
        let deviation = matrix.trace().re - 1.0;
        if deviation.abs() > tol.recon_abs() {
            return Err(Error::NotNormalized { deviation });
        }
        if eig.eigenvalues.iter().any(|&l| l < -tol.recon_abs()) {
            return Err(Error::NotHermitian { deviation: -eig.eigenvalues.last().copied().unwrap_or(0.0) });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self, tol: &Tolerances) -> Result<HermitianEigen> {
        linalg::hermitian_eigendecompose(&self.matrix, tol)
    }

    /// Eigenvalues, descending, with rounding negatives clamped to zero.
    pub fn spectrum(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        Ok(self.eigen(tol)?.eigenvalues.into_iter().map(|l| l.max(0.0)).collect())
    }
}

/// `⟨v|_party |ψ⟩`: contracts one party of a tripartite state with `conj(v)`.
///
/// The result is a bipartite vector over the two remaining parties in their
/// original order. It is not renormalized.
pub fn partial_inner_product(state: &PureState, party: Party, vector: &[C64], tol: &Tolerances) -> Result<PureState> {
    if !state.is_tripartite() {
        return Err(Error::BadDims("partial inner product needs a tripartite state"));
    }
    let d = state.dims[party.index()];
    if vector.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: vector.len() });
    }
    let deviation = vector.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0;
    if deviation.abs() > tol.recon_abs() {
        return Err(Error::NotNormalized { deviation });
    }
    let m = state.matricize(&[party])?;
    let contracted = contract_rows(&m, vector);
    let rest: Vec<usize> =
        state.dims.iter().enumerate().filter(|(i, _)| *i != party.index()).map(|(_, &d)| d).collect();
    PureState::from_amplitudes(&rest, contracted)
}

/// `Σ_j conj(v_j) · row_j(m)`.
pub(crate) fn contract_rows(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m.cols()];
    for (j, vj) in v.iter().enumerate() {
        let w = vj.conj();
        for (o, &x) in out.iter_mut().zip(m.row(j)) {
            *o += w * x;
        }
    }
    out
}

/// Traces out every party not in `keep`.
pub fn reduced_density(state: &PureState, keep: &[Party], tol: &Tolerances) -> Result<DensityMatrix> {
    if keep.is_empty() || keep.len() >= state.party_count() {
        return Err(Error::BadDims("keep must be a nonempty proper subset of the parties"));
    }
    let deviation = state.norm_sqr() - 1.0;
    if deviation.abs() > tol.recon_abs() {
        return Err(Error::NotNormalized { deviation });
    }
    let m = state.matricize(keep)?;
    let rho = m.matmul(&m.adjoint());
    // Symmetrize away rounding so the Hermitian check downstream is exact.
    let n = rho.rows();
    let matrix = ComplexMatrix::from_fn(n, n, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
    Ok(DensityMatrix { matrix })
}

/// Applies `U` to one party's index.
pub fn apply_local_unitary(state: &PureState, party: Party, u: &ComplexMatrix, tol: &Tolerances) -> Result<PureState> {
    let d = state.dim(party).ok_or(Error::BadDims("party not present in state"))?;
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: u.rows() });
    }
    let deviation = linalg::unitarity_deviation(u).unwrap_or(f64::INFINITY);
    if deviation > tol.recon_abs() {
        return Err(Error::NotUnitary { deviation });
    }
    let m = state.matricize(&[party])?;
    PureState::from_matricized(&state.dims, &[party], &u.matmul(&m))
}

/// `⟨s1|s2⟩`.
pub fn overlap(s1: &PureState, s2: &PureState) -> Result<C64> {
    if s1.dims != s2.dims {
        return Err(Error::DimensionMismatch { expected: s1.amplitudes.len(), found: s2.amplitudes.len() });
    }
    Ok(s1.amplitudes.iter().zip(&s2.amplitudes).map(|(a, b)| a.conj() * b).sum())
}
