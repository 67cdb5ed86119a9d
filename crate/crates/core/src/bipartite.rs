//! Bipartite Schmidt decomposition, rank and entropy.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerances};
use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// `v = Σ_k c_k |x_k⟩ ⊗ |y_k⟩` with `c` descending and both bases orthonormal.
///
/// Always carries `min(rows, cols)` terms; trailing coefficients may be zero,
/// in which case the corresponding basis vectors are an orthonormal padding.
/// Each left vector has its largest-magnitude entry real positive and the
/// matching phase lives in the right vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteSchmidt {
    coefficients: Vec<f64>,
    left_basis: Vec<Vec<C64>>,
    right_basis: Vec<Vec<C64>>,
    input_norm: f64,
}

impl BipartiteSchmidt {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Squared coefficients.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn left_basis(&self) -> &[Vec<C64>] {
        &self.left_basis
    }

    pub fn right_basis(&self) -> &[Vec<C64>] {
        &self.right_basis
    }

    /// Frobenius norm of the decomposed vector.
    pub fn input_norm(&self) -> f64 {
        self.input_norm
    }

    pub fn rank(&self, tol: &Tolerances) -> usize {
        linalg::numerical_rank(&self.coefficients, tol)
    }

    /// Second coefficient, or zero for a single-term decomposition.
    pub fn residual(&self) -> f64 {
        self.coefficients.get(1).copied().unwrap_or(0.0)
    }

    /// `Σ_k c_k |x_k⟩ ⊗ |y_k⟩` as a `rows x cols` amplitude matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let rows = self.left_basis.first().map_or(0, Vec::len);
        let cols = self.right_basis.first().map_or(0, Vec::len);
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            self.coefficients
                .iter()
                .zip(self.left_basis.iter().zip(&self.right_basis))
                .map(|(&c, (x, y))| x[i] * y[j] * c)
                .sum()
        })
    }
}

/// Schmidt decomposition of a (possibly unnormalized) bipartite amplitude
/// matrix, rows indexing the left party.
pub fn schmidt_decompose(v: &ComplexMatrix, tol: &Tolerances) -> Result<BipartiteSchmidt> {
    let input_norm = v.frobenius_norm();
    if input_norm <= tol.recon_abs() {
        return Err(Error::ZeroVector);
    }
    let svd = linalg::svd(v, tol)?;
    // A = U Σ V†, so the right Schmidt vectors are the conjugated columns of V.
    let right_basis =
        svd.right_vectors.columns().into_iter().map(|col| col.into_iter().map(|z| z.conj()).collect()).collect();
    Ok(BipartiteSchmidt {
        coefficients: svd.singular_values,
        left_basis: svd.left_vectors.columns(),
        right_basis,
        input_norm,
    })
}

pub fn schmidt_rank(v: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    Ok(schmidt_decompose(v, tol)?.rank(tol))
}

/// `-Σ p log₂ p` over the strictly positive entries.
pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    // -0.0 for pure states reads badly in reports.
    h.max(0.0)
}

/// Von Neumann entropy (bits) of either reduced state of a normalized
/// bipartite vector.
pub fn entanglement_entropy(v: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let sd = schmidt_decompose(v, tol)?;
    let deviation = sd.input_norm * sd.input_norm - 1.0;
    if deviation.abs() > tol.recon_abs() {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(entropy_bits(&sd.probabilities()))
}
