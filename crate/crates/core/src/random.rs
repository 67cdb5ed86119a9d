//! Seeded generators for Haar-random states, Haar-random unitaries and
//! states built directly in tripartite Schmidt form.
//!
//! Every generator draws complex Gaussians as pairs of `StandardNormal`
//! samples (real part first) scaled by `1/√2`, so output depends only on the
//! RNG stream.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::PureState;
use crate::C64;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Uniformly distributed unit vector in the joint space.
pub fn haar_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let total: usize = dims.iter().product();
    let amps: Vec<C64> = (0..total).map(|_| complex_gaussian(rng)).collect();
    PureState::from_amplitudes(dims, amps)?.normalized()
}

/// Haar-distributed `n x n` unitary: Gram-Schmidt on a complex Ginibre
/// matrix, column by column (equivalent to QR with a positive-diagonal R).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A draw inside the span of earlier columns has probability zero;
        // redraw rather than divide by a tiny norm.
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_columns(n, &cols).expect("finite by construction")
}

/// Positive weights, at most `min(dims)` of them, rescaled to sum to one.
pub fn normalize_weights(dims: &[usize], weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::BadWeights("at least one weight is required"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::BadWeights("weights must be positive and finite"));
    }
    let min_dim = dims.iter().copied().min().unwrap_or(0);
    if weights.len() > min_dim {
        return Err(Error::BadWeights("more weights than the smallest party dimension"));
    }
    let total: f64 = weights.iter().sum();
    Ok(weights.iter().map(|w| w / total).collect())
}

/// `Σ_i √d_i |x_i⟩ ⊗ |y_i⟩ (⊗ |z_i⟩)` where the basis vectors are the first
/// columns of independent Haar unitaries, drawn in party order.
///
/// Weights are rescaled to sum to one; see [`normalize_weights`].
pub fn schmidt_state<R: Rng + ?Sized>(dims: &[usize], weights: &[f64], rng: &mut R) -> Result<PureState> {
    PureState::from_amplitudes(dims, alloc::vec![C64::new(0.0, 0.0); dims.iter().product()])?;
    let d = normalize_weights(dims, weights)?;
    let unitaries: Vec<ComplexMatrix> = dims.iter().map(|&n| haar_unitary(n, rng)).collect();
    let total: usize = dims.iter().product();
    let amps = (0..total)
        .map(|mut flat| {
            let mut digits = [0usize; 3];
            for (p, &n) in dims.iter().enumerate().rev() {
                digits[p] = flat % n;
                flat /= n;
            }
            d.iter()
                .enumerate()
                .map(|(i, &w)| {
                    unitaries.iter().enumerate().fold(C64::new(w.sqrt(), 0.0), |acc, (p, u)| acc * u[(digits[p], i)])
                })
                .sum()
        })
        .collect();
    PureState::from_amplitudes(dims, amps)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, Tolerances};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 5, 16] {
            assert!(linalg::unitarity_deviation(&haar_unitary(n, &mut rng)).unwrap() < 1e-13);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = schmidt_state(&[2, 3, 3], &[0.5, 0.5], &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = schmidt_state(&[2, 3, 3], &[0.5, 0.5], &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
        let h = haar_state(&[2, 2, 2], &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert!(h.validate(&Tolerances::default()).is_ok());
    }

    #[test]
    fn weight_validation() {
        assert!(matches!(normalize_weights(&[2, 2, 2], &[]), Err(Error::BadWeights(_))));
        assert!(matches!(normalize_weights(&[2, 2, 2], &[0.5, -0.5]), Err(Error::BadWeights(_))));
        assert!(matches!(normalize_weights(&[2, 3, 3], &[0.2, 0.3, 0.5]), Err(Error::BadWeights(_))));
        assert_eq!(normalize_weights(&[3, 3, 3], &[2.0, 1.0, 1.0]).unwrap(), alloc::vec![0.5, 0.25, 0.25]);
    }
}
