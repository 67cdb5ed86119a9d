//! Tripartite Schmidt decomposition via partial inner products.
//!
//! The state is sliced along a pivot party in the eigenbasis `{u_i}` of the
//! pivot's reduced density matrix: `|ψ⟩ = Σ_i |u_i⟩ ⊗ |ψ_i⟩` with
//! `|ψ_i⟩ = ⟨u_i|ψ⟩`. In that basis the slices are mutually orthogonal and
//! `‖ψ_i‖² = p_i`, the pivot eigenvalues. A single-sum decomposition
//! `Σ_i √d_i |x_i⟩|y_i⟩|z_i⟩` exists iff every nonzero slice is a product
//! vector `β_i ⊗ γ_i`; then `d_i = ‖β_i‖²‖γ_i‖² = p_i`.
//!
//! When the pivot spectrum is degenerate the eigenbasis is not unique and
//! the slices of one basis may be entangled while those of another are
//! not. [`refine_degenerate`] searches each degenerate block for a product
//! slicing before anything is declared non-decomposable.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::Range;

use crate::bipartite::{entropy_bits, schmidt_decompose, BipartiteSchmidt};
use crate::error::{Error, Result};
use crate::linalg::{self, leading_phase, ComplexMatrix, Tolerances};
use crate::states::{contract_rows, reduced_density, Party, PureState};
use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Minimum gap, relative to the largest coefficient, between consecutive
/// Schmidt coefficients of a probe vector before its terms are trusted.
const MIN_TERM_GAP: f64 = 1e-3;

/// How a degenerate pivot block was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    NotAttempted,
    /// Every degenerate block was rotated onto product slices.
    Refined,
    /// Some block provably has no product slicing.
    Refuted,
    /// No probe vector had well-separated Schmidt coefficients.
    Inconclusive,
}

/// Slices of a tripartite state along a pivot party, with per-slice
/// Schmidt data.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceAnalysis {
    pivot: Party,
    others: [Party; 2],
    dims: [usize; 3],
    pivot_basis: Vec<Vec<C64>>,
    pivot_spectrum: Vec<f64>,
    slices: Vec<ComplexMatrix>,
    slice_schmidt: Vec<BipartiteSchmidt>,
    slice_ranks: Vec<usize>,
    s_spectrum: Option<Vec<f64>>,
    refinement: Refinement,
}

impl SliceAnalysis {
    pub fn pivot(&self) -> Party {
        self.pivot
    }

    /// The two non-pivot parties, ascending; slice matrices are indexed
    /// `[others[0], others[1]]`.
    pub fn others(&self) -> [Party; 2] {
        self.others
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Full eigenbasis of the pivot's reduced density matrix.
    pub fn pivot_basis(&self) -> &[Vec<C64>] {
        &self.pivot_basis
    }

    /// Pivot eigenvalues `p_i`, descending, clamped at zero.
    pub fn pivot_spectrum(&self) -> &[f64] {
        &self.pivot_spectrum
    }

    /// Number of slices kept (nonzero pivot eigenvalues).
    pub fn retained(&self) -> usize {
        self.slices.len()
    }

    /// Unnormalized slices `⟨u_i|ψ⟩` for the retained eigenvectors.
    pub fn slices(&self) -> &[ComplexMatrix] {
        &self.slices
    }

    /// Schmidt data `√p_μ^(i)`, `|y_μ⟩`, `|z_μ⟩` of each slice.
    pub fn slice_schmidt(&self) -> &[BipartiteSchmidt] {
        &self.slice_schmidt
    }

    pub fn slice_ranks(&self) -> &[usize] {
        &self.slice_ranks
    }

    /// `s_μ = Σ_i p_μ^(i)` when all slices share one pair of Schmidt bases;
    /// `None` when no shared basis was detected. Detection uses the
    /// eigenbasis of the first non-pivot party and can miss a shared basis
    /// when that spectrum is itself degenerate.
    pub fn s_spectrum(&self) -> Option<&[f64]> {
        self.s_spectrum.as_deref()
    }

    pub fn refinement(&self) -> Refinement {
        self.refinement
    }

    pub fn all_rank_one(&self) -> bool {
        self.slice_ranks.iter().all(|&r| r == 1)
    }

    /// Largest second Schmidt coefficient over all slices.
    pub fn max_residual(&self) -> f64 {
        self.slice_schmidt.iter().map(BipartiteSchmidt::residual).fold(0.0, f64::max)
    }

    /// Runs of retained pivot eigenvalues whose neighbours differ by at most
    /// `degen_rel` relative to the larger one.
    pub fn degenerate_groups(&self, tol: &Tolerances) -> Vec<Range<usize>> {
        let values = &self.pivot_spectrum[..self.retained()];
        let mut groups = Vec::new();
        let mut start = 0;
        for j in 1..=values.len() {
            if j == values.len() || values[j - 1] - values[j] > tol.degen_rel() * values[j - 1] {
                groups.push(start..j);
                start = j;
            }
        }
        groups
    }

    pub fn is_degenerate(&self, tol: &Tolerances) -> bool {
        self.degenerate_groups(tol).iter().any(|g| g.len() > 1)
    }
}

/// Weights and three bases of `Σ_i √d_i |x_i⟩ ⊗ |y_i⟩ ⊗ |z_i⟩`.
///
/// Weights are descending. In every term the leading entries of the A and B
/// vectors are real positive; the C vector carries the remaining phase. A
/// party of dimension one repeats its single basis vector in every term.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteSchmidt {
    dims: [usize; 3],
    weights: Vec<f64>,
    bases: [Vec<Vec<C64>>; 3],
}

impl TripartiteSchmidt {
    /// Validates and sorts a decomposition given term by term.
    pub fn from_parts(
        dims: [usize; 3],
        weights: Vec<f64>,
        bases: [Vec<Vec<C64>>; 3],
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::BadWeights("a decomposition needs at least one term"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::BadWeights("weights must be nonnegative"));
        }
        let deviation = weights.iter().sum::<f64>() - 1.0;
        if deviation.abs() > tol.recon_abs() {
            return Err(Error::NotNormalized { deviation });
        }
        for (p, basis) in bases.iter().enumerate() {
            if basis.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: basis.len() });
            }
            if let Some(v) = basis.iter().find(|v| v.len() != dims[p]) {
                return Err(Error::DimensionMismatch { expected: dims[p], found: v.len() });
            }
            let deviation = basis_deviation(dims[p], basis);
            if deviation > tol.recon_abs() {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(Self::sorted(dims, weights, bases))
    }

    fn sorted(dims: [usize; 3], weights: Vec<f64>, bases: [Vec<Vec<C64>>; 3]) -> Self {
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]));
        let pick = |b: &Vec<Vec<C64>>| order.iter().map(|&i| b[i].clone()).collect::<Vec<_>>();
        Self {
            dims,
            weights: order.iter().map(|&i| weights[i]).collect(),
            bases: [pick(&bases[0]), pick(&bases[1]), pick(&bases[2])],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// `d_i`, descending.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self, party: Party) -> &[Vec<C64>] {
        &self.bases[party.index()]
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_i √d_i x_i ⊗ y_i ⊗ z_i`, normalized.
    pub fn reconstruct(&self) -> Result<PureState> {
        let [na, nb, nc] = self.dims;
        let mut amps = vec![C64::new(0.0, 0.0); na * nb * nc];
        for (t, &w) in self.weights.iter().enumerate() {
            let s = w.sqrt();
            let (x, y, z) = (&self.bases[0][t], &self.bases[1][t], &self.bases[2][t]);
            for i in 0..na {
                let xi = x[i] * s;
                for j in 0..nb {
                    let xy = xi * y[j];
                    for k in 0..nc {
                        amps[(i * nb + j) * nc + k] += xy * z[k];
                    }
                }
            }
        }
        PureState::from_amplitudes(&self.dims, amps)?.normalized()
    }
}

/// Orthonormality deviation, ignoring one-dimensional parties.
fn basis_deviation(dim: usize, basis: &[Vec<C64>]) -> f64 {
    if dim == 1 {
        basis.iter().map(|v| (v[0].norm() - 1.0).abs()).fold(0.0, f64::max)
    } else {
        linalg::orthonormality_deviation(basis)
    }
}

/// Result of [`check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub decomposable: bool,
    /// Present exactly when `decomposable`.
    pub decomposition: Option<TripartiteSchmidt>,
    /// Slicing behind the verdict (the refined one if refinement succeeded).
    pub analysis: SliceAnalysis,
    /// The retained pivot spectrum has a degenerate group, so the
    /// decomposition (if any) is not unique.
    pub degenerate: bool,
    /// Largest second Schmidt coefficient across slices.
    pub max_residual: f64,
}

/// Outcome of one pivot in [`check_all_pivots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotOutcome {
    Decomposable,
    NotDecomposable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotVerdict {
    pub pivot: Party,
    pub outcome: PivotOutcome,
    pub max_residual: f64,
}

/// Single-party spectra, the `BC` spectrum and the equality flags between
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub rho_a: Vec<f64>,
    pub rho_b: Vec<f64>,
    pub rho_c: Vec<f64>,
    pub rho_bc: Vec<f64>,
    pub a_eq_b: bool,
    pub a_eq_c: bool,
    pub b_eq_c: bool,
    pub a_eq_bc: bool,
}

impl SpectrumReport {
    /// Von Neumann entropy (bits) of `ρ_A`, `ρ_B`, `ρ_C`.
    pub fn entropies(&self) -> [f64; 3] {
        [entropy_bits(&self.rho_a), entropy_bits(&self.rho_b), entropy_bits(&self.rho_c)]
    }
}

fn tripartite_dims(state: &PureState) -> Result<[usize; 3]> {
    match *state.dims() {
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::BadDims("expected a tripartite state")),
    }
}

fn require_normalized(state: &PureState, tol: &Tolerances) -> Result<()> {
    let deviation = state.norm_sqr() - 1.0;
    if deviation.abs() > tol.recon_abs() {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(())
}

/// Smallest party of dimension > 1, ties resolved A, B, C. One-dimensional
/// parties are skipped so a state with a trivial party reduces to the
/// bipartite case.
pub fn default_pivot(dims: [usize; 3]) -> Party {
    Party::ALL.into_iter().filter(|p| dims[p.index()] > 1).min_by_key(|p| dims[p.index()]).unwrap_or(Party::A)
}

fn others_of(pivot: Party) -> [Party; 2] {
    match pivot {
        Party::A => [Party::B, Party::C],
        Party::B => [Party::A, Party::C],
        Party::C => [Party::A, Party::B],
    }
}

/// Slices the state along [`default_pivot`].
pub fn analyze(state: &PureState, tol: &Tolerances) -> Result<SliceAnalysis> {
    let dims = tripartite_dims(state)?;
    analyze_with_pivot(state, default_pivot(dims), tol)
}

/// Slices the state in the eigenbasis of `ρ_pivot`, keeping the slices of
/// the nonzero eigenvalues.
pub fn analyze_with_pivot(state: &PureState, pivot: Party, tol: &Tolerances) -> Result<SliceAnalysis> {
    let dims = tripartite_dims(state)?;
    require_normalized(state, tol)?;
    let eig = reduced_density(state, &[pivot], tol)?.eigen(tol)?;
    let spectrum: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let basis = eig.eigenvectors.columns();
    // Slices with norm at the reconstruction floor are treated as zero too.
    let floor = tol.recon_abs() * tol.recon_abs();
    let retained = linalg::numerical_rank(&spectrum, tol).min(spectrum.iter().filter(|&&p| p > floor).count());

    let others = others_of(pivot);
    let (r, c) = (dims[others[0].index()], dims[others[1].index()]);
    let m = state.matricize(&[pivot])?;
    let slices = basis[..retained]
        .iter()
        .map(|u| ComplexMatrix::from_vec(r, c, contract_rows(&m, u)))
        .collect::<Result<Vec<_>>>()?;

    let mut analysis = SliceAnalysis {
        pivot,
        others,
        dims,
        pivot_basis: basis,
        pivot_spectrum: spectrum,
        slices,
        slice_schmidt: Vec::new(),
        slice_ranks: Vec::new(),
        s_spectrum: None,
        refinement: Refinement::NotAttempted,
    };
    fill_slice_data(&mut analysis, tol)?;
    Ok(analysis)
}

fn fill_slice_data(analysis: &mut SliceAnalysis, tol: &Tolerances) -> Result<()> {
    analysis.slice_schmidt = analysis.slices.iter().map(|s| schmidt_decompose(s, tol)).collect::<Result<_>>()?;
    analysis.slice_ranks = analysis.slice_schmidt.iter().map(|sd| sd.rank(tol)).collect();
    analysis.s_spectrum = shared_slice_spectrum(&analysis.slices, tol)?;
    Ok(())
}

/// Detects a pair of Schmidt bases shared by all slices. In the eigenbasis
/// `{y_μ}` of `Σ_i S_i S_i†`, row `μ` of every `Y† S_i` must be parallel to
/// one common `z_μ`, and the `z_μ` must be orthogonal. Returns the
/// eigenvalues `s_μ` on success.
fn shared_slice_spectrum(slices: &[ComplexMatrix], tol: &Tolerances) -> Result<Option<Vec<f64>>> {
    let Some(first) = slices.first() else {
        return Ok(None);
    };
    let (r, c) = (first.rows(), first.cols());
    let mut rho = ComplexMatrix::zeros(r, r);
    for s in slices {
        let g = s.matmul(&s.adjoint());
        rho = ComplexMatrix::from_fn(r, r, |i, j| rho[(i, j)] + g[(i, j)]);
    }
    let rho = ComplexMatrix::from_fn(r, r, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
    let eig = linalg::hermitian_eigendecompose(&rho, tol)?;
    let s_values: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let nonzero = linalg::numerical_rank(&s_values, tol);
    let ydag = eig.eigenvectors.adjoint();
    let rotated: Vec<ComplexMatrix> = slices.iter().map(|s| ydag.matmul(s)).collect();

    let direction_tol = tol.rank_rel().sqrt();
    let mut directions: Vec<Vec<C64>> = Vec::with_capacity(nonzero);
    for mu in 0..nonzero {
        let rows = ComplexMatrix::from_fn(rotated.len(), c, |i, k| rotated[i][(mu, k)]);
        let svd = linalg::svd(&rows, tol)?;
        if linalg::numerical_rank(&svd.singular_values, tol) > 1 {
            return Ok(None);
        }
        directions.push(svd.right_vectors.column(0));
    }
    for (i, a) in directions.iter().enumerate() {
        for b in &directions[i + 1..] {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            if ip.norm() > direction_tol {
                return Ok(None);
            }
        }
    }
    Ok(Some(s_values))
}

/// Builds the decomposition from an analysis whose slices are all rank one.
pub fn construct(analysis: &SliceAnalysis, tol: &Tolerances) -> Result<TripartiteSchmidt> {
    let _ = tol;
    if let Some((slice, &rank)) = analysis.slice_ranks.iter().enumerate().find(|(_, &r)| r != 1) {
        return Err(Error::RankNotOne { slice, rank });
    }
    let n = analysis.retained();
    let mut weights = Vec::with_capacity(n);
    let mut bases: [Vec<Vec<C64>>; 3] = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let [o1, o2] = analysis.others;
    for i in 0..n {
        let sd = &analysis.slice_schmidt[i];
        let sigma = sd.coefficients()[0];
        let mut term: [Vec<C64>; 3] = Default::default();
        term[analysis.pivot.index()] = analysis.pivot_basis[i].clone();
        term[o1.index()] = sd.left_basis()[0].clone();
        term[o2.index()] = sd.right_basis()[0].clone();

        let pa = leading_phase(&term[0]);
        let pb = leading_phase(&term[1]);
        term[0].iter_mut().for_each(|z| *z *= pa.conj());
        term[1].iter_mut().for_each(|z| *z *= pb.conj());
        term[2].iter_mut().for_each(|z| *z *= pa * pb);

        weights.push(sigma * sigma);
        let [a, b, c] = term;
        bases[0].push(a);
        bases[1].push(b);
        bases[2].push(c);
    }
    Ok(TripartiteSchmidt::sorted(analysis.dims, weights, bases))
}

enum BlockResolution {
    /// Row `j` holds the coefficients of the new pivot vector `j` in the
    /// block's old eigenvectors.
    Rotation(Vec<Vec<C64>>),
    Refuted,
    Inconclusive,
}

/// Deterministic, generic-looking mixing weights for probe `attempt`.
fn probe_weight(i: usize, attempt: usize) -> C64 {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    const SILVER: f64 = 0.414_213_562_373_095_1;
    let frac = |x: f64| x - x.floor();
    let mag = 1.0 + frac(((i + 1) * (attempt + 1)) as f64 * GOLDEN);
    let angle = TAU * frac(((i + 1) * (attempt + 3)) as f64 * SILVER);
    C64::from_polar(mag, angle)
}

/// Looks for orthonormal product vectors spanning the slices of one
/// degenerate block.
///
/// If the block admits a product slicing `{b_k ⊗ c_k}` (orthogonal `b`s and
/// `c`s), any vector in its span is `Σ α_k b_k ⊗ c_k`, already in Schmidt
/// form. A generic combination has distinct `|α_k|`, so its Schmidt terms
/// are exactly the `b_k ⊗ c_k`. A probe with separated coefficients whose
/// terms leave the span, or whose rank exceeds the block size, therefore
/// rules the slicing out.
fn resolve_block(slices: &[ComplexMatrix], tol: &Tolerances) -> Result<BlockResolution> {
    let k = slices.len();
    let (r, c) = (slices[0].rows(), slices[0].cols());
    let unit: Vec<Vec<C64>> = slices
        .iter()
        .map(|s| {
            let n = s.frobenius_norm();
            s.as_slice().iter().map(|z| z / n).collect()
        })
        .collect();
    let membership_tol = tol.rank_rel().sqrt();

    for attempt in 0..2 * k {
        let mut probe = vec![C64::new(0.0, 0.0); r * c];
        for (i, q) in unit.iter().enumerate() {
            let w = probe_weight(i, attempt);
            probe.iter_mut().zip(q).for_each(|(p, x)| *p += w * x);
        }
        let sd = schmidt_decompose(&ComplexMatrix::from_vec(r, c, probe)?, tol)?;
        let coeffs = sd.coefficients();
        let rank = sd.rank(tol);
        if rank > k {
            return Ok(BlockResolution::Refuted);
        }
        if rank < k {
            continue;
        }
        let scale = coeffs[0];
        if (0..k - 1).any(|j| coeffs[j] - coeffs[j + 1] <= MIN_TERM_GAP * scale) {
            continue;
        }

        let mut rotation = Vec::with_capacity(k);
        for j in 0..k {
            let (x, y) = (&sd.left_basis()[j], &sd.right_basis()[j]);
            let term: Vec<C64> = (0..r * c).map(|f| x[f / c] * y[f % c]).collect();
            let mut residual = term.clone();
            for q in &unit {
                let a: C64 = q.iter().zip(&term).map(|(qq, t)| qq.conj() * t).sum();
                residual.iter_mut().zip(q).for_each(|(res, qq)| *res -= a * qq);
            }
            if residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() > membership_tol {
                return Ok(BlockResolution::Refuted);
            }
            // ⟨t_j|ψ_i⟩ ∝ ⟨u_i|x_j⟩, the coordinates of the new pivot vector.
            let coords: Vec<C64> =
                slices.iter().map(|s| term.iter().zip(s.as_slice()).map(|(t, z)| t.conj() * z).sum()).collect();
            rotation.push(coords);
        }
        orthonormalize(&mut rotation);
        return Ok(BlockResolution::Rotation(rotation));
    }
    Ok(BlockResolution::Inconclusive)
}

/// Modified Gram-Schmidt, in place.
fn orthonormalize(vectors: &mut [Vec<C64>]) {
    for j in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, a)| *x -= proj * a);
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|z| *z /= n);
        }
    }
}

/// Rotates each degenerate block of the pivot eigenbasis onto product
/// slices when possible.
///
/// Returns the analysis unchanged if nothing needs refining; otherwise the
/// result carries [`Refinement::Refined`] with rotated slices, or the
/// original slices flagged [`Refinement::Refuted`] / [`Refinement::Inconclusive`].
pub fn refine_degenerate(analysis: &SliceAnalysis, tol: &Tolerances) -> Result<SliceAnalysis> {
    let groups = analysis.degenerate_groups(tol);
    let flagged = |flag| {
        let mut out = analysis.clone();
        out.refinement = flag;
        out
    };
    if groups.iter().any(|g| g.len() == 1 && analysis.slice_ranks[g.start] != 1) {
        return Ok(flagged(Refinement::Refuted));
    }
    let mut out = analysis.clone();
    let mut changed = false;
    for g in groups.into_iter().filter(|g| g.len() > 1) {
        if analysis.slice_ranks[g.clone()].iter().all(|&r| r == 1) {
            continue;
        }
        let rotation = match resolve_block(&analysis.slices[g.clone()], tol)? {
            BlockResolution::Rotation(rot) => rot,
            BlockResolution::Refuted => return Ok(flagged(Refinement::Refuted)),
            BlockResolution::Inconclusive => return Ok(flagged(Refinement::Inconclusive)),
        };
        let (r, c) = (analysis.slices[g.start].rows(), analysis.slices[g.start].cols());
        let d = analysis.pivot_basis[g.start].len();
        let mut block: Vec<(f64, Vec<C64>, ComplexMatrix)> = Vec::with_capacity(g.len());
        for coords in &rotation {
            let mut u = vec![C64::new(0.0, 0.0); d];
            let mut slice = vec![C64::new(0.0, 0.0); r * c];
            for (i, &w) in coords.iter().enumerate() {
                let old = g.start + i;
                u.iter_mut().zip(&analysis.pivot_basis[old]).for_each(|(x, y)| *x += w * y);
                // ⟨Σ w_i u_i|ψ⟩ = Σ conj(w_i) ψ_i
                slice.iter_mut().zip(analysis.slices[old].as_slice()).for_each(|(x, y)| *x += w.conj() * y);
            }
            let slice = ComplexMatrix::from_vec(r, c, slice)?;
            let p = slice.frobenius_norm().powi(2);
            block.push((p, u, slice));
        }
        block.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (offset, (p, u, slice)) in block.into_iter().enumerate() {
            out.pivot_spectrum[g.start + offset] = p;
            out.pivot_basis[g.start + offset] = u;
            out.slices[g.start + offset] = slice;
        }
        changed = true;
    }
    if !changed {
        return Ok(out);
    }
    fill_slice_data(&mut out, tol)?;
    if !out.all_rank_one() {
        return Ok(flagged(Refinement::Inconclusive));
    }
    out.refinement = Refinement::Refined;
    Ok(out)
}

/// Decides decomposability with the [`default_pivot`].
pub fn check(state: &PureState, tol: &Tolerances) -> Result<Verdict> {
    let dims = tripartite_dims(state)?;
    check_with_pivot(state, default_pivot(dims), tol)
}

/// Decides decomposability slicing along `pivot`.
///
/// Returns [`Error::Indeterminate`] when a degenerate block can neither be
/// rotated onto product slices nor ruled out.
pub fn check_with_pivot(state: &PureState, pivot: Party, tol: &Tolerances) -> Result<Verdict> {
    let analysis = analyze_with_pivot(state, pivot, tol)?;
    let degenerate = analysis.is_degenerate(tol);
    let accept = |analysis: SliceAnalysis| -> Result<Verdict> {
        let decomposition = construct(&analysis, tol)?;
        Ok(Verdict {
            decomposable: true,
            decomposition: Some(decomposition),
            degenerate,
            max_residual: analysis.max_residual(),
            analysis,
        })
    };
    let reject = |analysis: SliceAnalysis| Verdict {
        decomposable: false,
        decomposition: None,
        degenerate,
        max_residual: analysis.max_residual(),
        analysis,
    };

    if analysis.all_rank_one() {
        return accept(analysis);
    }
    if !degenerate {
        return Ok(reject(analysis));
    }
    let max_residual = analysis.max_residual();
    let refined = match refine_degenerate(&analysis, tol) {
        Ok(refined) => refined,
        Err(Error::NoConvergence { .. }) => return Err(Error::Indeterminate { max_residual }),
        Err(e) => return Err(e),
    };
    match refined.refinement {
        Refinement::Refined => accept(refined),
        Refinement::Refuted => Ok(reject(refined)),
        Refinement::NotAttempted | Refinement::Inconclusive => Err(Error::Indeterminate { max_residual }),
    }
}

/// Runs [`check_with_pivot`] for each party of an equal-dimension state.
pub fn check_all_pivots(state: &PureState, tol: &Tolerances) -> Result<Vec<PivotVerdict>> {
    let dims = tripartite_dims(state)?;
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(Error::BadDims("all-pivot mode needs equal party dimensions"));
    }
    Party::ALL
        .into_iter()
        .map(|pivot| match check_with_pivot(state, pivot, tol) {
            Ok(v) => Ok(PivotVerdict {
                pivot,
                outcome: if v.decomposable { PivotOutcome::Decomposable } else { PivotOutcome::NotDecomposable },
                max_residual: v.max_residual,
            }),
            Err(Error::Indeterminate { max_residual }) => {
                Ok(PivotVerdict { pivot, outcome: PivotOutcome::Indeterminate, max_residual })
            }
            Err(e) => Err(e),
        })
        .collect()
}

/// Keeps entries above `rank_rel * max`, zeroes the rest.
fn nonzero_part(values: &[f64], tol: &Tolerances) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().map(|&v| if v > tol.rank_rel() * max { v } else { 0.0 }).collect()
}

/// Entrywise comparison of the nonzero parts, zero-padded to equal length.
pub fn spectra_match(x: &[f64], y: &[f64], tol: &Tolerances) -> bool {
    let (x, y) = (nonzero_part(x, tol), nonzero_part(y, tol));
    let n = x.len().max(y.len());
    (0..n).all(|i| {
        let a = x.get(i).copied().unwrap_or(0.0);
        let b = y.get(i).copied().unwrap_or(0.0);
        (a - b).abs() <= tol.recon_abs()
    })
}

/// Spectra of `ρ_A`, `ρ_B`, `ρ_C`, `ρ_BC`, descending, with equality flags.
pub fn spectrum_report(state: &PureState, tol: &Tolerances) -> Result<SpectrumReport> {
    tripartite_dims(state)?;
    let spec = |keep: &[Party]| reduced_density(state, keep, tol)?.spectrum(tol);
    let rho_a = spec(&[Party::A])?;
    let rho_b = spec(&[Party::B])?;
    let rho_c = spec(&[Party::C])?;
    let rho_bc = spec(&[Party::B, Party::C])?;
    Ok(SpectrumReport {
        a_eq_b: spectra_match(&rho_a, &rho_b, tol),
        a_eq_c: spectra_match(&rho_a, &rho_c, tol),
        b_eq_c: spectra_match(&rho_b, &rho_c, tol),
        a_eq_bc: spectra_match(&rho_a, &rho_bc, tol),
        rho_a,
        rho_b,
        rho_c,
        rho_bc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::states::{apply_local_unitary, overlap};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn hadamard() -> ComplexMatrix {
        let h = C64::new(1.0 / 2f64.sqrt(), 0.0);
        ComplexMatrix::from_vec(2, 2, vec![h, h, h, -h]).unwrap()
    }

    fn max_diff(x: &PureState, y: &PureState) -> f64 {
        x.amplitudes().iter().zip(y.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn e(n: usize, i: usize) -> Vec<C64> {
        (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn analyze_ghz() {
        let a = analyze(&PureState::ghz(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert_eq!(a.pivot(), Party::A);
        assert!(a.pivot_spectrum().iter().all(|p| (p - 0.5).abs() < 1e-15));
        assert_eq!(a.slice_ranks(), &[1, 1]);
        assert_eq!(a.refinement(), Refinement::NotAttempted);
    }

    #[test]
    fn analyze_w() {
        let a = analyze(&PureState::w(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert!((a.pivot_spectrum()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((a.pivot_spectrum()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.slice_ranks(), &[2, 1]);
        for (s, p) in a.slices().iter().zip(a.pivot_spectrum()) {
            assert!((s.frobenius_norm().powi(2) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn analyze_product() {
        let a = analyze(&PureState::product(&[2, 3, 2]).unwrap(), &tol()).unwrap();
        assert_eq!(a.retained(), 1);
        assert_eq!(a.slice_ranks(), &[1]);
    }

    #[test]
    fn pivot_choice() {
        assert_eq!(default_pivot([2, 2, 2]), Party::A);
        assert_eq!(default_pivot([3, 2, 2]), Party::B);
        assert_eq!(default_pivot([4, 3, 2]), Party::C);
        assert_eq!(default_pivot([3, 3, 1]), Party::A);
        assert_eq!(default_pivot([1, 3, 2]), Party::C);
        assert_eq!(default_pivot([1, 1, 1]), Party::A);
    }

    #[test]
    fn check_ghz_and_w() {
        let v = check(&PureState::ghz(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert!(v.decomposable && v.degenerate);
        let w = v.decomposition.unwrap().weights().to_vec();
        assert!(w.iter().all(|d| (d - 0.5).abs() < 1e-10));

        let v = check(&PureState::w(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert!(!v.decomposable && !v.degenerate && v.decomposition.is_none());
        // Closed-form SVD of (|01⟩+|10⟩)/√3: both singular values are 1/√3.
        assert!((v.max_residual - 1.0 / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn check_generated_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let s = random::schmidt_state(&[3, 4, 5], &[0.5, 0.3, 0.2], &mut rng).unwrap();
        let v = check(&s, &tol()).unwrap();
        assert!(v.decomposable);
        let sd = v.decomposition.unwrap();
        for (got, want) in sd.weights().iter().zip([0.5, 0.3, 0.2]) {
            assert!((got - want).abs() < 1e-8);
        }
        for p in Party::ALL {
            assert!(linalg::orthonormality_deviation(sd.basis(p)) < 1e-10);
        }
        assert!(overlap(&sd.reconstruct().unwrap(), &s).unwrap().norm() > 1.0 - 1e-10);
    }

    #[test]
    fn construct_examples() {
        let a = analyze(&PureState::ghz(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        let sd = construct(&a, &tol()).unwrap();
        assert_eq!(sd.len(), 2);
        for p in Party::ALL {
            for v in sd.basis(p) {
                // Computational basis vectors up to phase.
                assert_eq!(v.iter().filter(|z| z.norm() > 1e-12).count(), 1);
            }
        }
        let a = analyze(&PureState::product(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert_eq!(construct(&a, &tol()).unwrap().weights(), &[1.0]);

        let d: [f64; 3] = [0.7, 0.2, 0.1];
        let mut amps = vec![C64::new(0.0, 0.0); 27];
        for (i, w) in d.iter().enumerate() {
            amps[(i * 3 + i) * 3 + i] = C64::new(w.sqrt(), 0.0);
        }
        let s = PureState::new(&[3, 3, 3], amps, &tol()).unwrap();
        let sd = construct(&analyze(&s, &tol()).unwrap(), &tol()).unwrap();
        for (got, want) in sd.weights().iter().zip(d) {
            assert!((got - want).abs() < 1e-10);
        }

        let w = analyze(&PureState::w(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert_eq!(construct(&w, &tol()), Err(Error::RankNotOne { slice: 0, rank: 2 }));
    }

    #[test]
    fn refine_leaves_ghz_alone() {
        let a = analyze(&PureState::ghz(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert_eq!(refine_degenerate(&a, &tol()).unwrap(), a);
    }

    #[test]
    fn refine_recovers_rotated_ghz() {
        let ghz = PureState::ghz(&[2, 2, 2]).unwrap();
        let rotated = apply_local_unitary(&ghz, Party::A, &hadamard(), &tol()).unwrap();
        let a = analyze(&rotated, &tol()).unwrap();
        // Eigenbasis of I/2 is the computational one, whose slices are Bell-like.
        assert_eq!(a.slice_ranks(), &[2, 2]);
        let r = refine_degenerate(&a, &tol()).unwrap();
        assert_eq!(r.refinement(), Refinement::Refined);
        assert_eq!(r.slice_ranks(), &[1, 1]);
        let v = check(&rotated, &tol()).unwrap();
        assert!(v.decomposable && v.degenerate);
        let sd = v.decomposition.unwrap();
        assert!(sd.weights().iter().all(|d| (d - 0.5).abs() < 1e-9));
        assert!(overlap(&sd.reconstruct().unwrap(), &rotated).unwrap().norm() > 1.0 - 1e-10);
    }

    #[test]
    fn refinement_refutes_degenerate_non_decomposable() {
        // (|0⟩|Φ+⟩ + |1⟩|01⟩)/√2: ρ_A = I/2, and ⟨a|ψ⟩ is a product only
        // when a ∝ |1⟩, so no orthonormal pivot basis gives product slices.
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0] = C64::new(0.5, 0.0); // 000
        amps[3] = C64::new(0.5, 0.0); // 011
        amps[5] = C64::new(1.0 / 2f64.sqrt(), 0.0); // 101
        let s = PureState::new(&[2, 2, 2], amps, &tol()).unwrap();
        let v = check(&s, &tol()).unwrap();
        assert!(!v.decomposable && v.degenerate);
        assert_eq!(v.analysis.refinement(), Refinement::Refuted);
    }

    #[test]
    fn antisymmetric_state_is_indeterminate() {
        // Σ ε_ijk |ijk⟩/√6: every combination of slices is an antisymmetric
        // 3x3 matrix, so probes never reach rank 3.
        let v = 1.0 / 6f64.sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); 27];
        for (i, j, k, sign) in
            [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)]
        {
            amps[(i * 3 + j) * 3 + k] = C64::new(sign * v, 0.0);
        }
        let s = PureState::new(&[3, 3, 3], amps, &tol()).unwrap();
        let a = analyze(&s, &tol()).unwrap();
        assert_eq!(a.slice_ranks(), &[2, 2, 2]);
        assert_eq!(refine_degenerate(&a, &tol()).unwrap().refinement(), Refinement::Inconclusive);
        match check(&s, &tol()) {
            Err(Error::Indeterminate { max_residual }) => assert!((max_residual - v).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reconstruct_examples() {
        let t = tol();
        let sd = TripartiteSchmidt::from_parts(
            [2, 2, 2],
            vec![0.5, 0.5],
            [vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)]],
            &t,
        )
        .unwrap();
        assert!(max_diff(&sd.reconstruct().unwrap(), &PureState::ghz(&[2, 2, 2]).unwrap()) < 1e-15);

        let sd = TripartiteSchmidt::from_parts([2, 3, 2], vec![1.0], [vec![e(2, 1)], vec![e(3, 2)], vec![e(2, 0)]], &t)
            .unwrap();
        assert_eq!(sd.reconstruct().unwrap(), PureState::basis(&[2, 3, 2], &[1, 2, 0]).unwrap());

        assert!(TripartiteSchmidt::from_parts(
            [2, 2, 2],
            vec![0.5, 0.5],
            [vec![e(2, 0), e(2, 0)], vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)],],
            &t
        )
        .is_err());
    }

    #[test]
    fn spectrum_report_examples() {
        let t = tol();
        let r = spectrum_report(&PureState::ghz(&[2, 2, 2]).unwrap(), &t).unwrap();
        for s in [&r.rho_a, &r.rho_b, &r.rho_c] {
            assert!(s.iter().all(|p| (p - 0.5).abs() < 1e-15));
        }
        assert!(r.a_eq_b && r.a_eq_c && r.b_eq_c && r.a_eq_bc);
        assert!(r.entropies().iter().all(|h| (h - 1.0).abs() < 1e-12));

        let w = PureState::w(&[2, 2, 2]).unwrap();
        let r = spectrum_report(&w, &t).unwrap();
        for s in [&r.rho_a, &r.rho_b, &r.rho_c] {
            assert!((s[0] - 2.0 / 3.0).abs() < 1e-10 && (s[1] - 1.0 / 3.0).abs() < 1e-10);
        }
        assert!(r.a_eq_b && r.a_eq_c && r.b_eq_c && r.a_eq_bc);
        assert!(!check(&w, &t).unwrap().decomposable);

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let s = random::haar_state(&[3, 2, 4], &mut rng).unwrap();
        let r = spectrum_report(&s, &t).unwrap();
        assert!(r.a_eq_bc);
        assert_eq!(r.rho_bc.len(), 8);
    }

    #[test]
    fn s_spectrum_present_for_product_slices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random::schmidt_state(&[2, 3, 3], &[0.8, 0.2], &mut rng).unwrap();
        let a = analyze(&s, &tol()).unwrap();
        let ss = a.s_spectrum().expect("shared basis");
        assert!((ss[0] - 0.8).abs() < 1e-10 && (ss[1] - 0.2).abs() < 1e-10);
        let w = analyze(&PureState::w(&[2, 2, 2]).unwrap(), &tol()).unwrap();
        assert!(w.s_spectrum().is_none());
    }

    #[test]
    fn trivial_party_reduces_to_bipartite() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = random::haar_state(&[3, 4, 1], &mut rng).unwrap();
        let v = check(&s, &t).unwrap();
        assert!(v.decomposable);
        let ab = PureState::from_amplitudes(&[3, 4], s.amplitudes().to_vec()).unwrap();
        let sd = schmidt_decompose(&ab.as_matrix().unwrap(), &t).unwrap();
        for (w, p) in v.decomposition.unwrap().weights().iter().zip(sd.probabilities()) {
            assert!((w - p).abs() < 1e-10);
        }
    }

    #[test]
    fn all_pivots_requires_equal_dims() {
        let t = tol();
        let per = check_all_pivots(&PureState::w(&[2, 2, 2]).unwrap(), &t).unwrap();
        assert_eq!(per.len(), 3);
        assert!(per.iter().all(|p| p.outcome == PivotOutcome::NotDecomposable));
        let per = check_all_pivots(&PureState::ghz(&[3, 3, 3]).unwrap(), &t).unwrap();
        assert!(per.iter().all(|p| p.outcome == PivotOutcome::Decomposable));
        assert!(check_all_pivots(&PureState::ghz(&[2, 3, 3]).unwrap(), &t).is_err());
    }

    #[test]
    fn rejects_bipartite_and_unnormalized() {
        let t = tol();
        assert!(matches!(check(&PureState::ghz(&[2, 2]).unwrap(), &t), Err(Error::BadDims(_))));
        let half = PureState::from_amplitudes(&[2, 2, 2], vec![C64::new(0.5, 0.0); 8]).unwrap();
        assert!(matches!(check(&half, &t), Err(Error::NotNormalized { .. })));
    }
}
