//! Schmidt decomposition of bipartite and tripartite pure states.
//!
//! A tripartite state is sliced along one party (the pivot) in the eigenbasis
//! of that party's reduced density matrix. Each slice is an unnormalized
//! vector on the other two parties; the state admits a single-sum Schmidt
//! form exactly when every slice is a product vector. [`tripartite::check`]
//! runs that test, builds the decomposition when it exists and otherwise
//! reports how far the slices are from being products.
//!
//! The crate is `no_std` and needs only `alloc`. Dense complex kernels
//! (Jacobi eigensolver and one-sided Jacobi SVD) live in [`linalg`]; the
//! seeded generators in [`random`] take any [`rand::Rng`].
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bipartite;
pub mod error;
pub mod linalg;
pub mod random;
pub mod states;
pub mod tripartite;

pub use bipartite::{entanglement_entropy, schmidt_decompose, schmidt_rank, BipartiteSchmidt};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEigen, Svd, Tolerances};
pub use states::{DensityMatrix, Party, PureState};
pub use tripartite::{
    analyze, analyze_with_pivot, check, check_all_pivots, check_with_pivot, construct, default_pivot,
    refine_degenerate, spectrum_report, PivotOutcome, PivotVerdict, Refinement, SliceAnalysis, SpectrumReport,
    TripartiteSchmidt, Verdict,
};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
