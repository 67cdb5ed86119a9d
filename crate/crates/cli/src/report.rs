//! Machine-readable reports printed by the analysis commands.

use serde::{Deserialize, Serialize};
use trischmidt_core::tripartite::PivotOutcome;
use trischmidt_core::{BipartiteSchmidt, Refinement, SpectrumReport, Tolerances};

use crate::format::{complex_pairs, lossless, Generator, Lossless};

pub const TOOL: &str = "trischmidt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub rank_rel: Lossless,
    pub degen_rel: Lossless,
    pub recon_abs: Lossless,
}

impl From<&Tolerances> for ToleranceReport {
    fn from(t: &Tolerances) -> Self {
        ToleranceReport {
            rank_rel: Lossless(t.rank_rel()),
            degen_rel: Lossless(t.degen_rel()),
            recon_abs: Lossless(t.recon_abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub decomposable: bool,
    pub degenerate: bool,
    pub indeterminate: bool,
    pub max_residual: Lossless,
    pub pivot: String,
    pub pivot_spectrum: Vec<Lossless>,
    pub slice_ranks: Vec<usize>,
    pub refinement: String,
    /// `s_μ`, present only when all slices share one Schmidt basis pair.
    pub shared_slice_spectrum: Option<Vec<Lossless>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    pub rho_a: Vec<Lossless>,
    pub rho_b: Vec<Lossless>,
    pub rho_c: Vec<Lossless>,
    pub rho_bc: Vec<Lossless>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEquality {
    pub a_b: bool,
    pub a_c: bool,
    pub b_c: bool,
    pub a_bc: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub a: Lossless,
    pub b: Lossless,
    pub c: Lossless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotReport {
    pub pivot: String,
    pub outcome: String,
    pub max_residual: Lossless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Lossless>>,
    pub spectra: Spectra,
    pub spectrum_equal: SpectrumEquality,
    pub entropy_bits: Entropies,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_pivot: Option<Vec<PivotReport>>,
    pub tolerances: ToleranceReport,
}

impl Report {
    pub fn new(
        command: &str,
        dims: &[usize],
        source: Option<Generator>,
        spectra: &SpectrumReport,
        tol: &Tolerances,
    ) -> Self {
        let [a, b, c] = spectra.entropies();
        Report {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            dims: dims.to_vec(),
            source,
            verdict: None,
            weights: None,
            spectra: Spectra {
                rho_a: lossless(&spectra.rho_a),
                rho_b: lossless(&spectra.rho_b),
                rho_c: lossless(&spectra.rho_c),
                rho_bc: lossless(&spectra.rho_bc),
            },
            spectrum_equal: SpectrumEquality {
                a_b: spectra.a_eq_b,
                a_c: spectra.a_eq_c,
                b_c: spectra.b_eq_c,
                a_bc: spectra.a_eq_bc,
            },
            entropy_bits: Entropies { a: Lossless(a), b: Lossless(b), c: Lossless(c) },
            per_pivot: None,
            tolerances: tol.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Generator>,
    pub coefficients: Vec<Lossless>,
    pub schmidt_rank: usize,
    pub left_basis: Vec<Vec<[Lossless; 2]>>,
    pub right_basis: Vec<Vec<[Lossless; 2]>>,
    pub entropy_bits: Lossless,
    pub tolerances: ToleranceReport,
}

impl BipartiteReport {
    pub fn new(
        dims: &[usize],
        source: Option<Generator>,
        sd: &BipartiteSchmidt,
        entropy: f64,
        tol: &Tolerances,
    ) -> Self {
        BipartiteReport {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: "decompose-bipartite".to_string(),
            dims: dims.to_vec(),
            source,
            coefficients: lossless(sd.coefficients()),
            schmidt_rank: sd.rank(tol),
            left_basis: sd.left_basis().iter().map(|v| complex_pairs(v)).collect(),
            right_basis: sd.right_basis().iter().map(|v| complex_pairs(v)).collect(),
            entropy_bits: Lossless(entropy),
            tolerances: tol.into(),
        }
    }
}

pub fn refinement_name(r: Refinement) -> &'static str {
    match r {
        Refinement::NotAttempted => "not-attempted",
        Refinement::Refined => "refined",
        Refinement::Refuted => "refuted",
        Refinement::Inconclusive => "inconclusive",
    }
}

pub fn outcome_name(o: PivotOutcome) -> &'static str {
    match o {
        PivotOutcome::Decomposable => "decomposable",
        PivotOutcome::NotDecomposable => "not-decomposable",
        PivotOutcome::Indeterminate => "indeterminate",
    }
}
