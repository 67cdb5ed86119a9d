//! The subcommands, as functions from input text to reports.

use clap::ValueEnum;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use trischmidt_core::tripartite::{analyze_with_pivot, check_with_pivot, default_pivot};
use trischmidt_core::{
    check_all_pivots, entanglement_entropy, random, schmidt_decompose, spectrum_report, Error, PureState, Tolerances,
};

use crate::error::{exit, CliError};
use crate::format::{lossless, Generator, Lossless, StateFile};
use crate::report::{outcome_name, refinement_name, BipartiteReport, PivotReport, Report, VerdictReport};

/// Name recorded in generator metadata for the seeded stream.
pub const RNG_NAME: &str = "ChaCha20Rng::seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Ghz,
    W,
    Product,
    Schmidt,
    Haar,
}

impl GenKind {
    fn name(self) -> &'static str {
        match self {
            GenKind::Ghz => "ghz",
            GenKind::W => "w",
            GenKind::Product => "product",
            GenKind::Schmidt => "schmidt",
            GenKind::Haar => "haar",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub tol: Tolerances,
    pub seed: Option<u64>,
    pub all_pivots: bool,
}

impl Settings {
    pub fn new(
        rank_rel: f64,
        degen_rel: f64,
        recon_abs: f64,
        seed: Option<u64>,
        all_pivots: bool,
    ) -> Result<Self, CliError> {
        let tol = Tolerances::new(rank_rel, degen_rel, recon_abs).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Settings { tol, seed, all_pivots })
    }
}

fn usage_on_bad_input(e: Error) -> CliError {
    match e {
        Error::BadDims(_) | Error::BadWeights(_) | Error::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
        other => CliError::data("gen", other),
    }
}

pub fn gen(kind: GenKind, dims: &[usize], weights: Option<&[f64]>, seed: Option<u64>) -> Result<StateFile, CliError> {
    if !(2..=3).contains(&dims.len()) || dims.contains(&0) {
        return Err(CliError::Usage("--dims takes 2 or 3 positive integers".into()));
    }
    if weights.is_some() && kind != GenKind::Schmidt {
        return Err(CliError::Usage("--weights applies only to `schmidt`".into()));
    }
    let mut meta = Generator { kind: kind.name().into(), seed: None, rng: None, weights: None };
    let state = match kind {
        GenKind::Ghz => PureState::ghz(dims),
        GenKind::W => PureState::w(dims),
        GenKind::Product => PureState::product(dims),
        GenKind::Haar | GenKind::Schmidt => {
            let seed = seed.ok_or_else(|| CliError::Usage(format!("`{}` requires --seed", kind.name())))?;
            meta.seed = Some(seed);
            meta.rng = Some(RNG_NAME.into());
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            if kind == GenKind::Haar {
                random::haar_state(dims, &mut rng)
            } else {
                let weights = weights.ok_or_else(|| CliError::Usage("`schmidt` requires --weights".into()))?;
                let normalized = random::normalize_weights(dims, weights).map_err(usage_on_bad_input)?;
                meta.weights = Some(lossless(&normalized));
                random::schmidt_state(dims, &normalized, &mut rng)
            }
        }
    }
    .map_err(usage_on_bad_input)?;
    Ok(StateFile::from_state(&state, Some(meta)))
}

/// Parses and validates a state file, requiring `parties` parties.
fn load(
    text: &str,
    context: &str,
    parties: usize,
    tol: &Tolerances,
) -> Result<(PureState, Option<Generator>), CliError> {
    let file = StateFile::parse(text, context)?;
    let state = file.to_state(context)?;
    if state.party_count() != parties {
        let what = if parties == 3 { "expected a tripartite state" } else { "expected a bipartite state" };
        return Err(CliError::data(context, Error::BadDims(what)));
    }
    let state = state.validate(tol).map_err(|e| CliError::data(context, e))?;
    Ok((state, file.generator))
}

/// Runs the decomposability test. Returns the report and the verdict's
/// exit code (0, 1 or 2).
pub fn check(text: &str, context: &str, settings: &Settings) -> Result<(Report, u8), CliError> {
    let tol = &settings.tol;
    let (state, source) = load(text, context, 3, tol)?;
    let data = |e| CliError::data(context, e);
    let dims = [state.dims()[0], state.dims()[1], state.dims()[2]];
    if settings.all_pivots && !(dims[0] == dims[1] && dims[1] == dims[2]) {
        return Err(CliError::Usage("--all-pivots needs equal party dimensions".into()));
    }
    let spectra = spectrum_report(&state, tol).map_err(data)?;
    let mut report = Report::new("check", state.dims(), source, &spectra, tol);

    let pivot = default_pivot(dims);
    let (verdict, code) = match check_with_pivot(&state, pivot, tol) {
        Ok(v) => {
            report.weights = v.decomposition.as_ref().map(|sd| lossless(sd.weights()));
            let a = &v.analysis;
            let code = if v.decomposable { exit::DECOMPOSABLE } else { exit::NOT_DECOMPOSABLE };
            (verdict_report(v.decomposable, v.degenerate, false, v.max_residual, a), code)
        }
        Err(Error::Indeterminate { max_residual }) => {
            let a = analyze_with_pivot(&state, pivot, tol).map_err(data)?;
            let mut r = verdict_report(false, true, true, max_residual, &a);
            r.refinement = refinement_name(trischmidt_core::Refinement::Inconclusive).into();
            (r, exit::INDETERMINATE)
        }
        Err(e) => return Err(data(e)),
    };
    report.verdict = Some(verdict);
    if settings.all_pivots {
        let per = check_all_pivots(&state, tol).map_err(data)?;
        report.per_pivot = Some(
            per.iter()
                .map(|p| PivotReport {
                    pivot: p.pivot.to_string(),
                    outcome: outcome_name(p.outcome).into(),
                    max_residual: Lossless(p.max_residual),
                })
                .collect(),
        );
    }
    Ok((report, code))
}

fn verdict_report(
    decomposable: bool,
    degenerate: bool,
    indeterminate: bool,
    max_residual: f64,
    a: &trischmidt_core::SliceAnalysis,
) -> VerdictReport {
    VerdictReport {
        decomposable,
        degenerate,
        indeterminate,
        max_residual: Lossless(max_residual),
        pivot: a.pivot().to_string(),
        pivot_spectrum: lossless(&a.pivot_spectrum()[..a.retained()]),
        slice_ranks: a.slice_ranks().to_vec(),
        refinement: refinement_name(a.refinement()).into(),
        shared_slice_spectrum: a.s_spectrum().map(lossless),
    }
}

pub fn spectra(text: &str, context: &str, settings: &Settings) -> Result<Report, CliError> {
    let tol = &settings.tol;
    let (state, source) = load(text, context, 3, tol)?;
    let spectra = spectrum_report(&state, tol).map_err(|e| CliError::data(context, e))?;
    Ok(Report::new("spectra", state.dims(), source, &spectra, tol))
}

pub fn decompose_bipartite(text: &str, context: &str, settings: &Settings) -> Result<BipartiteReport, CliError> {
    let tol = &settings.tol;
    let (state, source) = load(text, context, 2, tol)?;
    let data = |e| CliError::data(context, e);
    let m = state.as_matrix().map_err(data)?;
    let sd = schmidt_decompose(&m, tol).map_err(data)?;
    let entropy = entanglement_entropy(&m, tol).map_err(data)?;
    Ok(BipartiteReport::new(state.dims(), source, &sd, entropy, tol))
}
