//! JSON state files and the lossless float encoding shared with reports.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use trischmidt_core::{PureState, C64};

use crate::error::CliError;

/// An `f64` written with 17 significant digits so it parses back to the
/// same bits.
#[derive(Clone, Copy, PartialEq)]
pub struct Lossless(pub f64);

impl fmt::Debug for Lossless {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

impl Serialize for Lossless {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite number"));
        }
        // -0.0 prints as "-0e0"; normalize so reports never show a signed zero.
        let x = if self.0 == 0.0 { 0.0 } else { self.0 };
        RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Lossless {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Lossless)
    }
}

pub fn lossless(values: &[f64]) -> Vec<Lossless> {
    values.iter().copied().map(Lossless).collect()
}

pub fn plain(values: &[Lossless]) -> Vec<f64> {
    values.iter().map(|x| x.0).collect()
}

pub fn complex_pairs(values: &[C64]) -> Vec<[Lossless; 2]> {
    values.iter().map(|z| [Lossless(z.re), Lossless(z.im)]).collect()
}

/// How a generated state was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Lossless>>,
}

/// `{"dims": [..], "amplitudes": [[re, im], ..]}`, row-major with the
/// first party's index varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[Lossless; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

impl StateFile {
    pub fn from_state(state: &PureState, generator: Option<Generator>) -> Self {
        StateFile { dims: state.dims().to_vec(), amplitudes: complex_pairs(state.amplitudes()), generator }
    }

    pub fn parse(text: &str, context: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|source| CliError::Parse { context: context.to_string(), source })
    }

    /// Structural checks only; normalization is checked by the commands.
    pub fn to_state(&self, context: &str) -> Result<PureState, CliError> {
        let amps = self.amplitudes.iter().map(|[re, im]| C64::new(re.0, im.0)).collect();
        PureState::from_amplitudes(&self.dims, amps).map_err(|e| CliError::data(context, e))
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    out.push('\n');
    out
}
