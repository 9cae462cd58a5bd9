//! JSON ensemble documents:
//! `{ "dims": [dA, dB], "states": [ { "weight": w, "re": [..], "im": [..] } ] }`.
//!
//! Amplitudes are listed in the row-major order of the `dA x dB` product
//! basis. Weights and norms within [`INPUT_TOLERANCE`] of their targets are
//! renormalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PureState, C64};
use crate::states::{EnsembleDecomposition, Spectrum};

pub const INPUT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub weight: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dims: [usize; 2],
    pub states: Vec<EnsembleEntry>,
}

fn parse_err(msg: String) -> Error {
    Error::Parse(msg)
}

impl EnsembleFile {
    /// Parses the document shape. Errors name the JSON path, line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            parse_err(format!("at `{path}`: {inner}"))
        })
    }

    pub fn from_ensemble(e: &EnsembleDecomposition) -> Self {
        let states = e
            .spectrum()
            .weights()
            .iter()
            .zip(e.states())
            .map(|(&weight, s)| EnsembleEntry {
                weight,
                re: s.amplitudes().iter().map(|a| a.re).collect(),
                im: s.amplitudes().iter().map(|a| a.im).collect(),
            })
            .collect();
        Self { dims: e.dims(), states }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Checks values and builds the ensemble.
    pub fn to_ensemble(&self) -> Result<EnsembleDecomposition> {
        let [da, db] = self.dims;
        if da == 0 || db == 0 {
            return Err(parse_err(format!("at `dims`: dimensions must be positive, got {:?}", self.dims)));
        }
        if self.states.is_empty() {
            return Err(parse_err("at `states`: at least one state is required".into()));
        }
        let d = da * db;
        let mut states = Vec::with_capacity(self.states.len());
        for (i, entry) in self.states.iter().enumerate() {
            for (field, v) in [("re", &entry.re), ("im", &entry.im)] {
                if v.len() != d {
                    return Err(parse_err(format!("at `states[{i}].{field}`: {} amplitudes, expected {d}", v.len())));
                }
                if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                    return Err(parse_err(format!("at `states[{i}].{field}[{k}]`: not finite")));
                }
            }
            let amps: Vec<C64> = entry.re.iter().zip(&entry.im).map(|(&r, &m)| C64::new(r, m)).collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > INPUT_TOLERANCE {
                return Err(parse_err(format!("at `states[{i}]`: norm {norm} is not 1 within {INPUT_TOLERANCE:e}")));
            }
            states.push(PureState::normalized(amps, vec![da, db])?);
        }
        let weights: Vec<f64> = self.states.iter().map(|s| s.weight).collect();
        let spectrum = Spectrum::renormalized(weights, INPUT_TOLERANCE)
            .map_err(|e| parse_err(format!("at `states[*].weight`: {e}")))?;
        EnsembleDecomposition::new(spectrum, states).map_err(|e| parse_err(format!("at `states`: {e}")))
    }
}

/// Parses and validates an ensemble document in one step.
pub fn parse_ensemble(text: &str) -> Result<EnsembleDecomposition> {
    EnsembleFile::from_json(text)?.to_ensemble()
}
