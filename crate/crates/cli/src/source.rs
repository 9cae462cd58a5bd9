use std::path::Path;

use locc_distill::ensemble_file::{parse_ensemble, INPUT_TOLERANCE};
use locc_distill::states::{BellDiagonalSpectrum, BellState, EnsembleDecomposition, Spectrum};
use locc_distill::Error;

use crate::args::{Preset, SourceArgs};
use crate::error::{CliError, CliResult};

/// Weights within [`INPUT_TOLERANCE`] of summing to one are rescaled.
pub fn spectrum(weights: &[f64]) -> CliResult<Spectrum> {
    if weights.is_empty() {
        return Err(CliError::usage("--spectrum needs at least one weight"));
    }
    Spectrum::renormalized(weights.to_vec(), INPUT_TOLERANCE)
        .map_err(|e| CliError::usage(format!("bad --spectrum: {e}")))
}

pub fn bell_spectrum(weights: &[f64]) -> CliResult<BellDiagonalSpectrum> {
    if weights.len() != 4 {
        return Err(CliError::usage(format!(
            "a Bell-diagonal --spectrum needs 4 weights (Phi+, Phi-, Psi+, Psi-), got {}",
            weights.len()
        )));
    }
    BellDiagonalSpectrum::from_spectrum(spectrum(weights)?).map_err(|e| CliError::usage(format!("bad --spectrum: {e}")))
}

pub fn preset(p: Preset) -> EnsembleDecomposition {
    let (weights, members): (Vec<f64>, Vec<BellState>) = match p {
        Preset::SingleState => (vec![1.0], vec![BellState::ALL[0]]),
        Preset::ThreeBellStates => (vec![1.0 / 3.0; 3], BellState::ALL[..3].to_vec()),
    };
    let spectrum = Spectrum::renormalized(weights, INPUT_TOLERANCE).expect("preset weights");
    EnsembleDecomposition::new(spectrum, members.iter().map(|b| b.state()).collect())
        .expect("Bell states are orthonormal")
}

pub fn read_ensemble(path: &Path) -> CliResult<EnsembleDecomposition> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_ensemble(&text).map_err(|e| match e {
        Error::Parse(m) => CliError::Core(Error::Parse(format!("{}: {m}", path.display()))),
        other => other.into(),
    })
}

/// A parsed source: spectrum-only input is kept apart so callers can decide
/// whether to read it as Bell-diagonal.
pub enum Source {
    Weights(Vec<f64>),
    Ensemble { ensemble: EnsembleDecomposition, bell_diagonal: bool },
}

impl Source {
    pub fn load(args: &SourceArgs) -> CliResult<Self> {
        if let Some(w) = &args.spectrum {
            return Ok(Source::Weights(w.clone()));
        }
        if let Some(p) = args.preset {
            return Ok(Source::Ensemble { ensemble: preset(p), bell_diagonal: true });
        }
        if let Some(path) = &args.ensemble {
            let ensemble = read_ensemble(path)?;
            let bell_diagonal = is_bell_ensemble(&ensemble);
            return Ok(Source::Ensemble { ensemble, bell_diagonal });
        }
        Err(CliError::usage("one of --spectrum, --ensemble or --preset is required"))
    }

    pub fn spectrum(&self) -> CliResult<Spectrum> {
        match self {
            Source::Weights(w) => spectrum(w),
            Source::Ensemble { ensemble, .. } => Ok(ensemble.spectrum().clone()),
        }
    }

    /// Two-qubit ensemble; bare weights are read as Bell-diagonal.
    pub fn ensemble(&self) -> CliResult<EnsembleDecomposition> {
        match self {
            Source::Weights(w) => Ok(bell_spectrum(w)?.ensemble()),
            Source::Ensemble { ensemble, .. } => Ok(ensemble.clone()),
        }
    }

    pub fn is_bell_diagonal(&self) -> bool {
        match self {
            Source::Weights(w) => w.len() == 4,
            Source::Ensemble { bell_diagonal, .. } => *bell_diagonal,
        }
    }
}

/// Every member is a Bell state up to phase.
fn is_bell_ensemble(e: &EnsembleDecomposition) -> bool {
    e.dims() == [2, 2]
        && e.states().iter().all(|s| {
            BellState::ALL
                .iter()
                .any(|b| b.state().inner(s).map(|z| z.norm_sqr() > 1.0 - INPUT_TOLERANCE).unwrap_or(false))
        })
}
