//! Bell states, spectra, entropies and entanglement of pure-state ensembles.
//!
//! All entropies are in bits (base-2 logarithms), so that a spectrum with
//! entropy `S` has about `2^(nS)` likely strings of length `n`. Use
//! [`bits_to_nats`] for natural-log display.

use serde::{Deserialize, Serialize};

use crate::error::{contract, invalid, Result};
use crate::linalg::{hermitian_eig, partial_trace, DenseMatrix, PureState, C64, ZERO};

/// Tolerance on `sum(weights) == 1` for a [`Spectrum`].
pub const SPECTRUM_SUM_TOLERANCE: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_CLAMP, 0)` are treated as zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;
/// Trace deviation beyond which a density matrix is rejected.
pub const TRACE_TOLERANCE: f64 = 1e-6;
/// Pairwise overlap tolerance for ensemble members.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// Probability weights `lambda_1..lambda_m` of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    weights: Vec<f64>,
}

impl Spectrum {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::check_entries(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOLERANCE {
            return Err(invalid(format!("spectrum sums to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Accepts weights whose sum is within `tol` of one and rescales them to
    /// sum to one.
    pub fn renormalized(weights: Vec<f64>, tol: f64) -> Result<Self> {
        Self::check_entries(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(invalid(format!("spectrum sums to {sum}, which is not within {tol} of 1")));
        }
        Ok(Self { weights: weights.into_iter().map(|w| w / sum).collect() })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m]).or_else(|_| Self::renormalized(vec![1.0 / m as f64; m], 1e-9))
    }

    fn check_entries(weights: &[f64]) -> Result<()> {
        if weights.is_empty() {
            return Err(invalid("spectrum must have at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(invalid(format!("spectrum weight {w} is not a finite nonnegative number")));
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of weights, `m`.
    pub fn spectrum_size(&self) -> usize {
        self.weights.len()
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    pub fn min_nonzero(&self) -> f64 {
        self.weights.iter().copied().filter(|&w| w > 0.0).fold(f64::INFINITY, f64::min)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Vec::<f64>::deserialize(d)?;
        Spectrum::new(w).map_err(serde::de::Error::custom)
    }
}

/// The four Bell states in the crate-wide order `Phi+, Phi-, Psi+, Psi-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Result<Self> {
        Self::ALL.get(k).copied().ok_or_else(|| contract(format!("Bell index {k} out of range 0..4")))
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }

    pub fn state(self) -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b, sign) = match self {
            BellState::PhiPlus => (0, 3, 1.0),
            BellState::PhiMinus => (0, 3, -1.0),
            BellState::PsiPlus => (1, 2, 1.0),
            BellState::PsiMinus => (1, 2, -1.0),
        };
        let mut amps = vec![ZERO; 4];
        amps[a] = C64::new(s, 0.0);
        amps[b] = C64::new(sign * s, 0.0);
        PureState::new(amps, vec![2, 2]).expect("Bell states are normalized")
    }
}

/// Bell state `k` for `k` in `0..4`, ordered `Phi+, Phi-, Psi+, Psi-`.
pub fn bell_state(k: usize) -> Result<PureState> {
    Ok(BellState::from_index(k)?.state())
}

/// Spectrum of a Bell-diagonal two-qubit state, in Bell order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BellDiagonalSpectrum(Spectrum);

impl BellDiagonalSpectrum {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        Ok(Self(Spectrum::new(weights.to_vec())?))
    }

    pub fn from_spectrum(s: Spectrum) -> Result<Self> {
        if s.spectrum_size() != 4 {
            return Err(invalid(format!("a Bell-diagonal spectrum needs 4 weights, got {}", s.spectrum_size())));
        }
        Ok(Self(s))
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.0
    }

    pub fn weights(&self) -> &[f64] {
        self.0.weights()
    }

    pub fn ensemble(&self) -> EnsembleDecomposition {
        EnsembleDecomposition::new(self.0.clone(), BellState::ALL.iter().map(|b| b.state()).collect())
            .expect("Bell basis is orthonormal")
    }

    /// `sum_k lambda_k |B_k><B_k|`.
    pub fn density_matrix(&self) -> DenseMatrix {
        let mut acc = DenseMatrix::zeros(4, 4);
        for (b, &w) in BellState::ALL.iter().zip(self.weights()) {
            acc = acc.add(&b.state().projector().scale(C64::new(w, 0.0))).expect("4x4");
        }
        DenseMatrix::new(4, 4, acc.data().to_vec()).and_then(|m| m.with_dims(vec![2, 2])).expect("4x4")
    }

    /// Eigen-ensemble entanglement; every Bell state carries exactly one
    /// ebit.
    pub fn ensemble_entanglement(&self) -> f64 {
        1.0
    }
}

/// Orthogonal pure-state decomposition `sigma = sum_i lambda_i |Phi_i><Phi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    spectrum: Spectrum,
    states: Vec<PureState>,
}

impl EnsembleDecomposition {
    pub fn new(spectrum: Spectrum, states: Vec<PureState>) -> Result<Self> {
        if spectrum.spectrum_size() != states.len() {
            return Err(invalid(format!("{} weights but {} states", spectrum.spectrum_size(), states.len())));
        }
        let dims = states[0].dims().to_vec();
        if dims.len() != 2 {
            return Err(invalid(format!("ensemble states must be bipartite, got dims {dims:?}")));
        }
        if let Some(bad) = states.iter().find(|s| s.dims() != dims.as_slice()) {
            return Err(invalid(format!("state dims {:?} differ from {dims:?}", bad.dims())));
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let ov = states[i].inner(&states[j])?.norm();
                if ov > ORTHOGONALITY_TOLERANCE {
                    return Err(invalid(format!("states {i} and {j} overlap by {ov:e}")));
                }
            }
        }
        Ok(Self { spectrum, states })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn dims(&self) -> [usize; 2] {
        let d = self.states[0].dims();
        [d[0], d[1]]
    }

    /// `sigma` as a dense matrix on dims `[d_A, d_B]`.
    pub fn density_matrix(&self) -> DenseMatrix {
        let d = self.states[0].dim();
        let mut acc = DenseMatrix::zeros(d, d);
        for (s, &w) in self.states.iter().zip(self.spectrum.weights()) {
            acc = acc.add(&s.projector().scale(C64::new(w, 0.0))).expect("same shape");
        }
        DenseMatrix::new(d, d, acc.data().to_vec()).and_then(|m| m.with_dims(self.dims().to_vec())).expect("square")
    }
}

pub(crate) fn entropy_bits(weights: &[f64]) -> f64 {
    let h: f64 = weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum();
    // -0.0 for a pure spectrum reads oddly in reports
    h + 0.0
}

/// Shannon entropy of a spectrum in bits.
pub fn shannon_entropy(s: &Spectrum) -> f64 {
    entropy_bits(s.weights())
}

/// Binary entropy `H2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}

/// Von Neumann entropy (bits) from the eigenvalues of `rho`.
pub fn von_neumann_entropy(rho: &DenseMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
        return Err(invalid(format!("density matrix trace {tr} is not 1")));
    }
    let eig = hermitian_eig(rho)?;
    let mut values = Vec::with_capacity(eig.values.len());
    for &l in &eig.values {
        if l < -NEGATIVE_CLAMP {
            return Err(invalid(format!("density matrix has negative eigenvalue {l:e}")));
        }
        values.push(l.max(0.0));
    }
    let sum: f64 = values.iter().sum();
    values.iter_mut().for_each(|v| *v /= sum);
    Ok(entropy_bits(&values))
}

/// Entanglement entropy (ebits) of a bipartite pure state.
pub fn entanglement_entropy(psi: &PureState) -> Result<f64> {
    if psi.dims().len() != 2 {
        return Err(contract(format!("entanglement entropy needs a bipartition, got dims {:?}", psi.dims())));
    }
    von_neumann_entropy(&partial_trace(&psi.projector(), &[0])?)
}

/// `sum_i lambda_i E(|Phi_i>)`, the average entanglement of the eigenstates.
pub fn ensemble_entanglement(e: &EnsembleDecomposition) -> Result<f64> {
    let mut acc = 0.0;
    for (s, &w) in e.states().iter().zip(e.spectrum().weights()) {
        if w > 0.0 {
            acc += w * entanglement_entropy(s)?;
        }
    }
    Ok(acc)
}
