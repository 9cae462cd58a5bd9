//! Hashing-style identification of Bell-diagonal strings, one pair at a time.
//!
//! `n` copies of a Bell-diagonal state are, in each run, a definite string of
//! Bell labels drawn from the spectrum. Each label is two bits: the
//! amplitude bit `y` (`Phi` = 0, `Psi` = 1) and the phase bit `x` (`+` = 0,
//! `-` = 1). A round of the protocol uses bilateral CNOTs (BXOR) and
//! bilateral Hadamards to fold a random parity of the alive pairs' bits into
//! one pair's amplitude bit, then measures that pair in the computational
//! basis. Each round costs one pair and reveals one parity bit. Once the
//! recorded parities single out one candidate string, the unmeasured pairs
//! are known Bell states and can be rotated to `Phi+`.
//!
//! Gate actions on labels are not written down by hand. [`GateTables::derive`]
//! evolves every Bell-product input densely and decodes the output, and the
//! GF(2)-linear form of each table is read off from it.

use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, invalid, Error, Result};
use crate::linalg::{gates, DenseMatrix, PureState};
use crate::measurement_di::{distinguishability_condition, Distinguishability};
use crate::rng::{derive_seed, stream_rng};
use crate::states::{shannon_entropy, BellDiagonalSpectrum, BellState, Spectrum};
use crate::typical::{epsilon_typical_mass, sample_likely_string_with, TypicalEnsemble};

/// Largest `n` for which the posterior is filtered exhaustively.
pub const EXHAUSTIVE_MAX_N: usize = 12;
/// Typical-set mass targeted by [`default_epsilon`].
pub const TARGET_TYPICAL_MASS: f64 = 0.99;

const DECODE_TOLERANCE: f64 = 1e-9;

/// Two-bit Bell label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellLabel {
    /// `x`: 0 for `+`, 1 for `-`.
    pub phase: bool,
    /// `y`: 0 for `Phi`, 1 for `Psi`.
    pub amplitude: bool,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel { phase: false, amplitude: false },
        BellLabel { phase: true, amplitude: false },
        BellLabel { phase: false, amplitude: true },
        BellLabel { phase: true, amplitude: true },
    ];

    /// Index in Bell order `Phi+, Phi-, Psi+, Psi-`, i.e. `x + 2y`.
    pub fn index(self) -> usize {
        self.phase as usize + 2 * self.amplitude as usize
    }

    pub fn from_index(k: usize) -> Result<Self> {
        Self::ALL.get(k).copied().ok_or_else(|| contract(format!("Bell index {k} out of range 0..4")))
    }

    pub fn bell_state(self) -> BellState {
        BellState::ALL[self.index()]
    }
}

impl std::fmt::Display for BellLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.bell_state().name())
    }
}

// ---------------------------------------------------------------------------
// dense oracle

/// Dense state of `labels.len()` Bell pairs, qubits ordered Alice's
/// `A_0..A_{k-1}` then Bob's `B_0..B_{k-1}`.
pub fn dense_bell_string(labels: &[BellLabel]) -> PureState {
    let k = labels.len();
    let mut psi = labels[0].bell_state().state();
    for l in &labels[1..] {
        psi = psi.kron(&l.bell_state().state());
    }
    let pair_order = psi.regroup(vec![2; 2 * k]).expect("qubits");
    // pair order A_0 B_0 A_1 B_1 ... -> party order A_0 A_1 ... B_0 B_1 ...
    let order: Vec<usize> = (0..k).map(|i| 2 * i).chain((0..k).map(|i| 2 * i + 1)).collect();
    pair_order.permute_subsystems(&order).expect("permutation")
}

/// Bilateral CNOT from pair `source` to pair `target` on a `k`-pair register.
pub fn dense_bxor_op(k: usize, source: usize, target: usize) -> DenseMatrix {
    let alice = gates::cnot_on(2 * k, source, target);
    let bob = gates::cnot_on(2 * k, k + source, k + target);
    alice.matmul(&bob).expect("same register")
}

/// Hadamard on both halves of pair `pair` of a `k`-pair register.
pub fn dense_bhadamard_op(k: usize, pair: usize) -> DenseMatrix {
    let h = gates::hadamard();
    gates::embed_single(&h, pair, 2 * k).matmul(&gates::embed_single(&h, k + pair, 2 * k)).expect("same register")
}

/// Reads Bell labels off a dense `k`-pair state that is, up to phase, a
/// product of Bell states.
pub fn decode_bell_string(psi: &PureState, k: usize) -> Result<Vec<BellLabel>> {
    let total = 1usize << (2 * k);
    for code in 0..total {
        let labels: Vec<BellLabel> = (0..k).map(|p| BellLabel::ALL[(code >> (2 * p)) & 3]).collect();
        let overlap = dense_bell_string(&labels).inner(psi)?.norm_sqr();
        if overlap > 1.0 - DECODE_TOLERANCE {
            return Ok(labels);
        }
    }
    Err(Error::Consistency("state is not a product of Bell states".into()))
}

/// Dense BXOR image of `(source, target)` labels.
pub fn dense_bxor_image(source: BellLabel, target: BellLabel) -> Result<(BellLabel, BellLabel)> {
    let out = dense_bell_string(&[source, target]).apply(&dense_bxor_op(2, 0, 1))?;
    let d = decode_bell_string(&out, 2)?;
    Ok((d[0], d[1]))
}

/// Dense bilateral-Hadamard image of a label.
pub fn dense_bhadamard_image(label: BellLabel) -> Result<BellLabel> {
    let out = dense_bell_string(&[label]).apply(&dense_bhadamard_op(1, 0))?;
    Ok(decode_bell_string(&out, 1)?[0])
}

// ---------------------------------------------------------------------------
// derived label tables

/// Gate actions on labels, plus their GF(2)-linear forms over the bit
/// vectors `(x_s, y_s, x_t, y_t)` and `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateTables {
    /// `bxor[source][target] = (source', target')`, by Bell index.
    pub bxor: [[(usize, usize); 4]; 4],
    pub bhadamard: [usize; 4],
    /// Row `r` lists which input bits XOR into output bit `r`.
    pub bxor_linear: [[bool; 4]; 4],
    pub bhadamard_linear: [[bool; 2]; 2],
}

fn label_bits(l: BellLabel) -> [bool; 2] {
    [l.phase, l.amplitude]
}

fn apply_linear<const N: usize>(m: &[[bool; N]; N], v: &[bool; N]) -> [bool; N] {
    let mut out = [false; N];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).fold(false, |acc, (&a, &b)| acc ^ (a & b));
    }
    out
}

impl GateTables {
    /// Builds every table from dense evolution and checks that each one is
    /// GF(2)-linear.
    pub fn derive() -> Result<Self> {
        let mut bxor = [[(0, 0); 4]; 4];
        for s in BellLabel::ALL {
            for t in BellLabel::ALL {
                let (s2, t2) = dense_bxor_image(s, t)?;
                bxor[s.index()][t.index()] = (s2.index(), t2.index());
            }
        }
        let mut bhadamard = [0; 4];
        for l in BellLabel::ALL {
            bhadamard[l.index()] = dense_bhadamard_image(l)?.index();
        }

        let pair_bits = |s: usize, t: usize| -> [bool; 4] {
            let a = label_bits(BellLabel::ALL[s]);
            let b = label_bits(BellLabel::ALL[t]);
            [a[0], a[1], b[0], b[1]]
        };
        let mut bxor_linear = [[false; 4]; 4];
        for col in 0..4 {
            let mut unit = [false; 4];
            unit[col] = true;
            let s = unit[0] as usize + 2 * unit[1] as usize;
            let t = unit[2] as usize + 2 * unit[3] as usize;
            let (s2, t2) = bxor[s][t];
            for (row, &b) in pair_bits(s2, t2).iter().enumerate() {
                bxor_linear[row][col] = b;
            }
        }
        for s in 0..4 {
            for t in 0..4 {
                let (s2, t2) = bxor[s][t];
                if apply_linear(&bxor_linear, &pair_bits(s, t)) != pair_bits(s2, t2) {
                    return Err(Error::Consistency("BXOR label table is not GF(2)-linear".into()));
                }
            }
        }
        let mut bhadamard_linear = [[false; 2]; 2];
        for col in 0..2 {
            let img = label_bits(BellLabel::ALL[bhadamard[1 << col]]);
            for row in 0..2 {
                bhadamard_linear[row][col] = img[row];
            }
        }
        for k in 0..4 {
            let v = label_bits(BellLabel::ALL[k]);
            if apply_linear(&bhadamard_linear, &v) != label_bits(BellLabel::ALL[bhadamard[k]]) {
                return Err(Error::Consistency("Hadamard label table is not GF(2)-linear".into()));
            }
        }
        Ok(Self { bxor, bhadamard, bxor_linear, bhadamard_linear })
    }
}

/// Tables derived once per process.
pub fn gate_tables() -> &'static GateTables {
    static TABLES: OnceLock<GateTables> = OnceLock::new();
    TABLES.get_or_init(|| GateTables::derive().expect("dense Bell evolution decodes"))
}

// ---------------------------------------------------------------------------
// symbolic strings

/// Bell labels of `n` pairs; measured pairs are dead and their labels gone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellString {
    labels: Vec<BellLabel>,
    alive: Vec<bool>,
}

impl BellString {
    pub fn new(labels: Vec<BellLabel>) -> Self {
        let alive = vec![true; labels.len()];
        Self { labels, alive }
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        Ok(Self::new(indices.iter().map(|&k| BellLabel::from_index(k)).collect::<Result<_>>()?))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_alive(&self, pair: usize) -> bool {
        self.alive.get(pair).copied().unwrap_or(false)
    }

    /// Label of an alive pair.
    pub fn label(&self, pair: usize) -> Option<BellLabel> {
        self.is_alive(pair).then(|| self.labels[pair])
    }

    pub fn alive_pairs(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.alive[i]).collect()
    }

    fn check_alive(&self, pair: usize) -> Result<()> {
        if pair >= self.len() {
            return Err(contract(format!("pair {pair} out of range {}", self.len())));
        }
        if !self.alive[pair] {
            return Err(contract(format!("pair {pair} has already been measured")));
        }
        Ok(())
    }

    /// Bilateral CNOT from `source` to `target`.
    pub fn bxor(&mut self, source: usize, target: usize) -> Result<()> {
        if source == target {
            return Err(contract("BXOR needs two distinct pairs"));
        }
        self.check_alive(source)?;
        self.check_alive(target)?;
        let (s, t) = gate_tables().bxor[self.labels[source].index()][self.labels[target].index()];
        self.labels[source] = BellLabel::ALL[s];
        self.labels[target] = BellLabel::ALL[t];
        Ok(())
    }

    /// Hadamard on both halves of `pair`.
    pub fn bhadamard(&mut self, pair: usize) -> Result<()> {
        self.check_alive(pair)?;
        self.labels[pair] = BellLabel::ALL[gate_tables().bhadamard[self.labels[pair].index()]];
        Ok(())
    }

    /// Measures `pair` in the computational basis on both sides and returns
    /// its amplitude bit (outcomes 01/10). The pair is consumed.
    pub fn measure_amplitude(&mut self, pair: usize) -> Result<bool> {
        self.check_alive(pair)?;
        self.alive[pair] = false;
        Ok(self.labels[pair].amplitude)
    }
}

/// Each pair's current bits as XOR-combinations of the original string's
/// bits (original bit `2p` is `x_p`, `2p + 1` is `y_p`).
#[derive(Debug, Clone)]
struct ParityFrame {
    masks: Vec<[u64; 2]>,
}

impl ParityFrame {
    fn new(n: usize) -> Self {
        Self { masks: (0..n).map(|p| [1u64 << (2 * p), 1u64 << (2 * p + 1)]).collect() }
    }

    fn bxor(&mut self, source: usize, target: usize) {
        let m = &gate_tables().bxor_linear;
        let s = self.masks[source];
        let t = self.masks[target];
        let cur = [s[0], s[1], t[0], t[1]];
        let out: Vec<u64> =
            m.iter().map(|row| row.iter().zip(&cur).filter(|(&on, _)| on).fold(0, |acc, (_, &v)| acc ^ v)).collect();
        self.masks[source] = [out[0], out[1]];
        self.masks[target] = [out[2], out[3]];
    }

    fn bhadamard(&mut self, pair: usize) {
        let m = &gate_tables().bhadamard_linear;
        let cur = self.masks[pair];
        let mut out = [0u64; 2];
        for (o, row) in out.iter_mut().zip(m) {
            *o = row.iter().zip(&cur).filter(|(&on, _)| on).fold(0, |acc, (_, &v)| acc ^ v);
        }
        self.masks[pair] = out;
    }

    fn amplitude(&self, pair: usize) -> u64 {
        self.masks[pair][1]
    }
}

fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Packs Bell indices two bits per pair, as in [`ParityFrame`].
fn encode(indices: &[usize]) -> u64 {
    indices.iter().enumerate().fold(0, |acc, (p, &k)| acc | ((k as u64) << (2 * p)))
}

// ---------------------------------------------------------------------------
// protocol

/// One revealed parity: the measured bit equals the parity of the original
/// string's bits selected by `functional`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRecord {
    pub target: usize,
    pub functional: u64,
    pub bit: bool,
}

/// Outcome of one identification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    /// The surviving candidate set is a single string.
    pub success: bool,
    pub measured_pairs: usize,
    pub kept_pairs: usize,
    /// `kept_pairs * E(sigma) / n`, in ebits.
    pub yield_per_copy: f64,
    pub accumulated_di_bits: f64,
    pub posterior_size: usize,
}

/// Full record of a trial, including the hidden string, for verification.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub seed: u64,
    pub result: IdentificationResult,
    pub hidden: Vec<usize>,
    pub parities: Vec<ParityRecord>,
    pub hidden_in_posterior: bool,
    /// The most probable surviving candidate is the hidden string.
    pub map_correct: bool,
    /// Measured bits that disagree with the tracked parity functional.
    pub parity_violations: usize,
}

/// Smallest window (below the smallest nonzero weight) whose typical set
/// carries [`TARGET_TYPICAL_MASS`]; if none does, the widest such window.
/// Falls back to the whole support when no window below the smallest weight
/// admits any string.
pub fn default_epsilon(spectrum: &Spectrum, n: usize) -> f64 {
    let floor = spectrum.min_nonzero();
    let mut eps: Vec<f64> = spectrum
        .weights()
        .iter()
        .filter(|&&l| l > 0.0)
        .flat_map(|&l| (0..=n).map(move |k| (k as f64 / n as f64 - l).abs()))
        .filter(|&d| d < floor - 1e-12)
        .collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut widest_nonempty = None;
    for &e in &eps {
        let Ok(ens) = TypicalEnsemble::new(spectrum.clone(), n, e) else { continue };
        let mass = epsilon_typical_mass(&ens).mass;
        if mass >= TARGET_TYPICAL_MASS {
            return e;
        }
        if mass > 0.0 {
            widest_nonempty = Some(e);
        }
    }
    widest_nonempty.unwrap_or(1.0)
}

/// `(2^(nS) - 1) 2^(-M)`: expected number of wrong likely strings that
/// survive `M` random parities.
pub fn collision_estimate(spectrum: &Spectrum, n: usize, rounds: usize) -> f64 {
    ((n as f64 * shannon_entropy(spectrum)).exp2() - 1.0) * (-(rounds as f64)).exp2()
}

/// Precomputed candidate set for repeated trials at fixed parameters.
#[derive(Debug, Clone)]
pub struct HashingSimulator {
    spectrum: BellDiagonalSpectrum,
    ensemble: TypicalEnsemble,
    rounds: usize,
    candidates: Vec<u64>,
    log_weights: [f64; 4],
}

impl HashingSimulator {
    /// `epsilon = None` picks [`default_epsilon`].
    pub fn new(spectrum: BellDiagonalSpectrum, n: usize, rounds: usize, epsilon: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(contract(format!("need at least 2 pairs, got {n}")));
        }
        if n > EXHAUSTIVE_MAX_N {
            return Err(Error::UnsupportedSize { what: "n", value: n, cap: EXHAUSTIVE_MAX_N });
        }
        if rounds == 0 || rounds > n {
            return Err(contract(format!("rounds must be in 1..={n}, got {rounds}")));
        }
        let eps = epsilon.unwrap_or_else(|| default_epsilon(spectrum.spectrum(), n));
        let ensemble = TypicalEnsemble::new(spectrum.spectrum().clone(), n, eps)?;
        let candidates = enumerate_candidates(&ensemble);
        if candidates.is_empty() {
            return Err(invalid(format!("no typical strings at n = {n}, epsilon = {eps}")));
        }
        let mut log_weights = [f64::NEG_INFINITY; 4];
        for (lw, &w) in log_weights.iter_mut().zip(spectrum.weights()) {
            if w > 0.0 {
                *lw = w.log2();
            }
        }
        Ok(Self { spectrum, ensemble, rounds, candidates, log_weights })
    }

    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn epsilon(&self) -> f64 {
        self.ensemble.epsilon()
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Exact probability mass of the candidate set.
    pub fn typical_mass(&self) -> f64 {
        epsilon_typical_mass(&self.ensemble).mass
    }

    /// `(|candidates| - 1) 2^(-M)`.
    pub fn candidate_collision_estimate(&self) -> f64 {
        (self.candidates.len() as f64 - 1.0) * (-(self.rounds as f64)).exp2()
    }

    fn log_prior(&self, code: u64) -> f64 {
        (0..self.n()).map(|p| self.log_weights[((code >> (2 * p)) & 3) as usize]).sum()
    }

    /// Runs one trial. The same `seed` always gives the same trial, and the
    /// first `M` rounds of a trial do not depend on the total round count.
    pub fn run_trial(&self, seed: u64) -> Result<TrialRecord> {
        let n = self.n();
        let hidden = sample_likely_string_with(&self.ensemble, &mut stream_rng(seed, 0))?;
        let hidden_code = encode(&hidden);
        let mut rng = stream_rng(seed, 1);

        let mut string = BellString::from_indices(&hidden)?;
        let mut frame = ParityFrame::new(n);
        let mut parities = Vec::with_capacity(self.rounds);
        let mut violations = 0;
        for _ in 0..self.rounds {
            let rec = hashing_round(&mut string, &mut frame, &mut rng)?;
            if parity(rec.functional & hidden_code) != rec.bit {
                violations += 1;
            }
            parities.push(rec);
        }

        let posterior: Vec<u64> = self
            .candidates
            .iter()
            .copied()
            .filter(|&c| parities.iter().all(|r| parity(c & r.functional) == r.bit))
            .collect();
        let hidden_in_posterior = posterior.contains(&hidden_code);
        let map = posterior
            .iter()
            .copied()
            .fold(None::<(u64, f64)>, |best, c| {
                let lp = self.log_prior(c);
                match best {
                    Some((_, b)) if b >= lp => best,
                    _ => Some((c, lp)),
                }
            })
            .map(|(c, _)| c);

        let kept = n - self.rounds;
        let e_sigma = self.spectrum.ensemble_entanglement();
        Ok(TrialRecord {
            seed,
            result: IdentificationResult {
                success: posterior.len() == 1,
                measured_pairs: self.rounds,
                kept_pairs: kept,
                yield_per_copy: kept as f64 * e_sigma / n as f64,
                accumulated_di_bits: parities.len() as f64,
                posterior_size: posterior.len(),
            },
            hidden,
            parities,
            hidden_in_posterior,
            map_correct: map == Some(hidden_code),
            parity_violations: violations,
        })
    }
}

impl HashingSimulator {
    /// Trials `0..trials` with seeds `derive_seed(base_seed, i)`, run in
    /// parallel and returned in trial order.
    pub fn run_trials(&self, base_seed: u64, trials: usize) -> Result<Vec<TrialRecord>> {
        (0..trials as u64).into_par_iter().map(|i| self.run_trial(derive_seed(base_seed, i))).collect()
    }
}

/// One round: pick a sacrificial alive pair, fold a random selection of the
/// other alive pairs' bits into its amplitude bit, measure it.
///
/// Each other pair contributes nothing, its amplitude bit, its phase bit
/// (routed through bilateral Hadamards), or both, with equal odds. The
/// sacrificial pair contributes its amplitude or (after a Hadamard) its
/// phase bit.
fn hashing_round<R: Rng>(string: &mut BellString, frame: &mut ParityFrame, rng: &mut R) -> Result<ParityRecord> {
    let alive = string.alive_pairs();
    if alive.is_empty() {
        return Err(contract("no alive pairs left to measure"));
    }
    let target = alive[rng.random_range(0..alive.len())];
    if rng.random::<bool>() {
        string.bhadamard(target)?;
        frame.bhadamard(target);
    }
    let xor = |s: &mut BellString, f: &mut ParityFrame, p: usize| -> Result<()> {
        s.bxor(p, target)?;
        f.bxor(p, target);
        Ok(())
    };
    let had = |s: &mut BellString, f: &mut ParityFrame, p: usize| -> Result<()> {
        s.bhadamard(p)?;
        f.bhadamard(p);
        Ok(())
    };
    for &p in alive.iter().filter(|&&p| p != target) {
        match rng.random_range(0..4u8) {
            0 => {}
            1 => xor(string, frame, p)?,
            2 => {
                had(string, frame, p)?;
                xor(string, frame, p)?;
                had(string, frame, p)?;
            }
            _ => {
                xor(string, frame, p)?;
                had(string, frame, p)?;
                xor(string, frame, p)?;
                had(string, frame, p)?;
            }
        }
    }
    let functional = frame.amplitude(target);
    let bit = string.measure_amplitude(target)?;
    Ok(ParityRecord { target, functional, bit })
}

/// Every typical string, packed with [`encode`].
fn enumerate_candidates(e: &TypicalEnsemble) -> Vec<u64> {
    let n = e.n();
    let (lo, hi): (Vec<usize>, Vec<usize>) = e.occupation_ranges().into_iter().unzip();
    let support = e.spectrum().support();
    let mut out = Vec::new();
    let mut counts = vec![0usize; 4];
    fn walk(
        pos: usize,
        code: u64,
        n: usize,
        support: &[usize],
        lo: &[usize],
        hi: &[usize],
        counts: &mut [usize],
        out: &mut Vec<u64>,
    ) {
        let deficit: usize = lo.iter().zip(counts.iter()).map(|(&l, &c)| l.saturating_sub(c)).sum();
        if deficit > n - pos {
            return;
        }
        if pos == n {
            out.push(code);
            return;
        }
        for &k in support {
            if counts[k] < hi[k] {
                counts[k] += 1;
                walk(pos + 1, code | ((k as u64) << (2 * pos)), n, support, lo, hi, counts, out);
                counts[k] -= 1;
            }
        }
    }
    walk(0, 0, n, &support, &lo, &hi, &mut counts, &mut out);
    debug_assert!(out.iter().all(|&c| {
        let idx: Vec<usize> = (0..n).map(|p| ((c >> (2 * p)) & 3) as usize).collect();
        e.admits_string(&idx)
    }));
    out
}

/// Draws a typical string and tries to identify it with `rounds` parity
/// measurements.
pub fn run_hashing(
    spectrum: &BellDiagonalSpectrum,
    n: usize,
    rounds: usize,
    seed: u64,
) -> Result<IdentificationResult> {
    Ok(HashingSimulator::new(spectrum.clone(), n, rounds, None)?.run_trial(seed)?.result)
}

// ---------------------------------------------------------------------------
// yields

/// Yield for `kept_pairs` unmeasured pairs out of `n`.
pub fn kept_pair_yield(kept_pairs: usize, n: usize, e_sigma: f64) -> f64 {
    kept_pairs as f64 * e_sigma / n as f64
}

/// Yields implied by an average DI and a maximal DI per measured pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YieldBounds {
    /// `(1 - S / I_d) E`.
    pub with_average_di: f64,
    /// `(1 - S / I_dmax) E`.
    pub with_max_di: f64,
    /// `S / I_dmax`, the fraction of pairs that must be measured.
    pub measured_fraction: f64,
    pub condition: Distinguishability,
}

pub fn yield_bounds(e_sigma: f64, s_bits: f64, id_bits: f64, idmax_bits: f64) -> Result<YieldBounds> {
    if !(id_bits > 0.0) || !(idmax_bits > 0.0) {
        return Err(contract(format!("DI must be positive, got I_d = {id_bits}, I_dmax = {idmax_bits}")));
    }
    Ok(YieldBounds {
        with_average_di: (1.0 - s_bits / id_bits) * e_sigma,
        with_max_di: (1.0 - s_bits / idmax_bits) * e_sigma,
        measured_fraction: s_bits / idmax_bits,
        condition: distinguishability_condition(s_bits, idmax_bits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(k: usize) -> BellLabel {
        BellLabel::from_index(k).unwrap()
    }

    #[test]
    fn label_index_bijection() {
        assert_eq!(l(0), BellLabel { phase: false, amplitude: false });
        assert_eq!(l(1), BellLabel { phase: true, amplitude: false });
        assert_eq!(l(2), BellLabel { phase: false, amplitude: true });
        assert_eq!(l(3), BellLabel { phase: true, amplitude: true });
        assert!(BellLabel::from_index(4).is_err());
    }

    #[test]
    fn phi_plus_pair_is_bxor_fixed_point() {
        let mut s = BellString::from_indices(&[0, 0]).unwrap();
        s.bxor(0, 1).unwrap();
        assert_eq!(s.labels, vec![l(0), l(0)]);
    }

    #[test]
    fn bxor_is_an_involution() {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = BellString::from_indices(&[a, b]).unwrap();
                s.bxor(0, 1).unwrap();
                s.bxor(0, 1).unwrap();
                assert_eq!(s.labels, vec![l(a), l(b)]);
            }
        }
    }

    #[test]
    fn hadamard_swaps_phi_minus_and_psi_plus() {
        let t = gate_tables();
        assert_eq!(t.bhadamard[0], 0);
        assert_eq!(t.bhadamard[1], 2);
        assert_eq!(t.bhadamard[2], 1);
        assert_eq!(t.bhadamard[3], 3);
        for k in 0..4 {
            assert_eq!(t.bhadamard[t.bhadamard[k]], k);
        }
    }

    #[test]
    fn measurement_reads_amplitude_bit() {
        let mut s = BellString::from_indices(&[2, 1]).unwrap();
        assert!(s.measure_amplitude(0).unwrap());
        assert!(!s.measure_amplitude(1).unwrap());
        assert!(matches!(s.measure_amplitude(0), Err(Error::Contract(_))));
        assert!(s.label(0).is_none());
    }

    #[test]
    fn bxor_then_measure_target_gives_amplitude_parity() {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = BellString::from_indices(&[a, b]).unwrap();
                s.bxor(0, 1).unwrap();
                let bit = s.measure_amplitude(1).unwrap();
                assert_eq!(bit, l(a).amplitude ^ l(b).amplitude);
            }
        }
    }

    #[test]
    fn dead_pairs_are_rejected() {
        let mut s = BellString::from_indices(&[0, 0, 0]).unwrap();
        s.measure_amplitude(1).unwrap();
        assert!(s.bxor(0, 1).is_err());
        assert!(s.bxor(1, 2).is_err());
        assert!(s.bhadamard(1).is_err());
        assert!(s.bxor(0, 0).is_err());
        assert!(s.bxor(0, 2).is_ok());
    }

    #[test]
    fn frame_tracks_string() {
        // every op sequence keeps frame-predicted bits equal to actual labels
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let idx: Vec<usize> = (0..5).map(|_| rng.random_range(0..4)).collect();
            let code = encode(&idx);
            let mut s = BellString::from_indices(&idx).unwrap();
            let mut f = ParityFrame::new(5);
            for _ in 0..12 {
                let a = rng.random_range(0..5);
                let b = rng.random_range(0..5);
                if a == b {
                    s.bhadamard(a).unwrap();
                    f.bhadamard(a);
                } else {
                    s.bxor(a, b).unwrap();
                    f.bxor(a, b);
                }
            }
            for p in 0..5 {
                let lab = s.label(p).unwrap();
                assert_eq!(parity(f.masks[p][0] & code), lab.phase);
                assert_eq!(parity(f.masks[p][1] & code), lab.amplitude);
            }
        }
    }

    #[test]
    fn pure_source_always_identified() {
        let sp = BellDiagonalSpectrum::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        for m in 1..6 {
            let r = run_hashing(&sp, 6, m, 11).unwrap();
            assert!(r.success);
            assert_eq!(r.posterior_size, 1);
            assert_eq!(r.yield_per_copy, (6 - m) as f64 / 6.0);
            assert_eq!(r.accumulated_di_bits, m as f64);
        }
    }

    #[test]
    fn size_and_round_limits() {
        let sp = BellDiagonalSpectrum::new([0.9, 0.1, 0.0, 0.0]).unwrap();
        assert!(matches!(
            run_hashing(&sp, 13, 4, 0),
            Err(Error::UnsupportedSize { value: 13, cap: EXHAUSTIVE_MAX_N, .. })
        ));
        assert!(matches!(run_hashing(&sp, 8, 0, 0), Err(Error::Contract(_))));
        assert!(matches!(run_hashing(&sp, 8, 9, 0), Err(Error::Contract(_))));
        assert!(matches!(run_hashing(&sp, 1, 1, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn default_window_for_skewed_spectrum() {
        let s = Spectrum::new(vec![0.9, 0.1, 0.0, 0.0]).unwrap();
        let eps = default_epsilon(&s, 8);
        assert!(eps < 0.1);
        let sim = HashingSimulator::new(BellDiagonalSpectrum::from_spectrum(s.clone()).unwrap(), 8, 8, None).unwrap();
        // only strings with exactly one Phi- fit a window narrower than 0.1
        assert_eq!(sim.candidate_count(), 8);
        // uniform spectrum reaches the mass target inside the allowed window
        let u = Spectrum::new(vec![0.25; 4]).unwrap();
        let eps = default_epsilon(&u, 8);
        let mass = epsilon_typical_mass(&TypicalEnsemble::new(u, 8, eps).unwrap()).mass;
        assert!(eps < 0.25 && mass > 0.0);
        // no window below 0.1 fits n = 2, so the whole support is used
        assert_eq!(default_epsilon(&s, 2), 1.0);
    }

    #[test]
    fn candidates_match_brute_force() {
        let s = Spectrum::new(vec![0.5, 0.25, 0.125, 0.125]).unwrap();
        let e = TypicalEnsemble::new(s, 6, 0.1).unwrap();
        let mut fast = enumerate_candidates(&e);
        fast.sort_unstable();
        let mut slow: Vec<u64> = (0..1u64 << 12)
            .filter(|&c| {
                let idx: Vec<usize> = (0..6).map(|p| ((c >> (2 * p)) & 3) as usize).collect();
                e.admits_string(&idx)
            })
            .collect();
        slow.sort_unstable();
        assert_eq!(fast, slow);
    }

    #[test]
    fn yield_examples() {
        let y = yield_bounds(1.0, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(y.with_max_di, 1.0);
        let s = shannon_entropy(&Spectrum::new(vec![0.9, 0.1, 0.0, 0.0]).unwrap());
        let y = yield_bounds(1.0, s, 1.0, 1.0).unwrap();
        assert!((y.with_max_di - 0.531).abs() < 1e-3);
        assert!(y.condition.holds);
        let y = yield_bounds(1.0, 1.75, 0.8113, 0.8113).unwrap();
        assert!((y.with_max_di + 1.157).abs() < 1e-3);
        assert!(!y.condition.holds);
        assert!(yield_bounds(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(yield_bounds(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn collision_estimate_for_skewed_spectrum() {
        let s = Spectrum::new(vec![0.9, 0.1, 0.0, 0.0]).unwrap();
        let c = collision_estimate(&s, 8, 8);
        assert!((c - 0.049).abs() < 0.002, "{c}");
    }
}
