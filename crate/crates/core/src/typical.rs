//! Likely-string combinatorics for `n` independent copies of a spectrum.
//!
//! A length-`n` string of eigenstate labels has a *type*: the occupation
//! count of each label. The number of strings of a type is a multinomial
//! coefficient, and the strings near the mode type carry almost all of the
//! probability. Two readings of "almost all" are provided:
//!
//! * [`mode_mass`], the mass of the single mode type. It decays like
//!   `n^(-(m-1)/2)` rather than tending to one.
//! * [`epsilon_typical_mass`], the mass of every type whose empirical
//!   frequencies sit within `epsilon` of the spectrum. This one does tend to
//!   one.
//!
//! Typicality here is strong typicality: labels with zero weight must not
//! occur at all, and every other label's frequency must lie in the window.

use num_bigint::BigUint;
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{contract, invalid, Error, Result};
use crate::rng::stream_rng;
use crate::states::Spectrum;

/// Largest `n` for which [`multinomial_count`] also returns the exact
/// integer.
pub const EXACT_COUNT_THRESHOLD: usize = 5000;
/// Exact summation is used while the number of in-window types is at most
/// this.
pub const EXACT_TYPE_LIMIT: u64 = 1_000_000;
/// Default Monte Carlo sample count for [`epsilon_typical_mass`].
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
/// Default seed for [`epsilon_typical_mass`].
pub const DEFAULT_MC_SEED: u64 = 0x5EED;
/// Rejection attempts before [`sample_likely_string`] gives up.
pub const REJECTION_CAP: usize = 1_000_000;
/// Slack on the frequency window, absorbing rounding in `k/n`.
pub const WINDOW_SLACK: f64 = 1e-12;

const MC_CHUNK: usize = 4096;

/// Occupation counts `k_1..k_m` of a length-`n` string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TypeClass {
    n: usize,
    occupations: Vec<usize>,
}

impl TypeClass {
    pub fn new(occupations: Vec<usize>) -> Result<Self> {
        let n: usize = occupations.iter().sum();
        if n == 0 {
            return Err(invalid("a type class needs n >= 1"));
        }
        Ok(Self { n, occupations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occupations
    }

    /// Type of a concrete label string over `m` labels.
    pub fn of_string(labels: &[usize], m: usize) -> Result<Self> {
        let mut occ = vec![0; m];
        for &l in labels {
            *occ.get_mut(l).ok_or_else(|| contract(format!("label {l} out of range {m}")))? += 1;
        }
        Self::new(occ)
    }
}

/// A possibly huge count, always available as a base-2 logarithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BigCount {
    pub log2_value: f64,
    #[serde(serialize_with = "serialize_big")]
    pub exact_value: Option<BigUint>,
}

fn serialize_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_some(&b.to_string()),
        None => s.serialize_none(),
    }
}

/// `log2` of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (u64::try_from(x).expect("fits") as f64).log2();
    }
    let shift = bits - 64;
    let top = u64::try_from(x >> shift).expect("64 bits");
    (top as f64).log2() + shift as f64
}

/// Spectrum, string length and frequency window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalEnsemble {
    spectrum: Spectrum,
    n: usize,
    epsilon: f64,
}

impl TypicalEnsemble {
    /// `epsilon` must be below the smallest nonzero weight, so a window never
    /// admits dropping a label by accident. `epsilon >= 1` is also accepted
    /// and means "every string of the support".
    pub fn new(spectrum: Spectrum, n: usize, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(invalid(format!("epsilon {epsilon} must be finite and nonnegative")));
        }
        let floor = spectrum.min_nonzero();
        if epsilon >= floor && epsilon < 1.0 {
            return Err(invalid(format!(
                "epsilon {epsilon} must be below the smallest nonzero weight {floor} (or at least 1)"
            )));
        }
        Ok(Self { spectrum, n, epsilon })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Whether occupation counts lie in the window.
    pub fn admits(&self, occupations: &[usize]) -> bool {
        let n = self.n as f64;
        occupations.len() == self.spectrum.spectrum_size()
            && occupations.iter().sum::<usize>() == self.n
            && occupations.iter().zip(self.spectrum.weights()).all(|(&k, &l)| {
                if l == 0.0 {
                    k == 0
                } else {
                    (k as f64 / n - l).abs() <= self.epsilon + WINDOW_SLACK
                }
            })
    }

    pub fn admits_string(&self, labels: &[usize]) -> bool {
        let mut occ = vec![0; self.spectrum.spectrum_size()];
        for &l in labels {
            match occ.get_mut(l) {
                Some(k) => *k += 1,
                None => return false,
            }
        }
        labels.len() == self.n && self.admits(&occ)
    }

    /// Allowed occupation range of each label.
    pub fn occupation_ranges(&self) -> Vec<(usize, usize)> {
        let n = self.n as f64;
        self.spectrum
            .weights()
            .iter()
            .map(|&l| {
                if l == 0.0 {
                    return (0, 0);
                }
                let lo = ((l - self.epsilon - WINDOW_SLACK) * n).ceil().max(0.0) as usize;
                let hi = (((l + self.epsilon + WINDOW_SLACK) * n).floor() as usize).min(self.n);
                (lo, hi)
            })
            .collect()
    }

    /// Upper bound on the number of in-window types.
    pub fn type_count_bound(&self) -> u64 {
        let ranges: Vec<u64> =
            self.occupation_ranges().iter().filter(|(lo, hi)| hi > lo).map(|(lo, hi)| (hi - lo + 1) as u64).collect();
        if ranges.is_empty() {
            return 1;
        }
        ranges[..ranges.len() - 1].iter().fold(1u64, |acc, &r| acc.saturating_mul(r))
    }

    /// Every in-window type class.
    pub fn types(&self) -> Vec<TypeClass> {
        let ranges = self.occupation_ranges();
        let mut out = Vec::new();
        let mut occ = vec![0; ranges.len()];
        enumerate_types(&ranges, 0, self.n, &mut occ, &mut |o| {
            if self.admits(o) {
                out.push(TypeClass { n: self.n, occupations: o.to_vec() });
            }
        });
        out
    }
}

fn enumerate_types(
    ranges: &[(usize, usize)],
    i: usize,
    remaining: usize,
    occ: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if i == ranges.len() {
        if remaining == 0 {
            visit(occ);
        }
        return;
    }
    let room: usize = ranges[i + 1..].iter().map(|r| r.1).sum();
    let (lo, hi) = ranges[i];
    for k in lo..=hi.min(remaining) {
        if remaining - k > room {
            continue;
        }
        occ[i] = k;
        enumerate_types(ranges, i + 1, remaining - k, occ, visit);
    }
    occ[i] = 0;
}

/// The most likely type: `k_i = round(lambda_i n)` by largest remainder,
/// ties going to the lower index.
pub fn mode_type(spectrum: &Spectrum, n: usize) -> TypeClass {
    let w = spectrum.weights();
    let raw: Vec<f64> = w.iter().map(|&l| l * n as f64).collect();
    let mut occ: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = occ.iter().sum();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        occ[i] += 1;
    }
    TypeClass { n, occupations: occ }
}

/// `log2(n! / prod k_i!)` through log-gamma sums.
pub fn log2_multinomial(t: &TypeClass) -> f64 {
    let ln = ln_gamma(t.n as f64 + 1.0) - t.occupations.iter().map(|&k| ln_gamma(k as f64 + 1.0)).sum::<f64>();
    (ln / std::f64::consts::LN_2).max(0.0)
}

/// Exact multinomial coefficient as a product of binomials.
pub fn exact_multinomial(t: &TypeClass) -> BigUint {
    let mut acc = BigUint::from(1u32);
    let mut remaining = t.n as u64;
    for &k in &t.occupations {
        // C(remaining, k), built incrementally so every division is exact
        for j in 1..=k as u64 {
            acc *= remaining - k as u64 + j;
            acc /= j;
        }
        remaining -= k as u64;
    }
    acc
}

/// Number of strings of type `t`.
pub fn multinomial_count(t: &TypeClass) -> BigCount {
    BigCount {
        log2_value: log2_multinomial(t),
        exact_value: (t.n <= EXACT_COUNT_THRESHOLD).then(|| exact_multinomial(t)),
    }
}

/// `log2` of the probability of one particular string of type `t`.
fn log2_string_probability(spectrum: &Spectrum, occupations: &[usize]) -> f64 {
    occupations.iter().zip(spectrum.weights()).map(|(&k, &l)| if k == 0 { 0.0 } else { k as f64 * l.log2() }).sum()
}

/// Total probability of the strings of type `t`.
pub fn type_mass(spectrum: &Spectrum, t: &TypeClass) -> f64 {
    (log2_multinomial(t) + log2_string_probability(spectrum, t.occupations())).exp2()
}

/// Probability of the mode type: count times per-string probability.
pub fn mode_mass(spectrum: &Spectrum, n: usize) -> f64 {
    type_mass(spectrum, &mode_type(spectrum, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMethod {
    Exact,
    MonteCarlo,
}

/// Probability of the epsilon-typical set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalMass {
    pub mass: f64,
    /// Zero for exact summation.
    pub std_error: f64,
    pub method: MassMethod,
    pub samples: usize,
    pub seed: Option<u64>,
}

impl TypicalMass {
    /// `mass - 3 * std_error`.
    pub fn lower_3sigma(&self) -> f64 {
        self.mass - 3.0 * self.std_error
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MassOptions {
    pub samples: usize,
    pub seed: u64,
    pub exact_type_limit: u64,
}

impl Default for MassOptions {
    fn default() -> Self {
        Self { samples: DEFAULT_MC_SAMPLES, seed: DEFAULT_MC_SEED, exact_type_limit: EXACT_TYPE_LIMIT }
    }
}

/// Mass of the epsilon-typical set with default options.
pub fn epsilon_typical_mass(e: &TypicalEnsemble) -> TypicalMass {
    epsilon_typical_mass_with(e, MassOptions::default())
}

pub fn epsilon_typical_mass_with(e: &TypicalEnsemble, opts: MassOptions) -> TypicalMass {
    if e.type_count_bound() <= opts.exact_type_limit {
        let mass: f64 = e.types().iter().map(|t| type_mass(&e.spectrum, t)).sum();
        return TypicalMass { mass: mass.min(1.0), std_error: 0.0, method: MassMethod::Exact, samples: 0, seed: None };
    }
    let chunks = opts.samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(opts.seed, c as u64);
            let size = MC_CHUNK.min(opts.samples - c * MC_CHUNK);
            (0..size).filter(|_| e.admits(&sample_type(&e.spectrum, e.n, &mut rng))).count()
        })
        .sum();
    let p = hits as f64 / opts.samples as f64;
    TypicalMass {
        mass: p,
        std_error: (p * (1.0 - p) / opts.samples as f64).sqrt(),
        method: MassMethod::MonteCarlo,
        samples: opts.samples,
        seed: Some(opts.seed),
    }
}

/// Occupation counts of an i.i.d. string, drawn directly by sequential
/// conditional binomials.
pub fn sample_type<R: Rng + ?Sized>(spectrum: &Spectrum, n: usize, rng: &mut R) -> Vec<usize> {
    let w = spectrum.weights();
    let mut occ = vec![0; w.len()];
    let mut remaining = n as u64;
    let mut mass_left = 1.0;
    for (i, &l) in w.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == w.len() - 1 || mass_left <= l {
            occ[i] = remaining as usize;
            break;
        }
        let p = (l / mass_left).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, p).expect("valid binomial").sample(rng);
        occ[i] = k as usize;
        remaining -= k;
        mass_left -= l;
    }
    occ
}

/// An i.i.d. string conditioned, by rejection, on lying in the window.
pub fn sample_likely_string(e: &TypicalEnsemble, seed: u64) -> Result<Vec<usize>> {
    let mut rng = stream_rng(seed, 0);
    sample_likely_string_with(e, &mut rng)
}

pub fn sample_likely_string_with<R: Rng + ?Sized>(e: &TypicalEnsemble, rng: &mut R) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(e.spectrum.weights()).map_err(|err| invalid(err.to_string()))?;
    for _ in 0..REJECTION_CAP {
        let s: Vec<usize> = (0..e.n).map(|_| dist.sample(rng)).collect();
        if e.admits_string(&s) {
            return Ok(s);
        }
    }
    Err(Error::Sampling(format!("no typical string after {REJECTION_CAP} draws (epsilon {})", e.epsilon)))
}
