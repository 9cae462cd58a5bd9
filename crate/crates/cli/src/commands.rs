use serde::Serialize;

use locc_distill::bell_protocol::{collision_estimate, yield_bounds, HashingSimulator, TrialRecord, EXHAUSTIVE_MAX_N};
use locc_distill::measurement_di::{
    di_report, distinguishability_condition, optimize_di_with, BasisLayout, DIOptimizerOptions, DIReport,
    Distinguishability, ProductBasis, SerializedProductVector, PRODUCT_MEASUREMENT_CLASS,
};
use locc_distill::states::{bits_to_nats, ensemble_entanglement, shannon_entropy};
use locc_distill::typical::{
    epsilon_typical_mass_with, log2_big, mode_mass, mode_type, multinomial_count, MassMethod, MassOptions,
    TypicalEnsemble,
};

use crate::args::{
    BasisChoice, BoundsArgs, Cli, DiArgs, IdmaxSource, OptimizeArgs, SimulateArgs, SourceArgs, TypicalArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{num, Output, Table, TextBlock};
use crate::source::{self, Source};

pub const HASHING_CLASS: &str = "one parity bit per measured pair (bilateral XOR hashing)";
pub const USER_CLASS: &str = "user supplied";
pub const MULTICOPY_NOTE: &str = "the relative entropy of entanglement of the n-copy mixture equals n - 2 \
(cited result, not computed here), so the lower bound is attained";

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct EntropyReport {
    pub weights: Vec<f64>,
    pub entropy_bits: f64,
    pub entropy_nats: f64,
    /// Average entanglement of the members, for ensemble inputs.
    pub ensemble_entanglement: Option<f64>,
}

pub fn entropy(args: &SourceArgs) -> CliResult<Output> {
    let src = Source::load(args)?;
    let spectrum = src.spectrum()?;
    let s = shannon_entropy(&spectrum);
    let e = match &src {
        Source::Ensemble { ensemble, .. } => Some(ensemble_entanglement(ensemble)?),
        Source::Weights(_) => None,
    };
    let report = EntropyReport {
        weights: spectrum.weights().to_vec(),
        entropy_bits: s,
        entropy_nats: bits_to_nats(s),
        ensemble_entanglement: e,
    };

    let mut table = Table::new(vec!["entropy_bits", "entropy_nats", "ensemble_entanglement"]);
    table.push(vec![num(s), num(report.entropy_nats), e.map(num).unwrap_or_default()]);
    let mut text = TextBlock::default();
    text.num("entropy_bits", s).num("entropy_nats", report.entropy_nats);
    if let Some(e) = e {
        text.num("ensemble_entanglement", e);
    }
    Ok(Output::new(&report, table, text.finish()))
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct TypicalRow {
    pub n: usize,
    /// `log2` of the number of strings in the most likely type, over `n`.
    pub log2_count_per_n: f64,
    /// Gap between the log-gamma and exact big-integer `log2` counts, when
    /// the exact count is computed.
    pub log2_count_exact_gap: Option<f64>,
    pub entropy: f64,
    pub mode_mass: f64,
    pub epsilon: f64,
    pub epsilon_mass: f64,
    pub epsilon_mass_std_error: f64,
    pub epsilon_mass_lower_3sigma: f64,
    pub epsilon_mass_method: MassMethod,
    pub epsilon_mass_samples: usize,
}

pub fn typical(cli: &Cli, args: &TypicalArgs) -> CliResult<Output> {
    let spectrum = source::spectrum(&args.spectrum)?;
    if args.n.contains(&0) {
        return Err(CliError::usage("--n values must be positive"));
    }
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let epsilon = args.epsilon.unwrap_or_else(|| 0.05f64.min(spectrum.min_nonzero() / 2.0));
    let s = shannon_entropy(&spectrum);
    let opts = MassOptions { samples: args.samples, seed: cli.seed, ..MassOptions::default() };
    let mut rows = Vec::with_capacity(args.n.len());
    for &n in &args.n {
        let count = multinomial_count(&mode_type(&spectrum, n));
        let gap = count.exact_value.as_ref().map(|b| (log2_big(b) - count.log2_value).abs());
        let ens = TypicalEnsemble::new(spectrum.clone(), n, epsilon)?;
        let mass = epsilon_typical_mass_with(&ens, opts);
        rows.push(TypicalRow {
            n,
            log2_count_per_n: count.log2_value / n as f64,
            log2_count_exact_gap: gap,
            entropy: s,
            mode_mass: mode_mass(&spectrum, n),
            epsilon,
            epsilon_mass: mass.mass,
            epsilon_mass_std_error: mass.std_error,
            epsilon_mass_lower_3sigma: mass.lower_3sigma(),
            epsilon_mass_method: mass.method,
            epsilon_mass_samples: mass.samples,
        });
    }

    let mut table = Table::new(vec![
        "n",
        "log2_count_per_n",
        "entropy",
        "mode_mass",
        "epsilon_mass",
        "epsilon",
        "epsilon_mass_std_error",
        "epsilon_mass_lower_3sigma",
        "epsilon_mass_method",
        "log2_count_exact_gap",
    ]);
    let mut text = format!(
        "{:>8}  {:>16}  {:>9}  {:>9}  {:>12}  {:>9}  {}\n",
        "n", "log2_count_per_n", "entropy", "mode_mass", "epsilon_mass", "std_error", "method"
    );
    for r in &rows {
        let method = match r.epsilon_mass_method {
            MassMethod::Exact => "exact",
            MassMethod::MonteCarlo => "monte-carlo",
        };
        table.push(vec![
            r.n.to_string(),
            num(r.log2_count_per_n),
            num(r.entropy),
            num(r.mode_mass),
            num(r.epsilon_mass),
            num(r.epsilon),
            num(r.epsilon_mass_std_error),
            num(r.epsilon_mass_lower_3sigma),
            method.to_string(),
            r.log2_count_exact_gap.map(num).unwrap_or_default(),
        ]);
        text.push_str(&format!(
            "{:>8}  {:>16.6}  {:>9.6}  {:>9.6}  {:>12.6}  {:>9.6}  {method}\n",
            r.n, r.log2_count_per_n, r.entropy, r.mode_mass, r.epsilon_mass, r.epsilon_mass_std_error
        ));
    }
    text.push_str(&format!("epsilon {epsilon:.6}\n"));
    Ok(Output::new(&rows, table, text))
}

// ---------------------------------------------------------------------------

fn outcome_table(report: &DIReport, extra_header: Vec<&'static str>, extra: &[String]) -> Table {
    let mut header = vec!["outcome", "probability", "indication_set", "indication_mass"];
    header.extend(extra_header);
    let mut table = Table::new(header);
    for j in 0..report.outcome_probs.len() {
        let mut row = vec![
            j.to_string(),
            num(report.outcome_probs[j]),
            join(&report.indication_sets[j]),
            num(report.indication_masses[j]),
        ];
        row.extend(extra.iter().cloned());
        table.push(row);
    }
    table
}

fn outcome_text(report: &DIReport) -> String {
    let mut s = format!("{:>7}  {:>11}  {:>15}  {}\n", "outcome", "probability", "indication_mass", "indication_set");
    for j in 0..report.outcome_probs.len() {
        s.push_str(&format!(
            "{j:>7}  {:>11.6}  {:>15.6}  {{{}}}\n",
            report.outcome_probs[j],
            report.indication_masses[j],
            report.indication_sets[j].iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ));
    }
    s
}

#[derive(Serialize)]
pub struct DiOutput {
    pub basis: BasisChoice,
    pub entropy_bits: f64,
    pub report: DIReport,
}

pub fn di(args: &DiArgs) -> CliResult<Output> {
    check_tolerance(args.tolerance)?;
    let src = Source::load(&args.source)?;
    let e = src.ensemble()?;
    let [da, db] = e.dims();
    let basis = match args.basis {
        BasisChoice::Computational => ProductBasis::computational(da, db),
        BasisChoice::X if [da, db] == [2, 2] => ProductBasis::qubit_x_basis(),
        BasisChoice::X => return Err(CliError::usage("--basis x needs a two-qubit ensemble")),
    };
    let report = di_report(&e, &basis, args.tolerance)?;
    let s = shannon_entropy(e.spectrum());

    let table = outcome_table(&report, vec!["average_di"], &[num(report.average_di)]);
    let mut text = TextBlock::default();
    text.num("average_di", report.average_di).num("outcome_entropy", report.outcome_entropy).num("entropy_bits", s);
    let text = format!("{}{}", text.finish(), outcome_text(&report));
    Ok(Output::new(&DiOutput { basis: args.basis, entropy_bits: s, report }, table, text))
}

fn check_tolerance(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol <= locc_distill::measurement_di::MAX_INDICATION_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "--tolerance must be in (0, {}], got {tol}",
            locc_distill::measurement_di::MAX_INDICATION_TOLERANCE
        )))
    }
}

fn check_restarts(r: usize) -> CliResult<()> {
    if (1..=100_000).contains(&r) {
        Ok(())
    } else {
        Err(CliError::usage(format!("--restarts must be in 1..=100000, got {r}")))
    }
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct OptimizeOutput {
    pub best_di: f64,
    pub entropy_bits: f64,
    pub measurement_class: &'static str,
    /// Whether this class reaches the entropy (`I_dmax >= S`).
    pub condition: Distinguishability,
    pub layout: BasisLayout,
    pub params: [f64; 6],
    pub basis: Vec<SerializedProductVector>,
    pub best_restart: usize,
    pub restarts: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub report: DIReport,
}

pub fn optimize(cli: &Cli, args: &OptimizeArgs) -> CliResult<Output> {
    check_tolerance(args.tolerance)?;
    check_restarts(args.restarts)?;
    let e = Source::load(&args.source)?.ensemble()?;
    let mut opts = DIOptimizerOptions::new(args.restarts, cli.seed);
    opts.indication_tolerance = args.tolerance;
    let best = optimize_di_with(&e, opts)?;
    let s = shannon_entropy(e.spectrum());
    let out = OptimizeOutput {
        best_di: best.best_di,
        entropy_bits: s,
        measurement_class: PRODUCT_MEASUREMENT_CLASS,
        condition: distinguishability_condition(s, best.best_di),
        layout: best.layout,
        params: best.params,
        basis: (&best.basis).into(),
        best_restart: best.best_restart,
        restarts: best.restarts,
        evaluations: best.evaluations,
        seed: cli.seed,
        report: best.report,
    };

    let vec_cell = |v: &locc_distill::measurement_di::SerializedVector| {
        v.re.iter().zip(&v.im).map(|(r, i)| format!("{r}{i:+}i")).collect::<Vec<_>>().join(";")
    };
    let mut table =
        Table::new(vec!["outcome", "probability", "indication_set", "indication_mass", "alice", "bob", "best_di"]);
    for (j, v) in out.basis.iter().enumerate() {
        table.push(vec![
            j.to_string(),
            num(out.report.outcome_probs[j]),
            join(&out.report.indication_sets[j]),
            num(out.report.indication_masses[j]),
            vec_cell(&v.alice),
            vec_cell(&v.bob),
            num(out.best_di),
        ]);
    }
    let mut text = TextBlock::default();
    text.num("best_di", out.best_di)
        .num("entropy_bits", s)
        .raw("measurement_class", PRODUCT_MEASUREMENT_CLASS)
        .raw("distinguishable", out.condition.holds)
        .raw("layout", serde_json::to_value(out.layout).expect("enum").as_str().unwrap_or_default())
        .raw("best_restart", out.best_restart)
        .raw("restarts", out.restarts)
        .raw("seed", cli.seed);
    let text = format!("{}{}", text.finish(), outcome_text(&out.report));
    Ok(Output::new(&out, table, text))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct SourceBounds {
    pub s_bits: f64,
    pub e_sigma: f64,
    pub id_bits: f64,
    pub idmax_bits: f64,
    pub idmax_class_label: String,
    /// `(1 - S / I_d) E`.
    pub yield_average_di: f64,
    /// `(1 - S / I_dmax) E`, the one-by-one yield bound.
    pub yield_max_di: f64,
    pub measured_fraction: f64,
    /// `I_dmax >= S`.
    pub distinguishable: bool,
}

#[derive(Debug, Serialize)]
pub struct MulticopyBounds {
    pub copies: usize,
    pub s_bits: f64,
    pub e_sigma: f64,
    pub idmax_bits: f64,
    pub lower_bound: f64,
    pub cited_upper_bound: Option<f64>,
    pub equality_note: Option<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub source: Option<SourceBounds>,
    pub multicopy: Option<MulticopyBounds>,
}

fn source_bounds(cli: &Cli, args: &BoundsArgs) -> CliResult<SourceBounds> {
    let src = Source::load(&args.source)?;
    let class = args.idmax_source.ok_or_else(|| CliError::usage("--idmax-source is required"))?;
    let spectrum = src.spectrum()?;
    let s = shannon_entropy(&spectrum);
    let e_sigma = match &src {
        Source::Weights(w) => source::bell_spectrum(w)?.ensemble_entanglement(),
        Source::Ensemble { ensemble, .. } => ensemble_entanglement(ensemble)?,
    };
    let (idmax, label) = match class {
        IdmaxSource::HashingClass1bit => {
            if !src.is_bell_diagonal() {
                return Err(CliError::usage("--idmax-source hashing-class-1bit needs a Bell-diagonal source"));
            }
            (1.0, HASHING_CLASS.to_string())
        }
        IdmaxSource::ProductMeasurementOptimizer => {
            check_restarts(args.restarts)?;
            check_tolerance(args.tolerance)?;
            let mut opts = DIOptimizerOptions::new(args.restarts, cli.seed);
            opts.indication_tolerance = args.tolerance;
            (optimize_di_with(&src.ensemble()?, opts)?.best_di, PRODUCT_MEASUREMENT_CLASS.to_string())
        }
        IdmaxSource::UserSupplied => {
            let v = args.idmax.ok_or_else(|| CliError::usage("--idmax-source user-supplied needs --idmax"))?;
            (v, USER_CLASS.to_string())
        }
    };
    let id = args.id.unwrap_or(idmax);
    let y = yield_bounds(e_sigma, s, id, idmax)?;
    Ok(SourceBounds {
        s_bits: s,
        e_sigma,
        id_bits: id,
        idmax_bits: idmax,
        idmax_class_label: label,
        yield_average_di: y.with_average_di,
        yield_max_di: y.with_max_di,
        measured_fraction: y.measured_fraction,
        distinguishable: y.condition.holds,
    })
}

/// `n` copies of the equal mixture of the four Bell states: entropy 2,
/// entanglement `n`, one DI bit per copy.
fn multicopy_bounds(copies: usize, cited: bool) -> CliResult<MulticopyBounds> {
    if copies == 0 {
        return Err(CliError::usage("--multicopy needs at least one copy"));
    }
    let n = copies as f64;
    let s = 2.0;
    let y = yield_bounds(n, s, n, n)?;
    Ok(MulticopyBounds {
        copies,
        s_bits: s,
        e_sigma: n,
        idmax_bits: n,
        lower_bound: y.with_max_di,
        cited_upper_bound: cited.then_some(n - 2.0),
        equality_note: cited.then_some(MULTICOPY_NOTE),
    })
}

pub fn bounds(cli: &Cli, args: &BoundsArgs) -> CliResult<Output> {
    let has_source = args.source.spectrum.is_some() || args.source.ensemble.is_some() || args.source.preset.is_some();
    if !has_source && args.multicopy.is_none() {
        return Err(CliError::usage("bounds needs a source (--spectrum, --ensemble, --preset) or --multicopy"));
    }
    let report = BoundsReport {
        source: if has_source || args.idmax_source.is_some() { Some(source_bounds(cli, args)?) } else { None },
        multicopy: args.multicopy.map(|n| multicopy_bounds(n, args.cited_upper_bound)).transpose()?,
    };

    let mut table = Table::new(vec![
        "case",
        "s_bits",
        "e_sigma",
        "id_bits",
        "idmax_bits",
        "idmax_class",
        "yield_average_di",
        "yield_max_di",
        "measured_fraction",
        "distinguishable",
        "cited_upper_bound",
    ]);
    let mut text = TextBlock::default();
    if let Some(b) = &report.source {
        table.push(vec![
            "source".into(),
            num(b.s_bits),
            num(b.e_sigma),
            num(b.id_bits),
            num(b.idmax_bits),
            b.idmax_class_label.clone(),
            num(b.yield_average_di),
            num(b.yield_max_di),
            num(b.measured_fraction),
            b.distinguishable.to_string(),
            String::new(),
        ]);
        text.num("entropy_bits", b.s_bits)
            .num("ensemble_entanglement", b.e_sigma)
            .raw("idmax_class", &b.idmax_class_label)
            .num("id_bits", b.id_bits)
            .num("idmax_bits", b.idmax_bits)
            .num("yield_average_di", b.yield_average_di)
            .num("yield_max_di", b.yield_max_di)
            .num("measured_fraction", b.measured_fraction)
            .raw("distinguishable", b.distinguishable);
    }
    if let Some(m) = &report.multicopy {
        table.push(vec![
            format!("multicopy-{}", m.copies),
            num(m.s_bits),
            num(m.e_sigma),
            num(m.idmax_bits),
            num(m.idmax_bits),
            HASHING_CLASS.into(),
            num(m.lower_bound),
            num(m.lower_bound),
            num(m.s_bits / m.idmax_bits),
            (m.idmax_bits >= m.s_bits).to_string(),
            m.cited_upper_bound.map(num).unwrap_or_default(),
        ]);
        text.raw("multicopy_copies", m.copies)
            .num("multicopy_entropy_bits", m.s_bits)
            .num("multicopy_idmax_bits", m.idmax_bits)
            .num("multicopy_lower_bound", m.lower_bound);
        if let (Some(u), Some(note)) = (m.cited_upper_bound, m.equality_note) {
            text.num("multicopy_cited_upper_bound", u).raw("note", note);
        }
    }
    Ok(Output::new(&report, table, text.finish()))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub rounds: usize,
    pub success: bool,
    pub kept_pairs: usize,
    pub yield_per_copy: f64,
    pub accumulated_di_bits: f64,
    pub posterior_size: usize,
    pub hidden_in_posterior: bool,
    pub map_correct: bool,
    pub parity_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub n: usize,
    pub rounds: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Wilson 95% interval.
    pub success_ci95: [f64; 2],
    pub map_rate: f64,
    pub hidden_missing: usize,
    pub parity_violations: usize,
    /// Trials whose yield differs from `(n - M) E / n`.
    pub yield_mismatches: usize,
    pub mean_posterior_size: f64,
    pub epsilon: f64,
    pub candidate_count: usize,
    pub typical_mass: f64,
    pub entropy_bits: f64,
    pub collision_estimate: f64,
    pub candidate_collision_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub summary: Vec<GridSummary>,
    pub trials: Vec<TrialRow>,
}

fn wilson(successes: usize, trials: usize) -> [f64; 2] {
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    [(center - half).max(0.0), (center + half).min(1.0)]
}

pub fn run_simulation(cli: &Cli, args: &SimulateArgs) -> CliResult<SimulationReport> {
    let spectrum = source::bell_spectrum(&args.spectrum)?;
    if !(1..=10_000_000).contains(&args.trials) {
        return Err(CliError::usage(format!("--trials must be in 1..=10000000, got {}", args.trials)));
    }
    let mut sims = Vec::new();
    for &n in &args.n {
        if n > EXHAUSTIVE_MAX_N {
            return Err(locc_distill::Error::UnsupportedSize { what: "n", value: n, cap: EXHAUSTIVE_MAX_N }.into());
        }
        for &m in &args.rounds {
            sims.push(HashingSimulator::new(spectrum.clone(), n, m, args.epsilon)?);
        }
    }
    let s = shannon_entropy(spectrum.spectrum());
    let mut summary = Vec::new();
    let mut trials = Vec::new();
    for sim in &sims {
        let (n, m) = (sim.n(), sim.rounds());
        let records: Vec<TrialRecord> = sim.run_trials(cli.seed, args.trials)?;
        let expected_yield = (n - m) as f64 * spectrum.ensemble_entanglement() / n as f64;
        let successes = records.iter().filter(|r| r.result.success).count();
        let t = args.trials as f64;
        summary.push(GridSummary {
            n,
            rounds: m,
            trials: args.trials,
            successes,
            success_rate: successes as f64 / t,
            success_ci95: wilson(successes, args.trials),
            map_rate: records.iter().filter(|r| r.map_correct).count() as f64 / t,
            hidden_missing: records.iter().filter(|r| !r.hidden_in_posterior).count(),
            parity_violations: records.iter().map(|r| r.parity_violations).sum(),
            yield_mismatches: records.iter().filter(|r| r.result.yield_per_copy != expected_yield).count(),
            mean_posterior_size: records.iter().map(|r| r.result.posterior_size as f64).sum::<f64>() / t,
            epsilon: sim.epsilon(),
            candidate_count: sim.candidate_count(),
            typical_mass: sim.typical_mass(),
            entropy_bits: s,
            collision_estimate: collision_estimate(spectrum.spectrum(), n, m),
            candidate_collision_estimate: sim.candidate_collision_estimate(),
        });
        trials.extend(records.iter().enumerate().map(|(i, r)| TrialRow {
            trial: i,
            seed: r.seed,
            n,
            rounds: m,
            success: r.result.success,
            kept_pairs: r.result.kept_pairs,
            yield_per_copy: r.result.yield_per_copy,
            accumulated_di_bits: r.result.accumulated_di_bits,
            posterior_size: r.result.posterior_size,
            hidden_in_posterior: r.hidden_in_posterior,
            map_correct: r.map_correct,
            parity_violations: r.parity_violations,
        }));
    }
    Ok(SimulationReport { summary, trials })
}

pub fn simulate(cli: &Cli, args: &SimulateArgs) -> CliResult<(Output, serde_json::Value)> {
    let report = run_simulation(cli, args)?;
    let mut table = Table::new(vec![
        "trial",
        "seed",
        "n",
        "M",
        "success",
        "kept_pairs",
        "yield_per_copy",
        "accumulated_di_bits",
        "posterior_size",
        "hidden_in_posterior",
        "map_correct",
        "parity_violations",
    ]);
    for r in &report.trials {
        table.push(vec![
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.rounds.to_string(),
            r.success.to_string(),
            r.kept_pairs.to_string(),
            num(r.yield_per_copy),
            num(r.accumulated_di_bits),
            r.posterior_size.to_string(),
            r.hidden_in_posterior.to_string(),
            r.map_correct.to_string(),
            r.parity_violations.to_string(),
        ]);
    }
    let mut text = format!(
        "{:>3}  {:>3}  {:>7}  {:>12}  {:>19}  {:>8}  {:>11}  {:>10}  {:>9}\n",
        "n", "M", "trials", "success_rate", "ci95", "map_rate", "candidates", "collision", "epsilon"
    );
    for g in &report.summary {
        text.push_str(&format!(
            "{:>3}  {:>3}  {:>7}  {:>12.6}  [{:.6}, {:.6}]  {:>8.6}  {:>11}  {:>10.6}  {:>9.6}\n",
            g.n,
            g.rounds,
            g.trials,
            g.success_rate,
            g.success_ci95[0],
            g.success_ci95[1],
            g.map_rate,
            g.candidate_count,
            g.collision_estimate,
            g.epsilon
        ));
    }
    let summary = serde_json::to_value(&report.summary).expect("plain data serializes");
    Ok((Output::new(&report, table, text), summary))
}
