//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use locc_distill::bell_protocol::{gate_tables, BellString, HashingSimulator, TrialRecord};
use locc_distill::measurement_di::{di_report, distinguishability_condition, optimize_di, ProductBasis};
use locc_distill::rng::derive_seed;
use locc_distill::states::{
    binary_entropy, shannon_entropy, BellDiagonalSpectrum, BellState, EnsembleDecomposition, Spectrum,
};
use locc_distill::typical::{
    epsilon_typical_mass_with, exact_multinomial, log2_big, log2_multinomial, mode_mass, mode_type, MassMethod,
    MassOptions, TypicalEnsemble,
};

const SEED: u64 = 42;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn spectrum(w: &[f64]) -> Spectrum {
    Spectrum::new(w.to_vec()).expect("valid spectrum")
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_locc-distill"))
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = binary().args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn text_field(text: &str, key: &str) -> Result<String, String> {
    text.lines()
        .find_map(|l| {
            let mut it = l.splitn(2, char::is_whitespace);
            (it.next() == Some(key)).then(|| it.next().unwrap_or("").trim().to_string())
        })
        .ok_or_else(|| format!("`{key}` missing from output"))
}

fn uniform01(stream: u64, i: u64) -> f64 {
    (derive_seed(stream, i) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

// ---------------------------------------------------------------------------

fn c1_entropy() -> Outcome {
    let s = shannon_entropy(&spectrum(&[0.5, 0.25, 0.125, 0.125]));
    ensure((s - 1.75).abs() <= 1e-12, format!("S = {s}"))?;
    let pure = shannon_entropy(&spectrum(&[1.0, 0.0, 0.0, 0.0]));
    ensure(pure == 0.0, format!("pure S = {pure}"))?;
    Ok(format!("S = {s}, |S - 1.75| = {:e}, pure S = {pure}", (s - 1.75).abs()))
}

fn c2_typical_count() -> Outcome {
    let sp = spectrum(&[0.5, 0.5]);
    let mut rates = Vec::new();
    for n in [10, 100, 1000] {
        let t = mode_type(&sp, n);
        let lg = log2_multinomial(&t);
        let exact = log2_big(&exact_multinomial(&t));
        ensure((lg - exact).abs() <= 1e-6, format!("n = {n}: log-gamma {lg} vs exact {exact}"))?;
        rates.push(lg / n as f64);
    }
    ensure(rates[0] < rates[1] && rates[1] < rates[2], format!("rates not increasing: {rates:?}"))?;
    ensure(rates[2] >= 0.994, format!("rate at n = 1000 is {}", rates[2]))?;
    Ok(format!("log2(count)/n = {:.6}, {:.6}, {:.6}", rates[0], rates[1], rates[2]))
}

fn c3_mode_and_typical_mass() -> Outcome {
    let half = spectrum(&[0.5, 0.5]);
    let ratio = mode_mass(&half, 100) / mode_mass(&half, 400);
    ensure((1.8..=2.2).contains(&ratio), format!("mode-mass ratio {ratio}"))?;
    let e = TypicalEnsemble::new(spectrum(&[0.5, 0.25, 0.125, 0.125]), 2000, 0.05).map_err(|e| e.to_string())?;
    let m = epsilon_typical_mass_with(&e, MassOptions { samples: 100_000, seed: SEED, ..MassOptions::default() });
    ensure(
        m.method == MassMethod::MonteCarlo && m.samples == 100_000,
        format!("method {:?}, {} samples", m.method, m.samples),
    )?;
    ensure(m.lower_3sigma() >= 0.99, format!("mass {} - 3 sigma = {}", m.mass, m.lower_3sigma()))?;
    Ok(format!(
        "mass(100)/mass(400) = {ratio:.4}; eps-mass = {:.5} +/- {:.5} (3 sigma floor {:.5}, 1e5 samples)",
        m.mass,
        3.0 * m.std_error,
        m.lower_3sigma()
    ))
}

fn c4_di_closed_form() -> Outcome {
    let basis = ProductBasis::computational(2, 2);
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let raw: Vec<f64> = (0..4).map(|i| uniform01(k, i) + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut w = [0.0; 4];
        for (wi, r) in w.iter_mut().zip(&raw) {
            *wi = r / total;
        }
        let bd = BellDiagonalSpectrum::new(w).map_err(|e| e.to_string())?;
        let di = di_report(&bd.ensemble(), &basis, 1e-9).map_err(|e| e.to_string())?.average_di;
        let expected = binary_entropy(w[0] + w[1]);
        worst = worst.max((di - expected).abs());
    }
    ensure(worst <= 1e-12, format!("max |DI - H2| = {worst:e}"))?;
    Ok(format!("100 spectra, max |DI - H2(l1 + l2)| = {worst:e}"))
}

/// Mass of each type, by walking all `m^n` strings.
fn enumerated_type_mass(w: &[f64], n: usize, target: &[usize]) -> f64 {
    let m = w.len();
    let mut total = 0.0;
    let mut digits = vec![0usize; n];
    loop {
        let mut counts = vec![0usize; m];
        let mut p = 1.0;
        for &d in &digits {
            counts[d] += 1;
            p *= w[d];
        }
        if counts == target {
            total += p;
        }
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            return total;
        }
    }
}

fn c5_brute_force_mass() -> Outcome {
    let cases: Vec<(Vec<f64>, usize)> = vec![
        (vec![0.5, 0.5], 20),
        (vec![0.7, 0.3], 20),
        (vec![0.9, 0.1], 20),
        (vec![0.5, 0.25, 0.125, 0.125], 8),
        (vec![0.4, 0.3, 0.2, 0.1], 8),
    ];
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (w, max_n) in &cases {
        let sp = spectrum(w);
        for n in 1..=*max_n {
            let t = mode_type(&sp, n);
            let oracle = enumerated_type_mass(w, n, t.occupations());
            let got = mode_mass(&sp, n);
            worst = worst.max((got - oracle).abs());
            ensure((got - oracle).abs() <= 1e-9, format!("{w:?}, n = {n}: {got} vs {oracle}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (spectrum, n) cases, max error {worst:e}"))
}

// Dense real-amplitude oracle: qubits ordered A1 A2 B1 B2 (A1 most
// significant); a Bell pair k on (a, b) has amplitude bell(k, a, b).
fn bell(k: usize, a: usize, b: usize) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if k & 1 == 1 { -1.0 } else { 1.0 };
    match (k >> 1, a, b) {
        (0, 0, 0) | (1, 0, 1) => r,
        (0, 1, 1) | (1, 1, 0) => sign * r,
        _ => 0.0,
    }
}

fn two_pair(k1: usize, k2: usize) -> [f64; 16] {
    let mut v = [0.0; 16];
    for (idx, x) in v.iter_mut().enumerate() {
        let (a1, a2, b1, b2) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        *x = bell(k1, a1, b1) * bell(k2, a2, b2);
    }
    v
}

fn decode<const N: usize>(v: &[f64; N], candidates: impl Iterator<Item = (usize, [f64; N])>) -> Option<usize> {
    candidates
        .filter(|(_, c)| {
            let d: f64 = c.iter().zip(v).map(|(a, b)| a * b).sum();
            (d * d - 1.0).abs() < 1e-9
        })
        .map(|(k, _)| k)
        .next()
}

fn c6_gate_tables() -> Outcome {
    let tables = gate_tables();
    let mut agree_x = 0;
    for k1 in 0..4 {
        for k2 in 0..4 {
            let v = two_pair(k1, k2);
            let mut out = [0.0; 16];
            for (idx, &x) in v.iter().enumerate() {
                let (a1, mut a2, b1, mut b2) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
                a2 ^= a1;
                b2 ^= b1;
                out[a1 << 3 | a2 << 2 | b1 << 1 | b2] = x;
            }
            let dense = decode(&out, (0..16).map(|c| (c, two_pair(c / 4, c % 4))))
                .ok_or_else(|| format!("BXOR output of ({k1}, {k2}) is not a Bell product"))?;
            let mut s = BellString::from_indices(&[k1, k2]).map_err(|e| e.to_string())?;
            s.bxor(0, 1).map_err(|e| e.to_string())?;
            let symbolic = (s.label(0).unwrap().index(), s.label(1).unwrap().index());
            if symbolic == (dense / 4, dense % 4) && tables.bxor[k1][k2] == symbolic {
                agree_x += 1;
            }
        }
    }
    let mut agree_h = 0;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = [[r, r], [r, -r]];
    let single = |k: usize| -> [f64; 4] { std::array::from_fn(|i| bell(k, i >> 1, i & 1)) };
    for k in 0..4 {
        let v = single(k);
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, &x) in v.iter().enumerate() {
                *o += h[i >> 1][j >> 1] * h[i & 1][j & 1] * x;
            }
        }
        let dense = decode(&out, (0..4).map(|c| (c, single(c))))
            .ok_or_else(|| format!("H x H output of {k} is not a Bell state"))?;
        let mut s = BellString::from_indices(&[k]).map_err(|e| e.to_string())?;
        s.bhadamard(0).map_err(|e| e.to_string())?;
        if s.label(0).unwrap().index() == dense && tables.bhadamard[k] == dense {
            agree_h += 1;
        }
    }
    ensure(agree_x == 16 && agree_h == 4, format!("BXOR {agree_x}/16, bilateral H {agree_h}/4"))?;
    Ok(format!("BXOR {agree_x}/16, bilateral H {agree_h}/4 against dense evolution"))
}

// ---------------------------------------------------------------------------

const C7_N: usize = 8;
const C7_TRIALS: usize = 2000;
const C7_GRID: [usize; 4] = [4, 6, 8, 10];

struct HashingRun {
    rounds: usize,
    records: Result<Vec<TrialRecord>, String>,
}

fn c7_runs() -> &'static Vec<HashingRun> {
    static RUNS: OnceLock<Vec<HashingRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let sp = BellDiagonalSpectrum::new([0.9, 0.1, 0.0, 0.0]).expect("spectrum");
        C7_GRID
            .iter()
            .map(|&m| HashingRun {
                rounds: m,
                records: HashingSimulator::new(sp.clone(), C7_N, m, None)
                    .and_then(|sim| sim.run_trials(SEED, C7_TRIALS))
                    .map_err(|e| e.to_string()),
            })
            .collect()
    })
}

fn rate(records: &[TrialRecord]) -> f64 {
    records.iter().filter(|r| r.result.success).count() as f64 / records.len() as f64
}

fn c7_hashing() -> Outcome {
    let runs = c7_runs();
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let mut prev: Option<(usize, f64)> = None;
    for run in runs {
        match &run.records {
            Ok(recs) => {
                let r = rate(recs);
                summary.push(format!("M={}: {r:.4}", run.rounds));
                if run.rounds == 8 && r < 0.90 {
                    failures.push(format!("success rate {r} < 0.90 at M = 8"));
                }
                let missing = recs.iter().filter(|t| !t.hidden_in_posterior).count();
                let parity: usize = recs.iter().map(|t| t.parity_violations).sum();
                if missing + parity > 0 {
                    failures.push(format!(
                        "M = {}: {missing} hidden-string misses, {parity} parity violations",
                        run.rounds
                    ));
                }
                if let Some((pm, pr)) = prev {
                    if r < pr {
                        failures.push(format!("rate drops from M = {pm} ({pr}) to M = {} ({r})", run.rounds));
                    }
                }
                prev = Some((run.rounds, r));
            }
            Err(e) => {
                summary.push(format!("M={}: no run", run.rounds));
                failures.push(format!("M = {} with n = {C7_N}: {e}", run.rounds));
            }
        }
    }
    let summary = summary.join(", ");
    if failures.is_empty() {
        Ok(format!("{summary}; 0 posterior misses, 0 parity violations"))
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn c8_yield_accounting() -> Outcome {
    let mut checked = 0;
    for run in c7_runs() {
        let Ok(recs) = &run.records else { continue };
        let expected = (C7_N as f64 - run.rounds as f64) / C7_N as f64;
        for t in recs {
            ensure(
                t.result.yield_per_copy == expected
                    && t.result.kept_pairs + t.result.measured_pairs == C7_N
                    && t.result.accumulated_di_bits == run.rounds as f64,
                format!("M = {}, seed {}: yield {} vs {expected}", run.rounds, t.seed, t.result.yield_per_copy),
            )?;
            checked += 1;
        }
    }
    ensure(checked > 0, "no trials to check".into())?;
    Ok(format!("{checked} trials with yield_per_copy = (n - M)/n exactly"))
}

fn c9_bounds_report() -> Outcome {
    let out = cli(&["bounds", "--spectrum", "0.9,0.1,0,0", "--idmax-source", "hashing-class-1bit"])?;
    let e3: f64 = text_field(&out, "yield_max_di")?.parse().map_err(|e| format!("{e}"))?;
    let s = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
    ensure((e3 - (1.0 - s)).abs() <= 1e-6, format!("printed E''' = {e3}, 1 - S = {}", 1.0 - s))?;
    let cond = text_field(&out, "distinguishable")?;
    ensure(cond == "true", format!("condition printed as {cond}"))?;
    let out = cli(&["bounds", "--multicopy", "5"])?;
    let lb: f64 = text_field(&out, "multicopy_lower_bound")?.parse().map_err(|e| format!("{e}"))?;
    ensure(lb == 3.0, format!("multicopy lower bound {lb}"))?;
    Ok(format!("E''' = {e3:.6} (1 - S = {:.6}), condition true; multicopy 5 lower bound {lb}", 1.0 - s))
}

fn three_bell() -> EnsembleDecomposition {
    let states = BellState::ALL[..3].iter().map(|b| b.state()).collect();
    EnsembleDecomposition::new(Spectrum::uniform(3).expect("uniform"), states).expect("orthonormal")
}

fn c10_three_bell_probe() -> Outcome {
    let e = three_bell();
    let witness = di_report(&e, &ProductBasis::computational(2, 2), 1e-9).map_err(|e| e.to_string())?.average_di;
    let best = optimize_di(&e, 64, SEED).map_err(|e| e.to_string())?;
    let ceiling = 3f64.log2() - 0.1;
    ensure(best.best_di >= 0.918, format!("best DI {} < 0.918", best.best_di))?;
    ensure(best.best_di <= ceiling, format!("best DI {} > log2(3) - 0.1", best.best_di))?;
    let cond = distinguishability_condition(shannon_entropy(e.spectrum()), best.best_di);
    ensure(!cond.holds, "condition holds for single-pair product measurements".into())?;
    Ok(format!(
        "best DI {:.6} in [0.918, {ceiling:.6}] (computational witness {witness:.6}), condition false (margin {:.6})",
        best.best_di, cond.margin
    ))
}

fn c11_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("locc-distill-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (csv, summary, opt) = (path("hashing.csv"), path("hashing-summary.json"), path("three-bell.json"));
    let n = C7_N.to_string();
    let trials = C7_TRIALS.to_string();
    let seed = SEED.to_string();
    let hashing = [
        "simulate",
        "--spectrum",
        "0.9,0.1,0,0",
        "--n",
        &n,
        "--rounds",
        "4,6,8",
        "--trials",
        &trials,
        "--seed",
        &seed,
        "--format",
        "csv",
        "--output",
        &csv,
        "--summary",
        &summary,
    ];
    let optimize = [
        "optimize-di",
        "--preset",
        "three-bell-states",
        "--restarts",
        "64",
        "--seed",
        &seed,
        "--format",
        "json",
        "--output",
        &opt,
    ];
    let mut firsts = Vec::new();
    for round in 0..2 {
        cli(&hashing)?;
        cli(&optimize)?;
        let bytes: Vec<Vec<u8>> = [&csv, &summary, &opt].iter().map(|p| std::fs::read(p).unwrap_or_default()).collect();
        if round == 0 {
            firsts = bytes;
        } else {
            for (name, (a, b)) in
                ["hashing.csv", "hashing-summary.json", "three-bell.json"].iter().zip(firsts.iter().zip(&bytes))
            {
                ensure(!a.is_empty() && a == b, format!("{name} differs between runs"))?;
            }
        }
    }
    let sizes: Vec<usize> = firsts.iter().map(Vec::len).collect();
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "hashing CSV ({} B), summary JSON ({} B), optimizer JSON ({} B) byte-identical across reruns",
        sizes[0], sizes[1], sizes[2]
    ))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, title: "entropy exactness", budget: secs(1), check: c1_entropy },
        Criterion { id: 2, title: "typical-count convergence", budget: secs(5), check: c2_typical_count },
        Criterion {
            id: 3,
            title: "mode mass decay and typical mass",
            budget: secs(30),
            check: c3_mode_and_typical_mass,
        },
        Criterion { id: 4, title: "DI closed form", budget: secs(1), check: c4_di_closed_form },
        Criterion { id: 5, title: "brute-force mass oracle", budget: secs(60), check: c5_brute_force_mass },
        Criterion { id: 6, title: "gate-table oracle", budget: secs(1), check: c6_gate_tables },
        Criterion { id: 7, title: "hashing identification", budget: secs(300), check: c7_hashing },
        Criterion { id: 8, title: "yield accounting", budget: secs(1), check: c8_yield_accounting },
        Criterion { id: 9, title: "bounds report", budget: secs(1), check: c9_bounds_report },
        Criterion { id: 10, title: "three-Bell-state probe", budget: secs(120), check: c10_three_bell_probe },
        Criterion { id: 11, title: "determinism", budget: secs(600), check: c11_determinism },
    ];
    println!("acceptance: {} criteria", criteria.len());
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.budget => Err(format!("{detail}; runtime over budget")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!(
            "criterion {:>2} {tag}  {}: {detail} [{:.2} s of {} s]",
            c.id,
            c.title,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
