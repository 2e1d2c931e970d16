//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Trend criteria run on the census-like generator at desk scale with a fixed
//! protocol (see the constants below) over several seeds, and pass only if
//! every seed passes. Criteria listed in `REPORTED_ONLY` are printed but do
//! not fail the run.

mod common;

use std::time::Instant;

use common::*;
use fairgda::cli::{cmd_train, parse_override, ExperimentConfig, TRACE_FILE};
use fairgda::dataset::{adult_like, augment, make_synthetic, split, Augmentation, AugmentedDataset, Dataset};
use fairgda::metrics::{false_discovery_rate, noise_weight_ratio, statistical_rate, HardPredictions, MetricReport};
use fairgda::models::{classify_soft, Adversary, Model};
use fairgda::optim::{train, Algorithm, AlphaSchedule, Objective, OptimizerConfig, RunOutput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASE_SAMPLES: usize = 10_000;
const TEST_FRACTION: f64 = 0.3;
/// `μ · N_train²`; the penalty sums grow with the square of the sample size.
const PENALTY: f64 = 5.0;
const RIDGE: f64 = 1e-3;
const ETA: f64 = 1.0;
const ITERATIONS: usize = 100;
const TAU: f64 = 0.8;
const SEEDS: [u64; 3] = [0, 1, 2];
const CORRELATIONS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const NOISE_CORRELATIONS: [f64; 7] = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const ALPHA_SWEEP_CORRELATION: f64 = 0.21;
const FAIRNESS_ONLY_ALPHA: f64 = 10.0;

/// Criteria whose outcome is printed but does not fail the gate.
const REPORTED_ONLY: [usize; 2] = [7, 8];

struct Protocol {
    seed: u64,
    base: Dataset,
}

impl Protocol {
    fn new(seed: u64) -> Self {
        Protocol {
            seed,
            base: adult_like(BASE_SAMPLES, 100 + seed).unwrap(),
        }
    }

    fn data(&self, corr: f64, aug: Augmentation) -> (AugmentedDataset, AugmentedDataset) {
        let d = make_synthetic(&self.base, corr, self.seed + 7).unwrap().dataset;
        let (tr, te) = split(&d, TEST_FRACTION, self.seed + 11).unwrap();
        (augment(&tr, aug, self.seed + 13), augment(&te, aug, self.seed + 17))
    }

    fn model(&self, train: &AugmentedDataset) -> Model {
        let n = train.len() as f64;
        Model::new(
            Adversary::StatisticalParity {
                degree: 2,
                mu: PENALTY / (n * n),
            },
            RIDGE,
        )
    }

    fn config(&self, algorithm: Algorithm) -> OptimizerConfig {
        OptimizerConfig {
            algorithm,
            eta_adversary: ETA,
            eta_classifier: ETA,
            iterations: ITERATIONS,
            threshold: Some(TAU),
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// Every run of the gate, for the suite-wide identity and threshold checks.
#[derive(Default)]
struct Ledger {
    runs: Vec<(Algorithm, RunOutput)>,
}

impl Ledger {
    fn train(&mut self, cfg: &OptimizerConfig, model: &Model, data: &AugmentedDataset) -> Option<RunOutput> {
        let out = train(cfg, model, data, None).ok()?;
        self.runs.push((cfg.algorithm, out.clone()));
        Some(out)
    }
}

fn test_report(w: &[f64], te: &AugmentedDataset) -> MetricReport {
    MetricReport::compute(&classify_soft(w, te).unwrap(), te.base()).unwrap()
}

fn final_fairness(out: &RunOutput) -> f64 {
    out.trace.last().unwrap().fairness.unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 3];
    let instances = 150;
    for case in 0..instances {
        let n = rng.gen_range(1..=10);
        let rows = rng.gen_range(2..=50);
        let data = random_dataset(&mut rng, n, rows);
        let adv = random_adversary(&mut rng, case);
        let model = Model::new(adv, rng.gen_range(0.0..1.0));
        let params = random_params(&mut rng, &adv, &data);
        for (w, e) in worst.iter_mut().zip(gradient_errors(&model, &params, &data)) {
            *w = w.max(e);
        }
    }
    Outcome {
        pass: worst.iter().all(|e| *e <= 1e-5),
        detail: format!(
            "{instances} instances, max rel err dL_C/dw {:.1e}, dL_F/dw {:.1e}, dL_F/du {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    }
}

fn criterion_2(ledger: &Ledger) -> Outcome {
    let (mut iterations, mut worst, mut bad) = (0usize, 0.0f64, 0usize);
    for (alg, out) in &ledger.runs {
        if *alg == Algorithm::NormalGda {
            continue;
        }
        for r in &out.trace.records {
            iterations += 1;
            let rel = r.identity_residual.abs() / (1.0 + r.grad_norm_f * r.grad_norm_f);
            worst = worst.max(rel);
            if rel > 1e-8 {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: bad == 0 && iterations > 0,
        detail: format!("{iterations} modified iterations, max relative residual {worst:.1e}"),
    }
}

fn bits(mask: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

fn criterion_3() -> Outcome {
    let (mut checked, mut mismatches) = (0u64, 0u64);
    for n in 2..=8usize {
        let full = 1u32 << n;
        for zm in 1..full - 1 {
            let z = bits(zm, n);
            for ym in 0..full {
                let y = bits(ym, n);
                let data = Dataset::from_rows(&vec![vec![0.0]; n], y.clone(), z.clone()).unwrap();
                for pm in 0..full {
                    let p = bits(pm, n);
                    let (sr, fdr) = oracle_metrics(&p, &y, &z);
                    let pred = HardPredictions::new(p).unwrap();
                    let same_sr = statistical_rate(&pred, &data).unwrap().to_bits() == sr.to_bits();
                    let same_fdr = false_discovery_rate(&pred, &data).unwrap().map(f64::to_bits) == fdr.map(f64::to_bits);
                    mismatches += u64::from(!(same_sr && same_fdr));
                    checked += 1;
                }
            }
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: format!("{checked} exhaustive instances (N <= 8), {mismatches} mismatches"),
    }
}

/// Two-feature dataset where `z` decides `y` 90% of the time.
fn skewed_dataset() -> AugmentedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut rows, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..200 {
        let zi = (i % 2) as u8;
        let yi = if rng.gen::<f64>() < 0.9 { zi } else { 1 - zi };
        rows.push(vec![f64::from(zi) + 0.1 * rng.gen::<f64>(), rng.gen::<f64>()]);
        y.push(yi);
        z.push(zi);
    }
    augment(&Dataset::from_rows(&rows, y, z).unwrap(), Augmentation::Bias, 0)
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let data = skewed_dataset();
    let model = Model::from(Adversary::ParityRegularizer { mu: 1e-3 });
    let cfg = |algorithm| OptimizerConfig {
        algorithm,
        iterations: 100,
        alpha: AlphaSchedule::constant(0.1),
        threshold: Some(0.95),
        ..Default::default()
    };
    let normal = ledger.train(&cfg(Algorithm::NormalGda), &model, &data).unwrap();
    let modified = ledger.train(&cfg(Algorithm::NgdModified), &model, &data).unwrap();
    let lf: Vec<f64> = normal.trace.records.iter().map(|r| r.adversary_loss).collect();
    let nonincreasing = lf[50..].windows(2).all(|w| w[1] <= w[0]);
    let best_sr = modified.trace.records.iter().filter_map(|r| r.fairness).fold(0.0, f64::max);
    Outcome {
        pass: nonincreasing && best_sr >= 0.95,
        detail: format!(
            "normal L_F {:.4} -> {:.4} (nonincreasing over last 50: {nonincreasing}), normal final SR {:.3}; modified best SR {best_sr:.3}, final SR {:.3}",
            lf[50],
            lf[99],
            final_fairness(&normal),
            final_fairness(&modified)
        ),
    }
}

fn criterion_5(protocols: &[Protocol], ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for p in protocols {
        let mut line = format!("seed {}:", p.seed);
        for &c in &CORRELATIONS {
            let (tr, te) = p.data(c, Augmentation::Bias);
            let model = p.model(&tr);
            let mut sr = |alg| {
                let out = ledger.train(&p.config(alg), &model, &tr).unwrap();
                (final_fairness(&out), test_report(&out.params.w, &te).statistical_rate)
            };
            let (normal, ngd, agd) = (sr(Algorithm::NormalGda), sr(Algorithm::NgdModified), sr(Algorithm::AgdModified));
            let ok = [ngd, agd].iter().all(|m| m.0 >= normal.0 && m.1 >= normal.1);
            pass &= ok;
            line += &format!(
                " {c}: normal {:.2}/{:.2} ngd {:.2}/{:.2} agd {:.2}/{:.2}{}",
                normal.0,
                normal.1,
                ngd.0,
                ngd.1,
                agd.0,
                agd.1,
                if ok { "" } else { " (x)" }
            );
        }
        detail.push(line);
    }
    Outcome {
        pass,
        detail: format!("final SR train/test, modified >= normal everywhere\n      {}", detail.join("\n      ")),
    }
}

fn criterion_6(protocols: &[Protocol], ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in protocols {
        let (tr, _) = p.data(0.5, Augmentation::Bias);
        let model = p.model(&tr);
        let first = |out: &RunOutput| out.trace.first_reaching(0.9);
        let settled = |out: &RunOutput| {
            let fin = out.trace.last().unwrap().accuracy;
            out.trace
                .records
                .iter()
                .find(|r| r.fairness.is_some_and(|f| f >= 0.9) && (r.accuracy - fin).abs() <= 0.02)
                .map(|r| r.t)
        };
        let ngd = ledger.train(&p.config(Algorithm::NgdModified), &model, &tr).unwrap();
        let agd = ledger.train(&p.config(Algorithm::AgdModified), &model, &tr).unwrap();
        let ok = match (first(&agd), first(&ngd)) {
            (Some(a), Some(n)) => a <= n,
            (Some(_), None) => true,
            _ => false,
        };
        pass &= ok;
        let show = |t: Option<usize>| t.map_or("never".to_string(), |t| t.to_string());
        parts.push(format!(
            "seed {}: first SR >= 0.9 agd {} ngd {} (within 0.02 of final accuracy: agd {} ngd {})",
            p.seed,
            show(first(&agd)),
            show(first(&ngd)),
            show(settled(&agd)),
            show(settled(&ngd))
        ));
    }
    Outcome {
        pass,
        detail: parts.join("\n      "),
    }
}

fn criterion_7(protocols: &[Protocol], ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in protocols {
        for alg in [Algorithm::NgdModified, Algorithm::AgdModified] {
            let ratios: Vec<f64> = NOISE_CORRELATIONS
                .iter()
                .map(|&c| {
                    let (tr, _) = p.data(c, Augmentation::Noise);
                    let out = ledger.train(&p.config(alg), &p.model(&tr), &tr).unwrap();
                    noise_weight_ratio(&out.selected().snapshot.params.w).unwrap()
                })
                .collect();
            let rho = spearman(&NOISE_CORRELATIONS, &ratios);
            pass &= rho > 0.0;
            parts.push(format!(
                "seed {} {}: spearman {rho:+.3}, ratios [{}]",
                p.seed,
                alg.name(),
                ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    Outcome {
        pass,
        detail: parts.join("\n      "),
    }
}

fn criterion_8(protocols: &[Protocol], ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in protocols {
        let (tr, te) = p.data(ALPHA_SWEEP_CORRELATION, Augmentation::Bias);
        let model = p.model(&tr);
        for alg in [Algorithm::NgdModified, Algorithm::AgdModified] {
            let (mut acc, mut sr, mut diverged) = (Vec::new(), Vec::new(), Vec::new());
            for k in 1..=10 {
                let power = f64::from(k) / 10.0;
                let mut cfg = p.config(alg);
                cfg.alpha.power = power;
                match ledger.train(&cfg, &model, &tr) {
                    Some(out) => {
                        let r = test_report(&out.params.w, &te);
                        acc.push(r.accuracy);
                        sr.push(r.statistical_rate);
                    }
                    None => diverged.push(power),
                }
            }
            let ok = diverged.is_empty() && range(&acc) <= 0.05 && range(&sr) <= 0.05;
            if alg == Algorithm::NgdModified {
                pass &= ok;
            }
            parts.push(format!(
                "seed {} {}: accuracy range {:.3}, SR range {:.3}, diverged at p = {:?}",
                p.seed,
                alg.name(),
                range(&acc),
                range(&sr),
                diverged
            ));
        }
    }
    Outcome {
        pass,
        detail: format!("judged on ngd_modified; agd_modified shown for reference\n      {}", parts.join("\n      ")),
    }
}

fn criterion_9(ledger: &Ledger) -> Outcome {
    let (mut checked, mut bad) = (0usize, 0usize);
    for (_, out) in &ledger.runs {
        let Some(tau) = out.tracker.tau() else { continue };
        if let Some(best) = out.tracker.best() {
            checked += 1;
            let recorded = out.trace.records[best.iteration - 1].fairness;
            if !(best.fairness.is_some_and(|f| f >= tau) && recorded == best.fairness) {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: bad == 0 && checked > 0,
        detail: format!("{checked} selected iterates over {} runs, {bad} violations", ledger.runs.len()),
    }
}

fn criterion_10(protocols: &[Protocol], ledger: &mut Ledger) -> Outcome {
    let mut worst = f64::INFINITY;
    for p in protocols {
        for &c in NOISE_CORRELATIONS.iter() {
            let (tr, _) = p.data(c, Augmentation::Bias);
            let cfg = OptimizerConfig {
                objective: Objective::FairnessOnly,
                alpha: AlphaSchedule::constant(FAIRNESS_ONLY_ALPHA),
                ..p.config(Algorithm::NgdModified)
            };
            let sr = ledger.train(&cfg, &p.model(&tr), &tr).map_or(0.0, |o| final_fairness(&o));
            worst = worst.min(sr);
        }
    }
    Outcome {
        pass: worst >= 0.99,
        detail: format!("lowest final train SR {worst:.4} over correlations 0.3..0.9 and all seeds"),
    }
}

fn criterion_11(protocols: &[Protocol]) -> Outcome {
    let mut identical = true;
    let p = &protocols[0];
    let (tr, _) = p.data(0.5, Augmentation::Noise);
    for alg in Algorithm::ALL {
        let a = train(&p.config(alg), &p.model(&tr), &tr, None).unwrap();
        let b = train(&p.config(alg), &p.model(&tr), &tr, None).unwrap();
        identical &= a.trace.to_csv().as_bytes() == b.trace.to_csv().as_bytes();
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for d in &dirs {
        let o: Vec<_> = [
            format!("output=\"{}\"", d.path().display()),
            "data.correlations=[0.5]".into(),
            "data.augmentation=\"noise\"".into(),
            "data.base_samples=3000".into(),
            "optim.threshold=0.8".into(),
        ]
        .iter()
        .map(|s| parse_override(s).unwrap())
        .collect();
        let cfg = ExperimentConfig::load(None, &o).unwrap();
        cmd_train(&cfg).unwrap();
        files.push(std::fs::read(cfg.experiment_dir().join(TRACE_FILE)).unwrap());
    }
    identical &= files[0] == files[1];
    Outcome {
        pass: identical,
        detail: "library traces for all three algorithms and CLI trace files compared byte for byte".into(),
    }
}

fn main() {
    let start = Instant::now();
    let protocols: Vec<Protocol> = SEEDS.iter().map(|&s| Protocol::new(s)).collect();
    let mut ledger = Ledger::default();

    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "gradient oracle equivalence", criterion_1()),
        (3, "metric oracle equivalence", criterion_3()),
        (4, "regularizer-only counterexample", criterion_4(&mut ledger)),
        (5, "modified SR >= normal SR across correlations", criterion_5(&protocols, &mut ledger)),
        (6, "accelerated reaches SR 0.9 no later", criterion_6(&protocols, &mut ledger)),
        (7, "noise weight ratio rises with correlation", criterion_7(&protocols, &mut ledger)),
        (8, "alpha decay barely matters", criterion_8(&protocols, &mut ledger)),
        (10, "fairness-only baseline reaches SR 0.99", criterion_10(&protocols, &mut ledger)),
        (11, "determinism", criterion_11(&protocols)),
    ];
    results.push((2, "orthogonality identity", criterion_2(&ledger)));
    results.push((9, "threshold contract", criterion_9(&ledger)));
    results.sort_by_key(|r| r.0);

    let mut enforced_failures = 0;
    for (k, name, outcome) in &results {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if !outcome.pass && REPORTED_ONLY.contains(k) { " (reported, not enforced)" } else { "" };
        println!("criterion {k:>2} {verdict}{note}: {name}\n      {}", outcome.detail);
        if !outcome.pass && !REPORTED_ONLY.contains(k) {
            enforced_failures += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {enforced_failures} enforced failures, {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if enforced_failures > 0 {
        std::process::exit(1);
    }
}
