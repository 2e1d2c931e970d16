use std::path::Path;
use std::process::Command;

use fairgda::cli::{
    cmd_alpha_sweep, cmd_evaluate, cmd_prepare, cmd_sweep, cmd_train, derived_seeds, parse_override, read_summary,
    resolve_dataset, summarize_dir, CellStatus, ExperimentConfig, FINAL_CHECKPOINT, OUTPUT_ROOT_ENV, SUMMARY_FILE,
    THRESHOLD_CHECKPOINT, TRACE_FILE,
};
use fairgda::dataset::{augment, read_cache, split};
use fairgda::metrics::MetricReport;
use fairgda::models::{classify_soft, read_checkpoint};
use fairgda::optim::read_trace;
use fairgda::Error;

fn config(root: &Path, extra: &[&str]) -> ExperimentConfig {
    let mut pairs = vec![
        format!("output=\"{}\"", root.display()),
        "data.base_samples=1500".into(),
        "data.correlations=[0.5]".into(),
        "model.mu=5e-6".into(),
        "model.ridge=1e-3".into(),
        "optim.eta_adversary=1.0".into(),
        "optim.eta_classifier=1.0".into(),
        "optim.iterations=20".into(),
    ];
    pairs.extend(extra.iter().map(|s| s.to_string()));
    let o: Vec<_> = pairs.iter().map(|p| parse_override(p).unwrap()).collect();
    ExperimentConfig::load(None, &o).unwrap()
}

#[test]
fn prepare_full_correlation_copies_sensitive_attribute() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["data.correlations=[1.0]"]);
    let out = cmd_prepare(&c).unwrap();
    let d = read_cache(&out[0].path).unwrap();
    assert_eq!(d.labels(), d.sensitive());
    assert_eq!(out[0].correlation, Some(1.0));
}

#[test]
fn prepare_hits_targets_and_reports_unreachable_ones() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["data.correlations=[0.3, 0.01, 0.5, 0.8]"]);
    let out = cmd_prepare(&c).unwrap();
    assert_eq!(out.len(), 4);
    assert!(out[1].error.is_some() && !out[1].path.exists());
    for p in [&out[0], &out[2], &out[3]] {
        let measured = read_cache(&p.path).unwrap().label_correlation().unwrap();
        assert!((measured - p.target).abs() <= 0.02, "{p:?}");
        assert_eq!(p.correlation, Some(measured));
    }
    let manifest = std::fs::read_to_string(c.cache_dir().join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 5);
    assert!(manifest.lines().nth(2).unwrap().contains("exceeds"));

    let empty = config(dir.path(), &["data.correlations=[]"]);
    assert!(matches!(cmd_prepare(&empty), Err(Error::Config(_))));
}

#[test]
fn single_iteration_run_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["optim.algorithms=[\"ngd_modified\"]", "optim.iterations=1"]);
    let r = cmd_train(&c).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(read_trace(c.experiment_dir().join(TRACE_FILE)).unwrap().len(), 1);
}

#[test]
fn repeated_runs_write_identical_traces() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for alg in ["normal_gda", "ngd_modified", "agd_modified"] {
        let set = format!("optim.algorithms=[\"{alg}\"]");
        let ca = config(a.path(), &[&set, "data.augmentation=\"noise\""]);
        let cb = config(b.path(), &[&set, "data.augmentation=\"noise\""]);
        cmd_train(&ca).unwrap();
        cmd_train(&cb).unwrap();
        for f in [TRACE_FILE, FINAL_CHECKPOINT, "metrics.json"] {
            let x = std::fs::read(ca.experiment_dir().join(f)).unwrap();
            let y = std::fs::read(cb.experiment_dir().join(f)).unwrap();
            assert_eq!(x, y, "{alg} {f}");
        }
    }
}

#[test]
fn threshold_checkpoint_meets_tau_on_train_split() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["optim.algorithms=[\"agd_modified\"]", "optim.threshold=0.8", "optim.iterations=60"]);
    let r = cmd_train(&c).unwrap();
    assert!(!r.below_threshold);
    let ckpt = read_checkpoint(c.experiment_dir().join(THRESHOLD_CHECKPOINT)).unwrap();
    let data = resolve_dataset(&c, Some(0.5)).unwrap();
    let (split_seed, train_noise, _) = derived_seeds(c.seeds[0]);
    let train = augment(&split(&data, 0.3, split_seed).unwrap().0, ckpt.augmentation, train_noise);
    let report = MetricReport::compute(&classify_soft(&ckpt.params.w, &train).unwrap(), train.base()).unwrap();
    assert!(report.statistical_rate >= 0.8, "{report:?}");
    let trace = read_trace(c.experiment_dir().join(TRACE_FILE)).unwrap();
    let rec = &trace[r.selected_iteration.unwrap() - 1];
    assert_eq!(rec.fairness, Some(report.statistical_rate));
}

#[test]
fn single_cell_sweep_matches_train() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["optim.algorithms=[\"ngd_modified\"]", "name=\"one\"", "optim.threshold=0.7"]);
    let trained = cmd_train(&config(dir.path(), &["optim.algorithms=[\"ngd_modified\"]", "optim.threshold=0.7"])).unwrap();
    let rows = cmd_sweep(&c).unwrap();
    assert_eq!(rows.len(), 1);
    let test = trained.reported_test().unwrap();
    assert_eq!(rows[0].test_accuracy.mean, Some(test.accuracy));
    assert_eq!(rows[0].test_fairness.mean, trained.test_fairness());
    assert_eq!(rows[0].noise_weight_ratio.mean, trained.noise_weight_ratio);
    assert_eq!(rows[0].iterations_to_threshold, trained.iterations_to_threshold.map(|t| t as f64));
    let cell_trace = c.experiment_dir().join("cells/corr-0.5/ngd_modified/seed-0").join(TRACE_FILE);
    let train_trace = config(dir.path(), &[]).experiment_dir().join(TRACE_FILE);
    assert_eq!(std::fs::read(cell_trace).unwrap(), std::fs::read(train_trace).unwrap());
}

#[test]
fn sweep_summary_is_recomputable_from_cells() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        dir.path(),
        &[
            "data.correlations=[0.3, 0.7]",
            "optim.algorithms=[\"normal_gda\", \"ngd_modified\"]",
            "seeds=[0, 1]",
            "optim.threshold=0.8",
            "data.augmentation=\"noise\"",
        ],
    );
    let rows = cmd_sweep(&c).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.runs == 2 && r.failures == 0));
    let path = c.experiment_dir().join(SUMMARY_FILE);
    assert_eq!(read_summary(&path).unwrap(), rows);
    assert_eq!(summarize_dir(c.experiment_dir().join("cells")).unwrap(), rows);
}

#[test]
fn failing_cells_become_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["optim.algorithms=[\"normal_gda\", \"ngd_modified\"]", "optim.eta_classifier=1e13"]);
    let rows = cmd_sweep(&c).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.status(), "error");
        assert!(r.error.as_deref().unwrap().contains("diverged"));
        assert_eq!(r.test_accuracy.mean, None);
    }
    let cell = fairgda::cli::read_cell(c.experiment_dir().join("cells/corr-0.5/normal_gda/seed-0/metrics.json")).unwrap();
    assert_eq!(cell.status, CellStatus::Diverged);
    assert!(c.experiment_dir().join("cells/corr-0.5/normal_gda/seed-0").join(TRACE_FILE).exists());
}

#[test]
fn alpha_sweep_has_one_row_per_power() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["optim.algorithms=[\"ngd_modified\"]", "data.correlations=[0.21]"]);
    let rows = cmd_alpha_sweep(&c).unwrap();
    assert_eq!(rows.len(), 10);
    let powers: Vec<f64> = rows.iter().map(|r| r.alpha_power).collect();
    assert_eq!(powers, (1..=10).map(|k| k as f64 / 10.0).collect::<Vec<_>>());
    assert_eq!(rows[9].status(), "ok");
}

#[test]
fn evaluate_reproduces_recorded_test_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), &["data.augmentation=\"noise\""]);
    let r = cmd_train(&c).unwrap();
    let report = cmd_evaluate(&c, &c.experiment_dir().join(FINAL_CHECKPOINT), None).unwrap();
    assert_eq!(Some(&report), r.test_final.as_ref());
}

fn binary(root: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fairgda"))
        .args(args)
        .env(OUTPUT_ROOT_ENV, root)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn binary_exit_codes_and_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let common = ["--set", "data.base_samples=600", "--set", "optim.iterations=5"];
    fn with<'a>(common: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
        [common, extra].concat()
    }
    let with = |extra: &[&'static str]| with(&common, extra);

    let (code, _) = binary(root, &with(&["train", "--correlation", "0.5"]));
    assert_eq!(code, 0);
    assert!(root.join("experiment").join(TRACE_FILE).exists());
    assert!(root.join("data/corr-0.5.csv").exists());

    let ckpt = root.join("experiment").join(FINAL_CHECKPOINT);
    let cache = root.join("data/corr-0.5.csv");
    let mut args = common.to_vec();
    args.extend(["evaluate", "--checkpoint", ckpt.to_str().unwrap(), "--data", cache.to_str().unwrap()]);
    let (code, stdout) = binary(root, &args);
    assert_eq!(code, 0);
    let report: MetricReport = serde_json::from_str(&stdout).unwrap();
    assert!((0.0..=1.0).contains(&report.accuracy));

    assert_eq!(binary(root, &with(&["train", "--iterations", "0"])).0, 2);
    assert_eq!(binary(root, &with(&["train", "--bogus"])).0, 2);
    assert_eq!(binary(root, &with(&["--set", "data.base=\"missing.csv\"", "train"])).0, 3);
    assert_eq!(binary(root, &with(&["prepare", "--correlations", "0.01"])).0, 3);
    let (code, _) = binary(root, &with(&["--set", "optim.eta_classifier=1e14", "--name", "div", "train", "--algorithm", "normal_gda"]));
    assert_eq!(code, 4);
    assert!(root.join("div").join(TRACE_FILE).exists());

    let other = tempfile::tempdir().unwrap();
    let flag = other.path().to_str().unwrap();
    let mut args = common.to_vec();
    args.extend(["--output", flag, "--name", "x", "train"]);
    assert_eq!(binary(root, &args).0, 0);
    assert!(other.path().join("x").join(TRACE_FILE).exists());
    assert!(!root.join("x").exists());
}

#[test]
fn shipped_config_loads() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/correlation_sweep.toml");
    let cfg = ExperimentConfig::load(Some(&path), &[]).unwrap();
    assert_eq!(cfg.algorithms().unwrap().len(), 3);
    assert_eq!(cfg.data.correlations, vec![0.3, 0.5, 0.7, 0.9]);
    assert_eq!(cfg.alpha_sweep.powers.len(), 10);
}
