use entrobound::bounds::EntropyRoute;
use entrobound::harness::render::{from_json, to_csv, to_json};
use entrobound::harness::{render_report, run_experiment, ExperimentConfig, ReportFormat};
use entrobound::Error;

const CONFIGS: [(&str, &str); 7] = [
    ("ar1-ks", include_str!("../configs/ar1-ks.cfg")),
    ("gaussian-p-sweep", include_str!("../configs/gaussian-p-sweep.cfg")),
    ("laplace-negentropy", include_str!("../configs/laplace-negentropy.cfg")),
    ("maxent-equality", include_str!("../configs/maxent-equality.cfg")),
    ("recursions", include_str!("../configs/recursions.cfg")),
    ("side-information", include_str!("../configs/side-information.cfg")),
    ("soundness-sweep", include_str!("../configs/soundness-sweep.cfg")),
];

fn config(name: &str) -> ExperimentConfig {
    let text = CONFIGS.iter().find(|(n, _)| *n == name).unwrap().1;
    ExperimentConfig::from_toml_str(text).unwrap()
}

#[test]
fn bundled_configs_run_without_violations() {
    for (name, text) in CONFIGS {
        let cfg = ExperimentConfig::from_toml_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = run_experiment(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!report.rows.is_empty(), "{name}");
        assert_eq!(report.violations, 0, "{name}");
        for row in &report.rows {
            assert!(row.report.bound_value.is_finite() && row.report.bound_value > 0.0, "{name}");
            assert!(row.standard_error.is_finite(), "{name}: {}", row.scenario);
        }
    }
}

#[test]
fn ar1_fitted_predictor_reaches_unit_bound() {
    let report = run_experiment(&config("ar1-ks")).unwrap();
    let fitted = report.rows_for("levinson-order1").next().unwrap();
    let spectral = report.rows_for("levinson-order1-spectral").next().unwrap();
    assert_eq!(fitted.report.entropy_source, EntropyRoute::ClosedForm);
    assert_eq!(spectral.report.entropy_source, EntropyRoute::SzegoSpectral);
    assert!((fitted.report.bound_value - 1.0).abs() < 1e-9);
    assert!((spectral.report.bound_value - 1.0).abs() < 1e-3);
    let rmse = fitted.report.empirical_lp.unwrap();
    assert!((rmse - 1.0).abs() < 0.02, "{rmse}");
    let fitted_coeff = match report.scenarios[0].predictor.as_ref().unwrap() {
        entrobound::PredictorSpec::Linear { coeffs, .. } => coeffs[0],
        other => panic!("{other:?}"),
    };
    assert!((fitted_coeff - 0.9).abs() < 0.01, "{fitted_coeff}");
}

#[test]
fn json_report_is_byte_identical_across_runs() {
    let cfg = config("soundness-sweep");
    let a = to_json(&run_experiment(&cfg).unwrap()).unwrap();
    let b = to_json(&run_experiment(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let cfg = config("maxent-equality");
    let run_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| to_json(&run_experiment(&cfg).unwrap()).unwrap())
    };
    assert_eq!(run_with(1), run_with(3));
}

#[test]
fn seed_changes_results() {
    let mut cfg = config("gaussian-p-sweep");
    let a = run_experiment(&cfg).unwrap();
    cfg.seed += 1;
    let b = run_experiment(&cfg).unwrap();
    assert_ne!(a.rows[0].report.empirical_lp, b.rows[0].report.empirical_lp);
    assert_eq!(a.rows[0].report.bound_value, b.rows[0].report.bound_value);
}

#[test]
fn json_round_trip_reproduces_csv() {
    let report = run_experiment(&config("side-information")).unwrap();
    let back = from_json(&to_json(&report).unwrap()).unwrap();
    assert_eq!(to_csv(&report).unwrap(), to_csv(&back).unwrap());
}

#[test]
fn render_writes_every_format() {
    let report = run_experiment(&config("gaussian-p-sweep")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = render_report(&report, &ReportFormat::ALL, dir.path()).unwrap();
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert!(names.contains(&"report.csv".to_string()));
    assert!(names.contains(&"report.json".to_string()));
    assert!(names.iter().any(|n| n.ends_with(".svg")));
    for f in &files {
        assert!(std::fs::metadata(f).unwrap().len() > 0);
    }
}

#[test]
fn misspelled_key_is_named() {
    let text = config("ar1-ks").to_toml_string().unwrap().replacen("seed", "sede", 1);
    let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
    assert!(matches!(err, Error::Config { .. }), "{err:?}");
    assert!(err.to_string().contains("sede"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn config_round_trips_through_toml() {
    for (name, text) in CONFIGS {
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again, "{name}");
    }
}
