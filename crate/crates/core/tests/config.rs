use std::path::PathBuf;

use dirac_spectra::testbed::NamedBc;
use dirac_spectra::config::{BcConfig, ConfigError, PotentialConfig, RunConfig};
use dirac_spectra::pipeline::{self, PipelineError};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_configs_parse() {
    for name in ["dirichlet_demo.json", "periodic_demo.json", "periodic_random.json", "singular.json"] {
        let cfg = RunConfig::from_path(&shipped(name)).unwrap();
        assert_eq!(cfg.m, 64, "{name}");
    }
}

#[test]
fn defaults_fill_missing_fields() {
    let cfg = RunConfig::from_json(r#"{"bc": {"canonical": {"b": [0,0], "a": [1,0], "d": [1,0], "c": [0,0]}}}"#).unwrap();
    assert_eq!(cfg.m, 64);
    assert_eq!(cfg.contour_nodes, 64);
    assert_eq!(cfg.n_max(), 32);
    assert_eq!(cfg.potential, PotentialConfig::default());
    assert!(cfg.potential.build().unwrap().is_zero());
}

#[test]
fn raw_rows_are_normalized() {
    let cfg = RunConfig::from_path(&shipped("periodic_random.json")).unwrap();
    let bc = cfg.bc.canonical().unwrap();
    assert_eq!(bc, NamedBc::Periodic.canonical());
    assert!(matches!(cfg.bc, BcConfig::Raw(_)));
}

#[test]
fn malformed_json_reports_position() {
    let err = RunConfig::from_json("{\n  \"M\": 64,\n  \"bc\" }").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
}

#[test]
fn invalid_values_are_config_errors() {
    let bc = r#""bc": {"canonical": {"b": [0,0], "a": [1,0], "d": [1,0], "c": [0,0]}}"#;
    for extra in [
        r#""M": 7"#,
        r#""M": 2048"#,
        r#""threshold": 1.5"#,
        r#""contourNodes": 5"#,
        r#""nMax": 40"#,
        r#""potential": {"P": {"fourier": {"3": [1, 0]}}}"#,
        r#""potential": {"P": {"fourier": {"two": [1, 0]}}}"#,
        r#""pointwise": {"points": [4.0]}"#,
        r#""unknownField": 1"#,
    ] {
        let text = format!("{{{bc}, {extra}}}");
        let res = RunConfig::from_json(&text).and_then(|c| c.potential.build().map(|_| c));
        let err = res.map(|_| ()).unwrap_err();
        assert_eq!(PipelineError::from(err).exit_code(), 1, "{extra}");
    }
}

#[test]
fn singular_conditions_map_to_exit_code_two() {
    let cfg = RunConfig::from_path(&shipped("singular.json")).unwrap();
    let err = pipeline::classify(&cfg, None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unlocalizable_problem_maps_to_exit_code_three() {
    let text = r#"{"bc": {"canonical": {"b": [3,0], "a": [1,0], "d": [1,0], "c": [1,0]}},
                   "potential": {"P": {"fourier": {"2": [0.2, 0]}}, "Q": {"fourier": {"2": [0.2, 0]}}}}"#;
    let cfg = RunConfig::from_json(text).unwrap();
    let dir = tempdir();
    let err = pipeline::spectrum(cfg, &dir).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}

#[test]
fn truncation_override_clamps_table_range() {
    let cfg = RunConfig::from_json(r#"{"bc": {"canonical": {"b": [0,0], "a": [1,0], "d": [1,0], "c": [0,0]}}, "nMax": 30}"#).unwrap();
    let cfg = cfg.with_truncation(32).unwrap();
    assert_eq!(cfg.n_max(), 16);
    assert!(cfg.with_truncation(33).is_err());
}

#[test]
fn round_trip_through_json() {
    let cfg = RunConfig::from_path(&shipped("dirichlet_demo.json")).unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-config-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
