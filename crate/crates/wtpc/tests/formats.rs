use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use wtpc::artifacts::{
    read_json, write_json, ArmaArtifact, DynamicArtifact, EnhancedArtifact, ModelArtifact, TruthArtifact,
};
use wtpc::io::{format_timestamp, parse_timestamp, read_records, Required, Schema};
use wtpc::report::emit_report;
use wtpc::AppError;
use wtpc_core::evaluation::HorizonReport;
use wtpc_core::scada::OperationalState;

const HEADER: &str = "timestamp,wind,angle,temperature,power,state\n";

fn records_from(text: &str) -> Result<Vec<wtpc_core::scada::ScadaRecord>, AppError> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scada.csv");
    fs::write(&path, text).unwrap();
    read_records(&path, &Schema::default(), b',', Required::Full)
}

#[test]
fn example_rows_parse() {
    let records = records_from(&format!(
        "{HEADER}2013-06-01T00:00,5.3,2.1,14.0,312.4,NORMAL\n2013-06-01T00:10,5.1,,13.9,,STOPPED\n"
    ))
    .unwrap();
    assert_eq!(records.len(), 2);
    let r = &records[0];
    assert_eq!(r.wind, Some(5.3));
    assert_eq!(r.angle, Some(2.1));
    assert_eq!(r.temperature, Some(14.0));
    assert_eq!(r.power, Some(312.4));
    assert_eq!(r.state, Some(OperationalState::Normal));
    assert_eq!(records[1].timestamp - r.timestamp, 10);
    assert_eq!(records[1].angle, None);
    assert_eq!(records[1].power, None);
    assert_eq!(records[1].state, Some(OperationalState::Stopped));
}

#[test]
fn timestamps_accept_iso_and_integer_minutes() {
    let t = parse_timestamp("2013-06-01T00:10").unwrap();
    assert_eq!(parse_timestamp("2013-06-01T00:10:00Z"), Some(t));
    assert_eq!(parse_timestamp("2013-06-01 00:10"), Some(t));
    assert_eq!(parse_timestamp(&t.to_string()), Some(t));
    assert_eq!(format_timestamp(t), "2013-06-01T00:10");
    assert_eq!(parse_timestamp("June 1st"), None);
}

#[test]
fn duplicate_timestamps_are_rejected() {
    let err = records_from(&format!(
        "{HEADER}2013-06-01T00:00,5.3,2.1,14.0,312.4,NORMAL\n2013-06-01T00:00,5.4,2.1,14.0,318.0,NORMAL\n"
    ))
    .unwrap_err();
    assert!(matches!(err, AppError::DuplicateTimestamps(ref t) if t == &["2013-06-01T00:00".to_string()]));
    assert_eq!(err.exit_code(), 5);
}

#[test]
fn unparseable_timestamp_is_a_data_error() {
    let err = records_from(&format!("{HEADER}yesterday,5.3,2.1,14.0,312.4,NORMAL\n")).unwrap_err();
    assert_eq!(err.kind(), "data");
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(path: &Path) -> T {
    let value: T = read_json(path).unwrap();
    let copy = path.with_extension("copy.json");
    write_json(&copy, &value).unwrap();
    assert_eq!(fs::read(path).unwrap(), fs::read(&copy).unwrap(), "{} does not round-trip", path.display());
    let again: T = read_json(&copy).unwrap();
    assert_eq!(again, value);
    value
}

#[test]
fn artifacts_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n).display().to_string();
    let run = |args: &[&str]| wtpc::cli::run(std::iter::once("wtpc").chain(args.iter().copied())).unwrap();
    run(&["simulate", "--seed", "5", "--n", "6000", "--out", &d("sim")]);
    run(&["clean", "--data", &d("sim/training.csv"), "--out", &d("clean")]);
    run(&["fit", "--class", "spline", "--order", "12", "--data", &d("clean/clean.csv"), "--out", &d("fit")]);
    run(&["enhance", "--model", &d("fit/model.json"), "--data", &d("clean/clean.csv"), "--out", &d("enh")]);
    run(&["residuals", "--enhanced", &d("enh/enhanced.json"), "--data", &d("clean/clean.csv"), "--out", &d("res")]);
    run(&[
        "arma", "--enhanced", &d("enh/enhanced.json"), "--profile", &d("res/profile.json"), "--q1", "2", "--q2", "1",
        "--data", &d("clean/clean.csv"), "--out", &d("arma"),
    ]);

    let root = dir.path();
    let model: ModelArtifact = round_trip(&root.join("fit/model.json"));
    let rebuilt = model.to_model(Path::new("model.json")).unwrap();
    assert_eq!(ModelArtifact::from(&rebuilt), model);

    let enhanced: EnhancedArtifact = round_trip(&root.join("enh/enhanced.json"));
    enhanced.to_model(Path::new("enhanced.json")).unwrap();

    let dynamic: DynamicArtifact = round_trip(&root.join("arma/dynamic_2_1.json"));
    let rebuilt = dynamic.to_model(Path::new("dynamic.json")).unwrap();
    assert_eq!(DynamicArtifact::new(&rebuilt, dynamic.enhanced.clone()), dynamic);
    assert_eq!(ArmaArtifact::from(&rebuilt.arma), dynamic.arma);

    let truth: TruthArtifact = round_trip(&root.join("sim/truth.json"));
    let rebuilt = wtpc_core::synthetic::GroundTruth::from(&truth);
    assert_eq!(TruthArtifact::from(&rebuilt), truth);
}

#[test]
fn report_without_dynamic_models_has_the_base_columns() {
    let dir = tempfile::tempdir().unwrap();
    let report = HorizonReport {
        horizons: vec![10.0, 60.0],
        static_mse: vec![900.0, 900.0],
        enhanced_mse: vec![800.0, 800.0],
        dynamic: vec![],
        coverage: None,
    };
    emit_report(&report, 10.0, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("horizons.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "horizon,steps,static,enhanced");
    assert_eq!(lines[1], "10,1,900,800");
    assert_eq!(lines[2], "60,6,900,800");
    assert!(!dir.path().join("coverage.csv").exists());
}
