//! Every scenario's JSON report validates against the published schema and
//! round-trips through serde.

use rankdiff::verification::{run_scenario, ExperimentReport, ScenarioOptions};

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/report.schema.json"
    ))
    .expect("schema file");
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("valid schema")
}

#[test]
fn scenario_reports_match_schema() {
    let validator = schema();
    let opts = ScenarioOptions {
        seed: 3,
        replicates: Some(40),
    };
    // the heaviest scenarios keep their fixed sizes; reduced counts suffice for layout
    for name in [
        "stationary-exactness",
        "ordered-exponentials",
        "trichotomy-pd",
        "trichotomy-eta0",
        "rate-critical",
        "lemma9",
        "counterexample-1",
        "counterexample-2",
    ] {
        let report = run_scenario(name, &opts).unwrap();
        let json = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(&value)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        let back: ExperimentReport = serde_json::from_value(value).unwrap();
        assert_eq!(
            (back.scenario.as_str(), back.seed, back.classification),
            (name, 3, report.classification)
        );
        let names = |r: &ExperimentReport| {
            r.verdicts
                .iter()
                .map(|v| (v.name.clone(), v.passed))
                .collect::<Vec<_>>()
        };
        assert_eq!(names(&back), names(&report));
    }
}

#[test]
fn schema_rejects_foreign_layout() {
    let validator = schema();
    let bad = serde_json::json!({
        "schema_version": 2,
        "scenario": "x",
        "seed": 1,
        "replicates": 1,
        "statistics": [],
        "verdicts": [],
    });
    assert!(!validator.is_valid(&bad));
}
