use durrmeyer_core::moments::errata::{run_errata, ErrataConfig};
use durrmeyer_core::{
    apply_grid, bound_check, convergence_study, registry, uniform_grid, BoundVerdict, Error,
    MomentTable, OperatorKind, OperatorSpec, SequencePair, Theorem,
};

#[test]
fn grid_evaluation_is_deterministic() {
    let f = registry::get("runge").unwrap();
    let grid = uniform_grid(500);
    for spec in [
        OperatorSpec::m2(40).unwrap(),
        OperatorSpec::bezier(30, SequencePair::parse("1/2", "0").unwrap(), 2.5).unwrap(),
    ] {
        let a = apply_grid(&spec, &f, &grid, None).unwrap();
        let b = apply_grid(&spec, &f, &grid, None).unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn reports_serialize() {
    let spec = OperatorSpec::m1(16, SequencePair::classical()).unwrap();
    let f = registry::get("sin_pi").unwrap();
    let conv = convergence_study(&spec, &f, &[16, 32, 64], 200, None).unwrap();
    let json = serde_json::to_string(&conv).unwrap();
    assert!(json.contains("\"operator\":\"m1\""));
    let back: durrmeyer_core::ConvergenceReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, conv);

    let bound = bound_check(Theorem::M1Local, &spec, &f, 200, None).unwrap();
    assert_eq!(bound.verdict, BoundVerdict::Pass);
    assert!(serde_json::to_string(&bound)
        .unwrap()
        .contains("\"m1_local\""));
}

#[test]
fn errata_json_lists_both_verdicts() {
    let config = ErrataConfig {
        m2_n: 3..=6,
        m1_n: 3..=6,
        recurrence_n: vec![5],
        product_n: vec![10],
        ..ErrataConfig::default()
    };
    let ledger = run_errata(&config).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&ledger.to_json()).unwrap();
    let entries = parsed.as_array().unwrap();
    let verdict_of = |name: &str| {
        entries
            .iter()
            .filter(|e| e["identity_name"] == name)
            .map(|e| e["verdict"].as_str().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert!(verdict_of("M1-first-moment-as-printed")
        .iter()
        .all(|v| v == "refuted"));
    assert!(verdict_of("M1-first-moment-corrected")
        .iter()
        .all(|v| v == "confirmed"));
    assert!(!verdict_of("M2-e2").is_empty());
}

#[test]
fn moment_table_rows_are_exact_strings() {
    let table = MomentTable::build(&OperatorSpec::m2(10).unwrap(), 2).unwrap();
    let rows = table.rows();
    assert_eq!(rows[2].1, vec!["-1/52", "0/1", "1/1"]);
}

#[test]
fn configuration_errors() {
    assert!(matches!(
        "m9".parse::<OperatorKind>(),
        Err(Error::Domain(_))
    ));
    assert!(OperatorSpec::m2(2).is_err());
    assert!(SequencePair::parse("1", "1").is_err());
    assert!(registry::lookup("nope").is_err());
}
