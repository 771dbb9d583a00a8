use std::f64::consts::FRAC_PI_2;

use serde_json::Value;
use wlw_core::classifier::{classify_surface, ClassificationReport};
use wlw_core::{InitialConditions, Params};

fn validator() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/classification_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

const CASES: [(f64, f64, f64, f64); 14] = [
    (-2.0, 1.0, 0.5, FRAC_PI_2),
    (-2.0, 1.0, 2.0, FRAC_PI_2),
    (-2.0, 1.0, 3.0, FRAC_PI_2),
    (-2.0, 1.0, 4.0, FRAC_PI_2),
    (3.0, 1.0, 1.0, 3.0 * FRAC_PI_2),
    (3.0, 1.0, 3.0, 3.0 * FRAC_PI_2),
    (3.0, 1.0, 4.0, 3.0 * FRAC_PI_2),
    (3.0, 1.0, 1.0, 0.0),
    (3.0, 1.0, 3.0, 0.0),
    (3.0, 1.0, 6.0, 0.0),
    (-1.0, 0.0, 1.0, FRAC_PI_2),
    (-2.0, 0.0, 1.0, FRAC_PI_2),
    (1.0, 0.0, 1.0, 0.0),
    (-2.0, -1.0, 4.0, FRAC_PI_2),
];

#[test]
fn example_reports_validate() {
    let v = validator();
    for (a, b, x0, th) in CASES {
        let r = classify_surface(&Params::new(a, b).unwrap(), &InitialConditions::new(x0, th).unwrap()).unwrap();
        let doc = serde_json::to_value(&r).unwrap();
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "({a}, {b}, {x0}, {th}): {errors:?}\n{doc:#}");
        let back: ClassificationReport = serde_json::from_value(doc).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn malformed_reports_are_rejected() {
    let v = validator();
    let r = classify_surface(&Params::new(-2.0, 1.0).unwrap(), &InitialConditions::new(4.0, FRAC_PI_2).unwrap()).unwrap();
    let good = serde_json::to_value(&r).unwrap();
    let mut bad = good.clone();
    bad["class"] = "Torus".into();
    assert!(!v.is_valid(&bad));
    let mut bad = good.clone();
    bad.as_object_mut().unwrap().remove("z_shift");
    assert!(!v.is_valid(&bad));
    let mut bad = good;
    bad["pole_z"] = serde_json::json!([1.0]);
    assert!(!v.is_valid(&bad));
}
