mod common;

use common::{random_decay, random_field};
use fourier_core::{DecayOperator, TorusField};

#[test]
fn field_json_round_trip() {
    let u = random_field(2, 2, 4, 5, false);
    let v = TorusField::from_json(&u.to_json()).unwrap();
    assert!(u.sub(&v).l2_norm() <= 1e-15);
}

#[test]
fn field_json_rejects_reality_violation() {
    let j = serde_json::json!({
        "nu": 1, "n_phi": 1, "n_x": 2,
        "entries": [[0, 1, 1.0, 0.5], [0, -1, 1.0, 0.5]],
    });
    // conj pair should be (1, −0.5); loader must refuse
    assert!(TorusField::from_json(&j).is_err());
}

#[test]
fn field_json_rejects_out_of_box() {
    let j = serde_json::json!({
        "nu": 1, "n_phi": 1, "n_x": 2,
        "entries": [[0, 7, 1.0, 0.0]],
    });
    assert!(TorusField::from_json(&j).is_err());
}

#[test]
fn operator_json_round_trip() {
    let js: Vec<i64> = (-3i64..=3).filter(|&j| j != 0).collect();
    let a = random_decay(1, 1, &js, 9);
    let b = DecayOperator::from_json(&a.to_json()).unwrap();
    assert!(a.sub(&b).max_abs() <= 1e-15);
}

#[test]
fn operator_json_rejects_reality_violation() {
    let j = serde_json::json!({
        "nu": 1, "n_phi": 0, "js": [-1, 1],
        "entries": [[0, 1, 1, 0.2, 0.3], [0, -1, -1, 0.2, 0.3]],
    });
    assert!(DecayOperator::from_json(&j).is_err());
}
