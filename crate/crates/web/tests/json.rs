use hyperkube_web::{experiment_json, route_json, spanning_tree_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn route_matches_worked_example() {
    let v = parse(route_json("Bologna, Temperature", 4, "0000").unwrap());
    assert_eq!(v["responsible"], "0010");
    assert_eq!(v["path"], serde_json::json!(["0000", "0010"]));
    assert_eq!(v["hops"], 1);
    let positions: Vec<u64> = v["keywords"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k["position"].as_u64().unwrap())
        .collect();
    assert_eq!(positions, [1, 1]);
}

#[test]
fn route_hops_equal_hamming() {
    let v = parse(route_json("Bologna,San Donato,Celsius", 13, "1111111111111").unwrap());
    let target = u32::from_str_radix(v["responsible"].as_str().unwrap(), 2).unwrap();
    assert_eq!(v["hops"].as_u64().unwrap(), u64::from((target ^ 0x1fff).count_ones()));
}

#[test]
fn route_rejects_bad_input() {
    assert!(route_json("", 4, "0000").is_err());
    assert!(route_json("a", 4, "000").is_err());
    assert!(route_json("a", 0, "0").is_err());
    assert!(route_json("a", 4, "00x0").is_err());
}

#[test]
fn tree_spans_sub_hypercube() {
    let v = parse(spanning_tree_json("0101").unwrap());
    let order: Vec<&str> = v["order"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n.as_str().unwrap())
        .collect();
    assert_eq!(order, ["0101", "0111", "1101", "1111"]);
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
    assert_eq!(v["free_positions"], serde_json::json!([1, 3]));
}

#[test]
fn experiment_cell_summary() {
    let v = parse(experiment_json(6, 200, "superset", 5, 42).unwrap());
    assert_eq!(v["repetitions"].as_array().unwrap().len(), 5);
    let (mean, routing, traversal) = (
        v["mean"].as_f64().unwrap(),
        v["routing"].as_f64().unwrap(),
        v["traversal"].as_f64().unwrap(),
    );
    assert!((mean - routing - traversal).abs() < 1e-9);
    assert!(v["ci_low"].as_f64().unwrap() <= mean);
    assert_eq!(
        experiment_json(6, 200, "superset", 5, 42).unwrap(),
        experiment_json(6, 200, "superset", 5, 42).unwrap()
    );
}

#[test]
fn experiment_rejects_bad_input() {
    assert!(experiment_json(6, 200, "fuzzy", 5, 1).is_err());
    assert!(experiment_json(20, 200, "pin", 5, 1).is_err());
    assert!(experiment_json(6, 200, "pin", 1, 1).is_err());
}
