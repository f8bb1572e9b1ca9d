mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riskhud_core::scenario::{parse_scenario, ScenarioError, ScenarioSpec};

proptest! {
    #[test]
    fn corridor_is_lipschitz(seed in any::<u64>(), x in 0.0..999.0f64, dx in 0.0..1.0f64) {
        let spec = common::random_scenario(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = spec.corridor_at(x).unwrap();
        let b = spec.corridor_at(x + dx).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= spec.boundary_slope() * dx + 1e-12);
    }

    #[test]
    fn caution_is_padding_inside_critical(seed in any::<u64>(), x in 0.0..1000.0f64) {
        let spec = common::random_scenario(&mut ChaCha8Rng::seed_from_u64(seed));
        let c = spec.corridor_at(x).unwrap();
        prop_assert_eq!(c.left_caution, c.left_critical - spec.caution_padding);
        prop_assert_eq!(c.right_caution, c.right_critical + spec.caution_padding);
        let half = spec.road_width() / 2.0;
        prop_assert!(c.left_critical <= half && c.right_critical >= -half);
    }

    #[test]
    fn empty_road_is_constant(len in 1.0..10_000.0f64, t in 0.0..1.0f64) {
        let spec = ScenarioSpec::straight(len);
        let c = spec.corridor_at(len * t).unwrap();
        prop_assert_eq!(c.left_critical, 3.6);
        prop_assert_eq!(c.right_critical, -3.6);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let spec = common::random_scenario(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(parse_scenario(&text).unwrap(), spec);
    }
}

#[test]
fn parse_errors_are_structured() {
    match parse_scenario("{\"road_length\": 100, \"lanes\": 2}") {
        Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
    match parse_scenario("{\n\"road_length\": 100,\n\"obstacles\": [{\"x_start\": 50, \"x_end\": 40, \"side\": \"left\", \"intrusion\": 1}]}") {
        Err(ScenarioError::Invalid { field, .. }) => assert_eq!(field, "obstacles[0].x_start"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_scenario("{\"road_length\": -1}"),
        Err(ScenarioError::Invalid { .. })
    ));
    assert!(matches!(parse_scenario("not json"), Err(ScenarioError::Syntax { .. })));
}

#[test]
fn off_road_queries_fail() {
    let spec = ScenarioSpec::straight(100.0);
    assert!(matches!(spec.corridor_at(-0.1), Err(ScenarioError::OutOfRoad { .. })));
    assert!(matches!(spec.corridor_at(100.5), Err(ScenarioError::OutOfRoad { .. })));
    assert!(spec.corridor_at(f64::NAN).is_err());
    assert!(spec.corridor_at(100.0).is_ok());
}
