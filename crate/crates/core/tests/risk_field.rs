mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskhud_core::obstacle_course;
use riskhud_core::risk::{risk_at, risk_from_distance, risk_profile, RiskError};
use riskhud_core::scenario::{ObstacleSpec, ScenarioSpec, Side};

#[test]
fn risk_matches_brute_force_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let spec = common::random_scenario(&mut rng);
        let x = rng.random_range(0.0..spec.road_length);
        let half = spec.road_width() / 2.0;
        let y = rng.random_range(-half..half);
        let r = risk_at(&spec, x, y).unwrap();
        let (l, rr) = common::scan_risk(&spec, x, y);
        worst = worst.max((r.r_left - l).abs()).max((r.r_right - rr).abs());
    }
    assert!(worst < 1e-3, "max abs error {worst}");
}

#[test]
fn scan_oracle_agrees_on_obstacle_course() {
    let spec = obstacle_course();
    for &(x, y) in &[
        (0.0, -1.8),
        (395.0, -1.0),
        (430.0, 0.0),
        (1230.0, 1.0),
        (2040.0, -0.5),
        (3045.0, -1.0),
    ] {
        let r = risk_at(&spec, x, y).unwrap();
        let (l, rr) = common::scan_risk(&spec, x, y);
        assert!(
            (r.r_left - l).abs() < 1e-3 && (r.r_right - rr).abs() < 1e-3,
            "at ({x}, {y})"
        );
    }
}

#[test]
fn mirrored_scenario_swaps_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let spec = common::random_scenario(&mut rng);
        let mirror = spec.mirrored();
        let x = rng.random_range(0.0..spec.road_length);
        let y = rng.random_range(-3.0..3.0);
        let a = risk_at(&spec, x, y).unwrap();
        let b = risk_at(&mirror, x, -y).unwrap();
        assert!((a.r_left - b.r_right).abs() < 1e-12);
        assert!((a.r_right - b.r_left).abs() < 1e-12);
    }
}

#[test]
fn risk_law_exact_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let p: f64 = rng.random_range(0.01..5.0);
        let d = rng.random_range(-2.0 * p..3.0 * p);
        let expect = (1.0 - d / p).clamp(0.0, 1.0);
        assert!((risk_from_distance(d, p).unwrap() - expect).abs() < 1e-12);
    }
}

#[test]
fn boundary_anchors() {
    for &p in &[0.1, 1.0, 1.5, 7.3] {
        assert_eq!(risk_from_distance(p, p).unwrap(), 0.0);
        assert_eq!(risk_from_distance(0.0, p).unwrap(), 1.0);
        assert_eq!(risk_from_distance(-0.3, p).unwrap(), 1.0);
        assert_eq!(risk_from_distance(2.0 * p, p).unwrap(), 0.0);
    }
    assert!(matches!(
        risk_from_distance(0.5, 0.0),
        Err(RiskError::NonPositivePadding(_))
    ));
    assert!(matches!(
        risk_from_distance(0.5, -1.0),
        Err(RiskError::NonPositivePadding(_))
    ));
}

#[test]
fn worked_example_caution_and_critical() {
    // right obstacle intruding 2.4 m on a 7.2 m road: critical at y = -1.2
    let spec = ScenarioSpec {
        obstacles: vec![ObstacleSpec {
            x_start: 100.0,
            x_end: 160.0,
            side: Side::Right,
            intrusion: 2.4,
        }],
        ..ScenarioSpec::straight(1000.0)
    };
    let r = risk_at(&spec, 130.0, -0.45).unwrap();
    assert!((r.r_right - 0.5).abs() < 1e-12);
    assert_eq!(r.r_left, 0.0);
    assert_eq!(risk_at(&spec, 130.0, -1.25).unwrap().r_right, 1.0);
    assert_eq!(risk_at(&spec, 130.0, 0.3).unwrap().r_right, 0.0);
}

#[test]
fn profile_stations_cover_the_window() {
    let spec = obstacle_course();
    let p = risk_profile(&spec, 380.0, -1.8, 50.0, 16).unwrap();
    assert_eq!(p.stations.len(), 16);
    assert_eq!(p.stations[0].x, 380.0);
    assert_eq!(p.stations[15].x, 430.0);
    assert!(p.stations.windows(2).all(|w| w[1].x > w[0].x));
    // truncated at the road end
    let p = risk_profile(&spec, 3990.0, 0.0, 50.0, 8).unwrap();
    assert_eq!(p.stations.last().unwrap().x, 4000.0);
    assert!(matches!(
        risk_profile(&spec, 4000.0, 0.0, 50.0, 8),
        Err(RiskError::NoRoadAhead(_))
    ));
    assert!(matches!(
        risk_profile(&spec, 10.0, 0.0, 50.0, 1),
        Err(RiskError::TooFewStations(1))
    ));
    assert!(risk_profile(&spec, 4001.0, 0.0, 50.0, 8).is_err());
}

proptest! {
    #[test]
    fn risk_is_in_unit_interval(x in 0.0..4000.0f64, y in -6.0..6.0f64) {
        let r = risk_at(&obstacle_course(), x, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.r_left));
        prop_assert!((0.0..=1.0).contains(&r.r_right));
        prop_assert_eq!(r.r_left == 1.0, r.d_left <= 0.0);
        prop_assert_eq!(r.r_right == 0.0, r.d_right >= 1.5);
    }

    #[test]
    fn risk_lipschitz_in_y(x in 0.0..4000.0f64, y in -4.0..4.0f64, dy in -0.5..0.5f64) {
        let spec = obstacle_course();
        let a = risk_at(&spec, x, y).unwrap();
        let b = risk_at(&spec, x, y + dy).unwrap();
        let bound = dy.abs() / spec.caution_padding + 1e-12;
        prop_assert!((a.r_left - b.r_left).abs() <= bound);
        prop_assert!((a.r_right - b.r_right).abs() <= bound);
    }
}
