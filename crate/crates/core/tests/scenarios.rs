mod common;

use common::{brute_force_ttc, first_order_reference, min_clearance};
use ttc_core::scenarios::{builtin, ground_truth, run_series, ScenarioError};
use ttc_core::{first_order_ttc, second_order_ttc, SearchConfig};

fn cfg20() -> SearchConfig {
    SearchConfig::default().with_horizon(20.0)
}

#[test]
fn initial_predictions() {
    let cfg = SearchConfig::default();
    let s1 = builtin(1).unwrap();
    assert_eq!(first_order_ttc(&s1.state_i, &s1.state_j, 5.0).time(), Some(8.0));
    assert!(!second_order_ttc(&s1.state_i, &s1.state_j, &cfg).unwrap().outcome.is_collision());

    let s2 = builtin(2).unwrap();
    let t2 = second_order_ttc(&s2.state_i, &s2.state_j, &cfg).unwrap().outcome.time().unwrap();
    assert!((t2 - 8.15).abs() <= 0.05, "{t2}");
    assert!(!first_order_ttc(&s2.state_i, &s2.state_j, 5.0).is_collision());

    let s3 = builtin(3).unwrap();
    let t1 = first_order_ttc(&s3.state_i, &s3.state_j, 5.0).time().unwrap();
    assert!((t1 - 6.46).abs() <= 0.05, "{t1}");
    assert!(!second_order_ttc(&s3.state_i, &s3.state_j, &cfg).unwrap().outcome.is_collision());
    assert!(min_clearance(&s3.state_i, &s3.state_j, &cfg, 1e-3) > 0.0);

    let s4 = builtin(4).unwrap();
    let t4 = second_order_ttc(&s4.state_i, &s4.state_j, &cfg).unwrap().outcome.time().unwrap();
    assert!((t4 - 5.88).abs() <= 0.05, "{t4}");
    assert!(!first_order_ttc(&s4.state_i, &s4.state_j, 5.0).is_collision());
}

/// The brute-force reference agrees with the search on every built-in start.
#[test]
fn builtins_match_reference() {
    let cfg = SearchConfig::default();
    for id in 1..=5 {
        let sc = builtin(id).unwrap();
        let star = second_order_ttc(&sc.state_i, &sc.state_j, &cfg).unwrap().outcome.time();
        let reference = brute_force_ttc(&sc.state_i, &sc.state_j, &cfg, 1e-3);
        match (star, reference) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6, "scenario {id}: {a} vs {b}"),
            (None, None) => {}
            other => panic!("scenario {id}: {other:?}"),
        }
    }
}

#[test]
fn unknown_id() {
    assert!(matches!(builtin(0), Err(ScenarioError::UnknownScenario(0))));
    assert!(builtin(0).unwrap_err().to_string().contains("unknown scenario 0"));
}

#[test]
fn series_shape() {
    let series = run_series(&builtin(2).unwrap(), &SearchConfig::default()).unwrap();
    assert_eq!(series.len(), 101);
    assert!(series.rows.windows(2).all(|w| w[1].t > w[0].t));
    assert_eq!(series.rows[0].t, 0.0);
    assert!((series.rows[100].t - 10.0).abs() < 1e-12);
}

#[test]
fn turning_apart_has_no_second_order_contact() {
    let series = run_series(&builtin(1).unwrap(), &SearchConfig::default()).unwrap();
    assert!(series.rows.iter().all(|r| !r.ttc2.is_collision()));
    // the straight-line view sees a contact at the start and counts it down
    let early: Vec<f64> = series.rows.iter().take(40).map(|r| r.ttc1.time().unwrap()).collect();
    assert!(early.windows(2).all(|w| w[1] < w[0]), "{early:?}");
}

/// Until contact the second-order series counts down one step per step,
/// while the straight-line view misses the turn at the start.
#[test]
fn turning_into_the_path_counts_down() {
    for id in [2, 4] {
        let series = run_series(&builtin(id).unwrap(), &SearchConfig::default()).unwrap();
        let t0 = series.rows[0].ttc2.time().unwrap();
        assert!(!series.rows[0].ttc1.is_collision());
        for row in series.rows.iter().filter(|r| r.t < t0) {
            let t = row.ttc2.time().unwrap();
            assert!((t - (t0 - row.t)).abs() <= 2e-9 + 1e-6, "scenario {id} at {}: {t}", row.t);
        }
    }
}

#[test]
fn scenario_four_start() {
    let series = run_series(&builtin(4).unwrap(), &SearchConfig::default()).unwrap();
    let t = series.rows[0].ttc2.time().unwrap();
    assert!((t - 5.88).abs() <= 0.05);
}

/// Every first-order entry matches the closed form on the ground-truth
/// state.
#[test]
fn first_order_entries_match_closed_form() {
    let cfg = SearchConfig::default();
    for id in 1..=5 {
        let sc = builtin(id).unwrap();
        let series = run_series(&sc, &cfg).unwrap();
        for (row, (_, si, sj)) in series.rows.iter().zip(ground_truth(&sc, &cfg)) {
            let want = first_order_reference(&si, &sj, cfg.phi);
            match (row.ttc1.time(), want) {
                (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-9, "scenario {id} at {}: {a} vs {b}", row.t),
                (None, None) => {}
                other => panic!("scenario {id} at {}: {other:?}", row.t),
            }
        }
    }
}

#[test]
fn series_with_short_horizon() {
    let mut sc = builtin(4).unwrap();
    sc.prediction_horizon = 3.0;
    let series = run_series(&sc, &SearchConfig::default()).unwrap();
    // contact is 5.88 s out at the start: beyond a 3 s look-ahead
    assert!(!series.rows[0].ttc2.is_collision());
    assert!(series.rows.iter().any(|r| r.ttc2.is_collision()));
}

#[test]
fn csv_is_stable() {
    let series = run_series(&builtin(2).unwrap(), &cfg20()).unwrap();
    let text = series.to_csv_string();
    assert_eq!(text, series.to_csv_string());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,ttc1,ttc2"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.00000000");
    assert_eq!(first[1], "inf");
    assert!(first[2].starts_with("8.15"), "{}", first[2]);
}

/// Single precision reproduces the scenario-four contact.
#[test]
fn single_precision_scenario_four() {
    let s = builtin(4).unwrap();
    let cast = |v: &ttc_core::VehicleState| ttc_core::f32::VehicleState {
        p: v.p.cast(),
        v: v.v.cast(),
        a: v.a.cast(),
        t0: v.t0 as f32,
    };
    let cfg = ttc_core::f32::SearchConfig::default();
    let t = second_order_ttc(&cast(&s.state_i), &cast(&s.state_j), &cfg).unwrap().outcome.time().unwrap();
    assert!((t - 5.883).abs() <= 0.01, "{t}");
    assert!(!first_order_ttc(&cast(&s.state_i), &cast(&s.state_j), 5.0f32).is_collision());
}
