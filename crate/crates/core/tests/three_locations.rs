//! End-to-end checks on a small hand-built scenario with closed-form answers.

use dronevrp::anneal::SaConfig;
use dronevrp::cost::route_times;
use dronevrp::milp::{build_model, MilpModel};
use dronevrp::oracle::enumerate_optimal;
use dronevrp::{cost, Objective, Scenario, SolutionString};

fn fixture() -> Scenario {
    Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/three_locations.toml")).unwrap()
}

fn plan() -> SolutionString {
    "[0 1 0 2 3 0 0]".parse().unwrap()
}

/// Energy of a route from the fixed point, written out longhand.
fn energy(legs: &[(f64, f64)]) -> f64 {
    let (alpha, beta, xi) = (0.217, 0.185, 650.0);
    let t: f64 = legs.iter().map(|l| l.0).sum();
    let omega: f64 = legs.iter().map(|l| l.0 * l.1).sum();
    (alpha * omega + beta * t) / (1.0 - alpha * t / xi)
}

fn leg(distance: f64) -> f64 {
    60.0 + distance / 6.0
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn route_times_match_hand_computation() {
    let u = route_times(&plan(), &fixture());
    let diag = (240.0f64.powi(2) + 360.0f64.powi(2)).sqrt();
    assert_eq!(u.len(), 2);
    assert!(close(u.pairs[0].delivery, leg(120.0)));
    assert!(close(u.pairs[0].arrival, 2.0 * leg(120.0)));
    assert!(close(u.pairs[1].delivery, leg(180.0) + leg(diag)));
    assert!(close(u.pairs[1].arrival, leg(180.0) + leg(diag) + leg(300.0)));
}

#[test]
fn min_cost_uses_one_drone() {
    let diag = (240.0f64.powi(2) + 360.0f64.powi(2)).sqrt();
    let e1 = energy(&[(leg(120.0), 1.0), (leg(120.0), 0.0)]);
    let e2 = energy(&[(leg(180.0), 2.0), (leg(diag), 1.5), (leg(300.0), 0.0)]);
    let b = cost(&plan(), Objective::MinCost, &fixture());
    assert!(!b.penalized, "{:?}", b.violations);
    assert_eq!(b.drone_count, 1);
    assert!(close(b.energy_cost, 0.1 * (e1 + e2)));
    assert!(close(b.total_cost, 500.0 + 0.1 * (e1 + e2)));
    // Second route departs when the first one lands.
    assert!(close(b.delivery_time, 2.0 * leg(120.0) + leg(180.0) + leg(diag)));
}

#[test]
fn min_time_flies_routes_in_parallel() {
    let diag = (240.0f64.powi(2) + 360.0f64.powi(2)).sqrt();
    let b = cost(&plan(), Objective::MinTime, &fixture());
    assert!(!b.penalized);
    assert_eq!(b.drone_count, 2);
    assert!(close(b.delivery_time, leg(180.0) + leg(diag)));
}

#[test]
fn oracle_beats_the_hand_plan() {
    let scn = fixture();
    for objective in [Objective::MinCost, Objective::MinTime] {
        let best = enumerate_optimal(&scn, objective).unwrap();
        assert!(best.objective <= cost(&plan(), objective, &scn).objective(objective) + 1e-9);
        assert!(!best.breakdown.penalized);
    }
}

#[test]
fn exported_model_matches_golden_file() {
    let model = build_model(&fixture(), Objective::MinCost, None).unwrap();
    let golden = include_str!("data/three_locations.lp");
    assert_eq!(model.to_lp_string(), golden);
    assert_eq!(model.variables().len(), MilpModel::expected_variable_count(3, 0));
    assert_eq!(model.variables().len(), 4 * 9 + 7 * 3 + 2);
}

#[test]
fn annealing_schedule_lengths() {
    let fast = SaConfig { cooling_factor: 0.9, ..SaConfig::default() };
    assert_eq!(fast.phase_count(), 66);
    assert_eq!(SaConfig::default().phase_count(), 688);
}
