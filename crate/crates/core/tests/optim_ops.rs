//! Design-loop behavior: termination, trust-region containment,
//! multi-start selection and determinism.

mod common;

use common::{two_line_micro, uniform_design};
use tcmum::model::{check_design_feasibility, classify_legs};
use tcmum::optim::{first_order_step, multi_start, optimize, random_start, OptimizerParams};

#[test]
fn zero_steps_return_the_anchor() {
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let anchor = uniform_design(&scenario, 1.0, 20.0, 0.8);
    let params = OptimizerParams {
        rho_rail: 0.0,
        rho_bus: 0.0,
        eta: 0.0,
        sigma: 0.0,
        ..scenario.algorithm.clone()
    };
    let (next, _) = first_order_step(&scenario, &leg_index, &anchor, &params).unwrap();
    assert_eq!(next, anchor);
}

#[test]
fn budget_binding_anchor_cannot_overspend() {
    let mut scenario = two_line_micro();
    scenario.budgets.bus_total = 3.0; // exactly one departure per interval
    let leg_index = classify_legs(&scenario).unwrap();
    let anchor = uniform_design_with_rail(&scenario, 1.0, 20.0, 1.0);
    let (next, _) = first_order_step(&scenario, &leg_index, &anchor, &scenario.algorithm).unwrap();
    let bus = scenario.line_index("bus").unwrap();
    let spent: f64 = (0..scenario.intervals()).map(|t| next.x.get(t, bus)).sum();
    assert!(spent <= 3.0 + 1e-9);
    assert!(check_design_feasibility(&scenario, &next)
        .unwrap()
        .is_empty());
}

fn uniform_design_with_rail(
    scenario: &tcmum::Scenario,
    bus: f64,
    n: f64,
    lambda: f64,
) -> tcmum::model::DesignPoint {
    let mut d = uniform_design(scenario, bus, n, lambda);
    let rail = scenario.line_index("rail").unwrap();
    for t in 0..scenario.intervals() {
        d.x.set(t, rail, 1.0);
    }
    d
}

#[test]
fn improving_direction_moves_to_the_trust_boundary() {
    // One commute, one rail route, binding capacity: with the choice
    // fixed at the single alternative, admitting more boardings is the
    // only design signal, so the step lands on the +rho face everywhere.
    let scenario = common::from_json(serde_json::json!({
        "grid": {"t_start": "06:00", "t_end": "06:15", "T": 3, "delta_t": 5.0},
        "lines": [
            {"id": "rail", "kind": "rail", "stops": ["A", "B"],
             "segment_times": [8.0], "capacity": 4.0}
        ],
        "stations": [],
        "commutes": [
            {"id": "c", "kind": "downtown", "demand": [10.0, 10.0, 10.0]}
        ],
        "routes": [
            {"id": "c-rail", "commute": "c", "mode_class": "P", "walk_min": 0.0,
             "legs": [{"mode": "transit", "line": "rail", "board_stop": "A",
                       "alight_stop": "B", "travel_min": 0.0}]}
        ],
        "budgets": {"B_bus": 0.0, "B_rail": 30.0, "lb_rail": 0.5, "ub_rail": 2.5,
                    "ub_bus": 1.0, "N_bar": 0.0},
        "fares": {"transit_flat": 2.5, "transfer_discount": 0.0, "f_base": 1.87,
                  "f_book": 1.85, "f_min": 4.98, "pi_d": 0.85, "pi_t": 0.30,
                  "lambda_min": 0.1, "lambda_max": 1.0},
        "choice": {"kind": "mnl", "beta_time_transit": 21.1, "beta_time_amod": 16.3,
                   "beta_money": 1.0, "walk_speed": 3.0, "amod_speed": 20.0},
        "algorithm": {"rho_rail": 0.1, "rho_bus": 1.0, "eta": 10.0, "sigma": 0.1,
                      "epsilon": 0.1, "kappa": 15, "starts": 1, "seed": 2}
    }));
    let leg_index = classify_legs(&scenario).unwrap();
    let anchor = uniform_design(&scenario, 1.0, 0.0, 1.0);
    let (next, _) = first_order_step(&scenario, &leg_index, &anchor, &scenario.algorithm).unwrap();
    for t in 0..scenario.intervals() {
        assert!(
            (next.x.get(t, 0) - 1.1).abs() < 1e-7,
            "t {t}: rail moved to {}",
            next.x.get(t, 0)
        );
    }

    // Corner oracle: the linearized objective anchored at the same point
    // is strictly better with the rates pinned at the upper corner.
    let lin = tcmum::choice::linearize_theta(&scenario, &anchor).unwrap();
    let corner_objective = |rate: f64| {
        let it = tcmum::lp::build_iteration_lp(&scenario, &leg_index, &lin, &scenario.algorithm);
        let mut lp = it.lp.clone();
        for t in 0..scenario.intervals() {
            lp.fix_var(it.x_ids[t][0], rate);
        }
        tcmum::lp::solve_lp(&lp).unwrap().objective
    };
    assert!(corner_objective(1.1) < corner_objective(0.9));
}

#[test]
fn infinite_epsilon_stops_after_one_iteration() {
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let start = uniform_design_with_rail(&scenario, 1.0, 20.0, 1.0);
    let params = OptimizerParams {
        epsilon: f64::INFINITY,
        ..scenario.algorithm.clone()
    };
    let trajectory = optimize(&scenario, &leg_index, start, 0, &params);
    assert!(trajectory.converged);
    assert_eq!(trajectory.iterations_used(), 1);
}

#[test]
fn stationary_start_converges_within_two_iterations() {
    // Zero steps make every anchor a fixed point; the second iteration
    // confirms the unchanged objective.
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let start = uniform_design_with_rail(&scenario, 1.0, 20.0, 1.0);
    let params = OptimizerParams {
        rho_rail: 0.0,
        rho_bus: 0.0,
        eta: 0.0,
        sigma: 0.0,
        ..scenario.algorithm.clone()
    };
    let trajectory = optimize(&scenario, &leg_index, start, 0, &params);
    assert!(trajectory.converged, "{:?}", trajectory.failure);
    assert!(trajectory.iterations_used() <= 2);
}

#[test]
fn iterates_stay_feasible_and_inside_the_trust_region() {
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let start = random_start(&scenario, 5, 0);
    let trajectory = optimize(&scenario, &leg_index, start.clone(), 0, &scenario.algorithm);
    assert!(trajectory.failure.is_none(), "{:?}", trajectory.failure);
    let mut prev = start;
    for record in &trajectory.iterations {
        let violations = check_design_feasibility(&scenario, &record.design).unwrap();
        assert!(violations.is_empty(), "{violations:?}");
        let (dx, dn, dl) = record.design.box_distance(&prev);
        assert!(dx <= scenario.algorithm.rho_bus.max(scenario.algorithm.rho_rail) + 1e-9);
        assert!(dn <= scenario.algorithm.eta + 1e-9);
        assert!(dl <= scenario.algorithm.sigma + 1e-9);
        prev = record.design.clone();
    }
}

#[test]
fn converged_point_passes_the_halved_step_certificate() {
    // Narrow rail band so the continuous variables pin within the
    // iteration budget.
    let mut scenario = two_line_micro();
    scenario.budgets.rail_lb = 0.9;
    scenario.budgets.rail_ub = 1.3;
    let leg_index = classify_legs(&scenario).unwrap();
    let start = random_start(&scenario, 5, 1);
    let trajectory = optimize(&scenario, &leg_index, start, 0, &scenario.algorithm);
    assert!(trajectory.converged, "failure: {:?}", trajectory.failure);
    let last = trajectory.iterations.last().unwrap();
    let halved = OptimizerParams {
        rho_rail: scenario.algorithm.rho_rail / 2.0,
        rho_bus: (scenario.algorithm.rho_bus / 2.0).floor(),
        eta: scenario.algorithm.eta / 2.0,
        sigma: scenario.algorithm.sigma / 2.0,
        ..scenario.algorithm.clone()
    };
    let (_, q_halved) = first_order_step(&scenario, &leg_index, &last.design, &halved).unwrap();
    assert!(
        q_halved >= last.q_approx - scenario.algorithm.epsilon,
        "halved step improved by more than epsilon: {} -> {}",
        last.q_approx,
        q_halved
    );
}

#[test]
fn single_start_multi_start_equals_optimize() {
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let params = OptimizerParams {
        starts: 1,
        ..scenario.algorithm.clone()
    };
    let outcome = multi_start(&scenario, &params).unwrap();
    let start = random_start(&scenario, params.seed, 0);
    let trajectory = optimize(&scenario, &leg_index, start, 0, &params);
    assert_eq!(
        outcome.best_objective,
        trajectory.final_true_objective().unwrap()
    );
    assert_eq!(outcome.best, *trajectory.final_design().unwrap());
}

#[test]
fn same_seed_gives_bitwise_identical_results() {
    let scenario = two_line_micro();
    let params = OptimizerParams {
        starts: 3,
        ..scenario.algorithm.clone()
    };
    let a = multi_start(&scenario, &params).unwrap();
    let b = multi_start(&scenario, &params).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.best_objective.to_bits(), b.best_objective.to_bits());
    assert_eq!(a.best_start, b.best_start);
}

#[test]
fn best_of_selection_is_the_minimum_over_starts() {
    let scenario = two_line_micro();
    let leg_index = classify_legs(&scenario).unwrap();
    let params = OptimizerParams {
        starts: 4,
        ..scenario.algorithm.clone()
    };
    let outcome = multi_start(&scenario, &params).unwrap();
    let single_bests: Vec<f64> = (0..4)
        .filter_map(|k| {
            let start = random_start(&scenario, params.seed, k);
            optimize(&scenario, &leg_index, start, k as usize, &params).final_true_objective()
        })
        .collect();
    let min_single = single_bests.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(outcome.best_objective <= min_single + 1e-12);
}
