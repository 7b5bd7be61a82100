//! Shared fixtures: hand-built micro scenarios and generators for the
//! integral micro family used to certify the LP solver.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tcmum::io::scenario_from_raw;
use tcmum::model::DesignPoint;
use tcmum::{Mat, Scenario};

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn from_json(value: serde_json::Value) -> Scenario {
    let raw = serde_json::from_value(value).expect("fixture parses");
    scenario_from_raw(raw).expect("fixture is well-formed")
}

fn baseline_fares() -> serde_json::Value {
    json!({
        "transit_flat": 2.5, "transfer_discount": 0.0,
        "f_base": 1.87, "f_book": 1.85, "f_min": 4.98,
        "pi_d": 0.85, "pi_t": 0.30,
        "lambda_min": 0.1, "lambda_max": 1.0
    })
}

fn mnl_choice() -> serde_json::Value {
    json!({
        "kind": "mnl",
        "beta_time_transit": 21.1, "beta_time_amod": 16.3, "beta_money": 1.0,
        "walk_speed": 3.0, "amod_speed": 20.0
    })
}

fn baseline_algorithm(starts: usize, seed: u64) -> serde_json::Value {
    json!({
        "rho_rail": 0.1, "rho_bus": 1.0, "eta": 10.0, "sigma": 0.1,
        "epsilon": 0.1, "kappa": 15, "starts": starts, "seed": seed
    })
}

/// A consistent two-line micro scenario covering every leg-set family:
/// a 3-stop bus line (through-occupancy), a 2-stop rail line, a station
/// region, a local commute with bus and direct-AMoD routes, and a
/// downtown commute with rail, bus+rail and AMoD+rail routes.
pub fn two_line_micro() -> Scenario {
    from_json(two_line_micro_json())
}

pub fn two_line_micro_json() -> serde_json::Value {
    json!({
        "grid": {"t_start": "06:00", "t_end": "06:15", "T": 3, "delta_t": 5.0},
        "lines": [
            {"id": "bus", "kind": "bus", "stops": ["A", "B", "C"],
             "segment_times": [4.0, 4.0], "capacity": 20.0},
            {"id": "rail", "kind": "rail", "stops": ["C", "D"],
             "segment_times": [10.0], "capacity": 640.0}
        ],
        "stations": [
            {"station_id": "S", "area": 90.0, "shape_coeff": 0.667, "coord": [5.0, 5.0]}
        ],
        "commutes": [
            {"id": "loc", "kind": "local", "demand": [4.0, 6.0, 2.0],
             "origin": [4.5, 4.5], "dest": [5.5, 5.5]},
            {"id": "dt", "kind": "downtown", "demand": [8.0, 10.0, 6.0],
             "origin": [4.3, 4.6], "dest": [12.0, 12.0]}
        ],
        "routes": [
            {"id": "loc-bus", "commute": "loc", "mode_class": "P", "walk_min": 6.0,
             "legs": [{"mode": "transit", "line": "bus", "board_stop": "A", "alight_stop": "C"}]},
            {"id": "loc-amod", "commute": "loc", "mode_class": "A", "walk_min": 0.0,
             "legs": [{"mode": "amod", "station": "S", "distance_km": 2.0}]},
            {"id": "dt-rail", "commute": "dt", "mode_class": "P", "walk_min": 10.0,
             "legs": [{"mode": "transit", "line": "rail", "board_stop": "C", "alight_stop": "D"}]},
            {"id": "dt-busrail", "commute": "dt", "mode_class": "P", "walk_min": 5.0,
             "legs": [{"mode": "transit", "line": "bus", "board_stop": "A", "alight_stop": "C"},
                      {"mode": "transit", "line": "rail", "board_stop": "C", "alight_stop": "D"}]},
            {"id": "dt-amodrail", "commute": "dt", "mode_class": "PA", "walk_min": 1.0,
             "legs": [{"mode": "amod", "station": "S", "distance_km": 1.6},
                      {"mode": "transit", "line": "rail", "board_stop": "C", "alight_stop": "D"}]}
        ],
        "budgets": {"B_bus": 6.0, "B_rail": 7.5, "lb_rail": 0.5, "ub_rail": 2.5,
                    "ub_bus": 1.0, "N_bar": 40.0},
        "fares": baseline_fares(),
        "choice": mnl_choice(),
        "algorithm": baseline_algorithm(4, 11)
    })
}

/// The smallest structural instance: one 2-stop bus line, one commute,
/// one single-leg route.
pub fn single_bus_micro(t_count: usize, demand: Vec<f64>) -> Scenario {
    from_json(json!({
        "grid": {"t_start": "06:00",
                 "t_end": format!("{:02}:{:02}", 6 + (t_count * 5) / 60, (t_count * 5) % 60),
                 "T": t_count, "delta_t": 5.0},
        "lines": [
            {"id": "bus", "kind": "bus", "stops": ["A", "B"],
             "segment_times": [4.0], "capacity": 2.0}
        ],
        "stations": [],
        "commutes": [
            {"id": "c", "kind": "local", "demand": demand}
        ],
        "routes": [
            {"id": "c-bus", "commute": "c", "mode_class": "P", "walk_min": 3.0,
             "legs": [{"mode": "transit", "line": "bus", "board_stop": "A", "alight_stop": "B"}]}
        ],
        "budgets": {"B_bus": t_count as f64, "B_rail": 0.0, "lb_rail": 0.0,
                    "ub_rail": 0.0, "ub_bus": 2.0, "N_bar": 0.0},
        "fares": baseline_fares(),
        "choice": mnl_choice(),
        "algorithm": baseline_algorithm(1, 3)
    }))
}

/// A design with every rate set uniformly.
pub fn uniform_design(scenario: &Scenario, x: f64, n: f64, lambda: f64) -> DesignPoint {
    DesignPoint {
        x: Mat::filled(scenario.intervals(), scenario.lines.len(), x),
        n: Mat::filled(scenario.intervals(), scenario.stations.len(), n),
        lambda,
    }
}

/// Random transit-only instance from the integral micro family: up to 3
/// lines, up to 4 intervals, up to 5 single-route commutes, integral
/// demand, small integral capacities and rates. The single-route choice
/// set keeps every inflow integral so the LP relaxation is exact.
pub fn micro_family_instance(seed: u64) -> (Scenario, DesignPoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_count = rng.gen_range(2..=4usize);
    let n_lines = rng.gen_range(1..=3usize);
    let n_commutes = rng.gen_range(1..=5usize);

    // Lines chain through shared transfer stops: line l runs
    // x{l} -> (m{l}) -> x{l+1}, so a two-leg route transfers at x{l+1}.
    let mut lines = Vec::new();
    let mut stop_names: Vec<Vec<String>> = Vec::new();
    for l in 0..n_lines {
        let mut stops = vec![format!("x{l}")];
        if rng.gen_bool(0.5) {
            stops.push(format!("m{l}"));
        }
        stops.push(format!("x{}", l + 1));
        lines.push(json!({
            "id": format!("line{l}"),
            "kind": "bus",
            "stops": stops,
            "segment_times": vec![4.0; stops.len() - 1],
            "capacity": rng.gen_range(1..=3) as f64,
        }));
        stop_names.push(stops);
    }

    let mut commutes = Vec::new();
    let mut routes = Vec::new();
    for c in 0..n_commutes {
        let demand: Vec<f64> = (0..t_count).map(|_| rng.gen_range(0..=3) as f64).collect();
        commutes.push(json!({
            "id": format!("c{c}"), "kind": "local", "demand": demand
        }));
        let two_legs = n_lines > 1 && rng.gen_bool(0.4);
        let mut legs = Vec::new();
        if two_legs {
            let l = rng.gen_range(0..n_lines - 1);
            let board = rng.gen_range(0..stop_names[l].len() - 1);
            legs.push(json!({
                "mode": "transit",
                "line": format!("line{l}"),
                "board_stop": stop_names[l][board],
                "alight_stop": stop_names[l].last().unwrap(),
                "travel_min": if rng.gen_bool(0.5) { 0.0 } else { 5.0 },
            }));
            let next = l + 1;
            let alight = rng.gen_range(1..stop_names[next].len());
            legs.push(json!({
                "mode": "transit",
                "line": format!("line{next}"),
                "board_stop": stop_names[next][0],
                "alight_stop": stop_names[next][alight],
                "travel_min": if rng.gen_bool(0.5) { 0.0 } else { 5.0 },
            }));
        } else {
            let l = rng.gen_range(0..n_lines);
            let board = rng.gen_range(0..stop_names[l].len() - 1);
            let alight = rng.gen_range(board + 1..stop_names[l].len());
            legs.push(json!({
                "mode": "transit",
                "line": format!("line{l}"),
                "board_stop": stop_names[l][board],
                "alight_stop": stop_names[l][alight],
                "travel_min": if rng.gen_bool(0.5) { 0.0 } else { 5.0 },
            }));
        }
        routes.push(json!({
            "id": format!("c{c}-r"), "commute": format!("c{c}"), "mode_class": "P",
            "walk_min": rng.gen_range(0..=8) as f64,
            "legs": legs
        }));
    }

    let scenario = from_json(json!({
        "grid": {"t_start": "06:00",
                 "t_end": format!("{:02}:{:02}", 6, t_count * 5),
                 "T": t_count, "delta_t": 5.0},
        "lines": lines,
        "stations": [],
        "commutes": commutes,
        "routes": routes,
        "budgets": {"B_bus": (3 * t_count * n_lines) as f64, "B_rail": 0.0,
                    "lb_rail": 0.0, "ub_rail": 0.0, "ub_bus": 3.0, "N_bar": 0.0},
        "fares": baseline_fares(),
        "choice": mnl_choice(),
        "algorithm": baseline_algorithm(1, seed)
    }));

    // Integral departure rates, sometimes zero.
    let mut x = Mat::zeros(t_count, scenario.lines.len());
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    for t in 0..t_count {
        for l in 0..scenario.lines.len() {
            x.set(t, l, rng2.gen_range(0..=2) as f64);
        }
    }
    let design = DesignPoint {
        x,
        n: Mat::zeros(t_count, 0),
        lambda: 1.0,
    };
    (scenario, design)
}

/// Fixed choice probabilities for single-route instances: every commute
/// sends all demand to its only route, regardless of service levels.
pub fn unit_choice_field(scenario: &Scenario) -> tcmum::choice::ChoiceField {
    let t_count = scenario.intervals();
    let theta = scenario
        .routes_of
        .iter()
        .map(|routes| {
            assert_eq!(routes.len(), 1, "unit field needs single-route commutes");
            vec![vec![1.0; t_count]]
        })
        .collect();
    let utility = scenario
        .routes_of
        .iter()
        .map(|_| vec![vec![0.0; t_count]])
        .collect();
    tcmum::choice::ChoiceField { theta, utility }
}

/// Snaps a design onto a coarse grid while preserving feasibility: rates
/// and allocations floor to the grid (then clamp into the rail band) and
/// the discount rounds within its bounds.
pub fn snap_design(
    scenario: &Scenario,
    design: &DesignPoint,
    rail_step: f64,
    n_step: f64,
    lambda_step: f64,
) -> DesignPoint {
    let mut snapped = design.clone();
    for t in 0..scenario.intervals() {
        for (l, line) in scenario.lines.iter().enumerate() {
            let v = design.x.get(t, l);
            let grid = match line.kind {
                tcmum::LineKind::Rail => (v / rail_step).floor() * rail_step,
                tcmum::LineKind::Bus => v.round(),
            };
            let clamped = match line.kind {
                tcmum::LineKind::Rail => {
                    grid.clamp(scenario.budgets.rail_lb, scenario.budgets.rail_ub)
                }
                tcmum::LineKind::Bus => grid.clamp(0.0, scenario.budgets.bus_ub),
            };
            snapped.x.set(t, l, clamped);
        }
        for s in 0..scenario.stations.len() {
            let v = design.n.get(t, s);
            snapped.n.set(t, s, (v / n_step).floor() * n_step);
        }
    }
    snapped.lambda = ((design.lambda / lambda_step).round() * lambda_step)
        .clamp(scenario.fares.lambda_min, scenario.fares.lambda_max);
    snapped
}
