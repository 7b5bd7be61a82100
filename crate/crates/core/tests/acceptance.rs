//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured figures (run with `-- --nocapture` to see them).
//!
//! The expensive multi-start run on the shipped desk scenario is shared
//! by the convergence, oracle-gap and feasibility-invariance criteria.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{micro_family_instance, scenario_dir, snap_design, two_line_micro, uniform_design};
use tcmum::choice::{
    choice_gradient, choice_probs_mnl, evaluate_choices, ChoiceKind, ChoiceModelSpec, DesignVar,
};
use tcmum::eval::{enumerate_boarding_oracle, evaluate_design, grid_oracle};
use tcmum::io::load_scenario;
use tcmum::lp::{build_inner_lp, solve_lp};
use tcmum::model::{check_design_feasibility, classify_legs, DesignPoint, StationRegion};
use tcmum::optim::{multi_start, MultiStartResult};
use tcmum::sweep::{equivalent_fleet, FleetRule};
use tcmum::{Mat, Scenario};

fn desk() -> &'static Scenario {
    static DESK: OnceLock<Scenario> = OnceLock::new();
    DESK.get_or_init(|| load_scenario(scenario_dir().join("desk.scn")).expect("desk loads"))
}

fn desk_outcome() -> &'static (MultiStartResult, f64) {
    static OUTCOME: OnceLock<(MultiStartResult, f64)> = OnceLock::new();
    OUTCOME.get_or_init(|| {
        let scenario = desk();
        let started = Instant::now();
        let outcome = multi_start(scenario, &scenario.algorithm).expect("multi-start succeeds");
        (outcome, started.elapsed().as_secs_f64())
    })
}

/// A strictly interior random design: every rate and allocation is
/// bounded away from zero so central differences stay inside the
/// availability region.
fn random_interior_design(scenario: &Scenario, seed: u64) -> DesignPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = scenario.intervals();
    let budgets = &scenario.budgets;
    let mut x = Mat::zeros(t, scenario.lines.len());
    for (l, line) in scenario.lines.iter().enumerate() {
        for ti in 0..t {
            let v = match line.kind {
                tcmum::LineKind::Rail => rng.gen_range(budgets.rail_lb.max(0.3)..=budgets.rail_ub),
                tcmum::LineKind::Bus => rng.gen_range(0.3..=budgets.bus_ub.max(0.31)),
            };
            x.set(ti, l, v);
        }
    }
    let mut n = Mat::zeros(t, scenario.stations.len());
    let per_station = budgets.max_vehicles / scenario.stations.len().max(1) as f64;
    for s in 0..scenario.stations.len() {
        for ti in 0..t {
            n.set(ti, s, rng.gen_range(0.3 * per_station..=0.9 * per_station));
        }
    }
    DesignPoint {
        x,
        n,
        lambda: rng.gen_range(scenario.fares.lambda_min + 0.05..=scenario.fares.lambda_max - 0.05),
    }
}

#[test]
fn criterion_1_choice_model_suite() {
    let started = Instant::now();
    let micro = two_line_micro();
    let desk = desk();

    let mut checked = 0usize;
    for (scenario, count, seed0) in [(&micro, 500u64, 100u64), (desk, 500, 900)] {
        for k in 0..count {
            let design = random_interior_design(scenario, seed0 + k);
            let field = evaluate_choices(scenario, &design).unwrap();
            for (c, per_route) in field.theta.iter().enumerate() {
                for t in 0..scenario.intervals() {
                    let mut total = 0.0;
                    for per_t in per_route {
                        let p = per_t[t];
                        assert!((0.0..=1.0).contains(&p), "theta out of range: {p}");
                        total += p;
                    }
                    assert!(
                        (total - 1.0).abs() <= 1e-12,
                        "commute {c} t {t}: sum {total}"
                    );
                    checked += 1;
                }
            }
        }
    }

    // Nested logit with all scales equal reproduces MNL.
    let mut nested = micro.clone();
    nested.choice = ChoiceModelSpec {
        kind: ChoiceKind::NestedLogit,
        phi: 1.0,
        phi_p: 1.0,
        phi_a: 1.0,
        phi_pa: 1.0,
    };
    for k in 0..50 {
        let design = random_interior_design(&nested, 4_000 + k);
        let a = evaluate_choices(&micro, &design).unwrap();
        let b = evaluate_choices(&nested, &design).unwrap();
        for (ra, rb) in a.theta.iter().zip(&b.theta) {
            for (ta, tb) in ra.iter().zip(rb) {
                for (pa, pb) in ta.iter().zip(tb) {
                    assert!((pa - pb).abs() <= 1e-9, "nested {pb} vs mnl {pa}");
                }
            }
        }
    }

    // Hand softmax: utilities (0, ln 3) split 1:3.
    let probs = choice_probs_mnl(&[0.0, 3.0_f64.ln()]).unwrap();
    assert!((probs[0] - 0.25).abs() <= 1e-12);
    assert!((probs[1] - 0.75).abs() <= 1e-12);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:.2?}");
    println!(
        "criterion 1 (choice-model suite): PASS — {checked} normalized choice sets, nested=MNL, hand softmax exact, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_gradient_suite() {
    let started = Instant::now();
    let mnl = two_line_micro();
    let mut nested = two_line_micro();
    nested.choice = ChoiceModelSpec {
        kind: ChoiceKind::NestedLogit,
        phi: 0.7,
        phi_p: 1.1,
        phi_a: 0.9,
        phi_pa: 1.4,
    };

    let mut max_rel_err = 0.0_f64;
    let mut max_sum = 0.0_f64;
    let mut design_count = 0;
    for k in 0..100u64 {
        let scenario = if k % 2 == 0 { &mnl } else { &nested };
        let design = random_interior_design(scenario, 10_000 + k);
        design_count += 1;
        for c in 0..scenario.commutes.len() {
            let t = (k as usize) % scenario.intervals();
            let grad = choice_gradient(scenario, &design, c, t).unwrap();
            for (v, &var) in grad.vars.iter().enumerate() {
                let column_sum: f64 = grad.rows.iter().map(|row| row[v]).sum();
                max_sum = max_sum.max(column_sum.abs());
                let fd = central_difference(scenario, &design, c, t, var);
                // Column-scaled relative error: truncation grows with the
                // largest entry of the column.
                let denom = fd.iter().fold(1e-6_f64, |m, g| m.max(g.abs()));
                for (local, row) in grad.rows.iter().enumerate() {
                    max_rel_err = max_rel_err.max((row[v] - fd[local]).abs() / denom);
                }
            }
        }
    }
    assert!(max_rel_err <= 1e-4, "max relative error {max_rel_err:.3e}");
    assert!(max_sum <= 1e-8, "gradient rows sum to {max_sum:.3e}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:.2?}");
    println!(
        "criterion 2 (gradient suite): PASS — {design_count} interior designs, max FD error {max_rel_err:.2e}, max row-sum {max_sum:.2e}, {elapsed:.2?}"
    );
}

fn central_difference(
    scenario: &Scenario,
    design: &DesignPoint,
    commute: usize,
    t: usize,
    var: DesignVar,
) -> Vec<f64> {
    let value = match var {
        DesignVar::X { line, t } => design.x.get(t, line),
        DesignVar::N { station, t } => design.n.get(t, station),
        DesignVar::Lambda => design.lambda,
    };
    let h = 1e-5 * value.abs().max(1e-2);
    let eval = |sign: f64| -> Vec<f64> {
        let mut d = design.clone();
        match var {
            DesignVar::X { line, t } => d.x.set(t, line, value + sign * h),
            DesignVar::N { station, t } => d.n.set(t, station, value + sign * h),
            DesignVar::Lambda => d.lambda = value + sign * h,
        }
        let field = evaluate_choices(scenario, &d).unwrap();
        field.theta[commute].iter().map(|r| r[t]).collect()
    };
    let plus = eval(1.0);
    let minus = eval(-1.0);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect()
}

#[test]
fn criterion_3_lp_exactness() {
    let started = Instant::now();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 20 {
        assert!(seed < 200, "not enough tractable micro instances");
        let (scenario, design) = micro_family_instance(seed);
        seed += 1;
        let leg_index = classify_legs(&scenario).unwrap();
        let theta = common::unit_choice_field(&scenario);
        let oracle = match enumerate_boarding_oracle(&scenario, &leg_index, &design, &theta) {
            Ok(v) => v,
            Err(tcmum::Error::SearchSpaceTooLarge { .. }) => continue,
            Err(e) => panic!("oracle failed: {e}"),
        };
        let inner = build_inner_lp(&scenario, &leg_index, &theta, &design, false);
        let solution = solve_lp(&inner.lp).unwrap();
        assert!(solution.is_optimal());
        assert!(
            (solution.objective - oracle).abs() <= 1e-7 * oracle.abs().max(1.0),
            "seed {}: LP {} vs enumeration {}",
            seed - 1,
            solution.objective,
            oracle
        );
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:.2?}");
    println!(
        "criterion 3 (LP exactness): PASS — {checked} integral micro instances match enumeration to 1e-7, {elapsed:.2?}"
    );
}

#[test]
fn criterion_4_fares_to_the_cent() {
    let fares = &desk().fares;
    let eight_forty_two = tcmum::choice::amod_fare(fares, 2.0 * tcmum::units::KM_PER_MILE, 10.0);
    let floor_case = tcmum::choice::amod_fare(fares, 0.5 * tcmum::units::KM_PER_MILE, 2.0);
    assert!((eight_forty_two - 8.42).abs() < 1e-12, "{eight_forty_two}");
    assert!((floor_case - 4.98).abs() < 1e-12, "{floor_case}");
    println!(
        "criterion 4 (fares): PASS — amod_fare(2 mi, 10 min) = {eight_forty_two:.2}, minimum-fare branch = {floor_case:.2}"
    );
}

#[test]
fn criterion_5_availability_ratio() {
    let station = StationRegion::new("S".into(), 90.0, 0.667, None, 20.0);
    let ratio = station.availability_rate(5.0);
    assert!((ratio - 0.424).abs() <= 0.001, "ratio {ratio}");
    println!("criterion 5 (availability ratio): PASS — 5 min / E[T] = {ratio:.4} (0.424 ± 0.001)");
}

#[test]
fn criterion_6_desk_convergence() {
    let (outcome, seconds) = desk_outcome();
    let converged = outcome.trajectories.iter().filter(|t| t.converged).count();
    let within_cap = outcome
        .trajectories
        .iter()
        .filter(|t| t.converged && t.iterations_used() <= 15)
        .count();
    assert!(
        within_cap >= 12,
        "{within_cap} of {} starts converged within 15 iterations",
        outcome.trajectories.len()
    );
    assert!(*seconds < 300.0, "took {seconds:.1} s");
    println!(
        "criterion 6 (optimizer convergence): PASS — {converged}/15 converged ({within_cap} within 15 iterations), best true objective {:.2}, {seconds:.1} s",
        outcome.best_objective
    );
}

#[test]
fn criterion_7_oracle_gap() {
    let started = Instant::now();
    let scenario = desk();
    let (outcome, _) = desk_outcome();
    let leg_index = classify_legs(scenario).unwrap();

    // Design grid: every optimizer iterate snapped onto the step grid.
    let mut grid: Vec<DesignPoint> = Vec::new();
    for trajectory in &outcome.trajectories {
        for record in &trajectory.iterations {
            let snapped = snap_design(scenario, &record.design, 0.1, 1.0, 0.1);
            if !grid.contains(&snapped) {
                grid.push(snapped);
            }
        }
    }
    let result = grid_oracle(scenario, &leg_index, &grid).unwrap();
    let gap = (outcome.best_objective - result.best_objective).abs() / result.best_objective;
    assert!(
        gap <= 0.05,
        "best {} vs grid minimum {} (gap {:.2}%)",
        outcome.best_objective,
        result.best_objective,
        100.0 * gap
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 900.0, "took {elapsed:.2?}");
    println!(
        "criterion 7 (oracle gap): PASS — optimizer best {:.2} within {:.2}% of the {}-point grid minimum {:.2}, {elapsed:.1?}",
        outcome.best_objective,
        100.0 * gap,
        result.grid_size,
        result.best_objective
    );
}

#[test]
fn criterion_8_protocol_reproduction() {
    let scenario = desk();
    let leg_index = classify_legs(scenario).unwrap();
    // Full bus budget, no vehicles: every bus cell on, rail at its upper
    // bound (both exactly affordable in the shipped scenario).
    let mut design = uniform_design(scenario, 1.0, 0.0, 1.0);
    let rail = scenario.line_index("rail").unwrap();
    for t in 0..scenario.intervals() {
        design.x.set(t, rail, scenario.budgets.rail_ub);
    }
    assert!(check_design_feasibility(scenario, &design)
        .unwrap()
        .is_empty());
    let (_, report) = evaluate_design(scenario, &leg_index, &design).unwrap();
    assert_eq!(report.shares.amod_local, 0.0, "local AMoD share");
    assert_eq!(report.shares.amod_rail_dt, 0.0, "downtown AMoD share");

    assert_eq!(equivalent_fleet(0.8, 814.0, 4.0, &FleetRule::Pce), 82.0);
    assert_eq!(equivalent_fleet(0.8, 814.0, 4.0, &FleetRule::Cce), 164.0);
    println!(
        "criterion 8 (protocol reproduction): PASS — zero-fleet AMoD shares 0%/0%, PCE(0.8) = 82, CCE(0.8) = 164"
    );
}

#[test]
fn criterion_9_feasibility_invariance() {
    let scenario = desk();
    let (outcome, _) = desk_outcome();
    let mut iterates = 0;
    for trajectory in &outcome.trajectories {
        for record in &trajectory.iterations {
            let violations = check_design_feasibility(scenario, &record.design).unwrap();
            assert!(
                violations.is_empty(),
                "start {} iterate violates feasibility: {violations:?}",
                trajectory.start_index
            );
            iterates += 1;
        }
    }
    println!(
        "criterion 9 (feasibility invariance): PASS — {iterates} optimizer iterates all inside the feasible sets"
    );
}
