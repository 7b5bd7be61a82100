//! The first-order design loop: successive linearization of the choice
//! probabilities, a trust-region LP per iteration, convergence on the
//! change in approximated objective, and multi-start over random feasible
//! designs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::linearize_theta;
use crate::error::{Error, Result};
use crate::eval::evaluate_design;
use crate::lp::solve_iteration_lp;
use crate::mat::Mat;
use crate::model::{check_design_feasibility, classify_legs, DesignPoint, LegIndex, Scenario};

fn default_seed() -> u64 {
    0
}

/// Step sizes, termination and multi-start settings of the design loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerParams {
    /// Trust-region half-width for rail departure rates.
    pub rho_rail: f64,
    /// Trust-region half-width for bus departure rates (integer grid).
    pub rho_bus: f64,
    /// Trust-region half-width for AMoD allocations.
    pub eta: f64,
    /// Trust-region half-width for the discount factor.
    pub sigma: f64,
    /// Termination threshold on successive approximated objectives.
    pub epsilon: f64,
    /// Maximum iterations per start.
    pub kappa: usize,
    /// Number of random starts.
    pub starts: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            rho_rail: 0.1,
            rho_bus: 1.0,
            eta: 10.0,
            sigma: 0.1,
            epsilon: 0.1,
            kappa: 15,
            starts: 15,
            seed: 0,
        }
    }
}

/// One accepted iterate of the design loop.
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub design: DesignPoint,
    /// Optimal objective of the trust-region LP.
    pub q_approx: f64,
    /// True nonlinear-choice objective of the iterate.
    pub q_true: f64,
}

/// The full history of one start: at most `kappa` iterates, a convergence
/// flag, and the failure message when a step could not be taken.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub start_index: usize,
    pub start: DesignPoint,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn iterations_used(&self) -> usize {
        self.iterations.len()
    }

    pub fn final_design(&self) -> Option<&DesignPoint> {
        self.iterations.last().map(|r| &r.design)
    }

    pub fn final_true_objective(&self) -> Option<f64> {
        self.iterations.last().map(|r| r.q_true)
    }
}

/// Solves one trust-region step from a feasible anchor, returning the
/// arg-min design and the approximated objective. The result satisfies
/// every box and budget constraint.
pub fn first_order_step(
    scenario: &Scenario,
    leg_index: &LegIndex,
    anchor: &DesignPoint,
    params: &OptimizerParams,
) -> Result<(DesignPoint, f64)> {
    let violations = check_design_feasibility(scenario, anchor)?;
    if !violations.is_empty() {
        return Err(Error::InfeasibleDesign(violations));
    }
    let lin = linearize_theta(scenario, anchor)?;
    let (design, objective, _flows) = solve_iteration_lp(scenario, leg_index, &lin, params)?;
    let violations = check_design_feasibility(scenario, &design)?;
    if !violations.is_empty() {
        return Err(Error::InfeasibleDesign(violations));
    }
    Ok((design, objective))
}

/// Runs the design loop from one feasible start: iterate trust-region
/// steps until the approximated objective changes by at most `epsilon`
/// or `kappa` iterations elapse. Step failures are recorded on the
/// trajectory rather than propagated, so multi-start can skip bad starts.
pub fn optimize(
    scenario: &Scenario,
    leg_index: &LegIndex,
    start: DesignPoint,
    start_index: usize,
    params: &OptimizerParams,
) -> Trajectory {
    let mut trajectory = Trajectory {
        start_index,
        start: start.clone(),
        iterations: Vec::new(),
        converged: false,
        failure: None,
    };
    let mut anchor = start;
    let mut q_prev = 0.0;
    for i in 1..=params.kappa {
        let step = first_order_step(scenario, leg_index, &anchor, params).and_then(|(d, q)| {
            let (_, report) = evaluate_design(scenario, leg_index, &d)?;
            Ok((d, q, report.objective))
        });
        match step {
            Ok((design, q_approx, q_true)) => {
                trajectory.iterations.push(IterationRecord {
                    design: design.clone(),
                    q_approx,
                    q_true,
                });
                anchor = design;
                if (q_approx - q_prev).abs() <= params.epsilon {
                    trajectory.converged = true;
                    break;
                }
                q_prev = q_approx;
            }
            Err(e) => {
                trajectory.failure = Some(
                    Error::OptimizerStep {
                        iteration: i,
                        source: Box::new(e),
                    }
                    .to_string(),
                );
                break;
            }
        }
    }
    trajectory
}

/// Outcome of a multi-start run: the best design by true evaluated
/// objective and every trajectory.
#[derive(Clone, Debug)]
pub struct MultiStartResult {
    pub best: DesignPoint,
    pub best_objective: f64,
    pub best_start: usize,
    pub trajectories: Vec<Trajectory>,
}

/// Generates `params.starts` random feasible designs, optimizes each in
/// parallel, and keeps the design with the minimum true evaluated
/// objective. Deterministic for a fixed seed.
pub fn multi_start(scenario: &Scenario, params: &OptimizerParams) -> Result<MultiStartResult> {
    let leg_index = classify_legs(scenario)?;
    let starts: Vec<DesignPoint> = (0..params.starts)
        .map(|k| random_start(scenario, params.seed, k as u64))
        .collect();

    let trajectories: Vec<Trajectory> = starts
        .into_par_iter()
        .enumerate()
        .map(|(k, start)| optimize(scenario, &leg_index, start, k, params))
        .collect();

    let mut best: Option<(f64, usize)> = None;
    for trajectory in &trajectories {
        if trajectory.failure.is_some() {
            continue;
        }
        if let Some(q) = trajectory.final_true_objective() {
            if best.is_none_or(|(obj, _)| q < obj) {
                best = Some((q, trajectory.start_index));
            }
        }
    }
    let Some((best_objective, best_start)) = best else {
        let detail = trajectories
            .iter()
            .filter_map(|t| t.failure.as_deref())
            .next()
            .unwrap_or("no start produced an iterate");
        return Err(Error::Lp(format!("every start failed: {detail}")));
    };
    let best_design = trajectories[best_start]
        .final_design()
        .expect("successful trajectory has iterates")
        .clone();
    Ok(MultiStartResult {
        best: best_design,
        best_objective,
        best_start,
        trajectories,
    })
}

/// Samples a random design in the relaxed feasible sets: departure rates
/// uniform per entry then rescaled to meet the budgets (bus rates on the
/// integer grid, switched off at random until affordable), allocations by
/// a symmetric Dirichlet across stations times a uniform total, and a
/// uniform discount factor.
pub fn random_start(scenario: &Scenario, seed: u64, start_index: u64) -> DesignPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ start_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let t_count = scenario.intervals();
    let budgets = &scenario.budgets;
    let mut x = Mat::zeros(t_count, scenario.lines.len());

    // Rail: uniform within bounds, then pulled towards the lower bound
    // when the sampled schedule overruns the budget.
    let rail: Vec<usize> = scenario.rail_lines().collect();
    if !rail.is_empty() {
        let mut cost = 0.0;
        let mut cost_lb = 0.0;
        for &l in &rail {
            let c = scenario.lines[l].cost_per_departure;
            for t in 0..t_count {
                let v = rng.gen_range(budgets.rail_lb..=budgets.rail_ub);
                x.set(t, l, v);
                cost += c * v;
                cost_lb += c * budgets.rail_lb;
            }
        }
        if cost > budgets.rail_total && cost > cost_lb {
            let s = ((budgets.rail_total - cost_lb) / (cost - cost_lb)).clamp(0.0, 1.0);
            for &l in &rail {
                for t in 0..t_count {
                    let v = budgets.rail_lb + s * (x.get(t, l) - budgets.rail_lb);
                    x.set(t, l, v);
                }
            }
        }
    }

    // Bus: uniform integers per entry, then random switch-offs to meet
    // the budget.
    let bus: Vec<usize> = scenario.bus_lines().collect();
    if !bus.is_empty() {
        let top = budgets.bus_ub.floor().max(0.0) as i64;
        let mut on: Vec<(usize, usize)> = Vec::new();
        let mut cost = 0.0;
        for &l in &bus {
            for t in 0..t_count {
                let v = rng.gen_range(0..=top) as f64;
                x.set(t, l, v);
                if v > 0.0 {
                    on.push((t, l));
                    cost += scenario.lines[l].cost_per_departure * v;
                }
            }
        }
        while cost > budgets.bus_total && !on.is_empty() {
            let k = rng.gen_range(0..on.len());
            let (t, l) = on[k];
            let v = x.get(t, l) - 1.0;
            x.set(t, l, v);
            cost -= scenario.lines[l].cost_per_departure;
            if v <= 0.0 {
                on.swap_remove(k);
            }
        }
    }

    // Fleet: per interval, Dirichlet weights across stations times a
    // uniform total.
    let mut n = Mat::zeros(t_count, scenario.stations.len());
    if !scenario.stations.is_empty() {
        for t in 0..t_count {
            let gammas: Vec<f64> = (0..scenario.stations.len())
                .map(|_| -(rng.gen_range(f64::MIN_POSITIVE..1.0_f64).ln()))
                .collect();
            let sum: f64 = gammas.iter().sum();
            let total = rng.gen_range(0.0..=1.0) * budgets.max_vehicles;
            for (s, g) in gammas.iter().enumerate() {
                n.set(t, s, total * g / sum);
            }
        }
    }

    let lambda = rng.gen_range(scenario.fares.lambda_min..=scenario.fares.lambda_max);
    DesignPoint { x, n, lambda }
}
