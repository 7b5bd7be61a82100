//! Builders for the inner boarding-flow LP and the per-iteration
//! trust-region LP.
//!
//! Both share one skeleton over the boarding variables `z` per
//! (route, leg, boarding interval):
//!
//! * objective: frozen expected-wait coefficients, walking time on first
//!   legs, and the excess-wait accounting folded to per-variable
//!   coefficients — a boarding at interval `t` leaves its queue (worth
//!   `-(T-t) * delta` passenger-minutes of future waiting) and feeds the
//!   next leg's queue at the travel-time-shifted arrival interval;
//! * constraints: per-stop vehicle capacity, per-station vehicle
//!   availability (with vehicle discounts on shared legs), cumulative
//!   first-leg demand caps, cumulative leg precedence with arrival
//!   shifts, and boarding consistency across the members of each shared
//!   trip.
//!
//! The iteration variant adds the design variables (x, N, lambda) inside
//! a trust-region box intersected with the feasible sets, and replaces
//! the fixed choice probabilities by their first-order expansion, which
//! keeps every row affine.

use std::collections::BTreeMap;

use crate::choice::{ChoiceField, DesignVar, ThetaLinearization};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::{DesignPoint, LegIndex, LegMode, LineKind, Scenario};
use crate::optim::OptimizerParams;

use super::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense};

/// LP variable ids of the boarding variables, `None` where the variable
/// is structurally fixed to zero because the anchor design offers no
/// service on that leg at that interval.
#[derive(Clone, Debug)]
pub struct ZMap {
    ids: Vec<Vec<Vec<Option<usize>>>>,
}

impl ZMap {
    pub fn id(&self, route: usize, leg: usize, t: usize) -> Option<usize> {
        self.ids[route][leg][t]
    }
}

/// Boarding-flow solution values per (route, leg, interval); structurally
/// pruned entries read zero.
#[derive(Clone, Debug)]
pub struct BoardingFlows {
    pub z: Vec<Vec<Vec<f64>>>,
}

impl BoardingFlows {
    pub fn value(&self, route: usize, leg: usize, t: usize) -> f64 {
        self.z[route][leg][t]
    }

    /// Total boarded on the first leg of a route over the horizon.
    pub fn first_leg_total(&self, route: usize) -> f64 {
        self.z[route][0].iter().sum()
    }
}

pub fn extract_boarding_flows(
    scenario: &Scenario,
    z_map: &ZMap,
    solution: &LpSolution,
) -> BoardingFlows {
    let t_count = scenario.intervals();
    let z = scenario
        .routes
        .iter()
        .enumerate()
        .map(|(r, route)| {
            (0..route.legs.len())
                .map(|j| {
                    (0..t_count)
                        .map(|t| {
                            z_map.ids[r][j][t]
                                .map(|id| solution.values[id].max(0.0))
                                .unwrap_or(0.0)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    BoardingFlows { z }
}

pub struct InnerLp {
    pub lp: LinearProgram,
    pub z: ZMap,
}

pub struct IterationLp {
    pub lp: LinearProgram,
    pub z: ZMap,
    /// `[t][line]` LP variable ids.
    pub x_ids: Vec<Vec<usize>>,
    /// `[t][station]` LP variable ids.
    pub n_ids: Vec<Vec<usize>>,
    pub lambda_id: usize,
}

impl IterationLp {
    /// Reads the design variables out of a solution.
    pub fn design_from(&self, scenario: &Scenario, solution: &LpSolution) -> DesignPoint {
        let t_count = scenario.intervals();
        let mut x = Mat::zeros(t_count, scenario.lines.len());
        let mut n = Mat::zeros(t_count, scenario.stations.len());
        for t in 0..t_count {
            for l in 0..scenario.lines.len() {
                x.set(t, l, clean(solution.values[self.x_ids[t][l]]));
            }
            for s in 0..scenario.stations.len() {
                n.set(t, s, clean(solution.values[self.n_ids[t][s]]));
            }
        }
        DesignPoint {
            x,
            n,
            lambda: solution.values[self.lambda_id],
        }
    }
}

/// Snaps solver round-off on values that are structurally nonnegative.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-11 {
        0.0
    } else {
        v
    }
}

enum ThetaSource<'a> {
    Fixed(&'a ChoiceField),
    Linear(&'a ThetaLinearization),
}

/// Builds the inner optimization LP: boarding variables only, with the
/// choice probabilities and the design held fixed. When `shared` is
/// false, shared-trip consistency rows are omitted and vehicle discounts
/// ignored (every trip consumes a whole vehicle).
pub fn build_inner_lp(
    scenario: &Scenario,
    leg_index: &LegIndex,
    theta: &ChoiceField,
    design: &DesignPoint,
    shared: bool,
) -> InnerLp {
    let (lp, z, _, _, _) = build_common(
        scenario,
        leg_index,
        design,
        ThetaSource::Fixed(theta),
        shared,
        None,
    );
    InnerLp { lp, z }
}

/// Builds the trust-region LP around `lin.anchor`: design variables are
/// boxed by the step sizes intersected with the feasible sets, nonlinear
/// wait coefficients are frozen at the anchor, and the linearized choice
/// probabilities replace the fixed ones everywhere they appear.
pub fn build_iteration_lp(
    scenario: &Scenario,
    leg_index: &LegIndex,
    lin: &ThetaLinearization,
    params: &OptimizerParams,
) -> IterationLp {
    let shared = !scenario.shared_trips.is_empty();
    let (lp, z, x_ids, n_ids, lambda_id) = build_common(
        scenario,
        leg_index,
        &lin.anchor.clone(),
        ThetaSource::Linear(lin),
        shared,
        Some(params),
    );
    IterationLp {
        lp,
        z,
        x_ids,
        n_ids,
        lambda_id: lambda_id.expect("iteration LP has design variables"),
    }
}

#[allow(clippy::too_many_lines, clippy::type_complexity)]
fn build_common(
    scenario: &Scenario,
    leg_index: &LegIndex,
    design: &DesignPoint,
    theta: ThetaSource<'_>,
    shared: bool,
    steps: Option<&OptimizerParams>,
) -> (
    LinearProgram,
    ZMap,
    Vec<Vec<usize>>,
    Vec<Vec<usize>>,
    Option<usize>,
) {
    let t_count = scenario.intervals();
    let delta = scenario.grid.delta_min;
    let budgets = &scenario.budgets;
    let mut lp = LinearProgram::new(match steps {
        Some(_) => "iteration",
        None => "inner",
    });

    // Fixed choice probability at (route, t); for the linear source this
    // is the value at the anchor (the affine part is added separately).
    let theta_at = |route: usize, t: usize| -> f64 {
        let c = scenario.routes[route].commute;
        let local = scenario.route_local[route];
        match &theta {
            ThetaSource::Fixed(field) => field.theta[c][local][t],
            ThetaSource::Linear(lin) => lin.theta_at_anchor(c, local, t),
        }
    };

    // --- boarding variables ------------------------------------------------
    let mut ids: Vec<Vec<Vec<Option<usize>>>> = Vec::with_capacity(scenario.routes.len());
    for (r, route) in scenario.routes.iter().enumerate() {
        let mut per_leg = Vec::with_capacity(route.legs.len());
        for (j, leg) in route.legs.iter().enumerate() {
            let mut per_t = Vec::with_capacity(t_count);
            for t in 0..t_count {
                let served = match leg.mode {
                    LegMode::Transit { line, .. } => design.x.get(t, line) > 0.0,
                    LegMode::Amod { station, .. } => design.n.get(t, station) > 0.0,
                };
                if !served {
                    per_t.push(None);
                    continue;
                }

                // Expected wait at the (anchor) design plus walking on the
                // first leg.
                let mut coef = match leg.mode {
                    LegMode::Transit { line, .. } => delta / (2.0 * design.x.get(t, line)),
                    LegMode::Amod { station, .. } => {
                        scenario.stations[station].mean_trip_min / design.n.get(t, station).sqrt()
                    }
                };
                if j == 0 {
                    coef += route.walk_min;
                }
                // Excess-wait accounting: leave own queue now, enter the
                // next leg's queue at the shifted arrival interval.
                coef -= (t_count - t) as f64 * delta;
                if j + 1 < route.legs.len() {
                    let arrival = t + scenario.grid.arrival_shift(leg.travel_min);
                    if arrival < t_count {
                        coef += (t_count - arrival) as f64 * delta;
                    }
                }
                let id = lp.add_var(format!("z[{r}][{j}][{t}]"), 0.0, f64::INFINITY, coef);
                per_t.push(Some(id));
            }
            per_leg.push(per_t);
        }
        ids.push(per_leg);
    }
    let z_map = ZMap { ids };

    // --- design variables (iteration LP only) ------------------------------
    // Continuous services stay strictly inside the availability region:
    // once positive, a rate or allocation may shrink towards zero but not
    // land on it, keeping every anchor differentiable. Bus rates live on
    // an integer grid and do switch off; their riders always retain the
    // choice-set filtering.
    const INTERIOR_FLOOR: f64 = 1e-3;
    let mut x_ids: Vec<Vec<usize>> = Vec::new();
    let mut n_ids: Vec<Vec<usize>> = Vec::new();
    let mut lambda_id = None;
    if let Some(params) = steps {
        for t in 0..t_count {
            let mut row_ids = Vec::with_capacity(scenario.lines.len());
            for (l, line) in scenario.lines.iter().enumerate() {
                let anchor = design.x.get(t, l);
                let (global_lb, global_ub, rho) = match line.kind {
                    LineKind::Rail => (budgets.rail_lb, budgets.rail_ub, params.rho_rail),
                    LineKind::Bus => (0.0, budgets.bus_ub, params.rho_bus),
                };
                let mut lb = (anchor - rho).max(global_lb);
                if line.kind == LineKind::Rail {
                    lb = lb.max(anchor.min(INTERIOR_FLOOR));
                }
                let ub = (anchor + rho).min(global_ub);
                row_ids.push(lp.add_var(format!("x[{t}][{}]", line.id), lb, ub.max(lb), 0.0));
            }
            x_ids.push(row_ids);
        }
        for t in 0..t_count {
            let mut row_ids = Vec::with_capacity(scenario.stations.len());
            for (s, st) in scenario.stations.iter().enumerate() {
                let anchor = design.n.get(t, s);
                let lb = (anchor - params.eta)
                    .max(0.0)
                    .max(anchor.min(INTERIOR_FLOOR));
                let ub = anchor + params.eta;
                row_ids.push(lp.add_var(format!("N[{t}][{}]", st.id), lb, ub.max(lb), 0.0));
            }
            n_ids.push(row_ids);
        }
        let lb = (design.lambda - params.sigma).max(scenario.fares.lambda_min);
        let ub = (design.lambda + params.sigma).min(scenario.fares.lambda_max);
        lambda_id = Some(lp.add_var("lambda", lb, ub.max(lb), 0.0));
    }

    // Resolves a choice-model design variable to its LP variable id.
    let var_id = |var: DesignVar| -> usize {
        match var {
            DesignVar::X { line, t } => x_ids[t][line],
            DesignVar::N { station, t } => n_ids[t][station],
            DesignVar::Lambda => lambda_id.expect("lambda variable present"),
        }
    };
    let anchor_value = |var: DesignVar| -> f64 {
        match var {
            DesignVar::X { line, t } => design.x.get(t, line),
            DesignVar::N { station, t } => design.n.get(t, station),
            DesignVar::Lambda => design.lambda,
        }
    };

    // --- demand inflow terms of the objective -------------------------------
    // Every route's first-leg arrival demand waits from its arrival to the
    // end of the horizon unless boarded: d_t * theta * (T - t) * delta.
    let mut objective_constant = 0.0;
    for (r, route) in scenario.routes.iter().enumerate() {
        let commute = &scenario.commutes[route.commute];
        for t in 0..t_count {
            let weight = commute.demand[t] * (t_count - t) as f64 * delta;
            if weight == 0.0 {
                continue;
            }
            objective_constant += weight * theta_at(r, t);
            if let ThetaSource::Linear(lin) = &theta {
                let term = &lin.terms[route.commute][t];
                let local = scenario.route_local[r];
                for (v, &var) in term.vars.iter().enumerate() {
                    let coef = term.rows[local][v];
                    if coef != 0.0 {
                        lp.add_to_objective(var_id(var), weight * coef);
                        objective_constant -= weight * coef * anchor_value(var);
                    }
                }
            }
        }
    }
    lp.objective_constant = objective_constant;

    // --- capacity rows -------------------------------------------------------
    for (l, line) in scenario.lines.iter().enumerate() {
        for pos in 0..line.stops.len() {
            let through = &leg_index.stop_sets(l, pos).through;
            if through.is_empty() {
                continue;
            }
            for t in 0..t_count {
                let mut terms: Vec<(usize, f64)> = Vec::new();
                for leg_ref in through {
                    if let Some(id) = z_map.id(leg_ref.route, leg_ref.leg, t) {
                        terms.push((id, 1.0));
                    }
                }
                if terms.is_empty() {
                    continue;
                }
                let name = format!("cap[{}][{}][{t}]", line.id, scenario.stops[line.stops[pos]]);
                match steps {
                    Some(_) => {
                        terms.push((x_ids[t][l], -line.capacity));
                        lp.add_row(name, Sense::Le, 0.0, terms);
                    }
                    None => {
                        lp.add_row(name, Sense::Le, line.capacity * design.x.get(t, l), terms);
                    }
                }
            }
        }
    }

    // --- availability rows ----------------------------------------------------
    for (s, station) in scenario.stations.iter().enumerate() {
        let rate = station.availability_rate(delta);
        for t in 0..t_count {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for leg_ref in leg_index.amod_leg_refs(s) {
                if let Some(id) = z_map.id(leg_ref.route, leg_ref.leg, t) {
                    let xi = if shared {
                        scenario.routes[leg_ref.route].legs[leg_ref.leg].vehicle_discount
                    } else {
                        1.0
                    };
                    terms.push((id, xi));
                }
            }
            if terms.is_empty() {
                continue;
            }
            let name = format!("avail[{}][{t}]", station.id);
            match steps {
                Some(_) => {
                    terms.push((n_ids[t][s], -rate));
                    lp.add_row(name, Sense::Le, 0.0, terms);
                }
                None => {
                    lp.add_row(name, Sense::Le, rate * design.n.get(t, s), terms);
                }
            }
        }
    }

    // --- cumulative demand caps on first legs ---------------------------------
    for (r, route) in scenario.routes.iter().enumerate() {
        let commute = &scenario.commutes[route.commute];
        let mut lhs: BTreeMap<usize, f64> = BTreeMap::new();
        let mut rhs = 0.0;
        let mut has_z = false;
        for tau in 0..t_count {
            if let Some(id) = z_map.id(r, 0, tau) {
                *lhs.entry(id).or_insert(0.0) += 1.0;
                has_z = true;
            }
            let d = commute.demand[tau];
            rhs += d * theta_at(r, tau);
            if let ThetaSource::Linear(lin) = &theta {
                if d != 0.0 {
                    let term = &lin.terms[route.commute][tau];
                    let local = scenario.route_local[r];
                    for (v, &var) in term.vars.iter().enumerate() {
                        let coef = term.rows[local][v];
                        if coef != 0.0 {
                            *lhs.entry(var_id(var)).or_insert(0.0) -= d * coef;
                            rhs -= d * coef * anchor_value(var);
                        }
                    }
                }
            }
            let emit = match &theta {
                // With fixed probabilities an all-pruned prefix is 0 <= rhs.
                ThetaSource::Fixed(_) => has_z,
                ThetaSource::Linear(_) => has_z || !lhs.is_empty(),
            };
            if emit {
                lp.add_row(
                    format!("demand[{}][{tau}]", route.id),
                    Sense::Le,
                    rhs,
                    lhs.iter().map(|(&v, &c)| (v, c)).collect(),
                );
            }
        }
    }

    // --- cumulative leg precedence ---------------------------------------------
    for (r, route) in scenario.routes.iter().enumerate() {
        for j in 1..route.legs.len() {
            let shift = scenario.grid.arrival_shift(route.legs[j - 1].travel_min);
            let mut lhs: BTreeMap<usize, f64> = BTreeMap::new();
            let mut has_z = false;
            for tau in 0..t_count {
                if let Some(id) = z_map.id(r, j, tau) {
                    *lhs.entry(id).or_insert(0.0) += 1.0;
                    has_z = true;
                }
                if tau >= shift {
                    if let Some(id) = z_map.id(r, j - 1, tau - shift) {
                        *lhs.entry(id).or_insert(0.0) -= 1.0;
                    }
                }
                if has_z {
                    lp.add_row(
                        format!("precede[{}][{j}][{tau}]", route.id),
                        Sense::Le,
                        0.0,
                        lhs.iter().map(|(&v, &c)| (v, c)).collect(),
                    );
                }
            }
        }
    }

    // --- shared-trip boarding consistency ----------------------------------------
    if shared {
        for trip in &scenario.shared_trips {
            let Some(first) = trip.members.first() else {
                continue;
            };
            for other in &trip.members[1..] {
                for t in 0..t_count {
                    let a = z_map.id(first.route, first.leg, t);
                    let b = z_map.id(other.route, other.leg, t);
                    let mut terms = Vec::new();
                    if let Some(id) = a {
                        terms.push((id, 1.0));
                    }
                    if let Some(id) = b {
                        terms.push((id, -1.0));
                    }
                    if terms.is_empty() {
                        continue;
                    }
                    lp.add_row(format!("share[{}][{t}]", trip.id), Sense::Eq, 0.0, terms);
                }
            }
        }
    }

    // --- budgets and fleet limit (iteration LP only) --------------------------------
    if steps.is_some() {
        let mut bus_terms = Vec::new();
        let mut rail_terms = Vec::new();
        for (l, line) in scenario.lines.iter().enumerate() {
            for t in 0..t_count {
                match line.kind {
                    LineKind::Bus => bus_terms.push((x_ids[t][l], line.cost_per_departure)),
                    LineKind::Rail => rail_terms.push((x_ids[t][l], line.cost_per_departure)),
                }
            }
        }
        if !bus_terms.is_empty() {
            lp.add_row("budget[bus]", Sense::Le, budgets.bus_total, bus_terms);
        }
        if !rail_terms.is_empty() {
            lp.add_row("budget[rail]", Sense::Le, budgets.rail_total, rail_terms);
        }
        for t in 0..t_count {
            let terms: Vec<(usize, f64)> = (0..scenario.stations.len())
                .map(|s| (n_ids[t][s], 1.0))
                .collect();
            if !terms.is_empty() {
                lp.add_row(
                    format!("fleet[{t}]"),
                    Sense::Le,
                    budgets.max_vehicles,
                    terms,
                );
            }
        }
    }

    (lp, z_map, x_ids, n_ids, lambda_id)
}

/// Solves the trust-region step around `lin.anchor` and returns the next
/// design, the approximated objective and the boarding flows.
///
/// Bus departure rates live on an integer grid: when the number of
/// reachable integer combinations is small they are enumerated exactly;
/// otherwise the relaxation is solved, bus rates are rounded half-up
/// within budget, fixed, and the LP re-solved.
pub fn solve_iteration_lp(
    scenario: &Scenario,
    leg_index: &LegIndex,
    lin: &ThetaLinearization,
    params: &OptimizerParams,
) -> Result<(DesignPoint, f64, BoardingFlows)> {
    let it = build_iteration_lp(scenario, leg_index, lin, params);
    let t_count = scenario.intervals();

    // Bus variables that can move, with their integer candidate ranges.
    let mut bus_vars: Vec<(usize, i64, i64)> = Vec::new(); // (lp var, lo, hi)
    for (l, line) in scenario.lines.iter().enumerate() {
        if line.kind != LineKind::Bus {
            continue;
        }
        for t in 0..t_count {
            let id = it.x_ids[t][l];
            let v = it.lp.var(id);
            let lo = (v.lb - 1e-9).ceil() as i64;
            let hi = (v.ub + 1e-9).floor() as i64;
            bus_vars.push((id, lo, hi.max(lo)));
        }
    }

    let combos: f64 = bus_vars
        .iter()
        .map(|&(_, lo, hi)| (hi - lo + 1) as f64)
        .product();

    if !bus_vars.is_empty() && combos <= 243.0 {
        return enumerate_bus_grid(scenario, &it, &bus_vars);
    }

    let solution = solve_optimal(&it.lp)?;
    if bus_vars.is_empty() {
        let design = it.design_from(scenario, &solution);
        let flows = extract_boarding_flows(scenario, &it.z, &solution);
        return Ok((design, solution.objective, flows));
    }

    // Round half-up, then floor the least-deserving rounded-up entries
    // until the bus budget holds again.
    let cost_of = |id: usize| -> f64 {
        // x var names are unique; recover the line cost via position.
        for (l, line) in scenario.lines.iter().enumerate() {
            for t in 0..t_count {
                if it.x_ids[t][l] == id {
                    return line.cost_per_departure;
                }
            }
        }
        unreachable!("bus variable not found")
    };
    let mut rounded: Vec<(usize, i64, f64)> = bus_vars
        .iter()
        .map(|&(id, lo, hi)| {
            let relaxed = solution.values[id];
            let r = ((relaxed + 0.5).floor() as i64).clamp(lo, hi);
            (id, r, relaxed)
        })
        .collect();
    let budget = scenario.budgets.bus_total;
    let mut total: f64 = rounded
        .iter()
        .map(|&(id, r, _)| cost_of(id) * r as f64)
        .sum();
    if total > budget + 1e-9 {
        let mut up: Vec<usize> = (0..rounded.len())
            .filter(|&k| (rounded[k].1 as f64) > rounded[k].2)
            .collect();
        // Ascending fractional part: the least deserving round-ups first.
        up.sort_by(|&a, &b| {
            let fa = rounded[a].2 - rounded[a].2.floor();
            let fb = rounded[b].2 - rounded[b].2.floor();
            fa.partial_cmp(&fb).unwrap().then(a.cmp(&b))
        });
        for k in up {
            if total <= budget + 1e-9 {
                break;
            }
            rounded[k].1 -= 1;
            total -= cost_of(rounded[k].0);
        }
    }

    let integral_already = rounded
        .iter()
        .all(|&(_, r, relaxed)| (relaxed - r as f64).abs() < 1e-9);
    if integral_already {
        let design = it.design_from(scenario, &solution);
        let flows = extract_boarding_flows(scenario, &it.z, &solution);
        return Ok((design, solution.objective, flows));
    }

    let mut fixed_lp = it.lp.clone();
    for &(id, r, _) in &rounded {
        fixed_lp.fix_var(id, r as f64);
    }
    let solution = solve_optimal(&fixed_lp)?;
    let design = it.design_from(scenario, &solution);
    let flows = extract_boarding_flows(scenario, &it.z, &solution);
    Ok((design, solution.objective, flows))
}

fn enumerate_bus_grid(
    scenario: &Scenario,
    it: &IterationLp,
    bus_vars: &[(usize, i64, i64)],
) -> Result<(DesignPoint, f64, BoardingFlows)> {
    let mut assignment: Vec<i64> = bus_vars.iter().map(|&(_, lo, _)| lo).collect();
    let mut best: Option<(f64, DesignPoint, BoardingFlows)> = None;
    loop {
        let mut lp = it.lp.clone();
        for (k, &(id, _, _)) in bus_vars.iter().enumerate() {
            lp.fix_var(id, assignment[k] as f64);
        }
        let solution = solve_lp(&lp)?;
        if solution.status == LpStatus::Optimal
            && best
                .as_ref()
                .is_none_or(|(obj, _, _)| solution.objective < obj - 1e-12)
        {
            let design = it.design_from(scenario, &solution);
            let flows = extract_boarding_flows(scenario, &it.z, &solution);
            best = Some((solution.objective, design, flows));
        }

        // Odometer step through the integer grid.
        let mut k = 0;
        loop {
            if k == bus_vars.len() {
                let (obj, design, flows) =
                    best.ok_or_else(|| Error::Lp("every bus grid point was infeasible".into()))?;
                return Ok((design, obj, flows));
            }
            assignment[k] += 1;
            if assignment[k] <= bus_vars[k].2 {
                break;
            }
            assignment[k] = bus_vars[k].1;
            k += 1;
        }
    }
}

fn solve_optimal(lp: &LinearProgram) -> Result<LpSolution> {
    let solution = solve_lp(lp)?;
    match solution.status {
        LpStatus::Optimal => Ok(solution),
        LpStatus::Infeasible => Err(Error::Lp(format!(
            "{}: trust-region LP infeasible, which cannot happen from a feasible anchor",
            lp.name
        ))),
        LpStatus::Unbounded => Err(Error::Lp(format!("{}: trust-region LP unbounded", lp.name))),
    }
}
