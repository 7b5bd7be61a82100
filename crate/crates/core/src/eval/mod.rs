//! True (nonlinear-choice) evaluation of a design and the report metrics.

mod oracle;

pub use oracle::{cartesian_design_grid, enumerate_boarding_oracle, grid_oracle, OracleResult};

use crate::choice::{evaluate_choices, ChoiceField};
use crate::error::{Error, Result};
use crate::lp::{build_inner_lp, extract_boarding_flows, solve_lp, BoardingFlows, LpStatus};
use crate::model::{
    check_design_feasibility, CommuteKind, DesignPoint, LegIndex, LegMode, ModeClass, Scenario,
};

/// Objective components in passenger-minutes; they sum to the inner LP
/// objective.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Breakdown {
    pub transit_expected_wait: f64,
    pub transit_excess_wait: f64,
    pub walk: f64,
    pub amod_expected_wait: f64,
    pub amod_excess_wait: f64,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.transit_expected_wait
            + self.transit_excess_wait
            + self.walk
            + self.amod_expected_wait
            + self.amod_excess_wait
    }
}

/// Demand-weighted mode shares (percent) split by commuter kind.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeShares {
    pub amod_local: f64,
    pub bus_local: f64,
    pub amod_rail_dt: f64,
    pub bus_rail_dt: f64,
    pub rail_dt: f64,
}

/// One evaluated design: disutility breakdown, utilization, shares and
/// unserved fractions, with the sweep context (`gamma`, `n_bar`) carried
/// alongside for reporting.
#[derive(Clone, Debug)]
pub struct EvaluationReport {
    /// Inner LP objective in passenger-minutes.
    pub objective: f64,
    /// Minutes per commuter.
    pub avg_disutility: f64,
    pub avg_walking: f64,
    pub avg_waiting: f64,
    pub avg_excess_waiting: f64,
    /// Demand-weighted mean systematic utility of chosen routes, dollars.
    pub avg_utility: f64,
    /// Fraction of bus lines with more than half a departure scheduled;
    /// `None` when the scenario has no bus lines.
    pub line_utilization: Option<f64>,
    /// Consumed vehicle-intervals over available ones; `None` when no
    /// vehicles are allocated.
    pub amod_utilization: Option<f64>,
    pub lambda_star: f64,
    pub shares: ModeShares,
    /// Percent of commuters of each kind never boarded by the horizon end.
    pub unserved_local: f64,
    pub unserved_dt: f64,
    pub breakdown: Breakdown,
    /// Sweep context: fraction of the bus budget available.
    pub gamma: f64,
    /// Sweep context: fleet limit in force.
    pub n_bar: f64,
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "gamma,n_bar,avg_disutility,avg_walking,avg_waiting,avg_utility,line_utilization,amod_utilization,lambda_star,amod_local,bus_local,unserved_local,amod_rail_dt,bus_rail_dt,rail_dt,unserved_dt";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.gamma,
            self.n_bar,
            self.avg_disutility,
            self.avg_walking,
            self.avg_waiting,
            self.avg_utility,
            opt(self.line_utilization),
            opt(self.amod_utilization),
            self.lambda_star,
            self.shares.amod_local,
            self.shares.bus_local,
            self.unserved_local,
            self.shares.amod_rail_dt,
            self.shares.bus_rail_dt,
            self.shares.rail_dt,
            self.unserved_dt,
        )
    }
}

/// Evaluates a feasible design exactly: choice probabilities from the
/// nonlinear model, boarding flows from the inner LP, and the full metric
/// set.
pub fn evaluate_design(
    scenario: &Scenario,
    leg_index: &LegIndex,
    design: &DesignPoint,
) -> Result<(BoardingFlows, EvaluationReport)> {
    let violations = check_design_feasibility(scenario, design)?;
    if !violations.is_empty() {
        return Err(Error::InfeasibleDesign(violations));
    }
    let theta = evaluate_choices(scenario, design)?;
    let shared = !scenario.shared_trips.is_empty();
    let inner = build_inner_lp(scenario, leg_index, &theta, design, shared);
    let solution = solve_lp(&inner.lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Lp(format!(
            "inner LP reported {:?} for a feasible design",
            solution.status
        )));
    }
    let flows = extract_boarding_flows(scenario, &inner.z, &solution);
    let report = build_report(
        scenario,
        leg_index,
        design,
        &theta,
        &flows,
        solution.objective,
    );
    Ok((flows, report))
}

/// Splits the total disutility of a boarding-flow solution into its five
/// components, evaluated directly from the waiting-time accounting
/// rather than from the LP's folded coefficients.
pub fn objective_breakdown(
    scenario: &Scenario,
    leg_index: &LegIndex,
    design: &DesignPoint,
    theta: &ChoiceField,
    flows: &BoardingFlows,
) -> Breakdown {
    let t_count = scenario.intervals();
    let delta = scenario.grid.delta_min;
    let prob = |route: usize, t: usize| -> f64 {
        theta.theta[scenario.routes[route].commute][scenario.route_local[route]][t]
    };
    let mut b = Breakdown::default();

    for (r, route) in scenario.routes.iter().enumerate() {
        for (j, leg) in route.legs.iter().enumerate() {
            for t in 0..t_count {
                let z = flows.value(r, j, t);
                if z == 0.0 {
                    continue;
                }
                match leg.mode {
                    LegMode::Transit { line, .. } => {
                        let x = design.x.get(t, line);
                        b.transit_expected_wait += z * delta / (2.0 * x);
                    }
                    LegMode::Amod { station, .. } => {
                        let n = design.n.get(t, station);
                        b.amod_expected_wait +=
                            z * scenario.stations[station].mean_trip_min / n.sqrt();
                    }
                }
                if j == 0 {
                    b.walk += z * route.walk_min;
                }
            }
        }
    }

    // Transit queues: cumulative arrival + transfer inflow minus boarded,
    // summed over intervals.
    for (l, line) in scenario.lines.iter().enumerate() {
        for pos in 0..line.stops.len() {
            let sets = leg_index.stop_sets(l, pos);
            if sets.first_boardings.is_empty() && sets.transfers.is_empty() {
                continue;
            }
            let mut waiting = 0.0;
            for tau in 0..t_count {
                for leg_ref in &sets.first_boardings {
                    waiting += scenario.commutes[scenario.routes[leg_ref.route].commute].demand
                        [tau]
                        * prob(leg_ref.route, tau)
                        - flows.value(leg_ref.route, leg_ref.leg, tau);
                }
                for leg_ref in &sets.transfers {
                    let prev = leg_ref.leg - 1;
                    let shift = scenario
                        .grid
                        .arrival_shift(scenario.routes[leg_ref.route].legs[prev].travel_min);
                    if tau >= shift {
                        waiting += flows.value(leg_ref.route, prev, tau - shift);
                    }
                    waiting -= flows.value(leg_ref.route, leg_ref.leg, tau);
                }
                b.transit_excess_wait += waiting * delta;
            }
        }
    }

    // AMoD queues: direct and first-mile demand waiting for a vehicle,
    // plus transfer arrivals waiting for a last-mile vehicle.
    for s in 0..scenario.stations.len() {
        let mut waiting = 0.0;
        for tau in 0..t_count {
            for &route in scenario_direct_and_first(leg_index, s) {
                waiting += scenario.commutes[scenario.routes[route].commute].demand[tau]
                    * prob(route, tau)
                    - flows.value(route, 0, tau);
            }
            for leg_ref in &leg_index.last_mile[s] {
                let prev = leg_ref.leg - 1;
                let shift = scenario
                    .grid
                    .arrival_shift(scenario.routes[leg_ref.route].legs[prev].travel_min);
                if tau >= shift {
                    waiting += flows.value(leg_ref.route, prev, tau - shift);
                }
                waiting -= flows.value(leg_ref.route, leg_ref.leg, tau);
            }
            b.amod_excess_wait += waiting * delta;
        }
    }

    b
}

fn scenario_direct_and_first(leg_index: &LegIndex, station: usize) -> impl Iterator<Item = &usize> {
    leg_index.direct[station]
        .iter()
        .chain(leg_index.first_mile[station].iter())
}

fn build_report(
    scenario: &Scenario,
    leg_index: &LegIndex,
    design: &DesignPoint,
    theta: &ChoiceField,
    flows: &BoardingFlows,
    objective: f64,
) -> EvaluationReport {
    let t_count = scenario.intervals();
    let total_demand = scenario.total_demand();
    let per_commuter = |v: f64| {
        if total_demand > 0.0 {
            v / total_demand
        } else {
            0.0
        }
    };
    let breakdown = objective_breakdown(scenario, leg_index, design, theta, flows);

    // Demand-weighted chosen-path utility.
    let mut utility_sum = 0.0;
    for (c, commute) in scenario.commutes.iter().enumerate() {
        for (local, _) in scenario.routes_of[c].iter().enumerate() {
            for t in 0..t_count {
                let p = theta.theta[c][local][t];
                if p > 0.0 {
                    utility_sum += commute.demand[t] * p * theta.utility[c][local][t];
                }
            }
        }
    }

    // Mode shares and unserved fractions per commuter kind.
    let mut share_den = [0.0_f64; 2];
    let mut boarded = [0.0_f64; 2];
    let mut shares = ModeShares::default();
    for (c, commute) in scenario.commutes.iter().enumerate() {
        let kind_idx = match commute.kind {
            CommuteKind::Local => 0,
            CommuteKind::Downtown => 1,
        };
        share_den[kind_idx] += commute.total_demand();
        for (local, &route) in scenario.routes_of[c].iter().enumerate() {
            boarded[kind_idx] += flows.first_leg_total(route);
            let weighted: f64 = (0..t_count)
                .map(|t| commute.demand[t] * theta.theta[c][local][t])
                .sum();
            if weighted == 0.0 {
                continue;
            }
            let r = &scenario.routes[route];
            match (commute.kind, r.mode_class, r.legs.len()) {
                (CommuteKind::Local, ModeClass::TransitOnly, _) => shares.bus_local += weighted,
                (CommuteKind::Local, _, _) => shares.amod_local += weighted,
                (CommuteKind::Downtown, ModeClass::TransitOnly, 1) => shares.rail_dt += weighted,
                (CommuteKind::Downtown, ModeClass::TransitOnly, _) => {
                    shares.bus_rail_dt += weighted
                }
                (CommuteKind::Downtown, _, _) => shares.amod_rail_dt += weighted,
            }
        }
    }
    let pct = |num: f64, den: f64| if den > 0.0 { 100.0 * num / den } else { 0.0 };
    let report_shares = ModeShares {
        amod_local: pct(shares.amod_local, share_den[0]),
        bus_local: pct(shares.bus_local, share_den[0]),
        amod_rail_dt: pct(shares.amod_rail_dt, share_den[1]),
        bus_rail_dt: pct(shares.bus_rail_dt, share_den[1]),
        rail_dt: pct(shares.rail_dt, share_den[1]),
    };

    // Bus line utilization: lines with meaningfully positive departures.
    let bus_lines: Vec<usize> = scenario.bus_lines().collect();
    let line_utilization = if bus_lines.is_empty() {
        None
    } else {
        let used = bus_lines
            .iter()
            .filter(|&&l| (0..t_count).map(|t| design.x.get(t, l)).sum::<f64>() > 0.5)
            .count();
        Some(used as f64 / bus_lines.len() as f64)
    };

    // AMoD utilization: discounted trips served over available
    // vehicle-intervals.
    let shared = !scenario.shared_trips.is_empty();
    let mut consumed = 0.0;
    let mut available = 0.0;
    for (s, station) in scenario.stations.iter().enumerate() {
        let rate = station.availability_rate(scenario.grid.delta_min);
        for t in 0..t_count {
            available += rate * design.n.get(t, s);
        }
        for leg_ref in leg_index.amod_leg_refs(s) {
            let xi = if shared {
                scenario.routes[leg_ref.route].legs[leg_ref.leg].vehicle_discount
            } else {
                1.0
            };
            for t in 0..t_count {
                consumed += xi * flows.value(leg_ref.route, leg_ref.leg, t);
            }
        }
    }
    let amod_utilization = if available > 0.0 {
        Some(consumed / available)
    } else {
        None
    };

    EvaluationReport {
        objective,
        avg_disutility: per_commuter(objective),
        avg_walking: per_commuter(breakdown.walk),
        avg_waiting: per_commuter(breakdown.transit_expected_wait + breakdown.amod_expected_wait),
        avg_excess_waiting: per_commuter(
            breakdown.transit_excess_wait + breakdown.amod_excess_wait,
        ),
        avg_utility: per_commuter(utility_sum),
        line_utilization,
        amod_utilization,
        lambda_star: design.lambda,
        shares: report_shares,
        unserved_local: pct((share_den[0] - boarded[0]).max(0.0), share_den[0]),
        unserved_dt: pct((share_den[1] - boarded[1]).max(0.0), share_den[1]),
        breakdown,
        gamma: 1.0,
        n_bar: scenario.budgets.max_vehicles,
    }
}
