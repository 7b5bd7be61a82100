//! Brute-force verification oracles: exhaustive design-grid search and
//! exhaustive integral boarding enumeration. Both compute objectives
//! through the direct waiting-time accounting, independently of the LP
//! builder's folded coefficients.

use rayon::prelude::*;

use crate::choice::ChoiceField;
use crate::error::{Error, Result};
use crate::lp::BoardingFlows;
use crate::mat::Mat;
use crate::model::{DesignPoint, LegIndex, LegMode, Scenario};

use super::{evaluate_design, objective_breakdown};

const ENUM_LIMIT: f64 = 1e6;
const GRID_LIMIT: f64 = 1e4;

/// Result of an exhaustive design-grid search.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best_index: usize,
    pub best_design: DesignPoint,
    pub best_objective: f64,
    /// True objective per grid point; `None` where evaluation failed
    /// (infeasible point or empty choice set).
    pub objectives: Vec<Option<f64>>,
    pub grid_size: usize,
}

/// Evaluates every design in the grid and returns the global grid
/// minimum. Points that fail to evaluate are skipped; an entirely
/// infeasible grid is an error.
pub fn grid_oracle(
    scenario: &Scenario,
    leg_index: &LegIndex,
    designs: &[DesignPoint],
) -> Result<OracleResult> {
    let objectives: Vec<Option<f64>> = designs
        .par_iter()
        .map(|d| {
            evaluate_design(scenario, leg_index, d)
                .ok()
                .map(|(_, report)| report.objective)
        })
        .collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, obj) in objectives.iter().enumerate() {
        if let Some(q) = obj {
            if best.is_none_or(|(b, _)| *q < b) {
                best = Some((*q, i));
            }
        }
    }
    let Some((best_objective, best_index)) = best else {
        return Err(Error::EmptyGrid);
    };
    Ok(OracleResult {
        best_index,
        best_design: designs[best_index].clone(),
        best_objective,
        objectives,
        grid_size: designs.len(),
    })
}

/// Builds the Cartesian design grid: every departure-rate entry ranges
/// over `x_values`, every allocation entry over `n_values`, and the
/// discount over `lambda_values`. Errors when the grid would exceed
/// roughly 1e4 points.
pub fn cartesian_design_grid(
    scenario: &Scenario,
    x_values: &[f64],
    n_values: &[f64],
    lambda_values: &[f64],
) -> Result<Vec<DesignPoint>> {
    let t_count = scenario.intervals();
    let x_cells = t_count * scenario.lines.len();
    let n_cells = t_count * scenario.stations.len();
    let estimate = (x_values.len().max(1) as f64).powi(x_cells as i32)
        * (n_values.len().max(1) as f64).powi(n_cells as i32)
        * lambda_values.len().max(1) as f64;
    if estimate > GRID_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            estimate,
            limit: GRID_LIMIT,
        });
    }

    let x_choices = if x_values.is_empty() {
        &[0.0][..]
    } else {
        x_values
    };
    let n_choices = if n_values.is_empty() {
        &[0.0][..]
    } else {
        n_values
    };
    let l_choices = if lambda_values.is_empty() {
        &[scenario.fares.lambda_max][..]
    } else {
        lambda_values
    };

    let mut designs = Vec::new();
    let mut x_idx = vec![0usize; x_cells];
    loop {
        let mut n_idx = vec![0usize; n_cells];
        loop {
            for &lambda in l_choices {
                let mut x = Mat::zeros(t_count, scenario.lines.len());
                for (cell, &choice) in x_idx.iter().enumerate() {
                    x.set(
                        cell / scenario.lines.len(),
                        cell % scenario.lines.len(),
                        x_choices[choice],
                    );
                }
                let mut n = Mat::zeros(t_count, scenario.stations.len());
                for (cell, &choice) in n_idx.iter().enumerate() {
                    n.set(
                        cell / scenario.stations.len().max(1),
                        cell % scenario.stations.len().max(1),
                        n_choices[choice],
                    );
                }
                designs.push(DesignPoint { x, n, lambda });
            }
            if !advance(&mut n_idx, n_choices.len()) {
                break;
            }
        }
        if !advance(&mut x_idx, x_choices.len()) {
            break;
        }
    }
    Ok(designs)
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Exhaustively enumerates integral boarding schedules for a micro
/// scenario at a fixed design and choice field, returning the optimal
/// objective. Used to certify the LP's exactness on the integral micro
/// family. Refuses scenarios with shared trips and search spaces beyond
/// about 1e6 combinations.
pub fn enumerate_boarding_oracle(
    scenario: &Scenario,
    leg_index: &LegIndex,
    design: &DesignPoint,
    theta: &ChoiceField,
) -> Result<f64> {
    if !scenario.shared_trips.is_empty() {
        return Err(Error::Lp(
            "boarding enumeration does not support shared trips".into(),
        ));
    }
    let t_count = scenario.intervals();
    let prob = |route: usize, t: usize| -> f64 {
        theta.theta[scenario.routes[route].commute][scenario.route_local[route]][t]
    };

    // Enumeration variables in route-major, leg, interval order; entries
    // with no service at the interval are fixed to zero.
    let mut vars: Vec<(usize, usize, usize)> = Vec::new();
    for (r, route) in scenario.routes.iter().enumerate() {
        for (j, leg) in route.legs.iter().enumerate() {
            for t in 0..t_count {
                let served = match leg.mode {
                    LegMode::Transit { line, .. } => design.x.get(t, line) > 0.0,
                    LegMode::Amod { station, .. } => design.n.get(t, station) > 0.0,
                };
                if served {
                    vars.push((r, j, t));
                }
            }
        }
    }

    // Static size estimate: each variable is bounded by the cumulative
    // route demand up to its interval and by the service capacity there.
    let mut estimate = 1.0_f64;
    for &(r, j, t) in &vars {
        let cum_demand: f64 = (0..=t)
            .map(|tau| scenario.commutes[scenario.routes[r].commute].demand[tau] * prob(r, tau))
            .sum();
        let service = match scenario.routes[r].legs[j].mode {
            LegMode::Transit { line, .. } => scenario.lines[line].capacity * design.x.get(t, line),
            LegMode::Amod { station, .. } => {
                scenario.stations[station].availability_rate(scenario.grid.delta_min)
                    * design.n.get(t, station)
            }
        };
        estimate *= cum_demand.min(service).floor() + 1.0;
        if estimate > ENUM_LIMIT {
            return Err(Error::SearchSpaceTooLarge {
                estimate,
                limit: ENUM_LIMIT,
            });
        }
    }

    let mut state = EnumState {
        scenario,
        leg_index,
        design,
        theta,
        vars: &vars,
        flows: BoardingFlows {
            z: scenario
                .routes
                .iter()
                .map(|r| vec![vec![0.0; t_count]; r.legs.len()])
                .collect(),
        },
        capacity_used: scenario
            .lines
            .iter()
            .map(|l| vec![0.0; l.stops.len() * t_count])
            .collect(),
        avail_used: vec![0.0; scenario.stations.len() * t_count],
        best: f64::INFINITY,
    };
    state.dfs(0);
    Ok(state.best)
}

struct EnumState<'a> {
    scenario: &'a Scenario,
    leg_index: &'a LegIndex,
    design: &'a DesignPoint,
    theta: &'a ChoiceField,
    vars: &'a [(usize, usize, usize)],
    flows: BoardingFlows,
    /// Per line: `stop_pos * T + t` occupancy already committed.
    capacity_used: Vec<Vec<f64>>,
    /// Per `station * T + t` trips already committed.
    avail_used: Vec<f64>,
    best: f64,
}

impl EnumState<'_> {
    fn dfs(&mut self, k: usize) {
        if k == self.vars.len() {
            let objective = self.leaf_objective();
            if objective < self.best {
                self.best = objective;
            }
            return;
        }
        let (r, j, t) = self.vars[k];
        let max_z = self.headroom(r, j, t).floor() as i64;
        for value in 0..=max_z.max(0) {
            let v = value as f64;
            self.apply(r, j, t, v);
            self.dfs(k + 1);
            self.apply(r, j, t, 0.0);
        }
    }

    /// Largest feasible integral boarding given the committed prefix.
    fn headroom(&self, r: usize, j: usize, t: usize) -> f64 {
        let scenario = self.scenario;
        let t_count = scenario.intervals();
        let route = &scenario.routes[r];

        // Cumulative inflow cap at this interval.
        let mut inflow = 0.0;
        if j == 0 {
            for tau in 0..=t {
                inflow += scenario.commutes[route.commute].demand[tau]
                    * self.theta.theta[route.commute][scenario.route_local[r]][tau];
            }
        } else {
            let shift = scenario.grid.arrival_shift(route.legs[j - 1].travel_min);
            for tau in 0..=t {
                if tau >= shift {
                    inflow += self.flows.value(r, j - 1, tau - shift);
                }
            }
        }
        let boarded: f64 = (0..=t).map(|tau| self.flows.value(r, j, tau)).sum();
        let mut room = inflow - boarded + 1e-9;

        match route.legs[j].mode {
            LegMode::Transit {
                line,
                board_stop,
                alight_stop,
            } => {
                let line_def = &scenario.lines[line];
                let board = line_def.stop_position(board_stop).unwrap();
                let alight = line_def.stop_position(alight_stop).unwrap();
                let cap = line_def.capacity * self.design.x.get(t, line);
                for pos in board..alight {
                    room = room.min(cap - self.capacity_used[line][pos * t_count + t] + 1e-9);
                }
            }
            LegMode::Amod { station, .. } => {
                let rate = scenario.stations[station].availability_rate(scenario.grid.delta_min);
                let cap = rate * self.design.n.get(t, station);
                room = room.min(cap - self.avail_used[station * t_count + t] + 1e-9);
            }
        }
        room.max(0.0)
    }

    fn apply(&mut self, r: usize, j: usize, t: usize, value: f64) {
        let scenario = self.scenario;
        let t_count = scenario.intervals();
        let old = self.flows.z[r][j][t];
        let delta = value - old;
        self.flows.z[r][j][t] = value;
        match scenario.routes[r].legs[j].mode {
            LegMode::Transit {
                line,
                board_stop,
                alight_stop,
            } => {
                let line_def = &scenario.lines[line];
                let board = line_def.stop_position(board_stop).unwrap();
                let alight = line_def.stop_position(alight_stop).unwrap();
                for pos in board..alight {
                    self.capacity_used[line][pos * t_count + t] += delta;
                }
            }
            LegMode::Amod { station, .. } => {
                self.avail_used[station * t_count + t] += delta;
            }
        }
    }

    fn leaf_objective(&self) -> f64 {
        let b = objective_breakdown(
            self.scenario,
            self.leg_index,
            self.design,
            self.theta,
            &self.flows,
        );
        b.total()
    }
}
