use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;

use super::{LineKind, Scenario, Violation};

/// Tolerance absorbing LP round-off when checking membership in the
/// (mathematically closed) feasible sets.
pub const FEASIBILITY_EPS: f64 = 1e-6;

/// The decision vector: departure rates per (interval, line), AMoD
/// vehicles per (interval, station region), and the AMoD fare discount.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    /// `intervals x lines` departure rates.
    pub x: Mat,
    /// `intervals x stations` vehicle allocations.
    pub n: Mat,
    /// AMoD discount factor.
    pub lambda: f64,
}

impl DesignPoint {
    pub fn zeros(scenario: &Scenario) -> Self {
        DesignPoint {
            x: Mat::zeros(scenario.intervals(), scenario.lines.len()),
            n: Mat::zeros(scenario.intervals(), scenario.stations.len()),
            lambda: scenario.fares.lambda_max,
        }
    }

    /// Largest componentwise distance to another design, reported per
    /// variable family.
    pub fn box_distance(&self, other: &DesignPoint) -> (f64, f64, f64) {
        (
            self.x.max_abs_diff(&other.x),
            self.n.max_abs_diff(&other.n),
            (self.lambda - other.lambda).abs(),
        )
    }
}

/// Checks membership of a design in the relaxed feasible sets (budget
/// sums, per-interval bounds, fleet limit, discount bounds). Returns one
/// violation per broken constraint, naming it and the slack; an empty
/// list means the design is feasible.
pub fn check_design_feasibility(
    scenario: &Scenario,
    design: &DesignPoint,
) -> Result<Vec<Violation>> {
    let t_count = scenario.intervals();
    let n_lines = scenario.lines.len();
    let n_stations = scenario.stations.len();
    if design.x.rows() != t_count || design.x.cols() != n_lines {
        return Err(Error::Dimension(format!(
            "x is {}x{}, expected {}x{}",
            design.x.rows(),
            design.x.cols(),
            t_count,
            n_lines
        )));
    }
    if design.n.rows() != t_count || design.n.cols() != n_stations {
        return Err(Error::Dimension(format!(
            "N is {}x{}, expected {}x{}",
            design.n.rows(),
            design.n.cols(),
            t_count,
            n_stations
        )));
    }

    let budgets = &scenario.budgets;
    let mut violations = Vec::new();
    let mut push = |path: String, message: String| violations.push(Violation { path, message });

    let mut bus_cost = 0.0;
    let mut rail_cost = 0.0;
    for (t, l, value) in design.x.enumerate() {
        let line = &scenario.lines[l];
        if value < -FEASIBILITY_EPS {
            push(
                format!("x[{t}][{}]", line.id),
                format!("negative departure rate {value}"),
            );
        }
        match line.kind {
            LineKind::Bus => {
                bus_cost += line.cost_per_departure * value;
                if value > budgets.bus_ub + FEASIBILITY_EPS {
                    push(
                        format!("x[{t}][{}]", line.id),
                        format!(
                            "bus rate {value} exceeds ub_bus = {} by {}",
                            budgets.bus_ub,
                            value - budgets.bus_ub
                        ),
                    );
                }
            }
            LineKind::Rail => {
                rail_cost += line.cost_per_departure * value;
                if value > budgets.rail_ub + FEASIBILITY_EPS {
                    push(
                        format!("x[{t}][{}]", line.id),
                        format!(
                            "rail rate {value} exceeds ub_rail = {} by {}",
                            budgets.rail_ub,
                            value - budgets.rail_ub
                        ),
                    );
                }
                if value < budgets.rail_lb - FEASIBILITY_EPS {
                    push(
                        format!("x[{t}][{}]", line.id),
                        format!(
                            "rail rate {value} below lb_rail = {} by {}",
                            budgets.rail_lb,
                            budgets.rail_lb - value
                        ),
                    );
                }
            }
        }
    }
    if bus_cost > budgets.bus_total + FEASIBILITY_EPS {
        push(
            "x.bus_budget".into(),
            format!("bus budget exceeded by {}", bus_cost - budgets.bus_total),
        );
    }
    if rail_cost > budgets.rail_total + FEASIBILITY_EPS {
        push(
            "x.rail_budget".into(),
            format!("rail budget exceeded by {}", rail_cost - budgets.rail_total),
        );
    }

    for t in 0..t_count {
        let mut total = 0.0;
        for s in 0..n_stations {
            let value = design.n.get(t, s);
            if value < -FEASIBILITY_EPS {
                push(
                    format!("N[{t}][{}]", scenario.stations[s].id),
                    format!("negative allocation {value}"),
                );
            }
            total += value;
        }
        if total > budgets.max_vehicles + FEASIBILITY_EPS {
            push(
                format!("N[{t}]"),
                format!(
                    "fleet total {total} exceeds N_bar = {} by {}",
                    budgets.max_vehicles,
                    total - budgets.max_vehicles
                ),
            );
        }
    }

    let fares = &scenario.fares;
    if design.lambda < fares.lambda_min - FEASIBILITY_EPS
        || design.lambda > fares.lambda_max + FEASIBILITY_EPS
    {
        push(
            "lambda".into(),
            format!(
                "discount {} outside [{}, {}]",
                design.lambda, fares.lambda_min, fares.lambda_max
            ),
        );
    }

    Ok(violations)
}

/// Rounds a fractional allocation down to whole vehicles; the fleet
/// limit keeps holding since flooring never increases a row sum.
pub fn round_allocation(n: &Mat) -> Mat {
    n.map(f64::floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_preserves_fleet_limit() {
        let n = Mat::from_rows(&[vec![2.6, 2.6]]);
        let floored = round_allocation(&n);
        assert_eq!(floored.get(0, 0), 2.0);
        assert_eq!(floored.get(0, 1), 2.0);
        assert!(floored.row(0).iter().sum::<f64>() <= 5.0);
    }

    #[test]
    fn floor_basics() {
        let n = Mat::from_rows(&[vec![3.9, 0.0]]);
        let floored = round_allocation(&n);
        assert_eq!(floored.get(0, 0), 3.0);
        assert_eq!(floored.get(0, 1), 0.0);
    }
}
