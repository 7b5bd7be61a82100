use crate::model::{DesignPoint, LegMode, Scenario};

use super::fares::route_price;

/// Sentinel utility of a route that is out of the choice set because a
/// transit leg has zero frequency or an AMoD leg has zero vehicles.
pub const UNAVAILABLE: f64 = f64::NEG_INFINITY;

/// A route is available at interval `t` iff every transit leg has a
/// positive departure rate and every AMoD leg a positive allocation.
pub fn route_availability(
    scenario: &Scenario,
    route: usize,
    design: &DesignPoint,
    t: usize,
) -> bool {
    scenario.routes[route]
        .legs
        .iter()
        .all(|leg| match leg.mode {
            LegMode::Transit { line, .. } => design.x.get(t, line) > 0.0,
            LegMode::Amod { station, .. } => design.n.get(t, station) > 0.0,
        })
}

/// Systematic utility (dollars, negative) of a route at interval `t`
/// under a design, or [`UNAVAILABLE`] when the route is out of the
/// choice set.
///
/// Monetary cost enters at the marginal utility of money; journey time
/// (expected wait + in-vehicle + walking) at mode-specific marginal
/// utilities of time, with walking and transit waiting valued at the
/// transit rate.
pub fn route_utility(scenario: &Scenario, route: usize, design: &DesignPoint, t: usize) -> f64 {
    if !route_availability(scenario, route, design, t) {
        return UNAVAILABLE;
    }
    let r = &scenario.routes[route];
    let params = &scenario.utility;
    let beta_transit = params.beta_transit_per_min();
    let beta_amod = params.beta_amod_per_min();
    let delta = scenario.grid.delta_min;

    let mut time_cost = beta_transit * r.walk_min;
    for leg in &r.legs {
        match leg.mode {
            LegMode::Transit { line, .. } => {
                let x = design.x.get(t, line);
                time_cost += beta_transit * (delta / (2.0 * x) + leg.travel_min);
            }
            LegMode::Amod { station, .. } => {
                let n = design.n.get(t, station);
                let wait = scenario.stations[station].mean_trip_min / n.sqrt();
                time_cost += beta_amod * (wait + leg.travel_min);
            }
        }
    }
    let price = route_price(scenario, r, design.lambda);
    -params.beta_money * price - time_cost
}

/// The available alternatives of one commute at one interval: local route
/// positions (within `scenario.routes_of[commute]`) and their utilities.
#[derive(Clone, Debug)]
pub struct CommuteChoiceSet {
    pub commute: usize,
    pub t: usize,
    /// Local route indices of the available routes.
    pub available: Vec<usize>,
    /// Utilities of the available routes, same order.
    pub utilities: Vec<f64>,
}

impl CommuteChoiceSet {
    pub fn build(scenario: &Scenario, commute: usize, design: &DesignPoint, t: usize) -> Self {
        let mut available = Vec::new();
        let mut utilities = Vec::new();
        for (local, &route) in scenario.routes_of[commute].iter().enumerate() {
            let u = route_utility(scenario, route, design, t);
            if u != UNAVAILABLE {
                available.push(local);
                utilities.push(u);
            }
        }
        CommuteChoiceSet {
            commute,
            t,
            available,
            utilities,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.available.is_empty()
    }
}
