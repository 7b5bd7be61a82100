use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::io::raw::{RawLegMode, RawScenario};
use crate::units::parse_clock;

use super::{LineKind, ModeClass};

/// One invariant violation with a path to the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every invariant violation found in a scenario bundle; empty iff the
/// scenario is well-formed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a scenario bundle and lists each
/// violation with a path to the offending field. Dangling references are
/// reported naming the missing id.
pub fn validate_scenario(raw: &RawScenario) -> ValidationReport {
    let mut report = ValidationReport::default();
    let t_count = raw.grid.intervals;

    validate_grid(raw, &mut report);

    // Id tables; duplicates reported once per extra occurrence.
    let mut line_ids = BTreeMap::new();
    for (i, line) in raw.lines.iter().enumerate() {
        if line_ids.insert(line.id.clone(), i).is_some() {
            report.push(
                format!("lines[{i}].id"),
                format!("duplicate line id `{}`", line.id),
            );
        }
    }
    let mut station_ids = BTreeSet::new();
    for (i, st) in raw.stations.iter().enumerate() {
        if !station_ids.insert(st.station_id.clone()) {
            report.push(
                format!("stations[{i}].station_id"),
                format!("duplicate station id `{}`", st.station_id),
            );
        }
    }
    let mut commute_ids = BTreeMap::new();
    for (i, c) in raw.commutes.iter().enumerate() {
        if commute_ids.insert(c.id.clone(), i).is_some() {
            report.push(
                format!("commutes[{i}].id"),
                format!("duplicate commute id `{}`", c.id),
            );
        }
    }
    let mut route_ids = BTreeMap::new();
    for (i, r) in raw.routes.iter().enumerate() {
        if route_ids.insert(r.id.clone(), i).is_some() {
            report.push(
                format!("routes[{i}].id"),
                format!("duplicate route id `{}`", r.id),
            );
        }
    }

    validate_lines(raw, &mut report);
    validate_stations(raw, &mut report);
    validate_commutes(raw, t_count, &mut report);
    validate_routes(raw, &line_ids, &station_ids, &commute_ids, &mut report);
    validate_shared_trips(raw, &route_ids, &mut report);
    validate_budgets(raw, &mut report);
    validate_fares(raw, &mut report);
    validate_choice(raw, &mut report);
    validate_algorithm(raw, &mut report);

    if let Some(sharing) = &raw.sharing {
        if sharing.delta_w < 0.0 || sharing.delta_d < 0.0 {
            report.push("sharing", "delta_w and delta_d must be nonnegative");
        }
        if sharing.max_parties != 2 {
            report.push("sharing.max_parties", "only two-party sharing is supported");
        }
    }
    if let Some(seed) = &raw.demand_seed {
        if seed.total <= 0.0 {
            report.push("demand_seed.total", "total demand must be positive");
        }
        if seed.jitter < 0.0 || seed.jitter >= 1.0 {
            report.push("demand_seed.jitter", "jitter must lie in [0, 1)");
        }
    }

    report
}

fn validate_grid(raw: &RawScenario, report: &mut ValidationReport) {
    let grid = &raw.grid;
    if grid.intervals == 0 {
        report.push("grid.T", "number of intervals must be at least 1");
    }
    if grid.delta_t <= 0.0 {
        report.push("grid.delta_t", "delta_t must be positive");
    }
    match (parse_clock(&grid.t_start), parse_clock(&grid.t_end)) {
        (Some(start), Some(end)) => {
            let span = f64::from(end) - f64::from(start);
            let expected = grid.intervals as f64 * grid.delta_t;
            if (span - expected).abs() > 1e-9 {
                report.push(
                    "grid",
                    format!("horizon {span} min does not equal T * delta_t = {expected} min"),
                );
            }
        }
        (start, end) => {
            if start.is_none() {
                report.push(
                    "grid.t_start",
                    format!("cannot parse clock time `{}`", grid.t_start),
                );
            }
            if end.is_none() {
                report.push(
                    "grid.t_end",
                    format!("cannot parse clock time `{}`", grid.t_end),
                );
            }
        }
    }
}

fn validate_lines(raw: &RawScenario, report: &mut ValidationReport) {
    for (i, line) in raw.lines.iter().enumerate() {
        let path = |field: &str| format!("lines[{i}].{field}");
        if line.stops.len() < 2 {
            report.push(path("stops"), "a line needs at least 2 stops");
        }
        let unique: BTreeSet<_> = line.stops.iter().collect();
        if unique.len() != line.stops.len() {
            report.push(path("stops"), "stops on a line must be distinct");
        }
        if line.segment_times.len() + 1 != line.stops.len() {
            report.push(
                path("segment_times"),
                format!(
                    "expected {} segment times for {} stops, got {}",
                    line.stops.len().saturating_sub(1),
                    line.stops.len(),
                    line.segment_times.len()
                ),
            );
        }
        if line.segment_times.iter().any(|&t| t < 0.0) {
            report.push(path("segment_times"), "segment times must be nonnegative");
        }
        if line.capacity <= 0.0 {
            report.push(path("capacity"), "capacity must be positive");
        }
        if line.cost_per_departure <= 0.0 {
            report.push(
                path("cost_per_departure"),
                "cost per departure must be positive",
            );
        }
        if line.fare.is_some_and(|f| f < 0.0) {
            report.push(path("fare"), "fare must be nonnegative");
        }
    }
}

fn validate_stations(raw: &RawScenario, report: &mut ValidationReport) {
    for (i, st) in raw.stations.iter().enumerate() {
        if st.area <= 0.0 {
            report.push(format!("stations[{i}].area"), "area must be positive");
        }
        if st.shape_coeff <= 0.0 {
            report.push(
                format!("stations[{i}].shape_coeff"),
                "shape coefficient must be positive",
            );
        }
    }
}

fn validate_commutes(raw: &RawScenario, t_count: usize, report: &mut ValidationReport) {
    for (i, c) in raw.commutes.iter().enumerate() {
        if c.demand.is_empty() && raw.demand_csv.is_none() {
            report.push(
                format!("commutes[{i}].demand"),
                "demand vector missing and no demand_csv given",
            );
        }
        if !c.demand.is_empty() && c.demand.len() != t_count {
            report.push(
                format!("commutes[{i}].demand"),
                format!(
                    "demand length {} does not match T = {t_count}",
                    c.demand.len()
                ),
            );
        }
        if c.demand.iter().any(|&d| d < 0.0) {
            report.push(
                format!("commutes[{i}].demand"),
                "demand entries must be nonnegative",
            );
        }
    }
}

fn validate_routes(
    raw: &RawScenario,
    line_ids: &BTreeMap<String, usize>,
    station_ids: &BTreeSet<String>,
    commute_ids: &BTreeMap<String, usize>,
    report: &mut ValidationReport,
) {
    for (i, route) in raw.routes.iter().enumerate() {
        let path = |field: &str| format!("routes[{i}].{field}");
        if !commute_ids.contains_key(&route.commute) {
            report.push(
                path("commute"),
                format!("unknown commute `{}`", route.commute),
            );
        }
        if route.legs.is_empty() {
            report.push(path("legs"), "a route needs at least one leg");
            continue;
        }
        if route.walk_min < 0.0 {
            report.push(path("walk_min"), "walking time must be nonnegative");
        }

        let mut any_transit = false;
        let mut any_amod = false;
        let mut prev_alight: Option<&str> = None;
        for (j, leg) in route.legs.iter().enumerate() {
            let lpath = |field: &str| format!("routes[{i}].legs[{j}].{field}");
            match &leg.mode {
                RawLegMode::Transit {
                    line,
                    board_stop,
                    alight_stop,
                } => {
                    any_transit = true;
                    match line_ids.get(line) {
                        None => {
                            report.push(lpath("line"), format!("unknown line `{line}`"));
                        }
                        Some(&l) => {
                            let stops = &raw.lines[l].stops;
                            let board = stops.iter().position(|s| s == board_stop);
                            let alight = stops.iter().position(|s| s == alight_stop);
                            if board.is_none() {
                                report.push(
                                    lpath("board_stop"),
                                    format!("stop `{board_stop}` is not on line `{line}`"),
                                );
                            }
                            if alight.is_none() {
                                report.push(
                                    lpath("alight_stop"),
                                    format!("stop `{alight_stop}` is not on line `{line}`"),
                                );
                            }
                            if let (Some(b), Some(a)) = (board, alight) {
                                if b >= a {
                                    report.push(
                                        lpath("alight_stop"),
                                        "alighting stop must come after the boarding stop",
                                    );
                                }
                            }
                            // Transit-to-transit transfers must share a stop.
                            if let Some(prev) = prev_alight {
                                if prev != board_stop {
                                    report.push(
                                        lpath("board_stop"),
                                        format!(
                                            "transfer discontinuity: previous leg alights at `{prev}`"
                                        ),
                                    );
                                }
                            }
                            prev_alight = Some(alight_stop);
                        }
                    }
                }
                RawLegMode::Amod { station } => {
                    any_amod = true;
                    prev_alight = None;
                    if !station_ids.contains(station) {
                        report.push(lpath("station"), format!("unknown station `{station}`"));
                    }
                }
            }
            if leg.distance_km.is_some_and(|d| d < 0.0) {
                report.push(lpath("distance_km"), "distance must be nonnegative");
            }
            if leg.travel_min.is_some_and(|t| t < 0.0) {
                report.push(lpath("travel_min"), "travel time must be nonnegative");
            }
            if leg
                .vehicle_discount
                .is_some_and(|xi| !(xi > 0.0 && xi <= 1.0))
            {
                report.push(
                    lpath("vehicle_discount"),
                    "vehicle discount must lie in (0, 1]",
                );
            }
            if matches!(leg.mode, RawLegMode::Amod { .. }) && leg.distance_km.is_none() {
                report.push(lpath("distance_km"), "AMoD legs need a trip distance");
            }
        }

        let expected = match (any_transit, any_amod) {
            (true, false) => ModeClass::TransitOnly,
            (false, true) => ModeClass::AmodOnly,
            (true, true) => ModeClass::Mixed,
            (false, false) => unreachable!("legs checked nonempty"),
        };
        if route.mode_class != expected {
            report.push(
                path("mode_class"),
                format!(
                    "mode class {:?} inconsistent with leg modes",
                    route.mode_class
                ),
            );
        }
    }
}

fn validate_shared_trips(
    raw: &RawScenario,
    route_ids: &BTreeMap<String, usize>,
    report: &mut ValidationReport,
) {
    for (i, trip) in raw.shared_trips.iter().enumerate() {
        let path = format!("shared_trips[{i}]");
        if trip.members.len() < 2 {
            report.push(
                format!("{path}.members"),
                "a shared trip needs at least 2 parties",
            );
        }
        let n = trip.members.len() as f64;
        let mut commutes = BTreeSet::new();
        let mut stations = BTreeSet::new();
        for (k, member) in trip.members.iter().enumerate() {
            let mpath = format!("{path}.members[{k}]");
            let Some(&r) = route_ids.get(&member.route) else {
                report.push(mpath, format!("unknown route `{}`", member.route));
                continue;
            };
            let route = &raw.routes[r];
            commutes.insert(route.commute.clone());
            let Some(leg) = route.legs.get(member.leg) else {
                report.push(
                    mpath,
                    format!("route `{}` has no leg {}", member.route, member.leg),
                );
                continue;
            };
            match &leg.mode {
                RawLegMode::Amod { station } => {
                    stations.insert(station.clone());
                }
                RawLegMode::Transit { .. } => {
                    report.push(mpath.clone(), "shared-trip members must be AMoD legs");
                }
            }
            if leg.shared_trip.as_deref() != Some(trip.id.as_str()) {
                report.push(
                    format!("{mpath}.shared_trip"),
                    format!("leg does not name shared trip `{}`", trip.id),
                );
            }
            if let Some(xi) = leg.vehicle_discount {
                if (xi - 1.0 / n).abs() > 1e-9 {
                    report.push(
                        format!("{mpath}.vehicle_discount"),
                        format!(
                            "expected 1/{} for an {}-party shared trip",
                            trip.members.len(),
                            trip.members.len()
                        ),
                    );
                }
            }
        }
        if commutes.len() != trip.members.len() {
            report.push(
                format!("{path}.members"),
                "shared-trip parties must belong to distinct commutes",
            );
        }
        if stations.len() > 1 {
            report.push(
                format!("{path}.members"),
                "shared-trip members must be anchored at the same station",
            );
        }
    }
}

fn validate_budgets(raw: &RawScenario, report: &mut ValidationReport) {
    let b = &raw.budgets;
    if b.rail_lb < 0.0 || b.rail_lb > b.rail_ub {
        report.push(
            "budgets",
            "rail bounds must satisfy 0 <= lb_rail <= ub_rail",
        );
    }
    if b.bus_ub < 0.0 {
        report.push("budgets.ub_bus", "bus upper bound must be nonnegative");
    }
    if b.max_vehicles < 0.0 {
        report.push("budgets.N_bar", "fleet limit must be nonnegative");
    }
    if b.bus_total < 0.0 || b.rail_total < 0.0 {
        report.push("budgets", "budgets must be nonnegative");
    }
    // The rail lower bounds must themselves be affordable.
    let rail_cost_at_lb: f64 = raw
        .lines
        .iter()
        .filter(|l| l.kind == LineKind::Rail)
        .map(|l| l.cost_per_departure * b.rail_lb * raw.grid.intervals as f64)
        .sum();
    if rail_cost_at_lb > b.rail_total + 1e-9 {
        report.push(
            "budgets.B_rail",
            format!(
                "rail lower bounds cost {rail_cost_at_lb:.3} which exceeds the rail budget {:.3}",
                b.rail_total
            ),
        );
    }
}

fn validate_fares(raw: &RawScenario, report: &mut ValidationReport) {
    let f = &raw.fares;
    for (name, v) in [
        ("transit_flat", f.transit_flat),
        ("f_base", f.f_base),
        ("f_book", f.f_book),
        ("f_min", f.f_min),
        ("pi_d", f.pi_d),
        ("pi_t", f.pi_t),
    ] {
        if v < 0.0 {
            report.push(format!("fares.{name}"), "fares must be nonnegative");
        }
    }
    if !(0.0..=1.0).contains(&f.transfer_discount) {
        report.push(
            "fares.transfer_discount",
            "transfer discount must lie in [0, 1]",
        );
    }
    if f.lambda_min > f.lambda_max {
        report.push("fares", "lambda_min must not exceed lambda_max");
    }
    if f.lambda_min < 0.0 {
        report.push("fares.lambda_min", "lambda bounds must be nonnegative");
    }
}

fn validate_choice(raw: &RawScenario, report: &mut ValidationReport) {
    let spec = &raw.choice.model;
    for (name, v) in [
        ("phi", spec.phi),
        ("phi_P", spec.phi_p),
        ("phi_A", spec.phi_a),
        ("phi_PA", spec.phi_pa),
    ] {
        if v <= 0.0 {
            report.push(
                format!("choice.{name}"),
                "scale parameters must be positive",
            );
        }
    }
    for (name, scale) in [
        ("phi_P", spec.phi_p),
        ("phi_A", spec.phi_a),
        ("phi_PA", spec.phi_pa),
    ] {
        if spec.phi > scale + 1e-12 {
            report.push(
                format!("choice.{name}"),
                "nest scale must be at least the upper-level scale phi",
            );
        }
    }
    let u = &raw.choice.utility;
    for (name, v) in [
        ("beta_time_transit", u.beta_time_transit),
        ("beta_time_amod", u.beta_time_amod),
        ("beta_money", u.beta_money),
        ("walk_speed", u.walk_speed),
        ("amod_speed", u.amod_speed),
    ] {
        if v <= 0.0 {
            report.push(
                format!("choice.{name}"),
                "utility parameters must be strictly positive",
            );
        }
    }
}

fn validate_algorithm(raw: &RawScenario, report: &mut ValidationReport) {
    let a = &raw.algorithm;
    if a.rho_rail < 0.0 || a.rho_bus < 0.0 || a.eta < 0.0 || a.sigma < 0.0 {
        report.push("algorithm", "step sizes must be nonnegative");
    }
    if a.epsilon <= 0.0 {
        report.push(
            "algorithm.epsilon",
            "termination threshold must be positive",
        );
    }
    if a.kappa == 0 {
        report.push("algorithm.kappa", "maximum iterations must be at least 1");
    }
    if a.starts == 0 {
        report.push("algorithm.starts", "number of starts must be at least 1");
    }
}
