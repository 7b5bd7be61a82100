//! Scenario bundle ingestion and canonical serialization.

mod demand;
mod design_file;
pub mod raw;

pub use demand::{generate_demand, DemandSeed};
pub use design_file::{read_design, write_design};

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    expand_sharing, validate_scenario, Commute, CommuteRoute, Leg, LegMode, LegRef, Scenario,
    SharedTrip, StationRegion, TimeGrid, TransitLine,
};
use crate::units::{format_clock, parse_clock};

use raw::{RawCommute, RawGrid, RawLeg, RawLegMode, RawLine, RawRoute, RawScenario, RawSharedTrip};

pub use crate::model::ValidationReport;

/// Loads, validates and builds a scenario bundle from disk. External
/// demand tables referenced by `demand_csv` are resolved relative to the
/// bundle's directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut raw: RawScenario = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if let Some(csv) = raw.demand_csv.clone() {
        let csv_path = path
            .parent()
            .map_or_else(|| csv.clone().into(), |dir| dir.join(&csv));
        demand::fill_demand_from_csv(&mut raw, &csv_path)?;
    }
    scenario_from_raw(raw)
}

/// Validates a raw bundle and builds the cross-referenced scenario,
/// expanding shared-trip variants when a `sharing` section is present.
pub fn scenario_from_raw(raw: RawScenario) -> Result<Scenario> {
    let report = validate_scenario(&raw);
    if !report.is_empty() {
        return Err(Error::InvalidScenario(report));
    }

    // Stop table in first-appearance order.
    let mut stops: Vec<String> = Vec::new();
    let mut stop_index: HashMap<String, usize> = HashMap::new();
    for line in &raw.lines {
        for stop in &line.stops {
            if !stop_index.contains_key(stop) {
                stop_index.insert(stop.clone(), stops.len());
                stops.push(stop.clone());
            }
        }
    }

    let lines: Vec<TransitLine> = raw
        .lines
        .iter()
        .map(|l| TransitLine {
            id: l.id.clone(),
            kind: l.kind,
            stops: l.stops.iter().map(|s| stop_index[s]).collect(),
            segment_times: l.segment_times.clone(),
            capacity: l.capacity,
            cost_per_departure: l.cost_per_departure,
            fare: l.fare.unwrap_or(raw.fares.transit_flat),
        })
        .collect();

    let amod_speed = raw.choice.utility.amod_speed;
    let stations: Vec<StationRegion> = raw
        .stations
        .iter()
        .map(|s| {
            StationRegion::new(
                s.station_id.clone(),
                s.area,
                s.shape_coeff,
                s.coord,
                amod_speed,
            )
        })
        .collect();

    let commutes: Vec<Commute> = raw
        .commutes
        .iter()
        .map(|c| Commute {
            id: c.id.clone(),
            kind: c.kind,
            demand: c.demand.clone(),
            origin: c.origin,
            dest: c.dest,
        })
        .collect();

    let line_index: HashMap<&str, usize> = raw
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| (l.id.as_str(), i))
        .collect();
    let station_index: HashMap<&str, usize> = raw
        .stations
        .iter()
        .enumerate()
        .map(|(i, s)| (s.station_id.as_str(), i))
        .collect();
    let commute_index: HashMap<&str, usize> = raw
        .commutes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();

    let speed_km_min = raw.choice.utility.amod_speed_km_min();
    let mut routes: Vec<CommuteRoute> = Vec::with_capacity(raw.routes.len());
    // Legs naming a shared trip, patched once the trip table is built.
    let mut pending_shared: Vec<(usize, usize, String)> = Vec::new();
    for (r, route) in raw.routes.iter().enumerate() {
        let commute = commute_index[route.commute.as_str()];
        let mut legs = Vec::with_capacity(route.legs.len());
        for (j, leg) in route.legs.iter().enumerate() {
            let (mode, travel_default) = match &leg.mode {
                RawLegMode::Transit {
                    line,
                    board_stop,
                    alight_stop,
                } => {
                    let l = line_index[line.as_str()];
                    let board = stop_index[board_stop];
                    let alight = stop_index[alight_stop];
                    let bpos = lines[l].stop_position(board).expect("validated");
                    let apos = lines[l].stop_position(alight).expect("validated");
                    (
                        LegMode::Transit {
                            line: l,
                            board_stop: board,
                            alight_stop: alight,
                        },
                        lines[l].ride_minutes(bpos, apos),
                    )
                }
                RawLegMode::Amod { station } => {
                    let s = station_index[station.as_str()];
                    let d = leg.distance_km.unwrap_or(0.0);
                    (
                        LegMode::Amod {
                            station: s,
                            shared_trip: None,
                        },
                        d / speed_km_min,
                    )
                }
            };
            if let Some(trip) = &leg.shared_trip {
                pending_shared.push((r, j, trip.clone()));
            }
            legs.push(Leg {
                mode,
                distance_km: leg.distance_km.unwrap_or(0.0),
                travel_min: leg.travel_min.unwrap_or(travel_default),
                vehicle_discount: leg.vehicle_discount.unwrap_or(1.0),
            });
        }
        routes.push(CommuteRoute {
            id: route.id.clone(),
            commute,
            legs,
            walk_min: route.walk_min,
            mode_class: route.mode_class,
        });
    }

    let route_index: HashMap<&str, usize> = raw
        .routes
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), i))
        .collect();
    let shared_trips: Vec<SharedTrip> = raw
        .shared_trips
        .iter()
        .map(|trip| SharedTrip {
            id: trip.id.clone(),
            members: trip
                .members
                .iter()
                .map(|m| LegRef {
                    route: route_index[m.route.as_str()],
                    leg: m.leg,
                })
                .collect(),
        })
        .collect();
    let trip_index: HashMap<&str, usize> = raw
        .shared_trips
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), i))
        .collect();
    for (r, j, trip_id) in pending_shared {
        let trip = trip_index[trip_id.as_str()];
        let n = shared_trips[trip].members.len() as f64;
        let leg = &mut routes[r].legs[j];
        if let LegMode::Amod { shared_trip, .. } = &mut leg.mode {
            *shared_trip = Some(trip);
        }
        if raw.routes[r].legs[j].vehicle_discount.is_none() {
            leg.vehicle_discount = 1.0 / n;
        }
    }

    let mut routes_of = vec![Vec::new(); commutes.len()];
    let mut route_local = Vec::with_capacity(routes.len());
    for (r, route) in routes.iter().enumerate() {
        route_local.push(routes_of[route.commute].len());
        routes_of[route.commute].push(r);
    }

    let grid = build_grid(&raw.grid);
    let mut scenario = Scenario {
        grid,
        stops,
        lines,
        stations,
        commutes,
        routes,
        routes_of,
        route_local,
        shared_trips,
        budgets: raw.budgets,
        fares: raw.fares,
        utility: raw.choice.utility,
        choice: raw.choice.model,
        algorithm: raw.algorithm,
    };
    if let Some(config) = raw.sharing {
        expand_sharing(&mut scenario, &config);
    }
    Ok(scenario)
}

fn build_grid(raw: &RawGrid) -> TimeGrid {
    TimeGrid {
        t_start_min: parse_clock(&raw.t_start).expect("validated"),
        t_end_min: parse_clock(&raw.t_end).expect("validated"),
        intervals: raw.intervals,
        delta_min: raw.delta_t,
    }
}

/// Canonical serialization of a built scenario. Generated shared-trip
/// variants are emitted as explicit routes and trips (no `sharing`
/// section), so reloading reproduces the scenario exactly.
pub fn scenario_to_raw(scenario: &Scenario) -> RawScenario {
    let stop_name = |idx: usize| scenario.stops[idx].clone();
    RawScenario {
        grid: RawGrid {
            t_start: format_clock(scenario.grid.t_start_min),
            t_end: format_clock(scenario.grid.t_end_min),
            intervals: scenario.grid.intervals,
            delta_t: scenario.grid.delta_min,
        },
        lines: scenario
            .lines
            .iter()
            .map(|l| RawLine {
                id: l.id.clone(),
                kind: l.kind,
                stops: l.stops.iter().map(|&s| stop_name(s)).collect(),
                segment_times: l.segment_times.clone(),
                capacity: l.capacity,
                cost_per_departure: l.cost_per_departure,
                fare: Some(l.fare),
            })
            .collect(),
        stations: scenario
            .stations
            .iter()
            .map(|s| raw::RawStation {
                station_id: s.id.clone(),
                area: s.area_km2,
                shape_coeff: s.shape_coeff,
                coord: s.coord,
            })
            .collect(),
        commutes: scenario
            .commutes
            .iter()
            .map(|c| RawCommute {
                id: c.id.clone(),
                kind: c.kind,
                demand: c.demand.clone(),
                origin: c.origin,
                dest: c.dest,
            })
            .collect(),
        routes: scenario
            .routes
            .iter()
            .map(|r| RawRoute {
                id: r.id.clone(),
                commute: scenario.commutes[r.commute].id.clone(),
                mode_class: r.mode_class,
                walk_min: r.walk_min,
                legs: r
                    .legs
                    .iter()
                    .map(|leg| RawLeg {
                        mode: match leg.mode {
                            LegMode::Transit {
                                line,
                                board_stop,
                                alight_stop,
                            } => RawLegMode::Transit {
                                line: scenario.lines[line].id.clone(),
                                board_stop: stop_name(board_stop),
                                alight_stop: stop_name(alight_stop),
                            },
                            LegMode::Amod { station, .. } => RawLegMode::Amod {
                                station: scenario.stations[station].id.clone(),
                            },
                        },
                        distance_km: Some(leg.distance_km),
                        travel_min: Some(leg.travel_min),
                        shared_trip: match leg.mode {
                            LegMode::Amod {
                                shared_trip: Some(p),
                                ..
                            } => Some(scenario.shared_trips[p].id.clone()),
                            _ => None,
                        },
                        vehicle_discount: Some(leg.vehicle_discount),
                    })
                    .collect(),
            })
            .collect(),
        shared_trips: scenario
            .shared_trips
            .iter()
            .map(|t| RawSharedTrip {
                id: t.id.clone(),
                members: t
                    .members
                    .iter()
                    .map(|m| raw::RawLegRef {
                        route: scenario.routes[m.route].id.clone(),
                        leg: m.leg,
                    })
                    .collect(),
            })
            .collect(),
        budgets: scenario.budgets.clone(),
        fares: scenario.fares.clone(),
        choice: raw::RawChoice {
            model: scenario.choice.clone(),
            utility: scenario.utility.clone(),
        },
        algorithm: scenario.algorithm.clone(),
        sharing: None,
        demand_seed: None,
        demand_csv: None,
    }
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let raw = scenario_to_raw(scenario);
    let text = serde_json::to_string_pretty(&raw)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
