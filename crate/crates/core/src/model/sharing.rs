use serde::{Deserialize, Serialize};

use crate::units::mph_to_km_per_min;

use super::{LegMode, LegRef, Scenario, SharedTrip};

fn default_parties() -> usize {
    2
}

/// Pairing rules for shared first/last-mile AMoD trips.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharingConfig {
    /// Maximum extra pickup wait of the second party, seconds.
    pub delta_w: f64,
    /// Maximum in-vehicle delay of either party, seconds.
    pub delta_d: f64,
    /// Parties per vehicle; only 2 is supported.
    #[serde(default = "default_parties")]
    pub max_parties: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CandidateKind {
    FirstMile,
    LastMile,
}

struct Candidate {
    route: usize,
    leg: usize,
    kind: CandidateKind,
    /// Pickup point for first-mile legs, drop-off point for last-mile.
    endpoint: [f64; 2],
}

fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Finds the feasible two-party sharing pairs among the first-mile and
/// last-mile AMoD legs anchored at `station`, under straight-line routing
/// at the fleet speed. Exactly one pair is reported per unordered
/// candidate pair, and the relation is symmetric in the two parties.
pub fn generate_sharing_scenarios(
    scenario: &Scenario,
    station: usize,
    config: &SharingConfig,
) -> Vec<(LegRef, LegRef)> {
    let Some(station_coord) = scenario.stations[station].coord else {
        return Vec::new();
    };
    let speed = mph_to_km_per_min(scenario.utility.amod_speed);
    let minutes = |a, b| euclid(a, b) / speed;
    let delta_w_min = config.delta_w / 60.0;
    let delta_d_min = config.delta_d / 60.0;

    let mut candidates = Vec::new();
    for (r, route) in scenario.routes.iter().enumerate() {
        for (j, leg) in route.legs.iter().enumerate() {
            let LegMode::Amod {
                station: leg_station,
                shared_trip,
            } = leg.mode
            else {
                continue;
            };
            // Already-shared variants are not paired again.
            if leg_station != station || shared_trip.is_some() {
                continue;
            }
            let commute = &scenario.commutes[route.commute];
            let is_first_mile = j == 0 && route.legs.len() > 1;
            let is_last_mile = j >= 1;
            if is_first_mile {
                if let Some(origin) = commute.origin {
                    candidates.push(Candidate {
                        route: r,
                        leg: j,
                        kind: CandidateKind::FirstMile,
                        endpoint: origin,
                    });
                }
            } else if is_last_mile {
                if let Some(dest) = commute.dest {
                    candidates.push(Candidate {
                        route: r,
                        leg: j,
                        kind: CandidateKind::LastMile,
                        endpoint: dest,
                    });
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for i in 0..candidates.len() {
        for k in i + 1..candidates.len() {
            let (a, b) = (&candidates[i], &candidates[k]);
            if a.kind != b.kind {
                continue;
            }
            if scenario.routes[a.route].commute == scenario.routes[b.route].commute {
                continue;
            }
            let feasible = match a.kind {
                CandidateKind::FirstMile => {
                    // Pickup order p then q: the second party waits the
                    // inter-origin hop; the first party rides the detour.
                    let order_ok = |p: &Candidate, q: &Candidate| {
                        let hop = minutes(p.endpoint, q.endpoint);
                        let detour = hop + minutes(q.endpoint, station_coord)
                            - minutes(p.endpoint, station_coord);
                        hop <= delta_w_min && detour <= delta_d_min
                    };
                    order_ok(a, b) || order_ok(b, a)
                }
                CandidateKind::LastMile => {
                    // Both parties board at the station; the later drop
                    // rides the detour through the earlier one.
                    let order_ok = |p: &Candidate, q: &Candidate| {
                        let detour = minutes(station_coord, p.endpoint)
                            + minutes(p.endpoint, q.endpoint)
                            - minutes(station_coord, q.endpoint);
                        detour <= delta_d_min
                    };
                    order_ok(a, b) || order_ok(b, a)
                }
            };
            if feasible {
                pairs.push((
                    LegRef {
                        route: a.route,
                        leg: a.leg,
                    },
                    LegRef {
                        route: b.route,
                        leg: b.leg,
                    },
                ));
            }
        }
    }
    pairs
}

/// Expands the scenario with shared-trip variants: for every feasible
/// pair at every station, a [`SharedTrip`] is added and each affected
/// route is duplicated with the shared leg carrying a vehicle discount of
/// one half. The duplicates keep the itinerary of the originals.
pub fn expand_sharing(scenario: &mut Scenario, config: &SharingConfig) {
    assert_eq!(config.max_parties, 2, "only two-party sharing is supported");
    let mut all_pairs = Vec::new();
    for station in 0..scenario.stations.len() {
        all_pairs.extend(generate_sharing_scenarios(scenario, station, config));
    }

    for (a, b) in all_pairs {
        let trip_index = scenario.shared_trips.len();
        let trip_id = format!(
            "shared:{}+{}",
            scenario.routes[a.route].id, scenario.routes[b.route].id
        );
        let mut members = Vec::new();
        for leg_ref in [a, b] {
            let mut variant = scenario.routes[leg_ref.route].clone();
            variant.id = format!("{}#p{}", variant.id, trip_index);
            let leg = &mut variant.legs[leg_ref.leg];
            leg.vehicle_discount = 0.5;
            let LegMode::Amod { shared_trip, .. } = &mut leg.mode else {
                unreachable!("sharing candidates are AMoD legs");
            };
            *shared_trip = Some(trip_index);

            let new_route = scenario.routes.len();
            scenario.routes_of[variant.commute].push(new_route);
            scenario
                .route_local
                .push(scenario.routes_of[variant.commute].len() - 1);
            scenario.routes.push(variant);
            members.push(LegRef {
                route: new_route,
                leg: leg_ref.leg,
            });
        }
        scenario.shared_trips.push(SharedTrip {
            id: trip_id,
            members,
        });
    }
}
