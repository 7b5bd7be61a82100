use crate::error::{Error, Result};

use super::{LegMode, LegRef, Scenario};

/// Boarding and occupancy sets at one stop of one line.
#[derive(Clone, Debug, Default)]
pub struct StopSets {
    /// Legs that board here as the first leg of their route.
    pub first_boardings: Vec<LegRef>,
    /// Legs with index >= 1 that transfer onto the line here; the inflow
    /// feeding them is the previous leg of the same route.
    pub transfers: Vec<LegRef>,
    /// Legs on board the vehicle as it departs this stop towards the next
    /// one: boarding at or before this stop and alighting strictly after.
    pub through: Vec<LegRef>,
}

impl StopSets {
    /// All legs boarding the line at this stop (first boardings plus
    /// transfers).
    pub fn boardings(&self) -> impl Iterator<Item = LegRef> + '_ {
        self.first_boardings
            .iter()
            .chain(self.transfers.iter())
            .copied()
    }
}

/// The leg-set classification driving every constraint of the boarding
/// LP: per (line, stop) boarding/occupancy sets, per station the direct /
/// first-mile / last-mile AMoD sets, and per route its transit and AMoD
/// leg positions.
#[derive(Clone, Debug)]
pub struct LegIndex {
    /// `[line][stop position]`.
    per_line_stop: Vec<Vec<StopSets>>,
    /// Direct AMoD routes (single-leg) drawing from each station region.
    pub direct: Vec<Vec<usize>>,
    /// First-mile routes (leading AMoD leg, more legs after) per station.
    pub first_mile: Vec<Vec<usize>>,
    /// Last-mile AMoD legs (index >= 1) per station.
    pub last_mile: Vec<Vec<LegRef>>,
    /// Transit leg positions per route.
    pub transit_legs: Vec<Vec<usize>>,
    /// AMoD leg positions per route.
    pub amod_legs: Vec<Vec<usize>>,
}

impl LegIndex {
    pub fn stop_sets(&self, line: usize, stop_pos: usize) -> &StopSets {
        &self.per_line_stop[line][stop_pos]
    }

    /// First legs of direct and first-mile routes at a station, as leg
    /// references.
    pub fn amod_first_legs(&self, station: usize) -> impl Iterator<Item = LegRef> + '_ {
        self.direct[station]
            .iter()
            .chain(self.first_mile[station].iter())
            .map(|&route| LegRef { route, leg: 0 })
    }

    /// Every AMoD leg drawing a vehicle from the station region: first
    /// legs of direct/first-mile routes and all last-mile legs.
    pub fn amod_leg_refs(&self, station: usize) -> impl Iterator<Item = LegRef> + '_ {
        self.amod_first_legs(station)
            .chain(self.last_mile[station].iter().copied())
    }
}

/// Classifies every commute-route leg into the boarding, transfer,
/// occupancy and AMoD service sets.
///
/// AMoD legs land in exactly one of direct / first-mile / last-mile by
/// position: a single-leg route is a direct trip, a leading leg followed
/// by others is a first-mile trip, and any later leg is a last-mile trip.
pub fn classify_legs(scenario: &Scenario) -> Result<LegIndex> {
    let mut per_line_stop: Vec<Vec<StopSets>> = scenario
        .lines
        .iter()
        .map(|l| vec![StopSets::default(); l.stops.len()])
        .collect();
    let mut direct = vec![Vec::new(); scenario.stations.len()];
    let mut first_mile = vec![Vec::new(); scenario.stations.len()];
    let mut last_mile = vec![Vec::new(); scenario.stations.len()];
    let mut transit_legs = vec![Vec::new(); scenario.routes.len()];
    let mut amod_legs = vec![Vec::new(); scenario.routes.len()];

    for (r, route) in scenario.routes.iter().enumerate() {
        for (j, leg) in route.legs.iter().enumerate() {
            let leg_ref = LegRef { route: r, leg: j };
            match leg.mode {
                LegMode::Transit {
                    line,
                    board_stop,
                    alight_stop,
                } => {
                    transit_legs[r].push(j);
                    let line_def = &scenario.lines[line];
                    let board =
                        line_def
                            .stop_position(board_stop)
                            .ok_or_else(|| Error::UnknownId {
                                kind: "stop",
                                id: scenario.stops[board_stop].clone(),
                                context: format!(
                                    " (route `{}` leg {j} boards a stop not on line `{}`)",
                                    route.id, line_def.id
                                ),
                            })?;
                    let alight =
                        line_def
                            .stop_position(alight_stop)
                            .ok_or_else(|| Error::UnknownId {
                                kind: "stop",
                                id: scenario.stops[alight_stop].clone(),
                                context: format!(
                                    " (route `{}` leg {j} alights a stop not on line `{}`)",
                                    route.id, line_def.id
                                ),
                            })?;
                    let sets = &mut per_line_stop[line];
                    if j == 0 {
                        sets[board].first_boardings.push(leg_ref);
                    } else {
                        sets[board].transfers.push(leg_ref);
                    }
                    for pos in board..alight {
                        sets[pos].through.push(leg_ref);
                    }
                }
                LegMode::Amod { station, .. } => {
                    amod_legs[r].push(j);
                    if j == 0 {
                        if route.legs.len() == 1 {
                            direct[station].push(r);
                        } else {
                            first_mile[station].push(r);
                        }
                    } else {
                        last_mile[station].push(leg_ref);
                    }
                }
            }
        }
    }

    Ok(LegIndex {
        per_line_stop,
        direct,
        first_mile,
        last_mile,
        transit_legs,
        amod_legs,
    })
}
