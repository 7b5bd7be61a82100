//! Network, demand and route domain model.
//!
//! A [`Scenario`] is immutable after construction and safe to share
//! read-only across parallel workers. String identifiers appear only at
//! the boundary; internally everything is indexed by position in the
//! scenario tables.

mod feasible;
mod legsets;
mod sharing;
mod validate;

pub use feasible::{check_design_feasibility, round_allocation, DesignPoint, FEASIBILITY_EPS};
pub use legsets::{classify_legs, LegIndex, StopSets};
pub use sharing::{expand_sharing, generate_sharing_scenarios, SharingConfig};
pub use validate::{validate_scenario, ValidationReport, Violation};

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceModelSpec, FareSchedule, UtilityParams};
use crate::optim::OptimizerParams;
use crate::units::mph_to_km_per_min;

/// The planning horizon divided into `intervals` identical intervals of
/// `delta_min` minutes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Start of the planning period, minutes from midnight.
    pub t_start_min: u32,
    /// End of the planning period, minutes from midnight.
    pub t_end_min: u32,
    /// Number of time intervals.
    pub intervals: usize,
    /// Length of each interval in minutes.
    pub delta_min: f64,
}

impl TimeGrid {
    /// Number of whole intervals a trip of `travel_min` minutes spans;
    /// boarding at interval `t` makes the passenger available downstream
    /// at `t + shift`.
    pub fn arrival_shift(&self, travel_min: f64) -> usize {
        if travel_min <= 0.0 {
            0
        } else {
            (travel_min / self.delta_min).ceil() as usize
        }
    }

    /// Horizon length in hours.
    pub fn horizon_hours(&self) -> f64 {
        f64::from(self.t_end_min - self.t_start_min) / 60.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Rail,
    Bus,
}

/// A transit line: an ordered sequence of stops with fixed inter-stop
/// travel times, a per-vehicle capacity, a per-departure budget cost and
/// a flat fare.
#[derive(Clone, Debug)]
pub struct TransitLine {
    pub id: String,
    pub kind: LineKind,
    /// Ordered stop indices into [`Scenario::stops`].
    pub stops: Vec<usize>,
    /// Minutes between consecutive stops; `len == stops.len() - 1`.
    pub segment_times: Vec<f64>,
    /// Passengers per vehicle.
    pub capacity: f64,
    /// Budget units consumed per departure.
    pub cost_per_departure: f64,
    /// Flat fare in dollars.
    pub fare: f64,
}

impl TransitLine {
    /// Position of a stop on this line, if present.
    pub fn stop_position(&self, stop: usize) -> Option<usize> {
        self.stops.iter().position(|&s| s == stop)
    }

    /// In-line travel time in minutes from stop position `from` to `to`.
    pub fn ride_minutes(&self, from_pos: usize, to_pos: usize) -> f64 {
        self.segment_times[from_pos..to_pos].iter().sum()
    }
}

/// The AMoD service region around one rail station, with the derived mean
/// local-trip distance and duration used by the vehicle availability model.
#[derive(Clone, Debug)]
pub struct StationRegion {
    pub id: String,
    /// Region area in square kilometers.
    pub area_km2: f64,
    /// Dimensionless shape coefficient for the mean local-trip distance.
    pub shape_coeff: f64,
    /// Optional planar coordinate (km) used only for shared-trip pairing.
    pub coord: Option<[f64; 2]>,
    /// Derived mean local trip distance, `shape_coeff * sqrt(area)` km.
    pub mean_trip_km: f64,
    /// Derived mean local trip duration in minutes at the fleet speed.
    pub mean_trip_min: f64,
}

impl StationRegion {
    pub fn new(
        id: String,
        area_km2: f64,
        shape_coeff: f64,
        coord: Option<[f64; 2]>,
        amod_speed_mph: f64,
    ) -> Self {
        let mean_trip_km = shape_coeff * area_km2.sqrt();
        let speed_km_min = mph_to_km_per_min(amod_speed_mph);
        let mean_trip_min = mean_trip_km / speed_km_min;
        StationRegion {
            id,
            area_km2,
            shape_coeff,
            coord,
            mean_trip_km,
            mean_trip_min,
        }
    }

    /// Expected fraction of an interval each vehicle in the region is
    /// free: `delta_min / mean_trip_min`.
    pub fn availability_rate(&self, delta_min: f64) -> f64 {
        delta_min / self.mean_trip_min
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommuteKind {
    Local,
    Downtown,
}

/// An origin-destination pair with per-interval demand.
#[derive(Clone, Debug)]
pub struct Commute {
    pub id: String,
    pub kind: CommuteKind,
    /// Commuters arriving per interval; `len == grid.intervals`.
    pub demand: Vec<f64>,
    /// Optional planar coordinates (km) used only for shared-trip pairing.
    pub origin: Option<[f64; 2]>,
    pub dest: Option<[f64; 2]>,
}

impl Commute {
    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }
}

/// What serves one leg of a commute route.
#[derive(Clone, Debug, PartialEq)]
pub enum LegMode {
    Transit {
        /// Index into [`Scenario::lines`].
        line: usize,
        /// Boarding stop index into [`Scenario::stops`]; must be on the line.
        board_stop: usize,
        /// Alighting stop index; must be strictly after `board_stop`.
        alight_stop: usize,
    },
    Amod {
        /// Index into [`Scenario::stations`]: the region the trip draws a
        /// vehicle from.
        station: usize,
        /// Index into [`Scenario::shared_trips`] when this leg is one
        /// party of a shared trip.
        shared_trip: Option<usize>,
    },
}

/// One stage of a commute route served by a single transit line or a
/// single AMoD trip.
#[derive(Clone, Debug)]
pub struct Leg {
    pub mode: LegMode,
    pub distance_km: f64,
    pub travel_min: f64,
    /// Vehicle discount factor: 1 for a non-shared trip, 1/n for an n-way
    /// shared AMoD trip. Always 1 for transit legs.
    pub vehicle_discount: f64,
}

impl Leg {
    pub fn is_transit(&self) -> bool {
        matches!(self.mode, LegMode::Transit { .. })
    }

    pub fn is_amod(&self) -> bool {
        matches!(self.mode, LegMode::Amod { .. })
    }
}

/// Mode composition of a route: transit-only (P), AMoD-only (A) or
/// mixed (PA). Nests of the nested-logit model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeClass {
    #[serde(rename = "P")]
    TransitOnly,
    #[serde(rename = "A")]
    AmodOnly,
    #[serde(rename = "PA")]
    Mixed,
}

/// One mode-and-path alternative for a commute, composed of ordered legs.
#[derive(Clone, Debug)]
pub struct CommuteRoute {
    pub id: String,
    /// Index into [`Scenario::commutes`].
    pub commute: usize,
    pub legs: Vec<Leg>,
    /// Total walking time of the route in minutes.
    pub walk_min: f64,
    pub mode_class: ModeClass,
}

/// Reference to a leg of a route, both as global indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LegRef {
    pub route: usize,
    pub leg: usize,
}

/// One AMoD vehicle serving the coincident first/last-mile legs of
/// several commutes.
#[derive(Clone, Debug)]
pub struct SharedTrip {
    pub id: String,
    /// One member leg per participating commute.
    pub members: Vec<LegRef>,
}

impl SharedTrip {
    pub fn n_parties(&self) -> usize {
        self.members.len()
    }
}

/// Service budgets and fleet limit defining the feasible design sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    /// Total bus departures budget over the horizon, in cost units.
    #[serde(rename = "B_bus")]
    pub bus_total: f64,
    /// Total rail departures budget over the horizon, in cost units.
    #[serde(rename = "B_rail")]
    pub rail_total: f64,
    /// Per-interval lower bound on each rail line's departure rate.
    #[serde(rename = "lb_rail")]
    pub rail_lb: f64,
    /// Per-interval upper bound on each rail line's departure rate.
    #[serde(rename = "ub_rail")]
    pub rail_ub: f64,
    /// Per-interval upper bound on each bus line's departure rate.
    #[serde(rename = "ub_bus")]
    pub bus_ub: f64,
    /// Maximum AMoD fleet size across all station regions per interval.
    #[serde(rename = "N_bar")]
    pub max_vehicles: f64,
}

/// A fully cross-referenced, validated problem instance.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub grid: TimeGrid,
    /// Stop identifier table; lines and legs index into it.
    pub stops: Vec<String>,
    pub lines: Vec<TransitLine>,
    pub stations: Vec<StationRegion>,
    pub commutes: Vec<Commute>,
    /// Global route table.
    pub routes: Vec<CommuteRoute>,
    /// Routes of each commute, in input order.
    pub routes_of: Vec<Vec<usize>>,
    /// Position of each route within its commute's route list.
    pub route_local: Vec<usize>,
    pub shared_trips: Vec<SharedTrip>,
    pub budgets: Budgets,
    pub fares: FareSchedule,
    pub utility: UtilityParams,
    pub choice: ChoiceModelSpec,
    pub algorithm: OptimizerParams,
}

impl Scenario {
    pub fn intervals(&self) -> usize {
        self.grid.intervals
    }

    pub fn total_demand(&self) -> f64 {
        self.commutes.iter().map(Commute::total_demand).sum()
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.id == id)
    }

    pub fn station_index(&self, id: &str) -> Option<usize> {
        self.stations.iter().position(|s| s.id == id)
    }

    pub fn commute_index(&self, id: &str) -> Option<usize> {
        self.commutes.iter().position(|c| c.id == id)
    }

    pub fn route_index(&self, id: &str) -> Option<usize> {
        self.routes.iter().position(|r| r.id == id)
    }

    pub fn rail_lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == LineKind::Rail)
            .map(|(i, _)| i)
    }

    pub fn bus_lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == LineKind::Bus)
            .map(|(i, _)| i)
    }

    /// Sum of per-interval demand over all commutes of a kind.
    pub fn demand_of_kind(&self, kind: CommuteKind) -> f64 {
        self.commutes
            .iter()
            .filter(|c| c.kind == kind)
            .map(Commute::total_demand)
            .sum()
    }
}
