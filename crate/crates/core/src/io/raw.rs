//! Serde schema for the scenario bundle: a JSON document with sections
//! `grid`, `lines[]`, `stations[]`, `commutes[]`, `routes[]`, `budgets`,
//! `fares`, `choice` and `algorithm`. References between sections are by
//! string id and resolved during building.

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceModelSpec, FareSchedule, UtilityParams};
use crate::model::{Budgets, CommuteKind, LineKind, ModeClass, SharingConfig};
use crate::optim::OptimizerParams;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawScenario {
    pub grid: RawGrid,
    pub lines: Vec<RawLine>,
    pub stations: Vec<RawStation>,
    pub commutes: Vec<RawCommute>,
    pub routes: Vec<RawRoute>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shared_trips: Vec<RawSharedTrip>,
    pub budgets: Budgets,
    pub fares: FareSchedule,
    pub choice: RawChoice,
    pub algorithm: OptimizerParams,
    /// When present, shared first/last-mile trips are generated at load
    /// time and the route set expanded accordingly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharing: Option<SharingConfig>,
    /// Demand regeneration parameters for sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand_seed: Option<DemandSeedSpec>,
    /// Optional external demand table (`commute_id,t,demand` CSV); when
    /// set, per-commute inline `demand` arrays may be omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand_csv: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawGrid {
    pub t_start: String,
    pub t_end: String,
    #[serde(rename = "T")]
    pub intervals: usize,
    pub delta_t: f64,
}

fn default_cost() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawLine {
    pub id: String,
    pub kind: LineKind,
    pub stops: Vec<String>,
    pub segment_times: Vec<f64>,
    pub capacity: f64,
    #[serde(default = "default_cost")]
    pub cost_per_departure: f64,
    /// Defaults to `fares.transit_flat`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fare: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawStation {
    pub station_id: String,
    /// Region area in square kilometers.
    pub area: f64,
    pub shape_coeff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawCommute {
    pub id: String,
    pub kind: CommuteKind,
    /// Commuters per interval; may be empty when `demand_csv` supplies it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub demand: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dest: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawRoute {
    pub id: String,
    pub commute: String,
    pub mode_class: ModeClass,
    #[serde(default)]
    pub walk_min: f64,
    pub legs: Vec<RawLeg>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawLeg {
    #[serde(flatten)]
    pub mode: RawLegMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_km: Option<f64>,
    /// Defaults to the in-line ride time for transit legs and to
    /// `distance_km / amod_speed` for AMoD legs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub travel_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shared_trip: Option<String>,
    /// Defaults to 1, or to `1/n` when the leg is a member of an n-party
    /// shared trip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle_discount: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RawLegMode {
    Transit {
        line: String,
        board_stop: String,
        alight_stop: String,
    },
    Amod {
        station: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSharedTrip {
    pub id: String,
    pub members: Vec<RawLegRef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawLegRef {
    pub route: String,
    pub leg: usize,
}

/// The `choice` section: model kind and scales plus utility parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawChoice {
    #[serde(flatten)]
    pub model: ChoiceModelSpec,
    #[serde(flatten)]
    pub utility: UtilityParams,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DemandSeedSpec {
    /// Total commuters over the horizon after regeneration.
    pub total: f64,
    /// Multiplicative uniform jitter half-width applied to seed weights;
    /// zero keeps regeneration fully deterministic in the seed matrices.
    #[serde(default)]
    pub jitter: f64,
}
