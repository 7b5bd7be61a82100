//! Fares, route utilities, choice probabilities and their design
//! gradients.
//!
//! Utilities are systematic (no noise draw); probabilities come from a
//! multinomial logit or a two-level nested logit over the mode classes
//! P / A / PA. All functions here are pure in the scenario and design.

mod fares;
mod linearize;
mod logit;
mod utility;

pub use fares::{amod_fare, route_price};
pub use linearize::{linearize_theta, ThetaLinearization};
pub use logit::{choice_gradient, choice_probs_mnl, choice_probs_nested, evaluate_choices};
pub use utility::{route_availability, route_utility, CommuteChoiceSet, UNAVAILABLE};

use serde::{Deserialize, Serialize};

use crate::units::{mph_to_km_per_min, per_hour_to_per_min};

/// Fare parameters: flat transit fares with a transfer discount, plus a
/// TNC-style AMoD fare with a discount factor bounded to
/// `[lambda_min, lambda_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FareSchedule {
    /// Default flat fare for transit lines that do not set one, dollars.
    pub transit_flat: f64,
    /// Discount factor applied to transit legs after the first, in `[0,1]`.
    pub transfer_discount: f64,
    /// AMoD base fare, dollars.
    pub f_base: f64,
    /// AMoD booking fee, dollars.
    pub f_book: f64,
    /// AMoD minimum fare, dollars.
    pub f_min: f64,
    /// AMoD distance rate, dollars per mile.
    pub pi_d: f64,
    /// AMoD time rate, dollars per minute.
    pub pi_t: f64,
    /// AMoD discount factor bounds.
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Marginal utilities and speeds for the route utility function. Values
/// are stored in their input units (dollars/hour, mph) and converted at
/// the point of use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityParams {
    /// Marginal utility of time in transit vehicles, dollars per hour.
    /// Also applies to walking and waiting.
    pub beta_time_transit: f64,
    /// Marginal utility of time in AMoD vehicles, dollars per hour.
    pub beta_time_amod: f64,
    /// Marginal utility of money.
    pub beta_money: f64,
    /// Average walking speed, mph.
    pub walk_speed: f64,
    /// Average AMoD vehicle speed, mph.
    pub amod_speed: f64,
}

impl UtilityParams {
    pub fn beta_transit_per_min(&self) -> f64 {
        per_hour_to_per_min(self.beta_time_transit)
    }

    pub fn beta_amod_per_min(&self) -> f64 {
        per_hour_to_per_min(self.beta_time_amod)
    }

    pub fn amod_speed_km_min(&self) -> f64 {
        mph_to_km_per_min(self.amod_speed)
    }

    pub fn walk_speed_km_min(&self) -> f64 {
        mph_to_km_per_min(self.walk_speed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceKind {
    Mnl,
    NestedLogit,
}

fn one() -> f64 {
    1.0
}

/// Which choice model to use and its scale parameters. The nest scales
/// `phi_m` must each be at least the upper-level scale `phi` for the
/// nested model to be consistent with utility maximization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiceModelSpec {
    pub kind: ChoiceKind,
    #[serde(default = "one")]
    pub phi: f64,
    #[serde(default = "one", rename = "phi_P")]
    pub phi_p: f64,
    #[serde(default = "one", rename = "phi_A")]
    pub phi_a: f64,
    #[serde(default = "one", rename = "phi_PA")]
    pub phi_pa: f64,
}

impl ChoiceModelSpec {
    pub fn mnl() -> Self {
        ChoiceModelSpec {
            kind: ChoiceKind::Mnl,
            phi: 1.0,
            phi_p: 1.0,
            phi_a: 1.0,
            phi_pa: 1.0,
        }
    }

    pub fn nest_scale(&self, class: crate::model::ModeClass) -> f64 {
        match class {
            crate::model::ModeClass::TransitOnly => self.phi_p,
            crate::model::ModeClass::AmodOnly => self.phi_a,
            crate::model::ModeClass::Mixed => self.phi_pa,
        }
    }
}

/// A design variable touched by some route's utility: a line frequency,
/// a station allocation (both at a fixed interval), or the discount
/// factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DesignVar {
    X { line: usize, t: usize },
    N { station: usize, t: usize },
    Lambda,
}

/// Choice probabilities for every (commute, route, interval), with the
/// per-route systematic utilities kept alongside for reporting.
/// Routes that are unavailable at an interval carry probability zero and
/// utility `UNAVAILABLE`.
#[derive(Clone, Debug)]
pub struct ChoiceField {
    /// Indexed `[commute][local route index][t]`, where the local route
    /// index follows `scenario.routes_of[commute]`.
    pub theta: Vec<Vec<Vec<f64>>>,
    /// Same indexing; `UNAVAILABLE` marks routes out of the choice set.
    pub utility: Vec<Vec<Vec<f64>>>,
}

impl ChoiceField {
    /// Probability of route `route_local` (position within the commute's
    /// route list) at interval `t`.
    pub fn prob(&self, commute: usize, route_local: usize, t: usize) -> f64 {
        self.theta[commute][route_local][t]
    }
}
