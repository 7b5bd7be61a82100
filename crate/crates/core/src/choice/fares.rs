use crate::model::{CommuteRoute, LegMode, Scenario};
use crate::units::km_to_miles;

use super::FareSchedule;

/// TNC-style AMoD fare for a trip of `d_km` kilometers and `tau_min`
/// minutes: base + booking + distance rate + time rate, floored at the
/// minimum fare.
pub fn amod_fare(fares: &FareSchedule, d_km: f64, tau_min: f64) -> f64 {
    let raw = fares.f_base + fares.f_book + fares.pi_d * km_to_miles(d_km) + fares.pi_t * tau_min;
    raw.max(fares.f_min)
}

/// Total price of a route in dollars at AMoD discount `lambda`.
///
/// A route without AMoD legs pays the full flat fare of its first transit
/// line and the discounted fare on every later transit leg. A route with
/// AMoD legs pays the discounted transfer fare on all of its transit legs
/// plus `lambda` times the AMoD fare of each AMoD leg.
pub fn route_price(scenario: &Scenario, route: &CommuteRoute, lambda: f64) -> f64 {
    let fares = &scenario.fares;
    let has_amod = route.legs.iter().any(|l| l.is_amod());
    let mut price = 0.0;
    let mut first_transit = true;
    for leg in &route.legs {
        match leg.mode {
            LegMode::Transit { line, .. } => {
                let fare = scenario.lines[line].fare;
                if first_transit && !has_amod {
                    price += fare;
                } else {
                    price += fares.transfer_discount * fare;
                }
                first_transit = false;
            }
            LegMode::Amod { .. } => {
                price += lambda * amod_fare(fares, leg.distance_km, leg.travel_min);
            }
        }
    }
    price
}

/// Sum of undiscounted AMoD fares over the AMoD legs of a route; the
/// route price is linear in `lambda` with this slope.
pub fn amod_fare_sum(fares: &FareSchedule, route: &CommuteRoute) -> f64 {
    route
        .legs
        .iter()
        .filter(|l| l.is_amod())
        .map(|l| amod_fare(fares, l.distance_km, l.travel_min))
        .sum()
}
