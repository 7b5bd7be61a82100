//! Unit conversions. Canonical internal units are minutes (time),
//! kilometers (distance) and dollars (money); speeds arrive in mph and
//! distance fare rates in dollars per mile.

/// Kilometers per mile.
pub const KM_PER_MILE: f64 = 1.609344;

/// Converts a speed in miles per hour to kilometers per minute.
pub fn mph_to_km_per_min(mph: f64) -> f64 {
    mph * KM_PER_MILE / 60.0
}

/// Converts kilometers to miles.
pub fn km_to_miles(km: f64) -> f64 {
    km / KM_PER_MILE
}

/// Converts a marginal utility in dollars per hour to dollars per minute.
pub fn per_hour_to_per_min(dollars_per_hour: f64) -> f64 {
    dollars_per_hour / 60.0
}

/// Parses a clock time `HH:MM` into minutes from midnight.
pub fn parse_clock(s: &str) -> Option<u32> {
    let (h, m) = s.split_once(':')?;
    let h: u32 = h.trim().parse().ok()?;
    let m: u32 = m.trim().parse().ok()?;
    if h > 47 || m > 59 {
        return None;
    }
    Some(h * 60 + m)
}

/// Formats minutes from midnight as `HH:MM`.
pub fn format_clock(minutes: u32) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_round_trip() {
        assert_eq!(parse_clock("06:00"), Some(360));
        assert_eq!(parse_clock("10:05"), Some(605));
        assert_eq!(format_clock(605), "10:05");
        assert_eq!(parse_clock("6:0"), Some(360));
        assert_eq!(parse_clock("99:00"), None);
        assert_eq!(parse_clock("0600"), None);
    }

    #[test]
    fn mph_conversion() {
        // 20 mph = 32.18688 km/h
        let v = mph_to_km_per_min(20.0);
        assert!((v * 60.0 - 32.18688).abs() < 1e-12);
    }

    #[test]
    fn mile_round_trip_is_exact_for_doubles() {
        // 2 miles expressed in km and converted back must be exactly 2.0,
        // so fares quoted per mile stay exact to the cent.
        let km = 2.0 * KM_PER_MILE;
        assert_eq!(km_to_miles(km), 2.0);
    }
}
