use crate::error::Result;
use crate::model::{DesignPoint, Scenario};

use super::logit::{choice_gradient, CommuteGradient};
use super::DesignVar;

/// First-order expansion of the choice probabilities around an anchor
/// design: `theta_hat = theta(anchor) + grad(anchor) . (design - anchor)`.
/// Coefficients are stored per (commute, t) over the variables touched by
/// that commute's available routes.
#[derive(Clone, Debug)]
pub struct ThetaLinearization {
    pub anchor: DesignPoint,
    /// Indexed `[commute][t]`.
    pub terms: Vec<Vec<CommuteGradient>>,
}

/// Builds the affine choice map around a feasible anchor design.
pub fn linearize_theta(scenario: &Scenario, anchor: &DesignPoint) -> Result<ThetaLinearization> {
    let t_count = scenario.intervals();
    let mut terms = Vec::with_capacity(scenario.commutes.len());
    for c in 0..scenario.commutes.len() {
        let mut per_t = Vec::with_capacity(t_count);
        for t in 0..t_count {
            per_t.push(choice_gradient(scenario, anchor, c, t)?);
        }
        terms.push(per_t);
    }
    Ok(ThetaLinearization {
        anchor: anchor.clone(),
        terms,
    })
}

impl ThetaLinearization {
    /// Value of a design variable in a design point.
    fn var_value(design: &DesignPoint, var: DesignVar) -> f64 {
        match var {
            DesignVar::X { line, t } => design.x.get(t, line),
            DesignVar::N { station, t } => design.n.get(t, station),
            DesignVar::Lambda => design.lambda,
        }
    }

    /// Evaluates `theta_hat` for one (commute, local route, interval) at a
    /// displaced design. The affine map is not clipped to `[0, 1]`.
    pub fn theta_hat(
        &self,
        commute: usize,
        route_local: usize,
        t: usize,
        design: &DesignPoint,
    ) -> f64 {
        let term = &self.terms[commute][t];
        let mut value = term.theta[route_local];
        for (v, &var) in term.vars.iter().enumerate() {
            let delta = Self::var_value(design, var) - Self::var_value(&self.anchor, var);
            value += term.rows[route_local][v] * delta;
        }
        value
    }

    /// Probability at the anchor itself.
    pub fn theta_at_anchor(&self, commute: usize, route_local: usize, t: usize) -> f64 {
        self.terms[commute][t].theta[route_local]
    }
}
