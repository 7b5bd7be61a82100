use crate::error::{Error, Result};
use crate::model::{DesignPoint, LegMode, ModeClass, Scenario};

use super::fares::amod_fare_sum;
use super::utility::{CommuteChoiceSet, UNAVAILABLE};
use super::{ChoiceField, ChoiceKind, ChoiceModelSpec, DesignVar};

/// Numerically stable log-sum-exp.
fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Softmax over a slice, stable under large negative utilities.
fn softmax(utilities: &[f64]) -> Vec<f64> {
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = utilities.iter().map(|&u| (u - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Multinomial logit probabilities over a choice set. Entries equal to
/// [`UNAVAILABLE`] are excluded and get probability zero; errors if no
/// route is available.
pub fn choice_probs_mnl(utilities: &[f64]) -> Result<Vec<f64>> {
    let available: Vec<usize> = (0..utilities.len())
        .filter(|&i| utilities[i] != UNAVAILABLE)
        .collect();
    if available.is_empty() {
        return Err(Error::NoAvailableRoute {
            commute: "<choice set>".into(),
            t: 0,
        });
    }
    let sub: Vec<f64> = available.iter().map(|&i| utilities[i]).collect();
    let probs = softmax(&sub);
    let mut out = vec![0.0; utilities.len()];
    for (k, &i) in available.iter().enumerate() {
        out[i] = probs[k];
    }
    Ok(out)
}

/// Nested logit probabilities: a within-nest softmax at the nest scale
/// times an across-nest softmax of the scaled logsums. Empty nests are
/// excluded from the upper level.
pub fn choice_probs_nested(
    utilities: &[f64],
    classes: &[ModeClass],
    spec: &ChoiceModelSpec,
) -> Result<Vec<f64>> {
    assert_eq!(utilities.len(), classes.len());
    let nests = [
        ModeClass::TransitOnly,
        ModeClass::AmodOnly,
        ModeClass::Mixed,
    ];
    let mut out = vec![0.0; utilities.len()];

    // Per nonempty nest: member indices, within-nest probs, logsum I_m.
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut within: Vec<Vec<f64>> = Vec::new();
    let mut logsums: Vec<f64> = Vec::new();
    for &nest in &nests {
        let idx: Vec<usize> = (0..utilities.len())
            .filter(|&i| classes[i] == nest && utilities[i] != UNAVAILABLE)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let phi_m = spec.nest_scale(nest);
        let scaled: Vec<f64> = idx.iter().map(|&i| phi_m * utilities[i]).collect();
        logsums.push(log_sum_exp(scaled.iter().copied()) / phi_m);
        within.push(softmax(&scaled));
        members.push(idx);
    }
    if members.is_empty() {
        return Err(Error::NoAvailableRoute {
            commute: "<choice set>".into(),
            t: 0,
        });
    }

    let upper_utilities: Vec<f64> = logsums.iter().map(|&i_m| spec.phi * i_m).collect();
    let upper = softmax(&upper_utilities);
    for (m, idx) in members.iter().enumerate() {
        for (k, &i) in idx.iter().enumerate() {
            out[i] = within[m][k] * upper[m];
        }
    }
    Ok(out)
}

/// Probabilities over the available routes of one commute at one
/// interval, dispatching on the scenario's choice model.
fn choice_probs_for_set(scenario: &Scenario, set: &CommuteChoiceSet) -> Result<Vec<f64>> {
    match scenario.choice.kind {
        ChoiceKind::Mnl => choice_probs_mnl(&set.utilities),
        ChoiceKind::NestedLogit => {
            let classes: Vec<ModeClass> = set
                .available
                .iter()
                .map(|&local| {
                    let route = scenario.routes_of[set.commute][local];
                    scenario.routes[route].mode_class
                })
                .collect();
            choice_probs_nested(&set.utilities, &classes, &scenario.choice)
        }
    }
}

/// Evaluates the full choice field (probabilities and utilities per
/// commute, route and interval) at a design.
pub fn evaluate_choices(scenario: &Scenario, design: &DesignPoint) -> Result<ChoiceField> {
    let t_count = scenario.intervals();
    let mut theta = Vec::with_capacity(scenario.commutes.len());
    let mut utility = Vec::with_capacity(scenario.commutes.len());
    for c in 0..scenario.commutes.len() {
        let n_routes = scenario.routes_of[c].len();
        let mut theta_c = vec![vec![0.0; t_count]; n_routes];
        let mut mu_c = vec![vec![UNAVAILABLE; t_count]; n_routes];
        for t in 0..t_count {
            let set = CommuteChoiceSet::build(scenario, c, design, t);
            if set.is_empty() {
                return Err(Error::NoAvailableRoute {
                    commute: scenario.commutes[c].id.clone(),
                    t,
                });
            }
            let probs = choice_probs_for_set(scenario, &set)?;
            for (k, &local) in set.available.iter().enumerate() {
                theta_c[local][t] = probs[k];
                mu_c[local][t] = set.utilities[k];
            }
        }
        theta.push(theta_c);
        utility.push(mu_c);
    }
    Ok(ChoiceField { theta, utility })
}

/// Probabilities, utilities and the sparse gradient of the probabilities
/// with respect to the design variables touched by one commute's
/// available routes at one interval.
#[derive(Clone, Debug)]
pub struct CommuteGradient {
    /// Sorted deduplicated variable pattern.
    pub vars: Vec<DesignVar>,
    /// Probability per local route; zero when unavailable.
    pub theta: Vec<f64>,
    /// Utility per local route; [`UNAVAILABLE`] when excluded.
    pub utilities: Vec<f64>,
    /// Gradient rows, one per local route, each of length `vars.len()`.
    /// Unavailable routes carry all-zero rows.
    pub rows: Vec<Vec<f64>>,
}

/// Exact analytic gradient of the choice probabilities of `commute` at
/// interval `t` with respect to the design variables its available routes
/// touch. Rows over all routes of the commute sum to zero componentwise.
pub fn choice_gradient(
    scenario: &Scenario,
    design: &DesignPoint,
    commute: usize,
    t: usize,
) -> Result<CommuteGradient> {
    let set = CommuteChoiceSet::build(scenario, commute, design, t);
    if set.is_empty() {
        return Err(Error::NoAvailableRoute {
            commute: scenario.commutes[commute].id.clone(),
            t,
        });
    }

    // Variable pattern over the available routes.
    let mut vars: Vec<DesignVar> = Vec::new();
    for &local in &set.available {
        let route = &scenario.routes[scenario.routes_of[commute][local]];
        for leg in &route.legs {
            match leg.mode {
                LegMode::Transit { line, .. } => vars.push(DesignVar::X { line, t }),
                LegMode::Amod { station, .. } => {
                    vars.push(DesignVar::N { station, t });
                    vars.push(DesignVar::Lambda);
                }
            }
        }
    }
    vars.sort_unstable();
    vars.dedup();

    // dmu[k][v]: derivative of available route k's utility w.r.t. vars[v].
    let beta_transit = scenario.utility.beta_transit_per_min();
    let beta_amod = scenario.utility.beta_amod_per_min();
    let delta = scenario.grid.delta_min;
    let mut dmu = vec![vec![0.0; vars.len()]; set.available.len()];
    for (k, &local) in set.available.iter().enumerate() {
        let route = &scenario.routes[scenario.routes_of[commute][local]];
        for leg in &route.legs {
            match leg.mode {
                LegMode::Transit { line, .. } => {
                    let x = design.x.get(t, line);
                    debug_assert!(x > 0.0);
                    let v = position(&vars, DesignVar::X { line, t });
                    dmu[k][v] += beta_transit * delta / (2.0 * x * x);
                }
                LegMode::Amod { station, .. } => {
                    let n = design.n.get(t, station);
                    debug_assert!(n > 0.0);
                    let v = position(&vars, DesignVar::N { station, t });
                    dmu[k][v] +=
                        beta_amod * scenario.stations[station].mean_trip_min / (2.0 * n.powf(1.5));
                }
            }
        }
        if route.legs.iter().any(|l| l.is_amod()) {
            let v = position(&vars, DesignVar::Lambda);
            dmu[k][v] -= scenario.utility.beta_money * amod_fare_sum(&scenario.fares, route);
        }
    }

    let probs = choice_probs_for_set(scenario, &set)?;
    let grad_rows = match scenario.choice.kind {
        ChoiceKind::Mnl => mnl_gradient_rows(&probs, &dmu, vars.len()),
        ChoiceKind::NestedLogit => {
            let classes: Vec<ModeClass> = set
                .available
                .iter()
                .map(|&local| scenario.routes[scenario.routes_of[commute][local]].mode_class)
                .collect();
            nested_gradient_rows(&set.utilities, &classes, &scenario.choice, &dmu, vars.len())
        }
    };

    // Scatter back onto the full local route list.
    let n_routes = scenario.routes_of[commute].len();
    let mut theta = vec![0.0; n_routes];
    let mut utilities = vec![UNAVAILABLE; n_routes];
    let mut rows = vec![vec![0.0; vars.len()]; n_routes];
    for (k, &local) in set.available.iter().enumerate() {
        theta[local] = probs[k];
        utilities[local] = set.utilities[k];
        rows[local] = grad_rows[k].clone();
    }
    Ok(CommuteGradient {
        vars,
        theta,
        utilities,
        rows,
    })
}

fn position(vars: &[DesignVar], var: DesignVar) -> usize {
    vars.binary_search(&var).expect("variable in pattern")
}

/// dtheta_k/dv = theta_k (dmu_k/dv - sum_j theta_j dmu_j/dv).
fn mnl_gradient_rows(probs: &[f64], dmu: &[Vec<f64>], n_vars: usize) -> Vec<Vec<f64>> {
    let mut mean = vec![0.0; n_vars];
    for (k, row) in dmu.iter().enumerate() {
        for (v, &d) in row.iter().enumerate() {
            mean[v] += probs[k] * d;
        }
    }
    dmu.iter()
        .enumerate()
        .map(|(k, row)| {
            row.iter()
                .enumerate()
                .map(|(v, &d)| probs[k] * (d - mean[v]))
                .collect()
        })
        .collect()
}

/// Nested-logit gradient: with q the within-nest probabilities, Q the
/// nest probabilities and Ibar_m the q-weighted mean of dmu over nest m,
///
///   dtheta_r/dv = theta_r [ phi_m (dmu_r - Ibar_m) + phi (Ibar_m - sum_m' Q_m' Ibar_m') ].
fn nested_gradient_rows(
    utilities: &[f64],
    classes: &[ModeClass],
    spec: &ChoiceModelSpec,
    dmu: &[Vec<f64>],
    n_vars: usize,
) -> Vec<Vec<f64>> {
    let n = utilities.len();
    let nests = [
        ModeClass::TransitOnly,
        ModeClass::AmodOnly,
        ModeClass::Mixed,
    ];

    // Per-alternative within-nest probability and per-nest quantities.
    let mut q = vec![0.0; n];
    let mut nest_of = vec![usize::MAX; n];
    let mut nest_scale = Vec::new();
    let mut nest_prob = Vec::new();
    let mut nest_dbar: Vec<Vec<f64>> = Vec::new();
    let mut logsums = Vec::new();
    for &nest in &nests {
        let idx: Vec<usize> = (0..n).filter(|&i| classes[i] == nest).collect();
        if idx.is_empty() {
            continue;
        }
        let m = nest_scale.len();
        let phi_m = spec.nest_scale(nest);
        let scaled: Vec<f64> = idx.iter().map(|&i| phi_m * utilities[i]).collect();
        let within = softmax(&scaled);
        let mut dbar = vec![0.0; n_vars];
        for (k, &i) in idx.iter().enumerate() {
            q[i] = within[k];
            nest_of[i] = m;
            for (v, &d) in dmu[i].iter().enumerate() {
                dbar[v] += within[k] * d;
            }
        }
        logsums.push(log_sum_exp(scaled.iter().copied()) / phi_m);
        nest_scale.push(phi_m);
        nest_dbar.push(dbar);
        nest_prob.push(0.0);
    }
    let upper_utilities: Vec<f64> = logsums.iter().map(|&i_m| spec.phi * i_m).collect();
    let upper = softmax(&upper_utilities);
    nest_prob.copy_from_slice(&upper);

    // Probability-weighted mean of the nest logsum derivatives.
    let mut grand = vec![0.0; n_vars];
    for (m, dbar) in nest_dbar.iter().enumerate() {
        for (v, &d) in dbar.iter().enumerate() {
            grand[v] += nest_prob[m] * d;
        }
    }

    (0..n)
        .map(|i| {
            let m = nest_of[i];
            let theta_i = q[i] * nest_prob[m];
            (0..n_vars)
                .map(|v| {
                    theta_i
                        * (nest_scale[m] * (dmu[i][v] - nest_dbar[m][v])
                            + spec.phi * (nest_dbar[m][v] - grand[v]))
                })
                .collect()
        })
        .collect()
}
