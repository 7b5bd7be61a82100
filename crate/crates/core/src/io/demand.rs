use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{CommuteKind, Scenario};

use super::raw::RawScenario;

/// Seed matrices for demand regeneration: the scenario's per-commute
/// demand vectors act as weights, split by commuter kind, and scaled to a
/// target total with a downtown share.
#[derive(Clone, Debug)]
pub struct DemandSeed {
    pub weights: Vec<Vec<f64>>,
    pub kinds: Vec<CommuteKind>,
    pub total: f64,
    pub jitter: f64,
}

impl DemandSeed {
    pub fn from_scenario(scenario: &Scenario, total: Option<f64>, jitter: f64) -> Self {
        DemandSeed {
            weights: scenario.commutes.iter().map(|c| c.demand.clone()).collect(),
            kinds: scenario.commutes.iter().map(|c| c.kind).collect(),
            total: total.unwrap_or_else(|| scenario.total_demand()),
            jitter,
        }
    }
}

/// Regenerates per-commute demand vectors: downtown demand scaled to
/// `total * psi` and local demand to `total * (1 - psi)`, proportional to
/// the seed weights. Deterministic for a fixed seed; randomness enters
/// only through the optional jitter.
pub fn generate_demand(seed: &DemandSeed, psi: f64, rng_seed: u64) -> Result<Vec<Vec<f64>>> {
    assert!((0.0..=1.0).contains(&psi), "psi must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut weights = seed.weights.clone();
    if seed.jitter > 0.0 {
        for row in &mut weights {
            for w in row.iter_mut() {
                if *w > 0.0 {
                    *w *= 1.0 + rng.gen_range(-seed.jitter..seed.jitter);
                }
            }
        }
    }

    let sum_of = |kind: CommuteKind| -> f64 {
        weights
            .iter()
            .zip(&seed.kinds)
            .filter(|(_, &k)| k == kind)
            .map(|(row, _)| row.iter().sum::<f64>())
            .sum()
    };
    let downtown_weight = sum_of(CommuteKind::Downtown);
    let local_weight = sum_of(CommuteKind::Local);
    if psi > 0.0 && downtown_weight <= 0.0 {
        return Err(Error::Parse {
            path: "demand_seed".into(),
            message: format!("psi = {psi} requires a nonempty downtown seed matrix"),
        });
    }
    if psi < 1.0 && local_weight <= 0.0 {
        return Err(Error::Parse {
            path: "demand_seed".into(),
            message: format!("psi = {psi} requires a nonempty local seed matrix"),
        });
    }

    let downtown_scale = if downtown_weight > 0.0 {
        seed.total * psi / downtown_weight
    } else {
        0.0
    };
    let local_scale = if local_weight > 0.0 {
        seed.total * (1.0 - psi) / local_weight
    } else {
        0.0
    };
    Ok(weights
        .into_iter()
        .zip(&seed.kinds)
        .map(|(row, &kind)| {
            let scale = match kind {
                CommuteKind::Downtown => downtown_scale,
                CommuteKind::Local => local_scale,
            };
            row.into_iter().map(|w| w * scale).collect()
        })
        .collect())
}

/// Fills per-commute demand vectors from an external `commute_id,t,demand`
/// table (t is the 0-based interval index). Missing cells stay zero.
pub fn fill_demand_from_csv(raw: &mut RawScenario, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let t_count = raw.grid.intervals;
    for commute in &mut raw.commutes {
        if commute.demand.is_empty() {
            commute.demand = vec![0.0; t_count];
        }
    }
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || lineno == 0 {
            continue;
        }
        let parse = |message: String| Error::Parse {
            path: format!("{}:{}", path.display(), lineno + 1),
            message,
        };
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(parse(format!("expected 3 fields, got {}", fields.len())));
        }
        let commute = raw
            .commutes
            .iter_mut()
            .find(|c| c.id == fields[0])
            .ok_or_else(|| parse(format!("unknown commute `{}`", fields[0])))?;
        let t: usize = fields[1]
            .trim()
            .parse()
            .map_err(|e| parse(format!("bad interval index: {e}")))?;
        let demand: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| parse(format!("bad demand value: {e}")))?;
        if t >= t_count {
            return Err(parse(format!("interval {t} outside 0..{t_count}")));
        }
        commute.demand[t] = demand;
    }
    Ok(())
}
