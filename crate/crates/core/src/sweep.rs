//! Scenario sweep harness: scale the bus budget, regenerate demand, and
//! re-optimize over a grid of (gamma, psi, fleet) cells, appending one
//! report row per cell to a resumable CSV.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EvaluationReport;
use crate::io::{generate_demand, load_scenario, DemandSeed};
use crate::model::{classify_legs, DesignPoint, Scenario};
use crate::optim::multi_start;

/// Bus-to-AMoD fleet equivalence rules: road-space parity (two passenger
/// cars per bus) or capital-cost parity (four vehicles per bus).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FleetRule {
    #[serde(rename = "PCE")]
    Pce,
    #[serde(rename = "CCE")]
    Cce,
    #[serde(rename = "explicit")]
    Explicit(Vec<f64>),
}

/// Passenger-car units per bus.
const PCU_PER_BUS: f64 = 2.0;
/// Vehicles per bus at equal capital cost (800k vs 200k dollars).
const CCE_PER_BUS: f64 = 4.0;

/// Fleet size equivalent to removing a `1 - gamma` share of bus runs,
/// assuming one run per bus per hour. The removed-bus count rounds
/// half-up.
pub fn equivalent_fleet(gamma: f64, bus_budget: f64, horizon_hours: f64, rule: &FleetRule) -> f64 {
    let removed_buses = (bus_budget * (1.0 - gamma) / horizon_hours + 0.5).floor();
    match rule {
        FleetRule::Pce => PCU_PER_BUS * removed_buses,
        FleetRule::Cce => CCE_PER_BUS * removed_buses,
        FleetRule::Explicit(_) => panic!("explicit fleet lists carry their own sizes"),
    }
}

/// One sensitivity sweep: cells are the cross product of gamma values,
/// downtown shares and fleet sizes (derived per gamma for PCE/CCE).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base_scenario: PathBuf,
    pub output: PathBuf,
    pub gamma: Vec<f64>,
    pub psi: Vec<f64>,
    pub fleet_rule: FleetRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl SweepSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        for &g in &spec.gamma {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    message: format!("gamma {g} outside [0, 1]"),
                });
            }
        }
        for &p in &spec.psi {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    message: format!("psi {p} outside [0, 1]"),
                });
            }
        }
        if spec.gamma.is_empty() || spec.psi.is_empty() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: "gamma and psi lists must be nonempty".into(),
            });
        }
        Ok(spec)
    }

    fn fleet_sizes(&self, gamma: f64, bus_budget: f64, horizon_hours: f64) -> Vec<f64> {
        match &self.fleet_rule {
            FleetRule::Explicit(list) => list.clone(),
            rule => vec![equivalent_fleet(gamma, bus_budget, horizon_hours, rule)],
        }
    }
}

#[derive(Clone, Debug)]
struct Cell {
    gamma: f64,
    psi: f64,
    n_bar: f64,
}

fn cell_key(gamma: f64, psi: f64, n_bar: f64) -> String {
    format!("{gamma:.6}|{psi:.6}|{n_bar:.6}")
}

/// Default cell-level parallelism: the `TCMUM_JOBS` environment variable,
/// else 1 (each cell already parallelizes its multi-start internally).
pub fn default_jobs() -> usize {
    std::env::var("TCMUM_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&j| j >= 1)
        .unwrap_or(1)
}

/// Runs every pending cell of the sweep and appends one CSV row per cell
/// in spec order. Rows already present in the output are skipped, so an
/// interrupted sweep resumes without re-solving. Per-cell failures land
/// in the `error` column and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<usize> {
    let base = load_scenario(&spec.base_scenario)?;
    let seed = spec.seed.unwrap_or(base.algorithm.seed);
    let horizon_hours = base.grid.horizon_hours();

    let mut cells = Vec::new();
    for &gamma in &spec.gamma {
        for &psi in &spec.psi {
            for n_bar in spec.fleet_sizes(gamma, base.budgets.bus_total, horizon_hours) {
                cells.push(Cell { gamma, psi, n_bar });
            }
        }
    }

    // Resume: collect keys of rows already written.
    let mut done: BTreeSet<String> = BTreeSet::new();
    let mut needs_header = true;
    if let Ok(existing) = std::fs::read_to_string(&spec.output) {
        for line in existing.lines() {
            if line.starts_with('#') || line.starts_with("psi,") {
                needs_header = false;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() >= 3 {
                if let (Ok(psi), Ok(gamma), Ok(n_bar)) = (
                    fields[0].parse::<f64>(),
                    fields[1].parse::<f64>(),
                    fields[2].parse::<f64>(),
                ) {
                    done.insert(cell_key(gamma, psi, n_bar));
                }
            }
        }
    }
    let pending: Vec<Cell> = cells
        .into_iter()
        .filter(|c| !done.contains(&cell_key(c.gamma, c.psi, c.n_bar)))
        .collect();

    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&spec.output)?;
    if needs_header {
        writeln!(file, "# seed: {seed}")?;
        writeln!(file, "psi,{},error", EvaluationReport::CSV_HEADER)?;
    }
    if pending.is_empty() {
        return Ok(0);
    }

    let jobs = spec.jobs.unwrap_or_else(default_jobs).max(1);
    let writer = Mutex::new(OrderedWriter {
        file,
        next: 0,
        buffer: std::collections::BTreeMap::new(),
    });

    let run_cell = |cell: &Cell| -> String {
        match solve_cell(&base, cell, seed) {
            Ok(row) => row,
            Err(e) => format!(
                "{:.6},{:.6},{:.6},,,,,,,,,,,,,,,\"{}\"",
                cell.psi,
                cell.gamma,
                cell.n_bar,
                e.to_string().replace('"', "'").replace('\n', " ")
            ),
        }
    };

    if jobs == 1 {
        for (k, cell) in pending.iter().enumerate() {
            let row = run_cell(cell);
            writer.lock().unwrap().push(k, row)?;
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Lp(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            pending
                .par_iter()
                .enumerate()
                .try_for_each(|(k, cell)| writer.lock().unwrap().push(k, run_cell(cell)))
        })?;
    }
    Ok(pending.len())
}

struct OrderedWriter {
    file: std::fs::File,
    next: usize,
    buffer: std::collections::BTreeMap<usize, String>,
}

impl OrderedWriter {
    fn push(&mut self, order: usize, row: String) -> Result<()> {
        self.buffer.insert(order, row);
        while let Some(row) = self.buffer.remove(&self.next) {
            writeln!(self.file, "{row}")?;
            self.file.flush()?;
            self.next += 1;
        }
        Ok(())
    }
}

/// Builds the cell's scenario (scaled bus budget, regenerated demand,
/// fleet limit), optimizes it and evaluates the best design.
fn solve_cell(base: &Scenario, cell: &Cell, seed: u64) -> crate::error::Result<String> {
    let mut scenario = base.clone();
    scenario.budgets.bus_total = cell.gamma * base.budgets.bus_total;
    scenario.budgets.max_vehicles = cell.n_bar;
    scenario.algorithm.seed = seed;
    let demand_seed = DemandSeed::from_scenario(base, None, 0.0);
    let demand = generate_demand(&demand_seed, cell.psi, seed)?;
    for (c, row) in demand.into_iter().enumerate() {
        scenario.commutes[c].demand = row;
    }

    let outcome = multi_start(&scenario, &scenario.algorithm.clone())?;
    let leg_index = classify_legs(&scenario)?;
    let (_, mut report) = crate::eval::evaluate_design(&scenario, &leg_index, &outcome.best)?;
    report.gamma = cell.gamma;
    report.n_bar = cell.n_bar;
    Ok(format!("{:.6},{},", cell.psi, report.csv_row()))
}

/// Writes the per-line, per-interval departure profile of a design:
/// `line,t,x,headway_min,pattern`, with the headway empty at zero rates
/// and `pattern` spelling out small rational rates.
pub fn emit_frequency_profile(scenario: &Scenario, design: &DesignPoint) -> String {
    let mut out = String::from("line,t,x,headway_min,pattern\n");
    for (l, line) in scenario.lines.iter().enumerate() {
        for t in 0..scenario.intervals() {
            let x = design.x.get(t, l);
            let headway = if x > 0.0 {
                format!("{:.4}", scenario.grid.delta_min / x)
            } else {
                String::new()
            };
            let _ = writeln!(out, "{},{t},{x},{headway},{}", line.id, rate_pattern(x));
        }
    }
    out
}

/// Describes a fractional rate as departures per whole intervals, e.g.
/// 1.5 departures per interval is "3 departures per 2 intervals".
fn rate_pattern(x: f64) -> String {
    if x <= 0.0 {
        return String::new();
    }
    for q in 1..=8_u32 {
        let p = (x * f64::from(q)).round();
        if p >= 1.0 && (x - p / f64::from(q)).abs() < 1e-9 {
            if q == 1 {
                return String::new();
            }
            return format!("{} departures per {} intervals", p as u64, q);
        }
    }
    String::new()
}
