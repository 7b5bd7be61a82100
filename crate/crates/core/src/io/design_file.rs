//! Design-point files: diff-friendly CSV triples `(kind, index, value)`
//! with `x` rows keyed `line@t`, `n` rows keyed `station@t`, and a single
//! `lambda` row. The generating seed is logged in a header comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::{DesignPoint, Scenario};

pub fn write_design(
    scenario: &Scenario,
    design: &DesignPoint,
    seed: Option<u64>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::new();
    if let Some(seed) = seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
    let _ = writeln!(out, "kind,index,value");
    for (l, line) in scenario.lines.iter().enumerate() {
        for t in 0..scenario.intervals() {
            let _ = writeln!(out, "x,{}@{t},{}", line.id, design.x.get(t, l));
        }
    }
    for (s, station) in scenario.stations.iter().enumerate() {
        for t in 0..scenario.intervals() {
            let _ = writeln!(out, "n,{}@{t},{}", station.id, design.n.get(t, s));
        }
    }
    let _ = writeln!(out, "lambda,,{}", design.lambda);
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_design(scenario: &Scenario, path: impl AsRef<Path>) -> Result<DesignPoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let t_count = scenario.intervals();
    let mut design = DesignPoint {
        x: Mat::zeros(t_count, scenario.lines.len()),
        n: Mat::zeros(t_count, scenario.stations.len()),
        lambda: scenario.fares.lambda_max,
    };
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == "kind,index,value" {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: format!("{}:{}", path.display(), lineno + 1),
            message,
        };
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, got {}", fields.len())));
        }
        let value: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| err(format!("bad value: {e}")))?;
        match fields[0] {
            "lambda" => design.lambda = value,
            kind @ ("x" | "n") => {
                let (id, t) = fields[1]
                    .split_once('@')
                    .ok_or_else(|| err(format!("index `{}` is not `id@t`", fields[1])))?;
                let t: usize = t.parse().map_err(|e| err(format!("bad interval: {e}")))?;
                if t >= t_count {
                    return Err(err(format!("interval {t} outside 0..{t_count}")));
                }
                if kind == "x" {
                    let l = scenario
                        .line_index(id)
                        .ok_or_else(|| err(format!("unknown line `{id}`")))?;
                    design.x.set(t, l, value);
                } else {
                    let s = scenario
                        .station_index(id)
                        .ok_or_else(|| err(format!("unknown station `{id}`")))?;
                    design.n.set(t, s, value);
                }
            }
            other => return Err(err(format!("unknown kind `{other}`"))),
        }
    }
    Ok(design)
}
