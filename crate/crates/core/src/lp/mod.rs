//! Linear programs and a self-contained solver.
//!
//! [`LinearProgram`] is the backend-neutral model; [`solve_lp`] solves it
//! with the built-in bounded revised simplex ([`simplex`]). Models can be
//! exported as fixed-column MPS for cross-checking against external
//! solvers.

mod build;
mod mps;
mod simplex;

pub use build::{
    build_inner_lp, build_iteration_lp, extract_boarding_flows, solve_iteration_lp, BoardingFlows,
    InnerLp, IterationLp,
};
pub use mps::write_mps;
pub use simplex::solve_lp;

use crate::error::{Error, Result};

/// Row sense of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub name: String,
    pub sense: Sense,
    pub rhs: f64,
    /// Sparse terms sorted by variable index, duplicates merged.
    pub terms: Vec<(usize, f64)>,
}

/// A minimization LP over named, bounded variables with sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub name: String,
    vars: Vec<Variable>,
    rows: Vec<Row>,
    /// Constant added to the reported objective value.
    pub objective_constant: f64,
}

impl LinearProgram {
    pub fn new(name: impl Into<String>) -> Self {
        LinearProgram {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> usize {
        assert!(!obj.is_nan() && obj.is_finite(), "objective must be finite");
        assert!(!lb.is_nan() && !ub.is_nan());
        assert!(lb <= ub, "lower bound above upper bound");
        self.vars.push(Variable {
            name: name.into(),
            lb,
            ub,
            obj,
        });
        self.vars.len() - 1
    }

    pub fn add_to_objective(&mut self, var: usize, coef: f64) {
        assert!(coef.is_finite());
        self.vars[var].obj += coef;
    }

    /// Pins a variable to a single value.
    pub fn fix_var(&mut self, var: usize, value: f64) {
        self.vars[var].lb = value;
        self.vars[var].ub = value;
    }

    pub fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) {
        assert!(lb <= ub);
        self.vars[var].lb = lb;
        self.vars[var].ub = ub;
    }

    /// Adds a constraint row; terms are sorted and duplicate variables
    /// merged. Returns the row index.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        sense: Sense,
        rhs: f64,
        mut terms: Vec<(usize, f64)>,
    ) -> usize {
        assert!(rhs.is_finite(), "right-hand side must be finite");
        terms.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            assert!(c.is_finite(), "coefficient must be finite");
            assert!(v < self.vars.len(), "row references unknown variable");
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        self.rows.push(Row {
            name: name.into(),
            sense,
            rhs,
            terms: merged,
        });
        self.rows.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var(&self, idx: usize) -> &Variable {
        &self.vars[idx]
    }

    pub fn row(&self, idx: usize) -> &Row {
        &self.rows[idx]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var_by_name(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Objective value of an assignment, including the constant.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant
            + self
                .vars
                .iter()
                .zip(values)
                .map(|(v, &x)| v.obj * x)
                .sum::<f64>()
    }

    /// Left-hand-side activity of every row at an assignment.
    pub fn row_activities(&self, values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.terms.iter().map(|&(v, c)| c * values[v]).sum())
            .collect()
    }

    /// Largest bound or row violation of an assignment (absolute).
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lb - x).max(x - v.ub);
        }
        for (row, activity) in self.rows.iter().zip(self.row_activities(values)) {
            let scale = row
                .terms
                .iter()
                .map(|&(_, c)| c.abs())
                .fold(1.0_f64, f64::max);
            let gap = match row.sense {
                Sense::Le => activity - row.rhs,
                Sense::Ge => row.rhs - activity,
                Sense::Eq => (activity - row.rhs).abs(),
            };
            worst = worst.max(gap / scale);
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                if v >= self.vars.len() {
                    return Err(Error::Lp(format!(
                        "row {i} references unknown variable {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output: primal values and per-row activity are meaningful only
/// when `status == Optimal`.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// Simplex iterations spent across both phases.
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
