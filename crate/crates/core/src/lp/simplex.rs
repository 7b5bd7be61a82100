//! Bounded-variable revised simplex with a product-form inverse.
//!
//! Starts from the all-slack basis (with per-row artificials when that
//! start is infeasible), prices with Dantzig's rule and falls back to
//! Bland's rule after a run of degenerate pivots. Rows are equilibrated
//! to power-of-two scales before solving so the feasibility tolerance is
//! meaningful across coefficient magnitudes. Deterministic: all ties
//! break on the lowest variable index.

use crate::error::{Error, Result};

use super::{LinearProgram, LpSolution, LpStatus, Sense};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_TOL: f64 = 1e-10;
const DROP_TOL: f64 = 1e-13;
const FEAS_TOL: f64 = 1e-7;
const DEGEN_LIMIT: usize = 600;
const REFRESH_EVERY: usize = 400;

/// Solves a linear program with the built-in simplex backend. The
/// returned solution is primal feasible within `1e-7` (after row scaling)
/// and optimal by the reduced-cost criterion when `status == Optimal`;
/// infeasible and unbounded models are reported in the status, and a
/// numerical stall surfaces as an error with iteration diagnostics.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    if lp.n_rows() == 0 {
        return solve_box_only(lp);
    }
    let mut solver = Solver::new(lp, false);
    match solver.run()? {
        RunOutcome::Finished(solution) => Ok(solution),
        RunOutcome::NumericalTrouble => {
            // One deterministic retry under Bland's rule from scratch.
            let mut solver = Solver::new(lp, true);
            match solver.run()? {
                RunOutcome::Finished(solution) => Ok(solution),
                RunOutcome::NumericalTrouble => Err(Error::LpStall {
                    iterations: solver.iterations,
                    phase: solver.phase,
                    detail: "residual repair failed after Bland retry".into(),
                }),
            }
        }
    }
}

/// LPs without rows reduce to putting each variable at its cheaper bound.
fn solve_box_only(lp: &LinearProgram) -> Result<LpSolution> {
    let mut values = Vec::with_capacity(lp.n_vars());
    for v in lp.vars() {
        if v.lb > v.ub {
            return Ok(infeasible(lp));
        }
        let best = if v.obj >= 0.0 { v.lb } else { v.ub };
        if !best.is_finite() {
            if v.obj == 0.0 {
                values.push(if v.lb.is_finite() {
                    v.lb
                } else {
                    0.0_f64.min(v.ub)
                });
                continue;
            }
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: f64::NEG_INFINITY,
                values: vec![],
                row_activity: vec![],
                iterations: 0,
            });
        }
        values.push(best);
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&values),
        row_activity: lp.row_activities(&values),
        values,
        iterations: 0,
    })
}

fn infeasible(lp: &LinearProgram) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::INFINITY,
        values: vec![f64::NAN; lp.n_vars()],
        row_activity: vec![],
        iterations: 0,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VStat {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Free,
}

struct Eta {
    pivot_row: usize,
    pivot_value: f64,
    /// Off-pivot entries of the transformed entering column.
    entries: Vec<(usize, f64)>,
}

/// Dense-backed sparse work vector.
struct Scattered {
    val: Vec<f64>,
    nz: Vec<usize>,
    marked: Vec<bool>,
}

impl Scattered {
    fn new(n: usize) -> Self {
        Scattered {
            val: vec![0.0; n],
            nz: Vec::new(),
            marked: vec![false; n],
        }
    }

    fn clear(&mut self) {
        for &i in &self.nz {
            self.val[i] = 0.0;
            self.marked[i] = false;
        }
        self.nz.clear();
    }

    #[inline]
    fn add(&mut self, i: usize, v: f64) {
        if !self.marked[i] {
            self.marked[i] = true;
            self.nz.push(i);
        }
        self.val[i] += v;
    }

    #[inline]
    fn set(&mut self, i: usize, v: f64) {
        if !self.marked[i] {
            self.marked[i] = true;
            self.nz.push(i);
        }
        self.val[i] = v;
    }

    #[inline]
    fn get(&self, i: usize) -> f64 {
        self.val[i]
    }
}

/// Progress diagnostics, enabled by setting `TCMUM_LP_DEBUG`.
fn lp_debug(message: impl FnOnce() -> String) {
    if std::env::var_os("TCMUM_LP_DEBUG").is_some() {
        eprintln!("[lp] {}", message());
    }
}

enum RunOutcome {
    Finished(LpSolution),
    NumericalTrouble,
}

enum StepResult {
    Moved,
    PhaseOptimal,
    Unbounded,
}

struct Solver<'a> {
    lp: &'a LinearProgram,
    n_struct: usize,
    m: usize,
    /// Scaled structural columns: `cols[j] = [(row, coef)]`.
    cols: Vec<Vec<(usize, f64)>>,
    /// Scaled structural rows: `rows_sparse[i] = [(var, coef)]`.
    rows_sparse: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    /// Artificial variables, one per initially infeasible row, appended
    /// after the slack block. The column is always `+e_row`; the stored
    /// sign says which side of zero the artificial starts on (positive
    /// residual: bounds `[0, inf)`, negative: `(-inf, 0]`), keeping the
    /// initial basis matrix an identity.
    artificials: Vec<(usize, f64)>,

    status: Vec<VStat>,
    basis: Vec<usize>,
    basis_pos: Vec<usize>,
    xb: Vec<f64>,
    d: Vec<f64>,
    /// Devex reference weights, one per variable.
    weights: Vec<f64>,
    etas: Vec<Eta>,

    phase: u8,
    iterations: usize,
    degen_streak: usize,
    bland: bool,
    force_bland: bool,

    work_col: Scattered,
    work_row: Scattered,
    work_rho: Scattered,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram, force_bland: bool) -> Self {
        let n_struct = lp.n_vars();
        let m = lp.n_rows();

        // Power-of-two row equilibration keeps coefficients exact.
        let mut scales = Vec::with_capacity(m);
        for row in lp.rows() {
            let max = row
                .terms
                .iter()
                .map(|&(_, c)| c.abs())
                .fold(0.0_f64, f64::max);
            let scale = if max <= 0.0 {
                1.0
            } else {
                (2.0_f64).powi(-(max.log2().round() as i32))
            };
            scales.push(scale);
        }

        let mut cols = vec![Vec::new(); n_struct];
        let mut rows_sparse = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for (i, row) in lp.rows().iter().enumerate() {
            let mut sparse_row = Vec::with_capacity(row.terms.len());
            for &(j, c) in &row.terms {
                let scaled = c * scales[i];
                cols[j].push((i, scaled));
                sparse_row.push((j, scaled));
            }
            rows_sparse.push(sparse_row);
            b.push(row.rhs * scales[i]);
        }

        let mut lb = Vec::with_capacity(n_struct + m);
        let mut ub = Vec::with_capacity(n_struct + m);
        let mut cost = Vec::with_capacity(n_struct + m);
        for v in lp.vars() {
            lb.push(v.lb);
            ub.push(v.ub);
            cost.push(v.obj);
        }
        for row in lp.rows() {
            let (l, u) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
            cost.push(0.0);
        }

        Solver {
            lp,
            n_struct,
            m,
            cols,
            rows_sparse,
            b,
            lb,
            ub,
            cost,
            artificials: Vec::new(),
            status: Vec::new(),
            basis: Vec::new(),
            basis_pos: Vec::new(),
            xb: Vec::new(),
            d: Vec::new(),
            weights: Vec::new(),
            etas: Vec::new(),
            phase: 1,
            iterations: 0,
            degen_streak: 0,
            bland: force_bland,
            force_bland,
            work_col: Scattered::new(m),
            work_row: Scattered::new(m),
            // Variable space including up to one artificial per row.
            work_rho: Scattered::new(n_struct + 2 * m),
        }
    }

    fn n_total(&self) -> usize {
        self.n_struct + self.m + self.artificials.len()
    }

    fn var_lb(&self, var: usize) -> f64 {
        if var < self.n_struct + self.m {
            self.lb[var]
        } else if self.phase == 1 && self.artificials[var - self.n_struct - self.m].1 < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }

    fn var_ub(&self, var: usize) -> f64 {
        if var < self.n_struct + self.m {
            self.ub[var]
        } else if self.phase == 1 && self.artificials[var - self.n_struct - self.m].1 > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn var_cost(&self, var: usize) -> f64 {
        match self.phase {
            1 => {
                if var >= self.n_struct + self.m {
                    // Minimizing sign * a drives |a| to zero from either
                    // side.
                    self.artificials[var - self.n_struct - self.m].1
                } else {
                    0.0
                }
            }
            _ => {
                if var < self.n_struct {
                    self.cost[var]
                } else {
                    0.0
                }
            }
        }
    }

    fn nb_value(&self, var: usize) -> f64 {
        match self.status[var] {
            VStat::AtLower => self.var_lb(var),
            VStat::AtUpper => self.var_ub(var),
            VStat::Free => 0.0,
            VStat::Basic => unreachable!("basic variable has no nonbasic value"),
        }
    }

    /// Iterates the scaled column of any variable.
    fn for_column(&self, var: usize, mut f: impl FnMut(usize, f64)) {
        if var < self.n_struct {
            for &(i, c) in &self.cols[var] {
                f(i, c);
            }
        } else if var < self.n_struct + self.m {
            f(var - self.n_struct, 1.0);
        } else {
            let (row, _) = self.artificials[var - self.n_struct - self.m];
            f(row, 1.0);
        }
    }

    fn run(&mut self) -> Result<RunOutcome> {
        self.init_basis();
        if !self.artificials.is_empty() {
            self.phase = 1;
            self.weights = vec![1.0; self.n_total()];
            self.recompute_reduced_costs();
            match self.iterate()? {
                StepResult::PhaseOptimal => {}
                StepResult::Unbounded => {
                    // A minimization of a sum of nonnegative variables
                    // cannot be unbounded; treat as numerical trouble.
                    return Ok(RunOutcome::NumericalTrouble);
                }
                StepResult::Moved => unreachable!(),
            }
            let infeasibility: f64 = (0..self.artificials.len())
                .map(|k| {
                    let var = self.n_struct + self.m + k;
                    match self.status[var] {
                        VStat::Basic => self.xb[self.basis_pos[var]].abs(),
                        _ => self.nb_value(var).abs(),
                    }
                })
                .sum();
            if infeasibility > FEAS_TOL {
                return Ok(RunOutcome::Finished(LpSolution {
                    iterations: self.iterations,
                    ..infeasible(self.lp)
                }));
            }
        }

        self.phase = 2;
        self.weights = vec![1.0; self.n_total()];
        self.recompute_reduced_costs();
        match self.iterate()? {
            StepResult::PhaseOptimal => {}
            StepResult::Unbounded => {
                return Ok(RunOutcome::Finished(LpSolution {
                    status: LpStatus::Unbounded,
                    objective: f64::NEG_INFINITY,
                    values: vec![f64::NAN; self.n_struct],
                    row_activity: vec![],
                    iterations: self.iterations,
                }));
            }
            StepResult::Moved => unreachable!(),
        }

        let values = self.extract_values();
        let violation = self.lp.max_violation(&values);
        if violation > FEAS_TOL {
            lp_debug(|| {
                format!(
                    "primal violation {violation:.3e} after {} iterations",
                    self.iterations
                )
            });
            return Ok(RunOutcome::NumericalTrouble);
        }
        Ok(RunOutcome::Finished(LpSolution {
            status: LpStatus::Optimal,
            objective: self.lp.objective_value(&values),
            row_activity: self.lp.row_activities(&values),
            values,
            iterations: self.iterations,
        }))
    }

    fn init_basis(&mut self) {
        let n = self.n_struct + self.m;
        self.status = Vec::with_capacity(n);
        for var in 0..self.n_struct {
            let (l, u) = (self.lb[var], self.ub[var]);
            let status = if l.is_finite() {
                VStat::AtLower
            } else if u.is_finite() {
                VStat::AtUpper
            } else {
                VStat::Free
            };
            self.status.push(status);
        }
        for _ in 0..self.m {
            self.status.push(VStat::Basic);
        }

        // Slack basis values: b - A x_N.
        let mut xb = self.b.clone();
        for var in 0..self.n_struct {
            let value = self.nb_value(var);
            if value != 0.0 {
                for &(i, c) in &self.cols[var] {
                    xb[i] -= c * value;
                }
            }
        }

        self.basis = (self.n_struct..self.n_struct + self.m).collect();
        self.basis_pos = vec![usize::MAX; n];
        for (i, &var) in self.basis.iter().enumerate() {
            self.basis_pos[var] = i;
        }
        self.xb = xb;

        // Rows whose slack value violates the slack bounds get an
        // artificial basic variable instead.
        for i in 0..self.m {
            let slack = self.n_struct + i;
            let value = self.xb[i];
            let (l, u) = (self.lb[slack], self.ub[slack]);
            if value < l - PRIMAL_TOL || value > u + PRIMAL_TOL {
                let bound = if value < l { l } else { u };
                let residual = value - bound;
                let art = self.n_struct + self.m + self.artificials.len();
                self.artificials.push((i, residual.signum()));
                self.status[slack] = if bound == l {
                    VStat::AtLower
                } else {
                    VStat::AtUpper
                };
                self.status.push(VStat::Basic);
                self.basis[i] = art;
                self.basis_pos[slack] = usize::MAX;
                self.basis_pos.push(i);
                self.xb[i] = residual;
            }
        }
    }

    fn recompute_reduced_costs(&mut self) {
        // y = B^-T c_B, then d_j = c_j - y . a_j.
        let mut y = vec![0.0; self.m];
        for (i, &var) in self.basis.iter().enumerate() {
            y[i] = self.var_cost(var);
        }
        self.btran_dense(&mut y);

        let n_total = self.n_total();
        self.d = vec![0.0; n_total];
        for var in 0..n_total {
            if self.status[var] == VStat::Basic {
                continue;
            }
            let mut dot = 0.0;
            self.for_column(var, |i, c| dot += y[i] * c);
            self.d[var] = self.var_cost(var) - dot;
        }
    }

    /// Recomputes basic values exactly through the eta file.
    fn recompute_xb(&mut self) {
        let mut rhs = self.b.clone();
        for var in 0..self.n_total() {
            if self.status[var] == VStat::Basic {
                continue;
            }
            let value = self.nb_value(var);
            if value != 0.0 {
                self.for_column(var, |i, c| rhs[i] -= c * value);
            }
        }
        self.ftran_dense(&mut rhs);
        self.xb = rhs;
    }

    fn ftran_dense(&self, v: &mut [f64]) {
        for eta in &self.etas {
            let vr = v[eta.pivot_row];
            if vr == 0.0 {
                continue;
            }
            let t = vr / eta.pivot_value;
            v[eta.pivot_row] = t;
            for &(i, a) in &eta.entries {
                v[i] -= a * t;
            }
        }
    }

    fn btran_dense(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut dot = 0.0;
            for &(i, a) in &eta.entries {
                dot += a * v[i];
            }
            v[eta.pivot_row] = (v[eta.pivot_row] - dot) / eta.pivot_value;
        }
    }

    /// alpha = B^-1 a_q into `work_col`.
    fn ftran_column(&mut self, var: usize) {
        let col = &mut self.work_col;
        col.clear();
        if var < self.n_struct {
            for &(i, c) in &self.cols[var] {
                col.set(i, c);
            }
        } else if var < self.n_struct + self.m {
            col.set(var - self.n_struct, 1.0);
        } else {
            let (row, _) = self.artificials[var - self.n_struct - self.m];
            col.set(row, 1.0);
        }
        for eta in &self.etas {
            let vr = col.get(eta.pivot_row);
            if vr == 0.0 {
                continue;
            }
            let t = vr / eta.pivot_value;
            col.set(eta.pivot_row, t);
            for &(i, a) in &eta.entries {
                col.add(i, -a * t);
            }
        }
    }

    /// y = e_r B^-1 into `work_row`.
    fn btran_unit(&mut self, r: usize) {
        let row = &mut self.work_row;
        row.clear();
        row.set(r, 1.0);
        for eta in self.etas.iter().rev() {
            let mut dot = 0.0;
            for &(i, a) in &eta.entries {
                dot += a * row.get(i);
            }
            let vr = row.get(eta.pivot_row);
            if vr != 0.0 || dot != 0.0 {
                row.set(eta.pivot_row, (vr - dot) / eta.pivot_value);
            }
        }
    }

    fn pick_entering(&self) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for var in 0..self.n_total() {
            let d = self.d[var];
            let eligible = match self.status[var] {
                VStat::Basic => false,
                VStat::AtLower => d < -DUAL_TOL,
                VStat::AtUpper => d > DUAL_TOL,
                VStat::Free => d.abs() > DUAL_TOL,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some(var);
            }
            // Devex: largest squared reduced cost per reference weight.
            let score = d * d / self.weights[var];
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, var));
            }
        }
        best.map(|(_, var)| var)
    }

    fn iterate(&mut self) -> Result<StepResult> {
        let max_iters = 20_000 + 40 * (self.n_total() + self.m);
        loop {
            if self.iterations >= max_iters {
                return Err(Error::LpStall {
                    iterations: self.iterations,
                    phase: self.phase,
                    detail: format!(
                        "iteration limit {max_iters} reached ({} rows, {} columns)",
                        self.m,
                        self.n_total()
                    ),
                });
            }
            if self.iterations % REFRESH_EVERY == REFRESH_EVERY - 1 {
                self.recompute_xb();
                self.recompute_reduced_costs();
                lp_debug(|| {
                    format!(
                        "iter {} phase {} etas {} degen {}",
                        self.iterations,
                        self.phase,
                        self.etas.len(),
                        self.degen_streak
                    )
                });
            }
            let Some(entering) = self.pick_entering() else {
                // Certify with freshly computed reduced costs; drift may
                // have hidden an eligible column.
                self.recompute_reduced_costs();
                if self.pick_entering().is_none() {
                    return Ok(StepResult::PhaseOptimal);
                }
                continue;
            };
            match self.step(entering)? {
                StepResult::Unbounded => return Ok(StepResult::Unbounded),
                StepResult::Moved => {
                    self.iterations += 1;
                }
                StepResult::PhaseOptimal => unreachable!(),
            }
        }
    }

    fn step(&mut self, entering: usize) -> Result<StepResult> {
        let d_q = self.d[entering];
        let dir = match self.status[entering] {
            VStat::AtLower => 1.0,
            VStat::AtUpper => -1.0,
            VStat::Free => {
                if d_q < 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            VStat::Basic => unreachable!(),
        };

        self.ftran_column(entering);

        // Ratio test over the basic variables touched by the column.
        let mut row_limit = f64::INFINITY;
        let mut leaving: Option<(usize, f64)> = None; // (row, |alpha|)
        for idx in 0..self.work_col.nz.len() {
            let i = self.work_col.nz[idx];
            let alpha = self.work_col.val[i];
            if alpha.abs() < PIVOT_TOL {
                continue;
            }
            let basic = self.basis[i];
            let rate = dir * alpha;
            let room = if rate > 0.0 {
                self.xb[i] - self.var_lb(basic)
            } else {
                self.var_ub(basic) - self.xb[i]
            };
            if !room.is_finite() {
                continue;
            }
            let ratio = room.max(0.0) / rate.abs();
            let take = match leaving {
                None => ratio < row_limit,
                Some((r_row, r_alpha)) => {
                    if ratio < row_limit - DEGEN_TOL {
                        true
                    } else if ratio <= row_limit + DEGEN_TOL {
                        // Tie: prefer the larger pivot for stability, then
                        // the lowest variable index; pure lowest-index
                        // under Bland's rule.
                        if self.bland {
                            self.basis[i] < self.basis[r_row]
                        } else {
                            alpha.abs() > r_alpha * (1.0 + 1e-12)
                                || ((alpha.abs() - r_alpha).abs() <= r_alpha * 1e-12
                                    && self.basis[i] < self.basis[r_row])
                        }
                    } else {
                        false
                    }
                }
            };
            if take {
                row_limit = row_limit.min(ratio);
                leaving = Some((i, alpha.abs()));
            }
        }

        let own_range = self.var_ub(entering) - self.var_lb(entering);
        let step_len = row_limit.min(own_range.max(0.0));
        if !step_len.is_finite() {
            lp_debug(|| {
                format!(
                    "unbounded direction: entering {entering} (phase {}), d_q {d_q}",
                    self.phase
                )
            });
            return Ok(StepResult::Unbounded);
        }

        self.degen_streak = if step_len <= DEGEN_TOL {
            self.degen_streak + 1
        } else {
            0
        };
        if !self.force_bland {
            if self.degen_streak > DEGEN_LIMIT {
                self.bland = true;
            } else if step_len > 1e-7 {
                self.bland = false;
            }
        }

        if own_range <= row_limit {
            self.bound_flip(entering, dir, own_range);
        } else {
            let (row, _) = leaving.expect("finite row limit implies a leaving row");
            self.pivot(entering, row, dir, row_limit.max(0.0));
        }
        Ok(StepResult::Moved)
    }

    fn bound_flip(&mut self, entering: usize, dir: f64, delta: f64) {
        if delta > 0.0 {
            for idx in 0..self.work_col.nz.len() {
                let i = self.work_col.nz[idx];
                let alpha = self.work_col.val[i];
                if alpha != 0.0 {
                    self.xb[i] -= dir * delta * alpha;
                }
            }
        }
        self.status[entering] = match self.status[entering] {
            VStat::AtLower => VStat::AtUpper,
            VStat::AtUpper => VStat::AtLower,
            other => other,
        };
    }

    fn pivot(&mut self, entering: usize, row: usize, dir: f64, delta: f64) {
        let alpha_r = self.work_col.val[row];
        let leaving = self.basis[row];
        let entering_origin = match self.status[entering] {
            VStat::AtLower => self.var_lb(entering),
            VStat::AtUpper => self.var_ub(entering),
            VStat::Free => 0.0,
            VStat::Basic => unreachable!(),
        };

        // Pivot row in variable space for the reduced-cost update, built
        // against the pre-pivot basis.
        self.btran_unit(row);
        self.work_rho.clear();
        for idx in 0..self.work_row.nz.len() {
            let i = self.work_row.nz[idx];
            let y_i = self.work_row.val[i];
            if y_i == 0.0 {
                continue;
            }
            for &(j, a) in &self.rows_sparse[i] {
                self.work_rho.add(j, y_i * a);
            }
            self.work_rho.add(self.n_struct + i, y_i);
        }
        for (k, &(art_row, _)) in self.artificials.iter().enumerate() {
            let y_i = self.work_row.get(art_row);
            if y_i != 0.0 {
                self.work_rho.add(self.n_struct + self.m + k, y_i);
            }
        }

        // Update basic values.
        if delta > 0.0 {
            for idx in 0..self.work_col.nz.len() {
                let i = self.work_col.nz[idx];
                let alpha = self.work_col.val[i];
                if alpha != 0.0 {
                    self.xb[i] -= dir * delta * alpha;
                }
            }
        }

        // The leaving variable exits at the bound it ran into.
        let leaving_status = if dir * alpha_r > 0.0 {
            VStat::AtLower
        } else {
            VStat::AtUpper
        };
        self.status[leaving] = leaving_status;
        self.basis_pos[leaving] = usize::MAX;
        self.status[entering] = VStat::Basic;
        self.basis[row] = entering;
        self.basis_pos[entering] = row;
        self.xb[row] = entering_origin + dir * delta;
        // The leaving variable's reduced cost was zero while basic; the
        // generic sweep below then lands it at -d_q / alpha_r.
        self.d[leaving] = 0.0;

        // Record the eta for this pivot.
        let mut entries = Vec::with_capacity(self.work_col.nz.len().saturating_sub(1));
        for idx in 0..self.work_col.nz.len() {
            let i = self.work_col.nz[idx];
            if i == row {
                continue;
            }
            let a = self.work_col.val[i];
            if a.abs() > DROP_TOL {
                entries.push((i, a));
            }
        }
        self.etas.push(Eta {
            pivot_row: row,
            pivot_value: alpha_r,
            entries,
        });

        // Incremental reduced costs: d_j -= d_q * rho_j / alpha_r.
        let d_q = self.d[entering];
        let factor = d_q / alpha_r;
        for idx in 0..self.work_rho.nz.len() {
            let j = self.work_rho.nz[idx];
            if self.status[j] == VStat::Basic {
                continue;
            }
            let rho_j = self.work_rho.val[j];
            if rho_j != 0.0 {
                self.d[j] -= factor * rho_j;
            }
        }
        self.d[entering] = 0.0;

        // Devex weight update over the same pivot row.
        let w_q = self.weights[entering];
        let mut blown = false;
        for idx in 0..self.work_rho.nz.len() {
            let j = self.work_rho.nz[idx];
            if self.status[j] == VStat::Basic {
                continue;
            }
            let rho_j = self.work_rho.val[j] / alpha_r;
            let candidate = rho_j * rho_j * w_q;
            if candidate > self.weights[j] {
                self.weights[j] = candidate;
                blown |= candidate > 1e8;
            }
        }
        self.weights[leaving] = (w_q / (alpha_r * alpha_r)).max(1.0);
        if blown {
            // Reset the reference framework.
            for w in &mut self.weights {
                *w = 1.0;
            }
        }
    }

    fn extract_values(&self) -> Vec<f64> {
        (0..self.n_struct)
            .map(|var| match self.status[var] {
                VStat::Basic => self.xb[self.basis_pos[var]],
                VStat::AtLower => self.lb[var],
                VStat::AtUpper => self.ub[var],
                VStat::Free => 0.0,
            })
            .collect()
    }
}
