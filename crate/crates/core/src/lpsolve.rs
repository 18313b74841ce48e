//! Dense bounded-variable revised simplex.
//!
//! The basis inverse is kept explicitly (column-major) and rebuilt from the
//! slack basis every `max(REFACTOR_EVERY, 4m)` pivots. Cold solves run a
//! two-phase primal method with artificial variables; appending a row
//! re-optimizes with the dual simplex from the previous basis, and appending
//! a column re-enters the primal method. Stalling on degenerate vertices is
//! broken by bound perturbation, with Bland's rule as the last resort.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-9;
pub const DEGENERATE_LIMIT: usize = 500;
pub const PERTURB_AFTER: usize = 50;
pub const PERTURB_SCALE: f64 = 1e-7;
pub const REFACTOR_EVERY: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Row { coeffs, relation, rhs }
    }
}

/// `min c·z` subject to linear rows and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// New program with bounds `0 <= z < ∞` on every variable.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lower[j] = lo;
        self.upper[j] = hi;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(Row::new(coeffs, relation, rhs));
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Usage("bound vectors must match the variable count".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Usage("objective coefficients must be finite".into()));
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Usage(format!("invalid bounds [{lo}, {hi}] on variable {j}")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            check_row(row, n).map_err(|e| Error::Usage(format!("row {i}: {e}")))?;
        }
        Ok(())
    }

    /// Plain-text dump for reproducing solver issues.
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "vars {} rows {}", self.num_vars(), self.rows.len());
        let _ = writeln!(s, "min {}", join(&self.objective));
        for row in &self.rows {
            let _ = writeln!(s, "row {} {} {:e}", join(&row.coeffs), row.relation, row.rhs);
        }
        let _ = writeln!(s, "lo {}", join(&self.lower));
        let _ = writeln!(s, "hi {}", join(&self.upper));
        s
    }
}

fn check_row(row: &Row, n: usize) -> std::result::Result<(), String> {
    if row.coeffs.len() != n {
        return Err(format!("has {} coefficients, expected {n}", row.coeffs.len()));
    }
    if row.coeffs.iter().any(|a| !a.is_finite()) || !row.rhs.is_finite() {
        return Err("non-finite coefficient".into());
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. On `Optimal`, `dual_values` holds one multiplier per
/// row with `c - Aᵀy` equal to `reduced_costs`.
#[derive(Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub dual_values: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub pivots: usize,
    warm: Option<Box<Simplex>>,
}

impl fmt::Debug for LpSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LpSolution")
            .field("status", &self.status)
            .field("objective_value", &self.objective_value)
            .field("values", &self.values)
            .field("dual_values", &self.dual_values)
            .finish()
    }
}

/// Solves from scratch.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let mut s = Simplex::new(lp)?;
    let status = s.solve()?;
    Ok(s.solution(status))
}

/// Appends `row` to `lp` and re-optimizes from the basis held in `solution`
/// with the dual simplex. Falls back to a cold solve when no optimal basis
/// is available.
pub fn add_row_resolve(lp: &mut LinearProgram, solution: &LpSolution, row: Row) -> Result<LpSolution> {
    check_row(&row, lp.num_vars()).map_err(Error::Usage)?;
    lp.rows.push(row.clone());
    match (&solution.warm, solution.status) {
        (Some(warm), LpStatus::Optimal) if warm.m + 1 == lp.rows.len() && warm.n == lp.num_vars() => {
            let mut s = (**warm).clone();
            let status = s.add_row(&row.coeffs, row.relation, row.rhs)?;
            Ok(s.solution(status))
        }
        _ => solve_lp(lp),
    }
}

/// Primal/dual residuals of a claimed optimum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Certificate {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementary_slackness: f64,
    pub dual_objective: f64,
    pub duality_gap: f64,
}

/// Recomputes feasibility, dual sign conditions, complementary slackness and
/// the dual objective directly from the program data.
pub fn certify(lp: &LinearProgram, sol: &LpSolution) -> Certificate {
    let n = lp.num_vars();
    let z = &sol.values;
    let y = &sol.dual_values;
    let mut cert = Certificate::default();
    let mut dual_obj = 0.0;
    for (i, row) in lp.rows.iter().enumerate() {
        let act: f64 = row.coeffs.iter().zip(z).map(|(a, v)| a * v).sum();
        let (viol, dual_viol) = match row.relation {
            Relation::Le => ((act - row.rhs).max(0.0), y[i].max(0.0)),
            Relation::Ge => ((row.rhs - act).max(0.0), (-y[i]).max(0.0)),
            Relation::Eq => ((act - row.rhs).abs(), 0.0),
        };
        cert.primal_residual = cert.primal_residual.max(viol);
        cert.dual_residual = cert.dual_residual.max(dual_viol);
        cert.complementary_slackness = cert.complementary_slackness.max((y[i] * (act - row.rhs)).abs());
        dual_obj += y[i] * row.rhs;
    }
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        cert.primal_residual = cert
            .primal_residual
            .max((lo - z[j]).max(0.0))
            .max((z[j] - hi).max(0.0));
        let d = lp.objective[j] - lp.rows.iter().zip(y).map(|(r, yi)| r.coeffs[j] * yi).sum::<f64>();
        let (bound, dual_viol) = if d > 0.0 {
            (lo, if lo.is_finite() { 0.0 } else { d })
        } else if d < 0.0 {
            (hi, if hi.is_finite() { 0.0 } else { -d })
        } else {
            (0.0, 0.0)
        };
        cert.dual_residual = cert.dual_residual.max(dual_viol);
        if bound.is_finite() {
            dual_obj += d * bound;
            cert.complementary_slackness = cert.complementary_slackness.max((d * (z[j] - bound)).abs());
        }
    }
    cert.dual_objective = dual_obj;
    cert.duality_gap = (sol.objective_value - dual_obj).abs();
    cert
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarKind {
    Structural(usize),
    Slack(usize),
    Artificial(usize, f64),
}

/// Stateful simplex solver supporting warm re-optimization after adding
/// rows or columns.
#[derive(Clone, Debug)]
pub struct Simplex {
    m: usize,
    n: usize,
    /// Structural columns as `(row, value)` pairs with non-zero values.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    kinds: Vec<VarKind>,
    /// Variable index of each structural, in structural order.
    structural: Vec<usize>,
    /// Variable index of each row's slack.
    slack: Vec<usize>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
    optimal: bool,
}

fn sparse(values: impl Iterator<Item = f64>) -> Vec<(usize, f64)> {
    values.enumerate().filter(|&(_, a)| a != 0.0).collect()
}

fn slack_bounds(rel: Relation) -> (f64, f64) {
    match rel {
        Relation::Le => (0.0, f64::INFINITY),
        Relation::Ge => (f64::NEG_INFINITY, 0.0),
        Relation::Eq => (0.0, 0.0),
    }
}

fn nonbasic_start(lo: f64, hi: f64) -> (f64, VarState) {
    if lo.is_finite() {
        (lo, VarState::AtLower)
    } else if hi.is_finite() {
        (hi, VarState::AtUpper)
    } else {
        (0.0, VarState::Free)
    }
}

impl Simplex {
    pub fn new(lp: &LinearProgram) -> Result<Self> {
        lp.validate()?;
        let m = lp.rows.len();
        let n = lp.num_vars();
        let cols: Vec<Vec<(usize, f64)>> = (0..n).map(|j| sparse(lp.rows.iter().map(|r| r.coeffs[j]))).collect();
        let mut s = Simplex {
            m,
            n,
            cols,
            rhs: lp.rows.iter().map(|r| r.rhs).collect(),
            kinds: Vec::new(),
            structural: Vec::new(),
            slack: Vec::new(),
            cost: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            x: Vec::new(),
            state: Vec::new(),
            basis: vec![usize::MAX; m],
            binv: Vec::new(),
            since_refactor: 0,
            pivots: 0,
            optimal: false,
        };
        for j in 0..n {
            let (v, st) = nonbasic_start(lp.lower[j], lp.upper[j]);
            s.structural.push(s.kinds.len());
            s.push_var(VarKind::Structural(j), lp.objective[j], lp.lower[j], lp.upper[j], v, st);
        }
        for (i, row) in lp.rows.iter().enumerate() {
            let (lo, hi) = slack_bounds(row.relation);
            s.slack.push(s.kinds.len());
            s.push_var(VarKind::Slack(i), 0.0, lo, hi, 0.0, VarState::AtLower);
        }
        Ok(s)
    }

    fn push_var(&mut self, kind: VarKind, cost: f64, lo: f64, hi: f64, x: f64, st: VarState) {
        self.kinds.push(kind);
        self.cost.push(cost);
        self.lo.push(lo);
        self.hi.push(hi);
        self.x.push(x);
        self.state.push(st);
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    /// Column `c` of `B⁻¹`, which is stored column-major.
    #[inline]
    fn binv_col(&self, c: usize) -> &[f64] {
        &self.binv[c * self.m..(c + 1) * self.m]
    }

    fn binv_row(&self, r: usize) -> Vec<f64> {
        self.binv[r..].iter().step_by(self.m).copied().collect()
    }

    fn col_dot(&self, y: &[f64], v: usize) -> f64 {
        match self.kinds[v] {
            VarKind::Structural(j) => self.cols[j].iter().map(|&(i, a)| a * y[i]).sum(),
            VarKind::Slack(i) => y[i],
            VarKind::Artificial(i, sign) => sign * y[i],
        }
    }

    fn col_norm(&self, v: usize) -> f64 {
        match self.kinds[v] {
            VarKind::Structural(j) => self.cols[j].iter().map(|(_, a)| a * a).sum::<f64>().sqrt().max(1.0),
            _ => 1.0,
        }
    }

    /// `B⁻¹ A_v`.
    fn ftran(&self, v: usize) -> Vec<f64> {
        let m = self.m;
        match self.kinds[v] {
            VarKind::Structural(j) => {
                let mut out = vec![0.0; m];
                for &(i, a) in &self.cols[j] {
                    for (o, b) in out.iter_mut().zip(self.binv_col(i)) {
                        *o += a * b;
                    }
                }
                out
            }
            VarKind::Slack(i) => self.binv_col(i).to_vec(),
            VarKind::Artificial(i, sign) => self.binv_col(i).iter().map(|b| sign * b).collect(),
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let cb: Vec<f64> = self.basis.iter().map(|&b| cost[b]).collect();
        (0..m).map(|i| self.binv_col(i).iter().zip(&cb).map(|(a, c)| a * c).sum()).collect()
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        for col in self.binv.chunks_exact_mut(m) {
            let t = col[r] / piv;
            if t != 0.0 {
                for (dst, a) in col.iter_mut().zip(alpha) {
                    *dst -= a * t;
                }
                col[r] = t;
            }
        }
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn nonzeros(&self, v: usize) -> usize {
        match self.kinds[v] {
            VarKind::Structural(j) => self.cols[j].len(),
            _ => 1,
        }
    }

    /// Rebuilds `B⁻¹` by pivoting the non-slack basic columns into the
    /// slack basis, sparsest first, and recomputes basic values. Basis
    /// positions may be reassigned.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let pivots = self.pivots;
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        let mut holder = self.slack.clone();
        let mut locked: Vec<bool> = holder.iter().map(|&s| matches!(self.state[s], VarState::Basic(_))).collect();
        let mut rest: Vec<usize> =
            self.basis.iter().copied().filter(|&v| !matches!(self.kinds[v], VarKind::Slack(_))).collect();
        rest.sort_by_key(|&v| (self.nonzeros(v), v));
        for (k, &v) in rest.iter().enumerate() {
            let alpha = self.ftran(v);
            let r = (0..m)
                .filter(|&r| !locked[r])
                .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()).then(b.cmp(&a)));
            let Some(r) = r.filter(|&r| alpha[r].abs() >= 1e-12) else {
                self.pivots = pivots;
                return Err(Error::Solver(format!(
                    "singular basis during refactorization (column {k} of {}, {pivots} pivots)",
                    rest.len()
                )));
            };
            self.pivot(r, &alpha);
            holder[r] = v;
            locked[r] = true;
        }
        self.basis = holder;
        for (r, &v) in self.basis.iter().enumerate() {
            self.state[v] = VarState::Basic(r);
        }
        self.pivots = pivots;
        self.since_refactor = 0;
        self.recompute_basic_values();
        Ok(())
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut resid = self.rhs.clone();
        for v in 0..self.kinds.len() {
            if matches!(self.state[v], VarState::Basic(_)) || self.x[v] == 0.0 {
                continue;
            }
            let xv = self.x[v];
            match self.kinds[v] {
                VarKind::Structural(j) => {
                    for &(i, a) in &self.cols[j] {
                        resid[i] -= a * xv;
                    }
                }
                VarKind::Slack(i) => resid[i] -= xv,
                VarKind::Artificial(i, sign) => resid[i] -= sign * xv,
            }
        }
        let mut xb = vec![0.0; m];
        for (i, &ri) in resid.iter().enumerate() {
            if ri != 0.0 {
                for (o, b) in xb.iter_mut().zip(self.binv_col(i)) {
                    *o += ri * b;
                }
            }
        }
        for (r, v) in xb.into_iter().enumerate() {
            self.x[self.basis[r]] = v;
        }
    }

    fn iteration_cap(&self) -> usize {
        20_000 + 50 * (self.m + self.kinds.len())
    }

    fn stall(&self, phase: &str) -> Error {
        Error::Solver(format!(
            "{phase} exceeded {} iterations ({} rows, {} variables, {} pivots)",
            self.iteration_cap(),
            self.m,
            self.kinds.len(),
            self.pivots
        ))
    }

    fn refactor_interval(&self) -> usize {
        REFACTOR_EVERY.max(4 * self.m)
    }

    fn is_fixed(&self, v: usize) -> bool {
        self.hi[v] - self.lo[v] <= 0.0
    }

    /// Primal simplex from a primal feasible basis. Returns `false` when the
    /// objective is unbounded below.
    ///
    /// A long run of degenerate pivots widens the bounds of the basic
    /// variables by tiny distinct amounts. Once optimal, the true bounds are
    /// restored and any leftover infeasibility is repaired with the dual
    /// simplex before a final unperturbed primal pass.
    fn primal(&mut self, cost: &[f64]) -> Result<bool> {
        let mut saved = Vec::new();
        let res = self.primal_pass(cost, Some(&mut saved));
        if saved.is_empty() {
            return res;
        }
        for &(v, lo, hi) in &saved {
            self.lo[v] = lo;
            self.hi[v] = hi;
            match self.state[v] {
                VarState::AtLower => self.x[v] = lo,
                VarState::AtUpper => self.x[v] = hi,
                _ => {}
            }
        }
        self.refactor()?;
        if !res? {
            return Ok(false);
        }
        if !self.dual_pass(cost, 1e-11)? {
            return Err(Error::Solver("lost feasibility while removing bound perturbation".into()));
        }
        self.primal_pass(cost, None)
    }

    fn perturb_basic_bounds(&mut self, saved: &mut Vec<(usize, f64, f64)>) {
        for r in 0..self.m {
            let b = self.basis[r];
            if self.is_fixed(b) {
                continue;
            }
            saved.push((b, self.lo[b], self.hi[b]));
            let spread = ((b as u64).wrapping_mul(2_654_435_761) % 1000) as f64 / 1000.0;
            let delta = PERTURB_SCALE * (1.0 + spread);
            if self.lo[b].is_finite() {
                self.lo[b] -= delta * (1.0 + self.lo[b].abs());
            }
            if self.hi[b].is_finite() {
                self.hi[b] += delta * (1.0 + self.hi[b].abs());
            }
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let y = self.duals(cost);
        (0..self.kinds.len())
            .map(|v| {
                if matches!(self.state[v], VarState::Basic(_)) || self.is_fixed(v) {
                    0.0
                } else {
                    cost[v] - self.col_dot(&y, v)
                }
            })
            .collect()
    }

    /// Entering candidate with the largest `d² / w`, or the lowest eligible
    /// index under Bland's rule.
    fn price(&self, cand: &[usize], d: &[f64], weights: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut enter: Option<(usize, f64, f64)> = None;
        for &v in cand {
            let st = self.state[v];
            if matches!(st, VarState::Basic(_)) || self.is_fixed(v) {
                continue;
            }
            let dv = d[v];
            let (ok, dir) = match st {
                VarState::AtLower => (dv < -OPT_TOL, 1.0),
                VarState::AtUpper => (dv > OPT_TOL, -1.0),
                _ => (dv.abs() > OPT_TOL, -dv.signum()),
            };
            if !ok {
                continue;
            }
            if bland {
                return Some((v, dir));
            }
            let score = dv * dv / weights[v];
            if enter.is_none_or(|(_, _, s)| score > s) {
                enter = Some((v, dir, score));
            }
        }
        enter.map(|(v, dir, _)| (v, dir))
    }

    /// Primal simplex with Devex pricing and incrementally updated reduced
    /// costs, refreshed from scratch at refactorizations and before
    /// declaring optimality.
    fn primal_pass(&mut self, cost: &[f64], mut perturb: Option<&mut Vec<(usize, f64, f64)>>) -> Result<bool> {
        let mut degenerate = 0usize;
        let mut iters = 0usize;
        let mut bland = false;
        let mut d = self.reduced_costs(cost);
        let mut weights: Vec<f64> =
            (0..self.kinds.len()).map(|v| if self.is_fixed(v) { 1.0 } else { self.col_norm(v).powi(2) }).collect();
        // nonbasic variables free to move, ascending; may hold stale basic entries
        let mut cand: Vec<usize> = (0..self.kinds.len())
            .filter(|&v| !matches!(self.state[v], VarState::Basic(_)) && !self.is_fixed(v))
            .collect();
        let mut fresh = true;
        loop {
            iters += 1;
            if iters > self.iteration_cap() {
                return Err(self.stall("primal simplex"));
            }
            if self.since_refactor >= self.refactor_interval() {
                self.refactor()?;
                d = self.reduced_costs(cost);
                fresh = true;
            }
            if degenerate >= PERTURB_AFTER {
                if let Some(saved) = perturb.as_deref_mut() {
                    if saved.is_empty() {
                        self.perturb_basic_bounds(saved);
                        degenerate = 0;
                    }
                }
            }
            bland |= degenerate >= DEGENERATE_LIMIT;
            let Some((v, dir)) = self.price(&cand, &d, &weights, bland) else {
                if fresh {
                    return Ok(true);
                }
                d = self.reduced_costs(cost);
                fresh = true;
                continue;
            };
            let alpha = self.ftran(v);
            let mut theta = self.hi[v] - self.lo[v];
            let mut leave: Option<(usize, f64)> = None;
            for (r, &ar) in alpha.iter().enumerate() {
                let a = dir * ar;
                let b = self.basis[r];
                let t = if a > PIVOT_TOL && self.lo[b].is_finite() {
                    (self.x[b] - self.lo[b]) / a
                } else if a < -PIVOT_TOL && self.hi[b].is_finite() {
                    (self.hi[b] - self.x[b]) / -a
                } else {
                    continue;
                };
                let t = t.max(0.0);
                let better = match leave {
                    None => t < theta,
                    Some((lr, _)) => {
                        if t < theta - 1e-12 {
                            true
                        } else if t <= theta + 1e-12 {
                            if bland {
                                b < self.basis[lr]
                            } else {
                                a.abs() > (dir * alpha[lr]).abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = t.min(theta);
                    leave = Some((r, a));
                }
            }
            if theta == f64::INFINITY {
                return Ok(false);
            }
            degenerate = if theta <= 1e-12 { degenerate + 1 } else { 0 };
            self.x[v] += dir * theta;
            for (r, &ar) in alpha.iter().enumerate() {
                let b = self.basis[r];
                self.x[b] -= dir * theta * ar;
            }
            match leave {
                None => {
                    if dir > 0.0 {
                        self.x[v] = self.hi[v];
                        self.state[v] = VarState::AtUpper;
                    } else {
                        self.x[v] = self.lo[v];
                        self.state[v] = VarState::AtLower;
                    }
                }
                Some((r, a)) => {
                    let b = self.basis[r];
                    let arq = alpha[r];
                    let rho = self.binv_row(r);
                    let step = d[v] / arq;
                    let wq = weights[v];
                    for &j in &cand {
                        if j == v || matches!(self.state[j], VarState::Basic(_)) {
                            continue;
                        }
                        let arj = self.col_dot(&rho, j);
                        if arj != 0.0 {
                            d[j] -= step * arj;
                            let ratio = arj / arq;
                            weights[j] = weights[j].max(ratio * ratio * wq);
                        }
                    }
                    d[v] = 0.0;
                    d[b] = -step;
                    weights[b] = (wq / (arq * arq)).max(1.0);
                    if a > 0.0 {
                        self.x[b] = self.lo[b];
                        self.state[b] = VarState::AtLower;
                    } else {
                        self.x[b] = self.hi[b];
                        self.state[b] = VarState::AtUpper;
                    }
                    self.pivot(r, &alpha);
                    self.basis[r] = v;
                    self.state[v] = VarState::Basic(r);
                    fresh = false;
                    if let Ok(pos) = cand.binary_search(&v) {
                        cand.remove(pos);
                    }
                    if !self.is_fixed(b) {
                        if let Err(pos) = cand.binary_search(&b) {
                            cand.insert(pos, b);
                        }
                    }
                }
            }
        }
    }

    /// Dual simplex from a dual feasible basis. Returns `false` when the
    /// problem is primal infeasible.
    fn dual(&mut self, cost: &[f64]) -> Result<bool> {
        self.dual_pass(cost, FEAS_TOL)
    }

    fn dual_pass(&mut self, cost: &[f64], feas_tol: f64) -> Result<bool> {
        let mut iters = 0usize;
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            iters += 1;
            if iters > self.iteration_cap() {
                return Err(self.stall("dual simplex"));
            }
            if self.since_refactor >= self.refactor_interval() {
                self.refactor()?;
            }
            bland |= degenerate >= DEGENERATE_LIMIT;
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let b = self.basis[r];
                let infeas = if self.x[b] < self.lo[b] - feas_tol {
                    self.lo[b] - self.x[b]
                } else if self.x[b] > self.hi[b] + feas_tol {
                    self.x[b] - self.hi[b]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((lr, li)) => {
                        if bland {
                            b < self.basis[lr]
                        } else {
                            infeas > li
                        }
                    }
                };
                if better {
                    leave = Some((r, infeas));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(true);
            };
            let b = self.basis[r];
            let going_up = self.x[b] < self.lo[b];
            let target = if going_up { self.lo[b] } else { self.hi[b] };
            let rho = self.binv_row(r);
            let y = self.duals(cost);
            let mut enter: Option<(usize, f64, f64)> = None;
            for v in 0..self.kinds.len() {
                if self.is_fixed(v) {
                    continue;
                }
                let st = self.state[v];
                if matches!(st, VarState::Basic(_)) {
                    continue;
                }
                let a = self.col_dot(&rho, v);
                let eligible = match (st, going_up) {
                    (VarState::AtLower, true) | (VarState::AtUpper, false) => a < -PIVOT_TOL,
                    (VarState::AtUpper, true) | (VarState::AtLower, false) => a > PIVOT_TOL,
                    _ => a.abs() > PIVOT_TOL,
                };
                if !eligible {
                    continue;
                }
                let d = cost[v] - self.col_dot(&y, v);
                let ratio = d.abs() / a.abs();
                let better = match enter {
                    None => true,
                    Some((ev, er, ea)) => {
                        if ratio < er - 1e-12 {
                            true
                        } else if ratio <= er + 1e-12 {
                            if bland {
                                v < ev
                            } else {
                                a.abs() > ea.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    enter = Some((v, ratio, a));
                }
            }
            let Some((v, ratio, _)) = enter else {
                return Ok(false);
            };
            degenerate = if ratio <= 1e-12 { degenerate + 1 } else { 0 };
            let alpha = self.ftran(v);
            if alpha[r].abs() < PIVOT_TOL {
                self.refactor()?;
                continue;
            }
            let delta = (self.x[b] - target) / alpha[r];
            self.x[v] += delta;
            for (k, &ak) in alpha.iter().enumerate() {
                let bk = self.basis[k];
                self.x[bk] -= delta * ak;
            }
            self.x[b] = target;
            self.state[b] = if going_up { VarState::AtLower } else { VarState::AtUpper };
            self.pivot(r, &alpha);
            self.basis[r] = v;
            self.state[v] = VarState::Basic(r);
        }
    }

    /// Cold two-phase solve.
    pub fn solve(&mut self) -> Result<LpStatus> {
        let m = self.m;
        // Reset to a slack basis with artificials where the slack cannot absorb the residual.
        self.strip_artificials();
        for &v in &self.structural {
            let (x, st) = nonbasic_start(self.lo[v], self.hi[v]);
            self.x[v] = x;
            self.state[v] = st;
        }
        let mut resid = self.rhs.clone();
        for (j, &v) in self.structural.iter().enumerate() {
            let xv = self.x[v];
            if xv != 0.0 {
                for &(i, a) in &self.cols[j] {
                    resid[i] -= a * xv;
                }
            }
        }
        self.binv = vec![0.0; m * m];
        let mut has_art = false;
        for i in 0..m {
            let s = self.slack[i];
            let r = resid[i];
            if r >= self.lo[s] && r <= self.hi[s] {
                self.x[s] = r;
                self.state[s] = VarState::Basic(i);
                self.basis[i] = s;
                self.binv[i * m + i] = 1.0;
            } else {
                let bound = if r < self.lo[s] { self.lo[s] } else { self.hi[s] };
                self.x[s] = bound;
                self.state[s] = if r < self.lo[s] { VarState::AtLower } else { VarState::AtUpper };
                let sign = if r - bound >= 0.0 { 1.0 } else { -1.0 };
                let a = self.kinds.len();
                self.push_var(VarKind::Artificial(i, sign), 0.0, 0.0, f64::INFINITY, (r - bound).abs(), VarState::Basic(i));
                self.basis[i] = a;
                self.binv[i * m + i] = sign;
                has_art = true;
            }
        }
        self.since_refactor = 0;
        self.optimal = false;

        if has_art {
            let phase1: Vec<f64> = self
                .kinds
                .iter()
                .map(|k| if matches!(k, VarKind::Artificial(..)) { 1.0 } else { 0.0 })
                .collect();
            self.primal(&phase1)?;
            self.refactor()?;
            let artificials: Vec<usize> = (0..self.kinds.len())
                .filter(|&v| matches!(self.kinds[v], VarKind::Artificial(..)))
                .collect();
            let infeas: f64 = artificials.iter().map(|&v| self.x[v].max(0.0)).sum();
            let scale = 1.0 + self.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if infeas > FEAS_TOL * scale {
                return Ok(LpStatus::Infeasible);
            }
            for v in artificials {
                self.hi[v] = 0.0;
                self.x[v] = 0.0;
                if !matches!(self.state[v], VarState::Basic(_)) {
                    self.state[v] = VarState::AtLower;
                }
            }
            self.drive_out_artificials()?;
        }
        let cost = self.cost.clone();
        if !self.primal(&cost)? {
            return Ok(LpStatus::Unbounded);
        }
        self.refactor()?;
        self.optimal = true;
        Ok(LpStatus::Optimal)
    }

    fn strip_artificials(&mut self) {
        let len = self.kinds.len();
        let keep: Vec<usize> = (0..len)
            .filter(|&v| !matches!(self.kinds[v], VarKind::Artificial(..)))
            .collect();
        if keep.len() == len {
            return;
        }
        let mut remap = vec![usize::MAX; len];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        self.kinds = keep.iter().map(|&v| self.kinds[v]).collect();
        self.cost = keep.iter().map(|&v| self.cost[v]).collect();
        self.lo = keep.iter().map(|&v| self.lo[v]).collect();
        self.hi = keep.iter().map(|&v| self.hi[v]).collect();
        self.x = keep.iter().map(|&v| self.x[v]).collect();
        self.state = keep.iter().map(|&v| self.state[v]).collect();
        self.structural = self.structural.iter().map(|&v| remap[v]).collect();
        self.slack = self.slack.iter().map(|&v| remap[v]).collect();
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        for r in 0..self.m {
            let b = self.basis[r];
            if !matches!(self.kinds[b], VarKind::Artificial(..)) {
                continue;
            }
            let rho = self.binv_row(r);
            let candidate = (0..self.kinds.len()).find(|&v| {
                !matches!(self.kinds[v], VarKind::Artificial(..))
                    && !matches!(self.state[v], VarState::Basic(_))
                    && self.col_dot(&rho, v).abs() > 1e-7
            });
            if let Some(v) = candidate {
                let alpha = self.ftran(v);
                self.x[b] = 0.0;
                self.state[b] = VarState::AtLower;
                self.pivot(r, &alpha);
                self.basis[r] = v;
                self.state[v] = VarState::Basic(r);
            }
        }
        self.refactor()
    }

    /// Appends a row over the structural variables and re-optimizes.
    pub fn add_row(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) -> Result<LpStatus> {
        check_row(&Row::new(coeffs.to_vec(), relation, rhs), self.n).map_err(Error::Usage)?;
        let m = self.m;
        for (col, &a) in self.cols.iter_mut().zip(coeffs) {
            if a != 0.0 {
                col.push((m, a));
            }
        }
        self.rhs.push(rhs);
        let (lo, hi) = slack_bounds(relation);
        let s = self.kinds.len();
        self.slack.push(s);
        let act: f64 = self.structural.iter().zip(coeffs).map(|(&v, a)| a * self.x[v]).sum();
        self.push_var(VarKind::Slack(m), 0.0, lo, hi, rhs - act, VarState::Basic(m));
        self.m = m + 1;
        // new B⁻¹ = [[B⁻¹, 0], [-a_B B⁻¹, 1]]
        let a_b: Vec<f64> = self
            .basis
            .iter()
            .map(|&b| match self.kinds[b] {
                VarKind::Structural(j) => coeffs[j],
                _ => 0.0,
            })
            .collect();
        let mut nb = vec![0.0; (m + 1) * (m + 1)];
        for c in 0..m {
            let col = &self.binv[c * m..(c + 1) * m];
            nb[c * (m + 1)..c * (m + 1) + m].copy_from_slice(col);
            nb[c * (m + 1) + m] = -col.iter().zip(&a_b).map(|(x, y)| x * y).sum::<f64>();
        }
        nb[m * (m + 1) + m] = 1.0;
        self.binv = nb;
        self.basis.push(s);
        if !self.optimal {
            return self.solve();
        }
        let cost = self.cost.clone();
        match self.dual(&cost) {
            Ok(true) => {}
            Ok(false) => {
                self.optimal = false;
                return Ok(LpStatus::Infeasible);
            }
            Err(_) => return self.solve(),
        }
        if !self.primal(&cost)? {
            self.optimal = false;
            return Ok(LpStatus::Unbounded);
        }
        Ok(LpStatus::Optimal)
    }

    /// Appends a structural variable and re-optimizes.
    pub fn add_column(&mut self, cost: f64, coeffs: &[f64], lo: f64, hi: f64) -> Result<LpStatus> {
        if coeffs.len() != self.m {
            return Err(Error::Usage(format!("column has {} entries, expected {}", coeffs.len(), self.m)));
        }
        if !(lo <= hi) || coeffs.iter().any(|a| !a.is_finite()) || !cost.is_finite() {
            return Err(Error::Usage("invalid column data".into()));
        }
        let j = self.n;
        self.cols.push(sparse(coeffs.iter().copied()));
        self.n += 1;
        let (x, st) = nonbasic_start(lo, hi);
        self.structural.push(self.kinds.len());
        self.push_var(VarKind::Structural(j), cost, lo, hi, x, st);
        if !self.optimal {
            return self.solve();
        }
        if x != 0.0 {
            self.recompute_basic_values();
            let infeasible = self
                .basis
                .iter()
                .any(|&b| self.x[b] < self.lo[b] - FEAS_TOL || self.x[b] > self.hi[b] + FEAS_TOL);
            if infeasible {
                return self.solve();
            }
        }
        self.reoptimize()
    }

    fn reoptimize(&mut self) -> Result<LpStatus> {
        let c = self.cost.clone();
        if !self.primal(&c)? {
            self.optimal = false;
            return Ok(LpStatus::Unbounded);
        }
        Ok(LpStatus::Optimal)
    }

    /// Whether structural `j` is basic in the current basis.
    pub fn is_basic(&self, j: usize) -> bool {
        matches!(self.state[self.structural[j]], VarState::Basic(_))
    }

    /// Fixes a nonbasic structural at its lower bound, taking it out of
    /// pricing without touching the basis. Returns `false` if `j` is basic
    /// or does not sit at its lower bound.
    pub fn park_column(&mut self, j: usize) -> bool {
        let v = self.structural[j];
        if self.state[v] != VarState::AtLower {
            return false;
        }
        self.hi[v] = self.lo[v];
        true
    }

    /// Gives a parked structural its upper bound back and re-optimizes.
    pub fn unpark_column(&mut self, j: usize, hi: f64) -> Result<LpStatus> {
        let v = self.structural[j];
        if !(hi >= self.lo[v]) {
            return Err(Error::Usage("invalid column bound".into()));
        }
        self.hi[v] = hi;
        if !self.optimal {
            return self.solve();
        }
        self.reoptimize()
    }

    pub fn structural_values(&self) -> Vec<f64> {
        self.structural.iter().map(|&v| self.x[v]).collect()
    }

    pub fn objective(&self) -> f64 {
        self.structural.iter().map(|&v| self.cost[v] * self.x[v]).sum()
    }

    /// Row multipliers `y = c_B B⁻¹`.
    pub fn row_duals(&self) -> Vec<f64> {
        self.duals(&self.cost)
    }

    pub fn solution(&self, status: LpStatus) -> LpSolution {
        let optimal = status == LpStatus::Optimal;
        let y = if optimal { self.row_duals() } else { vec![0.0; self.m] };
        let reduced = if optimal {
            self.structural.iter().map(|&v| self.cost[v] - self.col_dot(&y, v)).collect()
        } else {
            vec![0.0; self.n]
        };
        LpSolution {
            status,
            values: self.structural_values(),
            objective_value: if optimal { self.objective() } else { f64::NAN },
            dual_values: y,
            reduced_costs: reduced,
            pivots: self.pivots,
            warm: optimal.then(|| Box::new(self.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_certified(lp: &LinearProgram, sol: &LpSolution) {
        assert_eq!(sol.status, LpStatus::Optimal);
        let c = certify(lp, sol);
        assert!(c.primal_residual <= 1e-7, "{c:?}");
        assert!(c.dual_residual <= 1e-7, "{c:?}");
        assert!(c.complementary_slackness <= 1e-6, "{c:?}");
        assert!(c.duality_gap <= 1e-6 * (1.0 + sol.objective_value.abs()), "{c:?}");
    }

    #[test]
    fn triangle() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_row(vec![1.0, 1.0], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value + 1.0).abs() < 1e-12);
        assert_certified(&lp, &sol);
    }

    #[test]
    fn infeasible_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.add_row(vec![1.0], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + 2y s.t. x + y = 3, x - y >= -1, y free, x in [0, 10]
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.set_bounds(0, 0.0, 10.0);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![1.0, 1.0], Relation::Eq, 3.0);
        lp.add_row(vec![1.0, -1.0], Relation::Ge, -1.0);
        let sol = solve_lp(&lp).unwrap();
        // y = 3 - x, objective = 6 - x, maximize x: x = 10, y = -7
        assert!((sol.objective_value + 4.0).abs() < 1e-9, "{sol:?}");
        assert_certified(&lp, &sol);
    }

    #[test]
    fn rejects_bad_input() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(vec![1.0, 2.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Usage(_))));
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn no_rows() {
        let mut lp = LinearProgram::new(vec![1.0, -2.0]);
        lp.set_bounds(0, -1.0, 1.0);
        lp.set_bounds(1, -1.0, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value + 7.0).abs() < 1e-12);
    }

    #[test]
    fn non_binding_row_keeps_objective() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_row(vec![1.0, 1.0], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        let warm = add_row_resolve(&mut lp, &sol, Row::new(vec![1.0, 0.0], Relation::Le, 5.0)).unwrap();
        assert!((warm.objective_value - sol.objective_value).abs() < 1e-12);
        assert_certified(&lp, &warm);
    }

    #[test]
    fn violated_cut_raises_epigraph_objective() {
        // min t s.t. t >= -x0 - x1, x in [0,1]^2
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.set_bounds(2, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![1.0, 1.0, 1.0], Relation::Ge, 0.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value + 2.0).abs() < 1e-12);
        // add t >= 2 x0 + 2 x1 - 3
        let warm = add_row_resolve(&mut lp, &sol, Row::new(vec![-2.0, -2.0, 1.0], Relation::Ge, -3.0)).unwrap();
        assert!(warm.objective_value >= sol.objective_value - 1e-12);
        assert!((warm.objective_value + 1.0).abs() < 1e-9, "{warm:?}");
        assert_certified(&lp, &warm);
    }

    #[test]
    fn infeasible_after_added_row() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        let sol = solve_lp(&lp).unwrap();
        let next = add_row_resolve(&mut lp, &sol, Row::new(vec![1.0], Relation::Ge, 2.0)).unwrap();
        assert_eq!(next.status, LpStatus::Infeasible);
    }

    fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> LinearProgram {
        let mut lp = LinearProgram::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        for j in 0..n {
            let lo = rng.random_range(-1.0..0.0);
            lp.set_bounds(j, lo, lo + rng.random_range(0.5..2.0));
        }
        for _ in 0..m {
            let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rel = match rng.random_range(0..3) {
                0 => Relation::Le,
                1 => Relation::Ge,
                _ => Relation::Le,
            };
            let rhs = match rel {
                Relation::Le => rng.random_range(0.0..1.0),
                _ => rng.random_range(-1.0..0.0),
            };
            lp.add_row(coeffs, rel, rhs);
        }
        lp
    }

    #[test]
    fn warm_rows_match_scratch_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let n = rng.random_range(2..8);
            let rows = rng.random_range(1..6);
            let mut lp = random_lp(&mut rng, n, rows);
            let mut sol = solve_lp(&lp).unwrap();
            for _ in 0..4 {
                let row = random_lp(&mut rng, n, 1).rows.pop().unwrap();
                sol = add_row_resolve(&mut lp, &sol, row).unwrap();
                let cold = solve_lp(&lp).unwrap();
                assert_eq!(sol.status, cold.status);
                if cold.status == LpStatus::Optimal {
                    worst = worst.max((sol.objective_value - cold.objective_value).abs());
                    assert_certified(&lp, &sol);
                } else {
                    break;
                }
            }
        }
        assert!(worst <= 1e-7, "max deviation {worst}");
    }

    #[test]
    fn warm_columns_match_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let m = rng.random_range(1..5);
            // min c x s.t. sum x = 1, A x >= b with b <= 0, x >= 0
            let mut lp = LinearProgram::new(vec![rng.random_range(-1.0..1.0)]);
            lp.add_row(vec![1.0], Relation::Eq, 1.0);
            for _ in 0..m {
                lp.add_row(vec![rng.random_range(0.0..1.0)], Relation::Ge, rng.random_range(-1.0..0.0));
            }
            let mut s = Simplex::new(&lp).unwrap();
            assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
            for _ in 0..6 {
                let c = rng.random_range(-1.0..1.0);
                let mut col = vec![1.0];
                col.extend((0..m).map(|_| rng.random_range(-1.0..1.0)));
                let st = s.add_column(c, &col, 0.0, f64::INFINITY).unwrap();
                lp.objective.push(c);
                lp.lower.push(0.0);
                lp.upper.push(f64::INFINITY);
                for (row, a) in lp.rows.iter_mut().zip(&col) {
                    row.coeffs.push(*a);
                }
                let cold = solve_lp(&lp).unwrap();
                assert_eq!(st, cold.status);
                if st == LpStatus::Optimal {
                    assert!((s.objective() - cold.objective_value).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale-style degenerate LP that cycles under naive rules.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value + 0.05).abs() < 1e-9, "{sol:?}");
        assert_certified(&lp, &sol);
    }

    #[test]
    fn dump_lists_rows_and_bounds() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Ge, 1.0);
        let text = lp.debug_dump();
        assert!(text.starts_with("vars 2 rows 1\nmin "));
        assert!(text.contains(">= 1e0"));
        assert!(text.contains("\nhi inf inf"));
    }
}
