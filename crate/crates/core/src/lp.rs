//! Small dense linear programs.
//!
//! Maximizes `c . x` subject to `E x = f`, `G x <= h` and per-variable bounds
//! `lo <= x <= hi` (either side may be infinite). The solver is a two-phase
//! tableau simplex with Bland's rule, which cannot cycle. Problem sizes in
//! this crate stay around a hundred variables, so everything is dense.
//!
//! When the optimum is degenerate, one maximizer is returned; which vertex is
//! unspecified. Every optimal point is re-checked against the original
//! constraints before it is returned, and a point that fails the re-check is
//! reported as [`LpError::NumericalBreakdown`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {var}: lower bound {lo} exceeds upper bound {hi}")]
    InvalidBounds { var: usize, lo: f64, hi: f64 },
    #[error("non-finite data: {0}")]
    NonFinite(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    /// Tableau entries below this magnitude are never pivoted on.
    pub pivot_tol: f64,
    /// Phase-one infeasibility and reduced-cost threshold.
    pub feasibility_tol: f64,
    /// Tolerance of the independent re-check of returned points.
    pub verify_tol: f64,
    pub max_iterations: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-10,
            feasibility_tol: 1e-9,
            verify_tol: 1e-8,
            max_iterations: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub le_matrix: Vec<Vec<f64>>,
    pub le_rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A program over `n` free variables with no constraints.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            le_matrix: Vec::new(),
            le_rhs: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn equality(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn inequality(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.le_matrix.push(row);
        self.le_rhs.push(rhs);
        self
    }

    pub fn bound(mut self, var: usize, lo: f64, hi: f64) -> Self {
        self.bounds[var] = (lo, hi);
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::Dimension(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        if self.eq_matrix.len() != self.eq_rhs.len() || self.le_matrix.len() != self.le_rhs.len()
        {
            return Err(LpError::Dimension("row count differs from rhs length".into()));
        }
        for row in self.eq_matrix.iter().chain(&self.le_matrix) {
            if row.len() != n {
                return Err(LpError::Dimension(format!(
                    "constraint row has {} entries for {} variables",
                    row.len(),
                    n
                )));
            }
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.eq_matrix.iter().flatten().all(|v| v.is_finite())
            && self.le_matrix.iter().flatten().all(|v| v.is_finite())
            && self.eq_rhs.iter().chain(&self.le_rhs).all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite("objective or constraints".into()));
        }
        for (var, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::NonFinite(format!("bounds of variable {var}")));
            }
            if lo > hi {
                return Err(LpError::InvalidBounds { var, lo, hi });
            }
        }
        Ok(())
    }

    /// Independent feasibility check of `x` against the original data.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &(lo, hi)) in self.bounds.iter().enumerate() {
            worst = worst.max(lo - x[k]).max(x[k] - hi);
        }
        for (row, rhs) in self.eq_matrix.iter().zip(&self.eq_rhs) {
            let (lhs, scale) = scaled_dot(row, x);
            worst = worst.max((lhs - rhs).abs() / (1.0 + scale + rhs.abs()));
        }
        for (row, rhs) in self.le_matrix.iter().zip(&self.le_rhs) {
            let (lhs, scale) = scaled_dot(row, x);
            worst = worst.max((lhs - rhs) / (1.0 + scale + rhs.abs()));
        }
        worst
    }
}

fn scaled_dot(row: &[f64], x: &[f64]) -> (f64, f64) {
    row.iter().zip(x).fold((0.0, 0.0), |(s, m), (a, v)| {
        (s + a * v, m + (a * v).abs())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `point`; meaningless unless `Optimal`.
    pub value: f64,
    /// A maximizer when `Optimal`, otherwise empty.
    pub point: Vec<f64>,
    pub iterations: usize,
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo + s`
    Shift { col: usize, lo: f64 },
    /// `x = hi - s`
    Reflect { col: usize, hi: f64 },
    /// `x = s_pos - s_neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Reduced-cost row for maximizing `cost` over the current basis.
    fn objective_row(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = obj[b];
            if cb != 0.0 {
                for (v, t) in obj.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * t;
                }
            }
        }
        obj
    }

    fn run(
        &mut self,
        obj: &mut [f64],
        allowed: &[bool],
        cfg: &LpConfig,
    ) -> Result<PhaseOutcome, LpError> {
        loop {
            if self.iterations >= cfg.max_iterations {
                return Err(LpError::NumericalBreakdown(format!(
                    "no convergence after {} pivots",
                    self.iterations
                )));
            }
            // Bland: lowest-index improving column.
            let entering = (0..self.ncols).find(|&j| allowed[j] && obj[j] > cfg.feasibility_tol);
            let Some(c) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= cfg.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(PhaseOutcome::Unbounded),
                Some((r, _)) => self.pivot(obj, r, c),
            }
        }
    }
}

/// Solves `lp` with the default configuration.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &LpConfig::default())
}

pub fn solve_with(lp: &LinearProgram, cfg: &LpConfig) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Map original variables onto nonnegative structural columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        let map = if lo.is_finite() {
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            VarMap::Shift { col: ncols, lo }
        } else if hi.is_finite() {
            VarMap::Reflect { col: ncols, hi }
        } else {
            ncols += 1;
            VarMap::Split {
                pos: ncols - 1,
                neg: ncols,
            }
        };
        ncols += 1;
        maps.push(map);
    }
    let nstruct = ncols;

    // Rewrites a row over the original variables into structural columns.
    let transform = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; nstruct];
        let mut rhs = rhs;
        for (a, map) in row.iter().zip(&maps) {
            match *map {
                VarMap::Shift { col, lo } => {
                    out[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Reflect { col, hi } => {
                    out[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, rhs)
    };

    // (coefficients, rhs, is_inequality)
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (row, &rhs) in lp.eq_matrix.iter().zip(&lp.eq_rhs) {
        let (r, b) = transform(row, rhs);
        rows.push((r, b, false));
    }
    for (row, &rhs) in lp.le_matrix.iter().zip(&lp.le_rhs) {
        let (r, b) = transform(row, rhs);
        rows.push((r, b, true));
    }
    for &(col, width) in &upper_rows {
        let mut r = vec![0.0; nstruct];
        r[col] = 1.0;
        rows.push((r, width, true));
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.2).count();
    let needs_artificial: Vec<bool> = rows.iter().map(|(_, b, ineq)| !ineq || *b < 0.0).collect();
    let nart = needs_artificial.iter().filter(|v| **v).count();
    let total = nstruct + nslack + nart;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols: total,
        iterations: 0,
    };
    let mut slack = nstruct;
    let mut art = nstruct + nslack;
    for (k, (coeffs, rhs, ineq)) in rows.into_iter().enumerate() {
        let mut row = vec![0.0; total + 1];
        row[..nstruct].copy_from_slice(&coeffs);
        let mut basic = None;
        if ineq {
            row[slack] = 1.0;
            basic = Some(slack);
            slack += 1;
        }
        row[total] = rhs;
        if rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        if needs_artificial[k] {
            row[art] = 1.0;
            basic = Some(art);
            art += 1;
        }
        tab.rows.push(row);
        tab.basis.push(basic.expect("every row has a basic column"));
    }

    let is_artificial = |j: usize| j >= nstruct + nslack;
    let rhs_scale = 1.0 + tab.rows.iter().map(|r| r[total].abs()).fold(0.0, f64::max);

    // Phase one: drive artificials to zero.
    if nart > 0 {
        let cost: Vec<f64> = (0..total)
            .map(|j| if is_artificial(j) { -1.0 } else { 0.0 })
            .collect();
        let mut obj = tab.objective_row(&cost);
        let allowed = vec![true; total];
        tab.run(&mut obj, &allowed, cfg)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| is_artificial(b))
            .map(|(i, _)| tab.rhs(i).abs())
            .sum();
        if infeasibility > cfg.feasibility_tol * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                point: Vec::new(),
                iterations: tab.iterations,
            });
        }
        // Pivot remaining (zero-level) artificials out, or drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if is_artificial(tab.basis[i]) {
                let col = (0..nstruct + nslack)
                    .filter(|&j| tab.rows[i][j].abs() > cfg.pivot_tol)
                    .max_by(|&a, &b| {
                        tab.rows[i][a]
                            .abs()
                            .partial_cmp(&tab.rows[i][b].abs())
                            .unwrap()
                    });
                match col {
                    Some(c) => {
                        tab.pivot(&mut obj, i, c);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // Phase two on the structural and slack columns.
    let mut cost = vec![0.0; total];
    for (c, map) in lp.objective.iter().zip(&maps) {
        match *map {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Reflect { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let mut obj = tab.objective_row(&cost);
    let allowed: Vec<bool> = (0..total).map(|j| !is_artificial(j)).collect();
    if let PhaseOutcome::Unbounded = tab.run(&mut obj, &allowed, cfg)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            point: Vec::new(),
            iterations: tab.iterations,
        });
    }

    let mut s = vec![0.0; total];
    for (i, &b) in tab.basis.iter().enumerate() {
        s[b] = tab.rhs(i).max(0.0);
    }
    let point: Vec<f64> = maps
        .iter()
        .zip(&lp.bounds)
        .map(|(map, &(lo, hi))| {
            let v = match *map {
                VarMap::Shift { col, lo } => lo + s[col],
                VarMap::Reflect { col, hi } => hi - s[col],
                VarMap::Split { pos, neg } => s[pos] - s[neg],
            };
            v.clamp(lo, hi)
        })
        .collect();
    let violation = lp.max_violation(&point);
    if !(violation <= cfg.verify_tol) {
        return Err(LpError::NumericalBreakdown(format!(
            "returned point violates constraints by {violation:e}"
        )));
    }
    let value = point.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        iterations: tab.iterations,
    })
}
