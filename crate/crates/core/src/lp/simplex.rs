//! Restricted master LP, solved through its dual.
//!
//! Primal: minimize `c·x` subject to `sum_{e in S_r} x_e >= 1` for each pool
//! row `r` and `0 <= x <= 1`.
//!
//! Dual: maximize `sum_r y_r - sum_e z_e` subject to
//! `sum_{r: e in S_r} y_r - z_e <= c_e` with `y, z >= 0`.
//!
//! Costs are nonnegative, so the all-slack basis of the dual is feasible and
//! no phase one is needed. A new pool row is a new dual column, which keeps
//! the current basis feasible; the tableau is therefore extended in place
//! and re-optimized from where it stopped. The primal `x` is read off the
//! reduced costs of the slack columns.

use thiserror::Error;

use crate::graph::EdgeId;

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_TOL: f64 = 1e-10;
const DEGENERATE_SWITCH: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasterError {
    #[error("row {0} is empty; every pool row must name at least one edge")]
    EmptyRow(usize),
    #[error("row {row} references edge {edge} outside 0..{m}")]
    EdgeOutOfRange { row: usize, edge: EdgeId, m: usize },
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
    #[error("dual unbounded; the restricted master reported infeasible")]
    Unbounded,
    #[error("recovered x violates row {row} by {violation:e}")]
    Inaccurate { row: usize, violation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Slack(EdgeId),
    Upper(EdgeId),
    Row(usize),
}

/// Optimal restricted-master solution with its dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual value per pool row; `sum(row_duals) - sum(upper_duals)` equals
    /// `objective` at optimality.
    pub row_duals: Vec<f64>,
    pub upper_duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub struct MasterLp {
    costs: Vec<f64>,
    columns: Vec<Column>,
    /// `m` rows; row `i` holds `B^-1 A` restricted to constraint `i`.
    tableau: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    rows: Vec<Vec<EdgeId>>,
    pivots: usize,
    max_pivots: usize,
}

impl MasterLp {
    pub fn new(costs: &[f64]) -> Self {
        let m = costs.len();
        let mut columns: Vec<Column> = (0..m).map(Column::Slack).collect();
        columns.extend((0..m).map(Column::Upper));
        let tableau = (0..m)
            .map(|i| {
                let mut row = vec![0.0; 2 * m];
                row[i] = 1.0;
                row[m + i] = -1.0;
                row
            })
            .collect();
        let mut reduced = vec![0.0; m];
        reduced.extend(std::iter::repeat_n(-1.0, m));
        MasterLp {
            costs: costs.to_vec(),
            columns,
            tableau,
            rhs: costs.to_vec(),
            basis: (0..m).collect(),
            reduced,
            rows: Vec::new(),
            pivots: 0,
            max_pivots: 200_000,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    fn objective_coeff(&self, j: usize) -> f64 {
        match self.columns[j] {
            Column::Slack(_) => 0.0,
            Column::Upper(_) => -1.0,
            Column::Row(_) => 1.0,
        }
    }

    /// Adds the row `sum_{e in edges} x_e >= 1`.
    pub fn add_row(&mut self, edges: &[EdgeId]) -> Result<(), MasterError> {
        let m = self.costs.len();
        let row = self.rows.len();
        if edges.is_empty() {
            return Err(MasterError::EmptyRow(row));
        }
        if let Some(&edge) = edges.iter().find(|&&e| e >= m) {
            return Err(MasterError::EdgeOutOfRange { row, edge, m });
        }
        // B^-1 sits in the slack block, so B^-1 a is a sum of slack columns.
        let mut price = 0.0;
        for i in 0..m {
            let entry: f64 = edges.iter().map(|&e| self.tableau[i][e]).sum();
            self.tableau[i].push(entry);
            price += self.objective_coeff(self.basis[i]) * entry;
        }
        self.columns.push(Column::Row(row));
        self.reduced.push(1.0 - price);
        self.rows.push(edges.to_vec());
        Ok(())
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.tableau[r][j];
        let width = self.columns.len();
        for k in 0..width {
            self.tableau[r][k] /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.tableau[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.tableau.len() {
            if i == r {
                continue;
            }
            let f = self.tableau[i][j];
            if f != 0.0 {
                let row = &mut self.tableau[i];
                for k in 0..width {
                    row[k] -= f * pivot_row[k];
                }
                row[j] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-12 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.reduced[j];
        for k in 0..width {
            self.reduced[k] -= f * pivot_row[k];
        }
        self.reduced[j] = 0.0;
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Re-optimizes from the current basis.
    pub fn solve(&mut self) -> Result<MasterSolution, MasterError> {
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_SWITCH;
            let entering = if bland {
                (0..self.columns.len()).find(|&j| self.reduced[j] > REDUCED_TOL)
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.columns.len() {
                    if self.reduced[j] > REDUCED_TOL && best.is_none_or(|b| self.reduced[j] > self.reduced[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(j) = entering else { break };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.tableau.len() {
                let a = self.tableau[i][j];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(MasterError::Unbounded);
            };
            degenerate = if ratio <= 1e-12 { degenerate + 1 } else { 0 };
            self.pivot(r, j);
            if self.pivots > self.max_pivots {
                return Err(MasterError::PivotLimit(self.max_pivots));
            }
        }
        self.solution()
    }

    fn solution(&self) -> Result<MasterSolution, MasterError> {
        let m = self.costs.len();
        let x: Vec<f64> = (0..m).map(|e| (-self.reduced[e]).clamp(0.0, 1.0)).collect();
        let mut row_duals = vec![0.0; self.rows.len()];
        let mut upper_duals = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            match self.columns[j] {
                Column::Row(r) => row_duals[r] = self.rhs[i].max(0.0),
                Column::Upper(e) => upper_duals[e] = self.rhs[i].max(0.0),
                Column::Slack(_) => {}
            }
        }
        for (row, edges) in self.rows.iter().enumerate() {
            let lhs: f64 = edges.iter().map(|&e| x[e]).sum();
            if lhs < 1.0 - 1e-7 {
                return Err(MasterError::Inaccurate { row, violation: 1.0 - lhs });
            }
        }
        let objective = x.iter().zip(&self.costs).map(|(a, c)| a * c).sum();
        Ok(MasterSolution { x, objective, row_duals, upper_duals, pivots: self.pivots })
    }
}

/// One-shot solve of the restricted master over `rows` with box `[0, 1]`.
pub fn solve_restricted_master(rows: &[Vec<EdgeId>], costs: &[f64]) -> Result<MasterSolution, MasterError> {
    let mut lp = MasterLp::new(costs);
    for r in rows {
        lp.add_row(r)?;
    }
    lp.solve()
}
