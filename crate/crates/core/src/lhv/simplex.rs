//! Dense two-phase simplex for small equality-form programs
//! `A x = b, x >= 0`.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, lowest
//! basic index breaks ratio ties), so degenerate vertices cannot cycle.

use crate::error::{Error, Result};

/// Phase-one optima above this are reported as infeasible.
pub const INFEASIBILITY_THRESHOLD: f64 = 1e-7;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOne {
    Feasible(Vec<f64>),
    Infeasible { artificial_sum: f64 },
}

struct Tableau {
    // m rows of n + m coefficients followed by the right-hand side
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
}

impl Tableau {
    fn new(a: &[Vec<f64>], b: &[f64], n: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let m = a.len();
        let mut rows = Vec::with_capacity(m);
        for (i, (row, &rhs)) in a.iter().zip(b).enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("constraint row {i} has non-finite entries")));
            }
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            let mut t: Vec<f64> = row.iter().map(|v| sign * v).collect();
            t.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            t.push(sign * rhs);
            rows.push(t);
        }
        Ok(Self { rows, basis: (n..n + m).collect(), n, cols: n + m })
    }

    fn width(&self) -> usize {
        self.cols
    }

    fn rhs(&self, i: usize) -> f64 {
        *self.rows[i].last().expect("rhs column")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                r.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Minimizes `cost · x` over the columns flagged in `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.width()).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j) < -COST_EPS
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if r[col] > PIVOT_EPS {
                    let ratio = self.rhs(i) / r[col];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-14 || (ratio <= best + 1e-14 && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::NonConvergence { what: "simplex pivoting", iterations: MAX_PIVOTS })
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        cost[j] - self.rows.iter().zip(&self.basis).map(|(r, &k)| cost[k] * r[j]).sum::<f64>()
    }

    fn value(&self, cost: &[f64]) -> f64 {
        self.basis.iter().enumerate().map(|(i, &k)| cost[k] * self.rhs(i)).sum()
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &k) in self.basis.iter().enumerate() {
            if k < self.n {
                x[k] = self.rhs(i).max(0.0);
            }
        }
        x
    }

    fn phase_one(&mut self) -> Result<f64> {
        let width = self.width();
        let cost: Vec<f64> = (0..width).map(|j| if j >= self.n { 1.0 } else { 0.0 }).collect();
        self.optimize(&cost, &vec![true; width])?;
        Ok(self.value(&cost))
    }

    // Pivots zero-level artificials out of the basis and drops rows that
    // turn out to be redundant.
    fn purge_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n {
                match (0..self.n).find(|&j| self.rows[i][j].abs() > 1e-9) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

/// Finds a point of `A x = b, x >= 0` or reports the optimal sum of the
/// artificial variables.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], n: usize) -> Result<PhaseOne> {
    let mut t = Tableau::new(a, b, n)?;
    let sum = t.phase_one()?;
    if sum > INFEASIBILITY_THRESHOLD {
        return Ok(PhaseOne::Infeasible { artificial_sum: sum });
    }
    Ok(PhaseOne::Feasible(t.solution()))
}

/// Minimizes `c · x` subject to `A x = b, x >= 0`; returns the optimum and
/// an optimal vertex.
pub fn minimize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = c.len();
    let mut t = Tableau::new(a, b, n)?;
    let sum = t.phase_one()?;
    if sum > INFEASIBILITY_THRESHOLD {
        return Err(Error::Infeasible(sum));
    }
    t.purge_artificials();
    let mut cost = c.to_vec();
    cost.resize(t.width(), 0.0);
    let allowed: Vec<bool> = (0..t.width()).map(|j| j < n).collect();
    t.optimize(&cost, &allowed)?;
    let x = t.solution();
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok((value, x))
}
