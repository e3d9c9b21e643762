//! Dense two-phase simplex method with Bland's rule.
//!
//! Problems are `minimize c.x` subject to linear rows and `x >= 0`. The
//! programs produced by the geodesic search have a few dozen variables, so a
//! dense tableau is plenty.

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `sum coeffs[i] * x[i] (rel) rhs`, with `coeffs` given sparsely.
    pub fn add(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(i, c) in terms {
            coeffs[i] += c;
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over the columns allowed by `allowed`. Bland's rule:
    /// smallest improving column enters, ties in the ratio test leave by
    /// smallest basic index.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        let m = self.rows.len();
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let reduced = cost[j]
                    - (0..m)
                        .map(|i| cost[self.basis[i]] * self.rows[i][j])
                        .sum::<f64>();
                if reduced < -EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][c];
                if a > EPS {
                    let ratio = self.rows[i][self.ncols] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
        }
    }
}

/// Solves the program to optimality (tolerance `1e-9`).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    let m = lp.constraints.len();

    // normalize to nonnegative right-hand sides
    let rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
    };
    let (mut s, mut a) = (n, art_start);
    for (coeffs, rel, rhs) in &rows {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(coeffs);
        row[ncols] = *rhs;
        match rel {
            Relation::Le => {
                row[s] = 1.0;
                tab.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                tab.basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = 1.0;
                tab.basis.push(a);
                a += 1;
            }
        }
        tab.rows.push(row);
    }

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        tab.optimize(&phase1, &|_| true)?;
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= art_start)
            .map(|i| tab.rows[i][ncols])
            .sum();
        if infeas > 1e-7 {
            return Err(Error::Infeasible);
        }
        // drive remaining artificials out of the basis
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| tab.rows[i][j].abs() > EPS) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        // redundant row
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(&lp.objective);
    tab.optimize(&cost, &|j| j < art_start)?;

    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][ncols].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // maximize 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add(&[(0, 1.0)], Relation::Le, 4.0);
        lp.add(&[(1, 2.0)], Relation::Le, 12.0);
        lp.add(&[(0, 3.0), (1, 2.0)], Relation::Le, 18.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value + 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn single_segment_reproduces_sup_metric() {
        // t >= 1/2 |x_e - y_e| for x = (0, 0), y = (2, 6)
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        for d in [2.0f64, 6.0] {
            lp.add(&[(0, 1.0)], Relation::Ge, 0.5 * d);
            lp.add(&[(0, 1.0)], Relation::Ge, -0.5 * d);
        }
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_infeasibility() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(&[(0, 1.0), (1, 1.0)], Relation::Eq, 3.0);
        lp.add(&[(0, 1.0)], Relation::Ge, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 3.0).abs() < 1e-9);

        let mut bad = LinearProgram::new(1);
        bad.objective = vec![1.0];
        bad.add(&[(0, 1.0)], Relation::Le, 1.0);
        bad.add(&[(0, 1.0)], Relation::Ge, 2.0);
        assert!(matches!(solve_lp(&bad), Err(Error::Infeasible)));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![-1.0];
        lp.add(&[(0, 1.0)], Relation::Ge, 0.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Unbounded)));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
        lp.add(&[(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
        lp.add(&[(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
        lp.add(&[(2, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value + 0.05).abs() < 1e-9);
    }
}
