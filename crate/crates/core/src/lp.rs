//! A small dense two-phase simplex over exact rationals.
//!
//! Variables are free; constraints are `≤`, `≥` or `=`. Bland's rule is used
//! for both entering and leaving variables, so the method always terminates.

use num_traits::{One, Signed, Zero};

use crate::matrix::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
struct Constraint {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    /// An optimal point, or any feasible point when there is no objective.
    Optimal(Vec<Rational>),
}

impl LpOutcome {
    pub fn point(self) -> Option<Vec<Rational>> {
        match self {
            LpOutcome::Optimal(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// `minimize cᵀx` subject to linear constraints over free variables.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    constraints: Vec<Constraint>,
    objective: Option<Vec<Rational>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn minimize(&mut self, objective: Vec<Rational>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars, "objective width");
        self.objective = Some(objective);
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns: `[p (nv) | q (nv) | slack | artificial (m)]`.
    structural: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let nv = lp.num_vars;
        let m = lp.constraints.len();
        let slacks = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let structural = 2 * nv + slacks;
        let width = structural + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut slack_col = 2 * nv;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = a.clone();
                row[nv + j] = -a.clone();
            }
            match c.relation {
                Relation::Le => {
                    row[slack_col] = Rational::one();
                    slack_col += 1;
                }
                Relation::Ge => {
                    row[slack_col] = -Rational::one();
                    slack_col += 1;
                }
                Relation::Eq => {}
            }
            row[width - 1] = c.rhs.clone();
            if c.rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[structural + i] = Rational::one();
            rows.push(row);
        }
        Tableau {
            rows,
            basis: (0..m).map(|i| structural + i).collect(),
            structural,
            width,
        }
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= p * &f;
                }
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= p * &f;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex on reduced costs `cost` (last entry: minus the
    /// objective value). Only columns `< allowed` may enter.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, cost: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, cost);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let nv = lp.num_vars;

        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![Rational::zero(); self.width];
        for row in &self.rows {
            for j in 0..self.structural {
                cost[j] -= &row[j];
            }
            cost[self.width - 1] -= &row[self.width - 1];
        }
        self.optimize(&mut cost, self.structural);
        if !cost[self.width - 1].is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining (zero-valued) artificials out of the basis.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.structural {
                match (0..self.structural).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j, &mut cost),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        if let Some(obj) = &lp.objective {
            let mut c = vec![Rational::zero(); self.width];
            for (j, v) in obj.iter().enumerate() {
                c[j] = v.clone();
                c[nv + j] = -v.clone();
            }
            for (i, &b) in self.basis.iter().enumerate() {
                if c[b].is_zero() {
                    continue;
                }
                let cb = c[b].clone();
                let row = &self.rows[i];
                for (x, a) in c.iter_mut().zip(row) {
                    if !a.is_zero() {
                        *x -= a * &cb;
                    }
                }
            }
            if !self.optimize(&mut c, self.structural) {
                return LpOutcome::Unbounded;
            }
        }

        let mut values = vec![Rational::zero(); self.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                values[b] = self.rhs(i).clone();
            }
        }
        LpOutcome::Optimal((0..nv).map(|j| &values[j] - &values[nv + j]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn feasible_box() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(v(&[1, 0]), Relation::Ge, int(1))
            .constrain(v(&[0, 1]), Relation::Le, int(-2));
        let x = lp.solve().point().unwrap();
        assert!(x[0] >= int(1));
        assert!(x[1] <= int(-2));
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(v(&[1]), Relation::Ge, int(1))
            .constrain(v(&[1]), Relation::Le, int(0));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn equality_with_redundant_rows() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(v(&[1, 1]), Relation::Eq, int(2))
            .constrain(v(&[2, 2]), Relation::Eq, int(4))
            .constrain(v(&[1, -1]), Relation::Eq, int(0));
        assert_eq!(lp.solve().point().unwrap(), v(&[1, 1]));
    }

    #[test]
    fn optimum_is_exact() {
        // min x + y  s.t. x + 2y >= 3, 3x + y >= 4  -> (1, 1)
        let mut lp = LinearProgram::new(2);
        lp.constrain(v(&[1, 2]), Relation::Ge, int(3))
            .constrain(v(&[3, 1]), Relation::Ge, int(4))
            .minimize(v(&[1, 1]));
        assert_eq!(lp.solve().point().unwrap(), v(&[1, 1]));

        // min x  s.t. 3x >= 1 -> 1/3
        let mut lp = LinearProgram::new(1);
        lp.constrain(v(&[3]), Relation::Ge, int(1)).minimize(v(&[1]));
        assert_eq!(lp.solve().point().unwrap(), vec![rat(1, 3)]);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(v(&[1]), Relation::Le, int(0)).minimize(v(&[1]));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn no_constraints() {
        assert_eq!(LinearProgram::new(2).solve(), LpOutcome::Optimal(v(&[0, 0])));
    }
}
