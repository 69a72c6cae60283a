//! Exact-rational linear feasibility via Fourier–Motzkin elimination, used to
//! match distributions against convex combinations of basis transitions.
//! Systems here are tiny (a handful of coefficients), so the
//! doubly-exponential worst case is irrelevant; exactness is the point.

use num::{One, Signed, Zero};

use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintOp {
    Eq,
    Le,
    Ge,
}

/// `coeffs · x  op  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rat>,
    pub op: ConstraintOp,
    pub rhs: Rat,
}

/// A feasibility problem over `num_vars` rational unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearFeasibilityProblem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearFeasibilityProblem {
    pub fn new(num_vars: usize) -> Self {
        LinearFeasibilityProblem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<Rat>, op: ConstraintOp, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(LinearConstraint { coeffs, op, rhs });
    }

    /// Convenience: the convex-combination skeleton p_i ≥ 0, Σ p_i = 1.
    pub fn convex_combination(num_vars: usize) -> Self {
        let mut lp = LinearFeasibilityProblem::new(num_vars);
        for i in 0..num_vars {
            let mut c = vec![Rat::zero(); num_vars];
            c[i] = Rat::one();
            lp.push(c, ConstraintOp::Ge, Rat::zero());
        }
        lp.push(vec![Rat::one(); num_vars], ConstraintOp::Eq, Rat::one());
        lp
    }

    fn satisfied_by(&self, x: &[Rat]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: Rat = c
                .coeffs
                .iter()
                .zip(x)
                .fold(Rat::zero(), |acc, (a, v)| acc + a * v);
            match c.op {
                ConstraintOp::Eq => lhs == c.rhs,
                ConstraintOp::Le => lhs <= c.rhs,
                ConstraintOp::Ge => lhs >= c.rhs,
            }
        })
    }
}

/// `a·x ≤ b` rows only, after normalization.
#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<Rat>,
    rhs: Rat,
}

/// Returns an exact satisfying assignment, or `None` if infeasible.
pub fn lp_feasible(problem: &LinearFeasibilityProblem) -> Option<Vec<Rat>> {
    let n = problem.num_vars;

    // Normalize to ≤-rows; keep equalities separate for substitution.
    let mut eqs: Vec<Row> = Vec::new();
    let mut les: Vec<Row> = Vec::new();
    for c in &problem.constraints {
        match c.op {
            ConstraintOp::Eq => eqs.push(Row { coeffs: c.coeffs.clone(), rhs: c.rhs.clone() }),
            ConstraintOp::Le => les.push(Row { coeffs: c.coeffs.clone(), rhs: c.rhs.clone() }),
            ConstraintOp::Ge => les.push(Row {
                coeffs: c.coeffs.iter().map(|a| -a).collect(),
                rhs: -&c.rhs,
            }),
        }
    }

    // Gaussian substitution of the equalities (Σp=1 first among them).
    // subs[j] = Some((expr, const)) meaning x_j = expr·x + const over the
    // remaining variables (expr[j] = 0).
    let mut subs: Vec<Option<(Vec<Rat>, Rat)>> = vec![None; n];
    let mut pending = eqs;
    while let Some(mut row) = pending.pop() {
        apply_subs(&mut row, &subs);
        let Some(j) = row.coeffs.iter().position(|a| !a.is_zero()) else {
            if row.rhs.is_zero() {
                continue;
            }
            return None; // 0 = nonzero
        };
        let pivot = row.coeffs[j].clone();
        let expr: Vec<Rat> = row
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| if k == j { Rat::zero() } else { -(a / &pivot) })
            .collect();
        let cst = &row.rhs / &pivot;
        // Fold the new substitution into existing ones.
        for s in subs.iter_mut().flatten() {
            let factor = s.0[j].clone();
            if !factor.is_zero() {
                for (k, e) in expr.iter().enumerate() {
                    s.0[k] = &s.0[k] + &(&factor * e);
                }
                s.0[j] = Rat::zero();
                s.1 = &s.1 + &(&factor * &cst);
            }
        }
        subs[j] = Some((expr, cst));
    }
    for row in &mut les {
        apply_subs(row, &subs);
    }

    // Fourier–Motzkin on the remaining free variables.
    let free: Vec<usize> = (0..n).filter(|j| subs[*j].is_none()).collect();
    let mut stages: Vec<(usize, Vec<Row>)> = Vec::new();
    let mut system = les;
    for &j in &free {
        let mut uppers = Vec::new(); // x_j ≤ ...
        let mut lowers = Vec::new(); // x_j ≥ ...
        let mut rest = Vec::new();
        for row in system {
            if row.coeffs[j].is_positive() {
                uppers.push(row);
            } else if row.coeffs[j].is_negative() {
                lowers.push(row);
            } else {
                rest.push(row);
            }
        }
        for u in &uppers {
            for l in &lowers {
                // Combine a·x + p·x_j ≤ b (p>0) with c·x + q·x_j ≤ d (q<0):
                // eliminate x_j.
                let p = &u.coeffs[j];
                let q = &l.coeffs[j];
                let mut coeffs = Vec::with_capacity(n);
                for k in 0..n {
                    coeffs.push(&u.coeffs[k] / p - &l.coeffs[k] / q);
                }
                coeffs[j] = Rat::zero();
                let rhs = &u.rhs / p - &l.rhs / q;
                rest.push(Row { coeffs, rhs });
            }
        }
        stages.push((j, uppers.into_iter().chain(lowers).collect()));
        system = rest;
    }

    // Variable-free residue: every row must read 0 ≤ rhs.
    if system.iter().any(|r| r.rhs.is_negative()) {
        return None;
    }

    // Back-substitute a witness point, last eliminated variable first.
    let mut x = vec![Rat::zero(); n];
    for (j, bounds) in stages.iter().rev() {
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for row in bounds {
            let p = &row.coeffs[*j];
            let rest: Rat = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| k != j)
                .fold(Rat::zero(), |acc, (k, a)| acc + a * &x[k]);
            let bound = (&row.rhs - rest) / p;
            if p.is_positive() {
                hi = Some(match hi {
                    Some(h) => h.min(bound),
                    None => bound,
                });
            } else {
                lo = Some(match lo {
                    Some(l) => l.max(bound),
                    None => bound,
                });
            }
        }
        x[*j] = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => Rat::zero(),
        };
    }
    for j in (0..n).rev() {
        if let Some((expr, cst)) = &subs[j] {
            let val: Rat = expr
                .iter()
                .enumerate()
                .fold(cst.clone(), |acc, (k, a)| acc + a * &x[k]);
            x[j] = val;
        }
    }

    debug_assert!(problem.satisfied_by(&x));
    if problem.satisfied_by(&x) {
        Some(x)
    } else {
        None
    }
}

fn apply_subs(row: &mut Row, subs: &[Option<(Vec<Rat>, Rat)>]) {
    for (j, s) in subs.iter().enumerate() {
        if let Some((expr, cst)) = s {
            let factor = row.coeffs[j].clone();
            if factor.is_zero() {
                continue;
            }
            for (k, e) in expr.iter().enumerate() {
                row.coeffs[k] = &row.coeffs[k] + &(&factor * e);
            }
            row.coeffs[j] = Rat::zero();
            row.rhs = &row.rhs - &(&factor * cst);
        }
    }
}
