//! Exact rational linear programming.
//!
//! The solver is a dense two-phase tableau simplex with Bland's rule over
//! [`Rational`], so it always terminates and never rounds. Free variables are
//! split into two nonnegative parts. Inputs here are small (tens of rows), which
//! keeps the dense tableau cheap.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `a·x > rhs`
    Gt,
    /// `a·x ≥ rhs`
    Ge,
    /// `a·x = rhs`
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Constraint {
    /// Homogeneous constraint `coeffs·x rel 0`.
    pub fn homogeneous(coeffs: Vec<Rational>, rel: Relation) -> Self {
        Constraint { coeffs, rel, rhs: Rational::zero() }
    }

    pub fn new(coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
    }

    /// Exact check of this constraint at `x`.
    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.rel {
            Relation::Gt => l > self.rhs,
            Relation::Ge => l >= self.rhs,
            Relation::Eq => l == self.rhs,
        }
    }
}

/// A system of linear constraints over `num_vars` free rational variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constraints.iter().all(|c| c.rhs.is_zero())
    }

    fn check_shape(&self) -> Result<(), LpError> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::MalformedSystem(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every constraint exactly.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.holds(x))
    }
}

/// A point that satisfies a system; only constructed after exact verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    values: Vec<Rational>,
}

impl Witness {
    /// Verifies `values` against `sys` before wrapping them.
    pub fn verified(sys: &LinearSystem, values: Vec<Rational>) -> Result<Self, LpError> {
        if sys.satisfied_by(&values) {
            Ok(Witness { values })
        } else {
            Err(LpError::WitnessRejected)
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed system: {0}")]
    MalformedSystem(String),
    #[error("solver produced a point that violates the system")]
    WitnessRejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Witness),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FractionalOutcome {
    /// Supremum of the ratio together with a point of the closed system that attains it.
    Optimum { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

/// Dense simplex tableau. Row `m` is the objective (reduced costs); the last
/// column is the right-hand side.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let t = &f * &pivot_row[j];
                row[j] -= t;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Maximizes the objective held in row `m` (stored as `c_j − z_j`).
    /// Columns with `allowed[j] == false` never enter. Returns `false` if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let m = self.m();
        loop {
            let entering = (0..self.ncols).find(|&j| allowed[j] && self.rows[m][j].is_positive());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rows[i][self.ncols] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let m = self.m();
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
        }
        self.rows[m] = obj;
    }
}

/// Maximizes `objective·x` subject to `sys` with all variables free.
/// Strict constraints are treated as non-strict here.
pub fn solve(sys: &LinearSystem, objective: &[Rational]) -> Result<LpOutcome, LpError> {
    sys.check_shape()?;
    if objective.len() != sys.num_vars {
        return Err(LpError::MalformedSystem("objective length differs from variable count".into()));
    }
    let nv = sys.num_vars;
    let m = sys.constraints.len();
    let n_slack = sys.constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    // Columns: x+ (nv), x- (nv), slacks, artificials (m).
    let art0 = 2 * nv + n_slack;
    let ncols = art0 + m;
    let mut rows = Vec::with_capacity(m + 1);
    let mut slack = 2 * nv;
    for (i, c) in sys.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            if !a.is_zero() {
                row[j] = a.clone();
                row[nv + j] = -a;
            }
        }
        if c.rel != Relation::Eq {
            row[slack] = -Rational::one();
            slack += 1;
        }
        row[ncols] = c.rhs.clone();
        if c.rhs.is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
        row[art0 + i] = Rational::one();
        rows.push(row);
    }
    rows.push(vec![Rational::zero(); ncols + 1]);
    let mut t = Tableau { rows, basis: (art0..art0 + m).collect(), ncols };

    // Phase 1: maximize −Σ artificials.
    let mut cost1 = vec![Rational::zero(); ncols];
    for c in cost1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    t.set_objective(&cost1);
    let all = vec![true; ncols];
    t.optimize(&all);
    let art_sum: Rational = (0..m).filter(|&i| t.basis[i] >= art0).map(|i| t.rows[i][ncols].clone()).sum();
    if art_sum.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= art0 {
            if let Some(c) = (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, c);
            }
        }
    }

    // Phase 2 with artificials barred from entering.
    let mut cost2 = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        cost2[j] = c.clone();
        cost2[nv + j] = -c;
    }
    t.set_objective(&cost2);
    let mut allowed = vec![true; ncols];
    for a in allowed.iter_mut().skip(art0) {
        *a = false;
    }
    if !t.optimize(&allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut z = vec![Rational::zero(); ncols];
    for i in 0..m {
        z[t.basis[i]] = t.rows[i][ncols].clone();
    }
    let x: Vec<Rational> = (0..nv).map(|j| &z[j] - &z[nv + j]).collect();
    let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, value })
}

/// Strict feasibility of a homogeneous system.
///
/// Each `a·x > 0` becomes `a·x ≥ 1`, which loses nothing because solutions of a
/// homogeneous system can be scaled. The returned witness satisfies the original
/// strict constraints exactly.
pub fn feasible_strict(sys: &LinearSystem) -> Result<Feasibility, LpError> {
    sys.check_shape()?;
    if !sys.is_homogeneous() {
        return Err(LpError::MalformedSystem("strict feasibility needs a homogeneous system".into()));
    }
    let mut scaled = LinearSystem::new(sys.num_vars);
    for c in &sys.constraints {
        let rhs = if c.rel == Relation::Gt { Rational::one() } else { Rational::zero() };
        let rel = if c.rel == Relation::Gt { Relation::Ge } else { c.rel };
        scaled.push(Constraint::new(c.coeffs.clone(), rel, rhs));
    }
    match solve(&scaled, &vec![Rational::zero(); sys.num_vars])? {
        LpOutcome::Optimal { x, .. } => Ok(Feasibility::Feasible(Witness::verified(sys, x)?)),
        LpOutcome::Infeasible => Ok(Feasibility::Infeasible),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Feasibility of a general (possibly inhomogeneous) system with strict rows.
///
/// Uses an extra homogenizing variable `t > 0`: `a·x − rhs·t rel 0`.
pub fn feasible(sys: &LinearSystem) -> Result<Feasibility, LpError> {
    sys.check_shape()?;
    let nv = sys.num_vars;
    let mut h = LinearSystem::new(nv + 1);
    for c in &sys.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.push(-&c.rhs);
        h.push(Constraint::homogeneous(coeffs, c.rel));
    }
    let mut t_pos = vec![Rational::zero(); nv + 1];
    t_pos[nv] = Rational::one();
    h.push(Constraint::homogeneous(t_pos, Relation::Gt));
    match feasible_strict(&h)? {
        Feasibility::Infeasible => Ok(Feasibility::Infeasible),
        Feasibility::Feasible(w) => {
            let v = w.into_values();
            let t = &v[nv];
            let x = v[..nv].iter().map(|x| x / t).collect();
            Ok(Feasibility::Feasible(Witness::verified(sys, x)?))
        }
    }
}

/// Supremum of `(c·x) / (d·x)` over the closure of `sys` via the Charnes–Cooper
/// substitution `y = x·τ`, `τ = 1/(d·x)`.
///
/// The caller guarantees `d·x > 0` on the feasible region.
pub fn maximize_linear_fractional(
    c: &[Rational],
    d: &[Rational],
    sys: &LinearSystem,
) -> Result<FractionalOutcome, LpError> {
    sys.check_shape()?;
    let nv = sys.num_vars;
    if c.len() != nv || d.len() != nv {
        return Err(LpError::MalformedSystem("objective length differs from variable count".into()));
    }
    // Variables (y, τ).
    let mut t = LinearSystem::new(nv + 1);
    for k in &sys.constraints {
        let mut coeffs = k.coeffs.clone();
        coeffs.push(-&k.rhs);
        let rel = if k.rel == Relation::Gt { Relation::Ge } else { k.rel };
        t.push(Constraint::homogeneous(coeffs, rel));
    }
    let mut dd = d.to_vec();
    dd.push(Rational::zero());
    t.push(Constraint::new(dd, Relation::Eq, Rational::one()));
    let mut tau = vec![Rational::zero(); nv + 1];
    tau[nv] = Rational::one();
    t.push(Constraint::homogeneous(tau, Relation::Ge));
    let mut obj = c.to_vec();
    obj.push(Rational::zero());
    Ok(match solve(&t, &obj)? {
        LpOutcome::Infeasible => FractionalOutcome::Infeasible,
        LpOutcome::Unbounded => FractionalOutcome::Unbounded,
        LpOutcome::Optimal { x, value } => {
            let tau = &x[nv];
            let point = if tau.is_positive() {
                x[..nv].iter().map(|v| v / tau).collect()
            } else {
                x[..nv].to_vec()
            };
            FractionalOutcome::Optimum { value, point }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn row(c: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(c.iter().map(|&v| int(v)).collect(), rel, int(rhs))
    }

    #[test]
    fn strict_examples() {
        let mut s = LinearSystem::new(2);
        s.push(row(&[1, -1], Relation::Gt, 0));
        let Feasibility::Feasible(w) = feasible_strict(&s).unwrap() else { panic!() };
        assert!(w.values()[0] > w.values()[1]);

        let mut s = LinearSystem::new(1);
        s.push(row(&[1], Relation::Gt, 0));
        s.push(row(&[-1], Relation::Gt, 0));
        assert_eq!(feasible_strict(&s).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn two_class_order_system_is_infeasible() {
        // Variables (p1, p2, q1, q2):
        // q1−p1 < q2−p2 < q1−p2 < q2−p1.
        let mut s = LinearSystem::new(4);
        s.push(row(&[1, -1, -1, 1], Relation::Gt, 0));
        s.push(row(&[0, 0, 1, -1], Relation::Gt, 0));
        s.push(row(&[-1, 1, -1, 1], Relation::Gt, 0));
        assert_eq!(feasible_strict(&s).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn inhomogeneous_rejected_by_strict_entry() {
        let mut s = LinearSystem::new(1);
        s.push(row(&[1], Relation::Ge, 1));
        assert!(matches!(feasible_strict(&s), Err(LpError::MalformedSystem(_))));
        assert!(feasible(&s).unwrap().is_feasible());
    }

    #[test]
    fn malformed_rows_are_reported() {
        let mut s = LinearSystem::new(2);
        s.push(row(&[1], Relation::Gt, 0));
        assert!(matches!(feasible_strict(&s), Err(LpError::MalformedSystem(_))));
    }

    #[test]
    fn linear_program_basics() {
        // max x + y s.t. x ≤ 2, y ≤ 3, x + 2y ≤ 7
        let mut s = LinearSystem::new(2);
        s.push(row(&[-1, 0], Relation::Ge, -2));
        s.push(row(&[0, -1], Relation::Ge, -3));
        s.push(row(&[-1, -2], Relation::Ge, -7));
        let LpOutcome::Optimal { value, .. } = solve(&s, &[int(1), int(1)]).unwrap() else { panic!() };
        assert_eq!(value, rat(9, 2));
        assert_eq!(solve(&s, &[int(-1), int(0)]).unwrap(), LpOutcome::Unbounded);
        s.push(row(&[1, 0], Relation::Ge, 5));
        assert_eq!(solve(&s, &[int(1), int(1)]).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn fractional_examples() {
        // max x1/x2 s.t. x1 ≤ x2, x1 ≥ 0, x2 ≥ 1 → 1
        let mut s = LinearSystem::new(2);
        s.push(row(&[-1, 1], Relation::Ge, 0));
        s.push(row(&[1, 0], Relation::Ge, 0));
        s.push(row(&[0, 1], Relation::Ge, 1));
        let FractionalOutcome::Optimum { value, .. } =
            maximize_linear_fractional(&[int(1), int(0)], &[int(0), int(1)], &s).unwrap()
        else {
            panic!()
        };
        assert_eq!(value, int(1));

        // max (x1−x2)/x3 s.t. x1−x2 ≤ 2x3, x3 ≥ 1 → 2
        let mut s = LinearSystem::new(3);
        s.push(row(&[-1, 1, 2], Relation::Ge, 0));
        s.push(row(&[0, 0, 1], Relation::Ge, 1));
        let FractionalOutcome::Optimum { value, point } =
            maximize_linear_fractional(&[int(1), int(-1), int(0)], &[int(0), int(0), int(1)], &s).unwrap()
        else {
            panic!()
        };
        assert_eq!(value, int(2));
        assert_eq!(&point[0] - &point[1], int(2) * &point[2]);

        // Unbounded ratio.
        let mut s = LinearSystem::new(2);
        s.push(row(&[0, 1], Relation::Ge, 1));
        assert_eq!(
            maximize_linear_fractional(&[int(1), int(0)], &[int(0), int(1)], &s).unwrap(),
            FractionalOutcome::Unbounded
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// Any feasible verdict comes with a point that satisfies every strict row;
        /// infeasible verdicts are cross-checked by random probing not finding a point.
        #[test]
        fn strict_witnesses_are_sound(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..7)) {
            let mut s = LinearSystem::new(3);
            for r in &rows {
                s.push(row(r, Relation::Gt, 0));
            }
            match feasible_strict(&s).unwrap() {
                Feasibility::Feasible(w) => prop_assert!(s.satisfied_by(w.values())),
                Feasibility::Infeasible => {
                    for a in -4i64..=4 { for b in -4i64..=4 { for c in -4i64..=4 {
                        prop_assert!(!s.satisfied_by(&[int(a), int(b), int(c)]));
                    }}}
                }
            }
        }
    }
}
