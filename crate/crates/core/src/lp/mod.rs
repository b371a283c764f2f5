//! Exact linear programming.
//!
//! Every program is solved by a dense two-phase simplex over [`Rational`]
//! with Bland's rule, so results are exact and deterministic. Outcomes carry
//! the data needed to check them independently: dual multipliers for optimal
//! solves, Farkas multipliers for infeasible ones, and an improving ray for
//! unbounded ones.
//!
//! # Sign conventions
//!
//! Duals satisfy `objective = Σ dual[i]·row[i] + reduced_costs`, with the
//! rows and the objective exactly as given. For a minimization this makes
//! the multiplier of a `≤` row nonpositive and of a `≥` row nonnegative; a
//! maximization flips both.
//!
//! Farkas multipliers refer to the `≤` form of each row (a `≥` row is
//! negated first), so they are nonnegative on inequality rows and free on
//! equality rows. Bound multipliers are nonnegative and multiply `x_j ≤ u_j`
//! and `-x_j ≤ -l_j` respectively.

pub mod linalg;
mod simplex;

use num_traits::{Signed, Zero};

use crate::rational::{dot, Rational};

pub use linalg::{affine_rank, DimensionMismatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A linear program with optional per-variable bounds. Variables are free
/// unless a bound is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    rows: Vec<Row>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        assert!(!objective.is_empty(), "a linear program needs at least one variable");
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    /// Zero objective; used for pure feasibility questions.
    pub fn feasibility(num_vars: usize) -> Self {
        Self::minimize(vec![Rational::zero(); num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn lower(&self, j: usize) -> Option<&Rational> {
        self.lower[j].as_ref()
    }

    pub fn upper(&self, j: usize) -> Option<&Rational> {
        self.upper[j].as_ref()
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars(), "row length must match variable count");
        self.rows.push(Row { coeffs, relation, rhs });
        self
    }

    pub fn set_lower(&mut self, j: usize, bound: Option<Rational>) -> &mut Self {
        self.lower[j] = bound;
        self
    }

    pub fn set_upper(&mut self, j: usize, bound: Option<Rational>) -> &mut Self {
        self.upper[j] = bound;
        self
    }

    /// Shorthand for a zero lower bound.
    pub fn nonneg(&mut self, j: usize) -> &mut Self {
        self.set_lower(j, Some(Rational::zero()))
    }

    pub fn with_objective(&self, sense: Sense, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), self.num_vars());
        LinearProgram { sense, objective, ..self.clone() }
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(j, v)| {
            self.lower[j].as_ref().is_none_or(|l| v >= l) && self.upper[j].as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok && self.rows.iter().all(|r| r.relation.holds(&dot(&r.coeffs, x), &r.rhs))
    }

    pub fn solve(&self) -> LpOutcome {
        simplex::solve(self, None)
    }

    /// Starts phase two from `basis` when it is primal feasible for this
    /// program, otherwise solves from scratch.
    pub fn solve_from_basis(&self, basis: &Basis) -> LpOutcome {
        simplex::solve(self, Some(basis))
    }
}

/// Internal column indices of an optimal basis; only meaningful for the
/// program that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis(pub(crate) Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub primal: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per row.
    pub dual: Vec<Rational>,
    /// `objective - Σ dual[i]·row[i]`, one entry per variable.
    pub reduced_costs: Vec<Rational>,
    pub basis: Basis,
}

impl Optimum {
    /// Dual objective `Σ dual[i]·rhs[i] + Σ reduced_cost[j]·bound[j]`, where
    /// each nonzero reduced cost is charged to the bound its sign selects.
    /// `None` when a reduced cost points at a missing bound.
    pub fn dual_objective(&self, lp: &LinearProgram) -> Option<Rational> {
        let mut total = dot(&self.dual, &lp.rows.iter().map(|r| r.rhs.clone()).collect::<Vec<_>>());
        for (j, r) in self.reduced_costs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let at_lower = matches!(
                (lp.sense, r.is_positive()),
                (Sense::Minimize, true) | (Sense::Maximize, false)
            );
            let bound = if at_lower { lp.lower(j)? } else { lp.upper(j)? };
            total += r * bound;
        }
        Some(total)
    }

    /// Stationarity, sign feasibility of every multiplier, and equal primal
    /// and dual objectives.
    pub fn certifies(&self, lp: &LinearProgram) -> bool {
        if !lp.is_feasible_point(&self.primal) || lp.objective_at(&self.primal) != self.value {
            return false;
        }
        let flip = lp.sense == Sense::Maximize;
        let signs_ok = lp.rows.iter().zip(&self.dual).all(|(row, y)| match row.relation {
            Relation::Eq => true,
            Relation::Le => (y.is_positive() && flip) || (y.is_negative() && !flip) || y.is_zero(),
            Relation::Ge => (y.is_negative() && flip) || (y.is_positive() && !flip) || y.is_zero(),
        });
        let stationary = (0..lp.num_vars()).all(|j| {
            let ay: Rational = lp.rows.iter().zip(&self.dual).map(|(r, y)| &r.coeffs[j] * y).sum();
            &lp.objective[j] - ay == self.reduced_costs[j]
        });
        signs_ok && stationary && self.dual_objective(lp).as_ref() == Some(&self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    /// Multipliers on the `≤` form of each row.
    pub rows: Vec<Rational>,
    /// Multipliers on `-x_j ≤ -l_j`.
    pub lower: Vec<Rational>,
    /// Multipliers on `x_j ≤ u_j`.
    pub upper: Vec<Rational>,
}

impl FarkasCertificate {
    /// Aggregates rows and bounds into `coeffs·x ≤ rhs`.
    pub fn aggregate(&self, lp: &LinearProgram) -> Option<(Vec<Rational>, Rational)> {
        let n = lp.num_vars();
        let mut coeffs = vec![Rational::zero(); n];
        let mut rhs = Rational::zero();
        for (row, f) in lp.rows.iter().zip(&self.rows) {
            let s = match row.relation {
                Relation::Le => f.clone(),
                Relation::Ge => -f.clone(),
                Relation::Eq => f.clone(),
            };
            if row.relation != Relation::Eq && f.is_negative() {
                return None;
            }
            for (c, a) in coeffs.iter_mut().zip(&row.coeffs) {
                *c += &s * a;
            }
            rhs += &s * &row.rhs;
        }
        for j in 0..n {
            let (lo, up) = (&self.lower[j], &self.upper[j]);
            if lo.is_negative() || up.is_negative() {
                return None;
            }
            if !lo.is_zero() {
                coeffs[j] -= lo;
                rhs -= lo * lp.lower(j)?;
            }
            if !up.is_zero() {
                coeffs[j] += up;
                rhs += up * lp.upper(j)?;
            }
        }
        Some((coeffs, rhs))
    }

    /// True when the aggregate reads `0·x ≤ r` with `r < 0`.
    pub fn proves_infeasible(&self, lp: &LinearProgram) -> bool {
        match self.aggregate(lp) {
            Some((coeffs, rhs)) => coeffs.iter().all(Zero::is_zero) && rhs.is_negative(),
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedRay {
    /// A feasible point.
    pub point: Vec<Rational>,
    /// A recession direction along which the objective improves.
    pub direction: Vec<Rational>,
}

impl UnboundedRay {
    pub fn certifies(&self, lp: &LinearProgram) -> bool {
        if !lp.is_feasible_point(&self.point) {
            return false;
        }
        let dirs_ok = self.direction.iter().enumerate().all(|(j, d)| {
            (lp.lower(j).is_none() || !d.is_negative()) && (lp.upper(j).is_none() || !d.is_positive())
        });
        let rows_ok = lp.rows.iter().all(|r| r.relation.holds(&dot(&r.coeffs, &self.direction), &Rational::zero()));
        let gain = lp.objective_at(&self.direction);
        let improving = match lp.sense {
            Sense::Minimize => gain.is_negative(),
            Sense::Maximize => gain.is_positive(),
        };
        dirs_ok && rows_ok && improving
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Optimum),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible(_) => LpStatus::Infeasible,
            LpOutcome::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.optimum().map(|o| &o.value)
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }

    /// Checks the outcome's certificate against `lp`.
    pub fn certifies(&self, lp: &LinearProgram) -> bool {
        match self {
            LpOutcome::Optimal(o) => o.certifies(lp),
            LpOutcome::Infeasible(f) => f.proves_infeasible(lp),
            LpOutcome::Unbounded(r) => r.certifies(lp),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_binding_row() {
        let mut lp = LinearProgram::minimize(ints(&[1]));
        lp.add_row(ints(&[-1]), Relation::Le, int(-5));
        let out = lp.solve();
        let o = out.optimum().unwrap();
        assert_eq!(o.primal, ints(&[5]));
        assert_eq!(o.value, int(5));
        assert_eq!(o.dual, ints(&[-1]));
        assert!(out.certifies(&lp));
    }

    #[test]
    fn example_region_vertex() {
        // Vertex (4/3, 7/3) of the three-constraint region, checked by
        // enumerating pairwise intersections in the tests below.
        let mut lp = LinearProgram::minimize(ints(&[1, 1]));
        lp.add_row(ints(&[-2, -1]), Relation::Le, int(-5));
        lp.add_row(vec![rat(-1, 2), int(-1)], Relation::Le, int(-3));
        lp.add_row(ints(&[-4, -4]), Relation::Le, int(-14));
        let out = lp.solve();
        let o = out.optimum().unwrap();
        assert_eq!(o.primal, vec![rat(4, 3), rat(7, 3)]);
        assert_eq!(o.value, rat(11, 3));
        assert!(out.certifies(&lp));
        assert!(o.dual.iter().all(|y| !y.is_positive()));
    }

    #[test]
    fn example_region_vertex_matches_pairwise_enumeration() {
        let rows = [
            (ints(&[-2, -1]), int(-5)),
            (vec![rat(-1, 2), int(-1)], int(-3)),
            (ints(&[-4, -4]), int(-14)),
        ];
        let mut best: Option<(Rational, Vec<Rational>)> = None;
        for i in 0..3 {
            for j in i + 1..3 {
                let m = vec![rows[i].0.clone(), rows[j].0.clone()];
                let Some(p) = linalg::solve_unique(&m, &[rows[i].1.clone(), rows[j].1.clone()], 2) else {
                    continue;
                };
                if rows.iter().all(|(a, b)| dot(a, &p) <= *b) {
                    let v = &p[0] + &p[1];
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, p));
                    }
                }
            }
        }
        let (v, p) = best.unwrap();
        assert_eq!(v, rat(11, 3));
        assert_eq!(p, vec![rat(4, 3), rat(7, 3)]);
    }

    #[test]
    fn trivial_infeasible_pair() {
        let mut lp = LinearProgram::feasibility(1);
        lp.add_row(ints(&[1]), Relation::Le, int(0));
        lp.add_row(ints(&[-1]), Relation::Le, int(-1));
        match lp.solve() {
            LpOutcome::Infeasible(f) => {
                assert_eq!(f.rows, ints(&[1, 1]));
                assert!(f.proves_infeasible(&lp));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_through_bounds() {
        let mut lp = LinearProgram::feasibility(2);
        lp.nonneg(0).nonneg(1);
        lp.add_row(ints(&[1, 1]), Relation::Le, int(-1));
        let out = lp.solve();
        assert_eq!(out.status(), LpStatus::Infeasible);
        assert!(out.certifies(&lp));
    }

    #[test]
    fn infeasible_with_ge_and_eq_rows() {
        let mut lp = LinearProgram::feasibility(2);
        lp.add_row(ints(&[1, 1]), Relation::Ge, int(3));
        lp.add_row(ints(&[1, 1]), Relation::Eq, int(1));
        lp.set_upper(0, Some(int(7)));
        let out = lp.solve();
        assert_eq!(out.status(), LpStatus::Infeasible);
        assert!(out.certifies(&lp));
    }

    #[test]
    fn crossed_bounds_are_certified() {
        let mut lp = LinearProgram::feasibility(1);
        lp.set_lower(0, Some(int(2))).set_upper(0, Some(int(1)));
        let out = lp.solve();
        assert_eq!(out.status(), LpStatus::Infeasible);
        assert!(out.certifies(&lp));
    }

    #[test]
    fn unbounded_ray_is_certified() {
        let mut lp = LinearProgram::maximize(ints(&[1, 0]));
        lp.add_row(ints(&[-1, 1]), Relation::Le, int(2));
        lp.nonneg(1);
        let out = lp.solve();
        assert_eq!(out.status(), LpStatus::Unbounded);
        assert!(out.certifies(&lp));
    }

    #[test]
    fn bounds_shift_and_reflect() {
        // max x0 - x1 with x0 <= 3 (upper only) and 1 <= x1 <= 4
        let mut lp = LinearProgram::maximize(ints(&[1, -1]));
        lp.set_upper(0, Some(int(3)));
        lp.set_lower(1, Some(int(1))).set_upper(1, Some(int(4)));
        let out = lp.solve();
        let o = out.optimum().unwrap();
        assert_eq!(o.primal, ints(&[3, 1]));
        assert_eq!(o.value, int(2));
        assert!(out.certifies(&lp));
    }

    #[test]
    fn equality_rows_and_redundancy() {
        let mut lp = LinearProgram::minimize(ints(&[1, 2, 3]));
        for j in 0..3 {
            lp.nonneg(j);
        }
        lp.add_row(ints(&[1, 1, 1]), Relation::Eq, int(6));
        lp.add_row(ints(&[2, 2, 2]), Relation::Eq, int(12));
        lp.add_row(ints(&[1, -1, 0]), Relation::Ge, int(-2));
        let out = lp.solve();
        let o = out.optimum().unwrap();
        assert_eq!(o.value, int(6));
        assert!(out.certifies(&lp));
    }

    #[test]
    fn warm_start_reproduces_value() {
        let mut lp = LinearProgram::minimize(ints(&[1, 1]));
        lp.add_row(ints(&[-2, -1]), Relation::Le, int(-5));
        lp.add_row(vec![rat(-1, 2), int(-1)], Relation::Le, int(-3));
        let first = lp.solve();
        let o = first.optimum().unwrap();
        let again = lp.solve_from_basis(&o.basis);
        assert_eq!(again.value(), Some(&o.value));
        assert_eq!(again, first);
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::maximize(ints(&[1, 1, 1]));
        for j in 0..3 {
            lp.nonneg(j);
        }
        lp.add_row(ints(&[1, 1, 0]), Relation::Le, int(1));
        lp.add_row(ints(&[0, 1, 1]), Relation::Le, int(1));
        lp.add_row(ints(&[1, 0, 1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), lp.solve());
    }
}
