//! The decomposable problem
//!
//! ```text
//! min cᵀx + dᵀy   s.t.  Hx + Ay ≤ b,  x ∈ S,  y ∈ ℝᵏ
//! ```
//!
//! together with its subproblem value function `z(x) = min{dᵀy : Ay ≤ b - Hx}`
//! and the epigraph `epi(z) = {(x, η) : ∃y, Ay ≤ b - Hx, dᵀy ≤ η}`.

use num_traits::{Signed, Zero};

use crate::lp::{linalg, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::{dot, zeros, Extended, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("{what}: expected length {expected}, found {found}")]
    Dimension { what: String, expected: usize, found: usize },
    #[error("an instance needs at least one linking row")]
    NoLinkingRows,
    #[error("master and subproblem dimensions must both be at least one")]
    EmptyBlock,
    #[error("a finite master domain needs at least one point")]
    EmptyFiniteDomain,
    #[error("the epigraph of the value function is empty")]
    EmptyEpigraph,
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::Dimension { what: what.to_string(), expected, found })
    }
}

/// The set `S` the master variables live in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MasterDomain {
    /// `{x : Gx ≤ g}`
    Polyhedral { g_matrix: Vec<Vec<Rational>>, g_rhs: Vec<Rational> },
    Finite { points: Vec<Vec<Rational>> },
}

impl MasterDomain {
    /// All of ℝⁿ.
    pub fn free() -> Self {
        MasterDomain::Polyhedral { g_matrix: Vec::new(), g_rhs: Vec::new() }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        match self {
            MasterDomain::Polyhedral { g_matrix, g_rhs } => {
                g_matrix.iter().zip(g_rhs).all(|(row, g)| dot(row, x) <= *g)
            }
            MasterDomain::Finite { points } => points.iter().any(|p| p.as_slice() == x),
        }
    }
}

/// A point `(x, η)` of master space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpiPoint {
    pub x: Vec<Rational>,
    pub eta: Rational,
}

impl EpiPoint {
    pub fn new(x: Vec<Rational>, eta: Rational) -> Self {
        EpiPoint { x, eta }
    }

    /// `(x₁, …, xₙ, η)`
    pub fn coords(&self) -> Vec<Rational> {
        let mut v = self.x.clone();
        v.push(self.eta.clone());
        v
    }

    pub fn from_coords(mut coords: Vec<Rational>) -> Self {
        let eta = coords.pop().expect("a master-space point has at least the η coordinate");
        EpiPoint { x: coords, eta }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    c: Vec<Rational>,
    d: Vec<Rational>,
    h: Vec<Vec<Rational>>,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    master: MasterDomain,
    eta_lower_bound: Rational,
}

impl Instance {
    /// `h` and `a` are row-major with one row per linking constraint.
    pub fn new(
        c: Vec<Rational>,
        d: Vec<Rational>,
        h: Vec<Vec<Rational>>,
        a: Vec<Vec<Rational>>,
        b: Vec<Rational>,
        master: MasterDomain,
        eta_lower_bound: Rational,
    ) -> Result<Self, ModelError> {
        let (n, k, m) = (c.len(), d.len(), b.len());
        if n == 0 || k == 0 {
            return Err(ModelError::EmptyBlock);
        }
        if m == 0 {
            return Err(ModelError::NoLinkingRows);
        }
        check_len("H rows", m, h.len())?;
        check_len("A rows", m, a.len())?;
        for (i, row) in h.iter().enumerate() {
            check_len(&format!("H row {i}"), n, row.len())?;
        }
        for (i, row) in a.iter().enumerate() {
            check_len(&format!("A row {i}"), k, row.len())?;
        }
        match &master {
            MasterDomain::Polyhedral { g_matrix, g_rhs } => {
                check_len("master g", g_matrix.len(), g_rhs.len())?;
                for (i, row) in g_matrix.iter().enumerate() {
                    check_len(&format!("master G row {i}"), n, row.len())?;
                }
            }
            MasterDomain::Finite { points } => {
                if points.is_empty() {
                    return Err(ModelError::EmptyFiniteDomain);
                }
                for (i, p) in points.iter().enumerate() {
                    check_len(&format!("master point {i}"), n, p.len())?;
                }
            }
        }
        Ok(Instance { c, d, h, a, b, master, eta_lower_bound })
    }

    /// Master dimension.
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Subproblem dimension.
    pub fn k(&self) -> usize {
        self.d.len()
    }

    /// Number of linking rows.
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    pub fn h(&self) -> &[Vec<Rational>] {
        &self.h
    }

    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn master(&self) -> &MasterDomain {
        &self.master
    }

    pub fn eta_lower_bound(&self) -> &Rational {
        &self.eta_lower_bound
    }

    pub fn with_master(&self, master: MasterDomain) -> Result<Self, ModelError> {
        Instance::new(
            self.c.clone(),
            self.d.clone(),
            self.h.clone(),
            self.a.clone(),
            self.b.clone(),
            master,
            self.eta_lower_bound.clone(),
        )
    }

    /// Multiplies linking row `i` (its `H`, `A` and `b` entries) by `factor`.
    /// Panics unless `factor > 0`.
    pub fn scale_row(&self, i: usize, factor: &Rational) -> Self {
        assert!(factor.is_positive(), "row scaling factor must be positive");
        let mut out = self.clone();
        for v in out.h[i].iter_mut().chain(out.a[i].iter_mut()) {
            *v *= factor;
        }
        out.b[i] *= factor;
        out
    }

    /// `b - Hx`
    pub fn residual_rhs(&self, x: &[Rational]) -> Vec<Rational> {
        self.h.iter().zip(&self.b).map(|(row, b)| b - dot(row, x)).collect()
    }

    /// `Hω`
    pub fn h_times(&self, omega: &[Rational]) -> Vec<Rational> {
        self.h.iter().map(|row| dot(row, omega)).collect()
    }

    /// `Hᵀγ`
    pub fn h_transpose_times(&self, gamma: &[Rational]) -> Vec<Rational> {
        (0..self.n())
            .map(|j| self.h.iter().zip(gamma).map(|(row, g)| &row[j] * g).sum())
            .collect()
    }

    fn check_x(&self, x: &[Rational]) -> Result<(), ModelError> {
        check_len("x", self.n(), x.len())
    }

    /// The feasibility system in `y` for a master point: the linking rows
    /// `Ay ≤ b - Hx*` followed by the objective row `dᵀy ≤ η*`.
    pub fn feasibility_system(&self, point: &EpiPoint) -> LinearProgram {
        let mut lp = LinearProgram::feasibility(self.k());
        for (row, r) in self.a.iter().zip(self.residual_rhs(&point.x)) {
            lp.add_row(row.clone(), Relation::Le, r);
        }
        lp.add_row(self.d.clone(), Relation::Le, point.eta.clone());
        lp
    }

    /// `z(x)`; `+∞` when the subproblem is infeasible and `-∞` when it is
    /// unbounded.
    pub fn subproblem_value(&self, x: &[Rational]) -> Result<Extended, ModelError> {
        self.check_x(x)?;
        let mut lp = LinearProgram::minimize(self.d.clone());
        for (row, r) in self.a.iter().zip(self.residual_rhs(x)) {
            lp.add_row(row.clone(), Relation::Le, r);
        }
        Ok(match lp.solve() {
            LpOutcome::Optimal(o) => Extended::Finite(o.value),
            LpOutcome::Infeasible(_) => Extended::PosInf,
            LpOutcome::Unbounded(_) => Extended::NegInf,
        })
    }

    /// Membership of `(x, η)` in `epi(z)`. Panics on a dimension mismatch.
    pub fn epi_contains(&self, p: &EpiPoint) -> bool {
        assert_eq!(p.x.len(), self.n(), "point dimension must match the master dimension");
        self.feasibility_system(p).solve().is_feasible()
    }

    /// The epigraph's extended formulation over variables `(x, η, y)`:
    /// `Hx + Ay ≤ b`, `dᵀy - η ≤ 0`. The objective acts on `(x, η)` only.
    pub fn epi_program(&self, sense: Sense, objective: &[Rational]) -> LinearProgram {
        let (n, k) = (self.n(), self.k());
        assert_eq!(objective.len(), n + 1);
        let mut obj = objective.to_vec();
        obj.extend(zeros(k));
        let mut lp = LinearProgram::new(sense, obj);
        for ((h, a), b) in self.h.iter().zip(&self.a).zip(&self.b) {
            let mut row = h.clone();
            row.push(Rational::zero());
            row.extend(a.iter().cloned());
            lp.add_row(row, Relation::Le, b.clone());
        }
        let mut row = zeros(n);
        row.push(-Rational::from_integer(1.into()));
        row.extend(self.d.iter().cloned());
        lp.add_row(row, Relation::Le, Rational::zero());
        lp
    }

    pub fn epi_is_empty(&self) -> bool {
        !self.epi_program(Sense::Minimize, &zeros(self.n() + 1)).solve().is_feasible()
    }

    /// `h(π, π₀) = sup{πᵀx + π₀η : (x, η) ∈ epi(z)}` through the dual program
    /// `min{γᵀb : γᵀA + γ₀dᵀ = 0, γᵀH = πᵀ, γ₀ = -π₀, γ, γ₀ ≥ 0}`.
    pub fn support_function(&self, pi: &[Rational], pi0: &Rational) -> Result<Extended, ModelError> {
        self.check_x(pi)?;
        if self.epi_is_empty() {
            return Err(ModelError::EmptyEpigraph);
        }
        if pi0.is_positive() {
            return Ok(Extended::PosInf);
        }
        let (m, k) = (self.m(), self.k());
        let mut obj = self.b.clone();
        obj.push(Rational::zero());
        let mut lp = LinearProgram::minimize(obj);
        for j in 0..m + 1 {
            lp.nonneg(j);
        }
        for col in 0..k {
            let mut row: Vec<Rational> = self.a.iter().map(|a| a[col].clone()).collect();
            row.push(self.d[col].clone());
            lp.add_row(row, Relation::Eq, Rational::zero());
        }
        for (col, p) in pi.iter().enumerate() {
            let mut row: Vec<Rational> = self.h.iter().map(|h| h[col].clone()).collect();
            row.push(Rational::zero());
            lp.add_row(row, Relation::Eq, p.clone());
        }
        let mut row = zeros(m);
        row.push(Rational::from_integer(1.into()));
        lp.add_row(row, Relation::Eq, -pi0.clone());
        Ok(match lp.solve() {
            LpOutcome::Optimal(o) => Extended::Finite(o.value),
            LpOutcome::Infeasible(_) => Extended::PosInf,
            // Dual unbounded means the primal is infeasible, excluded above.
            LpOutcome::Unbounded(_) => unreachable!("support dual unbounded on a nonempty epigraph"),
        })
    }

    /// Affine dimension of `epi(z)` in ℝⁿ⁺¹.
    pub fn epi_dimension(&self) -> Result<usize, ModelError> {
        let lp = self.epi_program(Sense::Minimize, &zeros(self.n() + 1));
        projected_dimension(&lp, self.n() + 1).ok_or(ModelError::EmptyEpigraph)
    }
}

/// Affine dimension of the projection of `lp`'s feasible set onto its first
/// `dims` coordinates, or `None` if the set is empty.
///
/// Starting from one feasible point, each round takes the null-space basis
/// of the differences found so far and probes every basis direction `u` in
/// both senses with `|uᵀz - uᵀz₀| ≤ 1` imposed, so each probe is bounded. A
/// probe that moves off `uᵀz₀` yields a point outside the current affine
/// hull; when no probe moves, the hull is the whole projection.
pub fn projected_dimension(lp: &LinearProgram, dims: usize) -> Option<usize> {
    let nvars = lp.num_vars();
    let first = lp.with_objective(Sense::Minimize, zeros(nvars)).solve();
    let LpOutcome::Optimal(o) = first else {
        return None;
    };
    let origin: Vec<Rational> = o.primal[..dims].to_vec();
    let mut diffs: Vec<Vec<Rational>> = Vec::new();
    'grow: loop {
        for u in linalg::nullspace(&diffs, dims) {
            let level = dot(&u, &origin);
            let mut full = u.clone();
            full.extend(zeros(nvars - dims));
            for sense in [Sense::Maximize, Sense::Minimize] {
                let mut probe = lp.with_objective(sense, full.clone());
                let one = Rational::from_integer(1.into());
                match sense {
                    Sense::Maximize => probe.add_row(full.clone(), Relation::Le, &level + one),
                    Sense::Minimize => probe.add_row(full.clone(), Relation::Ge, &level - one),
                };
                let LpOutcome::Optimal(p) = probe.solve() else {
                    unreachable!("bounded probe over a nonempty set");
                };
                if p.value != level {
                    let point = &p.primal[..dims];
                    diffs.push(point.iter().zip(&origin).map(|(a, b)| a - b).collect());
                    continue 'grow;
                }
            }
        }
        return Some(diffs.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ex1;
    use crate::rational::{int, rat};

    #[test]
    fn rejects_inconsistent_dimensions() {
        let err = Instance::new(
            vec![int(1)],
            vec![int(1)],
            vec![vec![int(1), int(2)]],
            vec![vec![int(1)]],
            vec![int(0)],
            MasterDomain::free(),
            int(0),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::Dimension { .. }));
        let err = Instance::new(vec![int(1)], vec![int(1)], vec![], vec![], vec![], MasterDomain::free(), int(0));
        assert_eq!(err.unwrap_err(), ModelError::NoLinkingRows);
    }

    #[test]
    fn value_function_examples() {
        let inst = ex1();
        assert_eq!(inst.subproblem_value(&[rat(4, 3)]).unwrap(), Extended::Finite(rat(7, 3)));
        assert_eq!(inst.subproblem_value(&[int(0)]).unwrap(), Extended::Finite(int(5)));
        assert_eq!(inst.subproblem_value(&[int(2)]).unwrap(), Extended::Finite(int(2)));
        assert!(inst.subproblem_value(&[int(1), int(2)]).is_err());
    }

    #[test]
    fn value_function_infinite_cases() {
        // y ≤ -x, y ≥ 0: infeasible for x > 0; d = 1 bounded below otherwise.
        let inst = Instance::new(
            vec![int(0)],
            vec![int(-1)],
            vec![vec![int(1)], vec![int(0)]],
            vec![vec![int(1)], vec![int(-1)]],
            vec![int(0), int(0)],
            MasterDomain::free(),
            int(-10),
        )
        .unwrap();
        assert_eq!(inst.subproblem_value(&[int(1)]).unwrap(), Extended::PosInf);
        assert_eq!(inst.subproblem_value(&[int(-1)]).unwrap(), Extended::Finite(int(-1)));
        let unbounded = Instance::new(
            vec![int(0)],
            vec![int(1)],
            vec![vec![int(1)]],
            vec![vec![int(1)]],
            vec![int(0)],
            MasterDomain::free(),
            int(0),
        )
        .unwrap();
        assert_eq!(unbounded.subproblem_value(&[int(0)]).unwrap(), Extended::NegInf);
    }

    #[test]
    fn epigraph_membership() {
        let inst = ex1();
        assert!(!inst.epi_contains(&EpiPoint::new(vec![int(0)], int(0))));
        assert!(inst.epi_contains(&EpiPoint::new(vec![rat(4, 3)], rat(7, 3))));
        assert!(inst.epi_contains(&EpiPoint::new(vec![int(2)], int(3))));
    }

    #[test]
    fn support_function_examples() {
        let inst = ex1();
        assert_eq!(inst.support_function(&[int(-2)], &int(-1)).unwrap(), Extended::Finite(int(-5)));
        assert_eq!(inst.support_function(&[rat(-2, 7)], &rat(-2, 7)).unwrap(), Extended::Finite(rat(-22, 21)));
        assert_eq!(inst.support_function(&[int(1)], &int(0)).unwrap(), Extended::PosInf);
        assert_eq!(inst.support_function(&[int(0)], &int(1)).unwrap(), Extended::PosInf);
    }

    #[test]
    fn support_function_on_empty_epigraph() {
        let inst = Instance::new(
            vec![int(1)],
            vec![int(1)],
            vec![vec![int(0)], vec![int(0)]],
            vec![vec![int(1)], vec![int(-1)]],
            vec![int(0), int(-1)],
            MasterDomain::free(),
            int(0),
        )
        .unwrap();
        assert_eq!(inst.support_function(&[int(0)], &int(-1)), Err(ModelError::EmptyEpigraph));
        assert_eq!(inst.epi_dimension(), Err(ModelError::EmptyEpigraph));
    }

    #[test]
    fn epigraph_dimension_examples() {
        assert_eq!(ex1().epi_dimension().unwrap(), 2);
        // x ≤ 0 and -x ≤ 0 with no y coupling: dom z = {0}.
        let ray = Instance::new(
            vec![int(1)],
            vec![int(1)],
            vec![vec![int(1)], vec![int(-1)], vec![int(0)]],
            vec![vec![int(0)], vec![int(0)], vec![int(-1)]],
            vec![int(0), int(0), int(0)],
            MasterDomain::free(),
            int(0),
        )
        .unwrap();
        assert_eq!(ray.epi_dimension().unwrap(), 1);
    }

    #[test]
    fn row_scaling_keeps_value_function() {
        let inst = ex1();
        let scaled = inst.scale_row(2, &rat(1, 10));
        for x in [int(0), rat(4, 3), int(2), int(5)] {
            assert_eq!(inst.subproblem_value(&[x.clone()]), scaled.subproblem_value(&[x]));
        }
    }
}
