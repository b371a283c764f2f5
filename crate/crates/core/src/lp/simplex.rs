//! Dense two-phase tableau simplex with Bland's rule.
//!
//! The program is rewritten over nonnegative internal columns (bound shifts,
//! reflections for upper-only bounds, and a positive/negative split for free
//! variables). Every internal row receives its own artificial column, which
//! doubles as the unit column used to read off dual values; artificials never
//! re-enter the basis once they leave.

use num_traits::{One, Signed, Zero};

use super::{Basis, FarkasCertificate, LinearProgram, LpOutcome, Optimum, Relation, Sense, UnboundedRay};
use crate::rational::Rational;

enum VarMap {
    /// `x = lower + x'`
    Shift { col: usize, lower: Rational },
    /// `x = upper - x'`
    Reflect { col: usize, upper: Rational },
    /// `x = x⁺ - x⁻`
    Split { pos: usize, neg: usize },
}

enum RowOrigin {
    Original(usize),
    /// Upper bound of a shifted variable.
    Upper(usize),
}

struct InternalRow {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
    origin: RowOrigin,
    /// -1 when the row was negated to make its right-hand side nonnegative.
    negated: bool,
}

struct StandardForm {
    map: Vec<VarMap>,
    nstruct: usize,
    rows: Vec<InternalRow>,
    cost: Vec<Rational>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut nstruct = 0;
        for j in 0..lp.num_vars() {
            let m = match (lp.lower(j), lp.upper(j)) {
                (Some(l), _) => VarMap::Shift { col: nstruct, lower: l.clone() },
                (None, Some(u)) => VarMap::Reflect { col: nstruct, upper: u.clone() },
                (None, None) => {
                    nstruct += 1;
                    VarMap::Split { pos: nstruct - 1, neg: nstruct }
                }
            };
            nstruct += 1;
            map.push(m);
        }

        // Minimization is used internally.
        let sign = match lp.sense() {
            Sense::Minimize => Rational::one(),
            Sense::Maximize => -Rational::one(),
        };
        let mut cost = vec![Rational::zero(); nstruct];
        for (j, m) in map.iter().enumerate() {
            let c = &sign * &lp.objective()[j];
            match m {
                VarMap::Shift { col, .. } => cost[*col] = c,
                VarMap::Reflect { col, .. } => cost[*col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[*neg] = -c.clone();
                    cost[*pos] = c;
                }
            }
        }

        let mut rows = Vec::new();
        for (i, row) in lp.rows().iter().enumerate() {
            let mut coeffs = vec![Rational::zero(); nstruct];
            let mut rhs = row.rhs.clone();
            for (j, a) in row.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match &map[j] {
                    VarMap::Shift { col, lower } => {
                        coeffs[*col] = a.clone();
                        rhs -= a * lower;
                    }
                    VarMap::Reflect { col, upper } => {
                        coeffs[*col] = -a.clone();
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] = a.clone();
                        coeffs[*neg] = -a.clone();
                    }
                }
            }
            rows.push(InternalRow { coeffs, relation: row.relation, rhs, origin: RowOrigin::Original(i), negated: false });
        }
        for j in 0..lp.num_vars() {
            if let (VarMap::Shift { col, lower }, Some(u)) = (&map[j], lp.upper(j)) {
                let mut coeffs = vec![Rational::zero(); nstruct];
                coeffs[*col] = Rational::one();
                rows.push(InternalRow {
                    coeffs,
                    relation: Relation::Le,
                    rhs: u - lower,
                    origin: RowOrigin::Upper(j),
                    negated: false,
                });
            }
        }
        for row in rows.iter_mut() {
            if row.rhs.is_negative() {
                row.negated = true;
                row.rhs = -row.rhs.clone();
                for c in row.coeffs.iter_mut() {
                    *c = -c.clone();
                }
                row.relation = match row.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        StandardForm { map, nstruct, rows, cost }
    }

    fn original_point(&self, internal: &[Rational]) -> Vec<Rational> {
        self.map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lower } => lower + &internal[*col],
                VarMap::Reflect { col, upper } => upper - &internal[*col],
                VarMap::Split { pos, neg } => &internal[*pos] - &internal[*neg],
            })
            .collect()
    }

    fn original_direction(&self, internal: &[Rational]) -> Vec<Rational> {
        self.map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, .. } => internal[*col].clone(),
                VarMap::Reflect { col, .. } => -internal[*col].clone(),
                VarMap::Split { pos, neg } => &internal[*pos] - &internal[*neg],
            })
            .collect()
    }
}

struct Tableau {
    /// `B⁻¹[A | b]`, one vector per row, right-hand side last.
    t: Vec<Vec<Rational>>,
    /// Reduced costs, with `-c_B B⁻¹ b` in the last slot.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    first_art: usize,
}

enum Run {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn new(sf: &StandardForm) -> Self {
        let m = sf.rows.len();
        let nslack = sf.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let first_art = sf.nstruct + nslack;
        let ncols = first_art + m;
        let mut t = Vec::with_capacity(m);
        let mut slack = sf.nstruct;
        for (i, row) in sf.rows.iter().enumerate() {
            let mut v = vec![Rational::zero(); ncols + 1];
            v[..sf.nstruct].clone_from_slice(&row.coeffs);
            match row.relation {
                Relation::Le => {
                    v[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    v[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            v[first_art + i] = Rational::one();
            v[ncols] = row.rhs.clone();
            t.push(v);
        }
        let basis = (first_art..first_art + m).collect();
        Tableau { t, obj: vec![Rational::zero(); ncols + 1], basis, ncols, first_art }
    }

    fn is_art(&self, c: usize) -> bool {
        c >= self.first_art
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj = cost.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.t.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= cb * v;
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v *= &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, p) in self.obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column enters; among tied ratios
    /// the row whose basic variable has the lowest index leaves.
    fn run(&mut self) -> Run {
        loop {
            let Some(enter) = (0..self.first_art).find(|&c| self.obj[c].is_negative()) else {
                return Run::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Run::Unbounded(enter),
            }
        }
    }

    fn values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        for (row, &b) in self.t.iter().zip(&self.basis) {
            x[b] = row[self.ncols].clone();
        }
        x
    }

    /// Row duals for the current objective row and the given per-column cost
    /// of the artificial (unit) columns.
    fn row_duals(&self, art_cost: &Rational) -> Vec<Rational> {
        (0..self.t.len()).map(|i| art_cost - &self.obj[self.first_art + i]).collect()
    }

    /// Pivots degenerate artificials out where a structural or slack column
    /// allows it. Rows where none does are redundant and keep their
    /// artificial at zero.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.t.len() {
            if !self.is_art(self.basis[r]) {
                continue;
            }
            if let Some(c) = (0..self.first_art).find(|&c| !self.t[r][c].is_zero()) {
                self.pivot(r, c);
            }
        }
    }

    /// Installs `cols` as the basis by elimination; false if they do not form
    /// a primal feasible basis of this tableau.
    fn install(&mut self, cols: &[usize]) -> bool {
        for &c in cols {
            if c >= self.ncols {
                return false;
            }
            if self.is_art(c) {
                continue;
            }
            let Some(r) = (0..self.t.len()).find(|&r| self.is_art(self.basis[r]) && !self.t[r][c].is_zero()) else {
                return false;
            };
            self.pivot(r, c);
        }
        self.t.iter().zip(&self.basis).all(|(row, &b)| {
            let v = &row[self.ncols];
            !v.is_negative() && (!self.is_art(b) || v.is_zero())
        })
    }
}

pub(super) fn solve(lp: &LinearProgram, warm: Option<&Basis>) -> LpOutcome {
    let sf = StandardForm::build(lp);
    let mut tab = Tableau::new(&sf);

    let mut phase2_cost = sf.cost.clone();
    phase2_cost.resize(tab.ncols, Rational::zero());

    let warm_ok = warm.is_some_and(|b| tab.install(&b.0));
    if !warm_ok {
        tab = Tableau::new(&sf);
        let mut phase1_cost = vec![Rational::zero(); tab.ncols];
        for c in phase1_cost[tab.first_art..].iter_mut() {
            *c = Rational::one();
        }
        tab.set_objective(&phase1_cost);
        // Phase one cannot be unbounded: the objective is bounded below by 0.
        let _ = tab.run();
        let infeasibility = -tab.obj[tab.ncols].clone();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible(farkas(lp, &sf, &tab));
        }
        tab.drive_out_artificials();
    }

    tab.set_objective(&phase2_cost);
    match tab.run() {
        Run::Optimal => {
            let internal = tab.values();
            let primal = sf.original_point(&internal[..sf.nstruct]);
            let value = lp.objective_at(&primal);
            let internal_duals = tab.row_duals(&Rational::zero());
            let sign = match lp.sense() {
                Sense::Minimize => Rational::one(),
                Sense::Maximize => -Rational::one(),
            };
            let mut dual = vec![Rational::zero(); lp.rows().len()];
            for (row, y) in sf.rows.iter().zip(internal_duals) {
                if let RowOrigin::Original(i) = row.origin {
                    let y = if row.negated { -y } else { y };
                    dual[i] = &sign * y;
                }
            }
            let reduced_costs = (0..lp.num_vars())
                .map(|j| {
                    let ay: Rational = lp.rows().iter().zip(&dual).map(|(r, y)| &r.coeffs[j] * y).sum();
                    &lp.objective()[j] - ay
                })
                .collect();
            LpOutcome::Optimal(Optimum { primal, value, dual, reduced_costs, basis: Basis(tab.basis.clone()) })
        }
        Run::Unbounded(enter) => {
            let internal = tab.values();
            let point = sf.original_point(&internal[..sf.nstruct]);
            let mut d = vec![Rational::zero(); tab.ncols];
            d[enter] = Rational::one();
            for (row, &b) in tab.t.iter().zip(&tab.basis) {
                d[b] = -row[enter].clone();
            }
            let direction = sf.original_direction(&d[..sf.nstruct]);
            LpOutcome::Unbounded(UnboundedRay { point, direction })
        }
    }
}

/// Converts phase-one duals into multipliers on the original rows and bounds.
///
/// With `y` the phase-one duals, `-y` aggregates the internal rows (in `≤`
/// form) into `v·x' ≤ -w` with `v ≥ 0` on every structural column and
/// `w > 0`; the internal bounds `x' ≥ 0` then absorb `v`.
fn farkas(lp: &LinearProgram, sf: &StandardForm, tab: &Tableau) -> FarkasCertificate {
    let y = tab.row_duals(&Rational::one());
    let mut rows = vec![Rational::zero(); lp.rows().len()];
    let mut lower = vec![Rational::zero(); lp.num_vars()];
    let mut upper = vec![Rational::zero(); lp.num_vars()];
    // Aggregate of the internal rows, over structural columns.
    let mut v = vec![Rational::zero(); sf.nstruct];
    for (row, yi) in sf.rows.iter().zip(&y) {
        let f = match row.relation {
            Relation::Le | Relation::Eq => -yi.clone(),
            Relation::Ge => yi.clone(),
        };
        let le_form_sign = if row.relation == Relation::Ge { -Rational::one() } else { Rational::one() };
        for (acc, a) in v.iter_mut().zip(&row.coeffs) {
            *acc += &f * &le_form_sign * a;
        }
        match row.origin {
            RowOrigin::Original(i) => {
                rows[i] = if row.relation == Relation::Eq && row.negated { -f } else { f };
            }
            RowOrigin::Upper(j) => upper[j] += f,
        }
    }
    for (j, m) in sf.map.iter().enumerate() {
        match m {
            // -x' ≤ 0 is the lower bound of x.
            VarMap::Shift { col, .. } => lower[j] += &v[*col],
            // -x' ≤ 0 is the upper bound of x.
            VarMap::Reflect { col, .. } => upper[j] += &v[*col],
            VarMap::Split { .. } => {}
        }
    }
    let cert = FarkasCertificate { rows, lower, upper };
    debug_assert!(cert.proves_infeasible(lp), "phase one produced an invalid Farkas certificate");
    cert
}
