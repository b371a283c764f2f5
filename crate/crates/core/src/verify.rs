//! Oracles for cut properties: support, face dimension, minimal infeasible
//! subsystems, vertices, domination and Pareto-optimality.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::lp::{linalg, LinearProgram, LpOutcome, Relation, Sense};
use crate::model::{projected_dimension, EpiPoint, Instance, MasterDomain, ModelError};
use crate::rational::{dot, zeros, Rational};
use crate::separation::{Certificate, Cut};

/// Largest variable count [`enumerate_vertices`] accepts.
pub const MAX_ENUMERATION_VARS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("{0} variables exceed the enumeration bound of {MAX_ENUMERATION_VARS}")]
    TooLarge(usize),
    #[error("candidate is not feasible for the system")]
    InfeasibleCandidate,
    #[error("both cuts need a negative eta coefficient")]
    NotApplicable,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NonSupporting,
    Supporting,
    FacetDefining,
    ContainsEpi,
}

impl Classification {
    /// Facet-defining, or the hyperplane contains the whole epigraph.
    pub fn meets_facet_criterion(self) -> bool {
        matches!(self, Classification::FacetDefining | Classification::ContainsEpi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceReport {
    /// `-1` when the cut does not support the epigraph.
    pub face_dimension: isize,
    pub epi_dimension: isize,
    pub classification: Classification,
}

/// Dimension of the face `epi(z) ∩ {πᵀx + π₀η = α}`.
///
/// The support value is computed here by maximizing over the extended
/// epigraph formulation, not through the dual used by
/// [`Instance::support_function`].
pub fn face_report(instance: &Instance, cut: &Cut) -> Result<FaceReport, VerifyError> {
    let epi_dimension = instance.epi_dimension()? as isize;
    let n = instance.n();
    let mut normal = cut.pi.clone();
    normal.push(cut.pi0.clone());
    let lp = instance.epi_program(Sense::Maximize, &normal);
    let supported = matches!(lp.solve(), LpOutcome::Optimal(o) if o.value == cut.alpha);
    if !supported {
        return Ok(FaceReport { face_dimension: -1, epi_dimension, classification: Classification::NonSupporting });
    }
    let mut face = lp.clone();
    let mut row = normal;
    row.extend(zeros(instance.k()));
    face.add_row(row, Relation::Eq, cut.alpha.clone());
    let face_dimension = projected_dimension(&face, n + 1).expect("a supporting hyperplane meets the set") as isize;
    let classification = if face_dimension == epi_dimension {
        Classification::ContainsEpi
    } else if face_dimension == epi_dimension - 1 {
        Classification::FacetDefining
    } else {
        Classification::Supporting
    };
    Ok(FaceReport { face_dimension, epi_dimension, classification })
}

/// Whether the rows of the point's feasibility system (`Ay ≤ b - Hx*`, then
/// `dᵀy ≤ η*`) on which the certificate is nonzero form a minimal
/// infeasible subsystem.
pub fn is_mis_certificate(instance: &Instance, point: &EpiPoint, cert: &Certificate) -> bool {
    let system = instance.feasibility_system(point);
    let support: Vec<usize> = cert.coords().iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i).collect();
    let feasible = |rows: &[usize]| {
        let mut lp = LinearProgram::feasibility(instance.k());
        for &i in rows {
            let r = &system.rows()[i];
            lp.add_row(r.coeffs.clone(), r.relation, r.rhs.clone());
        }
        lp.solve().is_feasible()
    };
    if support.is_empty() || feasible(&support) {
        return false;
    }
    (0..support.len()).all(|skip| {
        let rest: Vec<usize> = support.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &i)| i).collect();
        feasible(&rest)
    })
}

/// A constraint `coeffs·x (≤ | =) rhs` gathered from rows and bounds.
struct Constraint {
    coeffs: Vec<Rational>,
    rhs: Rational,
    equality: bool,
}

fn constraints(lp: &LinearProgram) -> Vec<Constraint> {
    let n = lp.num_vars();
    let mut out = Vec::new();
    for r in lp.rows() {
        let (coeffs, rhs) = match r.relation {
            Relation::Ge => (r.coeffs.iter().map(|c| -c).collect(), -r.rhs.clone()),
            _ => (r.coeffs.clone(), r.rhs.clone()),
        };
        out.push(Constraint { coeffs, rhs, equality: r.relation == Relation::Eq });
    }
    for j in 0..n {
        let unit = |s: Rational| {
            let mut v = zeros(n);
            v[j] = s;
            v
        };
        if let Some(l) = lp.lower(j) {
            out.push(Constraint { coeffs: unit(-Rational::one()), rhs: -l.clone(), equality: false });
        }
        if let Some(u) = lp.upper(j) {
            out.push(Constraint { coeffs: unit(Rational::one()), rhs: u.clone(), equality: false });
        }
    }
    out
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of the feasible set of `lp` (rows and bounds; the
/// objective is ignored), sorted and deduplicated. Exhaustive over bases.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<Vec<Rational>>, VerifyError> {
    let n = lp.num_vars();
    if n > MAX_ENUMERATION_VARS {
        return Err(VerifyError::TooLarge(n));
    }
    let cons = constraints(lp);
    let (eqs, ineqs): (Vec<&Constraint>, Vec<&Constraint>) = cons.iter().partition(|c| c.equality);
    let eq_rows: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
    let eq_rank = linalg::rank(&eq_rows);
    let mut found = BTreeSet::new();
    combinations(ineqs.len(), n - eq_rank, |pick| {
        let mut rows = eq_rows.clone();
        let mut rhs: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
        for &i in pick {
            rows.push(ineqs[i].coeffs.clone());
            rhs.push(ineqs[i].rhs.clone());
        }
        if let Some(x) = linalg::solve_unique(&rows, &rhs, n) {
            if lp.is_feasible_point(&x) {
                found.insert(x);
            }
        }
    });
    Ok(found.into_iter().collect())
}

/// Whether the constraints tight at `candidate` have full rank.
pub fn is_vertex(lp: &LinearProgram, candidate: &[Rational]) -> Result<bool, VerifyError> {
    if !lp.is_feasible_point(candidate) {
        return Err(VerifyError::InfeasibleCandidate);
    }
    let tight: Vec<Vec<Rational>> = constraints(lp)
        .into_iter()
        .filter(|c| dot(&c.coeffs, candidate) == c.rhs)
        .map(|c| c.coeffs)
        .collect();
    Ok(linalg::rank(&tight) == lp.num_vars())
}

/// The optimal face of `lp` as a system, or `None` when there is no finite
/// optimum.
pub fn optimal_face(lp: &LinearProgram) -> Option<LinearProgram> {
    let value = lp.solve().optimum()?.value.clone();
    let mut face = lp.clone();
    face.add_row(lp.objective().to_vec(), Relation::Eq, value);
    Some(face)
}

/// True when `lp` has exactly one optimal solution.
pub fn has_unique_optimum(lp: &LinearProgram) -> bool {
    optimal_face(lp).is_some_and(|f| projected_dimension(&f, f.num_vars()) == Some(0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParetoVerdict {
    /// Tight at `witness`, whose `x` lies in the relative interior of the
    /// convex hull of the master domain.
    Pareto { witness: EpiPoint },
    NotPareto,
    /// `π₀ ≥ 0`.
    NotApplicable,
}

/// Rows of `Gx ≤ g` that hold with equality on all of `{Gx ≤ g}`. `None`
/// when the set is empty.
fn implicit_equalities(g_matrix: &[Vec<Rational>], g_rhs: &[Rational], n: usize) -> Option<Vec<bool>> {
    let mut base = LinearProgram::feasibility(n);
    for (row, g) in g_matrix.iter().zip(g_rhs) {
        base.add_row(row.clone(), Relation::Le, g.clone());
    }
    if !base.solve().is_feasible() {
        return None;
    }
    Some(
        g_matrix
            .iter()
            .zip(g_rhs)
            .map(|(row, g)| {
                let out = base.with_objective(Sense::Minimize, row.clone()).solve();
                out.value() == Some(g)
            })
            .collect(),
    )
}

/// A cut with `π₀ < 0` is Pareto-optimal iff it supports `epi(z)` at a
/// point whose `x` lies in the relative interior of `conv(S)`. Cuts that do
/// not support `epi(z)` are reported as `NotPareto`.
pub fn pareto_verdict(instance: &Instance, cut: &Cut) -> ParetoVerdict {
    if !cut.pi0.is_negative() {
        return ParetoVerdict::NotApplicable;
    }
    let (n, k) = (instance.n(), instance.k());
    let mut normal = cut.pi.clone();
    normal.push(cut.pi0.clone());
    let supported = matches!(instance.epi_program(Sense::Maximize, &normal).solve(),
        LpOutcome::Optimal(o) if o.value == cut.alpha);
    if !supported {
        return ParetoVerdict::NotPareto;
    }
    // Variables (x, η, y, extra..., ε); maximize ε ≤ 1 with the cut tight.
    let extra = match instance.master() {
        MasterDomain::Polyhedral { .. } => 0,
        MasterDomain::Finite { points } => points.len(),
    };
    let base = instance.epi_program(Sense::Maximize, &zeros(n + 1));
    let nv = n + 1 + k + extra + 1;
    let widen = |mut v: Vec<Rational>| {
        v.resize(nv, Rational::zero());
        v
    };
    let mut obj = zeros(nv);
    obj[nv - 1] = Rational::one();
    let mut lp = LinearProgram::maximize(obj);
    for r in base.rows() {
        lp.add_row(widen(r.coeffs.clone()), r.relation, r.rhs.clone());
    }
    lp.add_row(widen(normal), Relation::Eq, cut.alpha.clone());
    lp.set_upper(nv - 1, Some(Rational::one()));
    let eps = |row: &mut Vec<Rational>| row[nv - 1] = Rational::one();
    match instance.master() {
        MasterDomain::Polyhedral { g_matrix, g_rhs } => {
            let Some(implicit) = implicit_equalities(g_matrix, g_rhs, n) else {
                return ParetoVerdict::NotPareto;
            };
            for ((row, g), &eq) in g_matrix.iter().zip(g_rhs).zip(&implicit) {
                let mut r = widen(row.clone());
                if eq {
                    lp.add_row(r, Relation::Eq, g.clone());
                } else {
                    eps(&mut r);
                    lp.add_row(r, Relation::Le, g.clone());
                }
            }
        }
        MasterDomain::Finite { points } => {
            let mu0 = n + 1 + k;
            for j in 0..n {
                let mut r = zeros(nv);
                r[j] = -Rational::one();
                for (i, p) in points.iter().enumerate() {
                    r[mu0 + i] = p[j].clone();
                }
                lp.add_row(r, Relation::Eq, Rational::zero());
            }
            let mut sum = zeros(nv);
            for i in 0..points.len() {
                sum[mu0 + i] = Rational::one();
                let mut r = zeros(nv);
                r[mu0 + i] = -Rational::one();
                eps(&mut r);
                lp.add_row(r, Relation::Le, Rational::zero());
            }
            lp.add_row(sum, Relation::Eq, Rational::one());
        }
    }
    match lp.solve() {
        LpOutcome::Optimal(o) if o.value.is_positive() => ParetoVerdict::Pareto {
            witness: EpiPoint::new(o.primal[..n].to_vec(), o.primal[n].clone()),
        },
        _ => ParetoVerdict::NotPareto,
    }
}

/// `η`-bound of a cut with `π₀ < 0` as an affine function of `x`:
/// `η ≥ slopeᵀx + offset`.
fn eta_bound(cut: &Cut) -> (Vec<Rational>, Rational) {
    let s = Rational::one() / (-cut.pi0.clone());
    (cut.pi.iter().map(|p| p * &s).collect(), -(&cut.alpha * &s))
}

/// Whether `a` enforces an `η` bound at least as high as `b` on all of `S`
/// and strictly higher somewhere in `S`.
pub fn dominates(instance: &Instance, a: &Cut, b: &Cut) -> Result<bool, VerifyError> {
    if !a.pi0.is_negative() || !b.pi0.is_negative() {
        return Err(VerifyError::NotApplicable);
    }
    let (sa, oa) = eta_bound(a);
    let (sb, ob) = eta_bound(b);
    let slope: Vec<Rational> = sa.iter().zip(&sb).map(|(x, y)| x - y).collect();
    let offset = oa - ob;
    match instance.master() {
        MasterDomain::Finite { points } => {
            let diffs: Vec<Rational> = points.iter().map(|p| dot(&slope, p) + &offset).collect();
            Ok(diffs.iter().all(|d| !d.is_negative()) && diffs.iter().any(Signed::is_positive))
        }
        MasterDomain::Polyhedral { g_matrix, g_rhs } => {
            let mut lp = LinearProgram::minimize(slope.clone());
            for (row, g) in g_matrix.iter().zip(g_rhs) {
                lp.add_row(row.clone(), Relation::Le, g.clone());
            }
            let min_ok = match lp.solve() {
                LpOutcome::Optimal(o) => !(o.value + &offset).is_negative(),
                _ => false,
            };
            if !min_ok {
                return Ok(false);
            }
            Ok(match lp.with_objective(Sense::Maximize, slope).solve() {
                LpOutcome::Optimal(o) => (o.value + &offset).is_positive(),
                LpOutcome::Unbounded(_) => true,
                LpOutcome::Infeasible(_) => false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cglp::build_alt_polyhedron;
    use crate::fixtures::{ex1, ex1_origin_vertices, ex1_with_master, half_line};
    use crate::rational::{add, int, rat, scale};

    fn origin() -> EpiPoint {
        EpiPoint::new(vec![int(0)], int(0))
    }

    fn p1_cut() -> Cut {
        Cut::new(vec![rat(-2, 5)], rat(-1, 5), int(-1))
    }

    fn p2_cut() -> Cut {
        Cut::new(vec![rat(-1, 6)], rat(-1, 3), int(-1))
    }

    fn p3_cut() -> Cut {
        Cut::new(vec![rat(-2, 7)], rat(-2, 7), int(-1))
    }

    #[test]
    fn face_report_examples() {
        let inst = ex1();
        let r = face_report(&inst, &p1_cut()).unwrap();
        assert_eq!((r.face_dimension, r.epi_dimension, r.classification), (1, 2, Classification::FacetDefining));
        let r = face_report(&inst, &p3_cut()).unwrap();
        assert_eq!((r.face_dimension, r.classification), (-1, Classification::NonSupporting));
        let tight = Cut::new(vec![rat(-2, 7)], rat(-2, 7), rat(-22, 21));
        let r = face_report(&inst, &tight).unwrap();
        assert_eq!((r.face_dimension, r.classification), (0, Classification::Supporting));
    }

    #[test]
    fn face_report_contains_epigraph() {
        // dom z = {0}: the hyperplane x = 0 holds the whole vertical ray.
        let inst = Instance::new(
            vec![int(1)],
            vec![int(1)],
            vec![vec![int(1)], vec![int(-1)], vec![int(0)]],
            vec![vec![int(0)], vec![int(0)], vec![int(-1)]],
            vec![int(0), int(0), int(0)],
            MasterDomain::free(),
            int(0),
        )
        .unwrap();
        let r = face_report(&inst, &Cut::new(vec![int(1)], int(0), int(0))).unwrap();
        assert_eq!((r.face_dimension, r.epi_dimension, r.classification), (1, 1, Classification::ContainsEpi));
    }

    #[test]
    fn mis_examples() {
        let inst = ex1();
        let [p1, _, p3] = ex1_origin_vertices();
        assert!(is_mis_certificate(&inst, &origin(), &Certificate::from_coords(p1.clone())));
        assert!(is_mis_certificate(&inst, &origin(), &Certificate::from_coords(p3.clone())));
        let mid = scale(&add(&p1, &p3), &rat(1, 2));
        assert!(!is_mis_certificate(&inst, &origin(), &Certificate::from_coords(mid)));
    }

    #[test]
    fn example_vertices() {
        let inst = ex1();
        let mut expected = ex1_origin_vertices().to_vec();
        expected.sort();
        for relaxed in [false, true] {
            let p = build_alt_polyhedron(&inst, &origin(), relaxed);
            assert_eq!(enumerate_vertices(p.system()).unwrap(), expected);
        }
        let inside = build_alt_polyhedron(&inst, &EpiPoint::new(vec![int(2)], int(3)), false);
        assert!(enumerate_vertices(inside.system()).unwrap().is_empty());
        assert_eq!(enumerate_vertices(&LinearProgram::feasibility(13)), Err(VerifyError::TooLarge(13)));
    }

    #[test]
    fn vertex_checks() {
        let inst = ex1();
        let [p1, p2, _] = ex1_origin_vertices();
        let relaxed = build_alt_polyhedron(&inst, &origin(), true);
        let equal = build_alt_polyhedron(&inst, &origin(), false);
        assert!(is_vertex(relaxed.system(), &p2).unwrap());
        assert!(!is_vertex(equal.system(), &scale(&add(&p1, &p2), &rat(1, 2))).unwrap());
        assert!(!is_vertex(relaxed.system(), &scale(&p1, &int(2))).unwrap());
        assert_eq!(is_vertex(equal.system(), &scale(&p1, &int(2))), Err(VerifyError::InfeasibleCandidate));
    }

    #[test]
    fn pareto_examples() {
        let inst = ex1_with_master(half_line(int(2)));
        match pareto_verdict(&inst, &p2_cut()) {
            ParetoVerdict::Pareto { witness } => {
                assert!(witness.x[0] > int(2));
                assert!(p2_cut().is_tight_at(&witness));
                assert!(inst.epi_contains(&witness));
            }
            other => panic!("expected Pareto, got {other:?}"),
        }
        assert_eq!(pareto_verdict(&inst, &p1_cut()), ParetoVerdict::NotPareto);
        assert_eq!(pareto_verdict(&inst, &Cut::new(vec![int(1)], int(0), int(0))), ParetoVerdict::NotApplicable);
    }

    #[test]
    fn pareto_over_finite_domains() {
        let pts = |xs: &[i64]| MasterDomain::Finite { points: xs.iter().map(|&x| vec![int(x)]).collect() };
        let inst = ex1_with_master(pts(&[0, 1, 2, 3]));
        assert!(matches!(pareto_verdict(&inst, &p2_cut()), ParetoVerdict::Pareto { .. }));
        assert!(matches!(pareto_verdict(&inst, &p1_cut()), ParetoVerdict::Pareto { .. }));
        // A single point has itself as relative interior; P1's cut is tight
        // only for x ≤ 4/3.
        let inst = ex1_with_master(pts(&[3]));
        assert_eq!(pareto_verdict(&inst, &p1_cut()), ParetoVerdict::NotPareto);
        assert!(matches!(pareto_verdict(&inst, &p2_cut()), ParetoVerdict::Pareto { .. }));
    }

    #[test]
    fn pareto_with_implicit_equalities() {
        // S = {x : x ≤ 3, -x ≤ -3} = {3}
        let s = MasterDomain::Polyhedral { g_matrix: vec![vec![int(1)], vec![int(-1)]], g_rhs: vec![int(3), int(-3)] };
        let inst = ex1_with_master(s);
        assert!(matches!(pareto_verdict(&inst, &p2_cut()), ParetoVerdict::Pareto { .. }));
        assert_eq!(pareto_verdict(&inst, &p1_cut()), ParetoVerdict::NotPareto);
    }

    #[test]
    fn domination_examples() {
        let inst = ex1();
        let tight = Cut::new(vec![rat(-2, 7)], rat(-2, 7), rat(-22, 21));
        assert!(dominates(&inst, &tight, &p3_cut()).unwrap());
        assert!(!dominates(&inst, &p3_cut(), &tight).unwrap());
        assert!(!dominates(&inst, &p1_cut(), &p2_cut()).unwrap());
        assert!(!dominates(&inst, &p2_cut(), &p1_cut()).unwrap());
        assert!(!dominates(&inst, &p1_cut(), &p1_cut()).unwrap());
        let flat = Cut::new(vec![int(1)], int(0), int(0));
        assert_eq!(dominates(&inst, &flat, &p1_cut()), Err(VerifyError::NotApplicable));
    }

    #[test]
    fn unique_optimum_detection() {
        let inst = ex1();
        let p = build_alt_polyhedron(&inst, &origin(), true);
        let (w, w0) = crate::cglp::lift_objective(&inst, &[int(2)], &int(3)).unwrap();
        assert!(has_unique_optimum(&p.maximize(&w, &w0)));
        let (w, w0) = crate::cglp::lift_objective(&inst, &[rat(4, 3)], &rat(7, 3)).unwrap();
        assert!(!has_unique_optimum(&p.maximize(&w, &w0)));
    }
}
