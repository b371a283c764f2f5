//! From certificates to cuts.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cglp::{build_cglp_relaxed_subproblem, build_reverse_polar_lp, lift_objective, ObjectiveSpec};
use crate::lp::LpOutcome;
use crate::model::{EpiPoint, Instance, ModelError};
use crate::rational::{add, dot, fmt_rational, is_zero_vec, scale, Extended, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeparationError {
    #[error("certificate is zero")]
    ZeroCertificate,
    #[error("cut-generating LP is unbounded for this objective")]
    StrategyUnbounded,
    #[error("support function is +inf for this normal")]
    Unbounded,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A Farkas certificate `(γ, γ₀)` for the feasibility system of a master
/// point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub gamma: Vec<Rational>,
    pub gamma0: Rational,
}

impl Certificate {
    pub fn new(gamma: Vec<Rational>, gamma0: Rational) -> Self {
        Certificate { gamma, gamma0 }
    }

    /// Splits `(γ₁, …, γₘ, γ₀)`.
    pub fn from_coords(mut coords: Vec<Rational>) -> Self {
        let gamma0 = coords.pop().expect("certificate has at least the γ₀ entry");
        Certificate { gamma: coords, gamma0 }
    }

    pub fn coords(&self) -> Vec<Rational> {
        let mut v = self.gamma.clone();
        v.push(self.gamma0.clone());
        v
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.gamma) && self.gamma0.is_zero()
    }

    /// `γᵀA + γ₀dᵀ = 0` and nonnegativity.
    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        if self.gamma.len() != instance.m() || self.gamma.iter().chain([&self.gamma0]).any(Signed::is_negative) {
            return false;
        }
        (0..instance.k()).all(|col| {
            let s: Rational = instance.a().iter().zip(&self.gamma).map(|(a, g)| &a[col] * g).sum();
            (s + &instance.d()[col] * &self.gamma0).is_zero()
        })
    }
}

/// The halfspace `πᵀx + π₀η ≤ α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    pub pi: Vec<Rational>,
    pub pi0: Rational,
    pub alpha: Rational,
}

impl Cut {
    pub fn new(pi: Vec<Rational>, pi0: Rational, alpha: Rational) -> Self {
        Cut { pi, pi0, alpha }
    }

    pub fn lhs(&self, p: &EpiPoint) -> Rational {
        dot(&self.pi, &p.x) + &self.pi0 * &p.eta
    }

    pub fn is_violated_by(&self, p: &EpiPoint) -> bool {
        self.lhs(p) > self.alpha
    }

    pub fn is_tight_at(&self, p: &EpiPoint) -> bool {
        self.lhs(p) == self.alpha
    }

    /// `(π, π₀, α)` divided by the magnitude of the first nonzero entry of
    /// `(π, π₀)`. Returns the cut unchanged if the normal is zero.
    pub fn canonical(&self) -> Cut {
        let Some(lead) = self.pi.iter().chain([&self.pi0]).find(|v| !v.is_zero()) else {
            return self.clone();
        };
        let s = Rational::one() / lead.abs();
        Cut { pi: scale(&self.pi, &s), pi0: &self.pi0 * &s, alpha: &self.alpha * &s }
    }

    /// `η ≥ (α - πᵀx)/π₀` rewritten as `-πᵀx/π₀ + η ≥ -α/π₀` when `π₀ < 0`.
    fn eta_form(&self) -> Option<(Vec<Rational>, Rational)> {
        if !self.pi0.is_negative() {
            return None;
        }
        let s = -Rational::one() / &self.pi0;
        Some((scale(&self.pi, &-s.clone()), -(&self.alpha * &s)))
    }
}

fn term(coeff: &Rational, name: &str, first: bool, out: &mut String) {
    if coeff.is_zero() {
        return;
    }
    let mag = coeff.abs();
    match (first, coeff.is_negative()) {
        (true, true) => out.push('-'),
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
        (true, false) => {}
    }
    if !mag.is_one() {
        out.push_str(&fmt_rational(&mag));
        out.push('*');
    }
    out.push_str(name);
}

fn var_name(j: usize, n: usize) -> String {
    if n == 1 {
        "x".to_string()
    } else {
        format!("x{}", j + 1)
    }
}

/// `x + eta >= 7/2` style when `π₀ < 0`, otherwise `... <= α`.
impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.pi.len();
        let mut s = String::new();
        let (coeffs, eta, rel, rhs) = match self.eta_form() {
            Some((c, r)) => (c, Rational::one(), ">=", r),
            None => (self.pi.clone(), self.pi0.clone(), "<=", self.alpha.clone()),
        };
        for (j, c) in coeffs.iter().enumerate() {
            term(c, &var_name(j, n), s.is_empty(), &mut s);
        }
        term(&eta, "eta", s.is_empty(), &mut s);
        if s.is_empty() {
            s.push('0');
        }
        write!(f, "{s} {rel} {}", fmt_rational(&rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub cut: Cut,
    pub certificate: Certificate,
    /// Optimal value of the strategy objective over the relaxed polyhedron.
    pub cglp_value: Rational,
    /// Whether `α` equals the support function at `(π, π₀)`.
    pub supporting: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationResult {
    InEpigraph,
    Separated(Separation),
}

impl SeparationResult {
    pub fn separation(&self) -> Option<&Separation> {
        match self {
            SeparationResult::Separated(s) => Some(s),
            SeparationResult::InEpigraph => None,
        }
    }
}

/// `π = Hᵀγ`, `π₀ = -γ₀`, `α = γᵀb`.
pub fn certificate_to_cut(instance: &Instance, cert: &Certificate) -> Result<Cut, SeparationError> {
    if cert.is_zero() {
        return Err(SeparationError::ZeroCertificate);
    }
    Ok(Cut {
        pi: instance.h_transpose_times(&cert.gamma),
        pi0: -cert.gamma0.clone(),
        alpha: dot(&cert.gamma, instance.b()),
    })
}

/// Optimal certificate of the strategy objective over the relaxed
/// polyhedron, read off the duals of the relaxed subproblem, with its value.
/// `None` when that optimum is unbounded.
pub fn relaxed_optimum(
    instance: &Instance,
    point: &EpiPoint,
    omega_tilde: &[Rational],
    omega_tilde0: &Rational,
) -> Option<(Certificate, Rational, Rational)> {
    let lp = build_cglp_relaxed_subproblem(instance, point, omega_tilde, omega_tilde0);
    let LpOutcome::Optimal(o) = lp.solve() else {
        return None;
    };
    let lambda = o.value;
    if !lambda.is_positive() {
        return None;
    }
    let coords: Vec<Rational> = o.dual.iter().map(|u| -u / &lambda).collect();
    let value = -Rational::one() / &lambda;
    Some((Certificate::from_coords(coords), value, lambda))
}

/// Separates `point` from `epi(z)` with the cut selected by `strategy`.
pub fn separate(
    instance: &Instance,
    point: &EpiPoint,
    strategy: &ObjectiveSpec,
) -> Result<SeparationResult, SeparationError> {
    if instance.epi_is_empty() {
        return Err(ModelError::EmptyEpigraph.into());
    }
    if instance.epi_contains(point) {
        return Ok(SeparationResult::InEpigraph);
    }
    let (w, w0) = strategy.lifted(instance)?;
    let (certificate, cglp_value, _) =
        relaxed_optimum(instance, point, &w, &w0).ok_or(SeparationError::StrategyUnbounded)?;
    let cut = certificate_to_cut(instance, &certificate)?;
    let supporting = instance.support_function(&cut.pi, &cut.pi0)? == Extended::Finite(cut.alpha.clone());
    Ok(SeparationResult::Separated(Separation { cut, certificate, cglp_value, supporting }))
}

/// The tightest valid right-hand side for the normal `(π, π₀)`.
pub fn tighten_rhs(instance: &Instance, pi: &[Rational], pi0: &Rational) -> Result<Rational, SeparationError> {
    match instance.support_function(pi, pi0)? {
        Extended::Finite(v) => Ok(v),
        _ => Err(SeparationError::Unbounded),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    /// `(ω, ω₀) ∈ epi(z) - point`; the directional optimum is at most `-1`.
    InSet,
    /// In the closure of the cone generated by `epi(z) - point`; the
    /// directional optimum is finite and at most `0`.
    InClosedCone,
    /// The directional optimum is unbounded.
    Outside,
}

/// Classifies a direction before using it as a directional objective.
/// Errors when `point` already lies in the epigraph.
pub fn boundedness_check(
    instance: &Instance,
    point: &EpiPoint,
    omega: &[Rational],
    omega0: &Rational,
) -> Result<Boundedness, SeparationError> {
    lift_objective(instance, omega, omega0)?;
    if instance.epi_contains(point) {
        return Err(SeparationError::PreconditionViolated("point lies in the epigraph".into()));
    }
    let target = EpiPoint::new(add(&point.x, omega), &point.eta + omega0);
    if instance.epi_contains(&target) {
        return Ok(Boundedness::InSet);
    }
    Ok(match build_reverse_polar_lp(instance, point, omega, omega0).solve() {
        LpOutcome::Optimal(_) => Boundedness::InClosedCone,
        _ => Boundedness::Outside,
    })
}

/// `(x*, η*) + (ω, ω₀)/(-h)` where `h < 0` is the directional optimum.
pub fn exposed_point(
    instance: &Instance,
    point: &EpiPoint,
    omega: &[Rational],
    omega0: &Rational,
) -> Result<EpiPoint, SeparationError> {
    let (w, w0) = lift_objective(instance, omega, omega0)?;
    if instance.epi_contains(point) {
        return Err(SeparationError::PreconditionViolated("point lies in the epigraph".into()));
    }
    let Some((_, value, _)) = relaxed_optimum(instance, point, &w, &w0) else {
        return Err(SeparationError::PreconditionViolated("directional optimum is not finite and negative".into()));
    };
    let t = -Rational::one() / value;
    Ok(EpiPoint::new(add(&point.x, &scale(omega, &t)), &point.eta + omega0 * &t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ex1, ex1_origin_vertices};
    use crate::rational::{int, rat};

    fn origin() -> EpiPoint {
        EpiPoint::new(vec![int(0)], int(0))
    }

    fn directional(w: i64, w0: i64) -> ObjectiveSpec {
        ObjectiveSpec::Directional { omega: vec![int(w)], omega0: int(w0) }
    }

    #[test]
    fn certificate_to_cut_examples() {
        let inst = ex1();
        let [p1, _, p3] = ex1_origin_vertices();
        let c1 = certificate_to_cut(&inst, &Certificate::from_coords(p1)).unwrap();
        assert_eq!(c1, Cut::new(vec![rat(-2, 5)], rat(-1, 5), int(-1)));
        assert_eq!(c1.to_string(), "2*x + eta >= 5");
        let c3 = certificate_to_cut(&inst, &Certificate::from_coords(p3)).unwrap();
        assert_eq!(c3, Cut::new(vec![rat(-2, 7)], rat(-2, 7), int(-1)));
        assert_eq!(c3.to_string(), "x + eta >= 7/2");
        let zero = Certificate::new(vec![int(0); 3], int(0));
        assert_eq!(certificate_to_cut(&inst, &zero), Err(SeparationError::ZeroCertificate));
    }

    #[test]
    fn canonical_form_divides_by_leading_magnitude() {
        let c = Cut::new(vec![rat(-2, 7)], rat(-2, 7), int(-1)).canonical();
        assert_eq!(c, Cut::new(vec![int(-1)], int(-1), rat(-7, 2)));
        let c = Cut::new(vec![int(0), int(3)], int(-6), int(9)).canonical();
        assert_eq!(c, Cut::new(vec![int(0), int(1)], int(-2), int(3)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Cut::new(vec![rat(-1, 6)], rat(-1, 3), int(-1)).to_string(), "1/2*x + eta >= 3");
        assert_eq!(Cut::new(vec![int(1), int(-2)], int(0), int(4)).to_string(), "x1 - 2*x2 <= 4");
        assert_eq!(Cut::new(vec![int(0)], int(-1), int(0)).to_string(), "eta >= 0");
    }

    #[test]
    fn mis_strategy_picks_redundant_row() {
        let inst = ex1();
        let r = separate(&inst, &origin(), &ObjectiveSpec::MisOnes).unwrap();
        let s = r.separation().unwrap();
        assert_eq!(s.cut.to_string(), "x + eta >= 7/2");
        assert_eq!(s.certificate.coords(), ex1_origin_vertices()[2]);
        assert_eq!(s.cglp_value, rat(-5, 14));
        assert!(!s.supporting);
        assert!(s.cut.is_violated_by(&origin()));
    }

    #[test]
    fn directional_strategy_supports() {
        let inst = ex1();
        let r = separate(&inst, &origin(), &directional(2, 3)).unwrap();
        let s = r.separation().unwrap();
        assert_eq!(s.cut.to_string(), "1/2*x + eta >= 3");
        assert_eq!(s.certificate.coords(), ex1_origin_vertices()[1]);
        assert_eq!(s.cglp_value, rat(-4, 3));
        assert!(s.supporting);
    }

    #[test]
    fn epigraph_point_is_not_separated() {
        let inst = ex1();
        let p = EpiPoint::new(vec![int(2)], int(3));
        for strat in [ObjectiveSpec::MisOnes, directional(2, 3), directional(-1, 0)] {
            assert_eq!(separate(&inst, &p, &strat).unwrap(), SeparationResult::InEpigraph);
        }
    }

    #[test]
    fn outside_direction_is_unbounded() {
        let inst = ex1();
        assert_eq!(separate(&inst, &origin(), &directional(-1, 0)), Err(SeparationError::StrategyUnbounded));
    }

    #[test]
    fn tighten_examples() {
        let inst = ex1();
        assert_eq!(tighten_rhs(&inst, &[rat(-2, 7)], &rat(-2, 7)).unwrap(), rat(-22, 21));
        assert_eq!(tighten_rhs(&inst, &[rat(-2, 5)], &rat(-1, 5)).unwrap(), int(-1));
        assert_eq!(tighten_rhs(&inst, &[int(1)], &int(0)), Err(SeparationError::Unbounded));
    }

    #[test]
    fn boundedness_examples() {
        let inst = ex1();
        let o = origin();
        assert_eq!(boundedness_check(&inst, &o, &[int(2)], &int(3)).unwrap(), Boundedness::InSet);
        assert_eq!(boundedness_check(&inst, &o, &[int(-1)], &int(0)).unwrap(), Boundedness::Outside);
        assert_eq!(
            boundedness_check(&inst, &o, &[rat(2, 100)], &rat(3, 100)).unwrap(),
            Boundedness::InClosedCone
        );
        // (0, 1) misses epi - origin since z(0) = 5, but a scaled copy hits it.
        assert_eq!(boundedness_check(&inst, &o, &[int(0)], &int(1)).unwrap(), Boundedness::InClosedCone);
        let inside = EpiPoint::new(vec![int(2)], int(3));
        assert!(boundedness_check(&inst, &inside, &[int(1)], &int(1)).is_err());
    }

    #[test]
    fn exposed_point_examples() {
        let inst = ex1();
        let o = origin();
        let e = exposed_point(&inst, &o, &[int(2)], &int(3)).unwrap();
        assert_eq!(e, EpiPoint::new(vec![rat(3, 2)], rat(9, 4)));
        assert!(Cut::new(vec![rat(-1, 6)], rat(-1, 3), int(-1)).is_tight_at(&e));
        let e = exposed_point(&inst, &o, &[rat(4, 3)], &rat(7, 3)).unwrap();
        assert_eq!(e, EpiPoint::new(vec![rat(4, 3)], rat(7, 3)));
        let e = exposed_point(&inst, &o, &[int(6)], &int(9)).unwrap();
        assert_eq!(e, EpiPoint::new(vec![rat(3, 2)], rat(9, 4)));
        assert!(matches!(
            exposed_point(&inst, &o, &[int(-1)], &int(0)),
            Err(SeparationError::PreconditionViolated(_))
        ));
    }
}
