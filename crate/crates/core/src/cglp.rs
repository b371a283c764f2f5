//! Cut-generating linear programs.
//!
//! Certificates `(γ, γ₀) ≥ 0` live in ℝᵐ⁺¹ with `γ₀` last. A certificate
//! proves `(x*, η*) ∉ epi(z)` when `γᵀA + γ₀dᵀ = 0` and
//! `γᵀ(b - Hx*) + γ₀η* < 0`, and yields the cut `γᵀHx - γ₀η ≤ γᵀb`.

use num_traits::{One, Zero};

use crate::lp::{LinearProgram, Relation, Sense};
use crate::model::{EpiPoint, Instance, ModelError};
use crate::rational::{dot, zeros, Rational};

/// Farkas system of a master point: `γ, γ₀ ≥ 0`, `γᵀA + γ₀dᵀ = 0` and the
/// normalization `γᵀ(b - Hx*) + γ₀η* = -1` (or `≤ -1` when relaxed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltPolyhedron {
    point: EpiPoint,
    relaxed: bool,
    system: LinearProgram,
}

impl AltPolyhedron {
    pub fn point(&self) -> &EpiPoint {
        &self.point
    }

    pub fn relaxed(&self) -> bool {
        self.relaxed
    }

    /// `m + 1`
    pub fn num_vars(&self) -> usize {
        self.system.num_vars()
    }

    /// The constraint system with a zero objective.
    pub fn system(&self) -> &LinearProgram {
        &self.system
    }

    /// `max ω̃ᵀγ + ω̃₀γ₀` over the polyhedron.
    pub fn maximize(&self, omega_tilde: &[Rational], omega_tilde0: &Rational) -> LinearProgram {
        let mut obj = omega_tilde.to_vec();
        obj.push(omega_tilde0.clone());
        self.system.with_objective(Sense::Maximize, obj)
    }

    pub fn contains(&self, gamma: &[Rational]) -> bool {
        self.system.is_feasible_point(gamma)
    }

    pub fn is_empty(&self) -> bool {
        !self.system.solve().is_feasible()
    }
}

pub fn build_alt_polyhedron(instance: &Instance, point: &EpiPoint, relaxed: bool) -> AltPolyhedron {
    let m = instance.m();
    let mut system = LinearProgram::feasibility(m + 1);
    for j in 0..=m {
        system.nonneg(j);
    }
    for col in 0..instance.k() {
        let mut row: Vec<Rational> = instance.a().iter().map(|a| a[col].clone()).collect();
        row.push(instance.d()[col].clone());
        system.add_row(row, Relation::Eq, Rational::zero());
    }
    let mut norm = instance.residual_rhs(&point.x);
    norm.push(point.eta.clone());
    let rel = if relaxed { Relation::Le } else { Relation::Eq };
    system.add_row(norm, rel, -Rational::one());
    AltPolyhedron { point: point.clone(), relaxed, system }
}

/// How a CGLP objective is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveSpec {
    /// Unit weights on the rows that involve `x`, and on `γ₀`.
    MisOnes,
    /// A master-space direction `(ω, ω₀)`, lifted through `H`.
    Directional { omega: Vec<Rational>, omega0: Rational },
    /// Weights `(ω̃, ω̃₀)` directly on the certificate.
    Custom { omega_tilde: Vec<Rational>, omega_tilde0: Rational },
}

impl ObjectiveSpec {
    /// Certificate-space weights of this objective.
    pub fn lifted(&self, instance: &Instance) -> Result<(Vec<Rational>, Rational), ModelError> {
        match self {
            ObjectiveSpec::MisOnes => Ok(mis_objective(instance)),
            ObjectiveSpec::Directional { omega, omega0 } => lift_objective(instance, omega, omega0),
            ObjectiveSpec::Custom { omega_tilde, omega_tilde0 } => {
                if omega_tilde.len() != instance.m() {
                    return Err(ModelError::Dimension {
                        what: "omega_tilde".into(),
                        expected: instance.m(),
                        found: omega_tilde.len(),
                    });
                }
                Ok((omega_tilde.clone(), omega_tilde0.clone()))
            }
        }
    }
}

/// `(Hω, -ω₀)`
pub fn lift_objective(
    instance: &Instance,
    omega: &[Rational],
    omega0: &Rational,
) -> Result<(Vec<Rational>, Rational), ModelError> {
    if omega.len() != instance.n() {
        return Err(ModelError::Dimension { what: "omega".into(), expected: instance.n(), found: omega.len() });
    }
    Ok((instance.h_times(omega), -omega0.clone()))
}

/// Weight `-1` on every row of `H` with a nonzero entry and on `γ₀`, `0` on
/// zero rows. Maximizing it minimizes the weighted 1-norm of a certificate.
pub fn mis_objective(instance: &Instance) -> (Vec<Rational>, Rational) {
    let w = instance
        .h()
        .iter()
        .map(|row| if row.iter().all(Zero::is_zero) { Rational::zero() } else { -Rational::one() })
        .collect();
    (w, -Rational::one())
}

/// Variables `(π ∈ ℝⁿ, π₀, γ ∈ ℝᵐ)`: `max ωᵀπ + ω₀π₀` s.t.
/// `πᵀx* + π₀η* - γᵀb ≥ 1`, `Aᵀγ - π₀d = 0`, `Hᵀγ = π`, `π₀ ≤ 0`, `γ ≥ 0`.
pub fn build_reverse_polar_lp(
    instance: &Instance,
    point: &EpiPoint,
    omega: &[Rational],
    omega0: &Rational,
) -> LinearProgram {
    let (n, m) = (instance.n(), instance.m());
    assert_eq!(omega.len(), n);
    let nv = n + 1 + m;
    let mut obj = omega.to_vec();
    obj.push(omega0.clone());
    obj.extend(zeros(m));
    let mut lp = LinearProgram::maximize(obj);
    lp.set_upper(n, Some(Rational::zero()));
    for j in n + 1..nv {
        lp.nonneg(j);
    }
    let mut row = point.x.clone();
    row.push(point.eta.clone());
    row.extend(instance.b().iter().map(|b| -b));
    lp.add_row(row, Relation::Ge, Rational::one());
    for col in 0..instance.k() {
        let mut row = zeros(n);
        row.push(-instance.d()[col].clone());
        row.extend(instance.a().iter().map(|a| a[col].clone()));
        lp.add_row(row, Relation::Eq, Rational::zero());
    }
    for col in 0..n {
        let mut row = zeros(nv);
        row[col] = -Rational::one();
        for (i, h) in instance.h().iter().enumerate() {
            row[n + 1 + i] = h[col].clone();
        }
        lp.add_row(row, Relation::Eq, Rational::zero());
    }
    lp
}

/// Variables `(γ, γ₀)`: `max γᵀ(Hx* - b) - γ₀η*` s.t. `γᵀA + γ₀dᵀ = 0`,
/// `ω̃ᵀγ + ω̃₀γ₀ = -1`, `γ, γ₀ ≥ 0`. An optimum `ξ > 0` scaled by `1/ξ` is
/// optimal over the relaxed polyhedron with value `-1/ξ`.
pub fn build_cglp_normalized(
    instance: &Instance,
    point: &EpiPoint,
    omega_tilde: &[Rational],
    omega_tilde0: &Rational,
) -> LinearProgram {
    let m = instance.m();
    assert_eq!(omega_tilde.len(), m);
    let mut obj: Vec<Rational> = instance.residual_rhs(&point.x).into_iter().map(|r| -r).collect();
    obj.push(-point.eta.clone());
    let mut lp = LinearProgram::maximize(obj);
    for j in 0..=m {
        lp.nonneg(j);
    }
    for col in 0..instance.k() {
        let mut row: Vec<Rational> = instance.a().iter().map(|a| a[col].clone()).collect();
        row.push(instance.d()[col].clone());
        lp.add_row(row, Relation::Eq, Rational::zero());
    }
    let mut row = omega_tilde.to_vec();
    row.push(omega_tilde0.clone());
    lp.add_row(row, Relation::Eq, -Rational::one());
    lp
}

/// Variables `(y ∈ ℝᵏ, λ)`: `min λ` s.t. `Ay + λω̃ ≤ b - Hx*` (rows `0..m`)
/// and `dᵀy + λω̃₀ ≤ η*` (row `m`). With `λ* > 0`, `-dual/λ*` is optimal over
/// the relaxed polyhedron with value `-1/λ*`.
pub fn build_cglp_relaxed_subproblem(
    instance: &Instance,
    point: &EpiPoint,
    omega_tilde: &[Rational],
    omega_tilde0: &Rational,
) -> LinearProgram {
    let k = instance.k();
    assert_eq!(omega_tilde.len(), instance.m());
    let mut obj = zeros(k);
    obj.push(Rational::one());
    let mut lp = LinearProgram::minimize(obj);
    for ((a, w), r) in instance.a().iter().zip(omega_tilde).zip(instance.residual_rhs(&point.x)) {
        let mut row = a.clone();
        row.push(w.clone());
        lp.add_row(row, Relation::Le, r);
    }
    let mut row = instance.d().to_vec();
    row.push(omega_tilde0.clone());
    lp.add_row(row, Relation::Le, point.eta.clone());
    lp
}

/// Objective value of a certificate under `(ω̃, ω̃₀)`.
pub fn certificate_objective(gamma: &[Rational], omega_tilde: &[Rational], omega_tilde0: &Rational) -> Rational {
    let (g, g0) = gamma.split_at(omega_tilde.len());
    dot(g, omega_tilde) + &g0[0] * omega_tilde0
}
