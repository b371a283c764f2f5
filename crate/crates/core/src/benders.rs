//! The cutting-plane loop over the master problem
//! `min cᵀx + η` s.t. `x ∈ S`, `η ≥ M` and the cuts found so far.

use num_traits::{One, Signed, Zero};

use crate::cglp::ObjectiveSpec;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::model::{EpiPoint, Instance, MasterDomain, ModelError};
use crate::rational::{add, dot, scale, sub, Extended, Rational};
use crate::separation::{separate, Certificate, Cut, SeparationError, SeparationResult};
use crate::verify::{face_report, FaceReport, VerifyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BendersError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no incumbent available to update the core point")]
    NoIncumbent,
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where directional objectives come from when a core point drives them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorePointMode {
    /// `ω = p - master point`
    Fixed(EpiPoint),
    /// The same `(ω, ω₀)` every iteration.
    FromPoint { omega: Vec<Rational>, omega0: Rational },
    /// Core point moves toward each new incumbent:
    /// `blend·previous + (1 - blend)·incumbent`.
    UpdateOnIncumbent { blend: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub strategy: ObjectiveSpec,
    pub max_iterations: usize,
    /// When set, every iteration separates with the directional objective
    /// it produces, and `strategy` is used only if that fails.
    pub core_point_mode: Option<CorePointMode>,
    pub verify_each_cut: bool,
}

impl SolverConfig {
    pub fn new(strategy: ObjectiveSpec) -> Self {
        SolverConfig { strategy, max_iterations: 100, core_point_mode: None, verify_each_cut: false }
    }

    pub fn validate(&self) -> Result<(), BendersError> {
        if self.max_iterations == 0 {
            return Err(BendersError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if let Some(CorePointMode::UpdateOnIncumbent { blend }) = &self.core_point_mode {
            if !blend.is_positive() || *blend >= Rational::one() {
                return Err(BendersError::InvalidConfig("blend must lie strictly between 0 and 1".into()));
            }
        }
        Ok(())
    }
}

/// Result of a directional-objective update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreObjective {
    pub core: EpiPoint,
    pub omega: Vec<Rational>,
    pub omega0: Rational,
}

/// The directional objective `core - master` for the next separation.
pub fn next_core_objective(
    mode: &CorePointMode,
    previous_core: Option<&EpiPoint>,
    incumbent: Option<&EpiPoint>,
    master: &EpiPoint,
) -> Result<CoreObjective, BendersError> {
    let core = match mode {
        CorePointMode::Fixed(p) => p.clone(),
        CorePointMode::FromPoint { omega, omega0 } => {
            EpiPoint::new(add(&master.x, omega), &master.eta + omega0)
        }
        CorePointMode::UpdateOnIncumbent { blend } => {
            let inc = incumbent.ok_or(BendersError::NoIncumbent)?;
            match previous_core {
                None => inc.clone(),
                Some(prev) => {
                    let rest = Rational::one() - blend;
                    EpiPoint::new(
                        add(&scale(&prev.x, blend), &scale(&inc.x, &rest)),
                        &prev.eta * blend + &inc.eta * &rest,
                    )
                }
            }
        }
    };
    let omega = sub(&core.x, &master.x);
    let omega0 = &core.eta - &master.eta;
    Ok(CoreObjective { core, omega, omega0 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubproblemCheck {
    Feasible(Vec<Rational>),
    /// Farkas multipliers scaled so `γᵀ(b - Hx*) + γ₀η* = -1`.
    Infeasible(Certificate),
}

/// Solves `Ay ≤ b - Hx*`, `dᵀy ≤ η*`.
pub fn subproblem_check(instance: &Instance, point: &EpiPoint) -> SubproblemCheck {
    let system = instance.feasibility_system(point);
    match system.solve() {
        LpOutcome::Infeasible(f) => {
            let level: Rational = f.rows.iter().zip(system.rows()).map(|(g, r)| g * &r.rhs).sum();
            debug_assert!(level.is_negative());
            let coords = scale(&f.rows, &(-Rational::one() / level));
            SubproblemCheck::Infeasible(Certificate::from_coords(coords))
        }
        LpOutcome::Optimal(o) => SubproblemCheck::Feasible(o.primal),
        LpOutcome::Unbounded(r) => SubproblemCheck::Feasible(r.point),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MasterOutcome {
    Solved { point: EpiPoint, value: Rational },
    Infeasible,
    Unbounded,
}

/// The master relaxation with the given cuts.
pub fn solve_master(instance: &Instance, cuts: &[Cut]) -> MasterOutcome {
    let n = instance.n();
    let m_bound = instance.eta_lower_bound();
    match instance.master() {
        MasterDomain::Polyhedral { g_matrix, g_rhs } => {
            let mut obj = instance.c().to_vec();
            obj.push(Rational::one());
            let mut lp = LinearProgram::minimize(obj);
            lp.set_lower(n, Some(m_bound.clone()));
            for (row, g) in g_matrix.iter().zip(g_rhs) {
                let mut r = row.clone();
                r.push(Rational::zero());
                lp.add_row(r, Relation::Le, g.clone());
            }
            for cut in cuts {
                let mut r = cut.pi.clone();
                r.push(cut.pi0.clone());
                lp.add_row(r, Relation::Le, cut.alpha.clone());
            }
            match lp.solve() {
                LpOutcome::Optimal(o) => {
                    MasterOutcome::Solved { point: EpiPoint::from_coords(o.primal), value: o.value }
                }
                LpOutcome::Infeasible(_) => MasterOutcome::Infeasible,
                LpOutcome::Unbounded(_) => MasterOutcome::Unbounded,
            }
        }
        MasterDomain::Finite { points } => {
            let mut best: Option<(Rational, EpiPoint)> = None;
            'points: for x in points {
                let mut eta = m_bound.clone();
                for cut in cuts {
                    let lhs = dot(&cut.pi, x);
                    if cut.pi0.is_zero() {
                        if lhs > cut.alpha {
                            continue 'points;
                        }
                    } else if cut.pi0.is_negative() {
                        let need = (lhs - &cut.alpha) / (-cut.pi0.clone());
                        if need > eta {
                            eta = need;
                        }
                    }
                }
                let value = dot(instance.c(), x) + &eta;
                if best.as_ref().is_none_or(|(v, _)| value < *v) {
                    best = Some((value, EpiPoint::new(x.clone(), eta)));
                }
            }
            match best {
                Some((value, point)) => MasterOutcome::Solved { point, value },
                None => MasterOutcome::Infeasible,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IterationOutcome {
    Converged,
    CutAdded {
        cut: Cut,
        certificate: Certificate,
        cglp_value: Rational,
        /// The configured directional objective was unbounded and the
        /// unit-weight objective was used instead.
        fallback: bool,
        face_report: Option<FaceReport>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub index: usize,
    pub master_point: EpiPoint,
    pub master_value: Rational,
    pub outcome: IterationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal { x: Vec<Rational>, y: Vec<Rational>, value: Rational },
    IterationLimit,
    Infeasible,
    IllPosed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub trace: Vec<IterationRecord>,
}

impl SolveResult {
    pub fn cuts(&self) -> impl Iterator<Item = &Cut> {
        self.trace.iter().filter_map(|r| match &r.outcome {
            IterationOutcome::CutAdded { cut, .. } => Some(cut),
            IterationOutcome::Converged => None,
        })
    }
}

/// `(x, z(x))` when `z(x)` is finite.
fn epigraph_floor(instance: &Instance, x: &[Rational]) -> Option<EpiPoint> {
    match instance.subproblem_value(x) {
        Ok(Extended::Finite(v)) => Some(EpiPoint::new(x.to_vec(), v)),
        _ => None,
    }
}

pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveResult, BendersError> {
    config.validate()?;
    let mut trace = Vec::new();
    let mut cuts: Vec<Cut> = Vec::new();
    let mut incumbent: Option<(Rational, EpiPoint)> = None;
    let mut core: Option<EpiPoint> = None;
    let done = |status, trace| Ok(SolveResult { status, trace });

    if instance.epi_is_empty() {
        return done(SolveStatus::Infeasible, trace);
    }
    for index in 0..config.max_iterations {
        let (point, value) = match solve_master(instance, &cuts) {
            MasterOutcome::Solved { point, value } => (point, value),
            MasterOutcome::Infeasible => return done(SolveStatus::Infeasible, trace),
            MasterOutcome::Unbounded => {
                return done(SolveStatus::IllPosed("master relaxation is unbounded".into()), trace)
            }
        };
        if let Some(floor) = epigraph_floor(instance, &point.x) {
            let total = dot(instance.c(), &floor.x) + &floor.eta;
            if incumbent.as_ref().is_none_or(|(v, _)| total < *v) {
                incumbent = Some((total, floor));
            }
        }
        if let SubproblemCheck::Feasible(_) = subproblem_check(instance, &point) {
            trace.push(IterationRecord {
                index,
                master_point: point.clone(),
                master_value: value,
                outcome: IterationOutcome::Converged,
            });
            return done(finish(instance, &point), trace);
        }

        let directional = match &config.core_point_mode {
            None => match &config.strategy {
                ObjectiveSpec::Directional { .. } => Some(config.strategy.clone()),
                _ => None,
            },
            Some(mode) => {
                match next_core_objective(mode, core.as_ref(), incumbent.as_ref().map(|(_, p)| p), &point) {
                    Ok(obj) => {
                        core = Some(obj.core);
                        Some(ObjectiveSpec::Directional { omega: obj.omega, omega0: obj.omega0 })
                    }
                    Err(BendersError::NoIncumbent) => None,
                    Err(e) => return Err(e),
                }
            }
        };
        let first = directional.clone().unwrap_or_else(|| config.strategy.clone());
        let (result, fallback) = match separate(instance, &point, &first) {
            Err(SeparationError::StrategyUnbounded) => {
                let retry = if matches!(first, ObjectiveSpec::MisOnes) {
                    Err(SeparationError::StrategyUnbounded)
                } else {
                    separate(instance, &point, &ObjectiveSpec::MisOnes)
                };
                match retry {
                    Ok(r) => (r, true),
                    Err(SeparationError::StrategyUnbounded) => {
                        return done(
                            SolveStatus::IllPosed("cut-generating LP unbounded for every objective tried".into()),
                            trace,
                        )
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Err(e) => return Err(e.into()),
            Ok(r) => (r, false),
        };
        let SeparationResult::Separated(sep) = result else {
            unreachable!("point failed the feasibility check");
        };
        let face_report = if config.verify_each_cut { Some(face_report(instance, &sep.cut)?) } else { None };
        cuts.push(sep.cut.clone());
        trace.push(IterationRecord {
            index,
            master_point: point,
            master_value: value,
            outcome: IterationOutcome::CutAdded {
                cut: sep.cut,
                certificate: sep.certificate,
                cglp_value: sep.cglp_value,
                fallback,
                face_report,
            },
        });
    }
    done(SolveStatus::IterationLimit, trace)
}

/// Status for a master point that passed the feasibility check.
fn finish(instance: &Instance, point: &EpiPoint) -> SolveStatus {
    let mut lp = LinearProgram::minimize(instance.d().to_vec());
    for (row, r) in instance.a().iter().zip(instance.residual_rhs(&point.x)) {
        lp.add_row(row.clone(), Relation::Le, r);
    }
    let LpOutcome::Optimal(o) = lp.solve() else {
        return SolveStatus::IllPosed("subproblem value is -inf at the master point".into());
    };
    if o.value < *instance.eta_lower_bound() {
        return SolveStatus::IllPosed("eta lower bound cuts off the subproblem value".into());
    }
    let value = dot(instance.c(), &point.x) + &o.value;
    SolveStatus::Optimal { x: point.x.clone(), y: o.primal, value }
}

/// Master values obtained by adding `cuts` one at a time: entry `i` uses
/// the first `i` cuts.
pub fn replay_master_values(instance: &Instance, cuts: &[Cut]) -> Vec<Option<Rational>> {
    (0..=cuts.len())
        .map(|i| match solve_master(instance, &cuts[..i]) {
            MasterOutcome::Solved { value, .. } => Some(value),
            _ => None,
        })
        .collect()
}
