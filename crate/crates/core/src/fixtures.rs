//! Small named instances shared by tests, the CLI and the demo.

use crate::model::{Instance, MasterDomain};
use crate::rational::{int, rat, Rational};

/// `min x + y` s.t. `2x + y ≥ 5`, `x/2 + y ≥ 3`, `4x + 4y ≥ 14`, `x ≥ 0`,
/// written in `≤` form. The third row is redundant; the LP optimum is
/// `(4/3, 7/3)` with value `11/3`.
pub fn ex1() -> Instance {
    ex1_with_master(MasterDomain::Polyhedral { g_matrix: vec![vec![int(-1)]], g_rhs: vec![int(0)] })
}

pub fn ex1_with_master(master: MasterDomain) -> Instance {
    Instance::new(
        vec![int(1)],
        vec![int(1)],
        vec![vec![int(-2)], vec![rat(-1, 2)], vec![int(-4)]],
        vec![vec![int(-1)], vec![int(-1)], vec![int(-4)]],
        vec![int(-5), int(-3), int(-14)],
        master,
        int(0),
    )
    .expect("fixture is well formed")
}

/// `x ≥ lo` as a master domain in one dimension.
pub fn half_line(lo: Rational) -> MasterDomain {
    MasterDomain::Polyhedral { g_matrix: vec![vec![int(-1)]], g_rhs: vec![-lo] }
}

/// The three vertices of the alternative polyhedron of [`ex1`] at the
/// origin, as `(γ₁, γ₂, γ₃, γ₀)`.
pub fn ex1_origin_vertices() -> [Vec<Rational>; 3] {
    [
        vec![rat(1, 5), int(0), int(0), rat(1, 5)],
        vec![int(0), rat(1, 3), int(0), rat(1, 3)],
        vec![int(0), int(0), rat(1, 14), rat(2, 7)],
    ]
}
