//! Seeded random instances shared by the property and acceptance tests.
#![allow(dead_code)]

use benders_cuts::lp::{LinearProgram, LpOutcome, Relation};
use benders_cuts::rational::{int, rat, Extended, Rational};
use benders_cuts::{EpiPoint, Instance, MasterDomain};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff(rng: &mut TestRng) -> Rational {
    int(rng.gen_range(-5..=5))
}

/// A random instance together with a strictly feasible `(x0, y0)`.
pub struct Generated {
    pub instance: Instance,
    pub x0: Vec<Rational>,
    pub y0: Vec<Rational>,
}

pub struct Shape {
    pub max_n: usize,
    pub max_k: usize,
    pub max_m: usize,
}

pub const DESK: Shape = Shape { max_n: 3, max_k: 3, max_m: 5 };

/// `H`, `A` with entries in `{-5..5}`; `b = Hx0 + Ay0 + slack` with slack in
/// `{1..4}`, so `(x0, y0)` satisfies every row strictly; `d = Aᵀv` with
/// `v ≤ 0` so the subproblem is never unbounded. The master domain is the
/// box `|x_j| ≤ 6`, which holds `x0` in its interior.
pub fn instance(rng: &mut TestRng, shape: &Shape) -> Generated {
    let n = rng.gen_range(1..=shape.max_n);
    let k = rng.gen_range(1..=shape.max_k);
    let m = rng.gen_range(1..=shape.max_m);
    let x0: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
    let y0: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(-2..=2))).collect();
    let h: Vec<Vec<Rational>> = (0..m).map(|_| (0..n).map(|_| coeff(rng)).collect()).collect();
    let a: Vec<Vec<Rational>> = (0..m).map(|_| (0..k).map(|_| coeff(rng)).collect()).collect();
    let b: Vec<Rational> = (0..m)
        .map(|i| {
            let lhs: Rational = h[i].iter().zip(&x0).map(|(p, q)| p * q).sum::<Rational>()
                + a[i].iter().zip(&y0).map(|(p, q)| p * q).sum::<Rational>();
            lhs + int(rng.gen_range(1..=4))
        })
        .collect();
    let v: Vec<Rational> = (0..m).map(|_| int(-rng.gen_range(0..=2))).collect();
    let d: Vec<Rational> = (0..k).map(|j| a.iter().zip(&v).map(|(row, vi)| &row[j] * vi).sum()).collect();
    let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
    let mut g_matrix = Vec::new();
    let mut g_rhs = Vec::new();
    for j in 0..n {
        for s in [1, -1] {
            let mut row = vec![Rational::zero(); n];
            row[j] = int(s);
            g_matrix.push(row);
            g_rhs.push(int(6));
        }
    }
    let master = MasterDomain::Polyhedral { g_matrix, g_rhs };
    let instance = Instance::new(c, d, h, a, b, master, int(-1000)).expect("generated dimensions agree");
    Generated { instance, x0, y0 }
}

pub fn value_at(instance: &Instance, x: &[Rational]) -> Option<Rational> {
    match instance.subproblem_value(x).unwrap() {
        Extended::Finite(v) => Some(v),
        _ => None,
    }
}

/// A point outside `epi(z)`: a random `x` in the box, and `η` below `z(x)`
/// by 1 to 3 (any `η` when `z(x) = +∞`).
pub fn separable_point(rng: &mut TestRng, instance: &Instance) -> EpiPoint {
    let n = instance.n();
    loop {
        let x: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        let eta = match instance.subproblem_value(&x).unwrap() {
            Extended::Finite(v) => v - int(rng.gen_range(1..=3)),
            Extended::PosInf => int(rng.gen_range(-5..=5)),
            Extended::NegInf => continue,
        };
        let p = EpiPoint::new(x, eta);
        if !instance.epi_contains(&p) {
            return p;
        }
    }
}

/// Largest uniform slack `s ≤ 1` with `Hx + Ay + s ≤ b` for some `y`.
pub fn strict_slack(instance: &Instance, x: &[Rational]) -> Rational {
    let k = instance.k();
    let mut obj = vec![Rational::zero(); k];
    obj.push(Rational::one());
    let mut lp = LinearProgram::maximize(obj);
    lp.set_upper(k, Some(Rational::one()));
    for (a, r) in instance.a().iter().zip(instance.residual_rhs(x)) {
        let mut row = a.clone();
        row.push(Rational::one());
        lp.add_row(row, Relation::Le, r);
    }
    match lp.solve() {
        LpOutcome::Optimal(o) => o.value,
        _ => -Rational::one(),
    }
}

/// A point in the interior of `epi(z)`: `x0` nudged by a random multiple
/// of `1/10` per coordinate while rows stay strictly satisfied, and `η`
/// strictly above `z`.
pub fn interior_point(rng: &mut TestRng, g: &Generated) -> EpiPoint {
    let inst = &g.instance;
    let mut x = g.x0.clone();
    for _ in 0..4 {
        let cand: Vec<Rational> = g.x0.iter().map(|v| v + rat(rng.gen_range(-3..=3), 10)).collect();
        if strict_slack(inst, &cand).is_positive() {
            x = cand;
            break;
        }
    }
    let z = value_at(inst, &x).expect("strictly feasible x has finite value");
    EpiPoint::new(x, z + rat(rng.gen_range(1..=20), 4))
}

/// Epigraph of `inst` is full-dimensional.
pub fn full_dimensional(inst: &Instance) -> bool {
    inst.epi_dimension().map(|d| d == inst.n() + 1).unwrap_or(false)
}
