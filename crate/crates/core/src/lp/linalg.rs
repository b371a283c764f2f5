//! Exact dense linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::rational::{sub, Rational};

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// column of each nonzero row, in order. Only the first `ncols` columns are
/// eligible as pivots, so an augmented right-hand side can ride along.
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let ncols = first.len();
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{v : rows * v = 0}` in `ncols` dimensions. Each basis vector sets
/// one free column to 1 and the other free columns to 0, so for an empty row
/// set this is the standard basis.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// The unique solution of `rows * x = rhs`, or `None` when the system is
/// inconsistent or underdetermined.
pub fn solve_unique(rows: &[Vec<Rational>], rhs: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = rref(&mut aug, ncols);
    if pivots.len() != ncols {
        return None;
    }
    if aug[pivots.len()..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some(aug[..ncols].iter().map(|row| row[ncols].clone()).collect())
}

/// Points of differing dimension were passed to [`affine_rank`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("point {index} has dimension {found}, expected {expected}")]
pub struct DimensionMismatch {
    pub index: usize,
    pub expected: usize,
    pub found: usize,
}

/// Dimension of the affine hull: -1 for no points, 0 for one point.
pub fn affine_rank(points: &[Vec<Rational>]) -> Result<isize, DimensionMismatch> {
    let Some(base) = points.first() else {
        return Ok(-1);
    };
    for (index, p) in points.iter().enumerate() {
        if p.len() != base.len() {
            return Err(DimensionMismatch { index, expected: base.len(), found: p.len() });
        }
    }
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| sub(p, base)).collect();
    Ok(rank(&diffs) as isize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn affine_rank_examples() {
        assert_eq!(affine_rank(&[]).unwrap(), -1);
        assert_eq!(affine_rank(&[v(&[1, 2])]).unwrap(), 0);
        assert_eq!(affine_rank(&[v(&[0, 0]), v(&[1, 1]), v(&[2, 2])]).unwrap(), 1);
        assert_eq!(affine_rank(&[v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]).unwrap(), 2);
        let err = affine_rank(&[v(&[0, 0]), v(&[1])]).unwrap_err();
        assert_eq!(err.index, 1);
    }

    #[test]
    fn nullspace_of_empty_is_standard_basis() {
        let ns = nullspace(&[], 3);
        assert_eq!(ns, vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
    }

    #[test]
    fn nullspace_vectors_are_orthogonal_to_rows() {
        let rows = vec![v(&[1, 2, 3]), v(&[2, 4, 7])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(crate::rational::dot(r, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solves_square_and_overdetermined_systems() {
        let rows = vec![v(&[2, 1]), v(&[1, 3]), v(&[3, 4])];
        let x = solve_unique(&rows, &v(&[5, 10, 15]), 2).unwrap();
        assert_eq!(x, vec![int(1), int(3)]);
        assert!(solve_unique(&rows, &v(&[5, 10, 16]), 2).is_none());
        assert!(solve_unique(&rows[..1], &v(&[5]), 2).is_none());
        let x = solve_unique(&[v(&[3])], &[int(1)], 1).unwrap();
        assert_eq!(x, vec![rat(1, 3)]);
    }
}
