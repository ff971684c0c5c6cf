//! Exact rank computations used by the dimension oracles.

use num_traits::Zero;

use crate::algebra::Rational;
use crate::graded::{GradedElement, Monomial};

/// Rank of a rational matrix given by rows (Gaussian elimination).
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][col].recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Coordinates of `a` in the monomial basis `basis`; monomials of `a` that
/// are missing from `basis` are ignored.
pub fn coordinates(a: &GradedElement, basis: &[Monomial]) -> Vec<Rational> {
    basis.iter().map(|m| a.coefficient(m)).collect()
}
