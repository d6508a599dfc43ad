//! Small exact linear algebra over the Laurent ring.
//!
//! Elimination prefers unit pivots (`±q^{k/2}`), which keeps everything inside
//! the ring; when a column has no unit entry it falls back to a
//! fraction-free step and divides exactly at the end.

use crate::coeff_ring::LaurentScalar;

/// Gauss–Jordan on `rows`, eliminating the first `n_pivot` columns.
///
/// Returns, for each pivot column `j`, the row expressing
/// `column_j = Σ_k sol[j][k] · column_{n_pivot + k}` for the relation system
/// `Σ_c rows[r][c] · column_c = 0`. `None` if the pivot block is singular
/// or the solution leaves the Laurent ring.
pub fn solve_pivot_columns(mut rows: Vec<Vec<LaurentScalar>>, n_pivot: usize) -> Option<Vec<Vec<LaurentScalar>>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivot_row_of = Vec::with_capacity(n_pivot);
    let mut used = vec![false; rows.len()];
    for col in 0..n_pivot {
        let candidates: Vec<usize> = (0..rows.len())
            .filter(|&r| !used[r] && !rows[r][col].is_zero())
            .collect();
        let r = *candidates
            .iter()
            .find(|&&r| rows[r][col].as_unit().is_some())
            .or_else(|| candidates.iter().min_by_key(|&&r| rows[r][col].terms().len()))?;
        used[r] = true;
        if let Some(inv) = rows[r][col].unit_inverse() {
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
        }
        let pivot = rows[r][col].clone();
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            if pivot.is_one() {
                for c in 0..width {
                    if !prow[c].is_zero() {
                        row[c] = &row[c] - &(&a * &prow[c]);
                    }
                }
            } else {
                for c in 0..width {
                    row[c] = &(&row[c] * &pivot) - &(&a * &prow[c]);
                }
            }
        }
        pivot_row_of.push(r);
    }
    // Every non-pivot row must now be zero on the pivot block; it may carry
    // residual relations among the remaining columns, which callers check.
    let mut out = Vec::with_capacity(n_pivot);
    for (col, &r) in pivot_row_of.iter().enumerate() {
        let piv = &rows[r][col];
        let mut sol = Vec::with_capacity(width - n_pivot);
        for c in n_pivot..width {
            let x = (-&rows[r][c]).div_exact(piv)?;
            sol.push(x);
        }
        out.push(sol);
    }
    Some(out)
}

/// Inverse of a square Laurent matrix, if it exists over the ring.
pub fn laurent_inverse(m: &[Vec<LaurentScalar>]) -> Option<Vec<Vec<LaurentScalar>>> {
    let n = m.len();
    // Relations: M·x - e = 0 for each unit vector; unknowns x first, then e.
    let rows: Vec<Vec<LaurentScalar>> = (0..n)
        .map(|i| {
            let mut r = m[i].clone();
            for j in 0..n {
                r.push(if i == j {
                    -LaurentScalar::one()
                } else {
                    LaurentScalar::zero()
                });
            }
            r
        })
        .collect();
    let sol = solve_pivot_columns(rows, n)?;
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i32) -> LaurentScalar {
        LaurentScalar::q_pow(n)
    }

    #[test]
    fn inverse_of_triangular() {
        let z = LaurentScalar::zero();
        let m = vec![vec![q(1), &q(1) - &q(-3)], vec![z.clone(), q(-1)]];
        let inv = laurent_inverse(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = (0..2).fold(LaurentScalar::zero(), |acc, k| &acc + &(&m[i][k] * &inv[k][j]));
                assert_eq!(s, if i == j { LaurentScalar::one() } else { z.clone() });
            }
        }
    }

    #[test]
    fn non_unit_determinant_fails() {
        let m = vec![vec![&q(1) + &q(-1)]];
        assert!(laurent_inverse(&m).is_none());
    }
}
