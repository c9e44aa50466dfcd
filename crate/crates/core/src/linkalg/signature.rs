use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};

use super::FramedLinkMatrix;

/// Signature of the linking matrix (positive minus negative eigenvalues),
/// computed exactly over the rationals.
pub fn signature(l: &FramedLinkMatrix) -> i64 {
    signature_over::<BigRational>(l)
}

/// Signature by symmetric congruence reduction over the field `F`.
///
/// Pivots are diagonal entries; when every remaining diagonal entry vanishes
/// a nonzero off-diagonal entry `a_ij` is folded in by adding row/column `j`
/// to row/column `i`, which makes `a_ii = 2 a_ij`. By Sylvester's law of
/// inertia the pivot signs give the signature. Exact only when `F` is.
pub fn signature_over<F>(l: &FramedLinkMatrix) -> i64
where
    F: Clone + Signed + FromPrimitive,
{
    let m = l.m();
    let mut a: Vec<Vec<F>> = (0..m)
        .map(|i| (0..m).map(|j| F::from_i64(l.get(i, j)).expect("i64 converts")).collect())
        .collect();
    let mut active: Vec<usize> = (0..m).collect();
    let mut sig = 0i64;

    while !active.is_empty() {
        let pivot = match active.iter().position(|&r| !a[r][r].is_zero()) {
            Some(p) => p,
            None => {
                let pair = active.iter().enumerate().find_map(|(pi, &i)| {
                    active.iter().find(|&&j| j != i && !a[i][j].is_zero()).map(|&j| (pi, i, j))
                });
                let Some((pi, i, j)) = pair else { break };
                // row_i += row_j, then col_i += col_j
                for c in 0..m {
                    let v = a[j][c].clone();
                    a[i][c] = a[i][c].clone() + v;
                }
                for r in 0..m {
                    let v = a[r][j].clone();
                    a[r][i] = a[r][i].clone() + v;
                }
                pi
            }
        };
        let r = active.swap_remove(pivot);
        let d = a[r][r].clone();
        for &t in &active {
            if a[t][r].is_zero() {
                continue;
            }
            let f = a[t][r].clone() / d.clone();
            for c in 0..m {
                let v = f.clone() * a[r][c].clone();
                a[t][c] = a[t][c].clone() - v;
            }
            for row in a.iter_mut() {
                let v = f.clone() * row[r].clone();
                row[t] = row[t].clone() - v;
            }
        }
        sig += if d.is_positive() { 1 } else { -1 };
    }
    sig
}
