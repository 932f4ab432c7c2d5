//! Small dense solvers over a generic field and an integer-preserving
//! nullspace routine for the harmonic-space construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `a x = b` by Gaussian elimination with magnitude pivoting.
/// Exact over the rational field.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Parameter("solve expects a square system".into()));
    }
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| a[r][col].magnitude().total_cmp(&a[s][col].magnitude()))
            .ok_or_else(|| Error::Domain("singular linear system".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
            let v = b[col].clone() * f;
            b[r] = b[r].clone() - v;
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Ok(x)
}

fn row_content(row: &[BigInt]) -> BigInt {
    row.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

fn normalize_row(row: &mut [BigInt]) {
    let g = row_content(row);
    if !g.is_zero() && g != BigInt::from(1) {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Integer basis of the right nullspace of an integer matrix.
///
/// Fraction-free reduction to row echelon form (cross-multiplication followed
/// by removal of the row content), then one integer vector per free column.
pub fn integer_nullspace(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|v| !v.is_zero())).cloned().collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let a = m[rank][col].clone();
            let b = m[r][col].clone();
            let (pivot_row, target) = if r < rank {
                let (lo, hi) = m.split_at_mut(rank);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = m.split_at_mut(r);
                (&lo[rank], &mut hi[0])
            };
            for c in 0..ncols {
                target[c] = &target[c] * &a - &pivot_row[c] * &b;
            }
            normalize_row(target);
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        // x_f = L, x_pivot_i = -row_i[f] * L / row_i[pivot_i], L = lcm of pivots
        let l = pivots
            .iter()
            .enumerate()
            .filter(|(i, _)| !m[*i][f].is_zero())
            .fold(BigInt::from(1), |acc, (i, &pc)| acc.lcm(&m[i][pc].abs()));
        let mut v = vec![BigInt::zero(); ncols];
        v[f] = l.clone();
        for (i, &pc) in pivots.iter().enumerate() {
            if !m[i][f].is_zero() {
                v[pc] = -(&m[i][f] * &l) / &m[i][pc];
            }
        }
        normalize_row(&mut v);
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::Exact;

    #[test]
    fn exact_solve() {
        let r = |n, d| rational(n, d);
        let a: Vec<Vec<Exact>> = vec![vec![r(2, 1), r(1, 1)], vec![r(1, 3), r(-1, 1)]];
        let x = solve(a, vec![r(1, 1), r(0, 1)]).unwrap();
        assert_eq!(x, vec![r(3, 7), r(1, 7)]);
        let singular: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(singular, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let b = |v: i64| BigInt::from(v);
        let rows = vec![vec![b(1), b(2), b(3), b(4)], vec![b(2), b(4), b(7), b(1)]];
        let ns = integer_nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &rows {
                let dot: BigInt = row.iter().zip(v).map(|(a, c)| a * c).sum();
                assert!(dot.is_zero());
            }
        }
        let full = integer_nullspace(&[], 3);
        assert_eq!(full.len(), 3);
    }
}
