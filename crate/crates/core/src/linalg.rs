//! Exact linear algebra over Q, plus the floating-point elimination used by
//! the numeric-only path.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclo::Rational;

/// Reduced row echelon form over Q. Returns the non-zero rows and their
/// pivot columns.
pub fn rref(mut rows: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rref(rows.to_vec()).1.len()
}

/// Unique solution of the square system `a x = b`, if `a` is invertible.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return None;
    }
    solve_consistent(a, b)
}

/// Unique solution of a (possibly overdetermined) system; `None` when the
/// system is inconsistent or has a non-trivial kernel.
pub fn solve_consistent(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = a.first().map_or(0, Vec::len);
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
        .collect();
    let (rows, pivots) = rref(augmented);
    if pivots.len() != ncols || pivots.contains(&ncols) {
        return None;
    }
    Some(rows.iter().map(|r| r[ncols].clone()).collect())
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (rows, pivots) = rref(augmented);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Clears denominators of a rational row into a primitive integer row.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    primitive(ints)
}

fn primitive(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
    row
}

/// Fraction-free elimination of an integer system. Rows stay primitive
/// integer vectors; returns the echelon rows with their pivot columns, with
/// every pivot column cleared in all other rows.
pub fn fraction_free_echelon(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows.sort();
    rows.dedup();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        // smallest magnitude pivot keeps coefficient growth down
        let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()))
        else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        let pv = pivot_row[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            let next: Vec<BigInt> = row.iter().zip(&pivot_row).map(|(x, y)| &pv * x - &f * y).collect();
            *row = primitive(next);
        }
        pivots.push(c);
        r += 1;
        let tail = rows.split_off(r);
        rows.extend(tail.into_iter().filter(|row| row.iter().any(|x| !x.is_zero())));
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Kernel of the integer system `rows · x = 0`, returned in reduced row
/// echelon form (each basis vector has a 1 at its own pivot and 0 at the
/// others, pivots strictly increasing).
pub fn kernel(rows: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let (ech, pivots) = fraction_free_echelon(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &pc) in ech.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[pc] = -Rational::new(row[f].clone(), row[pc].clone());
                }
            }
            v
        })
        .collect();
    if basis.is_empty() {
        return (basis, Vec::new());
    }
    rref(basis)
}

/// Reduced row echelon form in floating point with partial pivoting.
/// Entries below `tol` (relative to the largest entry) count as zero.
pub fn rref_f64(mut rows: Vec<Vec<f64>>, tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let scale = rows.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let eps = tol * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let (p, best) = (r..rows.len())
            .map(|i| (i, rows[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps {
            continue;
        }
        rows.swap(r, p);
        let pv = rows[r][c];
        for x in rows[r].iter_mut() {
            *x /= pv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0.0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Numeric kernel in reduced echelon form.
pub fn kernel_f64(rows: Vec<Vec<f64>>, ncols: usize, tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let (ech, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { rref_f64(rows, tol) };
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<f64>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0.0; ncols];
            v[f] = 1.0;
            for (row, &pc) in ech.iter().zip(&pivots) {
                v[pc] = -row[f];
            }
            v
        })
        .collect();
    if basis.is_empty() {
        return (basis, Vec::new());
    }
    rref_f64(basis, tol)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions, with the semiconvergent check).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let target = x.abs();
            let err_semi = (ps as f64 / qs as f64 - target).abs();
            let err_conv = (p1 as f64 / q1 as f64 - target).abs();
            if qs > 0 && err_semi < err_conv {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1.max(1)));
    if neg {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::rat;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_small_system() {
        // x + y + z = 0, x - y = 0
        let (k, piv) = kernel(ints(&[&[1, 1, 1], &[1, -1, 0]]), 3);
        assert_eq!(k.len(), 1);
        assert_eq!(piv, vec![0]);
        assert_eq!(k[0], vec![rat(1, 1), rat(1, 1), rat(-2, 1)]);
    }

    #[test]
    fn kernel_of_empty_system_is_everything() {
        let (k, piv) = kernel(Vec::new(), 2);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(k, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]);
    }

    #[test]
    fn inverse_and_solve() {
        let a = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(-1, 1), rat(2, 1)]]);
        assert_eq!(solve(&a, &[rat(3, 1), rat(2, 1)]), Some(vec![rat(1, 1), rat(1, 1)]));
        let singular = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        assert!(inverse(&singular).is_none());
        assert_eq!(rank(&singular), 1);
    }

    #[test]
    fn numeric_kernel_matches_exact() {
        let (k, piv) = kernel_f64(vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0]], 3, 1e-12);
        assert_eq!(piv, vec![0]);
        assert!((k[0][2] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rational_reconstruction() {
        assert_eq!(rationalize(0.75, 100), rat(3, 4));
        assert_eq!(rationalize(-1.0 / 3.0 + 1e-13, 100), rat(-1, 3));
        assert_eq!(rationalize(std::f64::consts::PI, 10), rat(22, 7));
        assert_eq!(rationalize(8.0 / 3.0, 1000), rat(8, 3));
    }
}
