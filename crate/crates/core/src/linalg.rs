//! Exact small-matrix linear algebra: ranks and determinants over `F_p`, and
//! fraction-free determinants over the integers.
//!
//! Integer determinants first run Bareiss elimination in checked `i128`
//! arithmetic and fall back to arbitrary precision when any step overflows,
//! so the result is always exact.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::field::FieldContext;

/// Rank of a matrix over `F_p` by Gaussian elimination.
pub fn rank_mod_p(ctx: FieldContext, mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = ctx.inv(rows[rank][col]).expect("pivot is nonzero");
        for r in rank + 1..rows.len() {
            let factor = ctx.mul(rows[r][col], inv);
            if factor == 0 {
                continue;
            }
            for c in col..ncols {
                let v = ctx.mul(factor, rows[rank][c]);
                rows[r][c] = ctx.sub(rows[r][c], v);
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant of a square matrix over `F_p`.
pub fn det_mod_p(ctx: FieldContext, rows: &mut [Vec<u64>]) -> u64 {
    let n = rows.len();
    let mut det = 1;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| rows[r][col] != 0) else {
            return 0;
        };
        if pivot != col {
            rows.swap(col, pivot);
            det = ctx.neg(det);
        }
        det = ctx.mul(det, rows[col][col]);
        let inv = ctx.inv(rows[col][col]).expect("pivot is nonzero");
        for r in col + 1..n {
            let factor = ctx.mul(rows[r][col], inv);
            if factor == 0 {
                continue;
            }
            for c in col + 1..n {
                let v = ctx.mul(factor, rows[col][c]);
                rows[r][c] = ctx.sub(rows[r][c], v);
            }
        }
    }
    det
}

/// Reduced row echelon form in place; returns the pivot column of each pivot row.
pub fn rref_mod_p(ctx: FieldContext, rows: &mut [Vec<u64>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let r0 = pivots.len();
        let Some(pivot) = (r0..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(r0, pivot);
        let inv = ctx.inv(rows[r0][col]).expect("pivot is nonzero");
        for c in col..ncols {
            rows[r0][c] = ctx.mul(rows[r0][c], inv);
        }
        for r in 0..rows.len() {
            if r == r0 || rows[r][col] == 0 {
                continue;
            }
            let factor = rows[r][col];
            for c in col..ncols {
                let v = ctx.mul(factor, rows[r0][c]);
                rows[r][c] = ctx.sub(rows[r][c], v);
            }
        }
        pivots.push(col);
    }
    pivots
}

/// Bareiss elimination in checked `i128`; `None` when an intermediate overflows.
pub fn det_i128(rows: &[Vec<i128>]) -> Option<i128> {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(0);
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    let det = if n == 0 { 1 } else { m[n - 1][n - 1] };
    Some(if negate { -det } else { det })
}

/// In-place Bareiss on a row-major `n × n` buffer; `None` on overflow.
pub fn det_i128_flat(m: &mut [i128], n: usize) -> Option<i128> {
    debug_assert_eq!(m.len(), n * n);
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n {
        if m[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return Some(0);
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            negate = !negate;
        }
        let pivot = m[k * n + k];
        for i in k + 1..n {
            let lead = m[i * n + k];
            for j in k + 1..n {
                let a = m[i * n + j].checked_mul(pivot)?;
                let b = lead.checked_mul(m[k * n + j])?;
                m[i * n + j] = a.checked_sub(b)? / prev;
            }
        }
        prev = pivot;
    }
    let det = if n == 0 { 1 } else { m[n * n - 1] };
    Some(if negate { -det } else { det })
}

/// Determinant over `F_p` of a row-major `n × n` buffer, destroying it.
pub fn det_mod_p_flat(ctx: FieldContext, m: &mut [u64], n: usize) -> u64 {
    let mut det = 1;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r * n + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for c in 0..n {
                m.swap(col * n + c, pivot * n + c);
            }
            det = ctx.neg(det);
        }
        let lead = m[col * n + col];
        det = ctx.mul(det, lead);
        let inv = ctx.inv(lead).expect("pivot is nonzero");
        for r in col + 1..n {
            let factor = ctx.mul(m[r * n + col], inv);
            if factor == 0 {
                continue;
            }
            for c in col + 1..n {
                let v = ctx.mul(factor, m[col * n + c]);
                m[r * n + c] = ctx.sub(m[r * n + c], v);
            }
        }
    }
    det
}

/// Rank over the rationals of an integer matrix, by fraction-free elimination.
pub fn rank_bigint(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let (a, b) = (m[rank][col].clone(), m[r][col].clone());
            for c in col..ncols {
                let v = &m[r][c] * &a - &m[rank][c] * &b;
                m[r][c] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Bareiss elimination in arbitrary precision.
pub fn det_bigint(rows: &[Vec<i128>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { BigInt::from(1) } else { m[n - 1][n - 1].clone() };
    if negate {
        -det
    } else {
        det
    }
}

pub fn det_exact(rows: &[Vec<i128>]) -> BigInt {
    match det_i128(rows) {
        Some(d) => BigInt::from(d),
        None => det_bigint(rows),
    }
}

pub fn det_is_zero(rows: &[Vec<i128>]) -> bool {
    match det_i128(rows) {
        Some(d) => d == 0,
        None => det_bigint(rows).is_zero(),
    }
}

/// Generator of the integer kernel of an `(m-1) × m` matrix of full row rank,
/// as signed maximal minors, divided by their gcd and with the first nonzero
/// entry made positive. `None` when the rows are dependent.
pub fn primitive_kernel_vector(rows: &[Vec<i128>]) -> Option<Vec<BigInt>> {
    let m = rows.len() + 1;
    debug_assert!(rows.iter().all(|r| r.len() == m));
    let mut v: Vec<BigInt> = (0..m)
        .map(|skip| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let det = det_exact(&minor);
            if skip % 2 == 1 {
                -det
            } else {
                det
            }
        })
        .collect();
    normalize_primitive(&mut v).then_some(v)
}

/// Divides by the gcd and fixes the sign of the first nonzero entry; `false`
/// for the zero vector.
pub fn normalize_primitive(v: &mut [BigInt]) -> bool {
    use num_integer::Integer;
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return false;
    }
    let flip = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in v.iter_mut() {
        *x = &*x / &g;
        if flip {
            *x = -&*x;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Leibniz expansion over all permutations, as an independent oracle.
    fn det_leibniz(rows: &[Vec<i128>]) -> BigInt {
        fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 0 {
                return vec![(vec![], false)];
            }
            let mut out = Vec::new();
            for (perm, odd) in permutations(n - 1) {
                for pos in 0..n {
                    let mut p = perm.clone();
                    p.insert(pos, n - 1);
                    // inserting at `pos` adds (n-1-pos) inversions
                    out.push((p, odd ^ ((n - 1 - pos) % 2 == 1)));
                }
            }
            out
        }
        permutations(rows.len())
            .into_iter()
            .map(|(perm, odd)| {
                let term: BigInt = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| BigInt::from(rows[i][j]))
                    .product();
                if odd {
                    -term
                } else {
                    term
                }
            })
            .sum()
    }

    #[test]
    fn known_determinants() {
        // concyclicity rows (x, y, x²+y², 1) for collinear-plus-one points
        let rows = vec![
            vec![0, 0, 0, 1],
            vec![1, 0, 1, 1],
            vec![2, 0, 4, 1],
            vec![0, 1, 1, 1],
        ];
        // cofactor expansion along the first row gives -1 * (-2) = 2
        assert_eq!(det_exact(&rows), BigInt::from(2));
        assert_eq!(det_leibniz(&rows), BigInt::from(2));
        assert_eq!(det_exact(&[]), BigInt::from(1));
        assert!(det_is_zero(&[vec![1, 2], vec![2, 4]]));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = 1i128 << 100;
        let rows = vec![vec![big, 1, 0], vec![3, big, 1], vec![0, 5, big]];
        assert_eq!(det_i128(&rows), None);
        assert_eq!(det_exact(&rows), det_leibniz(&rows));
    }

    #[test]
    fn mod_p_determinant_and_rank() {
        let ctx = FieldContext::new(13, 2).unwrap();
        let mut a = vec![vec![1, 5], vec![5, 1]];
        assert_eq!(det_mod_p(ctx, &mut a), 2);
        let mut b = vec![vec![1, 8], vec![5, 1]];
        assert_eq!(det_mod_p(ctx, &mut b), 0);
        assert_eq!(rank_mod_p(ctx, vec![vec![1, 8], vec![5, 1]]), 1);
        let mut r = vec![vec![2, 4, 1], vec![1, 2, 3]];
        let piv = rref_mod_p(ctx, &mut r);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(r[0], vec![1, 2, 0]);
    }

    #[test]
    fn flat_variants_agree() {
        let rows = vec![vec![0, 0, 0, 1], vec![1, 0, 1, 1], vec![2, 0, 4, 1], vec![0, 1, 1, 1]];
        let mut flat: Vec<i128> = rows.concat();
        assert_eq!(det_i128_flat(&mut flat, 4), Some(2));
        let ctx = FieldContext::new(13, 2).unwrap();
        let mut flat = vec![1, 5, 5, 1];
        assert_eq!(det_mod_p_flat(ctx, &mut flat, 2), 2);
        assert_eq!(rank_bigint(&rows), 4);
        assert_eq!(rank_bigint(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 0]]), 1);
    }

    #[test]
    fn kernel_vector() {
        // line through (0,0) and (2,4) in the plane: kernel of [2 4] is (2,-1)
        let v = primitive_kernel_vector(&[vec![2, 4]]).unwrap();
        assert_eq!(v, vec![BigInt::from(2), BigInt::from(-1)]);
        assert!(primitive_kernel_vector(&[vec![1, 2, 3], vec![2, 4, 6]]).is_none());
    }

    proptest! {
        #[test]
        fn bareiss_matches_leibniz(n in 1usize..6, seed in prop::collection::vec(-1000i128..1000, 36)) {
            let rows: Vec<Vec<i128>> = (0..n).map(|i| seed[i * 6..i * 6 + n].to_vec()).collect();
            prop_assert_eq!(det_exact(&rows), det_leibniz(&rows));
            prop_assert_eq!(det_bigint(&rows), det_leibniz(&rows));
            let mut flat: Vec<i128> = rows.concat();
            prop_assert_eq!(det_i128_flat(&mut flat, n).map(BigInt::from), Some(det_leibniz(&rows)));
            prop_assert_eq!(rank_bigint(&rows) == n, !det_leibniz(&rows).is_zero());
        }

        #[test]
        fn mod_p_det_matches_integer_det(n in 1usize..6, seed in prop::collection::vec(0i128..101, 36)) {
            let ctx = FieldContext::new(101, 2).unwrap();
            let rows: Vec<Vec<i128>> = (0..n).map(|i| seed[i * 6..i * 6 + n].to_vec()).collect();
            let mut modp: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
            let expected = det_leibniz(&rows) % BigInt::from(101);
            let expected = ((expected + BigInt::from(101)) % BigInt::from(101)).to_string();
            prop_assert_eq!(det_mod_p(ctx, &mut modp).to_string(), expected);
        }

        #[test]
        fn kernel_vector_is_orthogonal(seed in prop::collection::vec(-50i128..50, 12)) {
            let rows: Vec<Vec<i128>> = (0..3).map(|i| seed[i * 4..i * 4 + 4].to_vec()).collect();
            if let Some(v) = primitive_kernel_vector(&rows) {
                for r in &rows {
                    let dot: BigInt = r.iter().zip(&v).map(|(&a, b)| BigInt::from(a) * b).sum();
                    prop_assert!(dot.is_zero());
                }
            }
        }
    }
}
