//! Exact integer linear algebra: fraction-free determinants, ranks, Hermite
//! and Smith normal forms, rational inverses.
//!
//! Everything runs over `BigInt`; matrices here are at most 13x13, so the
//! simple algorithms are fast enough and never overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type BigMatrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> BigMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Bareiss fraction-free elimination; returns the determinant of a square matrix.
pub fn det_big(mut a: BigMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn det_i64(rows: &[Vec<i64>]) -> BigInt {
    det_big(to_big(rows))
}

/// Sylvester's criterion on a symmetric integer matrix.
pub fn is_positive_definite(rows: &[Vec<i64>]) -> bool {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if rows[i][j] != rows[j][i] {
                return false;
            }
        }
    }
    (1..=n).all(|k| {
        let minor: Vec<Vec<i64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
        det_i64(&minor).is_positive()
    })
}

/// Rank over Q by fraction-free elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    rank_big(to_big(rows))
}

pub fn rank_big(mut a: BigMatrix) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            let (f, g) = (a[r][col].clone(), a[i][col].clone());
            for j in col..n {
                let v = &a[i][j] * &f - &a[r][j] * &g;
                a[i][j] = v;
            }
            // keep entries small
            let content = a[i][col..]
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for j in col..n {
                    a[i][j] = &a[i][j] / &content;
                }
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result has one row per pivot, pivots strictly increasing to the right,
/// positive pivots, and entries above each pivot reduced into `[0, pivot)`.
/// Two generator sets span the same lattice iff their HNFs are equal.
pub fn hnf(rows: &[Vec<i64>]) -> BigMatrix {
    hnf_big(to_big(rows))
}

pub fn hnf_big(mut a: BigMatrix) -> BigMatrix {
    let m = a.len();
    if m == 0 {
        return a;
    }
    let n = a[0].len();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()));
            let Some(piv) = piv else { break };
            a.swap(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                for j in col..n {
                    let v = &a[r][j] * &q;
                    a[i][j] -= v;
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for j in col..n {
                a[r][j] = -a[r][j].clone();
            }
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            if q.is_zero() {
                continue;
            }
            for j in col..n {
                let v = &a[r][j] * &q;
                a[i][j] -= v;
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// True iff `x` is an integer combination of the rows whose HNF is `h`.
pub fn in_hnf_span(h: &BigMatrix, x: &[i64]) -> bool {
    let mut v: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
    for row in h {
        let Some(col) = row.iter().position(|c| !c.is_zero()) else {
            continue;
        };
        if v[..col].iter().any(|c| !c.is_zero()) {
            return false;
        }
        let (q, rem) = v[col].div_rem(&row[col]);
        if !rem.is_zero() {
            return false;
        }
        for j in col..v.len() {
            let d = &row[j] * &q;
            v[j] -= d;
        }
    }
    v.iter().all(|c| c.is_zero())
}

/// Invariant factors (diagonal of the Smith normal form), with ones included.
pub fn smith_invariants(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a = to_big(rows);
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return out;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..m {
                    let v = &a[i][t] * &q;
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Exact inverse of a nonsingular integer matrix.
pub fn inverse_rational(rows: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let n = rows.len();
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> =
                r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..2 * n {
                let v = &a[col][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
