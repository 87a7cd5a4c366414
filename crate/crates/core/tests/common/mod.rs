//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's arithmetic: determinants use cofactor
//! expansion, polynomials are plain exponent maps.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Poly = BTreeMap<Vec<u32>, BigInt>;

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut total = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * det_cofactor(&minor);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// gcd of all `k x k` minors of `m`.
pub fn gcd_of_minors(m: &[Vec<BigInt>], k: usize) -> BigInt {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut g = BigInt::zero();
    for rs in combinations(rows, k) {
        for cs in combinations(cols, k) {
            let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
            g = g.gcd(&det_cofactor(&sub));
        }
    }
    g
}

/// Rank as the largest `k` with a nonzero `k x k` minor.
pub fn rank_by_minors(m: &[Vec<BigInt>]) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    (1..=rows.min(cols)).rev().find(|&k| !gcd_of_minors(m, k).is_zero()).unwrap_or(0)
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
        .collect()
}

pub fn poly_eval(p: &Poly, x: &[BigInt]) -> BigInt {
    p.iter()
        .map(|(e, c)| e.iter().zip(x).fold(c.clone(), |acc, (&k, xi)| acc * xi.pow(k)))
        .sum()
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn poly_norm(p: &Poly) -> BigInt {
    p.values().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
}

/// Largest exponent vector when comparing from the last variable down.
pub fn rtl_leading(p: &Poly) -> (Vec<u32>, BigInt) {
    let (e, c) = p
        .iter()
        .max_by(|(a, _), (b, _)| a.iter().rev().cmp(b.iter().rev()))
        .expect("nonzero polynomial");
    (e.clone(), c.clone())
}

/// Exponent vectors of total degree `d` in `n` variables.
pub fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in exponents(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Primes up to `n` by trial division.
pub fn primes_trial(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
}

pub fn vp(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    Some(v)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Canonical primitive representative with first nonzero entry positive.
pub fn canonical(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    let lead = v.iter().copied().find(|&x| x != 0).expect("nonzero");
    let g = if lead < 0 { -g } else { g };
    v.iter().map(|x| x / g).collect()
}

/// Zeros of a cubic-or-lower ternary form of height at most `n`, by a
/// plain triple loop over the box.
pub fn brute_points(p: &Poly, n: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in -n..=n {
        for b in -n..=n {
            for c in -n..=n {
                if (a, b, c) == (0, 0, 0) || gcd(gcd(a, b), c) != 1 {
                    continue;
                }
                let first = [a, b, c].into_iter().find(|&x| x != 0).unwrap();
                if first < 0 {
                    continue;
                }
                if poly_eval(p, &[big(a), big(b), big(c)]).is_zero() {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out.sort();
    out
}

/// Exponent-map view of a library form.
pub fn to_poly(f: &detkit::Form) -> Poly {
    f.terms().map(|(m, c)| (m.exps().to_vec(), c.clone())).collect()
}

/// Conic x0^2 + x1^2 - x2^2.
pub fn conic() -> Poly {
    Poly::from([(vec![2, 0, 0], big(1)), (vec![0, 2, 0], big(1)), (vec![0, 0, 2], big(-1))])
}

/// Cuspidal cubic x0^3 - x1^2 x2.
pub fn cusp() -> Poly {
    Poly::from([(vec![3, 0, 0], big(1)), (vec![0, 2, 1], big(-1))])
}
