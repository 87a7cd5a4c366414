//! Exact integral LLL reduction (Lovász constant 3/4).
//!
//! All Gram–Schmidt data is kept as integers: `d[i]` is the Gram
//! determinant of the first `i` vectors and `lam[k][j] = d[j+1] * mu[k][j]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reduces a list of linearly independent integer vectors in place. The
/// lattice they span is unchanged.
pub fn lll_reduce(b: &mut [Vec<BigInt>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    // d[0] = 1, d[i + 1] belongs to vector i
    let mut d = vec![BigInt::zero(); n + 1];
    d[0] = BigInt::one();
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    let mut kmax = 0;
    d[1] = dot(&b[0], &b[0]);
    assert!(!d[1].is_zero(), "lll input must be independent");
    let mut k = 1;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "lll input must be independent");
                    d[k + 1] = u;
                }
            }
        }
        reduce(b, &mut lam, &d, k, k - 1);
        let lhs = BigInt::from(4) * &d[k + 1] * &d[k - 1];
        let rhs = BigInt::from(3) * &d[k] * &d[k] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            swap(b, &mut lam, &mut d, k, kmax);
            k = k.saturating_sub(1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn reduce(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let dl = &d[l + 1];
    if BigInt::from(2) * lam[k][l].abs() <= *dl {
        return;
    }
    // nearest integer to lam / d
    let q = (BigInt::from(2) * &lam[k][l] + dl).div_floor(&(BigInt::from(2) * dl));
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * dl;
    for i in 0..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

#[allow(clippy::needless_range_loop)]
fn swap(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    b.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let big_b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&big_b * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = big_b;
}
