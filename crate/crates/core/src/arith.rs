//! Small number-theoretic helpers shared across modules.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Deterministic primality test for 64-bit inputs (trial division is enough
/// at the sizes this crate works with).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Sieve of Eratosthenes: all primes `p <= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Natural logarithm of a positive big integer, accurate for any size.
pub fn big_ln(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "big_ln of a non-positive integer");
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("finite for < 1000 bits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `binomial(n, k)` as u128; panics on overflow (desk-scale arguments only).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of monomials of total degree `degree` in `nvars` variables.
/// Negative degrees have no monomials.
pub fn monomial_count(degree: i64, nvars: usize) -> u128 {
    if degree < 0 || nvars == 0 {
        return if degree == 0 && nvars == 0 { 1 } else { 0 };
    }
    binomial(degree as u64 + nvars as u64 - 1, nvars as u64 - 1)
}

/// p-adic valuation of a nonzero integer; `None` for zero (infinite valuation).
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}
