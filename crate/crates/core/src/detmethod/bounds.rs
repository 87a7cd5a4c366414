//! Calculators for the determinant divisibility lower bounds and the
//! Mertens sums. Unspecified implicit constants come from
//! [`BoundConstants`]; nothing here is asserted against data.

use num_bigint::BigInt;

use crate::arith::{big_ln, primes_up_to};
use crate::coords::BoundConstants;

/// `(sum_{p <= x} log p / p, sum_{p <= x} log p)`.
pub fn mertens_sums(x: f64) -> (f64, f64) {
    let limit = if x.is_finite() && x >= 0.0 { x.floor() as u64 } else { 0 };
    primes_up_to(limit).into_iter().fold((0.0, 0.0), |(a, b), p| {
        let lp = (p as f64).ln();
        (a + lp / p as f64, b + lp)
    })
}

fn factorial_root(n: u32) -> f64 {
    let lf: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    (lf / n as f64).exp()
}

/// Lower bound for the p-adic valuation of an `s x s` evaluation determinant
/// on an `n`-dimensional variety:
/// `n!^(1/n) * n/(n+1) * s^(1+1/n) / (p + c_sqrt sqrt(p)) - c_lin s`.
pub fn det_valuation_lower_bound(s: f64, p: u64, n: u32, c: &BoundConstants) -> f64 {
    let nf = n as f64;
    let p = p as f64;
    factorial_root(n) * nf / (nf + 1.0) * s.powf(1.0 + 1.0 / nf) / (p + c.c_sqrt * p.sqrt()) - c.c_lin * s
}

/// Lower bound for `log |Delta|` where `Delta` is the gcd of the nonzero
/// `s x s` evaluation minors:
/// `n!^(1/n) / (n+1) * s^(1+1/n) * (log s - c_gcd_det - n max(log log ||f||, 0))`.
pub fn gcd_det_log_lower_bound(s: f64, normf: &BigInt, n: u32, c: &BoundConstants) -> f64 {
    let nf = n as f64;
    let lognorm = big_ln(normf);
    let loglog = if lognorm > 1.0 { lognorm.ln() } else { 0.0 };
    factorial_root(n) / (nf + 1.0) * s.powf(1.0 + 1.0 / nf) * (s.ln() - c.c_gcd_det - nf * loglog)
}
