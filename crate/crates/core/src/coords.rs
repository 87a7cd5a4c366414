//! Unimodular change of coordinates making the coefficient of
//! `x_last^d` comparable to the norm.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{big_ln, monomial_count};
use crate::exactla::IntMatrix;
use crate::forms::{Form, FormError};

/// The implicit constants of the bounds, all user-configurable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// Coefficient of `sqrt(p)` in the valuation bound denominator.
    pub c_sqrt: f64,
    /// Coefficient of the linear error term of the valuation bound.
    pub c_lin: f64,
    /// Additive constant in the log-determinant bound.
    pub c_gcd_det: f64,
    /// Threshold for `|c_f| / ||f||`; displayed, never branched on.
    pub kappa_v: f64,
    /// Leading constant of the auxiliary degree bound.
    pub c_m: f64,
    /// Additive constant next to `log ||f||` in the degree and count bounds.
    pub c_add: f64,
    /// Leading constant of the point count bound.
    pub c_count: f64,
    /// Additive constant of the point count bound.
    pub c_count_add: f64,
    /// Radii for the large-value tuple search.
    pub box_radius_schedule: Vec<u32>,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            c_sqrt: 0.0,
            c_lin: 0.0,
            c_gcd_det: 0.0,
            kappa_v: 1.0,
            c_m: 1.2,
            c_add: 1.0,
            c_count: 1.0,
            c_count_add: 0.0,
            box_radius_schedule: vec![1, 2, 4, 8],
        }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("c_sqrt", self.c_sqrt),
            ("c_lin", self.c_lin),
            ("c_gcd_det", self.c_gcd_det),
            ("kappa_v", self.kappa_v),
            ("c_m", self.c_m),
            ("c_add", self.c_add),
            ("c_count", self.c_count),
            ("c_count_add", self.c_count_add),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be a nonnegative number, got {v}"));
            }
        }
        if self.box_radius_schedule.is_empty() {
            return Err("radius schedule is empty".into());
        }
        if self.box_radius_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err("radius schedule must be strictly increasing".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordsError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("shear tuple must have at least one entry and end in 1")]
    MalformedTuple,
}

/// Tuple `a = (a_0, ..., a_n, 1)` with `|f(a)|` large against `||f||`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeValue {
    pub tuple: Vec<i64>,
    pub radius: u32,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub value: BigInt,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub norm: BigInt,
    /// `|value| / norm`, rounded.
    pub ratio: f64,
}

/// Scans `(a_0, ..., a_n, 1)` with `|a_i| <= R` for each radius in turn and
/// returns the best tuple at the first radius where `f` does not vanish
/// identically. Best means largest `|f(a)|`; ties go to the tuple that is
/// least in center-out order (0, 1, -1, 2, -2, ...) compared coordinate by
/// coordinate. The schedule keeps doubling past its end if needed.
pub fn find_large_value_tuple(f: &Form, schedule: &[u32]) -> LargeValue {
    let mut radii: Vec<u32> = schedule.to_vec();
    let mut next = schedule.last().map_or(1, |&r| (2 * r).max(1));
    loop {
        for &r in &radii {
            if let Some(best) = best_at_radius(f, r) {
                return best;
            }
        }
        radii = vec![next];
        next = next.saturating_mul(2);
    }
}

fn center_out(x: i64) -> u64 {
    if x > 0 {
        2 * x as u64 - 1
    } else {
        2 * x.unsigned_abs()
    }
}

fn best_at_radius(f: &Form, r: u32) -> Option<LargeValue> {
    let k = f.nvars() - 1;
    let r = r as i64;
    let mut a = vec![-r; k];
    a.push(1);
    let mut best: Option<(BigInt, Vec<u64>, Vec<i64>)> = None;
    loop {
        let v = f.evaluate_i64(&a);
        if !v.is_zero() {
            let key: Vec<u64> = a[..k].iter().map(|&x| center_out(x)).collect();
            let abs = v.abs();
            let better = match &best {
                None => true,
                Some((bv, bk, _)) => abs > *bv || (abs == *bv && key < *bk),
            };
            if better {
                best = Some((abs, key, a.clone()));
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                let (_, _, tuple) = best?;
                let value = f.evaluate_i64(&tuple);
                let norm = f.norm();
                let ratio = ratio_f64(&value.abs(), &norm);
                return Some(LargeValue { tuple, radius: r as u32, value, norm, ratio });
            }
            a[i] += 1;
            if a[i] <= r {
                break;
            }
            a[i] = -r;
            i += 1;
        }
    }
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    (big_ln(num) - big_ln(den)).exp()
}

/// Identity with last column replaced by `a` (whose last entry is 1).
pub fn build_shear(a: &[i64]) -> Result<IntMatrix, CoordsError> {
    let n = a.len();
    if n == 0 || a[n - 1] != 1 {
        return Err(CoordsError::MalformedTuple);
    }
    let mut m = IntMatrix::identity(n);
    for (i, &x) in a[..n - 1].iter().enumerate() {
        m.set(i, n - 1, BigInt::from(x));
    }
    Ok(m)
}

/// `|B[d]| * L^d` with `L` the largest row 1-norm of `a`; bounds
/// `||f o a|| / ||f||` for every form `f` of degree `d`.
pub fn norm_inflation_bound(a: &IntMatrix, d: u32) -> BigInt {
    let l = (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<BigInt>())
        .max()
        .unwrap_or_else(BigInt::zero);
    BigInt::from(monomial_count(d as i64, a.cols())) * l.pow(d)
}

/// Height inflation of `xi -> a * xi`: `nvars * max |a_ij|`.
pub fn height_inflation_factor(a: &IntMatrix) -> BigInt {
    BigInt::from(a.cols()) * a.max_abs()
}

/// Record of a normalization `g = f o A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub tuple: Vec<i64>,
    /// `|f(a)| / ||f||`.
    pub ratio: f64,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub norm_before: BigInt,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub norm_after: BigInt,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub c_after: BigInt,
    pub primitive: bool,
    /// `|c_g| / ||g||`.
    pub ratio_after: f64,
    /// `ratio` divided by the norm inflation bound of `A`; a proven lower
    /// bound for `ratio_after`.
    pub kappa_effective: f64,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub inflation_forward: BigInt,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub inflation_backward: BigInt,
    /// `||g|| <= inflation_forward ||f||` and `||f|| <= inflation_backward ||g||`.
    pub norm_ratio_ok: bool,
    /// `ratio_after >= kappa_v`; informational only.
    pub meets_kappa_v: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub g: Form,
    pub a: IntMatrix,
    pub a_inv: IntMatrix,
    pub certificate: Certificate,
}

/// `g = f o A` with `A` the shear from [`find_large_value_tuple`], so that
/// the coefficient of `x_last^d` in `g` is `f(a)`. When `|c_f| = ||f||`
/// already, `A` is the identity.
pub fn normalize(f: &Form, constants: &BoundConstants) -> Result<Normalization, CoordsError> {
    let nv = f.nvars();
    let (tuple, ratio) = if f.top_coefficient().abs() == f.norm() {
        let mut t = vec![0; nv];
        t[nv - 1] = 1;
        (t, 1.0)
    } else {
        let lv = find_large_value_tuple(f, &constants.box_radius_schedule);
        (lv.tuple, lv.ratio)
    };
    let a = build_shear(&tuple)?;
    let a_inv = a.inverse_unimodular().expect("shears are unimodular");
    let g = f.compose_linear(&a)?;
    let d = f.degree();
    let norm_before = f.norm();
    let norm_after = g.norm();
    let c_after = g.top_coefficient();
    let inflation_forward = norm_inflation_bound(&a, d);
    let inflation_backward = norm_inflation_bound(&a_inv, d);
    let norm_ratio_ok =
        norm_after <= &inflation_forward * &norm_before && norm_before <= &inflation_backward * &norm_after;
    let ratio_after = ratio_f64(&c_after.abs(), &norm_after);
    let kappa_effective = ratio * (-big_ln(&inflation_forward)).exp();
    let certificate = Certificate {
        tuple,
        ratio,
        primitive: g.is_primitive(),
        norm_before,
        norm_after,
        c_after,
        ratio_after,
        kappa_effective,
        inflation_forward,
        inflation_backward,
        norm_ratio_ok,
        meets_kappa_v: ratio_after >= constants.kappa_v,
    };
    Ok(Normalization { g, a, a_inv, certificate })
}
