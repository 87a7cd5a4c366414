//! Projective rational points, naive-height enumeration and reduction mod p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd_i64, is_prime};
use crate::exactla::IntMatrix;
use crate::forms::Form;

/// Default cap on the number of box cells `(2N+1)^nvars` scanned.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("the zero vector is not a projective point")]
    Zero,
    #[error("height bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("enumeration supports 3 or 4 variables, got {0}")]
    UnsupportedNvars(usize),
    #[error("box has {cells} cells, budget is {budget}")]
    BudgetExceeded { cells: u128, budget: u128 },
    #[error("{p} is not a prime")]
    NotPrime { p: u64 },
    #[error("point is not on the reduction mod {p}")]
    NotOnReduction { p: u64 },
    #[error("point has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// Primitive integer vector whose first nonzero coordinate is positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint(Vec<i64>);

impl ProjPoint {
    /// Canonical representative of the line through `coords`.
    pub fn new(coords: Vec<i64>) -> Result<ProjPoint, PointError> {
        let g = coords.iter().fold(0, |g, &x| gcd_i64(g, x));
        if g == 0 {
            return Err(PointError::Zero);
        }
        let lead = coords.iter().copied().find(|&x| x != 0).unwrap();
        let g = if lead < 0 { -g } else { g };
        Ok(ProjPoint(coords.into_iter().map(|x| x / g).collect()))
    }

    /// Canonical representative of a big-integer vector, if it fits `i64`.
    pub fn from_big(coords: &[BigInt]) -> Option<ProjPoint> {
        let g = coords.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return None;
        }
        let v: Option<Vec<i64>> = coords.iter().map(|x| (x / &g).to_i64()).collect();
        ProjPoint::new(v?).ok()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Naive height: max absolute coordinate.
    pub fn height(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Canonical form of `A * self`.
    pub fn transform(&self, a: &IntMatrix) -> Option<ProjPoint> {
        ProjPoint::from_big(&a.mul_vec(&self.to_big()))
    }
}

/// All points of `f = 0` with height at most `n`, sorted.
pub fn enumerate_points(f: &Form, n: i64) -> Result<Vec<ProjPoint>, PointError> {
    enumerate_points_with_budget(f, n, DEFAULT_BUDGET)
}

pub fn box_cells(nvars: usize, n: i64) -> u128 {
    (2 * n.max(0) as u128 + 1).saturating_pow(nvars as u32)
}

pub fn enumerate_points_with_budget(f: &Form, n: i64, budget: u128) -> Result<Vec<ProjPoint>, PointError> {
    let k = f.nvars();
    if !(3..=4).contains(&k) {
        return Err(PointError::UnsupportedNvars(k));
    }
    if n < 1 {
        return Err(PointError::BadBound(n));
    }
    let cells = box_cells(k, n);
    if cells > budget {
        return Err(PointError::BudgetExceeded { cells, budget });
    }
    let eval = FastEval::new(f);
    let mut pts: Vec<ProjPoint> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|x0| scan_slice(&eval, k, n, x0))
        .collect();
    pts.sort();
    Ok(pts)
}

/// Points with first coordinate `x0` (canonical, primitive, on the form).
fn scan_slice(eval: &FastEval, k: usize, n: i64, x0: i64) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    let mut v = vec![-n; k];
    v[0] = x0;
    loop {
        let canonical = x0 > 0 || v[1..].iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
        if canonical && v.iter().fold(0, |g, &x| gcd_i64(g, x)) == 1 && eval.is_zero_at(&v) {
            out.push(ProjPoint(v.clone()));
        }
        let mut i = k - 1;
        loop {
            if i == 0 {
                return out;
            }
            v[i] += 1;
            if v[i] <= n {
                break;
            }
            v[i] = -n;
            i -= 1;
        }
    }
}

/// i128 evaluation with overflow fallback to big integers.
struct FastEval<'a> {
    form: &'a Form,
    small: Option<Vec<(Vec<u32>, i128)>>,
}

impl<'a> FastEval<'a> {
    fn new(form: &'a Form) -> Self {
        let small = form.terms().map(|(m, c)| Some((m.exps().to_vec(), c.to_i128()?))).collect();
        FastEval { form, small }
    }

    fn is_zero_at(&self, v: &[i64]) -> bool {
        if let Some(terms) = &self.small {
            if let Some(val) = eval_checked(terms, v) {
                return val == 0;
            }
        }
        self.form.evaluate_i64(v).is_zero()
    }
}

fn eval_checked(terms: &[(Vec<u32>, i128)], v: &[i64]) -> Option<i128> {
    let mut acc: i128 = 0;
    for (e, c) in terms {
        let mut t = *c;
        for (&x, &k) in v.iter().zip(e) {
            for _ in 0..k {
                t = t.checked_mul(x as i128)?;
            }
        }
        acc = acc.checked_add(t)?;
    }
    Some(acc)
}

/// Reduction of a point mod `p`, scaled so the last nonzero residue is 1.
pub fn reduce_point_mod_p(xi: &ProjPoint, p: u64) -> Result<Vec<u64>, PointError> {
    if !is_prime(p) {
        return Err(PointError::NotPrime { p });
    }
    let pi = p as i128;
    let r: Vec<i128> = xi.0.iter().map(|&x| (x as i128).rem_euclid(pi)).collect();
    // primitive, so some coordinate is a unit mod p
    let last = *r.iter().rev().find(|&&x| x != 0).expect("primitive point reduces to a nonzero vector");
    let inv = mod_pow(last, pi - 2, pi);
    Ok(r.iter().map(|&x| (x * inv % pi) as u64).collect())
}

fn mod_pow(mut b: i128, mut e: i128, m: i128) -> i128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Whether some partial derivative of `f` is nonzero at `xi` mod `p`.
pub fn is_smooth_mod_p(f: &Form, xi: &ProjPoint, p: u64) -> Result<bool, PointError> {
    if !is_prime(p) {
        return Err(PointError::NotPrime { p });
    }
    if xi.nvars() != f.nvars() {
        return Err(PointError::Dimension { expected: f.nvars(), found: xi.nvars() });
    }
    let pb = BigInt::from(p);
    if !f.evaluate_i64(xi.coords()).is_multiple_of(&pb) {
        return Err(PointError::NotOnReduction { p });
    }
    Ok((0..f.nvars()).any(|i| {
        f.partial_derivative(i).is_some_and(|df| !df.evaluate_i64(xi.coords()).is_multiple_of(&pb))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::parse_form;

    fn pt(v: &[i64]) -> ProjPoint {
        ProjPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn canonical_and_height() {
        assert_eq!(pt(&[-2, 4, 6]).coords(), &[1, -2, -3]);
        assert_eq!(pt(&[0, -1, 1]).coords(), &[0, 1, -1]);
        assert_eq!(pt(&[3, 4, 5]).height(), 5);
        assert_eq!(pt(&[0, 1, -1]).height(), 1);
        assert_eq!(pt(&[4, -3, -5]).height(), 5);
        assert_eq!(ProjPoint::new(vec![0, 0, 0]), Err(PointError::Zero));
    }

    #[test]
    fn conic_points() {
        let f = parse_form("x0^2 + x1^2 - x2^2", 3).unwrap();
        let s1 = enumerate_points(&f, 1).unwrap();
        let want: Vec<_> = [[0, 1, -1], [0, 1, 1], [1, 0, -1], [1, 0, 1]].iter().map(|v| pt(v)).collect();
        assert_eq!(s1, want);
        assert_eq!(enumerate_points(&f, 5).unwrap().len(), 12);
        let g = parse_form("x0^2 + x1^2 + x2^2", 3).unwrap();
        assert!(enumerate_points(&g, 10).unwrap().is_empty());
    }

    #[test]
    fn enumeration_errors() {
        let f = parse_form("x0^2 + x1^2 - x2^2", 3).unwrap();
        assert_eq!(enumerate_points(&f, 0), Err(PointError::BadBound(0)));
        assert!(matches!(enumerate_points_with_budget(&f, 10, 100), Err(PointError::BudgetExceeded { .. })));
        let g = parse_form("x0 - x1", 2).unwrap();
        assert_eq!(enumerate_points(&g, 3), Err(PointError::UnsupportedNvars(2)));
    }

    #[test]
    fn residues() {
        assert_eq!(reduce_point_mod_p(&pt(&[3, 4, 5]), 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(reduce_point_mod_p(&pt(&[1, 1, 1]), 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(reduce_point_mod_p(&pt(&[1, -1, 1]), 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(reduce_point_mod_p(&pt(&[0, 1, -1]), 3).unwrap(), vec![0, 2, 1]);
        assert_eq!(reduce_point_mod_p(&pt(&[2, 1, 0]), 5).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn smoothness() {
        let c = parse_form("x0*x2 - x1^2", 3).unwrap();
        assert!(is_smooth_mod_p(&c, &pt(&[1, 1, 1]), 5).unwrap());
        assert!(is_smooth_mod_p(&c, &pt(&[0, 0, 1]), 7).unwrap());
        let f = parse_form("x0^2 + x1^2 - x2^2", 3).unwrap();
        assert!(!is_smooth_mod_p(&f, &pt(&[1, 1, 0]), 2).unwrap());
        assert_eq!(is_smooth_mod_p(&c, &pt(&[1, 1, 0]), 5), Err(PointError::NotOnReduction { p: 5 }));
    }
}
