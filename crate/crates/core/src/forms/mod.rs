//! Sparse homogeneous polynomials over the integers.
//!
//! A [`Form`] is never zero: every constructor that could produce the zero
//! polynomial reports [`FormError::Zero`] (or returns `None`) instead, so the
//! homogeneity invariant holds unconditionally.
//!
//! Terms are kept in right-to-left lexicographic order (see [`Monomial`]),
//! which is also the order used for exact division.

mod field;
mod modp;
mod parse;

pub use field::FiniteField;
pub use modp::{
    find_factor_mod_p, is_abs_irreducible_mod_p, reduce_mod_p, IrreducibilityConfig, ModPForm,
};
pub use parse::{infer_nvars, parse_form};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactla::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("inhomogeneous polynomial: term of degree {found} in a form of degree {expected}")]
    Inhomogeneous { expected: u32, found: u32 },
    #[error("the zero polynomial is not a form")]
    Zero,
    #[error("variable x{index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error("matrix is not unimodular (or has the wrong shape)")]
    NotUnimodular,
    #[error("{p} is not a prime")]
    NotPrime { p: u64 },
    #[error("form vanishes identically mod {p}")]
    ZeroModP { p: u64 },
    #[error("factor search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

/// Exponent vector ordered right-to-left lexicographically: the exponent of
/// the last variable is compared first, ties fall back to the previous one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    /// `x_var^degree` in `nvars` variables.
    pub fn power(nvars: usize, var: usize, degree: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = degree;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        let mut acc = BigInt::one();
        for (x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                acc *= x.pow(e);
            }
        }
        acc
    }

    pub fn evaluate_i64(&self, point: &[i64]) -> BigInt {
        let mut acc = BigInt::one();
        for (&x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                acc *= BigInt::from(x).pow(e);
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// All monomials of total degree `degree` in `nvars` variables, ascending in
/// right-to-left lexicographic order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<Monomial>) {
        if slots == 1 {
            prefix.push(left);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(prefix, left - e, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(&mut Vec::with_capacity(nvars), degree, nvars, &mut out);
    }
    out.sort();
    out
}

type TermMap = BTreeMap<Monomial, BigInt>;

/// Nonzero homogeneous polynomial with arbitrary-precision coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    nvars: usize,
    degree: u32,
    terms: TermMap,
}

impl Form {
    /// Builds a form from `(exponents, coefficient)` pairs. Repeated exponent
    /// vectors are summed; zero coefficients are dropped.
    pub fn new<I>(nvars: usize, terms: I) -> Result<Form, FormError>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut map = TermMap::new();
        let mut degree = None;
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(FormError::NvarsMismatch { left: nvars, right: exps.len() });
            }
            let m = Monomial(exps);
            let deg = m.degree();
            match degree {
                None => degree = Some(deg),
                Some(d) if d != deg => {
                    return Err(FormError::Inhomogeneous { expected: d, found: deg })
                }
                _ => {}
            }
            add_term(&mut map, m, c);
        }
        Form::from_map(nvars, map).ok_or(FormError::Zero)
    }

    /// `coef * x^exps`.
    pub fn monomial(exps: Vec<u32>, coef: BigInt) -> Result<Form, FormError> {
        let nvars = exps.len();
        Form::new(nvars, [(exps, coef)])
    }

    /// Linear form `sum coefs[i] * x_i`.
    pub fn linear(coefs: &[i64]) -> Result<Form, FormError> {
        let n = coefs.len();
        Form::new(
            n,
            coefs.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, BigInt::from(c))
            }),
        )
    }

    /// Wraps an already-homogeneous map; `None` when every coefficient vanished.
    pub(crate) fn from_map(nvars: usize, mut terms: TermMap) -> Option<Form> {
        terms.retain(|_, c| !c.is_zero());
        let degree = terms.keys().next()?.degree();
        debug_assert!(terms.keys().all(|m| m.degree() == degree && m.nvars() == nvars));
        Some(Form { nvars, degree, terms })
    }

    /// Form with the given coefficients on an ordered list of monomials.
    pub fn from_coefficients(
        nvars: usize,
        monomials: &[Monomial],
        coefs: &[BigInt],
    ) -> Option<Form> {
        let map = monomials
            .iter()
            .zip(coefs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Form::from_map(nvars, map)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending right-to-left lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Coefficient vector over an ordered list of monomials.
    pub fn coefficients_on(&self, monomials: &[Monomial]) -> Vec<BigInt> {
        monomials.iter().map(|m| self.coefficient(m)).collect()
    }

    /// `c_f`: the coefficient of `x_{last}^degree`.
    pub fn top_coefficient(&self) -> BigInt {
        self.coefficient(&Monomial::power(self.nvars, self.nvars - 1, self.degree))
    }

    /// Largest absolute value of a coefficient.
    pub fn norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().expect("forms are nonzero")
    }

    /// gcd of the coefficients (always positive).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// `(content, f / content)`; the sign is left untouched.
    pub fn primitive_part(&self) -> (BigInt, Form) {
        let c = self.content();
        if c.is_one() {
            return (c, self.clone());
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v / &c)).collect();
        (c, Form { nvars: self.nvars, degree: self.degree, terms })
    }

    pub fn neg(&self) -> Form {
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), -v)).collect();
        Form { nvars: self.nvars, degree: self.degree, terms }
    }

    /// Multiplies by a nonzero integer; `None` for zero.
    pub fn scale(&self, k: &BigInt) -> Option<Form> {
        if k.is_zero() {
            return None;
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * k)).collect();
        Some(Form { nvars: self.nvars, degree: self.degree, terms })
    }

    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "point length must match nvars");
        self.terms.iter().map(|(m, c)| c * m.evaluate(point)).sum()
    }

    pub fn evaluate_i64(&self, point: &[i64]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "point length must match nvars");
        self.terms.iter().map(|(m, c)| c * m.evaluate_i64(point)).sum()
    }

    /// Greatest term in right-to-left lexicographic order.
    pub fn leading_term_rtl(&self) -> (&Monomial, &BigInt) {
        self.terms.iter().next_back().expect("forms are nonzero")
    }

    pub fn multiply(&self, other: &Form) -> Result<Form, FormError> {
        self.check_nvars(other)?;
        let mut map = TermMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                add_term(&mut map, ma.mul(mb), ca * cb);
            }
        }
        // Z[x] is a domain, so the product of nonzero forms is nonzero.
        Ok(Form::from_map(self.nvars, map).expect("product of nonzero forms"))
    }

    pub fn add(&self, other: &Form) -> Result<Option<Form>, FormError> {
        self.check_nvars(other)?;
        if self.degree != other.degree {
            return Err(FormError::Inhomogeneous { expected: self.degree, found: other.degree });
        }
        let mut map = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut map, m.clone(), c.clone());
        }
        Ok(Form::from_map(self.nvars, map))
    }

    /// Exact division `p / self` by repeated elimination of the leading term
    /// (right-to-left lexicographic order). Returns the quotient `h` with
    /// `p = self * h` when it exists with integer coefficients; for primitive
    /// `self` this is the same as divisibility over the rationals.
    pub fn divides(&self, p: &Form) -> Result<Option<Form>, FormError> {
        self.check_nvars(p)?;
        if p.degree < self.degree {
            return Ok(None);
        }
        let (lm, lc) = self.leading_term_rtl();
        let mut rem = p.terms.clone();
        let mut quot = TermMap::new();
        while let Some((m, c)) = rem.last_key_value() {
            let Some(qm) = m.checked_div(lm) else {
                return Ok(None);
            };
            let (qc, r) = c.div_rem(lc);
            if !r.is_zero() {
                return Ok(None);
            }
            for (fm, fc) in &self.terms {
                add_term(&mut rem, fm.mul(&qm), -(&qc * fc));
            }
            quot.insert(qm, qc);
        }
        Ok(Form::from_map(self.nvars, quot))
    }

    /// `f(A x)`: substitutes `x_i -> sum_j A[i][j] x_j`. `A` must be a
    /// unimodular `nvars x nvars` matrix.
    pub fn compose_linear(&self, a: &IntMatrix) -> Result<Form, FormError> {
        let n = self.nvars;
        if a.rows() != n || a.cols() != n || !a.is_unimodular() {
            return Err(FormError::NotUnimodular);
        }
        let linear: Vec<TermMap> = (0..n)
            .map(|i| {
                let mut row = TermMap::new();
                for j in 0..n {
                    add_term(&mut row, Monomial::power(n, j, 1), a.get(i, j).clone());
                }
                row
            })
            .collect();
        let mut powers: HashMap<(usize, u32), TermMap> = HashMap::new();
        let mut out = TermMap::new();
        for (m, c) in &self.terms {
            let mut prod = TermMap::new();
            prod.insert(Monomial(vec![0; n]), c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, e))
                    .or_insert_with(|| poly_pow(&linear[i], e, n));
                prod = poly_mul(&prod, pw);
            }
            for (pm, pc) in prod {
                add_term(&mut out, pm, pc);
            }
        }
        Ok(Form::from_map(n, out).expect("unimodular substitution keeps forms nonzero"))
    }

    /// `d f / d x_var`, or `None` when it vanishes.
    pub fn partial_derivative(&self, var: usize) -> Option<Form> {
        let mut map = TermMap::new();
        for (m, c) in &self.terms {
            let e = m.exps()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] -= 1;
            add_term(&mut map, Monomial(exps), c * BigInt::from(e));
        }
        Form::from_map(self.nvars, map)
    }

    fn check_nvars(&self, other: &Form) -> Result<(), FormError> {
        if self.nvars != other.nvars {
            return Err(FormError::NvarsMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn add_term(map: &mut TermMap, m: Monomial, c: BigInt) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn poly_mul(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_term(&mut out, ma.mul(mb), ca * cb);
        }
    }
    out
}

fn poly_pow(base: &TermMap, e: u32, nvars: usize) -> TermMap {
    let mut acc = TermMap::new();
    acc.insert(Monomial(vec![0; nvars]), BigInt::one());
    for _ in 0..e {
        acc = poly_mul(&acc, base);
    }
    acc
}
