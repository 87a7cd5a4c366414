//! Construction of an auxiliary form vanishing on every point of bounded
//! height but not divisible by the defining form, plus the numeric audit
//! of the inequalities that force it to exist.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{big_ln, monomial_count};
use crate::coords::BoundConstants;
use crate::detmethod::{eval_matrix, gcd_det_log_lower_bound, monomial_basis, select_independent};
use crate::exactla::{bv_bound, kernel_basis, small_kernel_vector, BvBound};
use crate::forms::{Form, Monomial};
use crate::points::{enumerate_points_with_budget, PointError, ProjPoint, DEFAULT_BUDGET};

/// Starting degree for the auxiliary form:
/// `ceil(c_M N^((n+1)/(n d^(1/n))) (log ||f|| + c_add) ||f||^(-1/(n d^(1+1/n))))`,
/// at least `d`. For `||f|| = 1` the log factor is `c_add`.
pub fn degree_bound(d: u32, n: u32, big_n: u64, normf: &BigInt, c: &BoundConstants) -> u32 {
    let (df, nf) = (d as f64, n as f64);
    let ln_norm = big_ln(normf).max(0.0);
    let d_root = df.powf(1.0 / nf);
    let v = c.c_m
        * (big_n as f64).powf((nf + 1.0) / (nf * d_root))
        * (ln_norm + c.c_add)
        * (-ln_norm / (nf * df * d_root)).exp();
    let m = (v - 1e-9).ceil();
    if m.is_finite() && m > d as f64 {
        m.min(u32::MAX as f64) as u32
    } else {
        d
    }
}

/// `c_count N^(2/d) (log ||f|| + c_add) ||f||^(-1/d^2) + c_count_add`.
pub fn count_points_bound(d: u32, big_n: u64, normf: &BigInt, c: &BoundConstants) -> f64 {
    let df = d as f64;
    let ln_norm = big_ln(normf).max(0.0);
    c.c_count * (big_n as f64).powf(2.0 / df) * (ln_norm + c.c_add) * (-ln_norm / (df * df)).exp() + c.c_count_add
}

/// Both sides of the inequalities whose incompatibility forces the
/// auxiliary form to exist. Logs are natural.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub s: u64,
    pub m: u32,
    pub big_n: u64,
    /// `(s+1)/2 log s + (n+1)/2 s log M + M s log N`.
    pub gram_log_upper_fine: f64,
    /// `(n+2) s log s + M s log N`.
    pub gram_log_upper: f64,
    /// Lower bound for the log of the determinantal divisor.
    pub divisor_log_lower: f64,
    /// `|B[M-d]| log(kappa_v ||f||)`: lower bound for the log of the
    /// left side of the small-solution inequality.
    pub frame_log_lower: f64,
    pub combined_left: f64,
    /// `M s log N - M^(n+1)/(n+1)! log(kappa_v ||f||)`.
    pub combined_right: f64,
    /// `n d^(1/n)/(n+1) (log M - c_gcd_det - max(log log ||f||, 0))`.
    pub normalized_left: f64,
    /// `log N - log ||f|| / (d (n+1))`.
    pub normalized_right: f64,
    /// Whether the left side of the normalized comparison dominates.
    pub contradiction: bool,
}

pub fn audit_inequality(
    s: u64,
    m: u32,
    big_n: u64,
    normf: &BigInt,
    d: u32,
    n: u32,
    c: &BoundConstants,
) -> AuditReport {
    let (sf, mf, nf, df) = (s as f64, m as f64, n as f64, d as f64);
    let ln_s = if s > 0 { sf.ln() } else { 0.0 };
    let ln_m = if m > 0 { mf.ln() } else { 0.0 };
    let ln_big_n = (big_n as f64).ln();
    let ln_norm = big_ln(normf);
    let loglog = if ln_norm > 1.0 { ln_norm.ln() } else { 0.0 };
    let ln_kappa_norm = c.kappa_v.ln() + ln_norm;

    let gram_log_upper_fine = (sf + 1.0) / 2.0 * ln_s + (nf + 1.0) / 2.0 * sf * ln_m + mf * sf * ln_big_n;
    let gram_log_upper = (nf + 2.0) * sf * ln_s + mf * sf * ln_big_n;
    let divisor_log_lower = if s > 0 { gcd_det_log_lower_bound(sf, normf, n, c) } else { 0.0 };
    let lower_count = monomial_count(m as i64 - d as i64, n as usize + 2) as f64;
    let frame_log_lower = lower_count * ln_kappa_norm;
    let fact: f64 = (1..=n + 1).map(|k| k as f64).product();
    let combined_right = mf * sf * ln_big_n - mf.powf(nf + 1.0) / fact * ln_kappa_norm;
    let normalized_left = nf * df.powf(1.0 / nf) / (nf + 1.0) * (ln_m - c.c_gcd_det - loglog);
    let normalized_right = ln_big_n - ln_norm / (df * (nf + 1.0));
    AuditReport {
        s,
        m,
        big_n,
        gram_log_upper_fine,
        gram_log_upper,
        divisor_log_lower,
        frame_log_lower,
        combined_left: divisor_log_lower,
        combined_right,
        normalized_left,
        normalized_right,
        contradiction: normalized_left > normalized_right,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BezoutError {
    #[error("bezout count needs plane curves (3 variables), got {0}")]
    Nvars(usize),
    #[error("the auxiliary form is divisible by the curve")]
    Divisible,
    #[error("a point of the set is not a common zero")]
    NotCommonZero,
}

/// `|S| <= deg f * deg g` for plane curves without a common component.
pub fn bezout_check(f: &Form, g: &Form, s: &[ProjPoint]) -> Result<bool, BezoutError> {
    if f.nvars() != 3 || g.nvars() != 3 {
        return Err(BezoutError::Nvars(f.nvars()));
    }
    if f.divides(g).ok().flatten().is_some() {
        return Err(BezoutError::Divisible);
    }
    if s.iter().any(|x| !f.evaluate_i64(x.coords()).is_zero() || !g.evaluate_i64(x.coords()).is_zero()) {
        return Err(BezoutError::NotCommonZero);
    }
    Ok(s.len() as u64 <= f.degree() as u64 * g.degree() as u64)
}

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    /// First degree tried; defaults to [`degree_bound`].
    pub m_start: Option<u32>,
    /// Whether to raise `M` after a failed degree.
    pub escalate: bool,
    pub constants: BoundConstants,
    /// Cap on enumeration box cells.
    pub enumeration_budget: u128,
    /// Cap on box cells for certifying the kernel vector against the
    /// small-solution bound.
    pub kernel_budget: u128,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            m_start: None,
            escalate: true,
            constants: BoundConstants::default(),
            enumeration_budget: DEFAULT_BUDGET,
            kernel_budget: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub vanishes_on_s: bool,
    pub not_divisible_by_f: bool,
    /// `None` outside plane curves.
    pub bezout_ok: Option<bool>,
}

/// What the failed degree looked like: the kernel of the evaluation matrix
/// consists of multiples of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureCheck {
    pub kernel_dim: usize,
    pub all_divisible_by_f: bool,
    /// Every kernel form has norm at least `|c_f|`.
    pub norms_at_least_cf: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attempt {
    pub m: u32,
    pub r: usize,
    pub threshold: usize,
    pub s: usize,
    pub success: bool,
    pub failure_check: Option<FailureCheck>,
    pub audit: AuditReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxResult {
    pub g: Form,
    pub m: u32,
    pub points: Vec<ProjPoint>,
    pub xi: Vec<ProjPoint>,
    pub s: usize,
    pub r: usize,
    /// `|B[M]| - |B[M-d]|`.
    pub threshold: usize,
    /// Small-solution data of the full `s x r` evaluation matrix.
    pub bv: Option<BvBound>,
    /// Small-solution data of the system actually solved (columns off the
    /// leading monomial ideal of `f`).
    pub bv_standard: Option<BvBound>,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub g_max_norm: BigInt,
    /// Whether an exhaustive search confirmed the solved system's bound.
    pub certified: Option<bool>,
    pub checks: Checks,
    /// Empty point set: `g` is a monomial and vanishing is vacuous.
    pub degenerate: bool,
    pub attempts: Vec<Attempt>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("input form is not primitive")]
    NotPrimitive,
    #[error(transparent)]
    Points(#[from] PointError),
    #[error("no auxiliary form found up to degree {m_cap}")]
    CapReached { m_cap: u32, attempts: Vec<Attempt> },
}

/// Runs the construction. For `M = M_start, M_start + 1, ...` (up to four
/// times the degree bound): select a maximal independent tuple `xi` of the
/// points, and if its size `s` is below `|B[M]| - |B[M-d]|`, solve for a
/// form supported on the monomials not divisible by the leading monomial
/// of `f` and vanishing on `xi`. Such a form is never divisible by `f` and,
/// since `xi` is maximal, vanishes on every point.
pub fn construct(f: &Form, big_n: u64, opts: &ConstructOptions) -> Result<AuxResult, ConstructError> {
    if !f.is_primitive() {
        return Err(ConstructError::NotPrimitive);
    }
    let nvars = f.nvars();
    let d = f.degree();
    let n = nvars as u32 - 2;
    let normf = f.norm();
    let c = &opts.constants;
    let bound = degree_bound(d, n, big_n, &normf, c);
    let m0 = opts.m_start.unwrap_or(bound);
    let n_i64 = i64::try_from(big_n).map_err(|_| PointError::BadBound(i64::MAX))?;
    let points = enumerate_points_with_budget(f, n_i64, opts.enumeration_budget)?;
    let lm = f.leading_term_rtl().0.clone();

    if points.is_empty() {
        let m = m0.max(d);
        let basis = monomial_basis(m, nvars);
        let mono = basis.monomials.iter().rev().find(|x| !lm.divides(x)).expect("x0^M is standard").clone();
        let g = Form::monomial(mono.exps().to_vec(), BigInt::from(1)).unwrap();
        let checks = Checks {
            vanishes_on_s: true,
            not_divisible_by_f: f.divides(&g).ok().flatten().is_none(),
            bezout_ok: (nvars == 3).then_some(true),
        };
        return Ok(AuxResult {
            g,
            m,
            points,
            xi: Vec::new(),
            s: 0,
            r: basis.len(),
            threshold: threshold(m, d, nvars),
            bv: None,
            bv_standard: None,
            g_max_norm: BigInt::from(1),
            certified: None,
            checks,
            degenerate: true,
            attempts: Vec::new(),
        });
    }

    let m_cap = if opts.escalate { (4 * bound).max(m0) } else { m0 };
    let mut attempts = Vec::new();
    for m in m0..=m_cap {
        let basis = monomial_basis(m, nvars);
        let (xi, s) = select_independent(&points, &basis);
        let t = threshold(m, d, nvars);
        let audit = audit_inequality(s as u64, m, big_n, &normf, d, n, c);
        if s >= t {
            let failure_check = Some(failure_check(f, &xi, &basis.monomials));
            attempts.push(Attempt { m, r: basis.len(), threshold: t, s, success: false, failure_check, audit });
            continue;
        }
        attempts.push(Attempt { m, r: basis.len(), threshold: t, s, success: true, failure_check: None, audit });

        let standard: Vec<usize> = (0..basis.len()).filter(|&j| !lm.divides(&basis.monomials[j])).collect();
        let full = eval_matrix(&xi, &basis);
        let all_rows: Vec<usize> = (0..xi.len()).collect();
        let restricted = full.select(&all_rows, &standard);
        let kv = small_kernel_vector(&restricted, opts.kernel_budget).expect("more unknowns than equations");
        let monos: Vec<Monomial> = standard.iter().map(|&j| basis.monomials[j].clone()).collect();
        let g = Form::from_coefficients(nvars, &monos, &kv.vector).expect("kernel vectors are nonzero");
        let (_, g) = g.primitive_part();
        let checks = Checks {
            vanishes_on_s: points.iter().all(|x| g.evaluate_i64(x.coords()).is_zero()),
            not_divisible_by_f: f.divides(&g).ok().flatten().is_none(),
            bezout_ok: (nvars == 3).then(|| bezout_check(f, &g, &points).unwrap_or(false)),
        };
        return Ok(AuxResult {
            g_max_norm: g.norm(),
            g,
            m,
            points,
            xi,
            s,
            r: basis.len(),
            threshold: t,
            bv: bv_bound(&full).ok(),
            bv_standard: kv.bound,
            certified: kv.certified,
            checks,
            degenerate: false,
            attempts,
        });
    }
    Err(ConstructError::CapReached { m_cap, attempts })
}

/// `|B[M]| - |B[M-d]|` for `nvars` variables.
pub fn threshold(m: u32, d: u32, nvars: usize) -> usize {
    (monomial_count(m as i64, nvars) - monomial_count(m as i64 - d as i64, nvars)) as usize
}

/// Forms spanning the integer kernel of the evaluation matrix at `xi`.
pub fn kernel_forms(xi: &[ProjPoint], monomials: &[Monomial], nvars: usize) -> Vec<Form> {
    let basis = crate::detmethod::MonomialBasis {
        degree: monomials.first().map_or(0, |m| m.degree()),
        nvars,
        monomials: monomials.to_vec(),
    };
    let a = eval_matrix(xi, &basis);
    kernel_basis(&a)
        .into_iter()
        .filter_map(|v| Form::from_coefficients(nvars, monomials, &v))
        .collect()
}

fn failure_check(f: &Form, xi: &[ProjPoint], monomials: &[Monomial]) -> FailureCheck {
    let forms = kernel_forms(xi, monomials, f.nvars());
    let cf = f.top_coefficient().abs();
    FailureCheck {
        kernel_dim: forms.len(),
        all_divisible_by_f: forms.iter().all(|p| f.divides(p).ok().flatten().is_some()),
        norms_at_least_cf: forms.iter().all(|p| p.norm() >= cf),
    }
}
