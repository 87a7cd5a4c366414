//! Integer kernels, the Bombieri–Vaaler bound, and small kernel vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::lll::lll_reduce;
use super::normal_form::{determinantal_divisor, hermite_normal_form};
use super::{max_norm, IntMatrix, LinAlgError};
use crate::arith::big_ln;

/// Saturated basis of the right integer kernel `{x in Z^cols : A x = 0}`.
///
/// Vectors come from the unimodular transform of the column Hermite form,
/// so every integer kernel vector is an integer combination of them. The
/// transform entries grow quickly, so the basis is LLL-reduced, then
/// size-reduced pairwise, sign-normalized (first nonzero entry positive)
/// and sorted by max-norm.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let hf = hermite_normal_form(a);
    let mut basis: Vec<Vec<BigInt>> = (hf.rank()..a.cols()).map(|j| hf.v.column(j)).collect();
    lll_reduce(&mut basis);
    size_reduce(&mut basis);
    basis
}

fn reduce_key(v: &[BigInt]) -> (BigInt, BigInt) {
    (max_norm(v), v.iter().map(|x| x * x).sum())
}

fn canonical_sign(v: &mut [BigInt]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Pairwise size reduction: replaces `v_i` by `v_i - k v_j` whenever that
/// lowers (max-norm, squared length). The lattice spanned is unchanged.
pub fn size_reduce(basis: &mut [Vec<BigInt>]) {
    const MAX_ROUNDS: usize = 200;
    let n = basis.len();
    for _ in 0..MAX_ROUNDS {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let vj_sq: BigInt = basis[j].iter().map(|x| x * x).sum();
                if vj_sq.is_zero() {
                    continue;
                }
                let dot: BigInt = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
                // nearest integer to dot / |v_j|^2
                let two_dot: BigInt = 2 * &dot + &vj_sq;
                let k0 = two_dot.div_floor(&(2 * &vj_sq));
                let mut best = reduce_key(&basis[i]);
                let mut pick: Option<Vec<BigInt>> = None;
                for k in [k0, BigInt::one(), -BigInt::one()] {
                    if k.is_zero() {
                        continue;
                    }
                    let w: Vec<BigInt> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a - &k * b).collect();
                    let key = reduce_key(&w);
                    if key < best {
                        best = key;
                        pick = Some(w);
                    }
                }
                if let Some(w) = pick {
                    basis[i] = w;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    for v in basis.iter_mut() {
        canonical_sign(v);
    }
    basis.sort_by(|a, b| reduce_key(a).cmp(&reduce_key(b)).then_with(|| a.cmp(b)));
}

/// The Bombieri–Vaaler bound for an `s x r` system of full row rank `s < r`:
/// some nonzero integer solution has max-norm at most
/// `(sqrt(det(A A^T)) / D)^(1/(r-s))`, `D` the gcd of the `s x s` minors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BvBound {
    #[serde(serialize_with = "ser_big")]
    pub divisor: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub gram: BigInt,
    /// `det(A A^T) / D^2`, always an integer.
    #[serde(serialize_with = "ser_big")]
    pub radicand: BigInt,
    /// `r - s`; the bound is `radicand^(1 / (2 (r - s)))`.
    pub exponent: usize,
    /// Decimal rendering of the bound.
    pub value: f64,
    /// Smallest integer `B` with `B^(2 (r - s)) >= radicand`.
    #[serde(serialize_with = "ser_big")]
    pub ceiling: BigInt,
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn bv_bound(a: &IntMatrix) -> Result<BvBound, LinAlgError> {
    let (s, r) = (a.rows(), a.cols());
    if r <= s {
        return Err(LinAlgError::NotUnderdetermined { rows: s, cols: r });
    }
    let rank = a.rank();
    if rank < s {
        return Err(LinAlgError::RankDeficient { rank, rows: s });
    }
    let divisor = determinantal_divisor(a, s)?;
    let gram = a.gram_det();
    let radicand = &gram / (&divisor * &divisor);
    debug_assert!((&radicand * &divisor * &divisor) == gram);
    let exponent = r - s;
    let root = 2 * exponent as u32;
    let mut ceiling = radicand.nth_root(root);
    if ceiling.pow(root) < radicand {
        ceiling += 1;
    }
    let value = if radicand.is_positive() { (big_ln(&radicand) / root as f64).exp() } else { 0.0 };
    Ok(BvBound { divisor, gram, radicand, exponent, value, ceiling })
}

/// Result of [`small_kernel_vector`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelVector {
    #[serde(serialize_with = "ser_vec")]
    pub vector: Vec<BigInt>,
    #[serde(serialize_with = "ser_big")]
    pub max_norm: BigInt,
    pub bound: Option<BvBound>,
    /// `Some(true)` when an exhaustive search confirmed `max_norm <= ceiling`;
    /// `None` when no search was run (budget, or rows not independent).
    pub certified: Option<bool>,
}

pub(crate) fn ser_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// A nonzero primitive kernel vector of least max-norm among the reduced
/// basis; when the Bombieri–Vaaler search box has at most `budget` points,
/// an exhaustive search over kernel lattice points inside the box replaces
/// it by the true minimum and certifies the bound.
pub fn small_kernel_vector(a: &IntMatrix, budget: u128) -> Result<KernelVector, LinAlgError> {
    let basis = kernel_basis(a);
    let Some(first) = basis.first() else {
        return Err(LinAlgError::TrivialKernel);
    };
    let mut best = first.clone();
    let bound = bv_bound(a).ok();
    let mut certified = None;
    if let Some(bv) = &bound {
        let k = basis.len();
        let cap = bv.ceiling.to_i64().filter(|&b| b < i64::MAX / 4);
        let cells = cap.and_then(|b| (2 * b as u128 + 1).checked_pow(k as u32));
        if let (Some(b), Some(cells)) = (cap, cells) {
            if cells <= budget {
                if let Some(v) = search_box(&basis, b) {
                    if reduce_key(&v) < reduce_key(&best) {
                        best = v;
                    }
                }
                certified = Some(max_norm(&best) <= bv.ceiling);
            }
        }
    }
    let max_norm = max_norm(&best);
    Ok(KernelVector { vector: best, max_norm, bound, certified })
}

/// Least (max-norm, length) nonzero lattice vector with max-norm <= `b`.
fn search_box(basis: &[Vec<BigInt>], b: i64) -> Option<Vec<BigInt>> {
    let k = basis.len();
    let r = basis[0].len();
    // k coordinates on which the lattice projects injectively
    let mut picker = IncrementalRank::new(k);
    let mut coords = Vec::with_capacity(k);
    for i in 0..r {
        let row: Vec<BigInt> = basis.iter().map(|v| v[i].clone()).collect();
        if picker.insert(&row) {
            coords.push(i);
            if coords.len() == k {
                break;
            }
        }
    }
    let q = IntMatrix::from_rows(coords.iter().map(|&i| basis.iter().map(|v| v[i].clone()).collect()).collect());
    let det = q.det();
    let adj = q.adjugate();

    let mut best: Option<(Vec<BigInt>, (BigInt, BigInt))> = None;
    let bound = BigInt::from(b);
    let mut y = vec![-b; k];
    loop {
        let lead = y.iter().find(|&&v| v != 0);
        if lead.is_some_and(|&v| v > 0) {
            let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
            let num = adj.mul_vec(&yb);
            if num.iter().all(|c| c.is_multiple_of(&det)) {
                let c: Vec<BigInt> = num.iter().map(|c| c / &det).collect();
                let mut x = vec![BigInt::zero(); r];
                for (ci, v) in c.iter().zip(basis) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += ci * vi;
                    }
                }
                let key = reduce_key(&x);
                if key.0 <= bound && best.as_ref().is_none_or(|(_, bk)| key < *bk) {
                    best = Some((x, key));
                }
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return best.map(|(v, _)| v);
            }
            y[i] += 1;
            if y[i] <= b {
                break;
            }
            y[i] = -b;
            i += 1;
        }
    }
}

/// Incremental rank over the rationals. Rows are kept fraction-free in
/// echelon form, sorted by pivot column.
#[derive(Clone, Debug)]
pub struct IncrementalRank {
    cols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IncrementalRank {
    pub fn new(cols: usize) -> Self {
        IncrementalRank { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `row`; returns whether it raised the rank.
    pub fn insert(&mut self, row: &[BigInt]) -> bool {
        assert_eq!(row.len(), self.cols);
        let mut v = row.to_vec();
        for (p, r) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let a = &r[*p];
            let c = v[*p].clone();
            for (x, y) in v.iter_mut().zip(r) {
                *x = &*x * a - &c * y;
            }
            let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g > BigInt::one() {
                for x in v.iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let at = self.rows.partition_point(|(q, _)| *q < p);
                self.rows.insert(at, (p, v));
                true
            }
            None => false,
        }
    }
}
