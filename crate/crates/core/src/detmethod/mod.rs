//! Monomial bases, evaluation matrices, independent point selection and
//! p-adic divisibility of evaluation determinants.

mod bounds;

pub use bounds::{gcd_det_log_lower_bound, mertens_sums, det_valuation_lower_bound};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{big_ln, primes_up_to, valuation};
use crate::exactla::{IncrementalRank, IntMatrix, LinAlgError};
use crate::forms::{
    is_abs_irreducible_mod_p, monomials_of_degree, Form, FormError, IrreducibilityConfig, Monomial,
};
use crate::points::{is_smooth_mod_p, reduce_point_mod_p, PointError, ProjPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetMethodError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// The homogeneous monomials of one degree, in descending right-to-left
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    pub degree: u32,
    pub nvars: usize,
    #[serde(serialize_with = "ser_monomials")]
    pub monomials: Vec<Monomial>,
}

fn ser_monomials<S: Serializer>(ms: &[Monomial], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ms.iter().map(|m| m.exps()))
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

pub fn monomial_basis(degree: u32, nvars: usize) -> MonomialBasis {
    let mut monomials = monomials_of_degree(nvars, degree);
    monomials.reverse();
    MonomialBasis { degree, nvars, monomials }
}

/// Row `i` holds the monomials of `basis` evaluated at `points[i]`.
pub fn eval_matrix(points: &[ProjPoint], basis: &MonomialBasis) -> IntMatrix {
    let rows = points.iter().map(|p| eval_row(p, &basis.monomials)).collect();
    IntMatrix::from_rows_with_cols(rows, basis.len())
}

fn eval_row(p: &ProjPoint, monomials: &[Monomial]) -> Vec<BigInt> {
    monomials.iter().map(|m| m.evaluate_i64(p.coords())).collect()
}

/// Greedy scan in the given order keeping each point that raises the rank
/// of the evaluation matrix. Returns the kept points and the rank.
pub fn select_independent(points: &[ProjPoint], basis: &MonomialBasis) -> (Vec<ProjPoint>, usize) {
    let mut rank = IncrementalRank::new(basis.len());
    let mut kept = Vec::new();
    for p in points {
        if rank.rank() == basis.len() {
            break;
        }
        if rank.insert(&eval_row(p, &basis.monomials)) {
            kept.push(p.clone());
        }
    }
    let s = kept.len();
    (kept, s)
}

/// Points sharing one reduction mod p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub residue: Vec<u64>,
    pub multiplicity: usize,
    pub smooth: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterBound {
    pub p: u64,
    pub clusters: Vec<Cluster>,
    /// Sum of `m (m - 1) / 2` over smooth clusters.
    pub guaranteed_valuation: u64,
}

/// Groups `points` by residue mod `p` and sums `m (m - 1) / 2` over the
/// clusters at smooth residues of `f mod p`. On a curve each smooth cluster
/// has a local parameter, which forces that much divisibility on any
/// determinant of same-degree forms evaluated at the points.
pub fn cluster_valuation_bound(points: &[ProjPoint], p: u64, f: &Form) -> Result<ClusterBound, PointError> {
    let mut groups: BTreeMap<Vec<u64>, (usize, &ProjPoint)> = BTreeMap::new();
    for xi in points {
        let r = reduce_point_mod_p(xi, p)?;
        groups.entry(r).or_insert((0, xi)).0 += 1;
    }
    let mut clusters = Vec::with_capacity(groups.len());
    let mut total = 0u64;
    for (residue, (m, rep)) in groups {
        let smooth = is_smooth_mod_p(f, rep, p)?;
        if smooth {
            total += (m * (m - 1) / 2) as u64;
        }
        clusters.push(Cluster { residue, multiplicity: m, smooth });
    }
    Ok(ClusterBound { p, clusters, guaranteed_valuation: total })
}

/// p-adic valuation of a determinant; `None` stands for a zero determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservedValuation(pub Option<u32>);

impl Serialize for ObservedValuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_u32(v),
            None => s.serialize_str("determinant zero"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetValuation {
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub det: BigInt,
    pub valuation: ObservedValuation,
}

/// `det(F_i(xi_j))` and its p-adic valuation.
pub fn vp_of_det(forms: &[Form], points: &[ProjPoint], p: u64) -> Result<DetValuation, LinAlgError> {
    if forms.len() != points.len() {
        return Err(LinAlgError::Dimension(format!(
            "{} forms against {} points",
            forms.len(),
            points.len()
        )));
    }
    if let Some(bad) = points.iter().zip(forms).find(|(x, f)| x.nvars() != f.nvars()) {
        return Err(LinAlgError::Dimension(format!(
            "point with {} coordinates for a form in {} variables",
            bad.0.nvars(),
            bad.1.nvars()
        )));
    }
    let rows = forms.iter().map(|f| points.iter().map(|x| f.evaluate_i64(x.coords())).collect()).collect();
    let det = IntMatrix::from_rows_with_cols(rows, points.len()).det();
    let valuation = ObservedValuation(valuation(&det, p));
    Ok(DetValuation { det, valuation })
}

/// `k` monomials of one common degree whose evaluation matrix at `points`
/// is nonsingular, chosen greedily in basis order at the least degree
/// where that is possible (up to `max_degree`). Falls back to the first `k`
/// monomials of `max_degree`.
pub fn square_monomial_system(points: &[ProjPoint], nvars: usize, max_degree: u32) -> Vec<Form> {
    let k = points.len();
    let to_forms = |ms: Vec<Monomial>| -> Vec<Form> {
        ms.into_iter().map(|m| Form::monomial(m.exps().to_vec(), BigInt::one()).unwrap()).collect()
    };
    for degree in 0..=max_degree {
        let basis = monomial_basis(degree, nvars);
        if basis.len() < k {
            continue;
        }
        let mut rank = IncrementalRank::new(k);
        let mut chosen = Vec::new();
        for m in &basis.monomials {
            let col: Vec<BigInt> = points.iter().map(|x| m.evaluate_i64(x.coords())).collect();
            if rank.insert(&col) {
                chosen.push(m.clone());
                if chosen.len() == k {
                    return to_forms(chosen);
                }
            }
        }
    }
    to_forms(monomial_basis(max_degree, nvars).monomials.into_iter().take(k).collect())
}

/// Observed against guaranteed determinant divisibility at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeReport {
    pub p: u64,
    pub is_bad: bool,
    pub clusters: Vec<Cluster>,
    pub guaranteed_valuation: u64,
    pub observed_valuation: ObservedValuation,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub determinant: BigInt,
}

pub fn prime_report(
    f: &Form,
    forms: &[Form],
    points: &[ProjPoint],
    p: u64,
    cfg: &IrreducibilityConfig,
) -> Result<PrimeReport, DetMethodError> {
    let is_bad = !is_abs_irreducible_mod_p(f, p, cfg)?;
    let cb = cluster_valuation_bound(points, p, f)?;
    let dv = vp_of_det(forms, points, p)?;
    Ok(PrimeReport {
        p,
        is_bad,
        clusters: cb.clusters,
        guaranteed_valuation: cb.guaranteed_valuation,
        observed_valuation: dv.valuation,
        determinant: dv.det,
    })
}

/// Primes up to a bound where the reduction is not absolutely irreducible,
/// with their product set against the norm of the form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BadPrimes {
    pub pmax: u64,
    pub primes: Vec<u64>,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub product: BigInt,
    #[serde(serialize_with = "crate::exactla::ser_big")]
    pub norm: BigInt,
    /// `log(product) / log(norm)`; absent when the norm is 1.
    pub log_ratio: Option<f64>,
}

pub fn bad_primes(f: &Form, pmax: u64, cfg: &IrreducibilityConfig) -> Result<BadPrimes, FormError> {
    let mut primes = Vec::new();
    for p in primes_up_to(pmax) {
        let bad = match is_abs_irreducible_mod_p(f, p, cfg) {
            Ok(irreducible) => !irreducible,
            Err(FormError::ZeroModP { .. }) => true,
            Err(e) => return Err(e),
        };
        if bad {
            primes.push(p);
        }
    }
    let product: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let norm = f.norm();
    let log_ratio = (norm > BigInt::one()).then(|| big_ln(&product) / big_ln(&norm));
    Ok(BadPrimes { pmax, primes, product, norm, log_ratio })
}

/// `|B[degree]| - |B[degree - d]|` counted by enumeration.
pub fn threshold_by_enumeration(degree: u32, d: u32, nvars: usize) -> usize {
    let lower = if degree >= d { monomials_of_degree(nvars, degree - d).len() } else { 0 };
    monomials_of_degree(nvars, degree).len() - lower
}
