//! Reduction of forms modulo a prime and a brute-force absolute
//! irreducibility test over small extension fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::field::FiniteField;
use super::{monomials_of_degree, Form, FormError, Monomial};
use crate::arith::is_prime;

/// A nonzero form over the prime field `F_p`; coefficients in `1..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPForm {
    nvars: usize,
    degree: u32,
    p: u64,
    terms: BTreeMap<Monomial, u32>,
}

impl ModPForm {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in descending right-to-left lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }
}

pub fn reduce_mod_p(f: &Form, p: u64) -> Result<ModPForm, FormError> {
    if !is_prime(p) {
        return Err(FormError::NotPrime { p });
    }
    let pb = BigInt::from(p);
    let terms: BTreeMap<Monomial, u32> = f
        .terms
        .iter()
        .filter_map(|(m, c)| {
            let r = num_integer::Integer::mod_floor(c, &pb).to_u32().expect("residue fits");
            (r != 0).then(|| (m.clone(), r))
        })
        .collect();
    if terms.is_empty() {
        return Err(FormError::ZeroModP { p });
    }
    Ok(ModPForm { nvars: f.nvars, degree: f.degree, p, terms })
}

/// Limits for the factor search behind [`is_abs_irreducible_mod_p`].
#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityConfig {
    /// Largest `k` such that factors over `F_{p^k}` are searched.
    pub max_extension: u32,
    /// Largest factor degree tried; `None` means `degree / 2`.
    pub max_factor_degree: Option<u32>,
    /// Total number of candidate factors allowed.
    pub max_candidates: u128,
}

impl Default for IrreducibilityConfig {
    fn default() -> Self {
        IrreducibilityConfig { max_extension: 2, max_factor_degree: None, max_candidates: 20_000_000 }
    }
}

/// A nontrivial factor found over `F_{p^k}`. Coefficients are field elements
/// in the digit encoding of [`FiniteField`]; the leading coefficient is 1.
#[derive(Clone, Debug, Serialize)]
pub struct FactorWitness {
    pub extension_degree: u32,
    pub factor_degree: u32,
    pub terms: Vec<(Vec<u32>, u32)>,
}

/// `true` iff no nontrivial homogeneous factor of `f mod p` exists over
/// `F_{p^k}` for `k <= max_extension`. Only meaningful at desk scale (low
/// degree, few variables, small `p`).
pub fn is_abs_irreducible_mod_p(
    f: &Form,
    p: u64,
    cfg: &IrreducibilityConfig,
) -> Result<bool, FormError> {
    Ok(find_factor_mod_p(f, p, cfg)?.is_none())
}

pub fn find_factor_mod_p(
    f: &Form,
    p: u64,
    cfg: &IrreducibilityConfig,
) -> Result<Option<FactorWitness>, FormError> {
    let fbar = reduce_mod_p(f, p)?;
    let d = fbar.degree;
    let max_e = cfg.max_factor_degree.map_or(d / 2, |e| e.min(d / 2));
    if max_e == 0 {
        return Ok(None);
    }
    let (lm, _) = fbar.terms.iter().next_back().expect("nonzero reduction");
    let lm = lm.clone();

    // Candidate factors g: monic at a leading monomial dividing LM(f), free
    // coefficients on every smaller monomial of the same degree.
    let mut shapes: Vec<(u32, Monomial, Vec<Monomial>)> = Vec::new();
    for e in 1..=max_e {
        let all = monomials_of_degree(fbar.nvars, e);
        for (i, m) in all.iter().enumerate() {
            if m.divides(&lm) {
                shapes.push((e, m.clone(), all[..i].to_vec()));
            }
        }
    }

    let mut spent: u128 = 0;
    for k in 1..=cfg.max_extension {
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        let stage: u128 = shapes
            .iter()
            .map(|(_, _, rest)| q.checked_pow(rest.len() as u32).unwrap_or(u128::MAX))
            .fold(0u128, |a, b| a.saturating_add(b));
        spent = spent.saturating_add(stage);
        if spent > cfg.max_candidates || q > 1024 {
            return Err(FormError::BudgetExceeded { needed: spent, budget: cfg.max_candidates });
        }
        let field = FiniteField::new(p as u32, k);
        for (e, lead, rest) in &shapes {
            if let Some(terms) = search_shape(&fbar.terms, &field, lead, rest) {
                return Ok(Some(FactorWitness {
                    extension_degree: k,
                    factor_degree: *e,
                    terms: terms.into_iter().map(|(m, c)| (m.0, c)).collect(),
                }));
            }
        }
    }
    Ok(None)
}

fn search_shape(
    f: &BTreeMap<Monomial, u32>,
    field: &FiniteField,
    lead: &Monomial,
    rest: &[Monomial],
) -> Option<Vec<(Monomial, u32)>> {
    let q = field.order();
    let mut digits = vec![0u32; rest.len()];
    loop {
        let mut g = Vec::with_capacity(rest.len() + 1);
        g.push((lead.clone(), 1));
        for (m, &c) in rest.iter().zip(&digits).rev() {
            if c != 0 {
                g.push((m.clone(), c));
            }
        }
        if divides_exactly(f, &g, field) {
            return Some(g);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == digits.len() {
                return None;
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Whether monic `g` (leading term first) divides `f` over the field.
fn divides_exactly(f: &BTreeMap<Monomial, u32>, g: &[(Monomial, u32)], field: &FiniteField) -> bool {
    let lead = &g[0].0;
    let mut r = f.clone();
    while let Some((m, &c)) = r.last_key_value() {
        let Some(qm) = m.checked_div(lead) else {
            return false;
        };
        for (gm, gc) in g {
            let key = gm.mul(&qm);
            let cur = r.get(&key).copied().unwrap_or(0);
            let v = field.sub(cur, field.mul(c, *gc));
            if v == 0 {
                r.remove(&key);
            } else {
                r.insert(key, v);
            }
        }
    }
    true
}
