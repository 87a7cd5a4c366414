use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{IncrementalRank, IntMatrix, LinAlgError};

/// `U * A * V = diag(invariant_factors)` (padded with zeros), with `U`, `V`
/// unimodular and `d_1 | d_2 | ... | d_rank`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (d, u, v) = smith_core(a, true, None);
    SmithForm { invariant_factors: d, left: u.unwrap(), right: v.unwrap() }
}

/// Invariant factors only, without transforms.
///
/// Two Hermite passes (on the matrix, then on the transpose of its nonzero
/// columns) give a square nonsingular triangular block `L` with the same
/// invariant factors. Its column lattice contains `det(L) Z^r`, so the
/// Smith reduction of `L` can run with entries reduced mod `det(L)`.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let l = square_block(a);
    if l.rows() == 0 {
        return Vec::new();
    }
    let det: BigInt = (0..l.rows()).map(|i| l.get(i, i).clone()).product::<BigInt>().abs();
    let (mut d, _, _) = smith_core(&l, false, Some(&det));
    // a block that vanishes mod det contributes factors equal to det
    d.resize(l.rows(), BigInt::zero());
    d.into_iter().map(|x| x.gcd(&det)).collect()
}

/// Nonsingular lower-triangular `rank x rank` matrix with the invariant
/// factors of `a`.
fn square_block(a: &IntMatrix) -> IntMatrix {
    if let Some(w) = full_row_rank_block(a) {
        return w;
    }
    let h1 = hermite_normal_form(a);
    let r = h1.rank();
    let rows: Vec<usize> = (0..a.rows()).collect();
    let cols: Vec<usize> = (0..r).collect();
    let t = h1.h.select(&rows, &cols).transpose();
    let h2 = hermite_normal_form(&t);
    let all: Vec<usize> = (0..r).collect();
    h2.h.select(&all, &all)
}

/// For `a` of full row rank: a lower-triangular basis of its column
/// lattice, computed modulo the determinant of a nonsingular maximal
/// square submatrix (that multiple of `Z^rows` lies in the lattice), so
/// entries stay below the determinant.
fn full_row_rank_block(a: &IntMatrix) -> Option<IntMatrix> {
    let m = a.rows();
    if m == 0 || a.cols() < m {
        return None;
    }
    let mut picker = IncrementalRank::new(m);
    let mut chosen = Vec::with_capacity(m);
    for j in 0..a.cols() {
        if picker.insert(&a.column(j)) {
            chosen.push(j);
            if chosen.len() == m {
                break;
            }
        }
    }
    if chosen.len() < m {
        return None;
    }
    let all: Vec<usize> = (0..m).collect();
    let d = a.select(&all, &chosen).det().abs();
    let mut work: Vec<Vec<BigInt>> = (0..a.cols()).map(|j| a.column(j).iter().map(|x| x.mod_floor(&d)).collect()).collect();
    let mut r = d;
    let mut w = IntMatrix::zeros(m, m);
    for i in 0..m {
        let pivot = work.iter().position(|c| !c[i].is_zero());
        let mut p = match pivot {
            Some(k) => work.swap_remove(k),
            None => vec![BigInt::zero(); m],
        };
        for c in work.iter_mut() {
            if c[i].is_zero() {
                continue;
            }
            let e = p[i].extended_gcd(&c[i]);
            let (a_g, b_g) = (&p[i] / &e.gcd, &c[i] / &e.gcd);
            for t in i..m {
                let (x, y) = (p[t].clone(), c[t].clone());
                p[t] = (&e.x * &x + &e.y * &y).mod_floor(&r);
                c[t] = (&a_g * &y - &b_g * &x).mod_floor(&r);
            }
        }
        let e = p[i].extended_gcd(&r);
        let g = e.gcd.abs();
        w.set(i, i, g.clone());
        for (t, x) in p.iter().enumerate().skip(i + 1) {
            w.set(t, i, (&e.x * x).mod_floor(&r));
        }
        r = &r / &g;
        for c in work.iter_mut() {
            for x in c[i + 1..].iter_mut() {
                *x = x.mod_floor(&r);
            }
        }
    }
    Some(w)
}

/// gcd of all `k x k` minors, as the product of the first `k` invariant
/// factors. For `k` equal to the rank this is `|det|` of the square block
/// and needs no Smith reduction.
pub fn determinantal_divisor(a: &IntMatrix, k: usize) -> Result<BigInt, LinAlgError> {
    let l = square_block(a);
    if k == l.rows() {
        return Ok((0..k).map(|i| l.get(i, i).clone()).product::<BigInt>().abs());
    }
    let d = invariant_factors(a);
    if k > d.len() {
        return Err(LinAlgError::OrderExceedsRank { k, rank: d.len() });
    }
    Ok(d[..k].iter().product())
}

/// With `modulus`, entries are kept as symmetric residues; only valid when
/// the column lattice contains `modulus * Z^rows`.
fn smith_core(
    a: &IntMatrix,
    track: bool,
    modulus: Option<&BigInt>,
) -> (Vec<BigInt>, Option<IntMatrix>, Option<IntMatrix>) {
    let (m, n) = (a.rows(), a.cols());
    let mut a = a.clone();
    if let Some(md) = modulus {
        reduce_all(&mut a, md);
    }
    let mut u = track.then(|| IntMatrix::identity(m));
    let mut v = track.then(|| IntMatrix::identity(n));
    let mut diag = Vec::new();

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&a, t) else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                row_axpy(&mut a, i, t, &q);
                if let Some(md) = modulus {
                    reduce_row(&mut a, i, md);
                }
                if let Some(u) = u.as_mut() {
                    row_axpy(u, i, t, &q);
                }
                if !a.get(i, t).is_zero() {
                    a.swap_rows(t, i);
                    if let Some(u) = u.as_mut() {
                        u.swap_rows(t, i);
                    }
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                col_axpy(&mut a, j, t, &q);
                if let Some(md) = modulus {
                    reduce_col(&mut a, j, md);
                }
                if let Some(v) = v.as_mut() {
                    col_axpy(v, j, t, &q);
                }
                if !a.get(t, j).is_zero() {
                    a.swap_cols(t, j);
                    if let Some(v) = v.as_mut() {
                        v.swap_cols(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Pivot must divide the rest of the matrix; otherwise fold a
            // witness row into row t and go again.
            let piv = a.get(t, t).clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    row_axpy(&mut a, t, i, &BigInt::from(-1));
                    if let Some(md) = modulus {
                        reduce_row(&mut a, t, md);
                    }
                    if let Some(u) = u.as_mut() {
                        row_axpy(u, t, i, &BigInt::from(-1));
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            negate_row(&mut a, t);
            if let Some(u) = u.as_mut() {
                negate_row(u, t);
            }
        }
        diag.push(a.get(t, t).clone());
    }
    (diag, u, v)
}

fn sym_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if BigInt::from(2) * &r > *m {
        r - m
    } else {
        r
    }
}

fn reduce_all(a: &mut IntMatrix, m: &BigInt) {
    for i in 0..a.rows() {
        reduce_row(a, i, m);
    }
}

fn reduce_row(a: &mut IntMatrix, i: usize, m: &BigInt) {
    for j in 0..a.cols() {
        let v = sym_mod(a.get(i, j), m);
        a.set(i, j, v);
    }
}

fn reduce_col(a: &mut IntMatrix, j: usize, m: &BigInt) {
    for i in 0..a.rows() {
        let v = sym_mod(a.get(i, j), m);
        a.set(i, j, v);
    }
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|b| ax < b.2) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// row_dst -= q * row_src
fn row_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for j in 0..a.cols() {
        let s = a.get(src, j);
        if !s.is_zero() {
            let v = a.get(dst, j) - q * s;
            a.set(dst, j, v);
        }
    }
}

/// col_dst -= q * col_src
fn col_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for i in 0..a.rows() {
        let s = a.get(i, src);
        if !s.is_zero() {
            let v = a.get(i, dst) - q * s;
            a.set(i, dst, v);
        }
    }
}

fn negate_row(a: &mut IntMatrix, i: usize) {
    for j in 0..a.cols() {
        let v = -a.get(i, j);
        a.set(i, j, v);
    }
}

fn negate_col(a: &mut IntMatrix, j: usize) {
    for i in 0..a.rows() {
        let v = -a.get(i, j);
        a.set(i, j, v);
    }
}

/// Column-style Hermite normal form: `A * V = H` with `V` unimodular and `H`
/// lower echelon. Pivot `k` sits at `pivots[k] = (row, k)`, is positive, and
/// every entry to its left in the same row lies in `[0, pivot)`. Columns
/// `rank..cols` of `H` are zero, so the matching columns of `V` span the
/// integer kernel of `A`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub v: IntMatrix,
    pub pivot_rows: Vec<usize>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }
}

pub fn hermite_normal_form(a: &IntMatrix) -> HermiteForm {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut v = IntMatrix::identity(n);
    let mut pivot_rows = Vec::new();
    let mut pc = 0;
    for i in 0..m {
        if pc == n {
            break;
        }
        for j in pc + 1..n {
            if h.get(i, j).is_zero() {
                continue;
            }
            if h.get(i, pc).is_zero() {
                h.swap_cols(pc, j);
                v.swap_cols(pc, j);
                continue;
            }
            let (x, y, g) = {
                let e = h.get(i, pc).extended_gcd(h.get(i, j));
                (e.x, e.y, e.gcd)
            };
            let a_g = h.get(i, pc) / &g;
            let b_g = h.get(i, j) / &g;
            combine_cols(&mut h, pc, j, &x, &y, &b_g, &a_g);
            combine_cols(&mut v, pc, j, &x, &y, &b_g, &a_g);
        }
        if h.get(i, pc).is_zero() {
            continue;
        }
        if h.get(i, pc).is_negative() {
            negate_col(&mut h, pc);
            negate_col(&mut v, pc);
        }
        let piv = h.get(i, pc).clone();
        for c in 0..pc {
            let q = h.get(i, c).div_floor(&piv);
            col_axpy(&mut h, c, pc, &q);
            col_axpy(&mut v, c, pc, &q);
        }
        pivot_rows.push(i);
        pc += 1;
    }
    HermiteForm { h, v, pivot_rows }
}

/// (c1, c2) <- (x c1 + y c2, -b' c1 + a' c2); determinant x a' + y b' = 1.
fn combine_cols(
    a: &mut IntMatrix,
    c1: usize,
    c2: usize,
    x: &BigInt,
    y: &BigInt,
    b_g: &BigInt,
    a_g: &BigInt,
) {
    for i in 0..a.rows() {
        let p = a.get(i, c1).clone();
        let q = a.get(i, c2).clone();
        if p.is_zero() && q.is_zero() {
            continue;
        }
        a.set(i, c1, x * &p + y * &q);
        a.set(i, c2, a_g * &q - b_g * &p);
    }
}

#[allow(dead_code)]
pub(crate) fn is_diagonal_chain(d: &[BigInt]) -> bool {
    d.windows(2).all(|w| w[1].is_multiple_of(&w[0])) && d.iter().all(|x| x.is_positive())
}
