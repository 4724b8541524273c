//! Linear independence over `V_s(F) = F(z)` as a vector space over
//! `F(z^(p^s))`.
//!
//! Two independent routes: the generalized-Wronskian certificate with Hasse
//! hyperderivatives, and a rank computation on the coordinates in the basis
//! `{z^i}`, re-expressed in a fresh variable `w = z^(p^s)` so that no
//! hyperderivative is involved. The second route is the designated ground
//! truth in tests.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::hasse::hasse_derivative;
use crate::ratfun::division::q_power_decomposition;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::RatFunc;
use std::sync::Arc;

/// Strictly increasing derivative orders `0 = e_1 < e_2 < ... < e_n < p^s`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct EpsilonTuple(pub Vec<u32>);

impl EpsilonTuple {
    pub fn orders(&self) -> &[u32] {
        &self.0
    }
}

/// Exact determinant by fraction-field Gaussian elimination.
pub fn rat_matrix_det(mut m: Vec<Vec<RatFunc>>, spec: &Arc<FieldSpec>) -> RatFunc {
    let n = m.len();
    if n == 0 {
        return RatFunc::one(spec);
    }
    let mut det = RatFunc::one(spec);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else {
            return RatFunc::zero(spec);
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let pv = m[col][col].clone();
        det = det.mul(&pv);
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&pv).expect("pivot nonzero");
            for c in col..n {
                let sub = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
    }
    det
}

/// Rank of a rectangular matrix by exact Gaussian elimination.
pub fn rat_matrix_rank(mut m: Vec<Vec<RatFunc>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(pivot, rank);
        let pv = m[rank][col].clone();
        for r in (rank + 1)..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&pv).expect("pivot nonzero");
            for c in col..cols {
                let sub = factor.mul(&m[rank][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// A nonzero kernel vector of the column space: `sum_j v_j * col_j = 0`,
/// or `None` when the columns are independent.
pub fn rat_matrix_kernel_vector(
    m: &[Vec<RatFunc>],
    spec: &Arc<FieldSpec>,
) -> Option<Vec<RatFunc>> {
    let rows = m.len();
    let cols = if rows == 0 { return None } else { m[0].len() };
    let mut a: Vec<Vec<RatFunc>> = m.to_vec();
    // forward elimination with column pivots recorded
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !a[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        a.swap(pivot, rank);
        let pv = a[rank][col].clone();
        for r in 0..rows {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div(&pv).expect("pivot nonzero");
            for c in 0..cols {
                let sub = factor.mul(&a[rank][c]);
                a[r][c] = a[r][c].sub(&sub);
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free_col = (0..cols).find(|&c| pivot_of_col[c].is_none())?;
    let mut v = vec![RatFunc::zero(spec); cols];
    v[free_col] = RatFunc::one(spec);
    for c in 0..cols {
        if let Some(r) = pivot_of_col[c] {
            // pivot row r: a[r][c] * v[c] + a[r][free_col] * 1 = 0
            let val = a[r][free_col]
                .div(&a[r][c])
                .expect("pivot nonzero")
                .neg();
            v[c] = val;
        }
    }
    Some(v)
}

/// Re-expresses a `q`-th power coordinate `g^q in F(z^q)` as a rational
/// function of the fresh variable `w`: each coefficient is raised to the
/// `q`-th power and the exponent grid `z^(qk)` becomes `w^k`.
fn coordinate_in_w(g: &RatFunc, s: u32) -> RatFunc {
    let spec = g.spec();
    let q = spec.p().pow(s);
    let remap = |p: &Poly| -> Poly {
        let coeffs: Vec<FieldElem> = p.coeffs().iter().map(|c| c.pow(q)).collect();
        Poly::new(spec, coeffs)
    };
    RatFunc::new(remap(g.num()), remap(g.den())).expect("nonzero denominator")
}

/// The coordinate matrix of the family in the basis `{z^i}`, as rational
/// functions of the fresh variable `w = z^q`: entry `(i, j)` is the
/// `z^i`-coordinate of `b_j`.
pub fn coordinate_matrix_in_w(b: &[RatFunc], s: u32) -> Vec<Vec<RatFunc>> {
    let spec = b[0].spec();
    let q = spec.p().pow(s) as usize;
    let mut m = vec![vec![RatFunc::zero(spec); b.len()]; q];
    for (j, bj) in b.iter().enumerate() {
        let parts = q_power_decomposition(bj, s);
        for (i, gi) in parts.into_iter().enumerate() {
            m[i][j] = coordinate_in_w(&gi, s);
        }
    }
    m
}

/// Rank of the family over `V_s(F)` by the fresh-variable route.
pub fn rank_oracle(b: &[RatFunc], s: u32) -> usize {
    if b.is_empty() {
        return 0;
    }
    // transpose: rows are family members, columns the coordinates
    let m = coordinate_matrix_in_w(b, s);
    let rows = b.len();
    let cols = m.len();
    let mut t = vec![vec![RatFunc::zero(b[0].spec()); cols]; rows];
    for (i, row) in m.iter().enumerate() {
        for (j, val) in row.iter().enumerate() {
            t[j][i] = val.clone();
        }
    }
    rat_matrix_rank(t)
}

fn increasing_tuples(n: usize, q: u64) -> Vec<Vec<u32>> {
    // all 0 = e_1 < e_2 < ... < e_n < q, lexicographic
    let mut out = Vec::new();
    let mut cur = vec![0u32];
    fn rec(cur: &mut Vec<u32>, n: usize, q: u64, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().unwrap() + 1;
        for e in lo..q as u32 {
            cur.push(e);
            rec(cur, n, q, out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    rec(&mut cur, n, q, &mut out);
    out
}

/// The Wronskian determinant `det(D_(e_i)(b_j))` for a given tuple.
pub fn wronskian_det(b: &[RatFunc], eps: &EpsilonTuple) -> RatFunc {
    let spec = b[0].spec();
    let n = b.len();
    let mut m = vec![vec![RatFunc::zero(spec); n]; n];
    for (i, &e) in eps.0.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            m[i][j] = hasse_derivative(bj, e);
        }
    }
    rat_matrix_det(m, spec)
}

/// Searches for the lexicographically least tuple
/// `0 = e_1 < ... < e_n < p^s` with nonzero Wronskian. `Some` iff the
/// family is linearly independent over `V_s(F)`; families larger than the
/// dimension are rejected.
pub fn wronskian_certificate(b: &[RatFunc], s: u32) -> Result<Option<EpsilonTuple>> {
    if b.is_empty() {
        return Ok(Some(EpsilonTuple(Vec::new())));
    }
    let q = b[0].spec().p().pow(s);
    if b.len() as u64 > q {
        return Err(Error::FamilyTooLarge(b.len(), q as usize));
    }
    if b.iter().any(|x| x.is_zero()) {
        return Ok(None);
    }
    for tuple in increasing_tuples(b.len(), q) {
        let eps = EpsilonTuple(tuple);
        if !wronskian_det(b, &eps).is_zero() {
            return Ok(Some(eps));
        }
    }
    Ok(None)
}

/// Checks that a family over `F_p(z)` has the same rank over `V_s(F_p)` and
/// over `V_s(F_{p^m})`, and returns the shared independence verdict.
pub fn independence_lift_check(
    b: &[RatFunc],
    s: u32,
    spec: &Arc<FieldSpec>,
) -> Result<bool> {
    for x in b {
        if !x.spec().is_prime_field() || x.spec().p() != spec.p() {
            return Err(Error::Sort("family must live over F_p(z)".into()));
        }
    }
    if b.is_empty() {
        return Ok(true);
    }
    let rank_prime = rank_oracle(b, s);
    let lifted: Vec<RatFunc> = b
        .iter()
        .map(|x| {
            RatFunc::new(x.num().lift_to(spec), x.den().lift_to(spec)).expect("nonzero den")
        })
        .collect();
    let rank_ext = rank_oracle(&lifted, s);
    if rank_prime != rank_ext {
        return Err(Error::Internal(format!(
            "rank changed under field extension: {rank_prime} vs {rank_ext}"
        )));
    }
    Ok(rank_prime == b.len())
}
