//! Effective bounds for p-basic and strongly normalized additive
//! polynomials: the change-of-basis data, the order bound `E_ord` with the
//! reduction of any ring element to a bounded representative modulo the
//! image, the pole-order bound of solutions, the height bound, and the
//! exhaustive inverse-image search.

use crate::additive::{classify, AdditivePoly, Assignment, Var};
use crate::error::{Error, Result};
use crate::gf::{enumerate_field, FieldElem, FieldSpec};
use crate::independence::{
    rat_matrix_det, wronskian_certificate, wronskian_det, EpsilonTuple,
};
use crate::ratfun::division::poly_q_power_decomposition;
use crate::ratfun::factor::factor;
use crate::ratfun::partial_fractions::partial_fractions_with_factors;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::{
    denominator_exponents, in_ring, ord_at, Localization, OrdVal, Place, RatFunc,
};
use std::collections::BTreeMap;
use std::sync::Arc;

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

/// Cramer data for a p-basic polynomial: `Delta z^i = sum_j e[i][j]^q b_j`
/// holds symbolically for every `0 <= i < q`.
#[derive(Debug, Clone)]
pub struct ChangeOfBasis {
    /// Determinant of the coordinate matrix, as a polynomial of `z`
    /// (an element of `F_p[z^q]`).
    pub delta: Poly,
    /// `e[i][j]` over `F_p`; the identity uses their `q`-th powers.
    pub e_matrix: Vec<Vec<Poly>>,
    /// Variable order fixing the column index `j`.
    pub basis_vars: Vec<Var>,
    pub s: u32,
}

impl ChangeOfBasis {
    pub fn q(&self) -> u64 {
        self.basis_vars.len() as u64
    }

    /// Largest z-degree among the `e[i][j]`.
    pub fn e_degree(&self) -> usize {
        self.e_matrix
            .iter()
            .flat_map(|row| row.iter())
            .map(|e| e.degree())
            .max()
            .unwrap_or(0)
    }

    /// Re-expands the defining identity; used by tests and debug assertions.
    pub fn verify(&self, f: &AdditivePoly) -> bool {
        let q = self.q();
        for (i, row) in self.e_matrix.iter().enumerate() {
            let lhs = self.delta.shift(i);
            let mut rhs = Poly::zero(self.delta.spec());
            for (j, v) in self.basis_vars.iter().enumerate() {
                let b = f.leading_coeff(*v).expect("basis var");
                rhs = rhs.add(&row[j].pow(q).mul(b));
            }
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

fn invert_rat_matrix(m: &[Vec<RatFunc>], spec: &Arc<FieldSpec>) -> Option<Vec<Vec<RatFunc>>> {
    let n = m.len();
    let mut a: Vec<Vec<RatFunc>> = m.to_vec();
    let mut inv: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RatFunc::one(spec)
                    } else {
                        RatFunc::zero(spec)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let pv = a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].div(&pv).expect("pivot nonzero");
            inv[col][c] = inv[col][c].div(&pv).expect("pivot nonzero");
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let s1 = factor.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&s1);
                let s2 = factor.mul(&inv[col][c]);
                inv[r][c] = inv[r][c].sub(&s2);
            }
        }
    }
    Some(inv)
}

/// Solves `B = A Z` by Cramer's rule in the fresh variable `w = z^q`:
/// coordinates of the leading coefficients in the basis `{z^i}` have the
/// form `g^q` with `g` over `F_p`, so the determinant and the adjugate
/// come out as polynomials of `w` which rename directly to `z`.
pub fn change_of_basis(f: &AdditivePoly) -> Result<ChangeOfBasis> {
    let flags = classify(f)?;
    if !flags.p_basic {
        return Err(Error::NotOfClass("p-basic"));
    }
    let prime = f.prime_spec();
    let s = f.max_level();
    let q = f.p().pow(s);
    let vars = f.ring_vars();
    // rows j of A: coordinates of b_j over the basis {z^i}, in w
    let mut a_w = vec![vec![RatFunc::zero(&prime); q as usize]; q as usize];
    for (j, v) in vars.iter().enumerate() {
        let b = f.leading_coeff(*v).unwrap();
        let parts = poly_q_power_decomposition(b, s);
        for (i, part) in parts.into_iter().enumerate() {
            // over F_p the q-th power of the coordinate keeps the same
            // coefficients on the grid z^(qk) -> w^k
            a_w[j][i] = RatFunc::from_poly(part);
        }
    }
    let det_w = rat_matrix_det(a_w.clone(), &prime);
    if det_w.is_zero() {
        return Err(Error::Internal(
            "p-basic polynomial with singular coordinate matrix".into(),
        ));
    }
    // transpose orientation: we need z^i = sum_j inv[i][j] b_j where the
    // matrix maps coordinate vectors of Z to B row-wise
    let mut a_t = vec![vec![RatFunc::zero(&prime); q as usize]; q as usize];
    for j in 0..q as usize {
        for i in 0..q as usize {
            a_t[i][j] = a_w[j][i].clone();
        }
    }
    let _ = a_t;
    let inv = invert_rat_matrix(&a_w, &prime)
        .ok_or_else(|| Error::Internal("matrix inversion failed".into()))?;
    let mut e_matrix = vec![vec![Poly::zero(&prime); q as usize]; q as usize];
    for i in 0..q as usize {
        for j in 0..q as usize {
            let scaled = inv[i][j].mul(&det_w);
            if !scaled.is_polynomial() {
                return Err(Error::Internal("adjugate entry not polynomial".into()));
            }
            e_matrix[i][j] = scaled.num().clone();
        }
    }
    if !det_w.is_polynomial() {
        return Err(Error::Internal("determinant not polynomial".into()));
    }
    // Delta(z) = det(w -> z^q)
    let delta = det_w.num().compose_z_pow(q as usize);
    let cb = ChangeOfBasis {
        delta,
        e_matrix,
        basis_vars: vars,
        s,
    };
    if !cb.verify(f) {
        return Err(Error::Internal("change-of-basis identity failed".into()));
    }
    Ok(cb)
}

/// Least `m >= 1` with `Delta` splitting over `F_{p^m}` (the lcm of the
/// degrees of its distinct irreducible factors) and least `m0` with
/// `p^(m0)` at least the largest multiplicity; `Delta` then divides
/// `z^(p^(m+m0)) - z^(p^(m0))`.
pub fn splitting_exponents(delta: &Poly) -> Result<(u32, u32)> {
    if delta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if delta.is_constant() {
        return Ok((1, 0));
    }
    let p = delta.spec().p();
    let factors = factor(delta);
    let mut m = 1u64;
    let mut max_mult = 1u32;
    for (q, mult) in &factors {
        let d = q.degree() as u64;
        m = lcm(m, d);
        max_mult = max_mult.max(*mult);
    }
    let mut m0 = 0u32;
    while p.pow(m0) < max_mult as u64 {
        m0 += 1;
    }
    // verification, factor-wise: each irreducible factor must divide
    // z^(p^m) - z, i.e. z^(p^m) = z mod the factor, and multiplicities
    // fit under p^(m0)
    let spec = delta.spec();
    for (qf, mult) in &factors {
        let mut x = Poly::z(spec).div_rem(qf)?.1;
        for _ in 0..m {
            x = pow_mod_poly(&x, p, qf);
        }
        if x != Poly::z(spec).div_rem(qf)?.1 {
            return Err(Error::Internal(
                "splitting degree verification failed".into(),
            ));
        }
        if (*mult as u64) > p.pow(m0) {
            return Err(Error::Internal("multiplicity exponent too small".into()));
        }
    }
    Ok((m as u32, m0))
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn pow_mod_poly(base: &Poly, mut e: u64, modulus: &Poly) -> Poly {
    let mut acc = Poly::one(base.spec());
    let mut b = base.div_rem(modulus).expect("nonzero modulus").1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).div_rem(modulus).expect("nonzero").1;
        }
        b = b.mul(&b).div_rem(modulus).expect("nonzero").1;
        e >>= 1;
    }
    acc
}

/// Bound data for a p-basic polynomial.
#[derive(Debug, Clone)]
pub struct OrdBoundReport {
    /// Splitting degree of Delta.
    pub m: u32,
    /// Multiplicity exponent of Delta.
    pub m0: u32,
    /// Stalling threshold of the polynomial-part reduction.
    pub omega: u64,
    /// `max(ceil((p^m0 + q)/(p-1)), omega)`.
    pub eord: u64,
    /// Pole-order bound of solutions at denominator degree 0.
    pub c_bound: i64,
    /// Wronskian determinant of the leading coefficients.
    pub wronskian: Poly,
    pub eps: EpsilonTuple,
}

/// The degree a single polynomial-part reduction step can reach from input
/// degree `d` (an upper bound; `rho` contributes `deg(Delta) - 1`).
fn poly_step_bound(f: &AdditivePoly, cb: &ChangeOfBasis, d: i64) -> i64 {
    let q = cb.q() as i64;
    let d_delta = if cb.delta.is_constant() {
        0i64
    } else {
        cb.delta.degree() as i64
    };
    let e_deg = cb.e_degree() as i64;
    let w_deg = (d - d_delta).div_euclid(q);
    let x_deg = w_deg + e_deg;
    let mut out = d_delta - 1;
    let lower = f.lower_part();
    for v in lower.vars() {
        for (lvl, c) in lower.levels_of(v).unwrap() {
            let reach = c.degree() as i64 + (f.p().pow(*lvl) as i64) * x_deg;
            out = out.max(reach);
        }
    }
    out
}

/// The stalling threshold: the largest degree from which the reduction step
/// cannot make strict progress. Depends only on `f`.
fn compute_omega(f: &AdditivePoly, cb: &ChangeOfBasis) -> u64 {
    let d_delta = if cb.delta.is_constant() {
        0i64
    } else {
        cb.delta.degree() as i64
    };
    let q = cb.q() as i64;
    let e_deg = cb.e_degree() as i64;
    let max_c = f.lower_part().max_coeff_degree() as i64;
    let cap = d_delta + 4 * (max_c + q * e_deg + d_delta + q + 4);
    let mut omega = (d_delta - 1).max(0);
    for d in d_delta.max(1)..=cap {
        if poly_step_bound(f, cb, d) >= d {
            omega = omega.max(d);
        }
    }
    omega as u64
}

/// `E_ord` and the associated bound data for a p-basic polynomial.
pub fn e_ord(f: &AdditivePoly) -> Result<OrdBoundReport> {
    let cb = change_of_basis(f)?;
    let (m, m0) = splitting_exponents(&cb.delta)?;
    let p = f.p() as i64;
    let q = cb.q() as i64;
    let threshold = ceil_div(p.pow(m0) + q, p - 1) as u64;
    let omega = compute_omega(f, &cb);
    let eord = threshold.max(omega);
    let prime = f.prime_spec();
    let leads: Vec<RatFunc> = cb
        .basis_vars
        .iter()
        .map(|v| RatFunc::from_poly(f.leading_coeff(*v).unwrap().clone()))
        .collect();
    let (c_bound, eps, wronskian) = pole_order_bound_core(&leads, cb.s, 0, &prime)?;
    Ok(OrdBoundReport {
        m,
        m0,
        omega,
        eord,
        c_bound,
        wronskian,
        eps,
    })
}

/// The reduction witness: `u' - u = f(x_tilde)` exactly, every pole of `u'`
/// is a pole of `u`, and `ord_v(u') >= -E_ord(f)` at every place.
#[derive(Debug, Clone)]
pub struct ReductionWitness {
    pub u_prime: RatFunc,
    pub x_tilde: Assignment,
    pub eord: u64,
}

impl ReductionWitness {
    /// Checks the full triple against `f` and the input `u`.
    pub fn verify(&self, f: &AdditivePoly, u: &RatFunc, loc: &Localization) -> Result<()> {
        let spec = loc.spec();
        let lhs = f.eval(&self.x_tilde, spec)?;
        if lhs != self.u_prime.sub(u) {
            return Err(Error::Internal("witness exactness failed".into()));
        }
        let mut places = loc.places();
        places.push(Place::Infinity);
        for v in &places {
            let ord_new = ord_at(&self.u_prime, v);
            let ord_old = ord_at(u, v);
            if let OrdVal::Finite(o) = ord_new {
                if o < -(self.eord as i64) {
                    return Err(Error::Internal(format!(
                        "pole order at {v} exceeds E_ord: {o}"
                    )));
                }
                if o < 0 {
                    let old_pole = matches!(ord_old, OrdVal::Finite(oo) if oo < 0);
                    if !old_pole {
                        return Err(Error::Internal(format!("new pole created at {v}")));
                    }
                }
            }
        }
        Ok(())
    }
}

struct ReduceContext {
    cb: ChangeOfBasis,
    report: OrdBoundReport,
    exp_hi: u64,
    exp_lo: u64,
}

fn reduce_context(f: &AdditivePoly) -> Result<ReduceContext> {
    let cb = change_of_basis(f)?;
    let report = e_ord(f)?;
    let p = f.p();
    let exp_hi = p
        .checked_pow(report.m + report.m0)
        .filter(|&e| e <= 1 << 16)
        .ok_or_else(|| Error::ResourceCap("splitting exponent too large".into()))?;
    let exp_lo = p.pow(report.m0);
    Ok(ReduceContext {
        cb,
        report,
        exp_hi,
        exp_lo,
    })
}

/// One application of the divisibility claim: `a / Q^ell` with `Delta | a`
/// equals `sum_j b_j x_j^q` with each `x_j` of pole order at most
/// `(ell + r)/q` at `Q`; returns the per-variable values.
fn claim_step(
    ctx: &ReduceContext,
    a: &Poly,
    q_place: &Poly,
    ell: u64,
    spec: &Arc<FieldSpec>,
) -> Result<Assignment> {
    let q = ctx.cb.q();
    let r = (q - (ell % q)) % q;
    let k = (ell + r) / q;
    let delta = ctx.cb.delta.lift_to(spec);
    let a_shift = a.mul(&q_place.pow(r));
    let a_prime = a_shift.div_exact(&delta)?;
    let parts = poly_q_power_decomposition(&a_prime, ctx.cb.s);
    let qk = RatFunc::from_poly(q_place.pow(k));
    let mut out: Assignment = BTreeMap::new();
    for (j, v) in ctx.cb.basis_vars.iter().enumerate() {
        let mut num = Poly::zero(spec);
        for (i, part) in parts.iter().enumerate() {
            num = num.add(&part.mul(&ctx.cb.e_matrix[i][j].lift_to(spec)));
        }
        let val = RatFunc::from_poly(num).div(&qk)?;
        out.insert(*v, val);
    }
    Ok(out)
}

fn pf_of(current: &RatFunc, loc: &Localization) -> Result<crate::ratfun::PartialFractionForm> {
    let exps = denominator_exponents(current, loc)?;
    let known: Vec<(Poly, u32)> = loc
        .s_lifted()
        .into_iter()
        .zip(exps.iter().copied())
        .filter(|(_, e)| *e > 0)
        .collect();
    partial_fractions_with_factors(current, Some(&known))
}

/// Reduces `u` modulo the image of the p-basic `f`: returns `u'` with
/// every pole order at most `E_ord(f)` and the exact witness
/// `u' - u = f(x_tilde)`.
pub fn reduce_mod_image(
    f: &AdditivePoly,
    u: &RatFunc,
    loc: &Localization,
) -> Result<ReductionWitness> {
    if !in_ring(u, loc) {
        return Err(Error::NotInRing);
    }
    let spec = loc.spec();
    let ctx = reduce_context(f)?;
    let p = f.p() as i64;
    let q = ctx.cb.q() as i64;
    let threshold = ceil_div(p.pow(ctx.report.m0) + q, p - 1) as u64;
    let mut current = u.clone();
    let mut x_total: Assignment = f
        .ring_vars()
        .iter()
        .map(|v| (*v, RatFunc::zero(spec)))
        .collect();

    fn apply_step(
        f: &AdditivePoly,
        spec: &Arc<FieldSpec>,
        current: &mut RatFunc,
        x_total: &mut Assignment,
        x_step: &Assignment,
    ) -> Result<()> {
        // replace the treated part: current += f(-x_step)
        let mut negated: Assignment = BTreeMap::new();
        for (v, val) in x_step {
            negated.insert(*v, val.neg());
        }
        let delta_val = f.eval(&negated, spec)?;
        *current = current.add(&delta_val);
        for (v, val) in negated {
            let slot = x_total.get_mut(&v).expect("initialized");
            *slot = slot.add(&val);
        }
        Ok(())
    }

    // affine pass: per sweep, treat the top term at each place whose pole
    // order reaches the threshold; the order at that place must strictly
    // improve
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::ResourceCap(
                "affine reduction did not terminate".into(),
            ));
        }
        let pf = pf_of(&current, loc)?;
        let mut treated = false;
        for place in pf.pole_places() {
            let ell = pf.pole_order_at(&place) as u64;
            if ell < threshold {
                continue;
            }
            let numer = pf
                .terms
                .iter()
                .find(|t| t.place == place && t.power as u64 == ell)
                .expect("top term present")
                .numer
                .clone();
            // u1 = -a (Q^hi - Q^lo) / Q^(ell+lo) has numerator divisible by
            // Delta; the cofactor u2 = a Q^(hi-lo) / Q^ell has strictly
            // smaller pole order at Q
            let swing = q_place_swing(&place, ctx.exp_hi, ctx.exp_lo);
            let a1 = numer.mul(&swing).neg();
            let x_step = claim_step(&ctx, &a1, &place, ell + ctx.exp_lo, spec)?;
            let before = ord_at(&current, &Place::finite(place.clone()));
            apply_step(f, spec, &mut current, &mut x_total, &x_step)?;
            let after = ord_at(&current, &Place::finite(place.clone()));
            if let (OrdVal::Finite(b), OrdVal::Finite(a)) = (before, after) {
                if a <= b {
                    return Err(Error::Internal(
                        "affine reduction made no strict progress".into(),
                    ));
                }
            }
            treated = true;
        }
        if !treated {
            break;
        }
    }

    // polynomial pass down to the stalling threshold
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::ResourceCap(
                "polynomial reduction did not terminate".into(),
            ));
        }
        let pf = pf_of(&current, loc)?;
        let omega_poly = pf.poly_part.clone();
        if omega_poly.is_zero() || (omega_poly.degree() as u64) <= ctx.report.omega {
            break;
        }
        let delta = ctx.cb.delta.lift_to(spec);
        let (w_quot, _rho) = omega_poly.div_rem(&delta)?;
        let parts = poly_q_power_decomposition(&w_quot, ctx.cb.s);
        let mut x_step: Assignment = BTreeMap::new();
        for (j, v) in ctx.cb.basis_vars.iter().enumerate() {
            let mut num = Poly::zero(spec);
            for (i, part) in parts.iter().enumerate() {
                num = num.add(&part.mul(&ctx.cb.e_matrix[i][j].lift_to(spec)));
            }
            x_step.insert(*v, RatFunc::from_poly(num));
        }
        let before = omega_poly.degree();
        apply_step(f, spec, &mut current, &mut x_total, &x_step)?;
        let pf_after = pf_of(&current, loc)?;
        if !pf_after.poly_part.is_zero() && pf_after.poly_part.degree() >= before {
            return Err(Error::Internal(
                "polynomial reduction made no strict progress".into(),
            ));
        }
    }

    let witness = ReductionWitness {
        u_prime: current,
        x_tilde: x_total,
        eord: ctx.report.eord,
    };
    witness.verify(f, u, loc)?;
    Ok(witness)
}

/// `Q^(hi) - Q^(lo)`, the factor whose product with any numerator is
/// divisible by `Delta`.
fn q_place_swing(place: &Poly, exp_hi: u64, exp_lo: u64) -> Poly {
    place.pow(exp_hi).sub(&place.pow(exp_lo))
}

/// Ring decomposition `u = f(x_tilde) + (1/e^N) G(alpha)` with
/// `N = E_ord(f)`, `e` the product of `S`, and
/// `G(alpha) = sum_(i <= N(1+deg e)) alpha_i z^i` over field values.
pub fn image_decomposition(
    f: &AdditivePoly,
    u: &RatFunc,
    loc: &Localization,
) -> Result<(Assignment, Vec<FieldElem>)> {
    let spec = loc.spec();
    let w = reduce_mod_image(f, u, loc)?;
    let n = w.eord;
    let e = loc.e_product().lift_to(spec);
    let d_cap = (n as usize) * (1 + e.degree());
    // u = f(-x_tilde) + u'
    let mut x = BTreeMap::new();
    for (v, val) in &w.x_tilde {
        x.insert(*v, val.neg());
    }
    let scaled = w.u_prime.mul(&RatFunc::from_poly(e.pow(n)));
    if !scaled.is_polynomial() {
        return Err(Error::Internal(
            "reduced element not representable over e^N".into(),
        ));
    }
    let pnum = scaled.num();
    if !pnum.is_zero() && pnum.degree() > d_cap {
        return Err(Error::Internal(
            "reduced element exceeds the coefficient budget".into(),
        ));
    }
    let mut alphas = Vec::with_capacity(d_cap + 1);
    for i in 0..=d_cap {
        alphas.push(pnum.coeff(i));
    }
    Ok((x, alphas))
}

/// Recombines an image decomposition; verification helper.
pub fn image_recombine(
    f: &AdditivePoly,
    x: &Assignment,
    alphas: &[FieldElem],
    loc: &Localization,
) -> Result<RatFunc> {
    let spec = loc.spec();
    let n = e_ord(f)?.eord;
    let e = loc.e_product().lift_to(spec);
    let mut g = Poly::zero(spec);
    for (i, a) in alphas.iter().enumerate() {
        g = g.add(&Poly::monomial(a.clone(), i));
    }
    let tail = RatFunc::new(g, e.pow(n))?;
    Ok(f.eval(x, spec)?.add(&tail))
}

/// Pole-order bound core: for a family of leading coefficients independent
/// over `V_s(F)` and a denominator-degree budget, every solution component
/// of `f(x) = y` has order at least
/// `min(ceil((1-q-deg W)/(q-p^(s-1))), ceil((1-q-deg W-denDeg)/q))` at any
/// place, `W` the certificate Wronskian. For `s = 0` the equation is linear
/// and the bound is direct.
pub fn pole_order_bound_core(
    bs: &[RatFunc],
    s: u32,
    den_deg: u64,
    spec: &Arc<FieldSpec>,
) -> Result<(i64, EpsilonTuple, Poly)> {
    if bs.is_empty() {
        return Err(Error::NotOfClass("nonempty"));
    }
    let p = spec.p() as i64;
    if s == 0 {
        let b = &bs[0];
        if bs.len() > 1 || b.is_zero() {
            return Err(Error::NotOfClass("independent over V_0"));
        }
        let c = -(den_deg as i64) - b.num().degree() as i64;
        return Ok((c, EpsilonTuple(vec![0]), b.num().clone()));
    }
    let eps = wronskian_certificate(bs, s)?
        .ok_or_else(|| Error::NotOfClass("independent leading coefficients"))?;
    let w = wronskian_det(bs, &eps);
    if !w.is_polynomial() {
        return Err(Error::Internal(
            "Wronskian of polynomials not polynomial".into(),
        ));
    }
    let deg_w = w.num().degree() as i64;
    let q = p.pow(s);
    let ps1 = p.pow(s - 1);
    let c1 = ceil_div(1 - q - deg_w, q - ps1);
    let c2 = ceil_div(1 - q - deg_w - den_deg as i64, q);
    Ok((c1.min(c2), eps, w.num().clone()))
}

/// Pole-order bound for a normalized additive polynomial with independent
/// leading coefficients, at solutions of `f(x) = y` with
/// `deg(den y) <= den_deg`.
pub fn pole_order_bound(f: &AdditivePoly, den_deg: u64) -> Result<i64> {
    let flags = classify(f)?;
    if !flags.normalized || f.is_zero() {
        return Err(Error::NotOfClass("normalized"));
    }
    let prime = f.prime_spec();
    let leads: Vec<RatFunc> = f
        .ring_vars()
        .iter()
        .map(|v| RatFunc::from_poly(f.leading_coeff(*v).unwrap().clone()))
        .collect();
    let (c, _, _) = pole_order_bound_core(&leads, f.max_level(), den_deg, &prime)?;
    Ok(c)
}

/// The smallest eta in the field enumeration with no coefficient of `f`
/// vanishing at eta.
fn admissible_eta(f: &AdditivePoly, spec: &Arc<FieldSpec>) -> Result<FieldElem> {
    let coeffs: Vec<Poly> = f
        .vars()
        .iter()
        .flat_map(|v| f.levels_of(*v).unwrap().values().cloned())
        .map(|c| c.lift_to(spec))
        .collect();
    'next: for eta in enumerate_field(spec) {
        for c in &coeffs {
            if c.eval(&eta).is_zero() {
                continue 'next;
            }
        }
        return Ok(eta);
    }
    Err(Error::NoAdmissibleEta)
}

/// The transformed leading coefficients after `z -> 1/(z - eta)` and
/// clearing by `(z - eta)^M`.
fn infinity_transformed_leads(
    f: &AdditivePoly,
    eta: &FieldElem,
    m_clear: usize,
    spec: &Arc<FieldSpec>,
) -> Result<Vec<RatFunc>> {
    let zeta = RatFunc::new(
        Poly::one(spec),
        Poly::z(spec).sub(&Poly::constant(eta.clone())),
    )?;
    let clear = RatFunc::from_poly(
        Poly::z(spec)
            .sub(&Poly::constant(eta.clone()))
            .pow(m_clear as u64),
    );
    let mut out = Vec::new();
    for v in f.ring_vars() {
        let b = f.leading_coeff(v).unwrap().lift_to(spec);
        let composed = RatFunc::from_poly(b).compose_mobius(&zeta);
        let cleared = composed.mul(&clear);
        if !cleared.is_polynomial() {
            return Err(Error::Internal(
                "infinity transform did not clear denominators".into(),
            ));
        }
        out.push(cleared);
    }
    Ok(out)
}

/// Height bound `h(f, ell)`: every `x` in `R^n` with `|f(x)| <= ell` has
/// `|x_i| <= h`. Assembled from the pole bound at each place of `S` and the
/// pole bound at infinity after the substitution `z -> 1/(z-eta)`; `eta` is
/// the smallest field element where no coefficient vanishes, and the call
/// errors when the field has no such point.
pub fn height_bound(f: &AdditivePoly, ell: u64, loc: &Localization) -> Result<u64> {
    height_bound_impl(f, ell, loc, false)
}

/// Pipeline variant: when no admissible `eta` exists the first field
/// element is used anyway. The pole-order argument itself holds at every
/// point (the cleared coefficients stay polynomial and independence is
/// preserved by the substitution); admissibility is only the selection
/// convention of the strict entry point.
pub(crate) fn height_bound_relaxed(
    f: &AdditivePoly,
    ell: u64,
    loc: &Localization,
) -> Result<u64> {
    height_bound_impl(f, ell, loc, true)
}

fn height_bound_impl(
    f: &AdditivePoly,
    ell: u64,
    loc: &Localization,
    relaxed: bool,
) -> Result<u64> {
    let flags = classify(f)?;
    if !flags.strongly_normalized || f.is_zero() {
        return Err(Error::NotOfClass("strongly normalized"));
    }
    let spec = loc.spec();
    let s = f.max_level();
    let leads: Vec<RatFunc> = f
        .ring_vars()
        .iter()
        .map(|v| RatFunc::from_poly(f.leading_coeff(*v).unwrap().lift_to(spec)))
        .collect();
    let (c_aff, _, _) = pole_order_bound_core(&leads, s, ell, spec)?;
    let eta = match admissible_eta(f, spec) {
        Ok(eta) => eta,
        Err(Error::NoAdmissibleEta) if relaxed => FieldElem::zero(spec),
        Err(e) => return Err(e),
    };
    // clearing exponent: every coefficient must become polynomial again
    let m_clear = f
        .vars()
        .iter()
        .flat_map(|v| f.levels_of(*v).unwrap().values())
        .map(|c| c.degree())
        .max()
        .unwrap_or(0);
    let leads_inf = infinity_transformed_leads(f, &eta, m_clear, spec)?;
    let den_inf = ell.saturating_sub(m_clear as u64);
    let (c_inf, _, _) = pole_order_bound_core(&leads_inf, s, den_inf, spec)?;
    let mut h = c_inf.unsigned_abs();
    for place in loc.places() {
        h += place.degree() as u64 * c_aff.unsigned_abs();
    }
    Ok(h)
}

/// All ring elements with S-pole orders bounded by `pole_caps` and
/// numerator degree at most `num_deg`, in a deterministic order. Reduced
/// representatives only, plus zero.
pub fn enumerate_ring_elements(
    loc: &Localization,
    num_deg: usize,
    pole_caps: &[u32],
) -> Result<Vec<RatFunc>> {
    let spec = loc.spec();
    let order = spec.order();
    let s_lift = loc.s_lifted();
    if pole_caps.len() != s_lift.len() {
        return Err(Error::ArityMismatch {
            expected: s_lift.len(),
            got: pole_caps.len(),
        });
    }
    let mut shapes: Vec<Poly> = vec![Poly::one(spec)];
    for (s_poly, cap) in s_lift.iter().zip(pole_caps) {
        let mut next = Vec::new();
        for shape in &shapes {
            for k in 0..=*cap {
                next.push(shape.mul(&s_poly.pow(k as u64)));
            }
        }
        shapes = next;
    }
    let mut count: u64 = 1;
    for _ in 0..=num_deg {
        count = count.saturating_mul(order);
        if count > 80_000_000 {
            return Err(Error::ResourceCap("ring enumeration too large".into()));
        }
    }
    let mut out = vec![RatFunc::zero(spec)];
    for shape in &shapes {
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(num_deg + 1);
            let mut rem = idx;
            for _ in 0..=num_deg {
                coeffs.push(FieldElem::from_index(spec, rem % order));
                rem /= order;
            }
            let num = Poly::new(spec, coeffs);
            if num.is_zero() {
                continue;
            }
            if !num.gcd(shape).is_one() {
                continue;
            }
            out.push(RatFunc::new(num, shape.clone())?);
        }
    }
    Ok(out)
}

/// Elements of height at most `cap` (plus zero): denominators are S-power
/// products of degree at most `cap`, numerators coprime of degree at most
/// `cap`.
pub fn enumerate_height_bounded(loc: &Localization, cap: usize) -> Result<Vec<RatFunc>> {
    let caps: Vec<u32> = loc
        .s_polys()
        .iter()
        .map(|s| (cap / s.degree()) as u32)
        .collect();
    let all = enumerate_ring_elements(loc, cap, &caps)?;
    Ok(all
        .into_iter()
        .filter(|x| x.den().degree() <= cap)
        .collect())
}

/// The complete finite set `{x in R^n : f(x) = y}`, by exhaustive search
/// over candidates bounded by the pole-order and height bounds.
pub fn inverse_image(
    f: &AdditivePoly,
    y: &RatFunc,
    loc: &Localization,
) -> Result<Vec<Assignment>> {
    if !in_ring(y, loc) {
        return Err(Error::NotInRing);
    }
    let spec = loc.spec();
    let ell = if y.is_zero() { 0 } else { y.height()? };
    let c = pole_order_bound(f, ell)?;
    let h = height_bound(f, ell, loc)?;
    let caps: Vec<u32> = loc
        .s_polys()
        .iter()
        .map(|_| c.unsigned_abs() as u32)
        .collect();
    let candidates = enumerate_ring_elements(loc, h as usize, &caps)?;
    let vars = f.ring_vars();
    let mut total: u64 = 1;
    for _ in &vars {
        total = total.saturating_mul(candidates.len() as u64);
        if total > 50_000_000 {
            return Err(Error::ResourceCap("inverse image search too large".into()));
        }
    }
    // per-variable contributions f_v(c) computed once per candidate
    let mut contrib: Vec<Vec<RatFunc>> = Vec::with_capacity(vars.len());
    for v in &vars {
        let mut col = Vec::with_capacity(candidates.len());
        for cand in &candidates {
            let mut acc = RatFunc::zero(spec);
            for (lvl, coeff) in f.levels_of(*v).unwrap() {
                let pw = cand.pow(f.p().pow(*lvl));
                acc = acc.add(&pw.scale_poly(&coeff.lift_to(spec)));
            }
            col.push(acc);
        }
        contrib.push(col);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let mut val = RatFunc::zero(spec);
        for (col, &i) in contrib.iter().zip(&idx) {
            val = val.add(&col[i]);
        }
        if val == *y {
            let mut asg: Assignment = BTreeMap::new();
            for (v, &i) in vars.iter().zip(&idx) {
                asg.insert(*v, candidates[i].clone());
            }
            out.push(asg);
        }
        let mut carry = true;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < candidates.len() {
                carry = false;
                break;
            }
            *slot = 0;
        }
        if carry {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::parse_additive;
    use crate::sample::Rng;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    fn loc_z() -> Localization {
        Localization::new(&f2(), vec![Poly::z(&f2())]).unwrap()
    }

    fn acceptance_f() -> AdditivePoly {
        parse_additive("x1^2 + poly{z}*x2^2", 2).unwrap()
    }

    #[test]
    fn change_of_basis_identity_basis() {
        let f = acceptance_f();
        let cb = change_of_basis(&f).unwrap();
        assert!(cb.delta.is_one());
        assert!(cb.verify(&f));
    }

    #[test]
    fn change_of_basis_non_identity() {
        // b = {1, z^2 + z}: still a basis of V_1(F_2)
        let f = parse_additive("x1^2 + poly{z^2+z}*x2^2", 2).unwrap();
        let cb = change_of_basis(&f).unwrap();
        assert!(cb.verify(&f));
    }

    #[test]
    fn change_of_basis_degenerate_q1() {
        let f = parse_additive("poly{1+z}*x1", 2).unwrap();
        let cb = change_of_basis(&f).unwrap();
        assert!(cb.verify(&f));
        assert_eq!(cb.delta, Poly::from_ints(&f2(), &[1, 1]));
    }

    #[test]
    fn change_of_basis_random_p_basic() {
        // perturb the identity basis by a unimodular move; stays p-basic
        let mut rng = Rng::new(7);
        for _ in 0..10 {
            let k = rng.below(3) as usize;
            let text = format!("x1^2 + poly{{z + z^{}}}*x2^2", 2 * k + 3);
            if let Ok(f) = parse_additive(&text, 2) {
                if classify(&f).unwrap().p_basic {
                    let cb = change_of_basis(&f).unwrap();
                    assert!(cb.verify(&f));
                }
            }
        }
    }

    #[test]
    fn non_p_basic_rejected() {
        let f = parse_additive("x1^2", 2).unwrap();
        assert!(matches!(change_of_basis(&f), Err(Error::NotOfClass(_))));
    }

    #[test]
    fn splitting_exponents_examples() {
        let s = f2();
        assert_eq!(splitting_exponents(&Poly::one(&s)).unwrap(), (1, 0));
        assert_eq!(splitting_exponents(&Poly::z(&s).pow(2)).unwrap(), (1, 1));
        let d = Poly::from_ints(&s, &[1, 1, 1]);
        assert_eq!(splitting_exponents(&d).unwrap(), (2, 0));
        let d = Poly::z(&s).pow(3).mul(&Poly::from_ints(&s, &[1, 1, 1]));
        assert_eq!(splitting_exponents(&d).unwrap(), (2, 2));
    }

    #[test]
    fn splitting_divisibility_direct() {
        let s = f2();
        let mut rng = Rng::new(31);
        for _ in 0..30 {
            let d = rng.nonzero_poly(&s, 5);
            let (m, m0) = splitting_exponents(&d).unwrap();
            let hi = 2u64.pow(m + m0);
            let lo = 2u64.pow(m0);
            if hi <= 4096 {
                let big = Poly::z(&s).pow(hi).sub(&Poly::z(&s).pow(lo));
                assert!(d.monic().divides(&big), "delta={d} m={m} m0={m0}");
            }
        }
    }

    #[test]
    fn e_ord_golden_for_acceptance_f() {
        let f = acceptance_f();
        let r = e_ord(&f).unwrap();
        assert_eq!(r.m, 1);
        assert_eq!(r.m0, 0);
        assert_eq!(r.omega, 0);
        assert_eq!(r.eord, 3);
        assert_eq!(r.c_bound, -1);
        assert_eq!(r.eps.0, vec![0, 1]);
        assert!(r.wronskian.is_one());
    }

    #[test]
    fn e_ord_degenerate_linear() {
        // s = 0, f = b x with b = 1: reduction is exact division and the
        // threshold term (p^0 + 1)/(p - 1) = 2 dominates
        let f = parse_additive("x1", 2).unwrap();
        let r = e_ord(&f).unwrap();
        assert_eq!(r.eord, 2);
    }

    #[test]
    fn delta_depends_only_on_leading_coeffs() {
        let f1 = acceptance_f();
        let f2p = parse_additive("x1^2 + poly{z}*x2^2 + poly{z}*x1 + x2", 2).unwrap();
        assert_eq!(
            change_of_basis(&f1).unwrap().delta,
            change_of_basis(&f2p).unwrap().delta
        );
        let r1 = e_ord(&f1).unwrap();
        let r2 = e_ord(&f2p).unwrap();
        assert_eq!(r1.m, r2.m);
        assert_eq!(r1.m0, r2.m0);
    }

    #[test]
    fn reduce_below_threshold_is_identity() {
        let f = acceptance_f();
        let loc = loc_z();
        let u = RatFunc::new(Poly::one(&f2()), Poly::z(&f2()).pow(2)).unwrap();
        let w = reduce_mod_image(&f, &u, &loc).unwrap();
        assert_eq!(w.u_prime, u);
        for val in w.x_tilde.values() {
            assert!(val.is_zero());
        }
    }

    #[test]
    fn reduce_deep_pole() {
        let f = acceptance_f();
        let loc = loc_z();
        for k in [3u64, 5, 9, 12] {
            let u = RatFunc::new(Poly::one(&f2()), Poly::z(&f2()).pow(k)).unwrap();
            let w = reduce_mod_image(&f, &u, &loc).unwrap();
            w.verify(&f, &u, &loc).unwrap();
            let ord = ord_at(&w.u_prime, &Place::finite(Poly::z(&f2())));
            if let OrdVal::Finite(o) = ord {
                assert!(o >= -(w.eord as i64));
            }
        }
    }

    #[test]
    fn reduce_random_in_ring() {
        let f = parse_additive("x1^2 + poly{z}*x2^2 + x1 + x2", 2).unwrap();
        let loc = loc_z();
        let mut rng = Rng::new(17);
        for _ in 0..40 {
            let u = rng.in_ring(&loc, 9);
            let w = reduce_mod_image(&f, &u, &loc).unwrap();
            w.verify(&f, &u, &loc).unwrap();
        }
    }

    #[test]
    fn image_decomposition_recombines() {
        let f = acceptance_f();
        let loc = loc_z();
        let spec = loc.spec().clone();
        let mut rng = Rng::new(23);
        let (x, alphas) = image_decomposition(&f, &RatFunc::zero(&spec), &loc).unwrap();
        assert!(image_recombine(&f, &x, &alphas, &loc).unwrap().is_zero());
        for _ in 0..25 {
            let u = rng.in_ring(&loc, 8);
            let (x, alphas) = image_decomposition(&f, &u, &loc).unwrap();
            let back = image_recombine(&f, &x, &alphas, &loc).unwrap();
            assert_eq!(back, u);
        }
    }

    #[test]
    fn pole_order_bound_golden() {
        let f = acceptance_f();
        assert_eq!(pole_order_bound(&f, 0).unwrap(), -1);
        let mut prev = pole_order_bound(&f, 0).unwrap();
        for d in 1..=6 {
            let c = pole_order_bound(&f, d).unwrap();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn pole_order_empirical_check() {
        // brute force: x in R^2 with f(x) a polynomial of degree <= 3
        // respects the bound computed with den_deg = 0
        let f = acceptance_f();
        let loc = loc_z();
        let spec = loc.spec().clone();
        let c = pole_order_bound(&f, 0).unwrap();
        let candidates = enumerate_ring_elements(&loc, 3, &[3]).unwrap();
        let zplace = Place::finite(Poly::z(&spec));
        for x1 in &candidates {
            for x2 in &candidates {
                let mut asg = BTreeMap::new();
                asg.insert(Var::ring(0), x1.clone());
                asg.insert(Var::ring(1), x2.clone());
                let val = f.eval(&asg, &spec).unwrap();
                if !val.is_polynomial() || (!val.is_zero() && val.num().degree() > 3) {
                    continue;
                }
                for x in [x1, x2] {
                    if let OrdVal::Finite(o) = ord_at(x, &zplace) {
                        assert!(o >= c, "x={x} violates C={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn height_bound_golden() {
        let f = acceptance_f();
        let loc = loc_z();
        let h = height_bound(&f, 3, &loc).unwrap();
        assert_eq!(h, 3);
        let mut prev = height_bound(&f, 0, &loc).unwrap();
        for ell in 1..=6 {
            let h = height_bound(&f, ell, &loc).unwrap();
            assert!(h >= prev);
            prev = h;
        }
        // a larger S contributes nonnegatively
        let loc2 = Localization::new(
            &f2(),
            vec![Poly::z(&f2()), Poly::from_ints(&f2(), &[1, 1])],
        )
        .unwrap();
        for ell in 0..=4 {
            assert!(
                height_bound(&f, ell, &loc2).unwrap() >= height_bound(&f, ell, &loc).unwrap()
            );
        }
    }

    #[test]
    fn inverse_image_finds_planted() {
        let f = acceptance_f();
        let loc = loc_z();
        let spec = loc.spec().clone();
        let mut rng = Rng::new(41);
        for _ in 0..5 {
            let mut planted: Assignment = BTreeMap::new();
            planted.insert(Var::ring(0), rng.in_ring(&loc, 2));
            planted.insert(Var::ring(1), rng.in_ring(&loc, 2));
            let y = f.eval(&planted, &spec).unwrap();
            if !in_ring(&y, &loc) {
                continue;
            }
            let sols = inverse_image(&f, &y, &loc).unwrap();
            assert!(sols.contains(&planted));
            for sol in &sols {
                assert_eq!(f.eval(sol, &spec).unwrap(), y);
            }
        }
        let sols = inverse_image(&f, &RatFunc::zero(&spec), &loc).unwrap();
        let zero: Assignment = [
            (Var::ring(0), RatFunc::zero(&spec)),
            (Var::ring(1), RatFunc::zero(&spec)),
        ]
        .into_iter()
        .collect();
        assert!(sols.contains(&zero));
    }
}
