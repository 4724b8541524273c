//! Division with remainder inside the localized ring, base-`c` expansion,
//! and the `q`-power basis decomposition of `F(z)` over `F(z^q)`.

use crate::error::{Error, Result};
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::{in_ring, Localization, RatFunc};

/// Splits `c` into its S-part (product of S-irreducible factors, invertible
/// in R) and the remaining cofactor, coprime to every element of S.
fn split_s_part(c: &Poly, loc: &Localization) -> (Poly, Poly) {
    let mut s_part = Poly::one(c.spec());
    let mut rest = c.clone();
    for s in loc.s_lifted() {
        loop {
            match rest.div_rem(&s) {
                Ok((q, r)) if r.is_zero() => {
                    rest = q;
                    s_part = s_part.mul(&s);
                }
                _ => break,
            }
        }
    }
    (s_part, rest)
}

/// Division with remainder in `R`: writes `u = v*c + r` with `v` in `R` and
/// `deg r < deg c`. When no irreducible factor of `c` is invertible in `R`,
/// the pair is the unique one with these properties.
pub fn divide_with_remainder(
    u: &RatFunc,
    c: &Poly,
    loc: &Localization,
) -> Result<(RatFunc, Poly)> {
    if c.is_constant() {
        return Err(Error::ConstantDivisor);
    }
    if !in_ring(u, loc) {
        return Err(Error::NotInRing);
    }
    if u.is_polynomial() {
        let (v, r) = u.num().div_rem(c)?;
        return Ok((RatFunc::from_poly(v), r));
    }
    let (s_part, core) = split_s_part(c, loc);
    if core.is_constant() {
        // c is an S-product up to a constant, hence invertible in R
        let v = u.div(&RatFunc::from_poly(c.clone()))?;
        return Ok((v, Poly::zero(c.spec())));
    }
    let u2 = u.div(&RatFunc::from_poly(s_part.clone()))?;
    let a = u2.num().clone();
    let b = u2.den().clone();
    let (g, sigma, tau) = core.xgcd(&b);
    if !g.is_one() {
        return Err(Error::Internal(
            "S-free part of divisor shares a factor with the denominator".into(),
        ));
    }
    // u2 = sigma*u2*core + tau*a; divide tau*a by core
    let (w, r) = tau.mul(&a).div_rem(&core)?;
    let v = RatFunc::new(sigma.mul(&a), b.clone())?.add(&RatFunc::from_poly(w));
    let r_final = r.mul(&s_part);
    debug_assert!(r_final.is_zero() || r_final.degree() < c.degree());
    Ok((v, r_final))
}

/// Base-`c` expansion `u = r_0 + r_1 c + ... + r_N c^N + v c^(N+1)` with
/// each `deg r_i < deg c` and `v` in `R`.
pub fn expand_base_c(
    u: &RatFunc,
    c: &Poly,
    n: u32,
    loc: &Localization,
) -> Result<(Vec<Poly>, RatFunc)> {
    if c.is_zero() || c.is_constant() {
        return Err(Error::ConstantDivisor);
    }
    let mut digits = Vec::with_capacity(n as usize + 1);
    let mut cur = u.clone();
    for _ in 0..=n {
        let (v, r) = divide_with_remainder(&cur, c, loc)?;
        digits.push(r);
        cur = v;
    }
    Ok((digits, cur))
}

/// Writes `g = sum_i g_i^q z^i` over the basis `{z^i : 0 <= i < q}` of
/// `F(z)` over `F(z^q)`, with `q = p^s`. Exact on finite fields because
/// Frobenius is invertible coefficient-wise.
pub fn q_power_decomposition(g: &RatFunc, s: u32) -> Vec<RatFunc> {
    let q = g.spec().p().pow(s);
    if q == 1 {
        return vec![g.clone()];
    }
    // g = (num * den^(q-1)) / den^q; the denominator is already a q-th power
    let a = g.num().mul(&g.den().pow(q - 1));
    let parts = poly_q_power_decomposition(&a, s);
    parts
        .into_iter()
        .map(|p| RatFunc::new(p, g.den().clone()).expect("nonzero denominator"))
        .collect()
}

/// Polynomial version: components of `a = sum_i a_i^q z^i` are polynomials.
pub fn poly_q_power_decomposition(a: &Poly, s: u32) -> Vec<Poly> {
    let spec = a.spec();
    let q = spec.p().pow(s) as usize;
    if q == 1 {
        return vec![a.clone()];
    }
    let mut out = Vec::with_capacity(q);
    for i in 0..q {
        let mut coeffs = Vec::new();
        let mut k = 0usize;
        while q * k + i <= a.degree() && !a.is_zero() {
            coeffs.push(a.coeff(q * k + i).qth_root(s));
            k += 1;
        }
        out.push(Poly::new(spec, coeffs));
    }
    out
}

/// Recombines a `q`-power decomposition; test and verification helper.
pub fn q_power_recombine(parts: &[RatFunc], s: u32) -> RatFunc {
    let spec = parts[0].spec();
    let q = spec.p().pow(s);
    let mut acc = RatFunc::zero(spec);
    for (i, gi) in parts.iter().enumerate() {
        let zi = RatFunc::from_poly(Poly::z(spec).pow(i as u64));
        acc = acc.add(&gi.pow(q).mul(&zi));
    }
    acc
}
