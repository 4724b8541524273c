//! Irreducibility testing and factorization over concrete finite fields.
//!
//! Everything here is deterministic: equal-degree splitting enumerates
//! candidate divisors instead of using randomized Cantor-Zassenhaus, which
//! keeps outputs reproducible and is fast at the degrees this crate works
//! with.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::ratfun::poly::Poly;
use std::sync::Arc;

fn formal_derivative(f: &Poly) -> Poly {
    let spec = f.spec();
    if f.is_constant() {
        return Poly::zero(spec);
    }
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| {
            let k = FieldElem::from_u64(spec, i as u64);
            c.mul(&k)
        })
        .collect();
    Poly::new(spec, coeffs)
}

fn pow_mod(base: &Poly, mut e: u64, modulus: &Poly) -> Poly {
    let mut acc = Poly::one(base.spec());
    let mut b = base.div_rem(modulus).expect("nonzero modulus").1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).div_rem(modulus).expect("nonzero modulus").1;
        }
        b = b.mul(&b).div_rem(modulus).expect("nonzero modulus").1;
        e >>= 1;
    }
    acc
}

/// Irreducibility over the polynomial's own field `F_{p^m}` (Rabin's test).
pub fn is_irreducible(f: &Poly) -> bool {
    let d = f.degree();
    if f.is_zero() || d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let q = f.spec().order();
    let z = Poly::z(f.spec());
    // z^(q^d) mod f by iterated q-th powering
    let mut x = z.div_rem(f).expect("nonzero").1;
    let mut frontier = Vec::with_capacity(d);
    for _ in 0..d {
        x = pow_mod(&x, q, f);
        frontier.push(x.clone());
    }
    if !frontier[d - 1].sub(&z.div_rem(f).unwrap().1).is_zero() {
        return false;
    }
    let mut primes = Vec::new();
    let mut n = d;
    let mut r = 2;
    while r * r <= n {
        if n % r == 0 {
            primes.push(r);
            while n % r == 0 {
                n /= r;
            }
        }
        r += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for r in primes {
        let g = frontier[d / r - 1]
            .sub(&z.div_rem(f).unwrap().1)
            .gcd(f);
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// Whether `q` (irreducible over `F_p`) stays irreducible over `F_{p^m}`.
/// Errors when `q` is not irreducible over the prime field to begin with.
pub fn remains_irreducible(q: &Poly, spec: &Arc<FieldSpec>) -> Result<bool> {
    if !q.spec().is_prime_field() || q.spec().p() != spec.p() {
        return Err(Error::BadLocalization(
            "polynomial must live over F_p".into(),
        ));
    }
    if !is_irreducible(q) {
        return Err(Error::NotIrreducible);
    }
    Ok(is_irreducible(&q.lift_to(spec)))
}

/// All monic polynomials of degree exactly `d`, in canonical index order.
pub fn monic_polys_of_degree(spec: &Arc<FieldSpec>, d: usize) -> Vec<Poly> {
    let q = spec.order();
    let count = q.pow(d as u32);
    let mut out = Vec::with_capacity(count as usize);
    for mut idx in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(FieldElem::from_index(spec, idx % q));
            idx /= q;
        }
        coeffs.push(FieldElem::one(spec));
        out.push(Poly::new(spec, coeffs));
    }
    out
}

/// Monic irreducible factors with multiplicities, sorted for determinism.
pub fn factor(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = Vec::new();
    factor_into(&f.monic(), 1, &mut out);
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| key_of(&a.0).cmp(&key_of(&b.0)))
    });
    out
}

fn key_of(p: &Poly) -> Vec<u64> {
    p.coeffs().iter().map(|c| c.index()).collect()
}

fn factor_into(f: &Poly, mult_scale: u32, out: &mut Vec<(Poly, u32)>) {
    if f.is_constant() {
        return;
    }
    let deriv = formal_derivative(f);
    if deriv.is_zero() {
        // f = g(z^p) = (pth_root(f))^p
        let g = f.pth_root().expect("derivative zero implies p-th power shape");
        factor_into(&g, mult_scale * f.spec().p() as u32, out);
        return;
    }
    // squarefree part: contains every factor whose multiplicity is not
    // divisible by p
    let sq = f.div_exact(&f.gcd(&deriv)).expect("gcd divides");
    let mut rest = f.clone();
    for q in distinct_factors_squarefree(&sq) {
        let k = f.multiplicity_of(&q);
        out.push((q.clone(), k * mult_scale));
        rest = rest.div_exact(&q.pow(k as u64)).expect("factor divides");
    }
    // what is left has only multiplicities divisible by p
    factor_into(&rest, mult_scale, out);
}

/// Distinct-degree factorization followed by trial-division splitting,
/// for squarefree monic input.
fn distinct_factors_squarefree(f: &Poly) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut g = f.monic();
    if g.is_constant() {
        return out;
    }
    let q = f.spec().order();
    let z = Poly::z(f.spec());
    let mut x = z.div_rem(&g).expect("nonzero").1;
    let mut d = 1usize;
    while 2 * d <= g.degree() {
        x = pow_mod(&x, q, &g);
        let h = x.sub(&z).gcd(&g);
        if !h.is_one() {
            split_equal_degree(&h, d, &mut out);
            g = g.div_exact(&h).expect("gcd divides");
            x = x.div_rem(&g).expect("nonzero").1;
        }
        d += 1;
    }
    if !g.is_constant() {
        out.push(g);
    }
    out
}

/// Splits a product of distinct irreducibles of known degree `d` by
/// enumerating monic candidates of that degree.
fn split_equal_degree(h: &Poly, d: usize, out: &mut Vec<Poly>) {
    if h.degree() == d {
        out.push(h.clone());
        return;
    }
    let mut rest = h.clone();
    for cand in monic_polys_of_degree(h.spec(), d) {
        if rest.degree() < d {
            break;
        }
        if cand.divides(&rest) {
            rest = rest.div_exact(&cand).expect("divides");
            out.push(cand);
            if rest.degree() == d {
                out.push(rest.clone());
                return;
            }
        }
    }
    debug_assert!(rest.is_constant(), "equal-degree split must exhaust");
}

/// Smallest monic irreducible of `F_p[z]` (by degree, then index order) that
/// remains irreducible over the working field and is distinct from every
/// exclusion.
pub fn smallest_irreducible_avoiding(
    spec: &Arc<FieldSpec>,
    exclude: &[Poly],
) -> Result<Poly> {
    let prime = FieldSpec::prime_field(spec.p())?;
    for d in 1..=8usize {
        for cand in monic_polys_of_degree(&prime, d) {
            if exclude.contains(&cand) {
                continue;
            }
            if !is_irreducible(&cand) {
                continue;
            }
            if remains_irreducible(&cand, spec)? {
                return Ok(cand);
            }
        }
    }
    Err(Error::Internal(
        "no small irreducible found; degree cap exceeded".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    #[test]
    fn degree_one_remains_irreducible() {
        let s = FieldSpec::default_for(2, 2).unwrap();
        let z = Poly::z(&f2());
        assert!(remains_irreducible(&z, &s).unwrap());
    }

    #[test]
    fn z2z1_splits_in_f4_not_f8() {
        let q = Poly::from_ints(&f2(), &[1, 1, 1]); // z^2+z+1
        let f4 = FieldSpec::default_for(2, 2).unwrap();
        let f8 = FieldSpec::default_for(2, 3).unwrap();
        assert!(!remains_irreducible(&q, &f4).unwrap());
        assert!(remains_irreducible(&q, &f8).unwrap());
    }

    #[test]
    fn reducible_input_is_error() {
        let s = FieldSpec::default_for(2, 2).unwrap();
        let q = Poly::from_ints(&f2(), &[1, 0, 1]); // (z+1)^2
        assert_eq!(remains_irreducible(&q, &s), Err(Error::NotIrreducible));
    }

    #[test]
    fn factor_roundtrip_f2() {
        let s = f2();
        // z^3 (z+1)^2 (z^2+z+1)
        let f = Poly::z(&s)
            .pow(3)
            .mul(&Poly::from_ints(&s, &[1, 1]).pow(2))
            .mul(&Poly::from_ints(&s, &[1, 1, 1]));
        let factors = factor(&f);
        let mut prod = Poly::one(&s);
        for (q, k) in &factors {
            assert!(is_irreducible(q));
            prod = prod.mul(&q.pow(*k as u64));
        }
        assert_eq!(prod, f.monic());
        assert_eq!(factors.len(), 3);
    }

    #[test]
    fn factor_pure_power_char3() {
        let s = FieldSpec::prime_field(3).unwrap();
        let f = Poly::from_ints(&s, &[1, 1]).pow(9);
        let factors = factor(&f);
        assert_eq!(factors, vec![(Poly::from_ints(&s, &[1, 1]), 9)]);
    }

    #[test]
    fn factor_over_extension_field() {
        let s = FieldSpec::default_for(2, 2).unwrap();
        // z^2+z+1 splits into two degree-1 factors over F_4
        let f = Poly::from_ints(&f2(), &[1, 1, 1]).lift_to(&s);
        let factors = factor(&f);
        assert_eq!(factors.len(), 2);
        let mut prod = Poly::one(&s);
        for (q, k) in &factors {
            assert_eq!(q.degree(), 1);
            assert_eq!(*k, 1);
            prod = prod.mul(&q.pow(*k as u64));
        }
        assert_eq!(prod, f);
    }

    #[test]
    fn smallest_irreducible_skips_exclusions() {
        let s = f2();
        let z = Poly::z(&s);
        let got = smallest_irreducible_avoiding(&s, &[z.clone()]).unwrap();
        assert_eq!(got, Poly::from_ints(&s, &[1, 1])); // z+1
        let f4 = FieldSpec::default_for(2, 2).unwrap();
        // over F_4, z^2+z+1 splits, so the search must skip it
        let got = smallest_irreducible_avoiding(&f4, &[z, Poly::from_ints(&s, &[1, 1])]).unwrap();
        assert_eq!(got.degree(), 3);
    }
}
