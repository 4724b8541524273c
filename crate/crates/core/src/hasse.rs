//! Hasse hyperderivatives `D_eps` on `F(z)`.
//!
//! On monomials `D_eps(z^j) = C(j, eps) z^(j-eps)` with the binomial taken
//! mod `p`; the extension to rational functions goes through linearity, the
//! Leibniz product formula and the quotient formula for `1/f`, which is the
//! toolkit the identities in this crate are tested against.

use crate::error::{Error, Result};
use crate::gf::FieldElem;
use crate::ratfun::division::q_power_decomposition;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::RatFunc;

/// Binomial coefficient mod `p` by Lucas's theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        // small digit binomial
        let mut digit = 1u64;
        for i in 0..kd {
            digit = digit * (nd - i) / (i + 1);
        }
        acc = acc * (digit % p) % p;
        n /= p;
        k /= p;
    }
    acc
}

/// `D_eps` on polynomials: monomial rule plus linearity.
pub fn hasse_derivative_poly(x: &Poly, eps: u32) -> Poly {
    if eps == 0 {
        return x.clone();
    }
    let spec = x.spec();
    let p = spec.p();
    let e = eps as usize;
    if x.degree() < e || x.is_zero() {
        return Poly::zero(spec);
    }
    let mut coeffs = Vec::with_capacity(x.degree() - e + 1);
    for j in e..=x.degree() {
        let b = binomial_mod_p(j as u64, eps as u64, p);
        let c = x.coeff(j).mul(&FieldElem::from_u64(spec, b));
        coeffs.push(c);
    }
    Poly::new(spec, coeffs)
}

/// Numerators of the quotient formula over the common denominator
/// `f^(e+1)`: entry `e` equals
/// `sum_j (-1)^j f^(e-j) sum_(i_1+..+i_j=e) D_(i_1)(f)...D_(i_j)(f)`,
/// so that `D_e(1/f) = N_e / f^(e+1)`. The composition sums are the
/// `j`-fold convolutions of the derivative sequence.
fn inverse_numerators(f: &Poly, eps: u32) -> Vec<Poly> {
    let spec = f.spec();
    let e = eps as usize;
    let mut out = vec![Poly::zero(spec); e + 1];
    out[0] = Poly::one(spec);
    if e == 0 {
        return out;
    }
    let mut d = vec![Poly::zero(spec); e + 1];
    for i in 1..=e {
        d[i] = hasse_derivative_poly(f, i as u32);
    }
    // powers of f up to e - 1
    let mut fpow = vec![Poly::one(spec); e];
    for i in 1..e {
        fpow[i] = fpow[i - 1].mul(f);
    }
    let mut conv = d.clone();
    for j in 1..=e {
        for k in j..=e {
            if conv[k].is_zero() {
                continue;
            }
            let mut term = conv[k].mul(&fpow[k - j]);
            if j % 2 == 1 {
                term = term.neg();
            }
            out[k] = out[k].add(&term);
        }
        if j == e {
            break;
        }
        let mut next = vec![Poly::zero(spec); e + 1];
        for k in (j + 1)..=e {
            let mut slot = Poly::zero(spec);
            for i in 1..=(k - j) {
                if !conv[k - i].is_zero() && !d[i].is_zero() {
                    slot = slot.add(&conv[k - i].mul(&d[i]));
                }
            }
            next[k] = slot;
        }
        conv = next;
    }
    out
}

/// `D_eps(1/f)` by the quotient formula
/// `sum_j (-1)^j / f^(j+1) * sum_(i_1+..+i_j=eps) D_(i_1)(f)...D_(i_j)(f)`.
pub fn hasse_derivative_inverse(f: &Poly, eps: u32) -> Result<RatFunc> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let nums = inverse_numerators(f, eps);
    RatFunc::new(nums[eps as usize].clone(), f.pow(eps as u64 + 1))
}

/// `D_eps` on rational functions, via the Leibniz formula applied to
/// `num * (1/den)` with the quotient formula for the inverse; the sum is
/// assembled over the common denominator `den^(eps+1)`.
pub fn hasse_derivative(x: &RatFunc, eps: u32) -> RatFunc {
    if eps == 0 {
        return x.clone();
    }
    if x.is_polynomial() {
        return RatFunc::from_poly(hasse_derivative_poly(x.num(), eps));
    }
    let spec = x.spec();
    let den = x.den();
    let inv_nums = inverse_numerators(den, eps);
    let mut denpow = vec![Poly::one(spec); eps as usize + 1];
    for i in 1..=eps as usize {
        denpow[i] = denpow[i - 1].mul(den);
    }
    let mut total = Poly::zero(spec);
    for i in 0..=eps {
        let di_num = hasse_derivative_poly(x.num(), i);
        if di_num.is_zero() {
            continue;
        }
        // D_i(num) * N_(eps-i) * den^i over den^(eps+1)
        let part = di_num
            .mul(&inv_nums[(eps - i) as usize])
            .mul(&denpow[i as usize]);
        total = total.add(&part);
    }
    RatFunc::new(total, den.pow(eps as u64 + 1)).expect("nonzero denominator")
}

/// Computes `D_eps(x^(p^m))` both directly and through the `p`-th power
/// rule, and checks that the two agree; the rule gives `(D_j(x))^(p^m)`
/// when `eps = j p^m` and `0` otherwise.
pub fn check_p3(x: &RatFunc, m: u32, eps: u32) -> Result<RatFunc> {
    let p = x.spec().p();
    let pm = p.pow(m);
    let direct = hasse_derivative(&x.pow(pm), eps);
    let via_rule = if (eps as u64) % pm == 0 {
        let j = eps as u64 / pm;
        hasse_derivative(x, j as u32).pow(pm)
    } else {
        RatFunc::zero(x.spec())
    };
    if direct != via_rule {
        return Err(Error::Internal(format!(
            "p-th power rule mismatch at eps={eps}, m={m}"
        )));
    }
    Ok(direct)
}

/// `D_eps(g)` computed through the `q`-power basis decomposition
/// `g = sum g_i^q z^i`: only the basis monomials get differentiated.
pub fn derivative_in_basis(g: &RatFunc, s: u32, eps: u32) -> Result<RatFunc> {
    let spec = g.spec();
    let q = spec.p().pow(s);
    if eps == 0 || eps as u64 >= q {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let parts = q_power_decomposition(g, s);
    let mut acc = RatFunc::zero(spec);
    for (i, gi) in parts.iter().enumerate() {
        if gi.is_zero() || (i as u32) < eps {
            continue;
        }
        let b = binomial_mod_p(i as u64, eps as u64, spec.p());
        if b == 0 {
            continue;
        }
        let mono = Poly::monomial(FieldElem::from_u64(spec, b), i - eps as usize);
        acc = acc.add(&gi.pow(q).mul(&RatFunc::from_poly(mono)));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::ratfun::rational::{ord_at, OrdVal, Place};
    use std::sync::Arc;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    #[test]
    fn monomial_rule_char2() {
        let s = f2();
        // D_1(z^3) = 3 z^2 = z^2 over F_2
        let d = hasse_derivative_poly(&Poly::z(&s).pow(3), 1);
        assert_eq!(d, Poly::from_ints(&s, &[0, 0, 1]));
        // D_2(z^2) = 1
        let d = hasse_derivative_poly(&Poly::z(&s).pow(2), 2);
        assert!(d.is_one());
    }

    #[test]
    fn quotient_rule_inverse_of_z() {
        let s = f2();
        // D_1(1/z) = -1/z^2 = 1/z^2 over F_2
        let d = hasse_derivative(&RatFunc::z(&s).inv().unwrap(), 1);
        let expect = RatFunc::new(Poly::one(&s), Poly::z(&s).pow(2)).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn d0_is_identity() {
        let s = f2();
        let x = RatFunc::new(
            Poly::from_ints(&s, &[1, 1, 1]),
            Poly::from_ints(&s, &[1, 0, 1, 1]),
        )
        .unwrap();
        assert_eq!(hasse_derivative(&x, 0), x);
    }

    #[test]
    fn p3_vanishing_case() {
        let s = f2();
        let x = RatFunc::new(Poly::from_ints(&s, &[1, 1]), Poly::from_ints(&s, &[0, 1, 1]))
            .unwrap();
        // eps = 1 is not divisible by p^1 = 2, so D_1(x^2) = 0
        let d = check_p3(&x, 1, 1).unwrap();
        assert!(d.is_zero());
        // eps = p^m case
        let d = check_p3(&x, 1, 2).unwrap();
        assert_eq!(d, hasse_derivative(&x, 1).pow(2));
    }

    #[test]
    fn basis_route_matches_direct_route() {
        let s = f2();
        let g = RatFunc::new(
            Poly::from_ints(&s, &[1, 0, 1, 1, 0, 1]),
            Poly::from_ints(&s, &[1, 1, 0, 1]),
        )
        .unwrap();
        for s_exp in 1..=2u32 {
            let q = 2u32.pow(s_exp);
            for eps in 1..q {
                let a = derivative_in_basis(&g, s_exp, eps).unwrap();
                let b = hasse_derivative(&g, eps);
                assert_eq!(a, b, "s={s_exp} eps={eps}");
            }
        }
        // g in F(z^q) has vanishing derivatives in range
        let zq = RatFunc::from_poly(Poly::z(&s).pow(2));
        assert!(derivative_in_basis(&zq, 1, 1).unwrap().is_zero());
        assert_eq!(
            derivative_in_basis(&RatFunc::z(&s), 1, 1).unwrap(),
            RatFunc::one(&s)
        );
    }

    #[test]
    fn epsilon_range_enforced() {
        let s = f2();
        let g = RatFunc::z(&s);
        assert!(derivative_in_basis(&g, 1, 2).is_err());
        assert!(derivative_in_basis(&g, 1, 0).is_err());
    }

    #[test]
    fn ord_inequality_spot_checks() {
        let s = f2();
        let place = Place::finite(Poly::z(&s));
        let u = RatFunc::new(Poly::from_ints(&s, &[0, 0, 1, 1]), Poly::from_ints(&s, &[1, 1]))
            .unwrap();
        for eps in 1..=4u32 {
            let d = hasse_derivative(&u, eps);
            if d.is_zero() {
                continue;
            }
            let (OrdVal::Finite(du), OrdVal::Finite(ou)) = (ord_at(&d, &place), ord_at(&u, &place))
            else {
                panic!("finite orders expected")
            };
            assert!(du >= ou - eps as i64);
        }
    }

    #[test]
    fn lucas_binomials() {
        assert_eq!(binomial_mod_p(3, 1, 2), 1);
        assert_eq!(binomial_mod_p(2, 1, 2), 0);
        assert_eq!(binomial_mod_p(4, 2, 2), 0);
        assert_eq!(binomial_mod_p(5, 2, 3), 1); // C(5,2)=10=1 mod 3
        assert_eq!(binomial_mod_p(7, 3, 2), 1); // C(7,3)=35 odd
    }
}
