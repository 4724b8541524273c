//! Partial fraction decomposition over the working field.
//!
//! Every rational function is written uniquely as a polynomial part plus
//! terms `d/(Q^j)` with `Q` monic irreducible and `deg d < deg Q`.

use crate::error::Result;
use crate::ratfun::factor::factor;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::RatFunc;

/// One term `numer / place^power` with `deg numer < deg place`, `numer != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfTerm {
    pub place: Poly,
    pub power: u32,
    pub numer: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractionForm {
    pub poly_part: Poly,
    pub terms: Vec<PfTerm>,
}

impl PartialFractionForm {
    /// Reconstructs the rational function exactly.
    pub fn recombine(&self) -> RatFunc {
        let mut acc = RatFunc::from_poly(self.poly_part.clone());
        for t in &self.terms {
            let den = t.place.pow(t.power as u64);
            let frac = RatFunc::new(t.numer.clone(), den).expect("nonzero place power");
            acc = acc.add(&frac);
        }
        acc
    }

    /// Largest pole order at the given monic irreducible (0 when absent).
    pub fn pole_order_at(&self, place: &Poly) -> u32 {
        self.terms
            .iter()
            .filter(|t| &t.place == place)
            .map(|t| t.power)
            .max()
            .unwrap_or(0)
    }

    /// The distinct finite pole places.
    pub fn pole_places(&self) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for t in &self.terms {
            if !out.contains(&t.place) {
                out.push(t.place.clone());
            }
        }
        out
    }
}

/// Decomposes `x` into polynomial part plus proper prime-power fractions.
pub fn partial_fractions(x: &RatFunc) -> Result<PartialFractionForm> {
    partial_fractions_with_factors(x, None)
}

/// Same, but with the denominator factorization supplied by the caller
/// (used on hot paths where the factors are already known).
pub fn partial_fractions_with_factors(
    x: &RatFunc,
    known: Option<&[(Poly, u32)]>,
) -> Result<PartialFractionForm> {
    let (g, r) = x.num().div_rem(x.den())?;
    let mut poly_part = g;
    let mut terms = Vec::new();
    if !r.is_zero() {
        let owned;
        let factors: &[(Poly, u32)] = match known {
            Some(f) => f,
            None => {
                owned = factor(x.den());
                &owned
            }
        };
        for (q, a) in factors {
            if *a == 0 {
                continue;
            }
            let m = q.pow(*a as u64);
            let rest = x.den().div_exact(&m)?;
            // A = r * (rest^{-1} mod m) mod m has the right residue at q
            let (gcd, _, tau) = m.xgcd(&rest);
            debug_assert!(gcd.is_one(), "prime power parts are coprime");
            let a_i = r.mul(&tau).div_rem(&m)?.1;
            // base-q digits of a_i give terms of decreasing pole order
            let mut cur = a_i;
            let mut j = 0u32;
            while !cur.is_zero() {
                let (quot, digit) = cur.div_rem(q)?;
                if !digit.is_zero() {
                    terms.push(PfTerm {
                        place: q.clone(),
                        power: a - j,
                        numer: digit,
                    });
                }
                cur = quot;
                j += 1;
            }
        }
        // whatever the residues miss is a polynomial
        let mut partial = RatFunc::from_poly(poly_part.clone());
        for t in &terms {
            partial = partial.add(
                &RatFunc::new(t.numer.clone(), t.place.pow(t.power as u64)).expect("nonzero"),
            );
        }
        let diff = x.sub(&partial);
        debug_assert!(diff.is_polynomial(), "residue correction must be polynomial");
        poly_part = poly_part.add(diff.num());
    }
    terms.sort_by(|a, b| {
        let ka: Vec<u64> = a.place.coeffs().iter().map(|c| c.index()).collect();
        let kb: Vec<u64> = b.place.coeffs().iter().map(|c| c.index()).collect();
        ka.cmp(&kb).then(b.power.cmp(&a.power))
    });
    Ok(PartialFractionForm { poly_part, terms })
}
