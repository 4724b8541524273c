//! Rational functions in canonical form, places, orders and heights.
//!
//! Canonical form: the denominator is monic and nonzero, numerator and
//! denominator are coprime, and 0 is represented as 0/1.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::ratfun::poly::Poly;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = RatFunc { num, den };
        r.normalize();
        Ok(r)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.spec());
            return;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = self.num.div_exact(&g).expect("gcd divides");
            self.den = self.den.div_exact(&g).expect("gcd divides");
        }
        let lead = self.den.leading_coeff().inv().expect("nonzero den");
        self.den = self.den.scale(&lead);
        self.num = self.num.scale(&lead);
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let one = Poly::one(p.spec());
        RatFunc { num: p, den: one }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> RatFunc {
        RatFunc::from_poly(Poly::zero(spec))
    }

    pub fn one(spec: &Arc<FieldSpec>) -> RatFunc {
        RatFunc::from_poly(Poly::one(spec))
    }

    pub fn constant(c: FieldElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn z(spec: &Arc<FieldSpec>) -> RatFunc {
        RatFunc::from_poly(Poly::z(spec))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.num.spec()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// True when the value is a constant lying in `F`.
    pub fn is_field_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn as_field_constant(&self) -> Option<FieldElem> {
        if self.is_field_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::one(self.spec()).div(self)
    }

    pub fn scale_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(self.num.mul(p), self.den.clone()).expect("nonzero denominator")
    }

    pub fn pow(&self, mut e: u64) -> RatFunc {
        let mut acc = RatFunc::one(self.spec());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Height `max(deg num, deg den)` of the reduced form; the height of 0
    /// is not defined.
    pub fn height(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::HeightOfZero);
        }
        Ok(self.num.degree().max(self.den.degree()) as u64)
    }

    /// Substitutes `z -> q(z)/r(z)` (a fresh rational expression for z).
    pub fn compose_mobius(&self, zq: &RatFunc) -> RatFunc {
        let eval = |p: &Poly| -> RatFunc {
            let mut acc = RatFunc::zero(p.spec());
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(zq).add(&RatFunc::constant(c.clone()));
            }
            acc
        };
        let n = eval(&self.num);
        let d = eval(&self.den);
        n.div(&d).expect("denominator composition nonzero")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Dispatch for the four rational-function operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rat_arith(a: &RatFunc, b: &RatFunc, op: RatOp) -> Result<RatFunc> {
    match op {
        RatOp::Add => Ok(a.add(b)),
        RatOp::Sub => Ok(a.sub(b)),
        RatOp::Mul => Ok(a.mul(b)),
        RatOp::Div => a.div(b),
    }
}

/// A place of `F(z)`: a monic irreducible polynomial or the place at
/// infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn finite(q: Poly) -> Place {
        debug_assert!(q.is_monic() && !q.is_constant());
        Place::Finite(q)
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(q) => q.degree(),
            Place::Infinity => 1,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(q) => write!(f, "{q}"),
            Place::Infinity => write!(f, "INF"),
        }
    }
}

/// An order value; `ord(0)` is the distinct infinity marker, never a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdVal {
    Finite(i64),
    Infinite,
}

impl OrdVal {
    pub fn finite(self) -> Option<i64> {
        match self {
            OrdVal::Finite(v) => Some(v),
            OrdVal::Infinite => None,
        }
    }

    /// True when this order admits a pole reading (negative finite value).
    pub fn is_pole(self) -> bool {
        matches!(self, OrdVal::Finite(v) if v < 0)
    }
}

impl fmt::Display for OrdVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdVal::Finite(v) => write!(f, "{v}"),
            OrdVal::Infinite => write!(f, "inf"),
        }
    }
}

/// Order of `x` at a place: multiplicity in the numerator minus multiplicity
/// in the denominator; at infinity, `deg den - deg num`. `ord(0)` is the
/// infinity marker.
pub fn ord_at(x: &RatFunc, v: &Place) -> OrdVal {
    if x.is_zero() {
        return OrdVal::Infinite;
    }
    match v {
        Place::Infinity => OrdVal::Finite(x.den().degree() as i64 - x.num().degree() as i64),
        Place::Finite(q) => {
            let up = x.num().multiplicity_of(q) as i64;
            let down = x.den().multiplicity_of(q) as i64;
            OrdVal::Finite(up - down)
        }
    }
}

/// The localized ring `R = F[z, s_1^-1, ..., s_nu^-1]`: the base field and
/// the set `S` of monic irreducibles of `F_p[z]` that remain irreducible
/// over `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Localization {
    spec: Arc<FieldSpec>,
    /// Elements of S over the prime field, monic, pairwise distinct.
    s_polys: Vec<Poly>,
}

impl Localization {
    pub fn new(spec: &Arc<FieldSpec>, s_polys: Vec<Poly>) -> Result<Localization> {
        for s in &s_polys {
            if !s.spec().is_prime_field() || s.spec().p() != spec.p() {
                return Err(Error::BadLocalization(
                    "S elements must lie in F_p[z]".into(),
                ));
            }
            if !s.is_monic() || s.is_constant() {
                return Err(Error::BadLocalization(format!(
                    "S element {s} must be monic and nonconstant"
                )));
            }
            if !crate::ratfun::factor::remains_irreducible(s, spec)? {
                return Err(Error::BadLocalization(format!(
                    "{s} does not remain irreducible over the working field"
                )));
            }
        }
        for i in 0..s_polys.len() {
            for j in (i + 1)..s_polys.len() {
                if s_polys[i] == s_polys[j] {
                    return Err(Error::BadLocalization("duplicate element in S".into()));
                }
            }
        }
        Ok(Localization {
            spec: Arc::clone(spec),
            s_polys,
        })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// S over the prime field.
    pub fn s_polys(&self) -> &[Poly] {
        &self.s_polys
    }

    /// S lifted to the working field.
    pub fn s_lifted(&self) -> Vec<Poly> {
        self.s_polys.iter().map(|s| s.lift_to(&self.spec)).collect()
    }

    /// The product `e` of all elements of S (over the prime field);
    /// 1 when S is empty.
    pub fn e_product(&self) -> Poly {
        let prime = FieldSpec::prime_field(self.spec.p()).expect("prime");
        self.s_polys
            .iter()
            .fold(Poly::one(&prime), |acc, s| acc.mul(s))
    }

    /// The finite places of R: each element of S, over the working field.
    pub fn places(&self) -> Vec<Place> {
        self.s_lifted().into_iter().map(Place::finite).collect()
    }
}

/// True iff every irreducible factor of the denominator lies in S.
pub fn in_ring(x: &RatFunc, loc: &Localization) -> bool {
    let mut den = x.den().clone();
    for s in loc.s_lifted() {
        loop {
            match den.div_rem(&s) {
                Ok((q, r)) if r.is_zero() => den = q,
                _ => break,
            }
        }
    }
    den.is_constant()
}

/// The multiplicity of each S-element in the denominator of `x`;
/// errors when `x` is not in R.
pub fn denominator_exponents(x: &RatFunc, loc: &Localization) -> Result<Vec<u32>> {
    let mut den = x.den().clone();
    let mut exps = Vec::with_capacity(loc.s_polys().len());
    for s in loc.s_lifted() {
        let mut k = 0;
        loop {
            match den.div_rem(&s) {
                Ok((q, r)) if r.is_zero() => {
                    den = q;
                    k += 1;
                }
                _ => break,
            }
        }
        exps.push(k);
    }
    if den.is_constant() {
        Ok(exps)
    } else {
        Err(Error::NotInRing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    #[test]
    fn add_fractions_char2() {
        let s = f2();
        let z = RatFunc::z(&s);
        let one = RatFunc::one(&s);
        let zp1 = z.add(&one);
        // 1/z + 1/(z+1) = 1/(z^2+z) over F_2
        let lhs = z.inv().unwrap().add(&zp1.inv().unwrap());
        let den = Poly::from_ints(&s, &[0, 1, 1]);
        let expect = RatFunc::new(Poly::one(&s), den).unwrap();
        assert_eq!(lhs, expect);
    }

    #[test]
    fn sub_self_is_zero_and_mul_inverse() {
        let s = f2();
        let x = RatFunc::new(
            Poly::from_ints(&s, &[1, 1, 1]),
            Poly::from_ints(&s, &[0, 1]),
        )
        .unwrap();
        assert!(x.sub(&x).is_zero());
        let z = RatFunc::z(&s);
        let zp1 = z.add(&RatFunc::one(&s));
        let a = zp1.div(&z).unwrap();
        let b = z.div(&zp1).unwrap();
        assert!(a.mul(&b).num().is_one() && a.mul(&b).den().is_one());
    }

    #[test]
    fn ord_examples() {
        let s = f2();
        let z = RatFunc::z(&s);
        let zplace = Place::finite(Poly::z(&s));
        // ord_z(1/z^3) = -3
        let x = z.pow(3).inv().unwrap();
        assert_eq!(ord_at(&x, &zplace), OrdVal::Finite(-3));
        // ord_inf(z^2/(z+1)) = 1 - 2 = -1
        let y = RatFunc::new(
            Poly::from_ints(&s, &[0, 0, 1]),
            Poly::from_ints(&s, &[1, 1]),
        )
        .unwrap();
        assert_eq!(ord_at(&y, &Place::Infinity), OrdVal::Finite(-1));
        // ord of 0 is the marker
        assert_eq!(ord_at(&RatFunc::zero(&s), &zplace), OrdVal::Infinite);
    }

    #[test]
    fn height_examples() {
        let s = f2();
        let y = RatFunc::new(
            Poly::from_ints(&s, &[0, 0, 1]),
            Poly::from_ints(&s, &[1, 1]),
        )
        .unwrap();
        assert_eq!(y.height().unwrap(), 2);
        assert_eq!(RatFunc::one(&s).height().unwrap(), 0);
        assert_eq!(RatFunc::zero(&s).height(), Err(Error::HeightOfZero));
    }

    #[test]
    fn in_ring_membership() {
        let s = f2();
        let loc = Localization::new(&s, vec![Poly::z(&f2())]).unwrap();
        let z = RatFunc::z(&s);
        assert!(in_ring(&z.inv().unwrap(), &loc));
        let zp1 = z.add(&RatFunc::one(&s));
        assert!(!in_ring(&zp1.inv().unwrap(), &loc));
    }
}
