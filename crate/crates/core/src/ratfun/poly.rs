//! Dense univariate polynomials over a finite field.
//!
//! Canonical form: no trailing zero coefficient; the zero polynomial has an
//! empty coefficient vector. The field spec travels with each value.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    spec: Arc<FieldSpec>,
    /// Ascending powers of z, no trailing zeros.
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(spec: &Arc<FieldSpec>, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly {
            spec: Arc::clone(spec),
            coeffs,
        }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Poly {
        Poly {
            spec: Arc::clone(spec),
            coeffs: Vec::new(),
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Poly {
        Poly::constant(FieldElem::one(spec))
    }

    pub fn constant(c: FieldElem) -> Poly {
        let spec = Arc::clone(c.spec());
        Poly::new(&spec, vec![c])
    }

    /// The monomial `c * z^d`.
    pub fn monomial(c: FieldElem, d: usize) -> Poly {
        let spec = Arc::clone(c.spec());
        let mut coeffs = vec![FieldElem::zero(&spec); d + 1];
        coeffs[d] = c;
        Poly::new(&spec, coeffs)
    }

    /// The variable `z`.
    pub fn z(spec: &Arc<FieldSpec>) -> Poly {
        Poly::monomial(FieldElem::one(spec), 1)
    }

    /// Builds from integer coefficients (each reduced mod p), ascending.
    pub fn from_ints(spec: &Arc<FieldSpec>, ints: &[u64]) -> Poly {
        let coeffs = ints.iter().map(|&n| FieldElem::from_u64(spec, n)).collect();
        Poly::new(spec, coeffs)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of `z^d` (zero if beyond the degree).
    pub fn coeff(&self, d: usize) -> FieldElem {
        self.coeffs
            .get(d)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(&self.spec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial reports 0 together with `is_zero`.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading_coeff(&self) -> FieldElem {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(&self.spec))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::new(&self.spec, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.spec, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.spec);
        }
        let mut out = vec![FieldElem::zero(&self.spec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(&self.spec, out)
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        Poly::new(&self.spec, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::zero(&self.spec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(&self.spec, coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.spec);
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

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead_inv = d.leading_coeff().inv()?;
        let mut q = vec![FieldElem::zero(&self.spec); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd || (dd == 0 && !r.is_empty()) {
            if r.len() < dd + 1 {
                break;
            }
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap().mul(&lead_inv);
            q[k] = c.clone();
            for i in 0..=dd {
                let sub = c.mul(&d.coeff(i));
                r[k + i] = r[k + i].sub(&sub);
            }
            while r.last().map(|c| c.is_zero()).unwrap_or(false) {
                r.pop();
            }
        }
        Ok((Poly::new(&self.spec, q), Poly::new(&self.spec, r)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Internal("non-exact polynomial division".into()))
        }
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other
            .div_rem(self)
            .map(|(_, r)| r.is_zero())
            .unwrap_or(false)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, u, v)` with `u*self + v*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let spec = &self.spec;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(spec), Poly::zero(spec));
        let (mut t0, mut t1) = (Poly::zero(spec), Poly::one(spec));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = r0.leading_coeff().inv().expect("nonzero lead");
        (r0.scale(&c), s0.scale(&c), t0.scale(&c))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.leading_coeff().inv().expect("nonzero lead");
        self.scale(&c)
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Multiplicity of the monic irreducible `q` in `self` (0 when coprime).
    pub fn multiplicity_of(&self, q: &Poly) -> u32 {
        assert!(!q.is_constant(), "place must be nonconstant");
        if self.is_zero() {
            return 0;
        }
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            match cur.div_rem(q) {
                Ok((quot, r)) if r.is_zero() => {
                    k += 1;
                    cur = quot;
                }
                _ => return k,
            }
        }
    }

    /// Coefficient-wise embedding into a larger field with the same `p`
    /// (constants of `F_p` map to multiples of 1).
    pub fn lift_to(&self, spec: &Arc<FieldSpec>) -> Poly {
        assert_eq!(self.spec.p(), spec.p(), "lift requires equal characteristic");
        assert!(
            self.spec.is_prime_field(),
            "lift source must be the prime field"
        );
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| FieldElem::from_u64(spec, c.coeffs()[0]))
            .collect();
        Poly::new(spec, coeffs)
    }

    /// Inverse of `lift_to` when every coefficient lies in the prime field.
    pub fn restrict_to_prime(&self) -> Result<Poly> {
        let prime = FieldSpec::prime_field(self.spec.p())?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.coeffs()[1..].iter().any(|&x| x != 0) {
                return Err(Error::Internal(
                    "coefficient outside the prime field".into(),
                ));
            }
            coeffs.push(FieldElem::from_u64(&prime, c.coeffs()[0]));
        }
        Ok(Poly::new(&prime, coeffs))
    }

    pub fn has_prime_coeffs(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.coeffs()[1..].iter().all(|&x| x == 0))
    }

    /// Exact `p`-th root of a polynomial of the form `g(z^p)`; coefficients
    /// get their (total) inverse Frobenius.
    pub fn pth_root(&self) -> Result<Poly> {
        let p = self.spec.p() as usize;
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                out.push(c.pth_root());
            } else if !c.is_zero() {
                return Err(Error::Internal("polynomial is not a p-th power".into()));
            }
        }
        Ok(Poly::new(&self.spec, out))
    }

    /// Substitutes `z -> z^k`.
    pub fn compose_z_pow(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::zero(&self.spec); self.degree() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly::new(&self.spec, coeffs)
    }

    /// Substitutes `z -> q(z)`.
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(q).add(&Poly::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            let needs_parens = cs.contains('+');
            match d {
                0 => {
                    if needs_parens {
                        write!(f, "({cs})")?;
                    } else {
                        write!(f, "{cs}")?;
                    }
                }
                _ => {
                    if !c.is_one() {
                        if needs_parens {
                            write!(f, "({cs})*")?;
                        } else {
                            write!(f, "{cs}*")?;
                        }
                    }
                    if d == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
