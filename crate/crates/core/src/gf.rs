//! Exact arithmetic in concrete finite fields `F_{p^m}`.
//!
//! A field is described by a [`FieldSpec`]: the characteristic `p`, the
//! extension degree `m` and a monic irreducible modulus of degree `m` over
//! `F_p`. Elements are coordinate vectors in the power basis of the modulus
//! root (written `t`). Prime fields are the case `m = 1` with modulus `t`.
//!
//! All values are immutable after construction.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Description of a concrete finite field `F_{p^m}`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    m: usize,
    /// Monic irreducible modulus over `F_p`, ascending coefficients, length `m + 1`.
    modulus: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Helpers for dense polynomials over F_p represented as ascending
// coefficient vectors; used only for modulus validation.
mod fp {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = (r[r.len() - 1] * lead_inv) % p;
            for i in 0..=db {
                let idx = k + i;
                r[idx] = (r[idx] + p - (c * b[i]) % p) % p;
            }
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        // p is prime and a != 0 mod p
        pow_mod_u64(a % p, p - 2, p)
    }

    pub fn pow_mod_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    /// z^(p^k) mod f, by repeated p-th powering.
    pub fn z_pow_pk_mod(f: &[u64], k: usize, p: u64) -> Vec<u64> {
        let mut cur = if f.len() - 1 == 1 {
            rem(&[0, 1], f, p)
        } else {
            vec![0, 1]
        };
        for _ in 0..k {
            cur = pow_poly_mod(&cur, p, f, p);
        }
        cur
    }

    pub fn pow_poly_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), f, p);
            }
            b = rem(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        acc
    }

    /// Irreducibility of a monic polynomial of degree >= 1 over F_p
    /// (Rabin's test).
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = f.len() - 1;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        // z^(p^d) == z mod f
        let zd = z_pow_pk_mod(f, d, p);
        let mut z_poly = vec![0u64, 1];
        trim(&mut z_poly);
        let mut diff = zd.clone();
        sub_in_place(&mut diff, &z_poly, p);
        if !diff.is_empty() {
            return false;
        }
        // gcd(z^(p^(d/r)) - z, f) = 1 for each prime r | d
        let mut n = d;
        let mut r = 2;
        let mut primes = Vec::new();
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
            let zk = z_pow_pk_mod(f, d / r, p);
            let mut diff = zk;
            sub_in_place(&mut diff, &z_poly, p);
            let g = gcd(&diff, f, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    pub fn sub_in_place(a: &mut Vec<u64>, b: &[u64], p: u64) {
        if a.len() < b.len() {
            a.resize(b.len(), 0);
        }
        for (i, &y) in b.iter().enumerate() {
            a[i] = (a[i] + p - y) % p;
        }
        trim(a);
    }
}

impl FieldSpec {
    /// Builds and validates a field spec. The modulus is given as ascending
    /// coefficients over `F_p` and must be monic of degree `m` and
    /// irreducible.
    pub fn new(p: u64, m: usize, modulus: Vec<u64>) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 || m > MAX_EXT_DEGREE || modulus.len() != m + 1 || modulus[m] != 1 {
            return Err(Error::BadModulus);
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus);
        }
        if !fp::is_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible);
        }
        Ok(Arc::new(FieldSpec { p, m, modulus }))
    }

    /// The prime field `F_p` (modulus `t`).
    pub fn prime_field(p: u64) -> Result<Arc<FieldSpec>> {
        FieldSpec::new(p, 1, vec![0, 1])
    }

    /// Fixed default moduli for small `(p, m)`, Conway-style, so element
    /// encodings are reproducible across runs.
    pub fn default_for(p: u64, m: usize) -> Result<Arc<FieldSpec>> {
        if m == 1 {
            return FieldSpec::prime_field(p);
        }
        let coeffs: Vec<u64> = match (p, m) {
            (2, 2) => vec![1, 1, 1],          // t^2+t+1
            (2, 3) => vec![1, 1, 0, 1],       // t^3+t+1
            (2, 4) => vec![1, 1, 0, 0, 1],    // t^4+t+1
            (3, 2) => vec![2, 2, 1],          // t^2+2t+2
            (3, 3) => vec![1, 2, 0, 1],       // t^3+2t+1
            (5, 2) => vec![2, 4, 1],          // t^2+4t+2
            (7, 2) => vec![3, 6, 1],          // t^2+6t+3
            _ => return Err(Error::NoDefaultModulus(p, m)),
        };
        FieldSpec::new(p, m, coeffs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements, `p^m`.
    pub fn order(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    /// Parses `p=2,m=2,mod=t^2+t+1`. The `mod=` part is optional when a
    /// default modulus is known, and `m` defaults to 1.
    pub fn parse(text: &str) -> Result<Arc<FieldSpec>> {
        let mut p: Option<u64> = None;
        let mut m: usize = 1;
        let mut modulus: Option<String> = None;
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, val) = part.split_once('=').ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("expected key=value, got `{part}`"),
            })?;
            match key.trim() {
                "p" => {
                    p = Some(val.trim().parse().map_err(|_| Error::Parse {
                        pos: 0,
                        msg: format!("bad p `{val}`"),
                    })?)
                }
                "m" => {
                    m = val.trim().parse().map_err(|_| Error::Parse {
                        pos: 0,
                        msg: format!("bad m `{val}`"),
                    })?
                }
                "mod" => modulus = Some(val.trim().to_string()),
                other => {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("unknown field-spec key `{other}`"),
                    })
                }
            }
        }
        let p = p.ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "field spec needs p=".into(),
        })?;
        match modulus {
            None => FieldSpec::default_for(p, m),
            Some(s) => FieldSpec::new(p, m, parse_t_poly(&s, p)?),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "p={}", self.p)
        } else {
            write!(f, "p={},m={},mod={}", self.p, self.m, t_poly_string(&self.modulus))
        }
    }
}

/// Parses a polynomial in `t` over `F_p`, e.g. `t^2+t+1` or `2t+1`.
pub fn parse_t_poly(s: &str, p: u64) -> Result<Vec<u64>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut coeffs: Vec<u64> = Vec::new();
    let mut add = |deg: usize, c: u64| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] = (coeffs[deg] + c) % p;
    };
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty term in t-polynomial".into(),
            });
        }
        let (coef_str, rest) = match term.find('t') {
            None => (term, None),
            Some(i) => (&term[..i], Some(&term[i + 1..])),
        };
        let c: u64 = if coef_str.is_empty() {
            1
        } else {
            let v: u64 = coef_str.trim_end_matches('*').parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad coefficient `{coef_str}`"),
            })?;
            v % p
        };
        match rest {
            None => add(0, c),
            Some("") => add(1, c),
            Some(exp) => {
                let exp = exp.strip_prefix('^').ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("bad exponent in `{term}`"),
                })?;
                let d: usize = exp.parse().map_err(|_| Error::Parse {
                    pos: 0,
                    msg: format!("bad exponent `{exp}`"),
                })?;
                add(d, c);
            }
        }
    }
    fp::trim(&mut coeffs);
    Ok(coeffs)
}

fn t_poly_string(coeffs: &[u64]) -> String {
    if coeffs.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (d, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "t".to_string(),
            (1, c) => format!("{c}t"),
            (d, 1) => format!("t^{d}"),
            (d, c) => format!("{c}t^{d}"),
        };
        parts.push(part);
    }
    parts.join("+")
}

/// Largest supported extension degree; keeps elements inline and
/// allocation-free, which the exhaustive suites rely on.
pub const MAX_EXT_DEGREE: usize = 6;

/// An element of a concrete finite field: `m` residues mod `p`, the
/// coordinates in the power basis of the modulus root. Stored inline;
/// slots at and beyond `m` are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    spec: Arc<FieldSpec>,
    coeffs: [u64; MAX_EXT_DEGREE],
}

impl FieldElem {
    pub fn from_coeffs(spec: &Arc<FieldSpec>, coeffs: Vec<u64>) -> FieldElem {
        let mut data = [0u64; MAX_EXT_DEGREE];
        for (slot, c) in data.iter_mut().zip(coeffs) {
            *slot = c % spec.p;
        }
        for slot in data.iter_mut().skip(spec.m) {
            *slot = 0;
        }
        FieldElem {
            spec: Arc::clone(spec),
            coeffs: data,
        }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> FieldElem {
        FieldElem {
            spec: Arc::clone(spec),
            coeffs: [0; MAX_EXT_DEGREE],
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> FieldElem {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = 1;
        FieldElem {
            spec: Arc::clone(spec),
            coeffs: c,
        }
    }

    /// Embeds an integer via `n mod p`.
    pub fn from_u64(spec: &Arc<FieldSpec>, n: u64) -> FieldElem {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = n % spec.p;
        FieldElem {
            spec: Arc::clone(spec),
            coeffs: c,
        }
    }

    /// The element with index `idx` in the canonical enumeration:
    /// base-`p` digits of `idx`, least significant digit first.
    pub fn from_index(spec: &Arc<FieldSpec>, mut idx: u64) -> FieldElem {
        let mut c = [0; MAX_EXT_DEGREE];
        for slot in c.iter_mut().take(spec.m) {
            *slot = idx % spec.p;
            idx /= spec.p;
        }
        FieldElem {
            spec: Arc::clone(spec),
            coeffs: c,
        }
    }

    pub fn index(&self) -> u64 {
        let mut idx = 0u64;
        for &c in self.coeffs[..self.spec.m].iter().rev() {
            idx = idx * self.spec.p + c;
        }
        idx
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs[..self.spec.m]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn check_same_spec(&self, other: &FieldElem) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch(
                self.spec.to_string(),
                other.spec.to_string(),
            ))
        }
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        debug_assert!(self.check_same_spec(other).is_ok());
        let p = self.spec.p;
        let mut c = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.spec.m {
            c[i] = (self.coeffs[i] + other.coeffs[i]) % p;
        }
        FieldElem {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        debug_assert!(self.check_same_spec(other).is_ok());
        let p = self.spec.p;
        let mut c = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.spec.m {
            c[i] = (self.coeffs[i] + p - other.coeffs[i]) % p;
        }
        FieldElem {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn neg(&self) -> FieldElem {
        let p = self.spec.p;
        let mut c = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.spec.m {
            c[i] = (p - self.coeffs[i]) % p;
        }
        FieldElem {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        debug_assert!(self.check_same_spec(other).is_ok());
        let p = self.spec.p;
        let m = self.spec.m;
        if m == 1 {
            let mut c = [0u64; MAX_EXT_DEGREE];
            c[0] = self.coeffs[0] * other.coeffs[0] % p;
            return FieldElem {
                spec: Arc::clone(&self.spec),
                coeffs: c,
            };
        }
        // schoolbook product, then reduction by the monic modulus, all on
        // the stack
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..m {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + self.coeffs[i] * other.coeffs[j]) % p;
            }
        }
        let modulus = &self.spec.modulus;
        for k in (m..=(2 * m - 2)).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..m {
                let idx = k - m + i;
                prod[idx] = (prod[idx] + p * p - c * modulus[i] % p) % p;
            }
        }
        let mut c = [0u64; MAX_EXT_DEGREE];
        c[..m].copy_from_slice(&prod[..m]);
        FieldElem {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a^(p^m - 2)
        Ok(self.pow(self.spec.order() - 2))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> FieldElem {
        let mut acc = FieldElem::one(&self.spec);
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

    /// The Frobenius map `x -> x^p`.
    pub fn frobenius(&self) -> FieldElem {
        self.pow(self.spec.p)
    }

    /// The inverse of Frobenius; total because `x -> x^p` is a bijection
    /// on a finite field (`x^(p^(m-1))` inverts it).
    pub fn pth_root(&self) -> FieldElem {
        let mut e = 1u64;
        for _ in 0..self.spec.m.saturating_sub(1) {
            e *= self.spec.p;
        }
        self.pow(e)
    }

    /// Applies `pth_root` `s` times, i.e. the exact `p^s`-th root.
    pub fn qth_root(&self, s: u32) -> FieldElem {
        let mut x = self.clone();
        for _ in 0..s {
            x = x.pth_root();
        }
        x
    }
}

/// Binary field operation dispatch used by the CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Applies a field operation with full spec checking; `Inv` and `Neg`
/// ignore the second operand.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    a.check_same_spec(b)?;
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(a.neg()),
    }
}

/// All `p^m` elements of the field, in the canonical index order.
pub fn enumerate_field(spec: &Arc<FieldSpec>) -> Vec<FieldElem> {
    (0..spec.order())
        .map(|i| FieldElem::from_index(spec, i))
        .collect()
}

fn trimmed(v: &[u64]) -> Vec<u64> {
    let mut out = v.to_vec();
    fp::trim(&mut out);
    out
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.is_prime_field() {
            return write!(f, "{}", self.coeffs[0]);
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", t_poly_string(&trimmed(&self.coeffs)))
    }
}

/// Parses a field element: an integer for prime fields, `t`-polynomial
/// notation for extensions.
pub fn parse_field_elem(s: &str, spec: &Arc<FieldSpec>) -> Result<FieldElem> {
    let coeffs = parse_t_poly(s, spec.p)?;
    if coeffs.len() > spec.m {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("element degree exceeds field degree {}", spec.m),
        });
    }
    Ok(FieldElem::from_coeffs(spec, coeffs))
}
