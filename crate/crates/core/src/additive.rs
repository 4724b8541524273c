//! Additive polynomials `f(x) = sum_i (b_i x_i^(p^s(i)) + sum_j c_(i,j)
//! x_i^(p^(s(i)-j)))` with coefficients in `F_p[z]`, over two sorts of
//! variables: ring variables (ranging over `R`) and field variables
//! (ranging over `F`). Includes symbolic composition, classification, and
//! proper transformations with constructive surjectivity witnesses.

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::{Localization, RatFunc};
use crate::textio::parse_fp_poly;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Ring,
    Field,
}

/// A sorted variable; ring variables print as `x1, x2, ...`, field
/// variables as `a1, a2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub sort: Sort,
    pub index: u32,
}

impl Var {
    pub fn ring(index: u32) -> Var {
        Var {
            sort: Sort::Ring,
            index,
        }
    }

    pub fn field(index: u32) -> Var {
        Var {
            sort: Sort::Field,
            index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sort {
            Sort::Ring => write!(f, "x{}", self.index + 1),
            Sort::Field => write!(f, "a{}", self.index + 1),
        }
    }
}

/// Parses `x3` / `a1` into a variable.
pub fn parse_var(name: &str) -> Result<Var> {
    let (sort, rest) = match name.as_bytes().first() {
        Some(b'x') => (Sort::Ring, &name[1..]),
        Some(b'a') => (Sort::Field, &name[1..]),
        _ => {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("variable must start with x or a: `{name}`"),
            })
        }
    };
    let n: u32 = rest.parse().map_err(|_| Error::Parse {
        pos: 0,
        msg: format!("bad variable index in `{name}`"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            pos: 0,
            msg: "variable indices start at 1".into(),
        });
    }
    Ok(Var { sort, index: n - 1 })
}

/// An additive polynomial, stored sparsely: for each variable, the map
/// from level `k` to the nonzero coefficient of `x^(p^k)` in `F_p[z]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivePoly {
    p: u64,
    terms: BTreeMap<Var, BTreeMap<u32, Poly>>,
}

impl AdditivePoly {
    pub fn zero(p: u64) -> AdditivePoly {
        AdditivePoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    /// The single term `coeff * v^(p^level)`.
    pub fn term(p: u64, v: Var, level: u32, coeff: Poly) -> AdditivePoly {
        let mut out = AdditivePoly::zero(p);
        out.add_term(v, level, coeff);
        out
    }

    /// The identity polynomial `v`.
    pub fn var(p: u64, v: Var) -> AdditivePoly {
        let prime = FieldSpec::prime_field(p).expect("prime");
        AdditivePoly::term(p, v, 0, Poly::one(&prime))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prime_spec(&self) -> Arc<FieldSpec> {
        FieldSpec::prime_field(self.p).expect("prime")
    }

    pub fn add_term(&mut self, v: Var, level: u32, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(coeff.spec().is_prime_field() && coeff.spec().p() == self.p);
        let slot = self.terms.entry(v).or_default();
        let new = match slot.get(&level) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if new.is_zero() {
            slot.remove(&level);
        } else {
            slot.insert(level, new);
        }
        if self.terms.get(&v).map(|m| m.is_empty()).unwrap_or(false) {
            self.terms.remove(&v);
        }
    }

    pub fn add(&self, other: &AdditivePoly) -> AdditivePoly {
        debug_assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (v, levels) in &other.terms {
            for (k, c) in levels {
                out.add_term(*v, *k, c.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> AdditivePoly {
        let mut out = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            for (k, c) in levels {
                out.add_term(*v, *k, c.neg());
            }
        }
        out
    }

    pub fn sub(&self, other: &AdditivePoly) -> AdditivePoly {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by a fixed element of `F_p[z]`;
    /// additivity is preserved.
    pub fn scale(&self, c: &Poly) -> AdditivePoly {
        let mut out = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            for (k, coeff) in levels {
                out.add_term(*v, *k, coeff.mul(c));
            }
        }
        out
    }

    /// The composition `frob^k . f`, i.e. the additive polynomial whose
    /// value is `f(x)^(p^k)`.
    pub fn frob_twist(&self, k: u32) -> AdditivePoly {
        let e = self.p.pow(k);
        let mut out = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            for (lvl, coeff) in levels {
                out.add_term(*v, lvl + k, coeff.pow(e));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        self.terms.keys().copied().collect()
    }

    pub fn ring_vars(&self) -> Vec<Var> {
        self.terms
            .keys()
            .copied()
            .filter(|v| v.sort == Sort::Ring)
            .collect()
    }

    pub fn field_vars(&self) -> Vec<Var> {
        self.terms
            .keys()
            .copied()
            .filter(|v| v.sort == Sort::Field)
            .collect()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.terms.contains_key(&v)
    }

    pub fn levels_of(&self, v: Var) -> Option<&BTreeMap<u32, Poly>> {
        self.terms.get(&v)
    }

    /// `s(i)`: the top level of the variable, when present.
    pub fn var_level(&self, v: Var) -> Option<u32> {
        self.terms.get(&v).and_then(|m| m.keys().max().copied())
    }

    /// Leading coefficient `b_i` of the variable, when present.
    pub fn leading_coeff(&self, v: Var) -> Option<&Poly> {
        let lvl = self.var_level(v)?;
        self.terms.get(&v).and_then(|m| m.get(&lvl))
    }

    /// Degree `max_i p^(s(i))`; 1 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        let max_level = self
            .terms
            .values()
            .flat_map(|m| m.keys().copied())
            .max()
            .unwrap_or(0);
        self.p.pow(max_level)
    }

    pub fn max_level(&self) -> u32 {
        self.terms
            .values()
            .flat_map(|m| m.keys().copied())
            .max()
            .unwrap_or(0)
    }

    /// Largest z-degree over all coefficients (0 for the zero polynomial).
    pub fn max_coeff_degree(&self) -> usize {
        self.terms
            .values()
            .flat_map(|m| m.values())
            .map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Exact evaluation; every variable of the polynomial must be assigned.
    /// Coefficients are lifted into the working field of `spec`.
    pub fn eval(
        &self,
        assignment: &BTreeMap<Var, RatFunc>,
        spec: &Arc<FieldSpec>,
    ) -> Result<RatFunc> {
        let mut acc = RatFunc::zero(spec);
        for (v, levels) in &self.terms {
            let x = assignment
                .get(v)
                .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
            for (k, coeff) in levels {
                let xp = x.pow(self.p.pow(*k));
                acc = acc.add(&xp.scale_poly(&coeff.lift_to(spec)));
            }
        }
        Ok(acc)
    }

    /// Symbolic substitution: variables in the map are replaced by the given
    /// additive polynomials, others stay. The result evaluates at any point
    /// to the nested evaluation.
    pub fn substitute(&self, subst: &BTreeMap<Var, AdditivePoly>) -> AdditivePoly {
        let mut out = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            for (k, coeff) in levels {
                match subst.get(v) {
                    None => out.add_term(*v, *k, coeff.clone()),
                    Some(repl) => {
                        let twisted = repl.frob_twist(*k).scale(coeff);
                        out = out.add(&twisted);
                    }
                }
            }
        }
        out
    }

    /// Splits into the part over ring variables and the part over field
    /// variables.
    pub fn split_sorts(&self) -> (AdditivePoly, AdditivePoly) {
        let mut ring = AdditivePoly::zero(self.p);
        let mut field = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            for (k, c) in levels {
                match v.sort {
                    Sort::Ring => ring.add_term(*v, *k, c.clone()),
                    Sort::Field => field.add_term(*v, *k, c.clone()),
                }
            }
        }
        (ring, field)
    }

    /// Renames variables according to the map (missing variables stay).
    pub fn rename_vars(&self, map: &BTreeMap<Var, Var>) -> AdditivePoly {
        let mut out = AdditivePoly::zero(self.p);
        for (v, levels) in &self.terms {
            let w = map.get(v).copied().unwrap_or(*v);
            for (k, c) in levels {
                out.add_term(w, *k, c.clone());
            }
        }
        out
    }

    /// The sum of the per-variable leading terms `b_i x_i^(p^(s_i))`.
    pub fn leading_part(&self) -> AdditivePoly {
        let mut out = AdditivePoly::zero(self.p);
        for v in self.vars() {
            let lvl = self.var_level(v).unwrap();
            out.add_term(v, lvl, self.leading_coeff(v).unwrap().clone());
        }
        out
    }

    /// Everything below the leading terms.
    pub fn lower_part(&self) -> AdditivePoly {
        self.sub(&self.leading_part())
    }

    /// First ring-variable index not used by this polynomial.
    pub fn fresh_ring_index(&self) -> u32 {
        self.terms
            .keys()
            .filter(|v| v.sort == Sort::Ring)
            .map(|v| v.index + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn fresh_field_index(&self) -> u32 {
        self.terms
            .keys()
            .filter(|v| v.sort == Sort::Field)
            .map(|v| v.index + 1)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for AdditivePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (v, levels) in &self.terms {
            for (k, c) in levels.iter().rev() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if !c.is_one() {
                    write!(f, "poly{{{c}}}*")?;
                }
                let e = self.p.pow(*k);
                if e == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses the additive-polynomial syntax
/// `poly{z}*x1^2 + x1 + poly{1+z}*a1`; exponents must be powers of `p`.
pub fn parse_additive(text: &str, p: u64) -> Result<AdditivePoly> {
    let mut out = AdditivePoly::zero(p);
    let prime = FieldSpec::prime_field(p)?;
    for raw_term in split_top_level_plus(text) {
        let term = raw_term.trim();
        if term.is_empty() || term == "0" {
            continue;
        }
        let (coeff, rest) = if let Some(stripped) = term.strip_prefix("poly{") {
            let close = stripped.find('}').ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "unterminated poly{...}".into(),
            })?;
            let c = parse_fp_poly(&stripped[..close], p)?;
            let rest = stripped[close + 1..]
                .trim_start()
                .strip_prefix('*')
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "expected `*` after poly{...}".into(),
                })?;
            (c, rest.trim())
        } else {
            (Poly::one(&prime), term)
        };
        let (var_text, exp) = match rest.find('^') {
            None => (rest, 1u64),
            Some(i) => {
                let e: u64 = rest[i + 1..].trim().parse().map_err(|_| Error::Parse {
                    pos: 0,
                    msg: format!("bad exponent in `{rest}`"),
                })?;
                (&rest[..i], e)
            }
        };
        let v = parse_var(var_text.trim())?;
        let mut level = 0u32;
        let mut e = exp;
        while e > 1 {
            if e % p != 0 {
                return Err(Error::NotPPower(exp, p));
            }
            e /= p;
            level += 1;
        }
        if e != 1 {
            return Err(Error::NotPPower(exp, p));
        }
        out.add_term(v, level, coeff);
    }
    Ok(out)
}

fn split_top_level_plus(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            '+' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Classification flags of an additive polynomial over its ring variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    /// All per-variable degrees equal.
    pub same_degree: bool,
    /// Same degree and leading coefficients independent over `V_s(F_p)`.
    pub normalized: bool,
    /// Normalized with a full basis of leading coefficients (`n = p^s`).
    pub p_basic: bool,
    /// Normalized with leading-coefficient degrees pairwise distinct mod `p^s`.
    pub strongly_normalized: bool,
}

/// Computes the classification flags. The zero polynomial counts as
/// (vacuously) normalized and strongly normalized but not p-basic.
pub fn classify(f: &AdditivePoly) -> Result<Classification> {
    let vars = f.vars();
    if vars.is_empty() {
        return Ok(Classification {
            same_degree: true,
            normalized: true,
            p_basic: false,
            strongly_normalized: true,
        });
    }
    let levels: Vec<u32> = vars.iter().map(|v| f.var_level(*v).unwrap()).collect();
    let s = levels[0];
    let same_degree = levels.iter().all(|&l| l == s);
    if !same_degree {
        return Ok(Classification {
            same_degree,
            normalized: false,
            p_basic: false,
            strongly_normalized: false,
        });
    }
    let q = f.p().pow(s);
    let prime = f.prime_spec();
    let leads: Vec<RatFunc> = vars
        .iter()
        .map(|v| RatFunc::from_poly(f.leading_coeff(*v).unwrap().clone()))
        .collect();
    let normalized = if vars.len() as u64 > q {
        false
    } else {
        crate::independence::wronskian_certificate(&leads, s)?.is_some()
    };
    let p_basic = normalized && vars.len() as u64 == q;
    let strongly_normalized = normalized && {
        let degs: Vec<u64> = vars
            .iter()
            .map(|v| f.leading_coeff(*v).unwrap().degree() as u64 % q)
            .collect();
        let mut sorted = degs.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    };
    let _ = prime;
    Ok(Classification {
        same_degree,
        normalized,
        p_basic,
        strongly_normalized,
    })
}

/// The values of a preimage point: both sorts in a single assignment;
/// field-variable values are constants of `F`.
pub type Assignment = BTreeMap<Var, RatFunc>;

type WitnessFn = Arc<dyn Fn(&Assignment, &Localization) -> Result<Assignment> + Send + Sync>;

/// A tuple of additive polynomials inducing a surjective map
/// `R^m x F^mu -> R^n`, with a constructive preimage procedure attached at
/// creation. There is no raw constructor: transformations come from the
/// pipeline steps that can witness surjectivity.
#[derive(Clone)]
pub struct ProperTransformation {
    /// Codomain variable -> expression in domain variables.
    components: BTreeMap<Var, AdditivePoly>,
    witness: WitnessFn,
}

impl fmt::Debug for ProperTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProperTransformation")
            .field("components", &self.components)
            .finish_non_exhaustive()
    }
}

impl ProperTransformation {
    /// The identity on the given ring variables.
    pub fn identity(p: u64, vars: &[Var]) -> ProperTransformation {
        let mut components = BTreeMap::new();
        for &v in vars {
            components.insert(v, AdditivePoly::var(p, v));
        }
        ProperTransformation {
            components,
            witness: Arc::new(|target: &Assignment, _loc: &Localization| Ok(target.clone())),
        }
    }

    /// Internal constructor for pipeline steps; the witness must compute an
    /// exact preimage for every target tuple over R.
    pub(crate) fn from_parts(
        components: BTreeMap<Var, AdditivePoly>,
        witness: WitnessFn,
    ) -> ProperTransformation {
        ProperTransformation {
            components,
            witness,
        }
    }

    pub fn components(&self) -> &BTreeMap<Var, AdditivePoly> {
        &self.components
    }

    /// Domain variables, both sorts, in order.
    pub fn domain_vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self
            .components
            .values()
            .flat_map(|c| c.vars())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Evaluates every component at the given domain assignment.
    pub fn apply(&self, point: &Assignment, spec: &Arc<FieldSpec>) -> Result<Assignment> {
        let mut out = BTreeMap::new();
        for (v, comp) in &self.components {
            out.insert(*v, comp.eval(point, spec)?);
        }
        Ok(out)
    }

    /// Constructive preimage; the result is verified to map back exactly,
    /// a failure indicating a non-proper construction is an internal error.
    pub fn preimage(&self, target: &Assignment, loc: &Localization) -> Result<Assignment> {
        let mut point = (self.witness)(target, loc)?;
        // Domain variables the components do not mention may be absent;
        // fill them with zero so downstream evaluation is total.
        for v in self.domain_vars() {
            point
                .entry(v)
                .or_insert_with(|| RatFunc::zero(loc.spec()));
        }
        let back = self.apply(&point, loc.spec())?;
        for (v, want) in target {
            if self.components.contains_key(v) {
                let got = back.get(v).expect("component evaluated");
                if got != want {
                    return Err(Error::Internal(format!(
                        "witness failed to invert component {v}"
                    )));
                }
            }
        }
        Ok(point)
    }

    /// Composition `self . inner`: `inner` rewrites the domain variables of
    /// `self`. Witnesses compose in the reverse order.
    pub fn compose(&self, inner: &ProperTransformation) -> ProperTransformation {
        let inner_components = inner.components.clone();
        let mut components = BTreeMap::new();
        for (v, comp) in &self.components {
            components.insert(*v, comp.substitute(&inner_components));
        }
        let outer_w = Arc::clone(&self.witness);
        let inner_w = Arc::clone(&inner.witness);
        let outer_components = self.components.clone();
        let witness: WitnessFn = Arc::new(move |target: &Assignment, loc: &Localization| {
            let mid = outer_w(target, loc)?;
            // Only the ring variables that `inner` actually rewrites flow
            // through its witness; field values and untouched variables pass.
            let mut inner_target = BTreeMap::new();
            for v in outer_components.values().flat_map(|c| c.vars()) {
                if inner_components.contains_key(&v) {
                    if let Some(val) = mid.get(&v) {
                        inner_target.insert(v, val.clone());
                    }
                }
            }
            let mut point = inner_w(&inner_target, loc)?;
            for (v, val) in mid {
                if !inner_components.contains_key(&v) {
                    point.insert(v, val);
                }
            }
            Ok(point)
        });
        ProperTransformation {
            components,
            witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Rng;

    fn prime(p: u64) -> Arc<FieldSpec> {
        FieldSpec::prime_field(p).unwrap()
    }

    #[test]
    fn eval_simple() {
        let s = prime(2);
        // f(x) = z*x^2 + x at x = z over F_2 gives z^3 + z
        let f = parse_additive("poly{z}*x1^2 + x1", 2).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert(Var::ring(0), RatFunc::z(&s));
        let v = f.eval(&asg, &s).unwrap();
        assert_eq!(v, RatFunc::from_poly(Poly::from_ints(&s, &[0, 1, 0, 1])));
    }

    #[test]
    fn eval_at_zero_is_zero() {
        let s = prime(3);
        let f = parse_additive("poly{1+z}*x1^3 + x2 + poly{z^2}*a1^9", 3).unwrap();
        let mut asg = BTreeMap::new();
        for v in f.vars() {
            asg.insert(v, RatFunc::zero(&s));
        }
        assert!(f.eval(&asg, &s).unwrap().is_zero());
    }

    #[test]
    fn additivity_random() {
        let s = prime(2);
        let f = parse_additive("poly{z}*x1^4 + x1^2 + poly{1+z^2}*x2^2 + x2", 2).unwrap();
        let mut rng = Rng::new(11);
        for _ in 0..50 {
            let mut a = BTreeMap::new();
            let mut b = BTreeMap::new();
            let mut ab = BTreeMap::new();
            for v in f.vars() {
                let va = rng.ratfunc(&s, 4);
                let vb = rng.ratfunc(&s, 4);
                ab.insert(v, va.add(&vb));
                a.insert(v, va);
                b.insert(v, vb);
            }
            let lhs = f.eval(&ab, &s).unwrap();
            let rhs = f.eval(&a, &s).unwrap().add(&f.eval(&b, &s).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn composition_frobenius_squares() {
        // x^p composed with x^p is x^(p^2)
        let f = parse_additive("x1^2", 2).unwrap();
        let mut subst = BTreeMap::new();
        subst.insert(Var::ring(0), parse_additive("x1^2", 2).unwrap());
        let g = f.substitute(&subst);
        assert_eq!(g, parse_additive("x1^4", 2).unwrap());
    }

    #[test]
    fn composition_matches_pointwise() {
        let s = prime(3);
        let f = parse_additive("poly{z}*x1^3 + x1 + poly{2}*x2^9", 3).unwrap();
        let mut subst = BTreeMap::new();
        subst.insert(
            Var::ring(0),
            parse_additive("poly{1+z}*x1^3 + x2", 3).unwrap(),
        );
        subst.insert(Var::ring(1), parse_additive("poly{z^2}*x1", 3).unwrap());
        let g = f.substitute(&subst);
        let mut rng = Rng::new(5);
        for _ in 0..20 {
            let mut point = BTreeMap::new();
            for v in [Var::ring(0), Var::ring(1)] {
                point.insert(v, rng.ratfunc(&s, 3));
            }
            let direct = g.eval(&point, &s).unwrap();
            let mut mid = BTreeMap::new();
            for (v, sub) in &subst {
                mid.insert(*v, sub.eval(&point, &s).unwrap());
            }
            let nested = f.eval(&mid, &s).unwrap();
            assert_eq!(direct, nested);
        }
    }

    #[test]
    fn degree_and_parse_validation() {
        let f = parse_additive("x1^2 + x2", 2).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(parse_additive("x1", 2).unwrap().degree(), 1);
        assert!(matches!(
            parse_additive("x1^3", 2),
            Err(Error::NotPPower(3, 2))
        ));
    }

    #[test]
    fn display_parse_roundtrip() {
        for (text, p) in [
            ("poly{z}*x1^2 + x1 + poly{1+z}*a1", 2u64),
            ("poly{1+z^3}*x1^9 + poly{2*z}*x2^3 + a2^3", 3),
        ] {
            let f = parse_additive(text, p).unwrap();
            let back = parse_additive(&f.to_string(), p).unwrap();
            assert_eq!(f, back);
        }
    }

    #[test]
    fn classify_examples() {
        // x1^2 + z x2^2: strongly normalized and p-basic over F_2
        let f = parse_additive("x1^2 + poly{z}*x2^2", 2).unwrap();
        let c = classify(&f).unwrap();
        assert!(c.normalized && c.p_basic && c.strongly_normalized);

        // x1^2 + z^2 x2^2: {1, z^2} dependent over V_1
        let f = parse_additive("x1^2 + poly{z^2}*x2^2", 2).unwrap();
        let c = classify(&f).unwrap();
        assert!(c.same_degree && !c.normalized && !c.strongly_normalized);

        // single variable x^p: normalized, not p-basic
        let f = parse_additive("x1^2", 2).unwrap();
        let c = classify(&f).unwrap();
        assert!(c.normalized && !c.p_basic && c.strongly_normalized);
    }

    #[test]
    fn classify_stable_under_permutation() {
        let f = parse_additive("x1^2 + poly{z}*x2^2 + poly{z^3}*x3^2", 2).unwrap();
        let mut map = BTreeMap::new();
        map.insert(Var::ring(0), Var::ring(2));
        map.insert(Var::ring(2), Var::ring(0));
        let g = f.rename_vars(&map);
        assert_eq!(classify(&f).unwrap(), classify(&g).unwrap());
    }

    #[test]
    fn identity_transformation_roundtrip() {
        let s = prime(2);
        let loc = Localization::new(&s, vec![Poly::z(&prime(2))]).unwrap();
        let xi = ProperTransformation::identity(2, &[Var::ring(0), Var::ring(1)]);
        let mut target = BTreeMap::new();
        target.insert(Var::ring(0), RatFunc::z(&s).inv().unwrap());
        target.insert(Var::ring(1), RatFunc::one(&s));
        let pre = xi.preimage(&target, &loc).unwrap();
        assert_eq!(pre, target);
    }

    #[test]
    fn frobenius_twist_matches_eval() {
        let s = prime(2);
        let f = parse_additive("poly{z}*x1^2 + x1", 2).unwrap();
        let g = f.frob_twist(1);
        let mut asg = BTreeMap::new();
        asg.insert(Var::ring(0), RatFunc::z(&s).add(&RatFunc::one(&s)));
        let lhs = g.eval(&asg, &s).unwrap();
        let rhs = f.eval(&asg, &s).unwrap().pow(2);
        assert_eq!(lhs, rhs);
    }
}
