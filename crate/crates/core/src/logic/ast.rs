//! Terms and formulas of the languages `L_p`, `L_p(z)` and `L_p(z)^e`.
//!
//! Terms are built from 0, 1, sorted variables, addition, the Frobenius
//! map and multiplication by `z`; multiplication by a fixed element of
//! `F_p[z]` is derived shorthand (it expands to the core symbols).
//! Formulas add equality, the `in F` predicate, the `P_sigma` predicates
//! indexed by `L_p`-formulas, the connectives and sorted quantifiers.

use crate::additive::{AdditivePoly, Sort, Var};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::RatFunc;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Zero,
    One,
    Var(Var),
    Add(Box<Term>, Box<Term>),
    /// `t^p`.
    Frob(Box<Term>),
    /// `z * t`.
    MulZ(Box<Term>),
    /// Shorthand `c * t` for a fixed `c` in `F_p[z]`; expands to the core
    /// symbols.
    MulPoly(Poly, Box<Term>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn add(a: Term, b: Term) -> Term {
        match (&a, &b) {
            (Term::Zero, _) => b,
            (_, Term::Zero) => a,
            _ => Term::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn frob(t: Term) -> Term {
        if t == Term::Zero {
            Term::Zero
        } else {
            Term::Frob(Box::new(t))
        }
    }

    pub fn mulz(t: Term) -> Term {
        if t == Term::Zero {
            Term::Zero
        } else {
            Term::MulZ(Box::new(t))
        }
    }

    pub fn mul_poly(c: &Poly, t: Term) -> Term {
        if c.is_zero() || t == Term::Zero {
            Term::Zero
        } else if c.is_one() {
            t
        } else {
            Term::MulPoly(c.clone(), Box::new(t))
        }
    }

    /// `n * t` as repeated addition (reduced mod p).
    pub fn nat_mul(n: u64, t: Term, p: u64) -> Term {
        let n = n % p;
        let mut acc = Term::Zero;
        for _ in 0..n {
            acc = Term::add(acc, t.clone());
        }
        acc
    }

    /// `-t = (p-1) * t`.
    pub fn negate(t: Term, p: u64) -> Term {
        Term::nat_mul(p - 1, t, p)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Add(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Frob(t) | Term::MulZ(t) | Term::MulPoly(_, t) => t.collect_vars(out),
        }
    }

    /// True when the term's value lies in `F` for field-valued variables:
    /// no `z`-multiplication and only field-sorted variables.
    pub fn is_f_pure(&self) -> bool {
        match self {
            Term::Zero | Term::One => true,
            Term::Var(v) => v.sort == Sort::Field,
            Term::Add(a, b) => a.is_f_pure() && b.is_f_pure(),
            Term::Frob(t) => t.is_f_pure(),
            Term::MulZ(_) => false,
            Term::MulPoly(c, t) => c.is_constant() && t.is_f_pure(),
        }
    }

    /// True for the `L_p` fragment: like `is_f_pure`, with the shorthand
    /// restricted to constants (which expand to repeated addition).
    pub fn is_lp(&self) -> bool {
        self.is_f_pure()
    }

    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Zero | Term::One => self.clone(),
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Add(a, b) => Term::add(a.substitute(map), b.substitute(map)),
            Term::Frob(t) => Term::frob(t.substitute(map)),
            Term::MulZ(t) => Term::mulz(t.substitute(map)),
            Term::MulPoly(c, t) => Term::mul_poly(c, t.substitute(map)),
        }
    }

    /// Expands the `MulPoly` shorthand to core symbols.
    pub fn expand_shorthand(&self, p: u64) -> Term {
        match self {
            Term::Zero | Term::One | Term::Var(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.expand_shorthand(p), b.expand_shorthand(p)),
            Term::Frob(t) => Term::frob(t.expand_shorthand(p)),
            Term::MulZ(t) => Term::mulz(t.expand_shorthand(p)),
            Term::MulPoly(c, t) => {
                let base = t.expand_shorthand(p);
                let mut acc = Term::Zero;
                for (d, coeff) in c.coeffs().iter().enumerate() {
                    let mut mono = Term::nat_mul(coeff.coeffs()[0], base.clone(), p);
                    for _ in 0..d {
                        mono = Term::mulz(mono);
                    }
                    acc = Term::add(acc, mono);
                }
                acc
            }
        }
    }

    /// Exact evaluation over the working field; every variable must be
    /// assigned (field variables to constants).
    pub fn eval(&self, env: &BTreeMap<Var, RatFunc>, spec: &Arc<FieldSpec>) -> Result<RatFunc> {
        match self {
            Term::Zero => Ok(RatFunc::zero(spec)),
            Term::One => Ok(RatFunc::one(spec)),
            Term::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| Error::UnassignedVariable(v.to_string())),
            Term::Add(a, b) => Ok(a.eval(env, spec)?.add(&b.eval(env, spec)?)),
            Term::Frob(t) => Ok(t.eval(env, spec)?.pow(spec.p())),
            Term::MulZ(t) => Ok(t.eval(env, spec)?.mul(&RatFunc::z(spec))),
            Term::MulPoly(c, t) => Ok(t.eval(env, spec)?.scale_poly(&c.lift_to(spec))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Add(a, b) => write!(f, "({a} + {b})"),
            Term::Frob(t) => write!(f, "frob({t})"),
            Term::MulZ(t) => write!(f, "z*({t})"),
            Term::MulPoly(c, t) => write!(f, "poly{{{c}}}*({t})"),
        }
    }
}

/// An `L_p`-formula with named parameters; the index of a `P_sigma`
/// predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPredicate {
    pub params: Vec<Var>,
    pub body: Box<Formula>,
}

impl SigmaPredicate {
    pub fn new(params: Vec<Var>, body: Formula) -> Result<SigmaPredicate> {
        if !body.is_lp() {
            return Err(Error::Sort(
                "P_sigma index must be an L_p formula".into(),
            ));
        }
        for p in &params {
            if p.sort != Sort::Field {
                return Err(Error::Sort("P_sigma parameters must be F-sorted".into()));
            }
        }
        Ok(SigmaPredicate {
            params,
            body: Box::new(body),
        })
    }

    pub fn trivially_true() -> SigmaPredicate {
        SigmaPredicate {
            params: Vec::new(),
            body: Box::new(Formula::True),
        }
    }

    /// Conjunction of two predicates with concatenated parameter lists.
    pub fn conjoin(&self, other: &SigmaPredicate) -> SigmaPredicate {
        let mut params = self.params.clone();
        for p in &other.params {
            if !params.contains(p) {
                params.push(*p);
            }
        }
        SigmaPredicate {
            params,
            body: Box::new(Formula::and(*self.body.clone(), *other.body.clone())),
        }
    }

    pub fn negate(&self) -> SigmaPredicate {
        SigmaPredicate {
            params: self.params.clone(),
            body: Box::new(Formula::not(*self.body.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// Membership in the coefficient field.
    InF(Term),
    /// `P_sigma(args)`; the arguments substitute the parameters
    /// positionally and must be F-pure terms.
    Pred(SigmaPredicate, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::True, _) => b,
            (_, Formula::True) => a,
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            _ => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::False, _) => b,
            (_, Formula::False) => a,
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            _ => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::False, _) => Formula::True,
            (Formula::True, _) => b,
            (_, Formula::True) => Formula::True,
            _ => Formula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists_all(vars: &[Var], f: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| Formula::exists(*v, acc))
    }

    pub fn forall_all(vars: &[Var], f: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| Formula::forall(*v, acc))
    }

    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .fold(Formula::True, Formula::and)
    }

    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().fold(Formula::False, Formula::or)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                for v in a.free_vars().union(&b.free_vars()) {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
            }
            Formula::InF(t) => {
                for v in t.free_vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Pred(_, args) => {
                for t in args {
                    for v in t.free_vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let fresh = bound.insert(*v);
                f.collect_free(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    /// All variable indices in use (free or bound), per sort; used to
    /// allocate fresh variables.
    pub fn max_indices(&self) -> (u32, u32) {
        let mut ring = 0u32;
        let mut field = 0u32;
        self.walk_vars(&mut |v| match v.sort {
            Sort::Ring => ring = ring.max(v.index + 1),
            Sort::Field => field = field.max(v.index + 1),
        });
        (ring, field)
    }

    fn walk_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                for v in a.free_vars().union(&b.free_vars()) {
                    f(*v);
                }
            }
            Formula::InF(t) => {
                for v in t.free_vars() {
                    f(v);
                }
            }
            Formula::Pred(sigma, args) => {
                for t in args {
                    for v in t.free_vars() {
                        f(v);
                    }
                }
                sigma.body.walk_vars(f);
                for p in &sigma.params {
                    f(*p);
                }
            }
            Formula::Not(inner) => inner.walk_vars(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk_vars(f);
                b.walk_vars(f);
            }
            Formula::Exists(v, inner) | Formula::Forall(v, inner) => {
                f(*v);
                inner.walk_vars(f);
            }
        }
    }

    /// Substitutes terms for free variables; quantified occurrences shadow.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(map), b.substitute(map)),
            Formula::InF(t) => Formula::InF(t.substitute(map)),
            Formula::Pred(s, args) => Formula::Pred(
                s.clone(),
                args.iter().map(|t| t.substitute(map)).collect(),
            ),
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Exists(v, f) => {
                let mut inner = map.clone();
                inner.remove(v);
                Formula::exists(*v, f.substitute(&inner))
            }
            Formula::Forall(v, f) => {
                let mut inner = map.clone();
                inner.remove(v);
                Formula::forall(*v, f.substitute(&inner))
            }
        }
    }

    /// True for the `L_p` fragment: no z-multiplication, no `in F` atoms,
    /// no nested predicates, every variable F-sorted.
    pub fn is_lp(&self) -> bool {
        match self {
            Formula::True | Formula::False => true,
            Formula::Eq(a, b) => a.is_lp() && b.is_lp(),
            Formula::InF(_) | Formula::Pred(_, _) => false,
            Formula::Not(f) => f.is_lp(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_lp() && b.is_lp()
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                v.sort == Sort::Field && f.is_lp()
            }
        }
    }

    /// Sort and arity checking for the full language.
    pub fn sort_check(&self) -> Result<()> {
        match self {
            Formula::True | Formula::False | Formula::Eq(_, _) | Formula::InF(_) => Ok(()),
            Formula::Pred(sigma, args) => {
                if sigma.params.len() != args.len() {
                    return Err(Error::ArityMismatch {
                        expected: sigma.params.len(),
                        got: args.len(),
                    });
                }
                for t in args {
                    if !t.is_f_pure() {
                        return Err(Error::Sort(format!(
                            "P_sigma argument `{t}` is not an F-pure term"
                        )));
                    }
                }
                if !sigma.body.is_lp() {
                    return Err(Error::Sort("P_sigma index is not an L_p formula".into()));
                }
                Ok(())
            }
            Formula::Not(f) => f.sort_check(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.sort_check()?;
                b.sort_check()
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => f.sort_check(),
        }
    }

    /// Negation normal form with implications eliminated.
    pub fn nnf(&self) -> Formula {
        fn go(f: &Formula, neg: bool) -> Formula {
            match f {
                Formula::True => {
                    if neg {
                        Formula::False
                    } else {
                        Formula::True
                    }
                }
                Formula::False => {
                    if neg {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
                Formula::Eq(_, _) | Formula::InF(_) | Formula::Pred(_, _) => {
                    if neg {
                        Formula::not(f.clone())
                    } else {
                        f.clone()
                    }
                }
                Formula::Not(inner) => go(inner, !neg),
                Formula::And(a, b) => {
                    if neg {
                        Formula::or(go(a, true), go(b, true))
                    } else {
                        Formula::and(go(a, false), go(b, false))
                    }
                }
                Formula::Or(a, b) => {
                    if neg {
                        Formula::and(go(a, true), go(b, true))
                    } else {
                        Formula::or(go(a, false), go(b, false))
                    }
                }
                Formula::Implies(a, b) => {
                    if neg {
                        Formula::and(go(a, false), go(b, true))
                    } else {
                        Formula::or(go(a, true), go(b, false))
                    }
                }
                Formula::Exists(v, inner) => {
                    if neg {
                        Formula::forall(*v, go(inner, true))
                    } else {
                        Formula::exists(*v, go(inner, false))
                    }
                }
                Formula::Forall(v, inner) => {
                    if neg {
                        Formula::exists(*v, go(inner, true))
                    } else {
                        Formula::forall(*v, go(inner, false))
                    }
                }
            }
        }
        go(self, false)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::InF(t) => write!(f, "inF({t})"),
            Formula::Pred(s, args) => {
                write!(f, "P{{{}}}(", s.body)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Formula::Not(inner) => write!(f, "not ({inner})"),
            Formula::And(a, b) => write!(f, "({a} and {b})"),
            Formula::Or(a, b) => write!(f, "({a} or {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(v, inner) => {
                let sort = match v.sort {
                    Sort::Ring => "R",
                    Sort::Field => "F",
                };
                write!(f, "exists {v}:{sort} ({inner})")
            }
            Formula::Forall(v, inner) => {
                let sort = match v.sort {
                    Sort::Ring => "R",
                    Sort::Field => "F",
                };
                write!(f, "forall {v}:{sort} ({inner})")
            }
        }
    }
}

/// Converts an additive polynomial into a term over its variables.
pub fn additive_to_term(f: &AdditivePoly) -> Term {
    let mut acc = Term::Zero;
    for v in f.vars() {
        for (lvl, coeff) in f.levels_of(v).unwrap() {
            let mut base = Term::var(v);
            for _ in 0..*lvl {
                base = Term::frob(base);
            }
            acc = Term::add(acc, Term::mul_poly(coeff, base));
        }
    }
    acc
}

/// Decomposes an F-pure-with-z-structure term into its "coefficient of
/// `z^d`" parts: the term equals `sum_d z^d * entry_d` with every entry an
/// `L_p`-term over field variables. Errors when a ring variable occurs.
pub fn term_to_flincomb(t: &Term, p: u64) -> Result<BTreeMap<usize, Term>> {
    let mut out = BTreeMap::new();
    match t {
        Term::Zero => {}
        Term::One => {
            out.insert(0, Term::One);
        }
        Term::Var(v) => {
            if v.sort != Sort::Field {
                return Err(Error::Sort(format!(
                    "ring variable {v} in a field-linear context"
                )));
            }
            out.insert(0, Term::var(*v));
        }
        Term::Add(a, b) => {
            out = term_to_flincomb(a, p)?;
            for (d, term) in term_to_flincomb(b, p)? {
                merge_entry(&mut out, d, term);
            }
        }
        Term::Frob(inner) => {
            for (d, term) in term_to_flincomb(inner, p)? {
                merge_entry(&mut out, d * p as usize, Term::frob(term));
            }
        }
        Term::MulZ(inner) => {
            for (d, term) in term_to_flincomb(inner, p)? {
                merge_entry(&mut out, d + 1, term);
            }
        }
        Term::MulPoly(c, inner) => {
            let base = term_to_flincomb(inner, p)?;
            for (k, coeff) in c.coeffs().iter().enumerate() {
                let n = coeff.coeffs()[0];
                if n == 0 {
                    continue;
                }
                for (d, term) in &base {
                    merge_entry(&mut out, d + k, Term::nat_mul(n, term.clone(), p));
                }
            }
        }
    }
    out.retain(|_, t| *t != Term::Zero);
    Ok(out)
}

fn merge_entry(out: &mut BTreeMap<usize, Term>, d: usize, t: Term) {
    if t == Term::Zero {
        return;
    }
    let entry = out.remove(&d);
    let merged = match entry {
        None => t,
        Some(old) => Term::add(old, t),
    };
    out.insert(d, merged);
}

/// `L_p`-formula asserting equality of two field-linear combinations,
/// coefficient by coefficient over the powers of `z`.
pub fn flincomb_eq(
    lhs: &BTreeMap<usize, Term>,
    rhs: &BTreeMap<usize, Term>,
) -> Formula {
    let mut degs: BTreeSet<usize> = lhs.keys().copied().collect();
    degs.extend(rhs.keys().copied());
    let mut acc = Formula::True;
    for d in degs {
        let a = lhs.get(&d).cloned().unwrap_or(Term::Zero);
        let b = rhs.get(&d).cloned().unwrap_or(Term::Zero);
        acc = Formula::and(acc, Formula::Eq(a, b));
    }
    acc
}

pub fn flincomb_neq(
    lhs: &BTreeMap<usize, Term>,
    rhs: &BTreeMap<usize, Term>,
) -> Formula {
    let mut degs: BTreeSet<usize> = lhs.keys().copied().collect();
    degs.extend(rhs.keys().copied());
    let mut acc = Formula::False;
    for d in degs {
        let a = lhs.get(&d).cloned().unwrap_or(Term::Zero);
        let b = rhs.get(&d).cloned().unwrap_or(Term::Zero);
        acc = Formula::or(acc, Formula::not(Formula::Eq(a, b)));
    }
    acc
}

/// The field-variable part of an additive polynomial as a field-linear
/// combination over `z`-powers.
pub fn additive_to_flincomb(g: &AdditivePoly) -> Result<BTreeMap<usize, Term>> {
    let p = g.p();
    let mut out = BTreeMap::new();
    for v in g.vars() {
        if v.sort != Sort::Field {
            return Err(Error::Sort(format!(
                "ring variable {v} in a field-only additive polynomial"
            )));
        }
        for (lvl, coeff) in g.levels_of(v).unwrap() {
            let mut base = Term::var(v);
            for _ in 0..*lvl {
                base = Term::frob(base);
            }
            for (d, c) in coeff.coeffs().iter().enumerate() {
                let n = c.coeffs()[0];
                if n == 0 {
                    continue;
                }
                merge_entry(&mut out, d, Term::nat_mul(n, base.clone(), p));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    #[test]
    fn term_eval_and_shorthand_agree() {
        let s = f2();
        let x = Var::ring(0);
        // poly{1+z^2} * frob(x) + 1
        let c = Poly::from_ints(&f2(), &[1, 0, 1]);
        let t = Term::add(
            Term::mul_poly(&c, Term::frob(Term::var(x))),
            Term::One,
        );
        let expanded = t.expand_shorthand(2);
        let mut env = BTreeMap::new();
        env.insert(x, RatFunc::z(&s).inv().unwrap());
        assert_eq!(t.eval(&env, &s).unwrap(), expanded.eval(&env, &s).unwrap());
    }

    #[test]
    fn nnf_pushes_negations() {
        let x = Var::ring(0);
        let phi = Formula::not(Formula::exists(
            x,
            Formula::and(
                Formula::Eq(Term::var(x), Term::Zero),
                Formula::not(Formula::Eq(Term::var(x), Term::One)),
            ),
        ));
        let nnf = phi.nnf();
        match nnf {
            Formula::Forall(_, inner) => match *inner {
                Formula::Or(a, b) => {
                    assert!(matches!(*a, Formula::Not(_)));
                    assert!(matches!(*b, Formula::Eq(_, _)));
                }
                other => panic!("expected or, got {other}"),
            },
            other => panic!("expected forall, got {other}"),
        }
    }

    #[test]
    fn flincomb_of_mixed_term() {
        // z*(a1) + frob(a2) + 1 over F_2: entries at z^0: frob(a2)+1, z^1: a1
        let a1 = Var::field(0);
        let a2 = Var::field(1);
        let t = Term::add(
            Term::mulz(Term::var(a1)),
            Term::add(Term::frob(Term::var(a2)), Term::One),
        );
        let fl = term_to_flincomb(&t, 2).unwrap();
        assert_eq!(fl.len(), 2);
        assert_eq!(fl[&1], Term::var(a1));
    }

    #[test]
    fn flincomb_rejects_ring_vars() {
        let t = Term::var(Var::ring(0));
        assert!(term_to_flincomb(&t, 2).is_err());
    }

    #[test]
    fn additive_term_roundtrip_eval() {
        let s = f2();
        let f = crate::additive::parse_additive("poly{z}*x1^2 + x1 + poly{1+z}*a1", 2).unwrap();
        let t = additive_to_term(&f);
        let mut env = BTreeMap::new();
        env.insert(Var::ring(0), RatFunc::z(&s).inv().unwrap());
        env.insert(Var::field(0), RatFunc::one(&s));
        let via_term = t.eval(&env, &s).unwrap();
        let via_poly = f.eval(&env, &s).unwrap();
        assert_eq!(via_term, via_poly);
    }

    #[test]
    fn sort_check_catches_bad_pred_args() {
        let sigma = SigmaPredicate::new(
            vec![Var::field(0)],
            Formula::Eq(Term::var(Var::field(0)), Term::Zero),
        )
        .unwrap();
        let bad = Formula::Pred(sigma.clone(), vec![Term::var(Var::ring(0))]);
        assert!(bad.sort_check().is_err());
        let good = Formula::Pred(sigma, vec![Term::var(Var::field(3))]);
        assert!(good.sort_check().is_ok());
    }
}
