//! Exact evaluators: `L_p`-formulas over the finite coefficient field by
//! exhaustive quantification, and full formulas over `R` under bounded
//! semantics (ring quantifiers range over the finite set of elements of
//! height at most a cap). The bounded evaluator is a sound test oracle for
//! bounded instances only, never a decision procedure for `R`.

use crate::additive::{Sort, Var};
use crate::bounds::enumerate_height_bounded;
use crate::error::{Error, Result};
use crate::gf::{enumerate_field, FieldElem, FieldSpec};
use crate::logic::ast::{Formula, SigmaPredicate, Term};
use crate::ratfun::rational::{Localization, RatFunc};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Evaluates an `L_p`-term over field values.
fn eval_lp_term(t: &Term, env: &BTreeMap<Var, FieldElem>, spec: &Arc<FieldSpec>) -> Result<FieldElem> {
    match t {
        Term::Zero => Ok(FieldElem::zero(spec)),
        Term::One => Ok(FieldElem::one(spec)),
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnassignedVariable(v.to_string())),
        Term::Add(a, b) => Ok(eval_lp_term(a, env, spec)?.add(&eval_lp_term(b, env, spec)?)),
        Term::Frob(inner) => Ok(eval_lp_term(inner, env, spec)?.frobenius()),
        Term::MulZ(_) => Err(Error::Sort("z-multiplication inside an L_p term".into())),
        Term::MulPoly(c, inner) => {
            if !c.is_constant() {
                return Err(Error::Sort("non-constant coefficient in an L_p term".into()));
            }
            let n = if c.is_zero() { 0 } else { c.coeff(0).coeffs()[0] };
            let base = eval_lp_term(inner, env, spec)?;
            let mut acc = FieldElem::zero(spec);
            for _ in 0..n {
                acc = acc.add(&base);
            }
            Ok(acc)
        }
    }
}

/// Splits a conjunction tree into its conjuncts (no crossing into
/// quantifiers).
fn flatten_and(phi: &Formula, out: &mut Vec<Formula>) {
    match phi {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn eval_lp_formula(
    phi: &Formula,
    env: &mut BTreeMap<Var, FieldElem>,
    spec: &Arc<FieldSpec>,
) -> Result<bool> {
    match phi {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Eq(a, b) => Ok(eval_lp_term(a, env, spec)? == eval_lp_term(b, env, spec)?),
        Formula::InF(_) | Formula::Pred(_, _) => {
            Err(Error::Sort("non-L_p atom inside a sigma formula".into()))
        }
        Formula::Not(f) => Ok(!eval_lp_formula(f, env, spec)?),
        Formula::And(a, b) => {
            Ok(eval_lp_formula(a, env, spec)? && eval_lp_formula(b, env, spec)?)
        }
        Formula::Or(a, b) => {
            Ok(eval_lp_formula(a, env, spec)? || eval_lp_formula(b, env, spec)?)
        }
        Formula::Implies(a, b) => {
            Ok(!eval_lp_formula(a, env, spec)? || eval_lp_formula(b, env, spec)?)
        }
        Formula::Exists(_, _) => {
            let mut vars = Vec::new();
            let mut body = phi;
            while let Formula::Exists(v, inner) = body {
                vars.push(*v);
                body = inner;
            }
            eval_lp_block(&vars, &body.nnf(), env, spec)
        }
        Formula::Forall(_, _) => {
            // search for a counterexample of the whole block
            let mut vars = Vec::new();
            let mut body = phi;
            while let Formula::Forall(v, inner) = body {
                vars.push(*v);
                body = inner;
            }
            let negated = Formula::not(body.clone()).nnf();
            Ok(!eval_lp_block(&vars, &negated, env, spec)?)
        }
    }
}

/// Backtracking search over a quantifier block: assigns the block
/// variables one by one and prunes as soon as a conjunct whose variables
/// are all assigned evaluates to false. The per-z-degree structure of the
/// packaged formulas makes this near-linear where plain enumeration is
/// exponential.
fn eval_lp_block(
    vars: &[Var],
    body: &Formula,
    env: &mut BTreeMap<Var, FieldElem>,
    spec: &Arc<FieldSpec>,
) -> Result<bool> {
    for v in vars {
        if v.sort != Sort::Field {
            return Err(Error::Sort("ring quantifier inside a sigma formula".into()));
        }
    }
    let mut conjuncts = Vec::new();
    flatten_and(body, &mut conjuncts);
    // which block variables each conjunct still needs
    let needs: Vec<BTreeSet<Var>> = conjuncts
        .iter()
        .map(|c| {
            c.free_vars()
                .into_iter()
                .filter(|v| vars.contains(v))
                .collect()
        })
        .collect();
    let domain = enumerate_field(spec);
    fn rec(
        i: usize,
        vars: &[Var],
        conjuncts: &[Formula],
        needs: &[BTreeSet<Var>],
        domain: &[FieldElem],
        env: &mut BTreeMap<Var, FieldElem>,
        spec: &Arc<FieldSpec>,
    ) -> Result<bool> {
        if i == vars.len() {
            for c in conjuncts {
                if !eval_lp_formula(c, env, spec)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let v = vars[i];
        let saved = env.get(&v).cloned();
        for val in domain {
            env.insert(v, val.clone());
            // prune on any conjunct that just became fully assigned
            let mut viable = true;
            for (c, need) in conjuncts.iter().zip(needs) {
                if need.contains(&v) && need.iter().all(|w| {
                    vars.iter().position(|x| x == w).map(|j| j <= i).unwrap_or(true)
                }) && !eval_lp_formula(c, env, spec)?
                {
                    viable = false;
                    break;
                }
            }
            if viable && rec(i + 1, vars, conjuncts, needs, domain, env, spec)? {
                restore(env, v, saved);
                return Ok(true);
            }
        }
        restore(env, v, saved);
        Ok(false)
    }
    rec(0, vars, &conjuncts, &needs, &domain, env, spec)
}

fn restore<T>(env: &mut BTreeMap<Var, T>, v: Var, saved: Option<T>) {
    match saved {
        Some(x) => {
            env.insert(v, x);
        }
        None => {
            env.remove(&v);
        }
    }
}

/// Truth of `sigma(args)` in the finite field `F`, quantifiers evaluated by
/// exhaustive enumeration.
pub fn eval_sigma_over_f(
    sigma: &SigmaPredicate,
    args: &[FieldElem],
    spec: &Arc<FieldSpec>,
) -> Result<bool> {
    if sigma.params.len() != args.len() {
        return Err(Error::ArityMismatch {
            expected: sigma.params.len(),
            got: args.len(),
        });
    }
    let mut env: BTreeMap<Var, FieldElem> = BTreeMap::new();
    for (p, a) in sigma.params.iter().zip(args) {
        env.insert(*p, a.clone());
    }
    eval_lp_formula(&sigma.body, &mut env, spec)
}

/// Bounded-semantics evaluator: ring-sorted quantifiers range over
/// `{x in R : |x| <= cap} U {0}`, field-sorted ones over `F`.
pub struct BoundedEvaluator {
    loc: Localization,
    ring_domain: Vec<RatFunc>,
    field_domain: Vec<RatFunc>,
}

impl BoundedEvaluator {
    pub fn new(loc: &Localization, cap: usize) -> Result<BoundedEvaluator> {
        let ring_domain = enumerate_height_bounded(loc, cap)?;
        let field_domain = enumerate_field(loc.spec())
            .into_iter()
            .map(RatFunc::constant)
            .collect();
        Ok(BoundedEvaluator {
            loc: loc.clone(),
            ring_domain,
            field_domain,
        })
    }

    pub fn ring_domain(&self) -> &[RatFunc] {
        &self.ring_domain
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.loc.spec()
    }

    /// Evaluates with the given assignment of the free variables.
    pub fn eval(&self, phi: &Formula, env: &BTreeMap<Var, RatFunc>) -> Result<bool> {
        let mut env = env.clone();
        self.eval_inner(phi, &mut env)
    }

    fn eval_inner(&self, phi: &Formula, env: &mut BTreeMap<Var, RatFunc>) -> Result<bool> {
        let spec = self.loc.spec();
        match phi {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Eq(a, b) => Ok(a.eval(env, spec)? == b.eval(env, spec)?),
            Formula::InF(t) => Ok(t.eval(env, spec)?.is_field_constant()),
            Formula::Pred(sigma, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let v = a.eval(env, spec)?;
                    let Some(c) = v.as_field_constant() else {
                        return Err(Error::Sort(format!(
                            "P_sigma argument `{a}` evaluated outside F"
                        )));
                    };
                    vals.push(c);
                }
                eval_sigma_over_f(sigma, &vals, spec)
            }
            Formula::Not(f) => Ok(!self.eval_inner(f, env)?),
            Formula::And(a, b) => Ok(self.eval_inner(a, env)? && self.eval_inner(b, env)?),
            Formula::Or(a, b) => Ok(self.eval_inner(a, env)? || self.eval_inner(b, env)?),
            Formula::Implies(a, b) => {
                Ok(!self.eval_inner(a, env)? || self.eval_inner(b, env)?)
            }
            Formula::Exists(_, _) => {
                let mut vars = Vec::new();
                let mut body = phi;
                while let Formula::Exists(v, inner) = body {
                    vars.push(*v);
                    body = inner;
                }
                self.eval_block(&vars, &body.nnf(), env)
            }
            Formula::Forall(_, _) => {
                let mut vars = Vec::new();
                let mut body = phi;
                while let Formula::Forall(v, inner) = body {
                    vars.push(*v);
                    body = inner;
                }
                let negated = Formula::not(body.clone()).nnf();
                Ok(!self.eval_block(&vars, &negated, env)?)
            }
        }
    }

    /// Backtracking search over a quantifier block with ready-conjunct
    /// pruning; see the note on [`eval_lp_block`].
    fn eval_block(
        &self,
        vars: &[Var],
        body: &Formula,
        env: &mut BTreeMap<Var, RatFunc>,
    ) -> Result<bool> {
        let mut conjuncts = Vec::new();
        flatten_and(body, &mut conjuncts);
        let needs: Vec<BTreeSet<Var>> = conjuncts
            .iter()
            .map(|c| {
                c.free_vars()
                    .into_iter()
                    .filter(|v| vars.contains(v))
                    .collect()
            })
            .collect();
        self.block_rec(0, vars, &conjuncts, &needs, env)
    }

    fn block_rec(
        &self,
        i: usize,
        vars: &[Var],
        conjuncts: &[Formula],
        needs: &[BTreeSet<Var>],
        env: &mut BTreeMap<Var, RatFunc>,
    ) -> Result<bool> {
        if i == vars.len() {
            for c in conjuncts {
                if !self.eval_inner(c, env)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let v = vars[i];
        let domain = match v.sort {
            Sort::Ring => &self.ring_domain,
            Sort::Field => &self.field_domain,
        };
        let saved = env.get(&v).cloned();
        for val in domain {
            env.insert(v, val.clone());
            let mut viable = true;
            for (c, need) in conjuncts.iter().zip(needs) {
                if need.contains(&v)
                    && need.iter().all(|w| {
                        vars.iter()
                            .position(|x| x == w)
                            .map(|j| j <= i)
                            .unwrap_or(true)
                    })
                    && !self.eval_inner(c, env)?
                {
                    viable = false;
                    break;
                }
            }
            if viable && self.block_rec(i + 1, vars, conjuncts, needs, env)? {
                restore(env, v, saved);
                return Ok(true);
            }
        }
        restore(env, v, saved);
        Ok(false)
    }
}

/// One-shot bounded evaluation.
pub fn eval_bounded_over_r(
    phi: &Formula,
    env: &BTreeMap<Var, RatFunc>,
    cap: usize,
    loc: &Localization,
) -> Result<bool> {
    BoundedEvaluator::new(loc, cap)?.eval(phi, env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parser::parse_formula;
    use crate::ratfun::poly::Poly;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    fn loc_z() -> Localization {
        Localization::new(&f2(), vec![Poly::z(&f2())]).unwrap()
    }

    fn as_sigma(phi: Formula) -> SigmaPredicate {
        SigmaPredicate::new(Vec::new(), phi).unwrap()
    }

    #[test]
    fn sigma_exists_nonzero_selfinverse() {
        // exists a (a + a = 0 and a != 0): true over F_2 (a = 1)
        let phi = parse_formula("exists a:F (a + a = 0 and a != 0)", 2).unwrap();
        let sigma = as_sigma(phi);
        assert!(eval_sigma_over_f(&sigma, &[], &f2()).unwrap());
    }

    #[test]
    fn sigma_fermat() {
        let phi = parse_formula("forall a:F (a^p = a)", 2).unwrap();
        let sigma = as_sigma(phi);
        assert!(eval_sigma_over_f(&sigma, &[], &f2()).unwrap());
        let f4 = FieldSpec::default_for(2, 2).unwrap();
        assert!(!eval_sigma_over_f(&sigma, &[], &f4).unwrap());
        let f3 = FieldSpec::prime_field(3).unwrap();
        let phi3 = parse_formula("forall a:F (a^p = a)", 3).unwrap();
        assert!(eval_sigma_over_f(&as_sigma(phi3), &[], &f3).unwrap());
    }

    #[test]
    fn bounded_semantics_examples() {
        let loc = loc_z();
        let env = BTreeMap::new();
        // exists x (x + x = 0) is trivially true in char 2
        let phi = parse_formula("exists x:R (x + x = 0)", 2).unwrap();
        assert!(eval_bounded_over_r(&phi, &env, 2, &loc).unwrap());
        // exists x (x != 0 and z*x = 1): true, x = 1/z is in R
        let phi = parse_formula("exists x:R (x != 0 and z*x = 1)", 2).unwrap();
        assert!(eval_bounded_over_r(&phi, &env, 2, &loc).unwrap());
        // forall x (x = 0): false
        let phi = parse_formula("forall x:R (x = 0)", 2).unwrap();
        assert!(!eval_bounded_over_r(&phi, &env, 2, &loc).unwrap());
        // inF picks out constants
        let phi = parse_formula("exists x:R (inF(x) and x != 0 and x != 1)", 2).unwrap();
        assert!(!eval_bounded_over_r(&phi, &env, 2, &loc).unwrap());
    }

    #[test]
    fn bounded_pred_atom() {
        let loc = loc_z();
        let env = BTreeMap::new();
        let phi = parse_formula("exists a:F (P{b + b = 0}(a) and a = 1)", 2).unwrap();
        assert!(eval_bounded_over_r(&phi, &env, 1, &loc).unwrap());
    }
}
