//! The existential normal form: any existential formula becomes a
//! disjunction of shapes
//! `exists x, alpha [ f(x) + H(alpha) = u  /\_j  e_j(x) + G_j(alpha) != v_j
//! /\ P_sigma(alpha) ]`
//! with `f, e_j` additive over the bound ring variables, `H, G_j` additive
//! over the bound field variables, and `u, v_j` terms free of the bound
//! variables. Systems of equations collapse into one through the pairing
//! `x = 0 /\ y = 0  <->  x^p + z y^p = 0`.

use crate::additive::{AdditivePoly, Sort, Var};
use crate::error::{Error, Result};
use crate::logic::ast::{additive_to_term, Formula, SigmaPredicate, Term};
use crate::ratfun::factor::smallest_irreducible_avoiding;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::Localization;
use std::collections::{BTreeMap, BTreeSet};

/// Fresh-variable source seeded past everything a formula mentions.
#[derive(Debug, Clone)]
pub struct FreshVars {
    next_ring: u32,
    next_field: u32,
}

impl FreshVars {
    pub fn beyond(phi: &Formula) -> FreshVars {
        let (r, f) = phi.max_indices();
        FreshVars {
            next_ring: r,
            next_field: f,
        }
    }

    pub fn ring(&mut self) -> Var {
        let v = Var::ring(self.next_ring);
        self.next_ring += 1;
        v
    }

    pub fn field(&mut self) -> Var {
        let v = Var::field(self.next_field);
        self.next_field += 1;
        v
    }

    /// Moves both counters past the given variable.
    pub fn bump(&mut self, v: Var) {
        match v.sort {
            Sort::Ring => self.next_ring = self.next_ring.max(v.index + 1),
            Sort::Field => self.next_field = self.next_field.max(v.index + 1),
        }
    }
}

/// Splits a term into an additive polynomial over the bound variables plus
/// a residual term free of them; the term equals
/// `additive(bound part) + residual` under every assignment.
pub fn split_term(
    t: &Term,
    bound: &BTreeSet<Var>,
    p: u64,
) -> (AdditivePoly, Term) {
    let prime = crate::gf::FieldSpec::prime_field(p).expect("prime");
    match t {
        Term::Zero => (AdditivePoly::zero(p), Term::Zero),
        Term::One => (AdditivePoly::zero(p), Term::One),
        Term::Var(v) => {
            if bound.contains(v) {
                (AdditivePoly::var(p, *v), Term::Zero)
            } else {
                (AdditivePoly::zero(p), t.clone())
            }
        }
        Term::Add(a, b) => {
            let (pa, ra) = split_term(a, bound, p);
            let (pb, rb) = split_term(b, bound, p);
            (pa.add(&pb), Term::add(ra, rb))
        }
        Term::Frob(inner) => {
            let (pi, ri) = split_term(inner, bound, p);
            (pi.frob_twist(1), Term::frob(ri))
        }
        Term::MulZ(inner) => {
            let (pi, ri) = split_term(inner, bound, p);
            (pi.scale(&Poly::z(&prime)), Term::mulz(ri))
        }
        Term::MulPoly(c, inner) => {
            let (pi, ri) = split_term(inner, bound, p);
            (pi.scale(c), Term::mul_poly(c, ri))
        }
    }
}

/// Removes negated `in F` atoms and `in F` on non-variable terms, and
/// pushes negation through `P_sigma`:
/// - `in F(t)` on an F-pure term is true;
/// - `in F(t)` on a compound ring term becomes `exists a:F (t = a)`;
/// - `not in F(t)` becomes the division shape
///   `exists y:R, alpha:F [t = Q y + sum alpha_k z^k /\ (y != 0 \/ ...)]`
///   with `Q` a small irreducible outside `S` that stays irreducible over
///   the working field.
pub fn eliminate_negations(phi: &Formula, loc: &Localization) -> Result<Formula> {
    let p = loc.spec().p();
    let nnf = phi.nnf();
    let mut fresh = FreshVars::beyond(&nnf);
    let q_poly = smallest_irreducible_avoiding(loc.spec(), loc.s_polys())?;
    rewrite_inf(&nnf, loc, &q_poly, p, &mut fresh)
}

fn rewrite_inf(
    phi: &Formula,
    loc: &Localization,
    q_poly: &Poly,
    p: u64,
    fresh: &mut FreshVars,
) -> Result<Formula> {
    Ok(match phi {
        Formula::True | Formula::False | Formula::Eq(_, _) => phi.clone(),
        Formula::InF(t) => {
            if t.is_f_pure() {
                Formula::True
            } else if matches!(t, Term::Var(_)) {
                phi.clone()
            } else {
                let a = fresh.field();
                Formula::exists(a, Formula::Eq(t.clone(), Term::var(a)))
            }
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::InF(t) => {
                if t.is_f_pure() {
                    Formula::False
                } else {
                    // t = Q y + alpha_(d-1) z^(d-1) + ... + alpha_0 with
                    // y != 0 or some alpha_i != 0 for i >= 1
                    let d = q_poly.degree();
                    let y = fresh.ring();
                    let alphas: Vec<Var> = (0..d).map(|_| fresh.field()).collect();
                    let mut rhs = Term::mul_poly(q_poly, Term::var(y));
                    for (k, a) in alphas.iter().enumerate() {
                        rhs = Term::add(
                            rhs,
                            Term::mul_poly(&Poly::one(q_poly.spec()).shift(k), Term::var(*a)),
                        );
                    }
                    let mut cond = Formula::not(Formula::Eq(Term::var(y), Term::Zero));
                    for a in alphas.iter().skip(1) {
                        cond = Formula::or(
                            cond,
                            Formula::not(Formula::Eq(Term::var(*a), Term::Zero)),
                        );
                    }
                    let body = Formula::and(Formula::Eq(t.clone(), rhs), cond);
                    let mut out = body;
                    for a in alphas.iter().rev() {
                        out = Formula::exists(*a, out);
                    }
                    Formula::exists(y, out)
                }
            }
            Formula::Pred(sigma, args) => Formula::Pred(sigma.negate(), args.clone()),
            _ => Formula::not(rewrite_inf(inner, loc, q_poly, p, fresh)?),
        },
        Formula::Pred(_, _) => phi.clone(),
        Formula::And(a, b) => Formula::and(
            rewrite_inf(a, loc, q_poly, p, fresh)?,
            rewrite_inf(b, loc, q_poly, p, fresh)?,
        ),
        Formula::Or(a, b) => Formula::or(
            rewrite_inf(a, loc, q_poly, p, fresh)?,
            rewrite_inf(b, loc, q_poly, p, fresh)?,
        ),
        Formula::Implies(a, b) => Formula::implies(
            rewrite_inf(a, loc, q_poly, p, fresh)?,
            rewrite_inf(b, loc, q_poly, p, fresh)?,
        ),
        Formula::Exists(v, f) => Formula::exists(*v, rewrite_inf(f, loc, q_poly, p, fresh)?),
        Formula::Forall(v, f) => Formula::forall(*v, rewrite_inf(f, loc, q_poly, p, fresh)?),
    })
}

/// Alpha-renames every bound variable to a fresh one.
pub(crate) fn rename_bound(phi: &Formula, fresh: &mut FreshVars) -> Formula {
    fn go(
        phi: &Formula,
        map: &BTreeMap<Var, Term>,
        fresh: &mut FreshVars,
    ) -> Formula {
        match phi {
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let nv = match v.sort {
                    Sort::Ring => fresh.ring(),
                    Sort::Field => fresh.field(),
                };
                let mut inner = map.clone();
                inner.insert(*v, Term::var(nv));
                let body = go(f, &inner, fresh);
                if matches!(phi, Formula::Exists(_, _)) {
                    Formula::exists(nv, body)
                } else {
                    Formula::forall(nv, body)
                }
            }
            Formula::Not(f) => Formula::not(go(f, map, fresh)),
            Formula::And(a, b) => Formula::and(go(a, map, fresh), go(b, map, fresh)),
            Formula::Or(a, b) => Formula::or(go(a, map, fresh), go(b, map, fresh)),
            Formula::Implies(a, b) => Formula::implies(go(a, map, fresh), go(b, map, fresh)),
            leaf => leaf.substitute(map),
        }
    }
    go(phi, &BTreeMap::new(), fresh)
}

/// Prenex form of an NNF formula with freshly-renamed bound variables:
/// the quantifier prefix (true = forall) and the quantifier-free matrix.
pub(crate) fn prenex(phi: &Formula, fresh: &mut FreshVars) -> (Vec<(bool, Var)>, Formula) {
    let renamed = rename_bound(&phi.nnf(), fresh);
    let mut prefix = Vec::new();
    let matrix = pull(&renamed, &mut prefix);
    (prefix, matrix)
}

fn pull(phi: &Formula, prefix: &mut Vec<(bool, Var)>) -> Formula {
    match phi {
        Formula::Exists(v, f) => {
            prefix.push((false, *v));
            pull(f, prefix)
        }
        Formula::Forall(v, f) => {
            prefix.push((true, *v));
            pull(f, prefix)
        }
        Formula::And(a, b) => {
            let ma = pull(a, prefix);
            let mb = pull(b, prefix);
            Formula::and(ma, mb)
        }
        Formula::Or(a, b) => {
            let ma = pull(a, prefix);
            let mb = pull(b, prefix);
            Formula::or(ma, mb)
        }
        // NNF input: negations sit on atoms only
        leaf => leaf.clone(),
    }
}

/// Literal-level DNF with a size cap.
fn dnf(matrix: &Formula, cap: usize) -> Result<Vec<Vec<Formula>>> {
    fn go(phi: &Formula, cap: usize) -> Result<Vec<Vec<Formula>>> {
        match phi {
            Formula::And(a, b) => {
                let da = go(a, cap)?;
                let db = go(b, cap)?;
                let mut out = Vec::new();
                for x in &da {
                    for y in &db {
                        let mut c = x.clone();
                        c.extend(y.clone());
                        out.push(c);
                        if out.len() > cap {
                            return Err(Error::ResourceCap("DNF too large".into()));
                        }
                    }
                }
                Ok(out)
            }
            Formula::Or(a, b) => {
                let mut out = go(a, cap)?;
                out.extend(go(b, cap)?);
                if out.len() > cap {
                    return Err(Error::ResourceCap("DNF too large".into()));
                }
                Ok(out)
            }
            Formula::True => Ok(vec![Vec::new()]),
            Formula::False => Ok(Vec::new()),
            leaf => Ok(vec![vec![leaf.clone()]]),
        }
    }
    go(matrix, cap)
}

/// One inequality `e(x) + g(alpha) != v`.
#[derive(Debug, Clone)]
pub struct EnfInequality {
    pub e_ring: AdditivePoly,
    pub g_field: AdditivePoly,
    pub v: Term,
}

/// One disjunct of the normal form.
#[derive(Debug, Clone)]
pub struct EnfDisjunct {
    pub f: AdditivePoly,
    pub h_field: AdditivePoly,
    pub u: Term,
    pub inequalities: Vec<EnfInequality>,
    pub sigma: SigmaPredicate,
    pub sigma_args: Vec<Term>,
    pub ring_vars: Vec<Var>,
    pub field_vars: Vec<Var>,
}

impl EnfDisjunct {
    /// Rebuilds the existential formula of this disjunct.
    pub fn to_formula(&self) -> Formula {
        let eq = Formula::Eq(
            Term::add(additive_to_term(&self.f), additive_to_term(&self.h_field)),
            self.u.clone(),
        );
        let mut body = eq;
        for ineq in &self.inequalities {
            let lhs = Term::add(
                additive_to_term(&ineq.e_ring),
                additive_to_term(&ineq.g_field),
            );
            body = Formula::and(body, Formula::not(Formula::Eq(lhs, ineq.v.clone())));
        }
        body = Formula::and(
            body,
            Formula::Pred(self.sigma.clone(), self.sigma_args.clone()),
        );
        let mut out = body;
        for v in self.field_vars.iter().rev() {
            out = Formula::exists(*v, out);
        }
        for v in self.ring_vars.iter().rev() {
            out = Formula::exists(*v, out);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Enf {
    pub disjuncts: Vec<EnfDisjunct>,
}

impl Enf {
    pub fn to_formula(&self) -> Formula {
        Formula::disjunction(self.disjuncts.iter().map(|d| d.to_formula()))
    }
}

fn conjoin_pred(
    acc: &mut Option<(SigmaPredicate, Vec<Term>)>,
    sigma: &SigmaPredicate,
    args: &[Term],
    fresh: &mut FreshVars,
) {
    // rename parameters so the combined predicate has disjoint slots
    let fresh_params: Vec<Var> = sigma.params.iter().map(|_| fresh.field()).collect();
    let map: BTreeMap<Var, Term> = sigma
        .params
        .iter()
        .zip(&fresh_params)
        .map(|(old, new)| (*old, Term::var(*new)))
        .collect();
    let body = sigma.body.substitute(&map);
    let renamed = SigmaPredicate {
        params: fresh_params,
        body: Box::new(body),
    };
    match acc {
        None => *acc = Some((renamed, args.to_vec())),
        Some((s, a)) => {
            let mut params = s.params.clone();
            params.extend(renamed.params.iter().copied());
            let combined = SigmaPredicate {
                params,
                body: Box::new(Formula::and(*s.body.clone(), *renamed.body)),
            };
            let mut combined_args = a.clone();
            combined_args.extend(args.to_vec());
            *acc = Some((combined, combined_args));
        }
    }
}

/// Converts an existential formula to the normal form. Errors on formulas
/// that are not existential after negation elimination, and on `in F`
/// applied to a free ring variable.
pub fn to_existential_normal_form(phi: &Formula, loc: &Localization) -> Result<Enf> {
    phi.sort_check()?;
    let p = loc.spec().p();
    let clean = eliminate_negations(phi, loc)?;
    let mut fresh = FreshVars::beyond(&clean);
    let (prefix, matrix) = prenex(&clean, &mut fresh);
    if prefix.iter().any(|(is_forall, _)| *is_forall) {
        return Err(Error::UnsupportedFormula(
            "universal quantifier in an existential context".into(),
        ));
    }
    let bound_ring: Vec<Var> = prefix
        .iter()
        .filter(|(_, v)| v.sort == Sort::Ring)
        .map(|(_, v)| *v)
        .collect();
    let bound_field: Vec<Var> = prefix
        .iter()
        .filter(|(_, v)| v.sort == Sort::Field)
        .map(|(_, v)| *v)
        .collect();
    let mut disjuncts = Vec::new();
    'disjunct: for conj in dnf(&matrix, 512)? {
        // per-disjunct variable sets (re-sorting may move ring to field)
        let mut ring_set: BTreeSet<Var> = bound_ring.iter().copied().collect();
        let mut field_set: BTreeSet<Var> = bound_field.iter().copied().collect();
        let mut literals = conj;

        // resolve inF atoms on bound ring variables by re-sorting
        loop {
            let mut resort: Option<Var> = None;
            for lit in &literals {
                if let Formula::InF(Term::Var(v)) = lit {
                    if ring_set.contains(v) {
                        resort = Some(*v);
                        break;
                    } else if v.sort == Sort::Ring {
                        return Err(Error::UnsupportedFormula(format!(
                            "inF on free ring variable {v}"
                        )));
                    }
                }
            }
            let Some(v) = resort else { break };
            let a = fresh.field();
            let map: BTreeMap<Var, Term> = [(v, Term::var(a))].into_iter().collect();
            literals = literals.iter().map(|l| l.substitute(&map)).collect();
            ring_set.remove(&v);
            field_set.insert(a);
        }

        let bound: BTreeSet<Var> = ring_set.union(&field_set).copied().collect();
        let mut equations: Vec<(AdditivePoly, Term)> = Vec::new();
        let mut inequalities = Vec::new();
        let mut pred: Option<(SigmaPredicate, Vec<Term>)> = None;
        for lit in &literals {
            match lit {
                Formula::True => {}
                Formula::False => continue 'disjunct,
                Formula::InF(t) if t.is_f_pure() => {}
                Formula::InF(Term::Var(v)) if field_set.contains(v) => {}
                Formula::InF(t) => {
                    return Err(Error::UnsupportedFormula(format!(
                        "unresolved inF atom on `{t}`"
                    )))
                }
                Formula::Eq(t1, t2) => {
                    let s = Term::add(t1.clone(), Term::negate(t2.clone(), p));
                    let (add, residual) = split_term(&s, &bound, p);
                    equations.push((add, Term::negate(residual, p)));
                }
                Formula::Not(inner) => match inner.as_ref() {
                    Formula::Eq(t1, t2) => {
                        let s = Term::add(t1.clone(), Term::negate(t2.clone(), p));
                        let (add, residual) = split_term(&s, &bound, p);
                        let (e_ring, g_field) = add.split_sorts();
                        inequalities.push(EnfInequality {
                            e_ring,
                            g_field,
                            v: Term::negate(residual, p),
                        });
                    }
                    Formula::Pred(sigma, args) => {
                        conjoin_pred(&mut pred, &sigma.negate(), args, &mut fresh);
                    }
                    other => {
                        return Err(Error::UnsupportedFormula(format!(
                            "negated non-atom `{other}` after NNF"
                        )))
                    }
                },
                Formula::Pred(sigma, args) => {
                    conjoin_pred(&mut pred, sigma, args, &mut fresh);
                }
                other => {
                    return Err(Error::UnsupportedFormula(format!(
                        "unexpected literal `{other}`"
                    )))
                }
            }
        }

        // merge the equation system into a single equation by pairing
        let z_poly = Poly::z(&crate::gf::FieldSpec::prime_field(p)?);
        let combined = equations.into_iter().reduce(|(a1, u1), (a2, u2)| {
            let add = a1.frob_twist(1).add(&a2.frob_twist(1).scale(&z_poly));
            let u = Term::add(Term::frob(u1), Term::mulz(Term::frob(u2)));
            (add, u)
        });
        let (add, u) = combined.unwrap_or((AdditivePoly::zero(p), Term::Zero));
        let (f, h_field) = add.split_sorts();

        // sanity: no bound variable escaped into the free side
        for t in std::iter::once(&u).chain(inequalities.iter().map(|i| &i.v)) {
            if t.free_vars().iter().any(|v| bound.contains(v)) {
                return Err(Error::Internal(
                    "bound variable leaked into a free term".into(),
                ));
            }
        }

        let (sigma, sigma_args) =
            pred.unwrap_or_else(|| (SigmaPredicate::trivially_true(), Vec::new()));
        disjuncts.push(EnfDisjunct {
            f,
            h_field,
            u,
            inequalities,
            sigma,
            sigma_args,
            ring_vars: ring_set.into_iter().collect(),
            field_vars: field_set.into_iter().collect(),
        });
    }
    Ok(Enf { disjuncts })
}

/// The defining formula of `{x in R : |x| <= k} U {0}` as a bounded
/// existential formula with free variable `x`: a disjunction over the
/// denominator shapes `sh = prod s_i^(a_i)` of degree at most `k`, each
/// asserting `sh * x = sum_(i<=k) alpha_i z^i` for field values `alpha_i`.
pub fn bounded_height_formula(k: usize, loc: &Localization, x: Var) -> Result<Formula> {
    if x.sort != Sort::Ring {
        return Err(Error::Sort("height formula needs a ring variable".into()));
    }
    let prime = crate::gf::FieldSpec::prime_field(loc.spec().p())?;
    let mut shapes: Vec<Poly> = vec![Poly::one(&prime)];
    for s_poly in loc.s_polys() {
        let mut next = Vec::new();
        for sh in &shapes {
            let mut cur = sh.clone();
            loop {
                next.push(cur.clone());
                cur = cur.mul(s_poly);
                if cur.degree() > k {
                    break;
                }
            }
        }
        shapes = next;
    }
    shapes.retain(|sh| sh.degree() <= k);
    let mut out = Formula::False;
    let mut next_field = 0u32;
    for sh in shapes {
        let alphas: Vec<Var> = (0..=k).map(|_| {
            let v = Var::field(next_field);
            next_field += 1;
            v
        })
        .collect();
        let mut rhs = Term::Zero;
        for (i, a) in alphas.iter().enumerate() {
            rhs = Term::add(
                rhs,
                Term::mul_poly(&Poly::one(&prime).shift(i), Term::var(*a)),
            );
        }
        let body = Formula::Eq(Term::mul_poly(&sh, Term::var(x)), rhs);
        let clause = alphas
            .iter()
            .rev()
            .fold(body, |acc, a| Formula::exists(*a, acc));
        out = Formula::or(out, clause);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::logic::eval::{eval_bounded_over_r, BoundedEvaluator};
    use crate::logic::parser::parse_formula;
    use crate::sample::Rng;
    use std::sync::Arc;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    fn loc_z() -> Localization {
        Localization::new(&f2(), vec![Poly::z(&f2())]).unwrap()
    }

    #[test]
    fn single_equation_passthrough() {
        let loc = loc_z();
        let phi = parse_formula("exists x:R (z*x + x = z^2)", 2).unwrap();
        let enf = to_existential_normal_form(&phi, &loc).unwrap();
        assert_eq!(enf.disjuncts.len(), 1);
        let d = &enf.disjuncts[0];
        assert_eq!(d.ring_vars.len(), 1);
        assert!(d.inequalities.is_empty());
        assert!(!d.f.is_zero());
    }

    #[test]
    fn two_equations_merge_into_one() {
        let loc = loc_z();
        let phi = parse_formula("exists x:R exists y:R (x = 0 and y = 0)", 2).unwrap();
        let enf = to_existential_normal_form(&phi, &loc).unwrap();
        assert_eq!(enf.disjuncts.len(), 1);
        let d = &enf.disjuncts[0];
        // merged equation: x^p + z y^p = 0
        assert_eq!(d.f.degree(), 2);
        assert_eq!(d.f.vars().len(), 2);
    }

    #[test]
    fn negations_and_inf_eliminated() {
        let loc = loc_z();
        let phi = parse_formula("exists x:R (not inF(x))", 2).unwrap();
        let clean = eliminate_negations(&phi, &loc).unwrap();
        // no negated inF remains
        fn no_neg_inf(f: &Formula) -> bool {
            match f {
                Formula::Not(inner) => {
                    !matches!(inner.as_ref(), Formula::InF(_)) && no_neg_inf(inner)
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    no_neg_inf(a) && no_neg_inf(b)
                }
                Formula::Exists(_, f) | Formula::Forall(_, f) => no_neg_inf(f),
                _ => true,
            }
        }
        assert!(no_neg_inf(&clean));
        // idempotent on clean input
        let again = eliminate_negations(&clean, &loc).unwrap();
        assert_eq!(clean, again);
        // and the rewrite is height-faithful: both sides agree at cap 3
        let env = BTreeMap::new();
        let a = eval_bounded_over_r(&phi, &env, 3, &loc).unwrap();
        let b = eval_bounded_over_r(&clean, &env, 3, &loc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn enf_preserves_bounded_semantics() {
        let loc = loc_z();
        let cases = [
            "exists x:R (z*x = z^2 and x != 1)",
            "exists x:R exists a:F (x + a = z and x != 0)",
            "exists x:R (x = 0 or x = 1)",
            "exists x:R exists y:R (x + y = z and x != y)",
            "exists a:F (a != 0 and P{b + b = 0}(a))",
        ];
        let env = BTreeMap::new();
        for src in cases {
            let phi = parse_formula(src, 2).unwrap();
            let enf = to_existential_normal_form(&phi, &loc).unwrap();
            let back = enf.to_formula();
            for cap in [2usize, 3] {
                let a = eval_bounded_over_r(&phi, &env, cap, &loc).unwrap();
                let b = eval_bounded_over_r(&back, &env, cap, &loc).unwrap();
                assert_eq!(a, b, "mismatch for `{src}` at cap {cap}");
            }
        }
    }

    #[test]
    fn enf_random_formulas_bounded_equivalence() {
        let loc = loc_z();
        let mut rng = Rng::new(2025);
        let env = BTreeMap::new();
        // random small existential formulas over one or two ring variables
        for round in 0..50 {
            let phi = random_existential(&mut rng);
            let Ok(enf) = to_existential_normal_form(&phi, &loc) else {
                continue;
            };
            let back = enf.to_formula();
            let a = eval_bounded_over_r(&phi, &env, 2, &loc).unwrap();
            let b = eval_bounded_over_r(&back, &env, 2, &loc).unwrap();
            assert_eq!(a, b, "round {round}: `{phi}` vs `{back}`");
        }
    }

    fn random_existential(rng: &mut Rng) -> Formula {
        let x = Var::ring(0);
        let y = Var::ring(1);
        let prime = f2();
        let rand_term = |rng: &mut Rng| -> Term {
            let mut t = match rng.below(4) {
                0 => Term::var(x),
                1 => Term::var(y),
                2 => Term::One,
                _ => Term::mulz(Term::var(x)),
            };
            if rng.below(2) == 0 {
                t = Term::frob(t);
            }
            if rng.below(2) == 0 {
                t = Term::add(t, Term::mul_poly(&Poly::z(&prime), Term::var(y)));
            }
            t
        };
        let mut atoms = Vec::new();
        for _ in 0..=rng.below(2) {
            let lhs = rand_term(rng);
            let rhs = match rng.below(3) {
                0 => Term::Zero,
                1 => Term::One,
                _ => Term::mulz(Term::One),
            };
            let eq = Formula::Eq(lhs, rhs);
            atoms.push(if rng.below(3) == 0 {
                Formula::not(eq)
            } else {
                eq
            });
        }
        let matrix = if atoms.len() == 2 && rng.below(2) == 0 {
            Formula::or(atoms[0].clone(), atoms[1].clone())
        } else {
            Formula::conjunction(atoms)
        };
        Formula::exists(x, Formula::exists(y, matrix))
    }

    #[test]
    fn bounded_height_formula_exact_at_desk_scale() {
        let loc = loc_z();
        let k = 2usize;
        let x = Var::ring(5);
        let phi = bounded_height_formula(k, &loc, x).unwrap();
        // evaluate over a wider domain and compare with the true set
        let eval = BoundedEvaluator::new(&loc, 4).unwrap();
        for val in eval.ring_domain() {
            let mut env = BTreeMap::new();
            env.insert(x, val.clone());
            let defined = eval.eval(&phi, &env).unwrap();
            let truth = val.is_zero() || val.height().unwrap() <= k as u64;
            assert_eq!(defined, truth, "value {val}");
        }
    }
}
