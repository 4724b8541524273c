//! Sentence reduction: every sentence of the full language is equivalent,
//! over the localized ring, to `P_sigma` for a sentence `sigma` of `L_p` —
//! a question about the coefficient field alone.
//!
//! Pipeline: bring the sentence to existential form (through the universal
//! transform when quantifier alternations are present), take the
//! existential normal form, then per disjunct: inequalities carried by ring
//! variables outside the equation hold for some choice of those variables
//! because the ring is an infinite domain; the variables of the normalized
//! equation are height-bounded and become field-variable expansions; what
//! remains is packaged coefficient-wise into one `L_p` sentence.

use crate::additive::{AdditivePoly, Var};
use crate::bounds::height_bound_relaxed;
use crate::error::{Error, Result};
use crate::logic::ast::{Formula, SigmaPredicate, Term};
use crate::logic::enf::{
    eliminate_negations, prenex, to_existential_normal_form, EnfDisjunct, EnfInequality,
    FreshVars,
};
use crate::logic::transform::{
    transform_existential, universalize_bounded, BoundedExistential, TransformCaps,
};
use crate::normalize::normalize_full_from;
use crate::ratfun::rational::Localization;
use std::collections::{BTreeMap, BTreeSet};

/// Rewrites a sentence into an equivalent existential sentence
/// (quantifier prefix all-existential over a quantifier-free matrix).
fn make_existential(
    phi: &Formula,
    loc: &Localization,
    caps: &TransformCaps,
) -> Result<(Vec<Var>, Formula, FreshVars)> {
    let clean = eliminate_negations(phi, loc)?;
    let mut fresh = FreshVars::beyond(&clean);
    let (mut prefix, mut matrix) = prenex(&clean, &mut fresh);
    for _round in 0..caps.max_rounds {
        if prefix.iter().all(|(is_forall, _)| !*is_forall) {
            let vars: Vec<Var> = prefix.iter().map(|(_, v)| *v).collect();
            return Ok((vars, matrix, fresh));
        }
        let last_kind = prefix.last().expect("nonempty").0;
        let split = prefix
            .iter()
            .rposition(|(k, _)| *k != last_kind)
            .map(|i| i + 1)
            .unwrap_or(0);
        let run: Vec<Var> = prefix[split..].iter().map(|(_, v)| *v).collect();
        prefix.truncate(split);
        if last_kind {
            // innermost universal block: dualize through the existential
            // transform
            let inner = Formula::exists_all(&run, Formula::not(matrix.clone()));
            let univ = transform_existential(&inner, loc, &mut fresh, caps)?;
            let (uprefix, umatrix) = prenex(&univ, &mut fresh);
            for (is_forall, v) in uprefix {
                debug_assert!(is_forall);
                prefix.push((false, v));
            }
            matrix = Formula::not(umatrix);
        } else {
            // an existential block under universals becomes universal and
            // merges upward
            let inner = Formula::exists_all(&run, matrix.clone());
            let univ = transform_existential(&inner, loc, &mut fresh, caps)?;
            let (uprefix, umatrix) = prenex(&univ, &mut fresh);
            for (is_forall, v) in uprefix {
                debug_assert!(is_forall);
                prefix.push((true, v));
            }
            matrix = umatrix;
        }
    }
    Err(Error::ResourceCap(
        "alternation elimination exceeded the round cap".into(),
    ))
}

/// One disjunct of a closed existential normal form, as a closed `L_p`
/// formula equivalent to it over the ring.
fn disjunct_to_sigma(
    d: &EnfDisjunct,
    loc: &Localization,
    fresh: &mut FreshVars,
    caps: &TransformCaps,
) -> Result<Formula> {
    let p = loc.spec().p();
    let spec = loc.spec();

    // sentences have concrete u and v_j
    for t in std::iter::once(&d.u).chain(d.inequalities.iter().map(|i| &i.v)) {
        if !t.free_vars().is_empty() {
            return Err(Error::UnsupportedFormula(
                "sentence reduction requires closed terms".into(),
            ));
        }
    }

    // inequalities over ring variables outside f are simultaneously
    // satisfiable in the infinite ring: drop them with their variables
    let f_vars: BTreeSet<Var> = d.f.ring_vars().into_iter().collect();
    let kept: Vec<EnfInequality> = d
        .inequalities
        .iter()
        .filter(|i| i.e_ring.vars().iter().all(|v| f_vars.contains(v)))
        .cloned()
        .collect();

    let block = if d.f.is_zero() {
        let mut equations = Vec::new();
        if !(d.h_field.is_zero() && d.u == Term::Zero) {
            equations.push((d.h_field.clone(), d.u.clone()));
        }
        BoundedExistential {
            p,
            exists_field: d.field_vars.clone(),
            equations,
            inequalities: kept
                .iter()
                .map(|i| (i.g_field.clone(), i.v.clone()))
                .collect(),
            sigma: d.sigma.clone(),
            sigma_args: d.sigma_args.clone(),
        }
    } else {
        // normalize f and rewrite through the transformation
        let res = normalize_full_from(&d.f, fresh.ring().index, fresh.field().index)?;
        for v in res.f_tilde.vars().into_iter().chain(res.g_field.vars()) {
            fresh.bump(v);
        }
        for (t, c) in res.xi.components() {
            fresh.bump(*t);
            for v in c.vars() {
                fresh.bump(v);
            }
        }
        let f_t = res.f_tilde.clone();
        let h_prime = d.h_field.add(&res.g_field);
        let mut ineqs_t: Vec<EnfInequality> = Vec::new();
        let ft_vars: BTreeSet<Var> = f_t.ring_vars().into_iter().collect();
        for i in &kept {
            let composed = i.e_ring.substitute(res.xi.components());
            let (e_ring, extra_field) = composed.split_sorts();
            // ring variables that dropped out of the normalized polynomial
            // carry their inequalities into the infinite-domain argument
            if !e_ring.vars().iter().all(|v| ft_vars.contains(v)) {
                continue;
            }
            ineqs_t.push(EnfInequality {
                e_ring,
                g_field: i.g_field.add(&extra_field),
                v: i.v.clone(),
            });
        }

        // height bound for the solutions of f(x) = u - H'(beta)
        let u_val = d.u.eval(&BTreeMap::new(), spec)?;
        if !u_val.is_polynomial() {
            return Err(Error::Internal("closed term with a denominator".into()));
        }
        let u_deg = if u_val.is_zero() {
            0
        } else {
            u_val.num().degree() as u64
        };
        let ell = u_deg.max(h_prime.max_coeff_degree() as u64);
        let b = height_bound_relaxed(&f_t, ell, loc)?;
        let e_poly = loc.e_product();
        let s_lift = f_t.max_level();
        let d_b = (b as usize) * (1 + e_poly.degree());

        // substitute every equation variable by its field expansion
        let mut subst: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
        let mut mu_vars = Vec::new();
        for v in f_t.ring_vars() {
            let mus: Vec<Var> = (0..=d_b).map(|_| fresh.field()).collect();
            mu_vars.extend(mus.iter().copied());
            subst.insert(v, mus);
        }
        let scale = e_poly.pow(b * p.pow(s_lift));
        let eq_side = substitute_all(&f_t, &subst, b, &e_poly, s_lift)
            .add(&h_prime.scale(&scale));
        let eq_rhs = Term::mul_poly(&scale, d.u.clone());
        let mut equations = vec![(eq_side, eq_rhs)];
        equations.retain(|(a, v)| !(a.is_zero() && *v == Term::Zero));
        let mut inequalities = Vec::new();
        for i in &ineqs_t {
            let lvl = i.e_ring.max_level();
            let scale_j = e_poly.pow(b * p.pow(lvl));
            let lhs = substitute_all(&i.e_ring, &subst, b, &e_poly, lvl)
                .add(&i.g_field.scale(&scale_j));
            let rhs = Term::mul_poly(&scale_j, i.v.clone());
            inequalities.push((lhs, rhs));
        }
        let mut exists_field = d.field_vars.clone();
        for v in h_prime.field_vars() {
            if !exists_field.contains(&v) {
                exists_field.push(v);
            }
        }
        exists_field.extend(mu_vars.iter().copied());
        BoundedExistential {
            p,
            exists_field,
            equations,
            inequalities,
            sigma: d.sigma.clone(),
            sigma_args: d.sigma_args.clone(),
        }
    };

    // all atoms are closed on the term side, so the universalization is a
    // single packaged predicate
    match universalize_bounded(&block, loc, fresh, caps)? {
        Formula::Pred(tau, args) => {
            if !args.is_empty() {
                return Err(Error::Internal(
                    "sentence package has free parameters".into(),
                ));
            }
            Ok(*tau.body)
        }
        other => Err(Error::Internal(format!(
            "sentence package was not closed: {other}"
        ))),
    }
}

fn substitute_all(
    a: &AdditivePoly,
    subst: &BTreeMap<Var, Vec<Var>>,
    b_exp: u64,
    e_poly: &crate::ratfun::poly::Poly,
    lift: u32,
) -> AdditivePoly {
    let p = a.p();
    let mut out = AdditivePoly::zero(p);
    for v in a.vars() {
        for (lvl, coeff) in a.levels_of(v).unwrap() {
            match subst.get(&v) {
                None => {
                    let factor = e_poly.pow(b_exp * p.pow(lift));
                    out.add_term(v, *lvl, coeff.mul(&factor));
                }
                Some(mus) => {
                    let factor = e_poly.pow(b_exp * (p.pow(lift) - p.pow(*lvl)));
                    for (k, mu) in mus.iter().enumerate() {
                        let shifted = coeff.mul(&factor).shift(k * p.pow(*lvl) as usize);
                        out.add_term(*mu, *lvl, shifted);
                    }
                }
            }
        }
    }
    out
}

/// Reduces a sentence of the full language to a sentence `sigma` of `L_p`:
/// the input is true in the ring if and only if `sigma` is true in the
/// coefficient field.
pub fn sentence_to_sigma(
    phi: &Formula,
    loc: &Localization,
    caps: &TransformCaps,
) -> Result<SigmaPredicate> {
    phi.sort_check()?;
    if !phi.free_vars().is_empty() {
        return Err(Error::UnsupportedFormula(
            "sentence reduction needs a closed formula".into(),
        ));
    }
    let (vars, matrix, mut fresh) = make_existential(phi, loc, caps)?;
    let existential = Formula::exists_all(&vars, matrix);
    let enf = to_existential_normal_form(&existential, loc)?;
    if enf.disjuncts.len() > caps.max_disjuncts {
        return Err(Error::ResourceCap("too many disjuncts".into()));
    }
    let mut body = Formula::False;
    for d in &enf.disjuncts {
        body = Formula::or(body, disjunct_to_sigma(d, loc, &mut fresh, caps)?);
    }
    SigmaPredicate::new(Vec::new(), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::logic::eval::eval_sigma_over_f;
    use crate::logic::parser::parse_formula;
    use crate::ratfun::poly::Poly;
    use std::sync::Arc;

    fn loc_p(p: u64) -> Localization {
        let spec = FieldSpec::prime_field(p).unwrap();
        let prime = FieldSpec::prime_field(p).unwrap();
        Localization::new(&spec, vec![Poly::z(&prime)]).unwrap()
    }

    fn truth(src: &str, p: u64, spec: &Arc<FieldSpec>) -> bool {
        let base = FieldSpec::prime_field(p).unwrap();
        let loc = Localization::new(spec, vec![Poly::z(&base)]).unwrap();
        let phi = parse_formula(src, p).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        eval_sigma_over_f(&sigma, &[], spec).unwrap()
    }

    #[test]
    fn char2_vs_char3_doubling() {
        // exists x (x + x = 0 and x != 0): true in char 2, false in char 3
        let f2 = FieldSpec::prime_field(2).unwrap();
        assert!(truth("exists x:R (x + x = 0 and x != 0)", 2, &f2));
        let f3 = FieldSpec::prime_field(3).unwrap();
        assert!(!truth("exists x:R (x + x = 0 and x != 0)", 3, &f3));
    }

    #[test]
    fn field_cardinality_probe() {
        // exists a in F, not 0 or 1, fixed by Frobenius-power-1
        let src = "exists a:F (a != 0 and a != 1 and a^p = a)";
        let f2 = FieldSpec::prime_field(2).unwrap();
        assert!(!truth(src, 2, &f2));
        let f4 = FieldSpec::default_for(2, 2).unwrap();
        // over F_4, a^2 = a only for the prime subfield, so still false;
        // the probe without the Frobenius fixes finds the extra elements
        assert!(!truth(src, 2, &f4));
        let src2 = "exists a:F (a != 0 and a != 1)";
        assert!(!truth(src2, 2, &f2));
        assert!(truth(src2, 2, &f4));
    }

    #[test]
    fn solvability_with_pole() {
        let loc = loc_p(2);
        // exists x (z*x = 1): 1/z is in R
        let phi = parse_formula("exists x:R (z*x = 1)", 2).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        assert!(eval_sigma_over_f(&sigma, &[], loc.spec()).unwrap());
        // exists x (poly{z+1}*x = 1): 1/(z+1) is not in R
        let phi = parse_formula("exists x:R (poly{1+z}*x = 1)", 2).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        assert!(!eval_sigma_over_f(&sigma, &[], loc.spec()).unwrap());
    }

    #[test]
    fn universal_sentence_through_dualization() {
        let loc = loc_p(2);
        let phi = parse_formula("forall x:R (x + x = 0)", 2).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        assert!(eval_sigma_over_f(&sigma, &[], loc.spec()).unwrap());
        let phi = parse_formula("forall x:R (x = 0)", 2).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        assert!(!eval_sigma_over_f(&sigma, &[], loc.spec()).unwrap());
    }

    #[test]
    fn two_alternations() {
        let loc = loc_p(3);
        // forall x exists y (y + y = x): y = 2x works in char 3
        let phi = parse_formula("forall x:R exists y:R (y + y = x)", 3).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default()).unwrap();
        assert!(eval_sigma_over_f(&sigma, &[], loc.spec()).unwrap());
        // char 2: y + y = 0 != x in general
        let loc2 = loc_p(2);
        let phi = parse_formula("forall x:R exists y:R (y + y = x)", 2).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc2, &TransformCaps::default()).unwrap();
        assert!(!eval_sigma_over_f(&sigma, &[], loc2.spec()).unwrap());
    }
}
