//! The transformation pipeline: the two image-membership rewrites, the
//! universalization of bounded existential formulas, and the driver that
//! converts any formula to a universal one by induction on quantifier
//! alternations.

use crate::additive::{AdditivePoly, Assignment, Sort, Var};
use crate::bounds::{e_ord, height_bound_relaxed};
use crate::error::{Error, Result};
use crate::logic::ast::{
    additive_to_flincomb, additive_to_term, flincomb_eq, flincomb_neq, term_to_flincomb,
    Formula, SigmaPredicate, Term,
};
use crate::logic::enf::{
    eliminate_negations, prenex, to_existential_normal_form, EnfDisjunct, EnfInequality,
    FreshVars,
};
use crate::normalize::{normalize_full_from, p_basic_completion_from, NormalizationResult};
use crate::ratfun::factor::smallest_irreducible_avoiding;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::Localization;
use std::collections::{BTreeMap, BTreeSet};

/// Resource limits for the formula transformations; outputs can be
/// exponentially larger than inputs (the subset disjunction), so every
/// stage is capped.
#[derive(Debug, Clone, Copy)]
pub struct TransformCaps {
    pub max_disjuncts: usize,
    /// Cap on expanded inequalities per bounded block (the subset
    /// disjunction is exponential in this).
    pub max_inequalities: usize,
    pub max_rounds: usize,
}

impl Default for TransformCaps {
    fn default() -> TransformCaps {
        TransformCaps {
            max_disjuncts: 256,
            max_inequalities: 10,
            max_rounds: 16,
        }
    }
}

fn prime_one(p: u64) -> Poly {
    Poly::one(&crate::gf::FieldSpec::prime_field(p).expect("prime"))
}

/// A bounded existential block: field-sorted existentials over a
/// quantifier-free conjunction of additive (in)equations and one
/// `P_sigma` atom. All ring content sits on the term side of the atoms.
#[derive(Debug, Clone)]
pub struct BoundedExistential {
    pub p: u64,
    pub exists_field: Vec<Var>,
    /// `A = v` with `A` additive over field variables and `v` free of the
    /// bound variables.
    pub equations: Vec<(AdditivePoly, Term)>,
    /// `A != v`.
    pub inequalities: Vec<(AdditivePoly, Term)>,
    pub sigma: SigmaPredicate,
    pub sigma_args: Vec<Term>,
}

impl BoundedExistential {
    pub fn to_formula(&self) -> Formula {
        let mut body = Formula::True;
        for (a, v) in &self.equations {
            body = Formula::and(body, Formula::Eq(additive_to_term(a), v.clone()));
        }
        for (a, v) in &self.inequalities {
            body = Formula::and(
                body,
                Formula::not(Formula::Eq(additive_to_term(a), v.clone())),
            );
        }
        body = Formula::and(
            body,
            Formula::Pred(self.sigma.clone(), self.sigma_args.clone()),
        );
        Formula::exists_all(&self.exists_field, body)
    }

    fn validate(&self) -> Result<()> {
        let bound: BTreeSet<Var> = self.exists_field.iter().copied().collect();
        if bound.iter().any(|v| v.sort != Sort::Field) {
            return Err(Error::Sort("bounded block binds a ring variable".into()));
        }
        for (a, v) in self.equations.iter().chain(&self.inequalities) {
            if a.vars().iter().any(|w| w.sort != Sort::Field) {
                return Err(Error::Sort(
                    "additive side of a bounded atom has a ring variable".into(),
                ));
            }
            if v.free_vars().iter().any(|w| bound.contains(w)) {
                return Err(Error::Sort(
                    "bound variable on the term side of a bounded atom".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Packages an inner conjunction as a `P_sigma` atom: the existential over
/// the block's field variables of per-degree coefficient comparisons, with
/// the original sigma inlined.
fn package_sigma(
    exists_field: &[Var],
    direct_eqs: &[(BTreeMap<usize, Term>, BTreeMap<usize, Term>)],
    direct_neqs: &[(BTreeMap<usize, Term>, BTreeMap<usize, Term>)],
    sigma: &SigmaPredicate,
    sigma_args: &[Term],
) -> Result<(SigmaPredicate, Vec<Term>)> {
    let mut body = Formula::True;
    for (lhs, rhs) in direct_eqs {
        body = Formula::and(body, flincomb_eq(lhs, rhs));
    }
    for (lhs, rhs) in direct_neqs {
        body = Formula::and(body, flincomb_neq(lhs, rhs));
    }
    if sigma.params.len() != sigma_args.len() {
        return Err(Error::ArityMismatch {
            expected: sigma.params.len(),
            got: sigma_args.len(),
        });
    }
    let map: BTreeMap<Var, Term> = sigma
        .params
        .iter()
        .zip(sigma_args)
        .map(|(p, a)| (*p, a.clone()))
        .collect();
    body = Formula::and(body, sigma.body.substitute(&map));
    let inner = Formula::exists_all(exists_field, body);
    let params: Vec<Var> = inner.free_vars().into_iter().collect();
    for v in &params {
        if v.sort != Sort::Field {
            return Err(Error::Sort(format!(
                "ring variable {v} escaped into a sigma package"
            )));
        }
    }
    let args = params.iter().map(|v| Term::var(*v)).collect();
    Ok((SigmaPredicate::new(params, inner)?, args))
}

/// Universalization of a bounded existential block.
///
/// Atoms whose term side is F-pure are packaged directly into the
/// `P_sigma` index. Atoms with ring content get a base-`Q` expansion
/// `v_j = t_j + Q^(M+1) y_j` with fresh field variables inside `t_j` and a
/// fresh ring variable `y_j`; under that hypothesis an inequality is
/// equivalent to `y_j != 0 or G_j != t_j` and an equation to
/// `y_j = 0 and G_j = t_j` (coefficient-wise over the powers of `z`),
/// which yields a universal formula with a disjunction over the subsets of
/// discharged inequalities.
pub fn universalize_bounded(
    block: &BoundedExistential,
    loc: &Localization,
    fresh: &mut FreshVars,
    caps: &TransformCaps,
) -> Result<Formula> {
    block.validate()?;
    let p = block.p;
    let one = prime_one(p);

    // an atom is directly packageable exactly when its term side carries
    // no ring variable: closed z-structure decomposes coefficient-wise
    let is_direct = |t: &Term| t.free_vars().iter().all(|v| v.sort == Sort::Field);
    let mut direct_eqs = Vec::new();
    let mut direct_neqs = Vec::new();
    let mut exp_eqs: Vec<(&AdditivePoly, &Term)> = Vec::new();
    let mut exp_neqs: Vec<(&AdditivePoly, &Term)> = Vec::new();
    for (a, v) in &block.equations {
        if is_direct(v) {
            direct_eqs.push((additive_to_flincomb(a)?, term_to_flincomb(v, p)?));
        } else {
            exp_eqs.push((a, v));
        }
    }
    for (a, v) in &block.inequalities {
        if is_direct(v) {
            direct_neqs.push((additive_to_flincomb(a)?, term_to_flincomb(v, p)?));
        } else {
            exp_neqs.push((a, v));
        }
    }

    if exp_eqs.is_empty() && exp_neqs.is_empty() {
        let (tau, args) = package_sigma(
            &block.exists_field,
            &direct_eqs,
            &direct_neqs,
            &block.sigma,
            &block.sigma_args,
        )?;
        return Ok(Formula::Pred(tau, args));
    }
    if exp_neqs.len() > caps.max_inequalities {
        return Err(Error::ResourceCap(format!(
            "{} expanded inequalities exceed the subset cap",
            exp_neqs.len()
        )));
    }

    // shared expansion data: M bounds the z-degree of every additive side
    let m_deg = exp_eqs
        .iter()
        .chain(exp_neqs.iter())
        .map(|(a, _)| a.max_coeff_degree())
        .max()
        .unwrap_or(0);
    let q_poly = smallest_irreducible_avoiding(loc.spec(), loc.s_polys())?;
    let d = q_poly.degree();

    struct Expansion {
        t_fl: BTreeMap<usize, Term>,
        mu_vars: Vec<Var>,
        y: Var,
        hyp: Formula,
    }
    let build = |a_v: &(&AdditivePoly, &Term),
                     fresh: &mut FreshVars|
     -> Result<(Expansion, BTreeMap<usize, Term>)> {
        let (a, v) = *a_v;
        let mut t_term = Term::Zero;
        let mut mu_vars = Vec::new();
        for i in 0..=m_deg {
            let mut mu_term = Term::Zero;
            for k in 0..d {
                let mu = fresh.field();
                mu_vars.push(mu);
                mu_term = Term::add(mu_term, Term::mul_poly(&one.shift(k), Term::var(mu)));
            }
            t_term = Term::add(t_term, Term::mul_poly(&q_poly.pow(i as u64), mu_term));
        }
        let y = fresh.ring();
        let rhs = Term::add(
            t_term.clone(),
            Term::mul_poly(&q_poly.pow(m_deg as u64 + 1), Term::var(y)),
        );
        let hyp = Formula::Eq((*v).clone(), rhs);
        let t_fl = term_to_flincomb(&t_term, p)?;
        Ok((
            Expansion {
                t_fl,
                mu_vars,
                y,
                hyp,
            },
            additive_to_flincomb(a)?,
        ))
    };

    let mut eq_parts = Vec::new();
    for av in &exp_eqs {
        eq_parts.push(build(av, fresh)?);
    }
    let mut neq_parts = Vec::new();
    for av in &exp_neqs {
        neq_parts.push(build(av, fresh)?);
    }

    let mut hyp = Formula::True;
    for (e, _) in eq_parts.iter().chain(neq_parts.iter()) {
        hyp = Formula::and(hyp, e.hyp.clone());
    }

    let n_ineq = neq_parts.len();
    let mut branches = Formula::False;
    for mask in 0..(1u64 << n_ineq) {
        let mut branch = Formula::True;
        for (e, _) in &eq_parts {
            branch = Formula::and(branch, Formula::Eq(Term::var(e.y), Term::Zero));
        }
        for (j, (e, _)) in neq_parts.iter().enumerate() {
            let cond = if mask >> j & 1 == 1 {
                Formula::not(Formula::Eq(Term::var(e.y), Term::Zero))
            } else {
                Formula::Eq(Term::var(e.y), Term::Zero)
            };
            branch = Formula::and(branch, cond);
        }
        let mut eqs = direct_eqs.clone();
        for (e, a_fl) in &eq_parts {
            eqs.push((a_fl.clone(), e.t_fl.clone()));
        }
        let mut neqs = direct_neqs.clone();
        for (j, (e, a_fl)) in neq_parts.iter().enumerate() {
            if mask >> j & 1 == 0 {
                neqs.push((a_fl.clone(), e.t_fl.clone()));
            }
        }
        let (tau, args) = package_sigma(
            &block.exists_field,
            &eqs,
            &neqs,
            &block.sigma,
            &block.sigma_args,
        )?;
        branch = Formula::and(branch, Formula::Pred(tau, args));
        branches = Formula::or(branches, branch);
    }

    let mut uvars: Vec<Var> = Vec::new();
    for (e, _) in eq_parts.iter().chain(neq_parts.iter()) {
        uvars.extend(e.mu_vars.iter().copied());
        uvars.push(e.y);
    }
    uvars.sort();
    uvars.dedup();
    Ok(Formula::forall_all(&uvars, Formula::implies(hyp, branches)))
}

/// Data of the first membership rewrite: `u in Im(f) + Im_F(H)` as the
/// universal formula `phi1`, valid under
/// `R = Im(f) + Im(h) + Im_F((1/e^N) G)`.
#[derive(Debug, Clone)]
pub struct Logic1Data {
    pub f: AdditivePoly,
    pub h: AdditivePoly,
    pub h_field: AdditivePoly,
    pub u: Term,
    pub e_poly: Poly,
    pub n_exp: u64,
    pub g_vars: Vec<Var>,
    pub x_under: Vec<Var>,
    pub w_vars: Vec<Var>,
    pub alpha_vars: Vec<Var>,
    /// The raw inner existential `pi_1`.
    pub pi1: Formula,
    /// The hypothesis equation of the outer universal.
    pub hyp: Formula,
    /// `forall x, y, gamma (hyp -> pi1)`.
    pub phi1: Formula,
}

fn rename_list(vars: &[Var], fresh: &mut FreshVars) -> (Vec<Var>, BTreeMap<Var, Var>) {
    let mut out = Vec::with_capacity(vars.len());
    let mut map = BTreeMap::new();
    for v in vars {
        let nv = match v.sort {
            Sort::Ring => fresh.ring(),
            Sort::Field => fresh.field(),
        };
        out.push(nv);
        map.insert(*v, nv);
    }
    (out, map)
}

fn g_term(g_vars: &[Var], one: &Poly) -> Term {
    let mut acc = Term::Zero;
    for (i, g) in g_vars.iter().enumerate() {
        acc = Term::add(acc, Term::mul_poly(&one.shift(i), Term::var(*g)));
    }
    acc
}

/// Emits `phi_1`: with `f` and `h` additive of the same degree over
/// disjoint ring variables and jointly p-basic, `H` additive over field
/// variables and `u` a term, the membership `u in Im(f) + Im_F(H)` is
/// equivalent to
///
/// `forall x, y, gamma [ u = f(x) + h(y) + (1/e^N) G(gamma)  ->
///     exists w, alpha ( f(w) + h(y) + (1/e^N) G(gamma) = H(alpha) ) ]`
///
/// with denominators cleared by `e^N`; `e` is the product of `S`,
/// `N = E_ord(f + h)` and `G(gamma) = sum_(i <= N(1+deg e)) gamma_i z^i`.
pub fn logic1_transform(
    f: &AdditivePoly,
    h: &AdditivePoly,
    h_field: &AdditivePoly,
    u: &Term,
    loc: &Localization,
    fresh: &mut FreshVars,
) -> Result<Logic1Data> {
    let combined = f.add(h);
    let report = e_ord(&combined)?; // validates p-basic
    let n_exp = report.eord;
    let e_poly = loc.e_product();
    let one = prime_one(f.p());
    let d_cap = (n_exp as usize) * (1 + e_poly.degree());
    let g_vars: Vec<Var> = (0..=d_cap).map(|_| fresh.field()).collect();

    let f_vars = f.ring_vars();
    let (x_under, x_map) = rename_list(&f_vars, fresh);
    let (w_vars, w_map) = rename_list(&f_vars, fresh);
    let h_vars = h_field.field_vars();
    let (alpha_vars, a_map) = rename_list(&h_vars, fresh);

    let e_n = e_poly.pow(n_exp);
    let scale = |t: Term| -> Term { Term::mul_poly(&e_n, t) };

    let fx = additive_to_term(&f.rename_vars(&x_map));
    let fw = additive_to_term(&f.rename_vars(&w_map));
    let hy = additive_to_term(h);
    let h_alpha = additive_to_term(&h_field.rename_vars(&a_map));
    let g_of_gamma = g_term(&g_vars, &one);

    let hyp = Formula::Eq(
        scale(u.clone()),
        Term::add(Term::add(scale(fx), scale(hy.clone())), g_of_gamma.clone()),
    );
    let pi1_body = Formula::Eq(
        Term::add(Term::add(scale(fw), scale(hy)), g_of_gamma),
        scale(h_alpha),
    );
    let mut pi1 = Formula::exists_all(&alpha_vars, pi1_body);
    pi1 = Formula::exists_all(&w_vars, pi1);

    let mut outer_vars = x_under.clone();
    outer_vars.extend(h.ring_vars());
    outer_vars.extend(g_vars.iter().copied());
    let phi1 = Formula::forall_all(&outer_vars, Formula::implies(hyp.clone(), pi1.clone()));

    Ok(Logic1Data {
        f: f.clone(),
        h: h.clone(),
        h_field: h_field.clone(),
        u: u.clone(),
        e_poly,
        n_exp,
        g_vars,
        x_under,
        w_vars,
        alpha_vars,
        pi1,
        hyp,
        phi1,
    })
}

fn componentwise(
    vars_out: &[Var],
    a: &Assignment,
    vars_a: &[Var],
    b: &Assignment,
    vars_b: &[Var],
    subtract: bool,
) -> Result<Assignment> {
    let mut out = BTreeMap::new();
    for ((vo, va), vb) in vars_out.iter().zip(vars_a).zip(vars_b) {
        let x = a
            .get(va)
            .ok_or_else(|| Error::UnassignedVariable(va.to_string()))?;
        let y = b
            .get(vb)
            .ok_or_else(|| Error::UnassignedVariable(vb.to_string()))?;
        out.insert(*vo, if subtract { x.sub(y) } else { x.add(y) });
    }
    Ok(out)
}

impl Logic1Data {
    /// Forward witness map: from a membership witness `x` (keyed by the
    /// variables of `f`) and a decomposition point `x_under`, the values
    /// `w = x_under - x` keyed by `w_vars`.
    pub fn forward_w(&self, x: &Assignment, x_under: &Assignment) -> Result<Assignment> {
        componentwise(
            &self.w_vars,
            x_under,
            &self.x_under,
            x,
            &self.f.ring_vars(),
            true,
        )
    }

    /// Backward witness map: `x = x_under - w`, keyed by the variables of
    /// `f`.
    pub fn backward_x(&self, x_under: &Assignment, w: &Assignment) -> Result<Assignment> {
        componentwise(
            &self.f.ring_vars(),
            x_under,
            &self.x_under,
            w,
            &self.w_vars,
            true,
        )
    }
}

/// Data of the second rewrite: the full disjunct becomes
/// `phi_2 = [u in Im(f) + Im_F(H)] /\ forall w, beta [f(w) + H(beta) = u
/// -> pi_2]`, the membership expressed through [`logic1_transform`].
#[derive(Debug, Clone)]
pub struct Logic2Data {
    pub f: AdditivePoly,
    pub h_field: AdditivePoly,
    pub u: Term,
    pub w_vars: Vec<Var>,
    pub beta_vars: Vec<Var>,
    pub t_vars: Vec<Var>,
    pub gamma_vars: Vec<Var>,
    pub logic1: Logic1Data,
    pub pi2: Formula,
    pub hyp2: Formula,
    /// `forall w, beta (hyp2 -> pi2)`.
    pub universal_part: Formula,
    pub phi2: Formula,
}

pub fn logic2_transform(
    d: &EnfDisjunct,
    loc: &Localization,
    fresh: &mut FreshVars,
) -> Result<Logic2Data> {
    let p = loc.spec().p();
    let f = &d.f;
    let h = p_basic_completion_from(f, fresh.ring().index)?;
    for v in h.vars() {
        fresh.bump(v);
    }
    let logic1 = logic1_transform(f, &h, &d.h_field, &d.u, loc, fresh)?;

    let f_vars = f.ring_vars();
    let h_vars = d.h_field.field_vars();
    let (w_vars, w_map) = rename_list(&f_vars, fresh);
    let (beta_vars, b_map) = rename_list(&h_vars, fresh);
    let (t_vars, t_map) = rename_list(&f_vars, fresh);
    let (gamma_vars, g_map) = rename_list(&h_vars, fresh);

    let hyp2 = Formula::Eq(
        Term::add(
            additive_to_term(&f.rename_vars(&w_map)),
            additive_to_term(&d.h_field.rename_vars(&b_map)),
        ),
        d.u.clone(),
    );

    // pi_2: exists t, gamma [ f(t) + H(gamma) = 0
    //   /\_j e_j(t) + G_j(gamma) != v_j - e_j(w) - G_j(beta)
    //   /\ P_sigma(beta + gamma) ]
    let mut body = Formula::Eq(
        Term::add(
            additive_to_term(&f.rename_vars(&t_map)),
            additive_to_term(&d.h_field.rename_vars(&g_map)),
        ),
        Term::Zero,
    );
    for ineq in &d.inequalities {
        let lhs = Term::add(
            additive_to_term(&ineq.e_ring.rename_vars(&t_map)),
            additive_to_term(&ineq.g_field.rename_vars(&g_map)),
        );
        let rhs = Term::add(
            ineq.v.clone(),
            Term::negate(
                Term::add(
                    additive_to_term(&ineq.e_ring.rename_vars(&w_map)),
                    additive_to_term(&ineq.g_field.rename_vars(&b_map)),
                ),
                p,
            ),
        );
        body = Formula::and(body, Formula::not(Formula::Eq(lhs, rhs)));
    }
    let mut sum_map: BTreeMap<Var, Term> = BTreeMap::new();
    for a in &h_vars {
        sum_map.insert(*a, Term::add(Term::var(b_map[a]), Term::var(g_map[a])));
    }
    let args: Vec<Term> = d
        .sigma_args
        .iter()
        .map(|t| t.substitute(&sum_map))
        .collect();
    body = Formula::and(body, Formula::Pred(d.sigma.clone(), args));

    let mut pi2 = Formula::exists_all(&gamma_vars, body);
    pi2 = Formula::exists_all(&t_vars, pi2);

    let mut outer = w_vars.clone();
    outer.extend(beta_vars.iter().copied());
    let universal_part =
        Formula::forall_all(&outer, Formula::implies(hyp2.clone(), pi2.clone()));
    let phi2 = Formula::and(logic1.phi1.clone(), universal_part.clone());

    Ok(Logic2Data {
        f: f.clone(),
        h_field: d.h_field.clone(),
        u: d.u.clone(),
        w_vars,
        beta_vars,
        t_vars,
        gamma_vars,
        logic1,
        pi2,
        hyp2,
        universal_part,
        phi2,
    })
}

impl Logic2Data {
    /// Forward: from a disjunct witness `(x, alpha)` and a decomposition
    /// `(w, beta)` of `u`, the values `t = x - w`, `gamma = alpha - beta`.
    pub fn forward_t_gamma(
        &self,
        x: &Assignment,
        alpha: &Assignment,
        w: &Assignment,
        beta: &Assignment,
    ) -> Result<(Assignment, Assignment)> {
        let t = componentwise(&self.t_vars, x, &self.f.ring_vars(), w, &self.w_vars, true)?;
        let g = componentwise(
            &self.gamma_vars,
            alpha,
            &self.h_field.field_vars(),
            beta,
            &self.beta_vars,
            true,
        )?;
        Ok((t, g))
    }

    /// Backward: `x = w + t`, `alpha = beta + gamma`.
    pub fn backward_x_alpha(
        &self,
        w: &Assignment,
        beta: &Assignment,
        t: &Assignment,
        gamma: &Assignment,
    ) -> Result<(Assignment, Assignment)> {
        let x = componentwise(&self.f.ring_vars(), w, &self.w_vars, t, &self.t_vars, false)?;
        let a = componentwise(
            &self.h_field.field_vars(),
            beta,
            &self.beta_vars,
            gamma,
            &self.gamma_vars,
            false,
        )?;
        Ok((x, a))
    }
}

/// Substitutes each ring variable of `a` (those present in `subst`) by
/// `(1/e^B) sum_k z^k mu_(v,k)` and clears denominators by `e^(B p^lift)`,
/// which must dominate every substituted level; untouched variables and
/// field variables are scaled along by the clearing factor.
fn substitute_height_bounded(
    a: &AdditivePoly,
    subst: &BTreeMap<Var, Vec<Var>>,
    b_exp: u64,
    e_poly: &Poly,
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
                    debug_assert!(*lvl <= lift);
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

/// Transforms one normal-form disjunct (an existential formula) into an
/// equivalent universal formula: drop inequalities carried by ring
/// variables outside the equation (satisfiable because `R` is infinite),
/// normalize `f`, apply the two membership rewrites, replace the inner
/// existential ring variables by field expansions within their height
/// bound, and universalize the bounded remainders.
fn transform_disjunct(
    d: &EnfDisjunct,
    loc: &Localization,
    fresh: &mut FreshVars,
    caps: &TransformCaps,
) -> Result<Formula> {
    let p = loc.spec().p();
    let one = prime_one(p);

    let f_vars: BTreeSet<Var> = d.f.ring_vars().into_iter().collect();
    let kept: Vec<EnfInequality> = d
        .inequalities
        .iter()
        .filter(|i| i.e_ring.vars().iter().all(|v| f_vars.contains(v)))
        .cloned()
        .collect();

    if d.f.is_zero() {
        // pure field content: the equation reads H(alpha) = u
        let mut equations = Vec::new();
        if !(d.h_field.is_zero() && d.u == Term::Zero) {
            equations.push((d.h_field.clone(), d.u.clone()));
        }
        let block = BoundedExistential {
            p,
            exists_field: d.field_vars.clone(),
            equations,
            inequalities: kept
                .iter()
                .map(|i| (i.g_field.clone(), i.v.clone()))
                .collect(),
            sigma: d.sigma.clone(),
            sigma_args: d.sigma_args.clone(),
        };
        return universalize_bounded(&block, loc, fresh, caps);
    }

    // normalize f and push the disjunct through the proper transformation
    let res: NormalizationResult =
        normalize_full_from(&d.f, fresh.ring().index, fresh.field().index)?;
    bump_past_result(fresh, &res);
    let f_t = res.f_tilde.clone();
    if f_t.is_zero() {
        return Err(Error::Internal(
            "normalization collapsed a nonzero polynomial to zero".into(),
        ));
    }
    let h_prime = d.h_field.add(&res.g_field);
    let mut ineqs_t: Vec<EnfInequality> = Vec::new();
    let ft_vars: BTreeSet<Var> = f_t.ring_vars().into_iter().collect();
    for i in &kept {
        let composed = i.e_ring.substitute(res.xi.components());
        let (e_ring, extra_field) = composed.split_sorts();
        // the rewrite can surface ring variables that dropped out of the
        // normalized polynomial; inequalities carried by them are again
        // satisfiable by the infinite-domain argument and are dropped
        if !e_ring.vars().iter().all(|v| ft_vars.contains(v)) {
            continue;
        }
        ineqs_t.push(EnfInequality {
            e_ring,
            g_field: i.g_field.add(&extra_field),
            v: i.v.clone(),
        });
    }

    let d_t = EnfDisjunct {
        f: f_t.clone(),
        h_field: h_prime.clone(),
        u: d.u.clone(),
        inequalities: ineqs_t.clone(),
        sigma: d.sigma.clone(),
        sigma_args: d.sigma_args.clone(),
        ring_vars: f_t.ring_vars(),
        field_vars: h_prime.field_vars(),
    };
    let logic2 = logic2_transform(&d_t, loc, fresh)?;
    let l1 = &logic2.logic1;

    // chi_1: pi_1 with its existential ring variables w replaced by field
    // expansions; the joint solutions (w, y) of (f+h)(w, y) = H(alpha) -
    // (1/e^N) G(gamma) are height-bounded, so the replacement is exact
    let e_poly = l1.e_poly.clone();
    let n_exp = l1.n_exp;
    let d_g = l1.g_vars.len().saturating_sub(1);
    let d_h = h_prime.max_coeff_degree();
    let ell1 = (d_h as u64) + (d_g as u64).max(n_exp * e_poly.degree() as u64);
    let fh = f_t.add(&l1.h);
    let b1 = height_bound_relaxed(&fh, ell1, loc)?;
    let chi1 = {
        let s_lift = fh.max_level();
        let d_b = (b1 as usize) * (1 + e_poly.degree());
        let mut subst: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
        let mut mu_vars = Vec::new();
        for w in &l1.w_vars {
            let mus: Vec<Var> = (0..=d_b).map(|_| fresh.field()).collect();
            mu_vars.extend(mus.iter().copied());
            subst.insert(*w, mus);
        }
        let w_rename: BTreeMap<Var, Var> = f_t
            .ring_vars()
            .iter()
            .zip(&l1.w_vars)
            .map(|(a, b)| (*a, *b))
            .collect();
        let scaled_f = substitute_height_bounded(
            &f_t.rename_vars(&w_rename).scale(&e_poly.pow(n_exp)),
            &subst,
            b1,
            &e_poly,
            s_lift,
        );
        let mut g_add = AdditivePoly::zero(p);
        for (i, g) in l1.g_vars.iter().enumerate() {
            g_add.add_term(*g, 0, one.shift(i));
        }
        let scaled_g = g_add.scale(&e_poly.pow(b1 * p.pow(s_lift)));
        let a_rename: BTreeMap<Var, Var> = h_prime
            .field_vars()
            .iter()
            .zip(&l1.alpha_vars)
            .map(|(a, b)| (*a, *b))
            .collect();
        let scaled_h_alpha = h_prime
            .rename_vars(&a_rename)
            .scale(&e_poly.pow(n_exp + b1 * p.pow(s_lift)))
            .neg();
        let a_side = scaled_f.add(&scaled_g).add(&scaled_h_alpha);
        let v_side = Term::negate(
            Term::mul_poly(
                &e_poly.pow(n_exp + b1 * p.pow(s_lift)),
                additive_to_term(&l1.h),
            ),
            p,
        );
        let mut exists_field = mu_vars;
        exists_field.extend(l1.alpha_vars.iter().copied());
        let mut equations = vec![(a_side, v_side)];
        equations.retain(|(a, v)| !(a.is_zero() && *v == Term::Zero));
        let block = BoundedExistential {
            p,
            exists_field,
            equations,
            inequalities: Vec::new(),
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        };
        universalize_bounded(&block, loc, fresh, caps)?
    };
    let mut phi1_outer = l1.x_under.clone();
    phi1_outer.extend(l1.h.ring_vars());
    phi1_outer.extend(l1.g_vars.iter().copied());
    let phi1 = Formula::forall_all(&phi1_outer, Formula::implies(l1.hyp.clone(), chi1));

    // chi_2: pi_2 with t replaced by field expansions; solutions of
    // f(t) = -H(gamma) are height-bounded
    let ell2 = d_h as u64;
    let b2 = height_bound_relaxed(&f_t, ell2, loc)?;
    let chi2 = {
        let s_lift = f_t.max_level();
        let d_b = (b2 as usize) * (1 + e_poly.degree());
        let mut subst: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
        let mut mu_vars = Vec::new();
        for t in &logic2.t_vars {
            let mus: Vec<Var> = (0..=d_b).map(|_| fresh.field()).collect();
            mu_vars.extend(mus.iter().copied());
            subst.insert(*t, mus);
        }
        let t_map: BTreeMap<Var, Var> = f_t
            .ring_vars()
            .iter()
            .zip(&logic2.t_vars)
            .map(|(a, b)| (*a, *b))
            .collect();
        let g_map: BTreeMap<Var, Var> = h_prime
            .field_vars()
            .iter()
            .zip(&logic2.gamma_vars)
            .map(|(a, b)| (*a, *b))
            .collect();
        let w_map: BTreeMap<Var, Var> = f_t
            .ring_vars()
            .iter()
            .zip(&logic2.w_vars)
            .map(|(a, b)| (*a, *b))
            .collect();
        let b_map: BTreeMap<Var, Var> = h_prime
            .field_vars()
            .iter()
            .zip(&logic2.beta_vars)
            .map(|(a, b)| (*a, *b))
            .collect();

        let eq_side = substitute_height_bounded(
            &f_t.rename_vars(&t_map),
            &subst,
            b2,
            &e_poly,
            s_lift,
        )
        .add(
            &h_prime
                .rename_vars(&g_map)
                .scale(&e_poly.pow(b2 * p.pow(s_lift))),
        );
        let mut equations = vec![(eq_side, Term::Zero)];
        equations.retain(|(a, v)| !(a.is_zero() && *v == Term::Zero));
        let mut inequalities = Vec::new();
        for i in &ineqs_t {
            let lvl = i.e_ring.max_level();
            let lhs = substitute_height_bounded(
                &i.e_ring.rename_vars(&t_map),
                &subst,
                b2,
                &e_poly,
                lvl,
            )
            .add(
                &i.g_field
                    .rename_vars(&g_map)
                    .scale(&e_poly.pow(b2 * p.pow(lvl))),
            );
            let rhs_inner = Term::add(
                i.v.clone(),
                Term::negate(
                    Term::add(
                        additive_to_term(&i.e_ring.rename_vars(&w_map)),
                        additive_to_term(&i.g_field.rename_vars(&b_map)),
                    ),
                    p,
                ),
            );
            let rhs = Term::mul_poly(&e_poly.pow(b2 * p.pow(lvl)), rhs_inner);
            inequalities.push((lhs, rhs));
        }
        let mut sum_map: BTreeMap<Var, Term> = BTreeMap::new();
        for a in &h_prime.field_vars() {
            sum_map.insert(*a, Term::add(Term::var(b_map[a]), Term::var(g_map[a])));
        }
        let args: Vec<Term> = d
            .sigma_args
            .iter()
            .map(|t| t.substitute(&sum_map))
            .collect();
        let mut exists_field = mu_vars;
        exists_field.extend(logic2.gamma_vars.iter().copied());
        let block = BoundedExistential {
            p,
            exists_field,
            equations,
            inequalities,
            sigma: d.sigma.clone(),
            sigma_args: args,
        };
        universalize_bounded(&block, loc, fresh, caps)?
    };
    let mut phi2_outer = logic2.w_vars.clone();
    phi2_outer.extend(logic2.beta_vars.iter().copied());
    let part2 = Formula::forall_all(&phi2_outer, Formula::implies(logic2.hyp2.clone(), chi2));

    Ok(Formula::and(phi1, part2))
}

fn bump_past_result(fresh: &mut FreshVars, res: &NormalizationResult) {
    for v in res.f_tilde.vars() {
        fresh.bump(v);
    }
    for v in res.g_field.vars() {
        fresh.bump(v);
    }
    for (target, comp) in res.xi.components() {
        fresh.bump(*target);
        for v in comp.vars() {
            fresh.bump(v);
        }
    }
}

/// Rewrites an existential formula (free variables allowed) into an
/// equivalent universal formula.
pub(crate) fn transform_existential(
    phi: &Formula,
    loc: &Localization,
    fresh: &mut FreshVars,
    caps: &TransformCaps,
) -> Result<Formula> {
    let enf = to_existential_normal_form(phi, loc)?;
    if enf.disjuncts.len() > caps.max_disjuncts {
        return Err(Error::ResourceCap("too many disjuncts".into()));
    }
    let mut parts = Vec::new();
    for d in &enf.disjuncts {
        parts.push(transform_disjunct(d, loc, fresh, caps)?);
    }
    let combined = Formula::disjunction(parts);
    let (prefix, matrix) = prenex(&combined, fresh);
    if prefix.iter().any(|(is_forall, _)| !*is_forall) {
        return Err(Error::Internal(
            "existential transform produced an existential quantifier".into(),
        ));
    }
    let vars: Vec<Var> = prefix.iter().map(|(_, v)| *v).collect();
    Ok(Formula::forall_all(&vars, matrix))
}

/// Converts an arbitrary formula into an equivalent universal formula, by
/// induction on the quantifier alternations of its prenex form.
pub fn model_complete_transform(
    phi: &Formula,
    loc: &Localization,
    caps: &TransformCaps,
) -> Result<Formula> {
    phi.sort_check()?;
    let clean = eliminate_negations(phi, loc)?;
    let mut fresh = FreshVars::beyond(&clean);
    let (mut prefix, mut matrix) = prenex(&clean, &mut fresh);
    for _round in 0..caps.max_rounds {
        if prefix.iter().all(|(is_forall, _)| *is_forall) {
            let vars: Vec<Var> = prefix.iter().map(|(_, v)| *v).collect();
            return Ok(Formula::forall_all(&vars, matrix));
        }
        let last_kind = prefix.last().expect("nonempty").0;
        let split = prefix
            .iter()
            .rposition(|(k, _)| *k != last_kind)
            .map(|i| i + 1)
            .unwrap_or(0);
        let run: Vec<Var> = prefix[split..].iter().map(|(_, v)| *v).collect();
        prefix.truncate(split);
        if !last_kind {
            // innermost existential block becomes universal
            let inner = Formula::exists_all(&run, matrix.clone());
            let univ = transform_existential(&inner, loc, &mut fresh, caps)?;
            let (uprefix, umatrix) = prenex(&univ, &mut fresh);
            for (is_forall, v) in uprefix {
                debug_assert!(is_forall);
                prefix.push((true, v));
            }
            matrix = umatrix;
        } else {
            // innermost universal block under an existential: dualize
            let inner = Formula::exists_all(&run, Formula::not(matrix.clone()));
            let univ = transform_existential(&inner, loc, &mut fresh, caps)?;
            let (uprefix, umatrix) = prenex(&univ, &mut fresh);
            for (is_forall, v) in uprefix {
                debug_assert!(is_forall);
                prefix.push((false, v));
            }
            matrix = Formula::not(umatrix);
        }
    }
    Err(Error::ResourceCap(
        "alternation elimination exceeded the round cap".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::logic::eval::{eval_bounded_over_r, BoundedEvaluator};
    use crate::logic::parser::parse_formula;
    use std::sync::Arc;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime_field(2).unwrap()
    }

    fn loc_z() -> Localization {
        Localization::new(&f2(), vec![Poly::z(&f2())]).unwrap()
    }

    fn is_universal(phi: &Formula) -> bool {
        fn qf(f: &Formula) -> bool {
            match f {
                Formula::Exists(_, _) | Formula::Forall(_, _) => false,
                Formula::Not(a) => qf(a),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    qf(a) && qf(b)
                }
                _ => true,
            }
        }
        let mut cur = phi;
        while let Formula::Forall(_, inner) = cur {
            cur = inner;
        }
        qf(cur)
    }

    #[test]
    fn universalize_field_only_packages_directly() {
        let loc = loc_z();
        let mut fresh = FreshVars::beyond(&Formula::True);
        let a1 = Var::field(0);
        fresh.bump(a1);
        let mut g = AdditivePoly::zero(2);
        g.add_term(a1, 0, Poly::one(&f2()));
        let block = BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![(g, Term::One)],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        };
        let chi =
            universalize_bounded(&block, &loc, &mut fresh, &TransformCaps::default()).unwrap();
        assert!(matches!(chi, Formula::Pred(_, _)));
        // exists a (a != 1) is true over F_2 (take a = 0)
        let env = BTreeMap::new();
        assert!(eval_bounded_over_r(&chi, &env, 1, &loc).unwrap());
    }

    #[test]
    fn universalize_ring_inequality_matches_bounded_semantics() {
        // pi: exists a:F (a != v) with a free ring variable v
        let loc = loc_z();
        let v_free = Var::ring(9);
        let mut fresh = FreshVars::beyond(&Formula::True);
        fresh.bump(v_free);
        let a1 = Var::field(0);
        fresh.bump(a1);
        let mut g = AdditivePoly::zero(2);
        g.add_term(a1, 0, Poly::one(&f2()));
        let block = BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![(g, Term::var(v_free))],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        };
        let pi = block.to_formula();
        let chi =
            universalize_bounded(&block, &loc, &mut fresh, &TransformCaps::default()).unwrap();
        let eval = BoundedEvaluator::new(&loc, 3).unwrap();
        for val in eval.ring_domain() {
            let mut env = BTreeMap::new();
            env.insert(v_free, val.clone());
            let a = eval.eval(&pi, &env).unwrap();
            let b = eval.eval(&chi, &env).unwrap();
            assert_eq!(a, b, "disagree at v = {val}");
        }
    }

    #[test]
    fn universalize_ring_equation_matches_bounded_semantics() {
        // pi: exists a:F (a = v): true iff v is a field constant
        let loc = loc_z();
        let v_free = Var::ring(9);
        let mut fresh = FreshVars::beyond(&Formula::True);
        fresh.bump(v_free);
        let a1 = Var::field(0);
        fresh.bump(a1);
        let mut g = AdditivePoly::zero(2);
        g.add_term(a1, 0, Poly::one(&f2()));
        let block = BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: vec![(g, Term::var(v_free))],
            inequalities: Vec::new(),
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        };
        let pi = block.to_formula();
        let chi =
            universalize_bounded(&block, &loc, &mut fresh, &TransformCaps::default()).unwrap();
        let eval = BoundedEvaluator::new(&loc, 3).unwrap();
        for val in eval.ring_domain() {
            let mut env = BTreeMap::new();
            env.insert(v_free, val.clone());
            let a = eval.eval(&pi, &env).unwrap();
            let b = eval.eval(&chi, &env).unwrap();
            assert_eq!(a, b, "disagree at v = {val}");
        }
    }

    #[test]
    fn model_complete_on_universal_input() {
        let loc = loc_z();
        let caps = TransformCaps::default();
        let phi = parse_formula("forall x:R (x + x = 0)", 2).unwrap();
        let out = model_complete_transform(&phi, &loc, &caps).unwrap();
        assert!(is_universal(&out));
        let env = BTreeMap::new();
        assert_eq!(
            eval_bounded_over_r(&out, &env, 3, &loc).unwrap(),
            eval_bounded_over_r(&phi, &env, 3, &loc).unwrap()
        );
    }

    #[test]
    fn model_complete_simple_existential() {
        let loc = loc_z();
        let caps = TransformCaps::default();
        let phi = parse_formula("exists x:R (x + x = 0)", 2).unwrap();
        let out = model_complete_transform(&phi, &loc, &caps).unwrap();
        assert!(is_universal(&out));
        let env = BTreeMap::new();
        for cap in [2usize, 4] {
            assert_eq!(
                eval_bounded_over_r(&out, &env, cap, &loc).unwrap(),
                eval_bounded_over_r(&phi, &env, cap, &loc).unwrap(),
                "cap {cap}"
            );
        }
    }

    #[test]
    fn witness_map_methods_roundtrip() {
        use crate::bounds::image_decomposition;
        use crate::normalize::p_basic_completion;
        use crate::sample::Rng;
        let loc = loc_z();
        let spec = loc.spec().clone();
        let f = crate::additive::parse_additive("x1^2", 2).unwrap();
        let h = p_basic_completion(&f).unwrap();
        let h_field = crate::additive::parse_additive("a1", 2).unwrap();
        let mut fresh = FreshVars::beyond(&Formula::True);
        for v in f.vars().into_iter().chain(h.vars()).chain(h_field.vars()) {
            fresh.bump(v);
        }
        let l1 = logic1_transform(&f, &h, &h_field, &Term::Zero, &loc, &mut fresh).unwrap();
        let mut rng = Rng::new(77);
        for _ in 0..10 {
            let mut x: BTreeMap<Var, crate::ratfun::RatFunc> = BTreeMap::new();
            x.insert(Var::ring(0), rng.in_ring(&loc, 3));
            let u = f.eval(&x, &spec).unwrap();
            let fh = f.add(&h);
            let (x_under_raw, _alphas) = image_decomposition(&fh, &u, &loc).unwrap();
            // key the decomposition by the x_under variable names
            let mut x_under: BTreeMap<Var, crate::ratfun::RatFunc> = BTreeMap::new();
            for (orig, copy) in f.ring_vars().iter().zip(&l1.x_under) {
                x_under.insert(*copy, x_under_raw[orig].clone());
            }
            let w = l1.forward_w(&x, &x_under).unwrap();
            let x_back = l1.backward_x(&x_under, &w).unwrap();
            assert_eq!(x_back, x);
        }
        // logic2 maps: t = x - w, gamma = alpha - beta and back
        let enf_d = EnfDisjunct {
            f: f.clone(),
            h_field: h_field.clone(),
            u: Term::Zero,
            inequalities: Vec::new(),
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
            ring_vars: f.ring_vars(),
            field_vars: h_field.field_vars(),
        };
        let l2 = logic2_transform(&enf_d, &loc, &mut fresh).unwrap();
        let one = crate::ratfun::RatFunc::one(&spec);
        let zero = crate::ratfun::RatFunc::zero(&spec);
        let x: BTreeMap<Var, _> = [(Var::ring(0), one.clone())].into_iter().collect();
        let alpha: BTreeMap<Var, _> = [(Var::field(0), one.clone())].into_iter().collect();
        let w: BTreeMap<Var, _> = [(l2.w_vars[0], zero.clone())].into_iter().collect();
        let beta: BTreeMap<Var, _> = [(l2.beta_vars[0], one.clone())].into_iter().collect();
        let (t, gamma) = l2.forward_t_gamma(&x, &alpha, &w, &beta).unwrap();
        assert_eq!(t[&l2.t_vars[0]], one.sub(&zero));
        assert_eq!(gamma[&l2.gamma_vars[0]], one.sub(&one));
        let (x2, a2) = l2.backward_x_alpha(&w, &beta, &t, &gamma).unwrap();
        assert_eq!(x2[&Var::ring(0)], x[&Var::ring(0)]);
        assert_eq!(a2[&Var::field(0)], alpha[&Var::field(0)]);
    }

    #[test]
    fn model_complete_equation_with_pole() {
        let loc = loc_z();
        let caps = TransformCaps::default();
        // exists x (z*x = 1): true in R = F_2[z, 1/z]
        let phi = parse_formula("exists x:R (z*x = 1)", 2).unwrap();
        let out = model_complete_transform(&phi, &loc, &caps).unwrap();
        assert!(is_universal(&out));
        let env = BTreeMap::new();
        assert_eq!(
            eval_bounded_over_r(&out, &env, 3, &loc).unwrap(),
            eval_bounded_over_r(&phi, &env, 3, &loc).unwrap(),
        );
    }
}
