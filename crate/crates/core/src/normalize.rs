//! Normalization of additive polynomials by proper transformations.
//!
//! The pipeline takes any additive polynomial over ring variables to a
//! strongly normalized one in three stages, each returning the symbolic
//! identity `f . xi = f_tilde + G` with `G` over fresh field variables:
//!
//! 1. dependence elimination: while the set
//!    `B = {b_i z^(j p^(s_i)) : 0 <= j < p^(s-s_i)}` is linearly dependent
//!    in `V_s(F_p)`, a substitution `x_1 = c y_1 + H`,
//!    `x_i = y_i + coef_i y_1^(p^(s_1-s_i))` kills one leading coefficient
//!    and strictly decreases the degree sum ("p-free" = B independent);
//! 2. degree equalization: each variable of degree `p^(s_i) < p^s` is
//!    expanded through the basis `{z^k}`, after which the polynomial is
//!    normalized;
//! 3. strong normalization: unimodular moves `x_lo += lambda z^k x_hi`
//!    reduce leading-coefficient degrees until they are pairwise distinct
//!    mod `p^s`.

use crate::additive::{classify, AdditivePoly, Assignment, ProperTransformation, Sort, Var};
use crate::error::{Error, Result};
use crate::gf::FieldElem;
use crate::independence::{coordinate_matrix_in_w, rat_matrix_kernel_vector};
use crate::ratfun::division::divide_with_remainder;
use crate::ratfun::division::q_power_decomposition;
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::{Localization, RatFunc};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of a pipeline stage: `f . xi = f_tilde + g_field` symbolically.
#[derive(Debug, Clone)]
pub struct NormalizationResult {
    pub xi: ProperTransformation,
    pub f_tilde: AdditivePoly,
    pub g_field: AdditivePoly,
}

impl NormalizationResult {
    /// Expands `f . xi - (f_tilde + g_field)`; the result must be the zero
    /// polynomial for a valid stage output.
    pub fn identity_defect(&self, f: &AdditivePoly) -> AdditivePoly {
        let composed = f.substitute(self.xi.components());
        composed.sub(&self.f_tilde.add(&self.g_field))
    }

    pub fn verify_identity(&self, f: &AdditivePoly) -> bool {
        self.identity_defect(f).is_zero()
    }
}

/// Fresh-variable allocator threaded through the pipeline so that dropped
/// variable names are never reused.
#[derive(Debug, Clone)]
struct VarAlloc {
    next_ring: u32,
    next_field: u32,
}

impl VarAlloc {
    fn for_poly(f: &AdditivePoly) -> VarAlloc {
        VarAlloc {
            next_ring: f.fresh_ring_index(),
            next_field: f.fresh_field_index(),
        }
    }

    fn ring(&mut self) -> Var {
        let v = Var::ring(self.next_ring);
        self.next_ring += 1;
        v
    }

    fn field(&mut self) -> Var {
        let v = Var::field(self.next_field);
        self.next_field += 1;
        v
    }
}

fn require_ring_vars(f: &AdditivePoly) -> Result<()> {
    if f.vars().iter().any(|v| v.sort == Sort::Field) {
        return Err(Error::Sort(
            "normalization input must have ring variables only".into(),
        ));
    }
    Ok(())
}

/// The set `B` of the dependence-elimination stage, as rational functions
/// over the prime field, tagged with their (variable, j) origin.
pub fn p_free_test_set(f: &AdditivePoly) -> Vec<(Var, u32, RatFunc)> {
    let p = f.p();
    let vars = f.ring_vars();
    let s = vars
        .iter()
        .filter_map(|v| f.var_level(*v))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    for v in vars {
        let s_i = f.var_level(v).expect("ring var present");
        let b_i = f.leading_coeff(v).expect("leading coeff").clone();
        let count = p.pow(s - s_i);
        for j in 0..count {
            let shifted = b_i.shift((j * p.pow(s_i)) as usize);
            out.push((v, j as u32, RatFunc::from_poly(shifted)));
        }
    }
    out
}

/// Explicit dependence: coefficients `c_(i,j)` in `F_p[z]`, not all zero,
/// with `sum c_(i,j)^(p^s) b_i z^(j p^(s_i)) = 0`; `None` when `B` is
/// independent (the polynomial is p-free).
pub fn find_dependence(f: &AdditivePoly) -> Option<Vec<(Var, u32, Poly)>> {
    let members = p_free_test_set(f);
    if members.is_empty() {
        return None;
    }
    let prime = f.prime_spec();
    let s = f.max_level();
    let family: Vec<RatFunc> = members.iter().map(|(_, _, b)| b.clone()).collect();
    let matrix = coordinate_matrix_in_w(&family, s);
    let kernel = rat_matrix_kernel_vector(&matrix, &prime)?;
    // clear denominators so the coefficients are honest polynomials of w;
    // a polynomial of w turns into the z-polynomial with the same
    // coefficients, since over F_p we have c(z)^q = c(z^q)
    let mut product = Poly::one(&prime);
    for k in &kernel {
        product = product.mul(k.den());
    }
    let mut out = Vec::new();
    for ((v, j, _), kappa) in members.iter().zip(&kernel) {
        let cleared = kappa.scale_poly(&product);
        debug_assert!(cleared.is_polynomial());
        out.push((*v, *j, cleared.num().clone()));
    }
    debug_assert!(out.iter().any(|(_, _, c)| !c.is_zero()));
    Some(out)
}

fn degree_sum(f: &AdditivePoly) -> u64 {
    f.ring_vars()
        .iter()
        .map(|v| f.p().pow(f.var_level(*v).unwrap()))
        .sum()
}

/// One dependence-elimination step; returns the step transformation.
fn elimination_step(
    f: &AdditivePoly,
    dependence: &[(Var, u32, Poly)],
    alloc: &mut VarAlloc,
) -> Result<ProperTransformation> {
    let p = f.p();
    let prime = f.prime_spec();
    // pivot: maximal s_i among variables with a nonzero coefficient, then
    // lowest index
    let pivot = dependence
        .iter()
        .filter(|(_, _, c)| !c.is_zero())
        .map(|(v, _, _)| *v)
        .max_by(|a, b| {
            f.var_level(*a)
                .unwrap()
                .cmp(&f.var_level(*b).unwrap())
                .then(b.index.cmp(&a.index))
        })
        .ok_or_else(|| Error::Internal("dependence without nonzero coefficient".into()))?;
    let s = f.max_level();
    let s_piv = f.var_level(pivot).unwrap();

    // c = sum_mu c_(pivot,mu)^(p^(s-s_piv)) z^mu
    let mut c = Poly::zero(&prime);
    for (v, j, cj) in dependence {
        if *v == pivot && !cj.is_zero() {
            c = c.add(&cj.pow(p.pow(s - s_piv)).shift(*j as usize));
        }
    }
    debug_assert!(!c.is_zero());

    // per-variable mixing coefficients for i != pivot
    let mut coef: BTreeMap<Var, Poly> = BTreeMap::new();
    for (v, j, cj) in dependence {
        if *v == pivot || cj.is_zero() {
            continue;
        }
        let s_i = f.var_level(*v).unwrap();
        let piece = cj.pow(p.pow(s - s_i)).shift(*j as usize);
        let slot = coef.entry(*v).or_insert_with(|| Poly::zero(&prime));
        *slot = slot.add(&piece);
    }

    // H = alpha_0 + alpha_1 z + ... + alpha_(deg c - 1) z^(deg c - 1)
    let ell = c.degree();
    let alphas: Vec<Var> = (0..ell).map(|_| alloc.field()).collect();
    let mut components: BTreeMap<Var, AdditivePoly> = BTreeMap::new();
    for v in f.ring_vars() {
        if v == pivot {
            let mut expr = AdditivePoly::term(p, pivot, 0, c.clone());
            for (k, alpha) in alphas.iter().enumerate() {
                expr.add_term(*alpha, 0, Poly::one(&prime).shift(k));
            }
            components.insert(v, expr);
        } else if let Some(mix) = coef.get(&v) {
            let s_i = f.var_level(v).unwrap();
            let mut expr = AdditivePoly::var(p, v);
            expr.add_term(pivot, s_piv - s_i, mix.clone());
            components.insert(v, expr);
        } else {
            components.insert(v, AdditivePoly::var(p, v));
        }
    }

    let witness_c = c.clone();
    let witness_coef = coef.clone();
    let witness_alphas = alphas.clone();
    let witness_pivot = pivot;
    let witness_spiv = s_piv;
    let witness_levels: BTreeMap<Var, u32> = f
        .ring_vars()
        .iter()
        .map(|v| (*v, f.var_level(*v).unwrap()))
        .collect();
    let witness = Arc::new(move |target: &Assignment, loc: &Localization| {
        let spec = loc.spec();
        let t_piv = target
            .get(&witness_pivot)
            .ok_or_else(|| Error::UnassignedVariable(witness_pivot.to_string()))?;
        let c_lift = witness_c.lift_to(spec);
        let mut point: Assignment = BTreeMap::new();
        let y_piv = if c_lift.is_constant() {
            let inv = c_lift.coeff(0).inv()?;
            let v = t_piv.scale_poly(&Poly::constant(inv));
            point.insert(witness_pivot, v.clone());
            v
        } else {
            let (v, r) = divide_with_remainder(t_piv, &c_lift, loc)?;
            for (k, alpha) in witness_alphas.iter().enumerate() {
                point.insert(*alpha, RatFunc::constant(r.coeff(k)));
            }
            point.insert(witness_pivot, v.clone());
            v
        };
        for (v, lvl) in &witness_levels {
            if *v == witness_pivot {
                continue;
            }
            let t_v = target
                .get(v)
                .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
            match witness_coef.get(v) {
                None => {
                    point.insert(*v, t_v.clone());
                }
                Some(mix) => {
                    let pw = y_piv.pow(spec.p().pow(witness_spiv - lvl));
                    let shift = pw.scale_poly(&mix.lift_to(spec));
                    point.insert(*v, t_v.sub(&shift));
                }
            }
        }
        // alphas default to zero when c was constant
        for alpha in &witness_alphas {
            point.entry(*alpha).or_insert_with(|| RatFunc::zero(spec));
        }
        Ok(point)
    });

    Ok(ProperTransformation::from_parts(components, witness))
}

fn eliminate_dependence_with(
    f: &AdditivePoly,
    alloc: &mut VarAlloc,
) -> Result<NormalizationResult> {
    require_ring_vars(f)?;
    let p = f.p();
    let mut xi = ProperTransformation::identity(p, &f.ring_vars());
    let mut g_total = AdditivePoly::zero(p);
    let mut current = f.clone();
    let mut guard = 0usize;
    while let Some(dep) = find_dependence(&current) {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::ResourceCap(
                "dependence elimination did not terminate".into(),
            ));
        }
        let before = degree_sum(&current);
        let step = elimination_step(&current, &dep, alloc)?;
        let composed = current.substitute(step.components());
        let (ring_part, field_part) = composed.split_sorts();
        if degree_sum(&ring_part) >= before {
            return Err(Error::Internal(
                "elimination step failed to decrease the degree sum".into(),
            ));
        }
        xi = xi.compose(&step);
        g_total = g_total.add(&field_part);
        current = ring_part;
    }
    Ok(NormalizationResult {
        xi,
        f_tilde: current,
        g_field: g_total,
    })
}

/// Stage 1: proper transformations until `B` is linearly independent in
/// `V_s(F_p)` ("p-free").
pub fn eliminate_dependence(f: &AdditivePoly) -> Result<NormalizationResult> {
    let mut alloc = VarAlloc::for_poly(f);
    eliminate_dependence_with(f, &mut alloc)
}

fn equalize_degrees_with(
    f: &AdditivePoly,
    alloc: &mut VarAlloc,
) -> Result<NormalizationResult> {
    require_ring_vars(f)?;
    if find_dependence(f).is_some() {
        return Err(Error::NotOfClass("p-free"));
    }
    let p = f.p();
    let prime = f.prime_spec();
    let s = f.max_level();
    let mut components: BTreeMap<Var, AdditivePoly> = BTreeMap::new();
    let mut expansion: BTreeMap<Var, (u32, Vec<Var>)> = BTreeMap::new();
    for v in f.ring_vars() {
        let s_i = f.var_level(v).unwrap();
        if s_i == s {
            components.insert(v, AdditivePoly::var(p, v));
            continue;
        }
        let d = s - s_i;
        let count = p.pow(d) as usize;
        let fresh: Vec<Var> = (0..count).map(|_| alloc.ring()).collect();
        let mut expr = AdditivePoly::zero(p);
        for (k, w) in fresh.iter().enumerate() {
            expr.add_term(*w, d, Poly::one(&prime).shift(k));
        }
        components.insert(v, expr);
        expansion.insert(v, (d, fresh));
    }
    let witness_exp = expansion.clone();
    let witness_vars = f.ring_vars();
    let witness = Arc::new(move |target: &Assignment, _loc: &Localization| {
        let mut point: Assignment = BTreeMap::new();
        for v in &witness_vars {
            let t_v = target
                .get(v)
                .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
            match witness_exp.get(v) {
                None => {
                    point.insert(*v, t_v.clone());
                }
                Some((d, fresh)) => {
                    let parts = q_power_decomposition(t_v, *d);
                    for (w, val) in fresh.iter().zip(parts) {
                        point.insert(*w, val);
                    }
                }
            }
        }
        Ok(point)
    });
    let xi = ProperTransformation::from_parts(components, witness);
    let f_tilde = f.substitute(xi.components());
    debug_assert!(f_tilde.field_vars().is_empty());
    Ok(NormalizationResult {
        xi,
        f_tilde,
        g_field: AdditivePoly::zero(p),
    })
}

/// Stage 2: brings every variable to the common degree `p^s` through the
/// basis `{z^k}`; a p-free polynomial becomes normalized.
pub fn equalize_degrees(f: &AdditivePoly) -> Result<NormalizationResult> {
    let mut alloc = VarAlloc::for_poly(f);
    equalize_degrees_with(f, &mut alloc)
}

fn strongly_normalize_with(f: &AdditivePoly) -> Result<NormalizationResult> {
    require_ring_vars(f)?;
    let p = f.p();
    let prime = f.prime_spec();
    let _ = &prime;
    if !classify(f)?.normalized {
        return Err(Error::NotOfClass("normalized"));
    }
    let q = f.degree();
    let mut xi = ProperTransformation::identity(p, &f.ring_vars());
    let mut current = f.clone();
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::ResourceCap(
                "strong normalization did not terminate".into(),
            ));
        }
        let vars = current.ring_vars();
        let mut found: Option<(Var, Var)> = None;
        'outer: for (i, &a) in vars.iter().enumerate() {
            for &b in vars.iter().skip(i + 1) {
                let da = current.leading_coeff(a).unwrap().degree() as u64;
                let db = current.leading_coeff(b).unwrap().degree() as u64;
                if da % q == db % q {
                    // hi is the variable whose coefficient degree drops
                    let (hi, lo) = if da >= db { (a, b) } else { (b, a) };
                    found = Some((hi, lo));
                    break 'outer;
                }
            }
        }
        let Some((hi, lo)) = found else { break };
        let d_hi = current.leading_coeff(hi).unwrap().degree() as u64;
        let d_lo = current.leading_coeff(lo).unwrap().degree() as u64;
        let k = ((d_hi - d_lo) / q) as usize;
        let lead_hi = current.leading_coeff(hi).unwrap().leading_coeff();
        let lead_lo = current.leading_coeff(lo).unwrap().leading_coeff();
        let lambda = lead_hi.div(&lead_lo)?.neg();
        // x_lo -> x_lo + lambda z^k x_hi cancels the top of b_hi after the
        // q-th power twist
        let mut expr = AdditivePoly::var(p, lo);
        expr.add_term(hi, 0, Poly::constant(lambda.clone()).shift(k));
        let mut components: BTreeMap<Var, AdditivePoly> = BTreeMap::new();
        for v in &vars {
            if *v == lo {
                components.insert(*v, expr.clone());
            } else {
                components.insert(*v, AdditivePoly::var(p, *v));
            }
        }
        let w_hi = hi;
        let w_lo = lo;
        let w_lambda_idx = lambda.coeffs()[0];
        let w_k = k;
        let witness = Arc::new(move |target: &Assignment, loc: &Localization| {
            let spec = loc.spec();
            let mut point = target.clone();
            let t_hi = target
                .get(&w_hi)
                .ok_or_else(|| Error::UnassignedVariable(w_hi.to_string()))?;
            let t_lo = target
                .get(&w_lo)
                .ok_or_else(|| Error::UnassignedVariable(w_lo.to_string()))?;
            let shift = t_hi
                .scale_poly(&Poly::constant(FieldElem::from_u64(spec, w_lambda_idx)).shift(w_k));
            point.insert(w_lo, t_lo.sub(&shift));
            Ok(point)
        });
        let step = ProperTransformation::from_parts(components, witness);
        let next = current.substitute(step.components());
        let new_deg = next.leading_coeff(hi).map(|c| c.degree() as u64);
        if new_deg.map(|d| d >= d_hi).unwrap_or(false) {
            return Err(Error::Internal(
                "strong normalization failed to decrease a degree".into(),
            ));
        }
        xi = xi.compose(&step);
        current = next;
    }
    debug_assert!(classify(&current)?.strongly_normalized);
    Ok(NormalizationResult {
        xi,
        f_tilde: current,
        g_field: AdditivePoly::zero(p),
    })
}

/// Stage 3: unimodular moves until leading-coefficient degrees are pairwise
/// distinct mod `p^s`.
pub fn strongly_normalize(f: &AdditivePoly) -> Result<NormalizationResult> {
    strongly_normalize_with(f)
}

/// Completes a strongly normalized polynomial to a p-basic one: fresh
/// variables `v_t` with coefficients `z^(r_t)` fill the residues mod `q`
/// that the leading coefficients miss; pairwise distinct residues keep the
/// set independent, so `f + h` is p-basic and strongly normalized.
pub fn p_basic_completion(f: &AdditivePoly) -> Result<AdditivePoly> {
    require_ring_vars(f)?;
    let flags = classify(f)?;
    if !flags.strongly_normalized && !f.is_zero() {
        return Err(Error::NotOfClass("strongly normalized"));
    }
    let p = f.p();
    let prime = f.prime_spec();
    let s = f.max_level();
    let q = f.degree();
    let mut used: Vec<u64> = f
        .ring_vars()
        .iter()
        .map(|v| f.leading_coeff(*v).unwrap().degree() as u64 % q)
        .collect();
    used.sort_unstable();
    let mut alloc = VarAlloc::for_poly(f);
    let mut h = AdditivePoly::zero(p);
    for r in 0..q {
        if used.binary_search(&r).is_ok() {
            continue;
        }
        let v = alloc.ring();
        h.add_term(v, s, Poly::one(&prime).shift(r as usize));
    }
    Ok(h)
}

/// The full pipeline: dependence elimination, degree equalization, strong
/// normalization, with the composed transformation and combined field part.
pub fn normalize_full(f: &AdditivePoly) -> Result<NormalizationResult> {
    let alloc = VarAlloc::for_poly(f);
    normalize_full_inner(f, alloc)
}

/// Like [`normalize_full`] but with fresh-variable indices guaranteed to
/// start at or beyond the given bounds; callers embedding the result into a
/// larger formula use this to keep namespaces disjoint.
pub fn normalize_full_from(
    f: &AdditivePoly,
    next_ring: u32,
    next_field: u32,
) -> Result<NormalizationResult> {
    let base = VarAlloc::for_poly(f);
    let alloc = VarAlloc {
        next_ring: base.next_ring.max(next_ring),
        next_field: base.next_field.max(next_field),
    };
    normalize_full_inner(f, alloc)
}

fn normalize_full_inner(f: &AdditivePoly, mut alloc: VarAlloc) -> Result<NormalizationResult> {
    require_ring_vars(f)?;
    let r1 = eliminate_dependence_with(f, &mut alloc)?;
    let r2 = equalize_degrees_with(&r1.f_tilde, &mut alloc)?;
    let r3 = strongly_normalize_with(&r2.f_tilde)?;
    let xi = r1.xi.compose(&r2.xi).compose(&r3.xi);
    Ok(NormalizationResult {
        xi,
        f_tilde: r3.f_tilde,
        g_field: r1.g_field,
    })
}

/// Like [`p_basic_completion`] with the fresh ring indices starting at or
/// beyond the given bound.
pub fn p_basic_completion_from(f: &AdditivePoly, next_ring: u32) -> Result<AdditivePoly> {
    let h = p_basic_completion(f)?;
    let shift = next_ring.saturating_sub(
        h.ring_vars().iter().map(|v| v.index).min().unwrap_or(next_ring),
    );
    if shift == 0 || h.is_zero() {
        return Ok(h);
    }
    let map: BTreeMap<Var, Var> = h
        .ring_vars()
        .iter()
        .map(|v| (*v, Var::ring(v.index + shift)))
        .collect();
    Ok(h.rename_vars(&map))
}
