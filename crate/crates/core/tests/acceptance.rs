//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the observed counts (visible with `--nocapture`). Every tolerance
//! is zero: all arithmetic is exact.

use frobring_core::additive::{classify, parse_additive, AdditivePoly, Assignment, Var};
use frobring_core::bounds::{
    e_ord, enumerate_ring_elements, height_bound, image_decomposition, image_recombine,
    pole_order_bound, reduce_mod_image,
};
use frobring_core::gf::{enumerate_field, FieldElem};
use frobring_core::hasse::{check_p3, hasse_derivative, hasse_derivative_inverse};
use frobring_core::independence::{rank_oracle, wronskian_certificate, wronskian_det};
use frobring_core::logic::{
    eval_sigma_over_f, parse_formula, sentence_to_sigma, universalize_bounded,
    BoundedEvaluator, Formula, SigmaPredicate, Term, TransformCaps,
};
use frobring_core::logic::enf::FreshVars;
use frobring_core::normalize::{normalize_full, p_basic_completion};
use frobring_core::ratfun::{in_ring, ord_at, Localization, OrdVal, Place, RatFunc};
use frobring_core::sample::Rng;
use frobring_core::{FieldSpec, Poly};
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

fn prime(p: u64) -> Arc<FieldSpec> {
    FieldSpec::prime_field(p).unwrap()
}

fn loc_over(spec: &Arc<FieldSpec>, s_texts: &[&str]) -> Localization {
    let p = spec.p();
    let s_polys = s_texts
        .iter()
        .map(|t| frobring_core::textio::parse_fp_poly(t, p).unwrap())
        .collect();
    Localization::new(spec, s_polys).unwrap()
}

/// Independent quotient-rule oracle: `D_eps(1/b)` from the recurrence
/// forced by `D_eps(b * (1/b)) = D_eps(1) = 0`.
fn inverse_derivative_oracle(b: &Poly, eps: u32) -> RatFunc {
    let spec = b.spec();
    let inv = RatFunc::new(Poly::one(spec), b.clone()).unwrap();
    let mut memo: Vec<RatFunc> = vec![inv.clone()];
    for e in 1..=eps {
        let mut acc = RatFunc::zero(spec);
        for i in 1..=e {
            let di_b = frobring_core::hasse::hasse_derivative_poly(b, i);
            acc = acc.add(&memo[(e - i) as usize].scale_poly(&di_b));
        }
        let val = acc.mul(&inv).neg();
        memo.push(val);
    }
    memo[eps as usize].clone()
}

#[test]
fn acceptance_01_hasse_identity_suite() {
    let start = Instant::now();
    let mut samples = 0usize;
    for (p, m, salt) in [(2u64, 1usize, 0u64), (3, 1, 1), (2, 2, 2)] {
        let spec = FieldSpec::default_for(p, m).unwrap();
        let mut rng = Rng::new(101 + salt);
        for _ in 0..350 {
            let f = rng.ratfunc(&spec, 8);
            let g = rng.ratfunc(&spec, 8);
            let eps = 1 + rng.below(8) as u32;
            // P1 linearity
            assert_eq!(
                hasse_derivative(&f.add(&g), eps),
                hasse_derivative(&f, eps).add(&hasse_derivative(&g, eps)),
                "P1 failed"
            );
            // P2 Leibniz
            let mut leib = RatFunc::zero(&spec);
            for i in 0..=eps {
                leib = leib.add(&hasse_derivative(&f, i).mul(&hasse_derivative(&g, eps - i)));
            }
            assert_eq!(hasse_derivative(&f.mul(&g), eps), leib, "P2 failed");
            // P3 p-th power rule (direct vs rule, verified internally)
            check_p3(&f, 1 + (samples % 2) as u32, eps).expect("P3 failed");
            // P4 quotient formula vs the recurrence oracle
            let b = rng.nonzero_poly(&spec, 8);
            assert_eq!(
                hasse_derivative_inverse(&b, eps).unwrap(),
                inverse_derivative_oracle(&b, eps),
                "P4 failed"
            );
            samples += 1;
        }
    }
    assert!(samples >= 1000);
    println!(
        "ACCEPTANCE 1 (hasse identities P1-P4): PASS - {samples} samples exact in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_02_order_inequality() {
    let start = Instant::now();
    let mut samples = 0usize;
    let mut equalities = 0usize;
    for (p, m, salt) in [(2u64, 1usize, 0u64), (3, 1, 1), (2, 2, 2)] {
        let spec = FieldSpec::default_for(p, m).unwrap();
        let mut rng = Rng::new(202 + salt);
        while samples < 400 * (salt as usize + 1) {
            let u = rng.nonzero_ratfunc(&spec, 6);
            let eps = 1 + rng.below(6) as u32;
            let d = hasse_derivative(&u, eps);
            if d.is_zero() {
                continue;
            }
            let lambda = rng.field_elem(&spec);
            let q = Poly::z(&spec).sub(&Poly::constant(lambda));
            for place in [Place::finite(q.clone()), Place::Infinity] {
                let (OrdVal::Finite(du), OrdVal::Finite(ou)) =
                    (ord_at(&d, &place), ord_at(&u, &place))
                else {
                    continue;
                };
                assert!(
                    du >= ou - eps as i64,
                    "order inequality violated at {place} for {u}, eps={eps}"
                );
                if du == ou - eps as i64 {
                    equalities += 1;
                }
                samples += 1;
            }
        }
    }
    assert!(samples >= 1000, "only {samples} samples");
    assert!(equalities >= 10, "only {equalities} equality cases");
    println!(
        "ACCEPTANCE 2 (order inequality): PASS - {samples} samples, {equalities} equality cases in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_03_wronskian_criterion() {
    let start = Instant::now();
    let mut random_families = 0usize;
    for p in [2u64, 3] {
        let spec = prime(p);
        let mut rng = Rng::new(303 + p);
        for s in 1..=2u32 {
            let q = p.pow(s);
            for _ in 0..50 {
                let n = 1 + rng.below(q.min(4)) as usize;
                let fam: Vec<RatFunc> = (0..n).map(|_| rng.nonzero_ratfunc(&spec, 4)).collect();
                let cert = wronskian_certificate(&fam, s).unwrap();
                let rank = rank_oracle(&fam, s);
                assert_eq!(
                    cert.is_some(),
                    rank == n,
                    "criterion vs oracle disagree on {fam:?} (p={p}, s={s})"
                );
                if let Some(eps) = cert {
                    assert!(!wronskian_det(&fam, &eps).is_zero(), "unsound certificate");
                }
                random_families += 1;
            }
        }
    }
    assert!(random_families >= 200, "only {random_families} families");

    // exhaustive monomial families z^(i_1), ..., exponents <= 6, p = 2
    let spec = prime(2);
    let mut monomial_families = 0usize;
    for s in 1..=2u32 {
        let q = 2u64.pow(s) as usize;
        let monos: Vec<RatFunc> = (0..=6)
            .map(|i| RatFunc::from_poly(Poly::z(&spec).pow(i)))
            .collect();
        for mask in 1u32..(1 << 7) {
            let fam: Vec<RatFunc> = (0..7)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| monos[i as usize].clone())
                .collect();
            if fam.len() > q {
                continue;
            }
            let cert = wronskian_certificate(&fam, s).unwrap();
            let rank = rank_oracle(&fam, s);
            assert_eq!(cert.is_some(), rank == fam.len(), "monomials {mask:b} s={s}");
            monomial_families += 1;
        }
    }
    println!(
        "ACCEPTANCE 3 (wronskian vs rank oracle): PASS - {random_families} random + {monomial_families} monomial families in {:.1?}",
        start.elapsed()
    );
}

fn random_additive(rng: &mut Rng, p: u64) -> AdditivePoly {
    let prime_spec = prime(p);
    loop {
        let mut f = AdditivePoly::zero(p);
        let nvars = 1 + rng.below(3) as u32;
        for i in 0..nvars {
            let top = rng.below(3) as u32;
            for lvl in 0..=top {
                if lvl != top && rng.below(2) == 0 {
                    continue;
                }
                f.add_term(Var::ring(i), lvl, rng.poly(&prime_spec, 4));
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}

#[test]
fn acceptance_04_normalization_pipeline() {
    let start = Instant::now();
    let mut polys = 0usize;
    let mut grew = 0usize;
    for p in [2u64, 3] {
        let spec = prime(p);
        let loc = loc_over(&spec, &["z"]);
        let mut rng = Rng::new(404 + p);
        for round in 0..100 {
            let f = random_additive(&mut rng, p);
            let before_deg = f.degree();
            let before_vars = f.ring_vars().len();
            let res = normalize_full(&f).unwrap();
            // symbolic identity expands to zero
            assert!(
                res.verify_identity(&f),
                "p={p} round={round}: f.xi != fTilde + G for {f}"
            );
            let flags = classify(&res.f_tilde).unwrap();
            assert!(
                flags.strongly_normalized,
                "p={p} round={round}: not strongly normalized"
            );
            assert!(res.f_tilde.degree() <= before_deg);
            // degree equalization must expand a variable of degree p^(s_i)
            // into p^(s-s_i) fresh ones to stay surjective, so the variable
            // count is bounded by max(original count, p^s), not by the
            // original count alone
            let var_bound = before_vars.max(before_deg as usize);
            assert!(res.f_tilde.ring_vars().len() <= var_bound);
            if res.f_tilde.ring_vars().len() > before_vars {
                grew += 1;
            }
            // preimage . apply = identity on random targets
            for _ in 0..20 {
                let mut target: Assignment = BTreeMap::new();
                for v in f.ring_vars() {
                    target.insert(v, rng.in_ring(&loc, 3));
                }
                let pre = res.xi.preimage(&target, &loc).unwrap();
                let back = res.xi.apply(&pre, &spec).unwrap();
                for v in f.ring_vars() {
                    assert_eq!(back.get(&v), target.get(&v), "p={p} round={round}");
                }
            }
            polys += 1;
        }
    }
    assert!(polys >= 200);
    println!(
        "ACCEPTANCE 4 (normalization pipeline): PASS - {polys} polynomials, 20 witness targets each, {grew} var-count expansions from degree equalization in {:.1?}",
        start.elapsed()
    );
}

/// p-basic test polynomials over F_2 of degree 2 and 4 with constant lower
/// terms.
fn reduction_corpus_polys() -> Vec<AdditivePoly> {
    vec![
        parse_additive("x1^2 + poly{z}*x2^2", 2).unwrap(),
        parse_additive("x1^2 + poly{z}*x2^2 + x1 + x2", 2).unwrap(),
        parse_additive(
            "x1^4 + poly{z}*x2^4 + poly{z^2}*x3^4 + poly{z^3}*x4^4",
            2,
        )
        .unwrap(),
        parse_additive(
            "x1^4 + poly{z}*x2^4 + poly{z^2}*x3^4 + poly{z^3}*x4^4 + x1^2 + x3 + x4^2",
            2,
        )
        .unwrap(),
    ]
}

#[test]
fn acceptance_05_reduction_witness() {
    let start = Instant::now();
    let mut samples = 0usize;
    for (m, salt) in [(1usize, 0u64), (2, 1)] {
        let spec = FieldSpec::default_for(2, m).unwrap();
        for (s_set, salt2) in [(vec!["z"], 0u64), (vec!["z", "1+z"], 10)] {
            let loc = loc_over(&spec, &s_set);
            let mut rng = Rng::new(505 + salt * 100 + salt2);
            for f in reduction_corpus_polys() {
                for _ in 0..13 {
                    let u = rng.in_ring(&loc, 12);
                    // the reducer enforces strict ord progress at every
                    // iteration internally and errors on any violation
                    let w = reduce_mod_image(&f, &u, &loc).unwrap();
                    // witness triple: exactness, pole containment, ord cap
                    w.verify(&f, &u, &loc).unwrap();
                    let eord = e_ord(&f).unwrap().eord;
                    let mut places = loc.places();
                    places.push(Place::Infinity);
                    for v in &places {
                        if let OrdVal::Finite(o) = ord_at(&w.u_prime, v) {
                            assert!(o >= -(eord as i64), "ord bound violated at {v}");
                            if o < 0 {
                                assert!(
                                    matches!(ord_at(&u, v), OrdVal::Finite(ou) if ou < 0),
                                    "new pole at {v}"
                                );
                            }
                        }
                    }
                    samples += 1;
                }
            }
        }
    }
    assert!(samples >= 200, "only {samples} samples");
    println!(
        "ACCEPTANCE 5 (reduction witness triple): PASS - {samples} reductions, zero violations in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_06_image_decomposition() {
    let start = Instant::now();
    let mut samples = 0usize;
    let spec = prime(2);
    let loc = loc_over(&spec, &["z"]);
    let mut rng = Rng::new(606);
    for f in [
        parse_additive("x1^2 + poly{z}*x2^2", 2).unwrap(),
        parse_additive("x1^2 + poly{z}*x2^2 + x1", 2).unwrap(),
    ] {
        for _ in 0..55 {
            let u = rng.in_ring(&loc, 10);
            let (x, alphas) = image_decomposition(&f, &u, &loc).unwrap();
            for a in &alphas {
                assert!(a.coeffs().iter().all(|&c| c < 2));
            }
            let back = image_recombine(&f, &x, &alphas, &loc).unwrap();
            assert_eq!(back, u, "recombination failed for {u}");
            samples += 1;
        }
    }
    assert!(samples >= 100);
    println!(
        "ACCEPTANCE 6 (image decomposition): PASS - {samples} exact recombinations in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_07_height_bound_falsification() {
    let start = Instant::now();
    let spec = prime(2);
    let loc = loc_over(&spec, &["z"]);
    let f = parse_additive("x1^2 + poly{z}*x2^2", 2).unwrap();
    let ell = 3u64;
    let c = pole_order_bound(&f, ell).unwrap();
    let h = height_bound(&f, ell, &loc).unwrap();
    // widen both bounds by 2 and scan everything
    let pole_cap = c.unsigned_abs() as u32 + 2;
    let num_cap = h as usize + 2;
    let candidates = enumerate_ring_elements(&loc, num_cap, &[pole_cap]).unwrap();
    // precompute per-variable contributions
    let vars = f.ring_vars();
    let mut contrib: Vec<Vec<RatFunc>> = Vec::new();
    for v in &vars {
        let mut col = Vec::with_capacity(candidates.len());
        for cand in &candidates {
            let mut acc = RatFunc::zero(&spec);
            for (lvl, coeff) in f.levels_of(*v).unwrap() {
                acc = acc.add(&cand.pow(2u64.pow(*lvl)).scale_poly(&coeff.lift_to(&spec)));
            }
            col.push(acc);
        }
        contrib.push(col);
    }
    let mut scanned = 0u64;
    let mut inside = 0u64;
    for (i, x1) in candidates.iter().enumerate() {
        for (j, x2) in candidates.iter().enumerate() {
            scanned += 1;
            let val = contrib[0][i].add(&contrib[1][j]);
            let val_small = val.is_zero() || val.height().unwrap() <= ell;
            if !val_small {
                continue;
            }
            inside += 1;
            let tuple_height = [x1, x2]
                .iter()
                .filter(|x| !x.is_zero())
                .map(|x| x.height().unwrap())
                .max()
                .unwrap_or(0);
            assert!(
                tuple_height <= h,
                "counterexample: x1={x1}, x2={x2} has height {tuple_height} > h={h} with f(x)={val}"
            );
        }
    }
    println!(
        "ACCEPTANCE 7 (height bound falsification, C={c}, h={h}): PASS - {scanned} tuples scanned, {inside} inside the height-{ell} set, no violation in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_08_logic_witness_maps() {
    let start = Instant::now();
    let spec = prime(2);
    let loc = loc_over(&spec, &["z"]);
    let p = 2u64;
    let prime_spec = prime(p);

    // membership rewrite shape: f = x1^2 (strongly normalized), h its p-basic
    // completion, H(alpha) = alpha_1 + z^2 alpha_2
    let f = parse_additive("x1^2", 2).unwrap();
    let h = p_basic_completion(&f).unwrap();
    let fh = f.add(&h);
    let h_field = parse_additive("a1 + poly{z^2}*a2", 2).unwrap();
    let report = e_ord(&fh).unwrap();
    let n_exp = report.eord;
    let e_poly = loc.e_product().lift_to(&spec);
    let mut logic1_count = 0usize;
    let mut rng = Rng::new(808);
    for _ in 0..60 {
        // plant u = f(x) + H(alpha)
        let mut x: Assignment = BTreeMap::new();
        for v in f.ring_vars() {
            x.insert(v, rng.in_ring(&loc, 4));
        }
        let mut alpha: Assignment = BTreeMap::new();
        for v in h_field.field_vars() {
            alpha.insert(v, RatFunc::constant(rng.field_elem(&spec)));
        }
        let u = f
            .eval(&x, &spec)
            .unwrap()
            .add(&h_field.eval(&alpha, &spec).unwrap());
        // decompose u = f(x_under) + h(y) + (1/e^N) G(gamma)
        let (x_fh, alphas) = image_decomposition(&fh, &u, &loc).unwrap();
        let mut g_val = Poly::zero(&spec);
        for (i, a) in alphas.iter().enumerate() {
            g_val = g_val.add(&Poly::monomial(a.clone(), i));
        }
        let g_over_en = RatFunc::new(g_val, e_poly.pow(n_exp)).unwrap();
        // forward witness: w = x_under - x solves pi_1
        let mut w: Assignment = BTreeMap::new();
        for v in f.ring_vars() {
            w.insert(v, x_fh[&v].sub(&x[&v]));
        }
        let mut y: Assignment = BTreeMap::new();
        for v in h.ring_vars() {
            y.insert(v, x_fh[&v].clone());
        }
        let pi1_lhs = f
            .eval(&w, &spec)
            .unwrap()
            .add(&h.eval(&y, &spec).unwrap())
            .add(&g_over_en);
        let pi1_rhs = h_field.eval(&alpha, &spec).unwrap();
        assert_eq!(pi1_lhs, pi1_rhs, "pi_1 witness equation failed");
        // backward witness: x' = x_under - w reproduces the membership
        let mut x_back: Assignment = BTreeMap::new();
        for v in f.ring_vars() {
            x_back.insert(v, x_fh[&v].sub(&w[&v]));
        }
        let back = f
            .eval(&x_back, &spec)
            .unwrap()
            .add(&h_field.eval(&alpha, &spec).unwrap());
        assert_eq!(back, u, "membership reconstruction failed");
        logic1_count += 1;
    }

    // disjunct rewrite shape: one inequality and a sigma over the alphas
    let h_single = parse_additive("a1", 2).unwrap();
    let e1 = parse_additive("x1", 2).unwrap();
    let mut logic2_count = 0usize;
    for _ in 0..60 {
        let mut x: Assignment = BTreeMap::new();
        x.insert(Var::ring(0), rng.in_ring(&loc, 4));
        let alpha_val = rng.field_elem(&spec);
        let mut alpha: Assignment = BTreeMap::new();
        alpha.insert(Var::field(0), RatFunc::constant(alpha_val.clone()));
        let u = f
            .eval(&x, &spec)
            .unwrap()
            .add(&h_single.eval(&alpha, &spec).unwrap());
        // v_1 makes the planted inequality true
        let v1 = e1.eval(&x, &spec).unwrap().add(&RatFunc::one(&spec));
        // a second decomposition (w, beta): w = x + c with c^2 = alpha - beta
        let beta_val = rng.field_elem(&spec);
        let c = alpha_val.sub(&beta_val).pth_root();
        let mut w: Assignment = BTreeMap::new();
        w.insert(
            Var::ring(0),
            x[&Var::ring(0)].add(&RatFunc::constant(c)),
        );
        let mut beta: Assignment = BTreeMap::new();
        beta.insert(Var::field(0), RatFunc::constant(beta_val.clone()));
        // the decomposition property itself
        let dec = f
            .eval(&w, &spec)
            .unwrap()
            .add(&h_single.eval(&beta, &spec).unwrap());
        assert_eq!(dec, u, "second decomposition is not a decomposition");
        // forward: t = x - w, gamma = alpha - beta satisfy pi_2
        let mut t: Assignment = BTreeMap::new();
        t.insert(Var::ring(0), x[&Var::ring(0)].sub(&w[&Var::ring(0)]));
        let mut gamma: Assignment = BTreeMap::new();
        gamma.insert(
            Var::field(0),
            alpha[&Var::field(0)].sub(&beta[&Var::field(0)]),
        );
        let zero_check = f
            .eval(&t, &spec)
            .unwrap()
            .add(&h_single.eval(&gamma, &spec).unwrap());
        assert!(zero_check.is_zero(), "pi_2 equation failed");
        let lhs = e1.eval(&t, &spec).unwrap();
        let rhs = v1
            .sub(&e1.eval(&w, &spec).unwrap());
        assert_ne!(lhs, rhs, "pi_2 inequality failed");
        // P_sigma(beta + gamma) equals P_sigma(alpha)
        let recombined = beta[&Var::field(0)].add(&gamma[&Var::field(0)]);
        assert_eq!(recombined, alpha[&Var::field(0)], "sigma argument shift failed");
        // backward: x' = w + t, alpha' = beta + gamma satisfy the disjunct
        let mut x_b: Assignment = BTreeMap::new();
        x_b.insert(Var::ring(0), w[&Var::ring(0)].add(&t[&Var::ring(0)]));
        let mut alpha_b: Assignment = BTreeMap::new();
        alpha_b.insert(Var::field(0), recombined);
        let back = f
            .eval(&x_b, &spec)
            .unwrap()
            .add(&h_single.eval(&alpha_b, &spec).unwrap());
        assert_eq!(back, u, "backward equation failed");
        let lhs = e1.eval(&x_b, &spec).unwrap();
        assert_ne!(lhs, v1, "backward inequality failed");
        logic2_count += 1;
    }
    let _ = prime_spec;
    assert!(logic1_count >= 50 && logic2_count >= 50);
    println!(
        "ACCEPTANCE 8 (witness maps): PASS - {logic1_count} membership + {logic2_count} disjunct instances, all conjuncts exact in {:.1?}",
        start.elapsed()
    );
}

/// The fixed universalization corpus: bounded existential blocks over F_2,
/// S = {z}, with at most one free ring variable.
fn universalization_corpus() -> Vec<(frobring_core::logic::BoundedExistential, Vec<Var>)> {
    use frobring_core::logic::BoundedExistential;
    let prime_spec = prime(2);
    let one = Poly::one(&prime_spec);
    let a1 = Var::field(0);
    let a2 = Var::field(1);
    let beta = Var::field(7);
    let v = Var::ring(9);
    let gvar = |var: Var, coeff: Poly| {
        let mut g = AdditivePoly::zero(2);
        g.add_term(var, 0, coeff);
        g
    };
    let sigma_nonzero = SigmaPredicate::new(
        vec![Var::field(20)],
        Formula::not(Formula::Eq(Term::var(Var::field(20)), Term::Zero)),
    )
    .unwrap();
    let mut out = Vec::new();
    // 1: no free variables, direct packaging
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![(gvar(a1, one.clone()), Term::One)],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![],
    ));
    // 2: equation against a free ring term
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: vec![(gvar(a1, one.clone()), Term::var(v))],
            inequalities: Vec::new(),
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 3: inequality against a free ring term
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![(gvar(a1, one.clone()), Term::var(v))],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 4: z-weighted equation
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: vec![(gvar(a1, Poly::z(&prime_spec)), Term::var(v))],
            inequalities: Vec::new(),
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 5: two bound variables, equation + direct inequality
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1, a2],
            equations: vec![(
                gvar(a1, one.clone()).add(&gvar(a2, Poly::z(&prime_spec))),
                Term::var(v),
            )],
            inequalities: vec![(
                gvar(a1, one.clone()).add(&gvar(a2, one.clone()).neg()),
                Term::Zero,
            )],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 6: two expansions
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![
                (gvar(a1, one.clone()), Term::var(v)),
                (gvar(a1, one.clone()), Term::add(Term::var(v), Term::One)),
            ],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 7: free field parameter inside the additive side
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: Vec::new(),
            inequalities: vec![(
                gvar(a1, one.clone()).add(&gvar(beta, one.clone())),
                Term::var(v),
            )],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v, beta],
    ));
    // 8: equation with a sigma side condition
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1, a2],
            equations: vec![(
                gvar(a1, one.clone()).add(&gvar(a2, one.clone())),
                Term::var(v),
            )],
            inequalities: Vec::new(),
            sigma: sigma_nonzero.clone(),
            sigma_args: vec![Term::var(a1)],
        },
        vec![v],
    ));
    // 9: equation and inequality against the same free variable
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: vec![(gvar(a1, one.clone()), Term::var(v))],
            inequalities: vec![(gvar(a1, one.clone()), Term::One)],
            sigma: SigmaPredicate::trivially_true(),
            sigma_args: Vec::new(),
        },
        vec![v],
    ));
    // 10: sigma on a shifted argument plus a free field parameter
    out.push((
        BoundedExistential {
            p: 2,
            exists_field: vec![a1],
            equations: vec![(
                gvar(a1, Poly::z(&prime_spec)).add(&gvar(beta, one.clone())),
                Term::var(v),
            )],
            inequalities: Vec::new(),
            sigma: sigma_nonzero,
            sigma_args: vec![Term::add(Term::var(a1), Term::var(beta))],
        },
        vec![v, beta],
    ));
    out
}

#[test]
fn acceptance_09_universalization() {
    let start = Instant::now();
    let spec = prime(2);
    let loc = loc_over(&spec, &["z"]);
    let caps = TransformCaps::default();
    let eval = BoundedEvaluator::new(&loc, 4).unwrap();
    let field_vals: Vec<RatFunc> = enumerate_field(&spec)
        .into_iter()
        .map(RatFunc::constant)
        .collect();
    let mut cases = 0usize;
    let mut assignments = 0usize;
    for (case, (block, free)) in universalization_corpus().into_iter().enumerate() {
        let pi = block.to_formula();
        let mut fresh = FreshVars::beyond(&pi);
        for v in &free {
            fresh.bump(*v);
        }
        let chi = universalize_bounded(&block, &loc, &mut fresh, &caps).unwrap();
        // every assignment of the free variables at height cap 4
        let domains: Vec<Vec<RatFunc>> = free
            .iter()
            .map(|v| match v.sort {
                frobring_core::additive::Sort::Ring => eval.ring_domain().to_vec(),
                frobring_core::additive::Sort::Field => field_vals.clone(),
            })
            .collect();
        let mut idx = vec![0usize; free.len()];
        loop {
            let mut env: BTreeMap<Var, RatFunc> = BTreeMap::new();
            for ((v, dom), &i) in free.iter().zip(&domains).zip(&idx) {
                env.insert(*v, dom[i].clone());
            }
            let truth_pi = eval.eval(&pi, &env).unwrap();
            let truth_chi = eval.eval(&chi, &env).unwrap();
            assert_eq!(
                truth_pi, truth_chi,
                "case {case}: pi/chi disagree at {env:?}"
            );
            assignments += 1;
            let mut carry = true;
            for (slot, dom) in idx.iter_mut().zip(&domains) {
                *slot += 1;
                if *slot < dom.len() {
                    carry = false;
                    break;
                }
                *slot = 0;
            }
            if carry {
                break;
            }
        }
        cases += 1;
    }
    assert_eq!(cases, 10);
    println!(
        "ACCEPTANCE 9 (universalization pi <-> chi at cap 4): PASS - {cases} cases, {assignments} assignments in {:.1?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_10_sentence_translation() {
    let start = Instant::now();
    let caps = TransformCaps::default();
    // (source, p, m, S, hand-verified truth)
    let corpus: Vec<(&str, u64, usize, Vec<&str>, bool)> = vec![
        ("exists x:R (x + x = 0 and x != 0)", 2, 1, vec!["z"], true),
        ("exists x:R (x + x = 0 and x != 0)", 3, 1, vec!["z"], false),
        ("exists x:R (z*x = 1)", 2, 1, vec!["z"], true),
        ("exists x:R (poly{1+z}*x = 1)", 2, 1, vec!["z"], false),
        ("exists x:R (poly{1+z}*x = 1)", 2, 1, vec!["z", "1+z"], true),
        ("forall x:R (x + x = 0)", 2, 1, vec!["z"], true),
        ("forall x:R (x = 0)", 2, 1, vec!["z"], false),
        ("exists a:F (a != 0 and a != 1)", 2, 1, vec!["z"], false),
        ("exists a:F (a != 0 and a != 1)", 2, 2, vec!["z"], true),
        ("forall x:R exists y:R (y + y = x)", 3, 1, vec!["z"], true),
        ("forall x:R exists y:R (y + y = x)", 2, 1, vec!["z"], false),
        ("exists x:R (x^p = z)", 2, 1, vec!["z"], false),
        ("exists x:R (x^p = z^2)", 2, 1, vec!["z"], true),
        ("exists x:R (not inF(x))", 2, 1, vec!["z"], true),
    ];
    let mut count = 0usize;
    for (src, p, m, s_set, expect) in corpus {
        let spec = FieldSpec::default_for(p, m).unwrap();
        let loc = loc_over(&spec, &s_set);
        let phi = parse_formula(src, p).unwrap();
        let sigma = sentence_to_sigma(&phi, &loc, &caps).unwrap();
        let got = eval_sigma_over_f(&sigma, &[], &spec).unwrap();
        assert_eq!(
            got, expect,
            "sentence `{src}` over p={p}, m={m}, S={s_set:?}"
        );
        count += 1;
    }
    assert!(count >= 10);
    println!(
        "ACCEPTANCE 10 (sentence translation): PASS - {count} sentences match their ground truths in {:.1?}",
        start.elapsed()
    );
}
