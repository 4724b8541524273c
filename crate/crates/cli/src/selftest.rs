//! Built-in verification suites: reduced-size versions of the acceptance
//! checks, deterministic in the configured seed.

use crate::config::RunConfig;
use anyhow::Result;
use frobring_core::additive::{classify, AdditivePoly, Var};
use frobring_core::bounds::{image_decomposition, image_recombine, reduce_mod_image};
use frobring_core::gf::enumerate_field;
use frobring_core::hasse::{check_p3, hasse_derivative, hasse_derivative_poly};
use frobring_core::independence::{rank_oracle, wronskian_certificate};
use frobring_core::logic::{
    eval_sigma_over_f, parse_formula, sentence_to_sigma, TransformCaps,
};
use frobring_core::normalize::normalize_full;
use frobring_core::ratfun::{ord_at, Localization, OrdVal, Place, RatFunc};
use frobring_core::sample::Rng;
use frobring_core::{FieldSpec, Poly};
use serde_json::json;

struct Suite {
    name: &'static str,
    checks: usize,
    failures: usize,
}

fn report(cfg: &RunConfig, suites: &[Suite]) -> bool {
    let mut all_ok = true;
    let mut records = Vec::new();
    for s in suites {
        let ok = s.failures == 0;
        all_ok &= ok;
        if cfg.structured {
            records.push(json!({
                "suite": s.name,
                "checks": s.checks,
                "failures": s.failures,
                "pass": ok,
            }));
        } else {
            println!(
                "{} {} ({} checks, {} failures)",
                if ok { "PASS" } else { "FAIL" },
                s.name,
                s.checks,
                s.failures
            );
        }
    }
    if cfg.structured {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "suites": records, "pass": all_ok }))
                .expect("json")
        );
    }
    all_ok
}

pub fn run(cfg: &RunConfig, quick: bool) -> Result<bool> {
    let scale = if quick { 1 } else { 4 };
    let mut suites = Vec::new();
    suites.push(hasse_suite(cfg.seed, 50 * scale)?);
    suites.push(ord_suite(cfg.seed + 1, 50 * scale)?);
    suites.push(wronskian_suite(cfg.seed + 2, 10 * scale)?);
    suites.push(normalize_suite(cfg.seed + 3, 8 * scale)?);
    suites.push(reduce_suite(cfg.seed + 4, 8 * scale)?);
    suites.push(image_suite(cfg.seed + 5, 4 * scale)?);
    suites.push(sentence_suite()?);
    Ok(report(cfg, &suites))
}

fn hasse_suite(seed: u64, n: usize) -> Result<Suite> {
    let mut checks = 0;
    let mut failures = 0;
    for (p, m) in [(2u64, 1usize), (3, 1), (2, 2)] {
        let spec = FieldSpec::default_for(p, m)?;
        let mut rng = Rng::new(seed + p + m as u64);
        for _ in 0..n {
            let f = rng.ratfunc(&spec, 5);
            let g = rng.ratfunc(&spec, 5);
            let eps = 1 + rng.below(6) as u32;
            // linearity
            checks += 1;
            if hasse_derivative(&f.add(&g), eps)
                != hasse_derivative(&f, eps).add(&hasse_derivative(&g, eps))
            {
                failures += 1;
            }
            // Leibniz
            checks += 1;
            let mut leib = RatFunc::zero(&spec);
            for i in 0..=eps {
                leib = leib.add(
                    &hasse_derivative(&f, i).mul(&hasse_derivative(&g, eps - i)),
                );
            }
            if hasse_derivative(&f.mul(&g), eps) != leib {
                failures += 1;
            }
            // p-th power rule
            checks += 1;
            if check_p3(&f, 1, eps).is_err() {
                failures += 1;
            }
        }
    }
    Ok(Suite {
        name: "hasse-identities",
        checks,
        failures,
    })
}

fn ord_suite(seed: u64, n: usize) -> Result<Suite> {
    let mut checks = 0;
    let mut failures = 0;
    for p in [2u64, 3] {
        let spec = FieldSpec::prime_field(p)?;
        let mut rng = Rng::new(seed + p);
        for _ in 0..n {
            let u = rng.nonzero_ratfunc(&spec, 5);
            let eps = 1 + rng.below(5) as u32;
            let d = hasse_derivative(&u, eps);
            if d.is_zero() {
                continue;
            }
            let lambda = rng.field_elem(&spec);
            let q = Poly::z(&spec).sub(&Poly::constant(lambda));
            for place in [Place::finite(q.clone()), Place::Infinity] {
                checks += 1;
                if let (OrdVal::Finite(du), OrdVal::Finite(ou)) =
                    (ord_at(&d, &place), ord_at(&u, &place))
                {
                    if du < ou - eps as i64 {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(Suite {
        name: "ord-inequality",
        checks,
        failures,
    })
}

fn wronskian_suite(seed: u64, n: usize) -> Result<Suite> {
    let mut checks = 0;
    let mut failures = 0;
    for p in [2u64, 3] {
        let spec = FieldSpec::prime_field(p)?;
        let mut rng = Rng::new(seed + p);
        for s in 1..=2u32 {
            let q = p.pow(s);
            for _ in 0..n {
                let size = 1 + rng.below(q.min(3)) as usize;
                let fam: Vec<RatFunc> =
                    (0..size).map(|_| rng.nonzero_ratfunc(&spec, 3)).collect();
                checks += 1;
                let cert = wronskian_certificate(&fam, s)?;
                let rank = rank_oracle(&fam, s);
                if cert.is_some() != (rank == size) {
                    failures += 1;
                }
            }
        }
    }
    Ok(Suite {
        name: "wronskian-vs-rank",
        checks,
        failures,
    })
}

fn random_additive(rng: &mut Rng, p: u64, max_vars: u32, max_level: u32, cdeg: usize) -> AdditivePoly {
    let prime = FieldSpec::prime_field(p).expect("prime");
    loop {
        let mut f = AdditivePoly::zero(p);
        let nvars = 1 + rng.below(max_vars as u64) as u32;
        for i in 0..nvars {
            let lvl_top = rng.below(max_level as u64 + 1) as u32;
            for lvl in 0..=lvl_top {
                if lvl != lvl_top && rng.below(2) == 0 {
                    continue;
                }
                f.add_term(Var::ring(i), lvl, rng.poly(&prime, cdeg));
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}

fn normalize_suite(seed: u64, n: usize) -> Result<Suite> {
    let mut checks = 0;
    let mut failures = 0;
    for p in [2u64, 3] {
        let mut rng = Rng::new(seed + p);
        for _ in 0..n {
            let f = random_additive(&mut rng, p, 3, 2, 3);
            checks += 1;
            match normalize_full(&f) {
                Err(_) => failures += 1,
                Ok(res) => {
                    let ok = res.verify_identity(&f)
                        && classify(&res.f_tilde)?.strongly_normalized
                        && res.f_tilde.degree() <= f.degree();
                    if !ok {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(Suite {
        name: "normalize-pipeline",
        checks,
        failures,
    })
}

fn acceptance_f(p: u64) -> AdditivePoly {
    let prime = FieldSpec::prime_field(p).expect("prime");
    let mut f = AdditivePoly::zero(p);
    f.add_term(Var::ring(0), 1, Poly::one(&prime));
    f.add_term(Var::ring(1), 1, Poly::z(&prime));
    f
}

fn reduce_suite(seed: u64, n: usize) -> Result<Suite> {
    let spec = FieldSpec::prime_field(2)?;
    let prime = FieldSpec::prime_field(2)?;
    let loc = Localization::new(&spec, vec![Poly::z(&prime)])?;
    let f = acceptance_f(2);
    let mut rng = Rng::new(seed);
    let mut checks = 0;
    let mut failures = 0;
    for _ in 0..n {
        let u = rng.in_ring(&loc, 9);
        checks += 1;
        match reduce_mod_image(&f, &u, &loc) {
            Err(_) => failures += 1,
            Ok(w) => {
                if w.verify(&f, &u, &loc).is_err() {
                    failures += 1;
                }
            }
        }
    }
    Ok(Suite {
        name: "reduction-witness",
        checks,
        failures,
    })
}

fn image_suite(seed: u64, n: usize) -> Result<Suite> {
    let spec = FieldSpec::prime_field(2)?;
    let prime = FieldSpec::prime_field(2)?;
    let loc = Localization::new(&spec, vec![Poly::z(&prime)])?;
    let f = acceptance_f(2);
    let mut rng = Rng::new(seed);
    let mut checks = 0;
    let mut failures = 0;
    for _ in 0..n {
        let u = rng.in_ring(&loc, 7);
        checks += 1;
        match image_decomposition(&f, &u, &loc) {
            Err(_) => failures += 1,
            Ok((x, alphas)) => {
                if image_recombine(&f, &x, &alphas, &loc)? != u {
                    failures += 1;
                }
            }
        }
    }
    Ok(Suite {
        name: "image-decomposition",
        checks,
        failures,
    })
}

fn sentence_suite() -> Result<Suite> {
    let mut checks = 0;
    let mut failures = 0;
    let cases: [(&str, u64, usize, bool); 5] = [
        ("exists x:R (x + x = 0 and x != 0)", 2, 1, true),
        ("exists x:R (x + x = 0 and x != 0)", 3, 1, false),
        ("exists x:R (z*x = 1)", 2, 1, true),
        ("forall x:R (x + x = 0)", 2, 1, true),
        ("exists a:F (a != 0 and a != 1)", 2, 2, true),
    ];
    for (src, p, m, expect) in cases {
        let spec = FieldSpec::default_for(p, m)?;
        let prime = FieldSpec::prime_field(p)?;
        let loc = Localization::new(&spec, vec![Poly::z(&prime)])?;
        let phi = parse_formula(src, p)?;
        checks += 1;
        let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default())?;
        let got = eval_sigma_over_f(&sigma, &[], &spec)?;
        if got != expect {
            failures += 1;
        }
    }
    // a direct field probe: every element satisfies Fermat over the prime
    // field but not over extensions
    let f4 = FieldSpec::default_for(2, 2)?;
    checks += 1;
    if enumerate_field(&f4).iter().all(|a| a.frobenius() == *a) {
        failures += 1;
    }
    let _ = hasse_derivative_poly(&Poly::z(&FieldSpec::prime_field(2)?), 1);
    Ok(Suite {
        name: "sentence-corpus",
        checks,
        failures,
    })
}
