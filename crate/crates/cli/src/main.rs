//! Command-line front end: exact arithmetic, normalization, bounds and the
//! formula pipeline, with reproducible structured output.

mod config;
mod selftest;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use frobring_core::additive::{classify, parse_additive};
use frobring_core::bounds::{
    e_ord, height_bound, inverse_image, reduce_mod_image,
};
use frobring_core::hasse::hasse_derivative;
use frobring_core::independence::{rank_oracle, wronskian_certificate, wronskian_det};
use frobring_core::logic::{
    eval_bounded_over_r, eval_sigma_over_f, model_complete_transform, parse_formula,
    parse_lp_formula, sentence_to_sigma, SigmaPredicate, TransformCaps,
};
use frobring_core::normalize::normalize_full;
use frobring_core::textio::{parse_family, parse_ratfunc};
use frobring_core::Error as CoreError;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "frobring",
    about = "Exact computer algebra for rings of rational functions with the Frobenius map",
    version
)]
struct Cli {
    /// Config file with key=value lines (field, s, seed, height_cap, structured).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working field, e.g. `p=2` or `p=2,m=2,mod=t^2+t+1`.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Localization set S as `;`-separated irreducibles of F_p[z], e.g. `z;z+1`.
    #[arg(long, global = true)]
    s: Option<String>,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit machine-readable JSON records.
    #[arg(long, global = true)]
    structured: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize an additive polynomial; prints the transformation,
    /// the strongly normalized polynomial and the field part.
    Normalize {
        #[arg(long)]
        poly: String,
    },
    /// Wronskian independence certificate over F(z^(p^s)).
    Wronskian {
        #[arg(long = "s-exp")]
        s_exp: u32,
        /// Family as `;`-separated rational functions.
        #[arg(long)]
        family: String,
    },
    /// Hasse hyperderivative of a rational function.
    Hasse {
        #[arg(long)]
        eps: u32,
        #[arg(long)]
        expr: String,
    },
    /// Order-bound report for a p-basic additive polynomial.
    Eord {
        #[arg(long)]
        poly: String,
    },
    /// Reduce a ring element modulo the image of a p-basic polynomial.
    Reduce {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        u: String,
    },
    /// Height bound h(f, ell) for a strongly normalized polynomial.
    Hbound {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        ell: u64,
    },
    /// Complete inverse image {x : f(x) = y} by bounded exhaustive search.
    Preimage {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        y: String,
    },
    /// Rewrite a formula into an equivalent universal formula.
    Transform {
        #[arg(long)]
        formula: String,
    },
    /// Reduce a sentence to a sentence of L_p about the coefficient field.
    ToSigma {
        #[arg(long)]
        formula: String,
    },
    /// Evaluate an L_p sentence over the working field.
    EvalSigma {
        #[arg(long)]
        sigma: String,
    },
    /// Evaluate a formula under bounded semantics (ring variables range
    /// over elements of height at most the cap).
    EvalBounded {
        #[arg(long)]
        cap: usize,
        #[arg(long)]
        formula: String,
    },
    /// Run the built-in verification suites.
    Selftest {
        /// Reduced sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

fn emit(cfg: &RunConfig, human: String, record: Value) {
    if cfg.structured {
        println!("{}", serde_json::to_string_pretty(&record).expect("json"));
    } else {
        println!("{human}");
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = RunConfig::defaults()?;
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(field) = &cli.field {
        cfg.set_field(field)?;
    }
    if let Some(s) = &cli.s {
        cfg.set_s(s)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.structured |= cli.structured;
    let p = cfg.spec.p();

    match &cli.command {
        Command::Normalize { poly } => {
            let f = parse_additive(poly, p)?;
            let res = normalize_full(&f)?;
            let flags = classify(&res.f_tilde)?;
            let identity_ok = res.verify_identity(&f);
            let components: BTreeMap<String, String> = res
                .xi
                .components()
                .iter()
                .map(|(v, c)| (v.to_string(), c.to_string()))
                .collect();
            emit(
                &cfg,
                format!(
                    "fTilde: {}\nG: {}\nclassify: {:?}\nidentity f.xi = fTilde + G: {}\nxi:\n{}",
                    res.f_tilde,
                    res.g_field,
                    flags,
                    identity_ok,
                    components
                        .iter()
                        .map(|(v, c)| format!("  {v} = {c}"))
                        .collect::<Vec<_>>()
                        .join("\n")
                ),
                json!({
                    "fTilde": res.f_tilde.to_string(),
                    "g": res.g_field.to_string(),
                    "classify": flags,
                    "identity": identity_ok,
                    "xi": components,
                }),
            );
            Ok(identity_ok)
        }
        Command::Wronskian { s_exp, family } => {
            let fam = parse_family(family, &cfg.spec)?;
            let cert = wronskian_certificate(&fam, *s_exp)?;
            let rank = rank_oracle(&fam, *s_exp);
            match cert {
                Some(eps) => {
                    let det = wronskian_det(&fam, &eps);
                    emit(
                        &cfg,
                        format!("independent; eps = {:?}; det = {det}; rank = {rank}", eps.0),
                        json!({
                            "verdict": "independent",
                            "eps": eps.0,
                            "det": det.to_string(),
                            "rank": rank,
                        }),
                    );
                }
                None => emit(
                    &cfg,
                    format!("dependent; rank = {rank}"),
                    json!({"verdict": "dependent", "rank": rank}),
                ),
            }
            Ok(true)
        }
        Command::Hasse { eps, expr } => {
            let x = parse_ratfunc(expr, &cfg.spec)?;
            let d = hasse_derivative(&x, *eps);
            emit(
                &cfg,
                format!("D_{eps}({x}) = {d}"),
                json!({"eps": eps, "input": x.to_string(), "derivative": d.to_string()}),
            );
            Ok(true)
        }
        Command::Eord { poly } => {
            let f = parse_additive(poly, p)?;
            let r = e_ord(&f)?;
            emit(
                &cfg,
                format!(
                    "E_ord = {} (m = {}, m0 = {}, omega = {}, C = {}, eps = {:?}, W = {})",
                    r.eord, r.m, r.m0, r.omega, r.c_bound, r.eps.0, r.wronskian
                ),
                json!({
                    "eord": r.eord, "m": r.m, "m0": r.m0, "omega": r.omega,
                    "c": r.c_bound, "eps": r.eps.0, "wronskian": r.wronskian.to_string(),
                }),
            );
            Ok(true)
        }
        Command::Reduce { poly, u } => {
            let f = parse_additive(poly, p)?;
            let loc = cfg.localization()?;
            let u_val = parse_ratfunc(u, &cfg.spec)?;
            let w = reduce_mod_image(&f, &u_val, &loc)?;
            let witness: BTreeMap<String, String> = w
                .x_tilde
                .iter()
                .map(|(v, x)| (v.to_string(), x.to_string()))
                .collect();
            emit(
                &cfg,
                format!(
                    "u' = {}\nE_ord = {}\nwitness:\n{}",
                    w.u_prime,
                    w.eord,
                    witness
                        .iter()
                        .map(|(v, x)| format!("  {v} = {x}"))
                        .collect::<Vec<_>>()
                        .join("\n")
                ),
                json!({
                    "uPrime": w.u_prime.to_string(),
                    "eord": w.eord,
                    "xTilde": witness,
                }),
            );
            Ok(true)
        }
        Command::Hbound { poly, ell } => {
            let f = parse_additive(poly, p)?;
            let loc = cfg.localization()?;
            let h = height_bound(&f, *ell, &loc)?;
            emit(
                &cfg,
                format!("h(f, {ell}) = {h}"),
                json!({"ell": ell, "h": h}),
            );
            Ok(true)
        }
        Command::Preimage { poly, y } => {
            let f = parse_additive(poly, p)?;
            let loc = cfg.localization()?;
            let y_val = parse_ratfunc(y, &cfg.spec)?;
            let sols = inverse_image(&f, &y_val, &loc)?;
            let rendered: Vec<BTreeMap<String, String>> = sols
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|(v, x)| (v.to_string(), x.to_string()))
                        .collect()
                })
                .collect();
            emit(
                &cfg,
                format!(
                    "{} solutions\n{}",
                    sols.len(),
                    rendered
                        .iter()
                        .map(|s| {
                            s.iter()
                                .map(|(v, x)| format!("{v} = {x}"))
                                .collect::<Vec<_>>()
                                .join(", ")
                        })
                        .collect::<Vec<_>>()
                        .join("\n")
                ),
                json!({"count": sols.len(), "solutions": rendered}),
            );
            Ok(true)
        }
        Command::Transform { formula } => {
            let phi = parse_formula(formula, p)?;
            let loc = cfg.localization()?;
            let out = model_complete_transform(&phi, &loc, &TransformCaps::default())?;
            emit(
                &cfg,
                format!("{out}"),
                json!({"input": phi.to_string(), "universal": out.to_string()}),
            );
            Ok(true)
        }
        Command::ToSigma { formula } => {
            let phi = parse_formula(formula, p)?;
            let loc = cfg.localization()?;
            let sigma = sentence_to_sigma(&phi, &loc, &TransformCaps::default())?;
            let truth = eval_sigma_over_f(&sigma, &[], &cfg.spec)?;
            emit(
                &cfg,
                format!("sigma: {}\ntruth over F: {truth}", sigma.body),
                json!({"sigma": sigma.body.to_string(), "truth": truth}),
            );
            Ok(true)
        }
        Command::EvalSigma { sigma } => {
            let body = parse_lp_formula(sigma, p)?;
            let pred = SigmaPredicate::new(Vec::new(), body)?;
            let truth = eval_sigma_over_f(&pred, &[], &cfg.spec)?;
            emit(&cfg, format!("{truth}"), json!({"truth": truth}));
            Ok(true)
        }
        Command::EvalBounded { cap, formula } => {
            let phi = parse_formula(formula, p)?;
            let loc = cfg.localization()?;
            let truth = eval_bounded_over_r(&phi, &BTreeMap::new(), *cap, &loc)?;
            emit(
                &cfg,
                format!("{truth} (bounded semantics, height cap {cap})"),
                json!({"truth": truth, "cap": cap}),
            );
            Ok(truth || true)
        }
        Command::Selftest { quick } => selftest::run(&cfg, *quick),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<CoreError>() {
                Some(CoreError::ResourceCap(_)) => 3,
                Some(CoreError::Internal(_)) => 1,
                Some(_) => 2,
                None => 2,
            };
            ExitCode::from(code)
        }
    }
}
