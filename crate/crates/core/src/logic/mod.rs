//! The formula layer: AST, parser, evaluators, the existential normal form,
//! and the transformations that rewrite formulas about the localized ring
//! into universal form and sentences into questions about the coefficient
//! field.

pub mod ast;
pub mod enf;
pub mod eval;
pub mod parser;
pub mod sigma;
pub mod transform;

pub use ast::{
    additive_to_term, flincomb_eq, flincomb_neq, term_to_flincomb, Formula, SigmaPredicate,
    Term,
};
pub use enf::{
    bounded_height_formula, eliminate_negations, to_existential_normal_form, Enf, EnfDisjunct,
};
pub use eval::{eval_bounded_over_r, eval_sigma_over_f, BoundedEvaluator};
pub use parser::{parse_formula, parse_lp_formula, parse_term};
pub use sigma::sentence_to_sigma;
pub use transform::{
    logic1_transform, logic2_transform, model_complete_transform, universalize_bounded,
    BoundedExistential, Logic1Data, Logic2Data, TransformCaps,
};
