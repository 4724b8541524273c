//! Exact arithmetic in `F[z]`, `F(z)` and the localized ring
//! `R = F[z, s_1^-1, ..., s_nu^-1]`: orders, heights, partial fractions,
//! division facts and the `q`-power basis decomposition.

pub mod division;
pub mod factor;
pub mod partial_fractions;
pub mod poly;
pub mod rational;

pub use division::{
    divide_with_remainder, expand_base_c, poly_q_power_decomposition, q_power_decomposition,
    q_power_recombine,
};
pub use factor::{
    factor, is_irreducible, monic_polys_of_degree, remains_irreducible,
    smallest_irreducible_avoiding,
};
pub use partial_fractions::{partial_fractions, PartialFractionForm, PfTerm};
pub use poly::Poly;
pub use rational::{
    denominator_exponents, in_ring, ord_at, rat_arith, Localization, OrdVal, Place, RatFunc,
    RatOp,
};
