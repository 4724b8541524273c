//! Exact computer algebra for rings of rational functions in positive
//! characteristic with the Frobenius map.
//!
//! The crate implements, end to end:
//!
//! - arithmetic in concrete finite fields `F_{p^m}` ([`gf`]);
//! - exact arithmetic in `F[z]`, `F(z)` and localized rings
//!   `R = F[z, s_1^-1, ..., s_nu^-1]`, with orders, heights and partial
//!   fractions ([`ratfun`]);
//! - Hasse hyperderivatives and their identities ([`hasse`]);
//! - additive polynomials, proper transformations and the normalization
//!   pipeline down to strongly normalized and p-basic forms ([`additive`],
//!   [`normalize`]);
//! - generalized-Wronskian independence certificates over `F(z^{p^s})`
//!   ([`independence`]);
//! - effective order and height bounds with constructive witnesses
//!   ([`bounds`]);
//! - the formula language of addition, Frobenius and multiplication by `z`,
//!   with the transformation pipeline that rewrites sentences about `R`
//!   into sentences about the coefficient field ([`logic`]).

pub mod additive;
pub mod bounds;
pub mod error;
pub mod gf;
pub mod hasse;
pub mod independence;
pub mod logic;
pub mod normalize;
pub mod ratfun;
pub mod sample;
pub mod textio;

pub use error::{Error, Result};
pub use gf::{enumerate_field, FieldElem, FieldSpec};
pub use ratfun::{Localization, OrdVal, Place, Poly, RatFunc};
