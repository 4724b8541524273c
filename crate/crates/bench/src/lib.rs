//! Shared fixtures for the micro-benchmarks.

use frobring_core::additive::{AdditivePoly, Var};
use frobring_core::ratfun::{Localization, RatFunc};
use frobring_core::sample::Rng;
use frobring_core::{FieldSpec, Poly};
use std::sync::Arc;

pub fn f2() -> Arc<FieldSpec> {
    FieldSpec::prime_field(2).expect("prime field")
}

pub fn loc_z() -> Localization {
    let spec = f2();
    Localization::new(&spec, vec![Poly::z(&f2())]).expect("localization")
}

/// The degree-2 workhorse `x1^2 + z x2^2`.
pub fn basic_poly() -> AdditivePoly {
    let prime = f2();
    let mut f = AdditivePoly::zero(2);
    f.add_term(Var::ring(0), 1, Poly::one(&prime));
    f.add_term(Var::ring(1), 1, Poly::z(&prime));
    f
}

pub fn sample_ratfuncs(seed: u64, n: usize, deg: usize) -> Vec<RatFunc> {
    let spec = f2();
    let mut rng = Rng::new(seed);
    (0..n).map(|_| rng.nonzero_ratfunc(&spec, deg)).collect()
}
