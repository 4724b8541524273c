//! Deterministic samplers for the seeded property suites and the CLI
//! self-test. The generator is a small SplitMix64 so that identical seeds
//! give identical streams on every platform.

use crate::gf::{FieldElem, FieldSpec};
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::{Localization, RatFunc};
use std::sync::Arc;

/// Seeded deterministic generator.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng {
            state: seed.wrapping_add(0x9E3779B97F4A7C15),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (n > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn field_elem(&mut self, spec: &Arc<FieldSpec>) -> FieldElem {
        FieldElem::from_index(spec, self.below(spec.order()))
    }

    pub fn nonzero_field_elem(&mut self, spec: &Arc<FieldSpec>) -> FieldElem {
        FieldElem::from_index(spec, 1 + self.below(spec.order() - 1))
    }

    /// Polynomial of degree at most `max_deg` (possibly zero).
    pub fn poly(&mut self, spec: &Arc<FieldSpec>, max_deg: usize) -> Poly {
        let deg = self.below(max_deg as u64 + 1) as usize;
        let coeffs = (0..=deg).map(|_| self.field_elem(spec)).collect();
        Poly::new(spec, coeffs)
    }

    pub fn nonzero_poly(&mut self, spec: &Arc<FieldSpec>, max_deg: usize) -> Poly {
        loop {
            let p = self.poly(spec, max_deg);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Rational function with numerator and denominator degree at most
    /// `max_deg` (denominator nonzero; value may be zero).
    pub fn ratfunc(&mut self, spec: &Arc<FieldSpec>, max_deg: usize) -> RatFunc {
        let num = self.poly(spec, max_deg);
        let den = self.nonzero_poly(spec, max_deg);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn nonzero_ratfunc(&mut self, spec: &Arc<FieldSpec>, max_deg: usize) -> RatFunc {
        loop {
            let x = self.ratfunc(spec, max_deg);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// An element of the localized ring with height at most `height`:
    /// a numerator of degree <= height over a random S-power denominator
    /// of degree <= height.
    pub fn in_ring(&mut self, loc: &Localization, height: usize) -> RatFunc {
        let spec = loc.spec();
        let num = self.poly(spec, height);
        let mut den = Poly::one(spec);
        for s in loc.s_lifted() {
            if s.degree() > height {
                continue;
            }
            let max_pow = height / s.degree();
            let k = self.below(max_pow as u64 + 1);
            den = den.mul(&s.pow(k));
            if den.degree() > height {
                den = den.div_exact(&s.pow(k)).expect("just multiplied");
            }
        }
        RatFunc::new(num, den).expect("nonzero denominator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::rational::in_ring as ring_member;

    #[test]
    fn deterministic_streams() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn ring_samples_are_ring_members() {
        let spec = FieldSpec::prime_field(2).unwrap();
        let prime = FieldSpec::prime_field(2).unwrap();
        let loc = Localization::new(
            &spec,
            vec![Poly::z(&prime), Poly::from_ints(&prime, &[1, 1])],
        )
        .unwrap();
        let mut rng = Rng::new(7);
        for _ in 0..200 {
            let x = rng.in_ring(&loc, 8);
            assert!(ring_member(&x, &loc));
            if !x.is_zero() {
                assert!(x.height().unwrap() <= 8);
            }
        }
    }
}
