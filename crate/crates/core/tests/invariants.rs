//! Property tests for the structural invariants: canonical forms,
//! decomposition round-trips, the degree-sum identity for orders, and
//! uniqueness of division with remainder.

use frobring_core::ratfun::{
    divide_with_remainder, in_ring, ord_at, partial_fractions, q_power_decomposition,
    q_power_recombine, Localization, OrdVal, Place, RatFunc,
};
use frobring_core::{FieldSpec, Poly};
use proptest::prelude::*;
use std::sync::Arc;

fn f2() -> Arc<FieldSpec> {
    FieldSpec::prime_field(2).unwrap()
}

fn f9() -> Arc<FieldSpec> {
    FieldSpec::default_for(3, 2).unwrap()
}

fn arb_poly(spec: Arc<FieldSpec>, max_deg: usize) -> impl Strategy<Value = Poly> {
    let order = spec.order();
    prop::collection::vec(0..order, 1..=max_deg + 1).prop_map(move |idx| {
        let coeffs = idx
            .into_iter()
            .map(|i| frobring_core::FieldElem::from_index(&spec, i))
            .collect();
        Poly::new(spec.spec_clone(), coeffs)
    })
}

// small helper because Poly::new takes &Arc
trait SpecClone {
    fn spec_clone(&self) -> &Arc<FieldSpec>;
}
impl SpecClone for Arc<FieldSpec> {
    fn spec_clone(&self) -> &Arc<FieldSpec> {
        self
    }
}

fn arb_ratfunc(spec: Arc<FieldSpec>, max_deg: usize) -> impl Strategy<Value = RatFunc> {
    (
        arb_poly(spec.clone(), max_deg),
        arb_poly(spec, max_deg).prop_filter("nonzero denominator", |p| !p.is_zero()),
    )
        .prop_map(|(num, den)| RatFunc::new(num, den).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_fractions_recombine_exactly(x in arb_ratfunc(f2(), 6)) {
        let pf = partial_fractions(&x).unwrap();
        prop_assert_eq!(pf.recombine(), x.clone());
        for t in &pf.terms {
            prop_assert!(t.numer.degree() < t.place.degree());
            prop_assert!(!t.numer.is_zero());
        }
        // decomposing the recombination gives the same canonical form
        let again = partial_fractions(&pf.recombine()).unwrap();
        prop_assert_eq!(again, pf);
    }

    #[test]
    fn partial_fractions_recombine_extension_field(x in arb_ratfunc(f9(), 4)) {
        let pf = partial_fractions(&x).unwrap();
        prop_assert_eq!(pf.recombine(), x);
    }

    #[test]
    fn q_power_decomposition_roundtrip(x in arb_ratfunc(f2(), 6), s in 1u32..=3) {
        let parts = q_power_decomposition(&x, s);
        prop_assert_eq!(parts.len() as u64, 2u64.pow(s));
        prop_assert_eq!(q_power_recombine(&parts, s), x);
    }

    #[test]
    fn height_symmetric_under_inverse(x in arb_ratfunc(f2(), 6)) {
        prop_assume!(!x.is_zero());
        prop_assert_eq!(x.height().unwrap(), x.inv().unwrap().height().unwrap());
    }

    #[test]
    fn degree_sum_identity(x in arb_ratfunc(f2(), 5)) {
        prop_assume!(!x.is_zero());
        // the pole orders weighted by place degree add up to deg(den),
        // including the place at infinity
        let spec = f2();
        let mut pole_sum: i64 = 0;
        for (q, _) in frobring_core::ratfun::factor(x.den()) {
            if let OrdVal::Finite(o) = ord_at(&x, &Place::finite(q.clone())) {
                if o < 0 {
                    pole_sum += -o * q.degree() as i64;
                }
            }
        }
        let mut zero_sum: i64 = 0;
        for (q, _) in frobring_core::ratfun::factor(x.num()) {
            if let OrdVal::Finite(o) = ord_at(&x, &Place::finite(q.clone())) {
                if o > 0 {
                    zero_sum += o * q.degree() as i64;
                }
            }
        }
        match ord_at(&x, &Place::Infinity) {
            OrdVal::Finite(o) if o < 0 => pole_sum += -o,
            OrdVal::Finite(o) if o > 0 => zero_sum += o,
            _ => {}
        }
        // a principal divisor has degree zero, so both weighted sums equal
        // the height of the reduced fraction
        let expected = x.num().degree().max(x.den().degree()) as i64;
        prop_assert_eq!(pole_sum, expected);
        prop_assert_eq!(zero_sum, expected);
        let _ = spec;
    }

    #[test]
    fn division_constructions_agree(
        num in arb_poly(f2(), 5),
        c in arb_poly(f2(), 3).prop_filter("nonconstant", |p| !p.is_constant()),
        k in 0u64..4,
    ) {
        // divisor coprime to S = {z}: shift c so its constant term is 1
        let spec = f2();
        let mut c_fixed = c.clone();
        if c_fixed.coeff(0).is_zero() {
            c_fixed = c_fixed.add(&Poly::one(&spec));
        }
        prop_assume!(!c_fixed.is_constant());
        let loc = Localization::new(&spec, vec![Poly::z(&spec)]).unwrap();
        let u = RatFunc::new(num, Poly::z(&spec).pow(k)).unwrap();
        prop_assume!(in_ring(&u, &loc));
        let (v, r) = divide_with_remainder(&u, &c_fixed, &loc).unwrap();
        // identity and degree constraint
        prop_assert_eq!(
            v.mul(&RatFunc::from_poly(c_fixed.clone())).add(&RatFunc::from_poly(r.clone())),
            u.clone()
        );
        prop_assert!(r.is_zero() || r.degree() < c_fixed.degree());
        prop_assert!(in_ring(&v, &loc));
        // independent construction: r' = num * den^{-1} mod c
        let (g, den_inv, _) = u.den().xgcd(&c_fixed);
        prop_assert!(g.is_one());
        let r2 = u.num().mul(&den_inv).div_rem(&c_fixed).unwrap().1;
        prop_assert_eq!(r, r2);
    }
}

