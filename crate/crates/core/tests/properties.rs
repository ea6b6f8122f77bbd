use std::sync::Arc;

use brjuno_core::arith::rat;
use brjuno_core::brjuno::{cohomology_check, eval_enclosure_sequence, eval_eventually_ones, BrjunoSpec, SequenceOptions};
use brjuno_core::cf::{cylinder_enclosure, DigitStream, DigitWord};
use brjuno_core::map::MapModel;
use brjuno_core::weight::{WeightKind, WeightModel};
use brjuno_core::{Dyadic, Interval, Rational};
use proptest::prelude::*;

fn digits(max: u64, len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max, 0..=len)
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..10_000, 1i64..10_000).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_is_additive(a in positive_rational(), b in positive_rational()) {
        let x = Interval::from_rational(&a, 80);
        let y = Interval::from_rational(&b, 80);
        let lhs = x.mul(&y).log(70).unwrap();
        let rhs = x.log(70).unwrap().add(&y.log(70).unwrap());
        prop_assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn refinement_keeps_containment(a in positive_rational()) {
        let coarse = Interval::from_rational(&a, 20).log(20).unwrap();
        let fine = Interval::from_rational(&a, 90).log(90).unwrap();
        prop_assert!(coarse.overlaps(&fine));
        prop_assert!(fine.width() <= coarse.width());
    }

    #[test]
    fn pow_matches_repeated_product(a in positive_rational(), n in 1u32..6) {
        let x = Interval::from_rational(&a, 60);
        let p = x.pow(&rat(n as i64, 1), 60).unwrap();
        prop_assert!(p.overlaps(&x.pow_u32(n)));
        // x^(1/2) squared comes back to x
        let r = x.pow(&rat(1, 2), 60).unwrap();
        prop_assert!(r.mul(&r).overlaps(&x));
    }

    #[test]
    fn cylinders_nest(w in digits(40, 8), d in 1u64..40) {
        for map in [MapModel::gauss(), MapModel::alpha_cf(rat(1, 2), None).unwrap()] {
            let word = DigitWord::new(w.clone()).unwrap();
            let mut longer = word.clone();
            longer.push(d).unwrap();
            let a = cylinder_enclosure(&map, &word, 64).unwrap();
            let b = cylinder_enclosure(&map, &longer, 64).unwrap();
            prop_assert!(a.lo_exact <= b.lo_exact && b.hi_exact <= a.hi_exact);
        }
    }

    #[test]
    fn cylinder_widths_decay(w in digits(40, 12)) {
        for map in [MapModel::gauss(), MapModel::alpha_cf(rat(1, 2), None).unwrap()] {
            let word = DigitWord::new(w.clone()).unwrap();
            let c = cylinder_enclosure(&map, &word, 64).unwrap();
            let tau = map.tau().unwrap().clone();
            let steps = word.len() as u32 / map.kappa();
            let mut bound = map.s1() - map.s0();
            for _ in 0..steps {
                bound /= tau.clone();
            }
            prop_assert!(c.width_exact() <= bound);
        }
    }

    #[test]
    fn branch_round_trip(i in 1u64..500, p in 1i64..999) {
        for map in [MapModel::gauss(), MapModel::alpha_cf(rat(1, 2), None).unwrap()] {
            let (s0, s1) = (map.s0().clone(), map.s1().clone());
            let y = &s0 + (&s1 - &s0) * rat(p, 1000);
            let yi = Interval::from_rational(&y, 80);
            let x = map.inverse_branch(i, &yi, 80).unwrap();
            prop_assert_eq!(map.locate(&x).unwrap(), i);
            prop_assert!(map.apply(&x, 80).unwrap().contains_rational(&y));
        }
    }

    #[test]
    fn log_square_weight(p in 1i64..999) {
        let gauss = MapModel::gauss();
        let w1 = WeightModel::new(WeightKind::LogPow(1), &gauss).unwrap();
        let w2 = WeightModel::new(WeightKind::LogPow(2), &gauss).unwrap();
        let x = Interval::from_rational(&rat(p, 1000), 70);
        let a = w1.eval(&x, 60).unwrap();
        prop_assert!(w2.eval(&x, 60).unwrap().overlaps(&a.mul(&a)));
    }

    #[test]
    fn cohomological_identity(w in digits(50, 6)) {
        let head = DigitWord::new(w).unwrap();
        for spec in [BrjunoSpec::brjuno(), BrjunoSpec::wilton1()] {
            prop_assert!(cohomology_check(&spec, &head, 40).unwrap().overlap);
        }
    }

    #[test]
    fn precision_refines_phi(w in digits(60, 6)) {
        let spec = BrjunoSpec::wilton2();
        let head = DigitWord::new(w).unwrap();
        let coarse = eval_eventually_ones(&spec, &head, 16).unwrap();
        let fine = eval_eventually_ones(&spec, &head, 64).unwrap();
        prop_assert!(coarse.overlaps(&fine));
        prop_assert!(fine.width() <= Dyadic::pow2(-64));
        prop_assert!(coarse.width() <= Dyadic::pow2(-16));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lower_bounds_never_decrease(seed in any::<u64>(), bound in prop::option::of(2u64..20)) {
        let spec = BrjunoSpec::brjuno();
        let modulus = bound.unwrap_or(1000);
        let src = Arc::new(move |k: u64| {
            let h = (k ^ seed).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
            Some(1 + h % modulus)
        });
        let x = DigitStream::generator(DigitWord::empty(), src);
        let opts = SequenceOptions { digit_bound: bound, max_terms: Some(60), ..Default::default() };
        let mut last_lo: Option<Dyadic> = None;
        let mut last_hi: Option<Dyadic> = None;
        for step in eval_enclosure_sequence(&spec, &x, opts, 40).unwrap() {
            let step = step.unwrap();
            if let Some(l) = &last_lo { prop_assert!(&step.lo >= l); }
            if let (Some(h), Some(new)) = (&last_hi, &step.hi) { prop_assert!(new <= h); }
            if let Some(h) = &step.hi { prop_assert!(&step.lo <= h); }
            last_lo = Some(step.lo);
            last_hi = step.hi;
        }
    }
}
