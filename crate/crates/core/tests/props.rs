use abssep::search::DecimalValue;
use abssep::{canonicalize, measure, parse_poly, reciprocal, IntPolynomial, MeasureKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn nonzero_poly(max_deg: usize, h: i64) -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(-h..=h, 1..=max_deg + 1)
        .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
        .prop_map(|c| IntPolynomial::from_i64s(&c))
}

fn orbit(p: &IntPolynomial) -> [IntPolynomial; 4] {
    [p.clone(), -p, p.reflect(), -&p.reflect()]
}

proptest! {
    #[test]
    fn canonical_form_is_an_orbit_invariant(p in nonzero_poly(6, 30), k in 1i64..5) {
        let c = canonicalize(&p).unwrap();
        prop_assert_eq!(canonicalize(&c).unwrap(), c.clone());
        prop_assert!(c.leading() > BigInt::zero());
        prop_assert!(c.is_primitive());
        for q in orbit(&p) {
            prop_assert_eq!(canonicalize(&q.scale(&BigInt::from(k))).unwrap(), c.clone());
        }
    }

    #[test]
    fn text_round_trip(p in nonzero_poly(8, 1000)) {
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p.clone());
        prop_assert_eq!(parse_poly(&p.render_list()).unwrap(), p);
    }

    #[test]
    fn reciprocal_keeps_height(p in nonzero_poly(6, 50)) {
        prop_assume!(!p.coeff(0).is_zero());
        let r = reciprocal(&p).unwrap();
        prop_assert_eq!(r.height(), p.height());
        prop_assert_eq!(r.degree(), p.degree());
        if !p.coeff(p.degree()).is_zero() {
            prop_assert_eq!(reciprocal(&r).unwrap(), p);
        }
    }

    #[test]
    fn decimal_order_is_numeric(a in 1u64..1_000_000, ea in -40i32..40, b in 1u64..1_000_000, eb in -40i32..40) {
        let exact = |m: u64, e: i32| {
            let t = BigRational::new(BigInt::from(10).pow(e.unsigned_abs()), BigInt::one());
            let m = BigRational::from_integer(m.into());
            if e >= 0 { m * t } else { m / t }
        };
        let da = DecimalValue::parse(&format!("{a}e{ea}")).unwrap();
        let db = DecimalValue::parse(&format!("{}.{:06}e{}", b / 1_000_000, b % 1_000_000, eb + 6)).unwrap();
        prop_assert_eq!(da.cmp(&db), exact(a, ea).cmp(&exact(b, eb)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measures_ignore_scale_and_reflection(c in prop::collection::vec(-12i64..=12, 4..=5), k in 2i64..6) {
        let p = IntPolynomial::from_i64s(&c);
        prop_assume!(!p.coeff(p.degree()).is_zero() && !p.coeff(0).is_zero());
        for kind in [MeasureKind::Sep, MeasureKind::AbsSep, MeasureKind::ReGap, MeasureKind::ImGap] {
            let Ok(base) = measure(&p, kind) else { continue };
            let lo = base.value_lo.to_f64();
            let hi = base.value_hi.to_f64();
            for q in [p.scale(&BigInt::from(k)), p.reflect(), -&p] {
                let v = measure(&q, kind).unwrap();
                // certified intervals of the same number must overlap
                prop_assert!(v.value_lo.to_f64() <= hi * (1.0 + 1e-12) && lo <= v.value_hi.to_f64() * (1.0 + 1e-12),
                    "{kind:?} {p} vs {q}");
            }
        }
    }
}
