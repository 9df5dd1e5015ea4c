mod common;

use abssep::families::{family_parts, q5, q6, FamilyName};
use abssep::perturb::*;
use abssep::{Error, IntPolynomial};
use common::poly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn deg4() -> (IntPolynomial, IntPolynomial) {
    family_parts(FamilyName::Deg4, 0).unwrap()
}

#[test]
fn real_root_of_degree_four() {
    let (r, qq) = deg4();
    let s = invert_series(&r, &qq, &BaseRoot::rational(1), 4).unwrap();
    let want = [q(1, 1), q(-1, 1), q(-2, 1), q(-11, 2), q(-71, 4)];
    for (k, w) in want.iter().enumerate() {
        assert_eq!(s.coeff(k), (w.clone(), BigRational::zero()), "order {k}");
    }
}

#[test]
fn complex_root_of_degree_four() {
    let (r, qq) = deg4();
    let s = invert_series(&r, &qq, &BaseRoot::i(), 4).unwrap();
    let want = [(0, 1, 1), (0, -1, 1), (-1, -4, 2), (-4, -11, 2), (-66, -143, 8)];
    for (k, &(a, b, d)) in want.iter().enumerate() {
        assert_eq!(s.coeff(k), (q(a, d), q(b, d)), "order {k}");
    }
    assert_eq!(s.render()[4], "-33/4 - 143/8*i");
}

#[test]
fn first_order_term_matches_closed_form() {
    // ω Q(ω) / (d M) for R = X^d − 1 at ω = 1
    for (name, d) in [(FamilyName::Deg4, 4), (FamilyName::Deg6, 6)] {
        let (r, qq) = family_parts(name, 0).unwrap();
        let s = invert_series(&r, &qq, &BaseRoot::rational(1), 1).unwrap();
        let q1 = BigRational::from_integer(qq.eval(&BigInt::from(1)));
        assert_eq!(s.coeff(1).0, q1 / BigRational::from_integer(d.into()));
    }
}

#[test]
fn square_root_oracle() {
    // M(X² − 1) = 1 has root √(1 + 1/M) = 1 + 1/(2M) − 1/(8M²) + …
    let s = invert_series(&poly("X^2-1"), &poly("1"), &BaseRoot::rational(1), 1).unwrap();
    assert_eq!(s.coeff(0).0, q(1, 1));
    assert_eq!(s.coeff(1).0, q(1, 2));
    assert_eq!(s.order, 1);
}

#[test]
fn squared_moduli() {
    let (r, qq) = deg4();
    let z1 = invert_series(&r, &qq, &BaseRoot::rational(1), 5).unwrap();
    let zi = invert_series(&r, &qq, &BaseRoot::i(), 5).unwrap();
    let m1 = modulus_sq(&z1).unwrap();
    let mi = modulus_sq(&zi).unwrap();
    // the real root: |z₁|² = z₁², exactly
    let mut sq = vec![BigRational::zero(); 6];
    for i in 0..6 {
        for j in 0..6 - i {
            sq[i + j] += z1.coeff(i).0 * z1.coeff(j).0;
        }
    }
    assert_eq!(m1, sq);
    assert_eq!((m1[0].clone(), m1[1].clone()), (q(1, 1), q(-2, 1)));
    for k in 0..5 {
        assert_eq!(m1[k], mi[k], "order {k}");
    }
    assert_ne!(m1[5], mi[5]);
}

#[test]
fn mismatched_conjugate_is_rejected() {
    let (r, qq) = deg4();
    let zi = invert_series(&r, &qq, &BaseRoot::i(), 3).unwrap();
    assert!(matches!(modulus_sq_series(&zi, &zi), Err(Error::Series(_))));
    let short = invert_series(&r, &qq, &BaseRoot::i(), 2).unwrap();
    assert!(modulus_sq_series(&zi, &conjugate_expansion(&short)).is_err());
}

#[test]
fn bad_base_points() {
    let r = poly("X^4-1");
    assert!(invert_series(&r, &poly("1"), &BaseRoot::rational(2), 2).is_err());
    assert!(invert_series(&poly("X^3-X^2-X+1"), &poly("1"), &BaseRoot::rational(1), 2).is_err());
    assert!(invert_series(&r, &poly("1"), &BaseRoot::i(), 13).is_err());
}

#[test]
fn composition_and_numeric_cross_check() {
    let (r, qq) = deg4();
    for base in [BaseRoot::rational(1), BaseRoot::i(), BaseRoot::rational(-1)] {
        let s = invert_series(&r, &qq, &base, 5).unwrap();
        assert_eq!(composition_residual(&r, &qq, &s), None);
        let c = numeric_cross_check(&r, &qq, &s, 1_000_000).unwrap();
        assert!(c.holds(), "{base:?}: {c:?}");
    }
    let (r6, q6) = family_parts(FamilyName::Deg6, 0).unwrap();
    let s = invert_series(&r6, &q6, &BaseRoot::quadratic(1, 1), 6).unwrap();
    assert_eq!(composition_residual(&r6, &q6, &s), None);
    assert!(numeric_cross_check(&r6, &q6, &s, 1_000_000).unwrap().holds());
}

#[test]
fn symbolic_systems_for_four_and_six() {
    for (d, name, b, depth) in [
        (4usize, FamilyName::Deg4, BaseRoot::i(), 5usize),
        (6, FamilyName::Deg6, BaseRoot::quadratic(1, 1), 7),
    ] {
        let (r, qd) = family_parts(name, 0).unwrap();
        let setup = PerturbSetup::concrete(&r, &IntPolynomial::zero(), BaseRoot::rational(1), b).with_symbolic_q(d - 1, false);
        let sys = cancellation_system(&setup, depth).unwrap();
        assert!(sys.iter().all(|e| e.as_constant().is_none()));
        assert_eq!(first_mismatch(&sys, &setup.q_values(&qd)).unwrap(), Some(depth), "d = {d}");
    }
}

#[test]
fn degree_five_systems() {
    let (r, a, b) = (6, -9, -11);
    let setup = r5_setup(Some((r, a, b))).with_symbolic_q(5, true);
    let sys = cancellation_system(&setup, 6).unwrap();
    for qq in [0, 1, -3] {
        assert_eq!(first_mismatch(&sys, &setup.q_values(&q5(true, qq))).unwrap(), Some(6), "q = {qq}");
    }
    // the fully symbolic shape, specialised afterwards, agrees with the concrete one
    let general = r5_setup(None).with_symbolic_q(5, true);
    let gs = cancellation_system(&general, 2).unwrap();
    let mut vals = vec![
        (general.var("r").unwrap(), q(r, 1)),
        (general.var("a").unwrap(), q(a, 1)),
        (general.var("b").unwrap(), q(b, 1)),
    ];
    vals.extend(general.q_values(&q5(true, 0)));
    assert_eq!(first_mismatch(&gs, &vals).unwrap(), None);
    let concrete: Vec<_> = sys[..2].iter().map(|e| e.substitute(&setup.q_values(&q5(true, 0)))).collect();
    let special: Vec<_> = gs.iter().map(|e| e.substitute(&vals)).collect();
    assert_eq!(concrete, special);
}

#[test]
fn other_root_pair_of_degree_six() {
    assert!(check_other_roots_deg6().unwrap());
    let r = poly("X^6-1");
    let other = cancellation_order(&r, &q6(), BaseRoot::rational(1), BaseRoot::quadratic(-1, 1), 6).unwrap();
    assert!(matches!(other, Some(k) if k <= 6));
    let original = cancellation_order(&r, &q6(), BaseRoot::rational(1), BaseRoot::quadratic(1, 1), 6).unwrap();
    assert_eq!(original, None);
    // the zero perturbation satisfies everything and is excluded
    let zero = IntPolynomial::zero();
    assert_eq!(cancellation_order(&r, &zero, BaseRoot::rational(1), BaseRoot::quadratic(-1, 1), 6).unwrap(), None);
    assert!(common_factor_guard(&r, &zero));
    assert!(common_factor_guard(&r, &poly("X^2-X+1")));
    assert!(!common_factor_guard(&r, &q6()));
}

#[test]
fn extra_families() {
    let order = |name, a, b| {
        let (r, qq) = family_parts(name, 0).unwrap();
        cancellation_order(&r, &qq, a, b, r.degree() + 2).unwrap()
    };
    let one = || BaseRoot::rational(1);
    assert_eq!(order(FamilyName::ExtraDeg4, one(), BaseRoot::quadratic(1, 1)), Some(5));
    assert_eq!(order(FamilyName::ExtraDeg3A, one(), BaseRoot::i()), Some(3));
    assert_eq!(order(FamilyName::ExtraDeg5A, BaseRoot::quadratic(1, 1), BaseRoot::quadratic(-1, 1)), Some(5));
    assert_eq!(order(FamilyName::ExtraDeg5B, one(), BaseRoot::quadratic(-1, 1)), Some(5));
    // printed constant −3 gives no cancellation; +3 cancels through order 2
    assert_eq!(order(FamilyName::ExtraDeg3B, one(), BaseRoot::quadratic(-1, 1)), Some(1));
    let r = poly("X^3-2X^2+2X-1");
    let fixed = cancellation_order(&r, &poly("-2X^2+4X-3"), one(), BaseRoot::quadratic(-1, 1), 5).unwrap();
    assert_eq!(fixed, Some(3));
}

#[test]
fn depth_guard() {
    let (r, qq) = deg4();
    let setup = PerturbSetup::concrete(&r, &qq, BaseRoot::rational(1), BaseRoot::i());
    assert!(matches!(cancellation_system(&setup, 7), Err(Error::Series(_))));
}
