mod common;

use std::sync::Arc;

use common::arb_field;
use num_bigint::BigInt;
use orbidisk::exactring::*;
use proptest::prelude::*;

fn field(m: u32) -> Arc<CycloField> {
    CycloField::new(m).unwrap()
}

fn element(f: &Arc<CycloField>, coeffs: &[(i64, i64)]) -> CycloNumber {
    let mut acc = CycloNumber::zero(f);
    for (j, (n, d)) in coeffs.iter().enumerate() {
        let term = CycloNumber::zeta_power(f, j as i64).scale(&rat(*n, *d));
        acc = &acc + &term;
    }
    acc
}

#[test]
fn parse_rational_forms() {
    assert_eq!(parse_rational("3").unwrap(), int(3));
    assert_eq!(parse_rational(" -7/2 ").unwrap(), rat(-7, 2));
    assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("x").is_err());
}

#[test]
fn pochhammer_values() {
    assert_eq!(pochhammer(&int(3), 2).unwrap(), int(6));
    assert_eq!(pochhammer(&int(5), 0).unwrap(), int(1));
    assert_eq!(pochhammer(&rat(1, 2), 3).unwrap(), rat(1, 2) * rat(-1, 2) * rat(-3, 2));
    assert_eq!(pochhammer(&rat(1, 2), -1).unwrap(), rat(2, 3));
    assert_eq!(pochhammer(&int(-1), 3).unwrap(), int(-6));
    assert!(pochhammer(&int(-2), -2).is_err());
}

#[test]
fn cyclotomic_polynomials() {
    let as_i64 = |v: Vec<BigInt>| v.into_iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>();
    assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
    assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
    assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
    assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    assert_eq!(as_i64(cyclotomic_polynomial(9)), vec![1, 0, 0, 1, 0, 0, 1]);
    assert_eq!(field(12).degree(), 4);
    assert_eq!(field(30).degree(), 8);
}

#[test]
fn roots_and_phases() {
    let f = field(6);
    let one = CycloNumber::one(&f);
    assert_eq!(CycloNumber::zeta_power(&f, 6), one);
    assert_eq!(CycloNumber::phase(&f, &int(1)).unwrap(), -&one);
    assert_eq!(CycloNumber::phase(&f, &rat(1, 3)).unwrap(), CycloNumber::zeta_power(&f, 1));
    assert_eq!(CycloNumber::root_of_unity(&f, 3, 1).unwrap(), CycloNumber::zeta_power(&f, 2));
    assert!(CycloNumber::root_of_unity(&f, 4, 1).is_err());
    assert!(CycloNumber::phase(&f, &rat(1, 6)).is_err());
    // 1 + zeta_6^2 = zeta_6 in Q(zeta_6)
    let z = &CycloNumber::one(&f) + &CycloNumber::zeta_power(&f, 2);
    assert_eq!(z, CycloNumber::zeta_power(&f, 1));
}

#[test]
fn rational_root_form() {
    let f = field(6);
    let x = CycloNumber::zeta_power(&f, 1).scale(&int(3));
    assert_eq!(x.as_rational_root(), Some((int(3), 1)));
    let y = CycloNumber::zeta_power(&f, 4).scale(&rat(1, 2));
    assert_eq!(y.as_rational_root(), Some((rat(-1, 2), 1)));
    let s = &CycloNumber::one(&f) + &x;
    assert_eq!(s.as_rational_root(), None);
    assert_eq!(CycloNumber::zero(&f).as_rational_root(), Some((int(0), 0)));
}

#[test]
fn complex_embedding() {
    let f = field(12);
    let z = CycloNumber::zeta_power(&f, 5).scale(&int(2));
    let (re, im) = z.to_complex();
    let ang = 2.0 * std::f64::consts::PI * 5.0 / 12.0;
    assert!((re - 2.0 * ang.cos()).abs() < 1e-12);
    assert!((im - 2.0 * ang.sin()).abs() < 1e-12);
}

fn arb_coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(m in arb_field(), a in arb_coeffs(), b in arb_coeffs(), c in arb_coeffs()) {
        let f = field(m);
        let (a, b, c) = (element(&f, &a), element(&f, &b), element(&f, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, CycloNumber::zero(&f));
        prop_assert_eq!(&a * &CycloNumber::one(&f), a.clone());
        prop_assert_eq!(-&(-&a), a);
    }

    #[test]
    fn inverse_is_two_sided(m in arb_field(), a in arb_coeffs()) {
        let f = field(m);
        let a = element(&f, &a);
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(&a * &inv, CycloNumber::one(&f));
        prop_assert_eq!(&inv * &a, CycloNumber::one(&f));
    }

    #[test]
    fn embedding_is_a_homomorphism(m in arb_field(), a in arb_coeffs(), b in arb_coeffs()) {
        let f = field(m);
        let (a, b) = (element(&f, &a), element(&f, &b));
        let (ar, ai) = a.to_complex();
        let (br, bi) = b.to_complex();
        let (pr, pi) = (&a * &b).to_complex();
        prop_assert!((pr - (ar * br - ai * bi)).abs() < 1e-6);
        prop_assert!((pi - (ar * bi + ai * br)).abs() < 1e-6);
    }

    #[test]
    fn phase_homomorphism(m in arb_field(), j in -40i64..40, k in -40i64..40) {
        common::phase_homomorphism(m, j, k)?;
    }

    #[test]
    fn pochhammer_composition(an in -12i64..12, ad in 1i64..5, m in -6i64..7, n in -6i64..7) {
        common::pochhammer_composition(an, ad, m, n)?;
    }

    #[test]
    fn pochhammer_matches_gamma_ratio(an in -9i64..9, n in -5i64..6) {
        // (a)_n = Gamma(a+1)/Gamma(a-n+1), checked in floating point away from poles
        let a = rat(2 * an + 1, 2);
        let p = pochhammer(&a, n).unwrap();
        let af = (2 * an + 1) as f64 / 2.0;
        let expect = (lgamma(af + 1.0) - lgamma(af - n as f64 + 1.0)).exp()
            * gamma_sign(af + 1.0) * gamma_sign(af - n as f64 + 1.0);
        let got = num_traits::ToPrimitive::to_f64(&p).unwrap();
        prop_assert!((got - expect).abs() <= 1e-9 * expect.abs().max(1.0), "{} vs {}", got, expect);
    }

    #[test]
    fn rational_root_round_trip(m in arb_field(), n in -20i64..20, d in 1i64..6, j in 0i64..60) {
        prop_assume!(n != 0);
        let f = field(m);
        let x = CycloNumber::zeta_power(&f, j).scale(&rat(n, d));
        let (r, k) = x.as_rational_root().unwrap();
        prop_assert!(k < m / 2);
        prop_assert_eq!(CycloNumber::zeta_power(&f, k as i64).scale(&r), x);
    }
}

fn lgamma(x: f64) -> f64 {
    // Lanczos approximation of log|Gamma(x)|, with reflection for x < 1/2
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - lgamma(1.0 - x);
    }
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
