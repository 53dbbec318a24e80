//! Strategies and property checks shared by the proptest suites and the
//! acceptance harness.
#![allow(dead_code)]

use std::sync::Arc;

use orbidisk::exactring::*;
use orbidisk::lattice::*;
use orbidisk::series::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = std::result::Result<(), TestCaseError>;

/// Lattice points of the half-open parallelepiped spanned by three columns, by brute force.
pub fn parallelepiped_points(b: [[i64; 3]; 3]) -> Vec<[i64; 3]> {
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for mask in 0..8 {
        for j in 0..3 {
            let s: i64 = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| b[i][j]).sum();
            lo[j] = lo[j].min(s);
            hi[j] = hi[j].max(s);
        }
    }
    let m: RatMatrix = (0..3).map(|j| (0..3).map(|i| int(b[i][j])).collect()).collect();
    let inv = rat_inverse(&m).unwrap();
    let mut out = Vec::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            for z in lo[2]..=hi[2] {
                let c = rat_mat_vec(&inv, &[int(x), int(y), int(z)]);
                if c.iter().all(|ci| *ci >= int(0) && *ci < int(1)) {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// A random Calabi-Yau cone at height 1 with all height-1 Box points as extras,
/// optionally with a `Z/m` torsion part.
pub fn arb_fan() -> impl Strategy<Value = (StackyFan, i64)> {
    let ray = (-2i64..=2, -2i64..=2);
    (ray.clone(), ray.clone(), ray, prop::option::of((2i64..=3, 0i64..3, 0i64..3, 0i64..3)))
        .prop_filter_map("degenerate or non-generating", |(a, b, c, tors)| {
            let bars = [[a.0, a.1, 1], [b.0, b.1, 1], [c.0, c.1, 1]];
            let det = det3(bars);
            if det == 0 {
                return None;
            }
            let extras_bar: Vec<[i64; 3]> = parallelepiped_points(bars)
                .into_iter()
                .filter(|p| p[2] == 1)
                .collect();
            let (torsion, t) = match tors {
                Some((m, t1, t2, t3)) => (vec![m], Some((m, [t1, t2, t3]))),
                None => (vec![], None),
            };
            let with_t = |p: [i64; 3], s: i64| -> Vec<i64> {
                let mut v = p.to_vec();
                if t.is_some() {
                    v.push(s);
                }
                v
            };
            let rays: Vec<Vec<i64>> = bars
                .iter()
                .enumerate()
                .map(|(i, p)| with_t(*p, t.map_or(0, |(_, ts)| ts[i])))
                .collect();
            let mut extras: Vec<Vec<i64>> = extras_bar.iter().map(|p| with_t(*p, 0)).collect();
            if let Some((_, ts)) = t {
                extras.push(with_t(bars[0], ts[0] + 1));
            }
            let m = t.map_or(1, |(m, _)| m);
            StackyFan::new(torsion, rays, extras, vec![[0, 1, 2]]).ok().map(|f| (f, det.abs() * m))
        })
}

pub fn charge_rows_sum_to_zero(fan: &StackyFan) -> Check {
    let charge = charge_matrix(fan).unwrap();
    prop_assert_eq!(charge.k(), fan.r() - 3);
    for row in &charge.rows {
        prop_assert_eq!(row.iter().sum::<i64>(), 0);
        for j in 0..3 {
            let s: i64 = (0..fan.r()).map(|i| row[i] * fan.bar(i)[j]).sum();
            prop_assert_eq!(s, 0);
        }
    }
    Ok(())
}

pub fn ages_are_integral(fan: &StackyFan) -> Check {
    let boxes = box_elements(fan, 0).unwrap();
    for b in &boxes {
        prop_assert!(b.age.is_integer());
        prop_assert_eq!(&b.age, &b.c.iter().sum::<Rational>());
        prop_assert!(b.c.iter().all(|c| *c >= int(0) && *c < int(1)));
        let bar: Vec<Rational> = (0..3)
            .map(|j| (0..3).map(|p| &b.c[p] * int(fan.bar(b.cone[p])[j])).sum())
            .collect();
        prop_assert_eq!(bar, b.v[..3].iter().map(|x| int(*x)).collect::<Vec<_>>());
    }
    Ok(())
}

pub fn characters_multiply_to_one(fan: &StackyFan) -> Check {
    let boxes = box_elements(fan, 0).unwrap();
    let mut m = 2u64;
    for b in &boxes {
        for c in &b.c {
            m = lcm_u64(m, 2 * denom_u64(c));
        }
    }
    let field = CycloField::new(m as u32).unwrap();
    for b in &boxes {
        let mut prod = CycloNumber::one(&field);
        for c in &b.c {
            prod = &prod * &CycloNumber::phase(&field, &(c * int(2))).unwrap();
        }
        prop_assert_eq!(prod, CycloNumber::one(&field));
    }
    Ok(())
}

pub fn box_count_is_det_times_torsion(fan: &StackyFan, expected: i64) -> Check {
    let boxes = box_elements(fan, 0).unwrap();
    prop_assert_eq!(boxes.len() as i64, expected);
    let bars = [fan.bar(0), fan.bar(1), fan.bar(2)];
    let brute = parallelepiped_points(bars).len() as i64 * fan.torsion_order();
    prop_assert_eq!(brute, expected);
    let identities = boxes.iter().filter(|b| b.is_identity()).count();
    prop_assert_eq!(identities, 1);
    Ok(())
}

/// `(a)_{m+n} = (a)_m (a-m)_n` whenever all three are finite.
pub fn pochhammer_composition(an: i64, ad: i64, m: i64, n: i64) -> Check {
    let a = rat(an, ad);
    let lhs = pochhammer(&a, m + n);
    let l = pochhammer(&a, m);
    let r = pochhammer(&(&a - int(m)), n);
    if let (Ok(lhs), Ok(l), Ok(r)) = (lhs, l, r) {
        prop_assert_eq!(lhs, l * r);
    }
    Ok(())
}

pub fn arb_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 4, 6, 8, 10, 12, 18, 30])
}

pub fn phase_homomorphism(m: u32, j: i64, k: i64) -> Check {
    let f = CycloField::new(m).unwrap();
    let r = rat(2 * j, m as i64);
    let s = rat(2 * k, m as i64);
    let lhs = CycloNumber::phase(&f, &(&r + &s)).unwrap();
    let rhs = &CycloNumber::phase(&f, &r).unwrap() * &CycloNumber::phase(&f, &s).unwrap();
    prop_assert_eq!(lhs, rhs);
    let neg = CycloNumber::phase(&f, &(-&r)).unwrap();
    prop_assert_eq!(&neg * &CycloNumber::phase(&f, &r).unwrap(), CycloNumber::one(&f));
    prop_assert_eq!(CycloNumber::phase(&f, &(&r + int(2))).unwrap(), CycloNumber::phase(&f, &r).unwrap());
    Ok(())
}

fn rational_field() -> Arc<CycloField> {
    CycloField::new(2).unwrap()
}

pub fn series_from(sp: &Arc<SeriesSpace>, terms: &[(Vec<i64>, (i64, i64))]) -> Series {
    let mut s = Series::zero(sp);
    for (e, (n, d)) in terms {
        let e: Vec<Rational> = e.iter().map(|x| int(*x)).collect();
        s.add_monomial(&e, CycloNumber::from_rational(sp.field(), rat(*n, *d))).unwrap();
    }
    s
}

pub fn arb_terms(nvars: usize) -> impl Strategy<Value = Vec<(Vec<i64>, (i64, i64))>> {
    prop::collection::vec((prop::collection::vec(0i64..3, nvars), (-5i64..=5, 1i64..=3)), 0..6)
}

pub fn arb_unimodular() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..6)
}

fn unimodular(ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    for (i, j, k) in ops {
        if i != j {
            for col in 0..3 {
                let add = k * m[*j][col];
                m[*i][col] += add;
            }
        }
    }
    m
}

/// Monomial substitution by a unimodular matrix and its inverse is the identity, and is additive.
pub fn substitution_round_trip(
    a: &[(Vec<i64>, (i64, i64))],
    b: &[(Vec<i64>, (i64, i64))],
    ops: &[(usize, usize, i64)],
) -> Check {
    let src = SeriesSpace::new(
        (0..3).map(|i| VarSpec::new(format!("s{i}"), int(1)).laurent(true)).collect(),
        int(1000),
        &rational_field(),
    )
    .unwrap();
    let s = series_from(&src, a);
    let m = unimodular(ops);
    let images: RatMatrix = m.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect();
    let inv = rat_inverse(&images).unwrap();
    let there = s.substitute_monomial(&src, &images).unwrap();
    let back = there.substitute_monomial(&src, &inv).unwrap();
    prop_assert_eq!(back, s.clone());
    let t = series_from(&src, b);
    let sum = s.add(&t).unwrap().substitute_monomial(&src, &images).unwrap();
    prop_assert_eq!(sum, there.add(&t.substitute_monomial(&src, &images).unwrap()).unwrap());
    Ok(())
}

pub fn arb_poly() -> impl Strategy<Value = (Vec<(i64, i64, i64)>, i64)> {
    (prop::collection::vec((0i64..4, -3i64..=3, 1i64..=2), 1..5), 2i64..7)
}

/// Newton iteration on `H(u) = x P(u) - u` leaves zero residual and agrees with
/// the fixed point of `u = x P(u)`.
pub fn newton_residual_vanishes(p: &[(i64, i64, i64)], order: i64) -> Check {
    let sp = SeriesSpace::uniform(&["t0".to_string()], int(order), &rational_field()).unwrap();
    let x = Series::var(&sp, 0);
    let poly = |u: &Series| -> (Series, Series) {
        let mut val = Series::one(&sp);
        let mut der = Series::zero(&sp);
        for (e, n, d) in p {
            let coef = rat(*n, *d);
            let mut pw = Series::one(&sp);
            for _ in 0..*e {
                pw = pw.mul(u).unwrap();
            }
            val = val.add(&pw.scale_rational(&coef)).unwrap();
            if *e > 0 {
                let mut pd = Series::one(&sp);
                for _ in 0..(*e - 1) {
                    pd = pd.mul(u).unwrap();
                }
                der = der.add(&pd.scale_rational(&(coef * int(*e)))).unwrap();
            }
        }
        (val, der)
    };
    let u = newton_solve(&sp, |u| {
        let (v, d) = poly(u);
        Ok((x.mul(&v)?.sub(u)?, x.mul(&d)?.sub(&Series::one(&sp))?))
    })
    .unwrap();
    let (v, _) = poly(&u);
    prop_assert!(x.mul(&v).unwrap().sub(&u).unwrap().is_zero());
    let mut fixed = Series::zero(&sp);
    for _ in 0..=order {
        fixed = x.mul(&poly(&fixed).0).unwrap();
    }
    prop_assert_eq!(u, fixed);
    Ok(())
}
