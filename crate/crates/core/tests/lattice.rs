mod common;

use common::arb_fan;
use orbidisk::catalog;
use orbidisk::exactring::*;
use orbidisk::lattice::*;
use proptest::prelude::*;

fn chart_of(name: &str) -> (StackyFan, ChargeMatrix, ConeChart) {
    let ex = catalog::example(name).unwrap();
    let charge = charge_matrix(&ex.fan).unwrap();
    let cone = ex.fan.cone_index({
        let mut c = ex.order;
        c.sort_unstable();
        c
    });
    let chart = ConeChart::new(&ex.fan, &charge, cone.unwrap()).unwrap();
    (ex.fan, charge, chart)
}

#[test]
fn smith_and_hermite() {
    let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    let snf = smith_normal_form(&m);
    assert_eq!(snf.diagonal(), vec![2, 6, 12]);
    assert_eq!(snf.rank(), 3);
    let h = hermite_normal_form(&vec![vec![0, 2, 4], vec![0, 3, 6]]);
    assert_eq!(h.len(), 1);
    let k = integer_kernel(&vec![vec![1, 1, 1, -3]], 4);
    assert_eq!(k.len(), 3);
    for row in &k {
        assert_eq!(row[0] + row[1] + row[2] - 3 * row[3], 0);
    }
}

#[test]
fn charge_matrices_of_the_examples() {
    assert_eq!(chart_of("x111").1.rows, vec![vec![1, 1, 1, -3]]);
    assert_eq!(chart_of("x120").1.rows, vec![vec![0, 0, 1, -2, 1], vec![0, 1, 0, 1, -2]]);
    assert_eq!(chart_of("x000").1.rows, vec![vec![3, 0, 0, -3]]);
    assert_eq!(chart_of("c3").1.rows, Vec::<Vec<i64>>::new());
    assert_eq!(chart_of("conifold").1.rows, vec![vec![1, 1, -1, -1]]);
}

#[test]
fn picard_groups() {
    for name in ["x111", "x120", "x000"] {
        let (fan, charge, _) = chart_of(name);
        assert_eq!(picard_cokernel(&fan, &charge), vec![3], "{name}");
    }
    let (fan, charge, _) = chart_of("kp2");
    assert_eq!(picard_cokernel(&fan, &charge), vec![0]);
}

#[test]
fn box_tables() {
    let ages = |name: &str| -> Vec<(Vec<i64>, i64)> {
        let (_, _, chart) = chart_of(name);
        chart.boxes.iter().map(|b| (b.v.clone(), to_i64(&b.age).unwrap())).collect()
    };
    assert_eq!(ages("x111"), vec![(vec![0, 0, 0], 0), (vec![0, 0, 1], 1), (vec![0, 0, 2], 2)]);
    let mut x120 = ages("x120");
    x120.sort();
    assert_eq!(x120, vec![(vec![0, 0, 0], 0), (vec![0, 1, 1], 1), (vec![0, 2, 1], 1)]);
    assert_eq!(
        ages("x000"),
        vec![(vec![0, 0, 0, 0], 0), (vec![0, 0, 0, 1], 0), (vec![0, 0, 0, 2], 0)]
    );
    assert_eq!(ages("c3"), vec![(vec![0, 0, 0], 0)]);
}

#[test]
fn k_eff_generators() {
    let (_, _, chart) = chart_of("x111");
    assert_eq!(chart.dual, vec![vec![rat(-1, 3)]]);
    let (_, _, chart) = chart_of("x120");
    assert_eq!(chart.dual, vec![vec![rat(-2, 3), rat(-1, 3)], vec![rat(-1, 3), rat(-2, 3)]]);
    let (_, _, chart) = chart_of("x000");
    assert_eq!(chart.dual, vec![vec![rat(-1, 3)]]);
}

#[test]
fn k_eff_listing_x111() {
    let (fan, _, chart) = chart_of("x111");
    let elems = k_eff_enumerate(&fan, &chart, &int(3)).unwrap();
    let betas: Vec<Rational> = elems.iter().map(|e| e.beta[0].clone()).collect();
    assert_eq!(betas, vec![int(0), rat(-1, 3), rat(-2, 3), int(-1)]);
    let sectors: Vec<Vec<i64>> = elems.iter().map(|e| chart.boxes[e.sector].v.clone()).collect();
    assert_eq!(sectors, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2], vec![0, 0, 0]]);
    assert!(k_eff_enumerate(&fan, &chart, &int(-1)).unwrap().is_empty());
}

#[test]
fn flag_data_of_the_examples() {
    let flag = |name: &str, order: [usize; 3]| {
        let ex = catalog::example(name).unwrap();
        flag_data(&ex.fan, order).unwrap()
    };
    let f = flag("x111", [0, 1, 2]);
    assert_eq!((f.s1, f.g_tau, f.g_sigma), (3, 1, 3));
    let f = flag("x120", [0, 1, 2]);
    assert_eq!((f.s1, f.g_tau, f.g_sigma), (1, 3, 3));
    let f = flag("x120", [1, 2, 0]);
    assert_eq!((f.s1, f.g_tau, f.g_sigma), (3, 1, 3));
    let f = flag("conifold", [0, 2, 3]);
    assert!(!f.is_outer());
    assert!(flag("kp2", [3, 0, 1]).is_outer());
    let ex = catalog::example("x111").unwrap();
    assert!(flag_data(&ex.fan, [3, 0, 1]).is_err());
}

#[test]
fn leading_degrees() {
    let (fan, charge, _) = chart_of("x111");
    assert_eq!(leading_degree(&fan, &charge, 3).unwrap().beta, vec![rat(-1, 3)]);
    let (fan, charge, _) = chart_of("x120");
    assert_eq!(leading_degree(&fan, &charge, 3).unwrap().beta, vec![rat(-2, 3), rat(-1, 3)]);
    assert_eq!(leading_degree(&fan, &charge, 4).unwrap().beta, vec![rat(-1, 3), rat(-2, 3)]);
}

#[test]
fn invalid_fans() {
    let err = |t: Vec<i64>, r: Vec<Vec<i64>>, e: Vec<Vec<i64>>, c: Vec<[usize; 3]>| {
        StackyFan::new(t, r, e, c).unwrap_err().to_string()
    };
    let rays = vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]];
    assert!(err(vec![], rays.clone(), vec![], vec![]).contains("no maximal cones"));
    let unit = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    assert!(err(vec![], unit, vec![vec![1, 1, 1]], vec![[0, 1, 2]]).contains("Calabi-Yau"));
    assert!(err(vec![], vec![vec![1, 0, 1], vec![0, 3, 1], vec![0, 0, 1]], vec![], vec![[0, 1, 2]])
        .contains("generate"));
    assert!(err(vec![], rays.clone(), vec![vec![2, 2, 1]], vec![[0, 1, 2]]).contains("no cone"));
    assert!(err(vec![1], rays, vec![], vec![[0, 1, 2]]).contains("torsion"));
    assert!(semiprojectivity_check(&catalog::example("kp2").unwrap().fan));
}

#[test]
fn compositions_order() {
    assert_eq!(
        compositions(2, 2),
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
    );
    assert_eq!(compositions(0, 3), vec![Vec::<u64>::new()]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn charge_rows_sum_to_zero((fan, _) in arb_fan()) {
        common::charge_rows_sum_to_zero(&fan)?;
    }

    #[test]
    fn ages_are_integral((fan, _) in arb_fan()) {
        common::ages_are_integral(&fan)?;
    }

    #[test]
    fn characters_multiply_to_one((fan, _) in arb_fan()) {
        common::characters_multiply_to_one(&fan)?;
    }

    #[test]
    fn box_count_is_det_times_torsion((fan, expected) in arb_fan()) {
        common::box_count_is_det_times_torsion(&fan, expected)?;
    }

    #[test]
    fn chart_is_dual_to_anticone((fan, _) in arb_fan()) {
        let charge = charge_matrix(&fan).unwrap();
        let chart = ConeChart::new(&fan, &charge, 0).unwrap();
        for (a, i) in chart.anticone.iter().enumerate() {
            for b in 0..chart.k() {
                let want = if a == b { int(1) } else { int(0) };
                prop_assert_eq!(&chart.pairing[*i][b], &want);
            }
        }
        for b in 0..chart.k() {
            for i in 0..fan.r() {
                prop_assert_eq!(charge.pair(i, &chart.dual[b]), chart.pairing[i][b].clone());
            }
        }
    }
}
