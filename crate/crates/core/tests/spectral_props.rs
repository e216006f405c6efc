mod common;

use posswitch::oracle::{finrel_scan, FinrelOptions};
use posswitch::spectral::{dense_spectral_radius, iru_greedy_extremum, rho_extrema, spectral_radius};
use posswitch::{Direction, Matrix, MemberId};
use proptest::prelude::*;

fn nonneg_matrix(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => 0.0f64..5.0, 1 => Just(0.0)], n * n).prop_map(move |v| {
            let rows: Vec<Vec<f64>> = v.chunks(n).map(<[f64]>::to_vec).collect();
            Matrix::from_rows(&rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn homogeneity(a in nonneg_matrix(6), t in 0.01f64..100.0) {
        let r = spectral_radius(&a).unwrap().value;
        let rt = spectral_radius(&a.scale(t)).unwrap().value;
        prop_assert!((rt - t * r).abs() <= 1e-10 * (t * r).max(1e-300) || (r == 0.0 && rt == 0.0));
    }

    #[test]
    fn powers(a in nonneg_matrix(6), k in 1u32..=5) {
        let r = spectral_radius(&a).unwrap().value;
        let rk = spectral_radius(&a.pow(k)).unwrap().value;
        prop_assert!((rk - r.powi(k as i32)).abs() <= 1e-8 * rk.max(1e-300), "{} vs {}", rk, r.powi(k as i32));
    }

    #[test]
    fn power_iteration_matches_dense(a in nonneg_matrix(8)) {
        let r = spectral_radius(&a).unwrap().value;
        let d = dense_spectral_radius(&a).unwrap();
        prop_assert!((r - d).abs() <= 1e-9 * d.max(1.0), "{} vs {}", r, d);
    }

    #[test]
    fn ordered_extrema_sit_at_chain_ends(seed in any::<u64>(), len in 1usize..6) {
        let mut rng = common::rng(seed);
        let chain = common::random_chain(&mut rng, 3, 3, len);
        let e = rho_extrema(&chain, 100).unwrap();
        prop_assert_eq!(e.rho_min_witness, MemberId::Index(0));
        prop_assert_eq!(e.rho_max_witness, MemberId::Index(len - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_extremum_matches_enumeration(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 1 + (seed % 4) as usize;
        let set = common::random_iru(&mut rng, n, 1..=4);
        let e = rho_extrema(&set, 1_000_000).unwrap();
        let hi = iru_greedy_extremum(&set, Direction::Max).unwrap();
        let lo = iru_greedy_extremum(&set, Direction::Min).unwrap();
        prop_assert!(common::rel_close(hi.value, e.rho_max, 1e-9), "{} vs {}", hi.value, e.rho_max);
        prop_assert!(common::rel_close(lo.value, e.rho_min, 1e-9), "{} vs {}", lo.value, e.rho_min);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_stay_between_member_extrema(seed in any::<u64>(), chain in any::<bool>()) {
        let mut rng = common::rng(seed);
        let set = if chain { common::random_chain(&mut rng, 3, 3, 4) } else { common::random_iru(&mut rng, 3, 1..=3) };
        let scan = finrel_scan(&set, &FinrelOptions { max_depth: 4, use_certificate: false, ..Default::default() }).unwrap();
        prop_assert!(scan.holds, "{:?}", scan);
        let fig1 = common::random_fig1(&mut rng, 2);
        let scan = finrel_scan(&fig1, &FinrelOptions { max_depth: 3, use_certificate: false, ..Default::default() }).unwrap();
        prop_assert!(scan.holds, "{:?}", scan);
    }
}

#[test]
fn counterexample_grows_faster_than_its_members() {
    for a in [0.5, 2.0, 3.0] {
        let pair = posswitch::MatrixSet::explicit(
            vec![
                Matrix::from_rows(&[[a, a * a], [1.0, a]]).unwrap(),
                Matrix::from_rows(&[[a, 1.0], [a * a, a]]).unwrap(),
            ],
            posswitch::Mode::Positive,
        )
        .unwrap();
        let b = posswitch::spectral::product_bounds(&pair, 2, posswitch::NormKind::Inf, 100).unwrap();
        let e = rho_extrema(&pair, 100).unwrap();
        // rho(A1 A2) = (1 + a^2)^2 while rho(A_i) = 2a
        assert!(common::rel_close(e.rho_max, 2.0 * a, 1e-12));
        assert!(common::rel_close(b.jsr_lower, 1.0 + a * a, 1e-10));
        assert!(b.jsr_lower > e.rho_max);
    }
}
