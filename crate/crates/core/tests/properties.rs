use gapstat::analysis::{expected_rect_distance, ratio_holds, RatioTest, RectSpec};
use gapstat::dataset::CsvOptions;
use gapstat::dispersion::{dispersion, DispersionCurve};
use gapstat::gap::sample_reference;
use gapstat::metric::pairwise_matrix;
use gapstat::stream::Stream;
use gapstat::{average_linkage, cut_tree, Dataset, DispersionKind, Metric, Partition};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = Dataset> {
    (3usize..14, 1usize..4).prop_flat_map(|(n, p)| {
        prop::collection::vec(-50.0f64..50.0, n * p).prop_map(move |v| Dataset::new(n, p, v).unwrap())
    })
}

fn centroid_ssq(data: &Dataset, part: &Partition) -> f64 {
    let mut total = 0.0;
    for r in 0..part.k() {
        let members = part.members(r);
        for j in 0..data.p() {
            let mean = members.iter().map(|&i| data.row(i)[j]).sum::<f64>() / members.len() as f64;
            total += members.iter().map(|&i| (data.row(i)[j] - mean).powi(2)).sum::<f64>();
        }
    }
    total
}

/// Twice the mean distance over unordered within-cluster pairs, summed over clusters.
fn weighted_oracle(data: &Dataset, part: &Partition) -> f64 {
    let mut total = 0.0;
    for r in 0..part.k() {
        let m = part.members(r);
        if m.len() < 2 {
            continue;
        }
        let mut s = 0.0;
        let mut pairs = 0usize;
        for (x, &i) in m.iter().enumerate() {
            for &j in &m[x + 1..] {
                s += data.row(i).iter().zip(data.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                pairs += 1;
            }
        }
        total += 2.0 * s / pairs as f64;
    }
    total
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cuts_are_nested(data in dataset()) {
        let tree = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));
        for k in 1..data.n() {
            let coarse = cut_tree(&tree, k).unwrap();
            let fine = cut_tree(&tree, k + 1).unwrap();
            prop_assert!(fine.refines(&coarse));
            prop_assert_eq!(fine.k(), k + 1);
        }
    }

    #[test]
    fn pooled_dispersion_is_centroid_ssq(data in dataset(), k_frac in 0.0f64..1.0) {
        let tree = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));
        let k = 1 + (k_frac * (data.n() - 1) as f64) as usize;
        let part = cut_tree(&tree, k).unwrap();
        let dm = pairwise_matrix(&data, Metric::SquaredEuclidean);
        let got = dispersion(&part, &dm, DispersionKind::Pooled).unwrap();
        prop_assert!((got - centroid_ssq(&data, &part)).abs() <= 1e-10 * got.abs().max(1.0));
        let weighted = dispersion(&part, &dm, DispersionKind::Weighted).unwrap();
        prop_assert!((weighted - weighted_oracle(&data, &part)).abs() <= 1e-10 * weighted.abs().max(1.0));
    }

    #[test]
    fn tree_curve_matches_cut_partitions(data in dataset()) {
        let dm = pairwise_matrix(&data, Metric::SquaredEuclidean);
        let tree = average_linkage(&dm);
        let k_max = data.n() - 1;
        for kind in [DispersionKind::Pooled, DispersionKind::Weighted] {
            let curve = DispersionCurve::from_tree(&tree, k_max, kind).unwrap();
            for k in 1..=k_max {
                let direct = dispersion(&cut_tree(&tree, k).unwrap(), &dm, kind).unwrap();
                prop_assert!((curve.at(k) - direct).abs() <= 1e-9 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pooled_curve_is_monotone(data in dataset()) {
        let tree = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));
        let curve = DispersionCurve::from_tree(&tree, data.n() - 1, DispersionKind::Pooled).unwrap();
        let slack = 1e-9 * curve.w[0];
        for pair in curve.w.windows(2) {
            prop_assert!(pair[1] <= pair[0] + slack);
        }
    }

    #[test]
    fn permutation_relabels_partitions(data in dataset(), seed in any::<u64>()) {
        let n = data.n();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = Stream::new(seed);
        for i in (1..n).rev() {
            let j = (gapstat::UnitStream::next_unit(&mut s) * (i + 1) as f64) as usize;
            order.swap(i, j.min(i));
        }
        let permuted = data.permuted(&order).unwrap();
        let t0 = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));
        let t1 = average_linkage(&pairwise_matrix(&permuted, Metric::SquaredEuclidean));
        let h0: Vec<f64> = t0.heights().collect();
        let h1: Vec<f64> = t1.heights().collect();
        // Continuous draws make exact or near ties vanishingly rare; skip them.
        let mut sorted = h0.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-6 * w[1].abs().max(1.0)));
        for (a, b) in h0.iter().zip(&h1) {
            prop_assert!(rel_close(*a, *b, 1e-9));
        }
        for k in 1..=n {
            let p0 = cut_tree(&t0, k).unwrap();
            let p1 = cut_tree(&t1, k).unwrap();
            let back: Vec<usize> = {
                let mut labels = vec![0; n];
                for (new_i, &old_i) in order.iter().enumerate() {
                    labels[old_i] = p1.labels()[new_i];
                }
                labels
            };
            let relabeled = Partition::canonical(&back);
            prop_assert_eq!(relabeled.labels(), p0.labels());
        }
    }

    #[test]
    fn dispersion_scales_quadratically(data in dataset(), c in 0.01f64..100.0) {
        let scaled = data.scaled(c).unwrap();
        let t0 = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));
        let t1 = average_linkage(&pairwise_matrix(&scaled, Metric::SquaredEuclidean));
        for kind in [DispersionKind::Pooled, DispersionKind::Weighted] {
            let w0 = DispersionCurve::from_tree(&t0, data.n() - 1, kind).unwrap();
            let w1 = DispersionCurve::from_tree(&t1, data.n() - 1, kind).unwrap();
            for (a, b) in w0.w.iter().zip(&w1.w) {
                prop_assert!((b - c * c * a).abs() <= 1e-9 * (c * c * a).abs().max(1e-9));
            }
        }
    }

    #[test]
    fn squared_distances_scale_exactly_by_powers_of_two(data in dataset(), e in -10i32..10) {
        let c = 2f64.powi(e);
        let d0 = pairwise_matrix(&data, Metric::SquaredEuclidean);
        let d1 = pairwise_matrix(&data.scaled(c).unwrap(), Metric::SquaredEuclidean);
        for (a, b) in d0.condensed().iter().zip(d1.condensed()) {
            prop_assert_eq!(*b, c * c * a);
        }
    }

    /// Coordinates on a 1/8 grid keep cancellation in the differences bounded.
    #[test]
    fn squared_distances_scale_by_c_squared(
        (n, p, cells) in (3usize..14, 1usize..4)
            .prop_flat_map(|(n, p)| (Just(n), Just(p), prop::collection::vec(-400i32..400, n * p))),
        c in 0.01f64..100.0,
    ) {
        let data = Dataset::new(n, p, cells.iter().map(|&v| v as f64 / 8.0).collect()).unwrap();
        let d0 = pairwise_matrix(&data, Metric::SquaredEuclidean);
        let d1 = pairwise_matrix(&data.scaled(c).unwrap(), Metric::SquaredEuclidean);
        for (a, b) in d0.condensed().iter().zip(d1.condensed()) {
            prop_assert!((b - c * c * a).abs() <= 1e-12 * c * c * a);
        }
    }

    #[test]
    fn ranges_bound_every_value(data in dataset()) {
        let r = data.feature_ranges();
        for row in data.rows() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!(r.mins[j] <= *v && *v <= r.maxs[j]);
            }
        }
    }

    #[test]
    fn references_stay_in_the_box(data in dataset(), seed in any::<u64>()) {
        let r = data.feature_ranges();
        let refs = sample_reference(&r, data.n(), &mut Stream::new(seed)).unwrap();
        for row in refs.rows() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!(r.mins[j] <= *v && *v <= r.maxs[j]);
            }
        }
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 2..20)
    ) {
        let data = Dataset::from_rows(rows).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(&buf[..], &CsvOptions { has_header: false, label_column: None }).unwrap();
        prop_assert_eq!(back.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        data.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn feasible_ratios_form_a_prefix(
        e1 in 0.5f64..10.0, e2 in 0.5f64..10.0, d in 0.0f64..10.0, sigma in 0.1f64..3.0, m in 1.0f64..64.0,
    ) {
        for test in [RatioTest::Log, RatioTest::Direct] {
            if ratio_holds(e1, e2, d, sigma, m, test) {
                for smaller in [1.0, (1.0 + m) / 2.0] {
                    prop_assert!(ratio_holds(e1, e2, d, sigma, smaller, test));
                }
            }
        }
    }

    #[test]
    fn rectangle_distance_symmetry_and_scale(a in 0.1f64..20.0, b in 0.1f64..20.0, c in 0.1f64..10.0) {
        let e = expected_rect_distance(RectSpec { a, b }).unwrap();
        let swapped = expected_rect_distance(RectSpec { a: b, b: a }).unwrap();
        let scaled = expected_rect_distance(RectSpec { a: c * a, b: c * b }).unwrap();
        prop_assert!(rel_close(e, swapped, 1e-12));
        prop_assert!(rel_close(scaled, c * e, 1e-9));
        prop_assert!(e > 0.0 && e < a.hypot(b));
    }
}
