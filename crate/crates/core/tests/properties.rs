use lcwnb_core::eval::{stratified_folds, AccuracyMatrix};
use lcwnb_core::lcwnb::{
    self, classify, classify_traced, expected_size, select_gamma, weight_multiplier, DistanceProfile,
    DEFAULT_ITERATIONS,
};
use lcwnb_core::nb::{fit_nb, weighted_nb_oracle};
use lcwnb_core::stats::{
    binomial_tail, friedman_test, iman_davenport, mean_rank_z_test, mean_ranks, paired_t_test, permutation_bounds,
    quade_test, wilcoxon_signed_rank, BoundStatistic, Side,
};
use lcwnb_core::{hamming_distance, AttributeSchema, ClassSchema, Dataset, Instance};
use proptest::prelude::*;

fn build(cards: &[usize], classes: usize, rows: &[(Vec<usize>, usize)]) -> Dataset {
    let attrs = cards
        .iter()
        .enumerate()
        .map(|(i, &q)| AttributeSchema::new(format!("a{i}"), (0..q).map(|v| v.to_string())))
        .collect();
    let classes = ClassSchema::new((0..classes).map(|c| format!("c{c}")));
    let instances = rows.iter().map(|(x, y)| Instance::labeled(x.clone(), *y)).collect();
    Dataset::try_new(attrs, classes, instances).unwrap()
}

/// (cardinalities, classes, training rows, query)
type Problem = (Vec<usize>, usize, Vec<(Vec<usize>, usize)>, Vec<usize>);

fn small_problem(max_m: usize, max_n: usize) -> impl Strategy<Value = Problem> {
    (1..=max_m, 2..=3usize).prop_flat_map(move |(m, r)| {
        prop::collection::vec(2..=3usize, m).prop_flat_map(move |cards| {
            let cell = cards.iter().map(|&q| 0..q).collect::<Vec<_>>();
            let rows = prop::collection::vec((cell.clone(), 0..r), 1..=max_n);
            (Just(cards.clone()), Just(r), rows, cell)
        })
    })
}

fn accuracy_matrix(rows: Vec<Vec<f64>>) -> AccuracyMatrix {
    let k = rows[0].len();
    AccuracyMatrix::new(
        (0..rows.len()).map(|i| format!("d{i}")).collect(),
        (0..k).map(|i| format!("m{i}")).collect(),
        rows,
    )
    .unwrap()
}

/// Rows of accuracies drawn from a coarse grid so ties are common.
fn grid_matrix(max_n: usize, max_k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..=max_n, 2..=max_k).prop_flat_map(|(n, k)| {
        prop::collection::vec(prop::collection::vec((0..20u32).prop_map(|v| f64::from(v) / 20.0), k), n)
    })
}

fn in_unit(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn expected_size_is_monotone(row in prop::collection::vec(0..20usize, 1..8), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(expected_size(&row, lo) <= expected_size(&row, hi));
        prop_assert_eq!(expected_size(&row, 0.0), row[0] as f64);
        prop_assert_eq!(expected_size(&row, 1.0), row.iter().sum::<usize>() as f64);
    }

    #[test]
    fn multiplier_is_at_least_one(rows in prop::collection::vec(prop::collection::vec(0..10usize, 4), 2..4), gammas in prop::collection::vec(0.0..=1.0f64, 4)) {
        prop_assume!(rows.iter().flatten().any(|&v| v > 0));
        let profile = DistanceProfile::from_rows(rows.clone());
        let gamma = &gammas[..rows.len()];
        match weight_multiplier(&profile, gamma) {
            Ok(rho) => prop_assert!(rho >= 1.0 - 1e-12, "rho = {rho}"),
            // All mass sits at positive distance in classes with γ = 0.
            Err(_) => prop_assert!(rows.iter().zip(gamma).all(|(r, &g)| expected_size(r, g * g) == 0.0)),
        }
    }

    #[test]
    fn selected_gamma_hits_its_target(row in prop::collection::vec(0..15usize, 1..6), kappa in 0.1..100.0f64) {
        let total: usize = row.iter().sum();
        let c = select_gamma(&row, kappa, DEFAULT_ITERATIONS).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.gamma));
        if total == 0 {
            prop_assert!(c.empty);
        } else {
            let target = kappa.max(row[0] as f64).min(total as f64);
            let step = 0.5f64.powi(DEFAULT_ITERATIONS as i32);
            let lo = expected_size(&row, (c.gamma - step).max(0.0));
            let hi = expected_size(&row, (c.gamma + step).min(1.0));
            prop_assert!(lo <= target + 1e-9 && target <= hi + 1e-9);
        }
    }

    #[test]
    fn replication_never_raises_gamma(row in prop::collection::vec(0..10usize, 1..6), kappa in 0.5..50.0f64) {
        prop_assume!(row.iter().sum::<usize>() > 0);
        let doubled: Vec<usize> = row.iter().map(|v| 2 * v).collect();
        let g1 = select_gamma(&row, kappa, DEFAULT_ITERATIONS).unwrap().gamma;
        let g2 = select_gamma(&doubled, kappa, DEFAULT_ITERATIONS).unwrap().gamma;
        prop_assert!(g2 <= g1 + 2.0 * 0.5f64.powi(DEFAULT_ITERATIONS as i32), "{g2} > {g1}");
    }

    #[test]
    fn rank_rows_sum_to_triangle(rows in grid_matrix(8, 7)) {
        let k = rows[0].len() as f64;
        let table = mean_ranks(&accuracy_matrix(rows));
        for row in &table.ranks {
            prop_assert_eq!(row.iter().sum::<f64>(), k * (k + 1.0) / 2.0);
        }
    }

    #[test]
    fn p_values_lie_in_unit_interval(rows in grid_matrix(10, 5)) {
        let m = accuracy_matrix(rows.clone());
        let f = friedman_test(&m).unwrap();
        prop_assert!(in_unit(f.p_value));
        if let Ok(id) = iman_davenport(&f) {
            prop_assert!(in_unit(id.p_value));
        }
        if let Ok(q) = quade_test(&m) {
            prop_assert!(in_unit(q.p_value));
        }
        if let Ok(z) = mean_rank_z_test(&mean_ranks(&m), "m0") {
            prop_assert!(in_unit(z.p_value));
        }
        let a: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let b: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        prop_assert!(in_unit(paired_t_test(&a, &b, 0.05).unwrap().report.p_value));
        let two = wilcoxon_signed_rank(&a, &b, Side::TwoSided).unwrap().p_value;
        let greater = wilcoxon_signed_rank(&a, &b, Side::Greater).unwrap().p_value;
        let less = wilcoxon_signed_rank(&a, &b, Side::Less).unwrap().p_value;
        prop_assert!(in_unit(two) && in_unit(greater) && in_unit(less));
        prop_assert!(greater.min(less) <= two + 1e-12);
    }

    #[test]
    fn binomial_tail_is_a_probability(n in 1..200u64, p in 0.01..0.99f64, frac in 0.0..=1.0f64) {
        let k = (frac * n as f64) as u64;
        let t = binomial_tail(n, p, k).unwrap();
        prop_assert!(in_unit(t));
        if k < n {
            prop_assert!(binomial_tail(n, p, k + 1).unwrap() <= t);
        }
    }

    #[test]
    fn friedman_ignores_monotone_row_maps(rows in grid_matrix(8, 5), scale in 0.1..10.0f64) {
        let warped: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| (scale * v).exp()).collect()).collect();
        let a = friedman_test(&accuracy_matrix(rows)).unwrap();
        let b = friedman_test(&accuracy_matrix(warped)).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn permutation_bounds_are_deterministic(rows in grid_matrix(6, 5), seed in any::<u64>()) {
        let m = accuracy_matrix(rows);
        for stat in [BoundStatistic::MeanAccuracy, BoundStatistic::MeanRank] {
            let a = permutation_bounds(&m, stat, 20, seed).unwrap();
            let b = permutation_bounds(&m, stat, 20, seed).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.lower <= a.upper);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn oracle_matches_locality_counts((cards, r, rows, x) in small_problem(4, 50), kappa in 0.2..30.0f64) {
        let train = build(&cards, r, &rows);
        let trace = classify_traced(&train, &x, kappa, DEFAULT_ITERATIONS).unwrap();
        let gamma = trace.params.gamma.clone();
        let oracle = weighted_nb_oracle(
            &train,
            |cell, y| {
                let h = hamming_distance(cell, &x).unwrap();
                if h == 0 { 1.0 } else { gamma[y].powi(h as i32) }
            },
            &x,
        ).unwrap();
        let total: f64 = trace.params.size.iter().sum();
        for y in 0..r {
            let s = trace.params.size[y];
            prop_assert!((oracle.class_mass[y] - s).abs() <= 1e-12 * s.max(1.0));
            prop_assert!((oracle.class_probs[y] - s / total).abs() <= 1e-12);
            for i in 0..cards.len() {
                match oracle.conditional[y][i] {
                    Some(p) => prop_assert!((p - trace.counts.get(i, y) / s).abs() <= 1e-12),
                    None => prop_assert_eq!(s, 0.0),
                }
            }
        }
    }

    #[test]
    fn huge_kappa_reduces_to_naive_bayes((cards, r, rows, x) in small_problem(6, 60)) {
        let train = build(&cards, r, &rows);
        let n = train.len() as f64;
        let nb = fit_nb(&train).unwrap().predict(&x);
        let lc = classify(&train, &x, n + 1.0, DEFAULT_ITERATIONS).unwrap();
        prop_assert_eq!(nb.prediction, lc.prediction);
        let shift = (r as f64 + n).ln();
        for (a, b) in lc.log_scores.iter().zip(&nb.log_scores) {
            prop_assert!((a - b - shift).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn training_order_does_not_matter((cards, r, rows, x) in small_problem(4, 40), kappa in 0.5..20.0f64, rot in 0..40usize) {
        let mut shuffled = rows.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        shuffled.reverse();
        let a = classify(&build(&cards, r, &rows), &x, kappa, DEFAULT_ITERATIONS).unwrap();
        let b = classify(&build(&cards, r, &shuffled), &x, kappa, DEFAULT_ITERATIONS).unwrap();
        for (u, v) in a.log_scores.iter().zip(&b.log_scores) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }

    #[test]
    fn folds_partition_every_run((cards, r, rows, _x) in small_problem(2, 60), k in 2..8usize, seed in any::<u64>()) {
        let d = build(&cards, r, &rows);
        prop_assume!(k <= d.len());
        let plans = stratified_folds(&d, k, 3, seed).unwrap();
        for run in 0..3 {
            let mut seen = vec![0u8; d.len()];
            for p in plans.iter().filter(|p| p.run == run) {
                for &j in &p.test {
                    seen[j] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}

#[test]
fn auto_kappa_follows_attribute_count() {
    assert_eq!(lcwnb::auto_kappa_for_features(4), 20.0);
    assert_eq!(lcwnb::auto_kappa_for_features(14), 10.0);
    assert_eq!(lcwnb::auto_kappa_for_features(16), 5.0);
}
