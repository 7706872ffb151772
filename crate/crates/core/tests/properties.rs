use nalgebra::DMatrix;
use proptest::prelude::*;

use interlaced_dpp::ensembles::{sample_fixed_orbit, sample_gaussian};
use interlaced_dpp::gc_cones::{interlaces_with_slack, is_member, pattern_from_minors, sample_uniform};
use interlaced_dpp::heckman::{branching_measure_a, weyl_dim_unitary};
use interlaced_dpp::minors::{minor_sequence, to_point_configuration};
use interlaced_dpp::numerics::delta::delta;
use interlaced_dpp::numerics::hermite::{hermite_normalized, hermite_polynomial};
use interlaced_dpp::numerics::linalg::pfaffian;
use interlaced_dpp::rng::stream_rng;
use interlaced_dpp::verify::{estimate_correlation, sample_configurations, CorrelationQuery, Window};
use interlaced_dpp::{ClassTag, MatrixClass};

fn class_strategy(max_rank: usize) -> impl Strategy<Value = MatrixClass> {
    (0usize..4, 1..=max_rank).prop_map(|(t, n)| MatrixClass::new(ClassTag::ALL[t], n).unwrap())
}

fn chamber(class: MatrixClass, raw: &[f64]) -> Vec<f64> {
    // strictly decreasing, shifted to the chamber of the class
    let mut v: Vec<f64> = raw.iter().take(class.rank).copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let gaps: Vec<f64> = v.iter().map(|x| 0.2 + x.abs()).collect();
    let mut out = vec![0.0; class.rank];
    for i in (0..class.rank).rev() {
        acc += gaps[i];
        out[i] = acc;
    }
    if class.tag == ClassTag::A {
        out.iter_mut().for_each(|x| *x -= 1.0);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_minor_processes_lie_in_the_cone(class in class_strategy(4), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let h = sample_gaussian(class, &mut rng);
        let seq = minor_sequence(&h).unwrap();
        prop_assert!(is_member(&pattern_from_minors(&seq).unwrap()).unwrap());
        let cfg = to_point_configuration(&seq).unwrap();
        for r in 1..=class.level_count() {
            prop_assert_eq!(cfg.level(r).len(), class.points_at_level(r).unwrap());
        }
    }

    #[test]
    fn orbit_samples_keep_the_top_row(class in class_strategy(3), raw in prop::collection::vec(-2.0f64..2.0, 3), seed in any::<u64>()) {
        let lambda = chamber(class, &raw);
        let mut rng = stream_rng(seed, 1);
        let h = sample_fixed_orbit(class, &lambda, &mut rng).unwrap();
        let p = pattern_from_minors(&minor_sequence(&h).unwrap()).unwrap();
        let scale = 1.0 + lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (a, b) in p.top().iter().zip(&lambda) {
            prop_assert!((a.abs() - b.abs()).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn gibbs_states_are_members(class in class_strategy(3), raw in prop::collection::vec(-2.0f64..2.0, 3), seed in any::<u64>(), sweeps in 1usize..20) {
        let lambda = chamber(class, &raw);
        let mut rng = stream_rng(seed, 2);
        let p = sample_uniform(class, &lambda, sweeps, &mut rng).unwrap();
        prop_assert!(is_member(&p).unwrap());
    }

    #[test]
    fn pfaffian_squares_to_determinant(entries in prop::collection::vec(-1.0f64..1.0, 15), half in 1usize..4) {
        let m = 2 * half;
        let mut a = DMatrix::zeros(m, m);
        let mut it = entries.iter();
        for i in 0..m {
            for j in i + 1..m {
                let v = *it.next().unwrap();
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        let pf = pfaffian(&a).unwrap();
        let det = a.determinant();
        prop_assert!((pf * pf - det).abs() <= 1e-10 * (1.0 + det.abs()));
    }

    #[test]
    fn delta_is_alternating(x in prop::collection::vec(-2.0f64..2.0, 2..5), t in 0usize..4, i in 0usize..4, j in 0usize..4) {
        let tag = ClassTag::ALL[t];
        let (i, j) = (i % x.len(), j % x.len());
        prop_assume!(i != j);
        let mut y = x.clone();
        y.swap(i, j);
        let (a, b) = (delta(tag, &x), delta(tag, &y));
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn hermite_recurrence_matches_coefficients(i in 0usize..15, x in -4.0f64..4.0) {
        let a = hermite_normalized(i, x);
        let b = hermite_polynomial(i).eval(x);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn weyl_dimension_is_shift_invariant(raw in prop::collection::vec(0i64..6, 1..5), shift in -10i64..10) {
        let mut lambda = raw.clone();
        lambda.sort_by(|a, b| b.cmp(a));
        let shifted: Vec<i64> = lambda.iter().map(|v| v + shift).collect();
        prop_assert_eq!(weyl_dim_unitary(&lambda).unwrap(), weyl_dim_unitary(&shifted).unwrap());
    }

    #[test]
    fn branching_atoms_interlace_and_sum_to_one(raw in prop::collection::vec(0i64..7, 2..5), eps in 0.01f64..1.0) {
        let mut lambda = raw.clone();
        lambda.sort_by(|a, b| b.cmp(a));
        let mu = branching_measure_a(&lambda, eps).unwrap();
        prop_assert!((mu.total_weight() - 1.0).abs() <= 1e-12);
        let scaled: Vec<f64> = lambda.iter().map(|&v| eps * v as f64).collect();
        for (x, _) in &mu.atoms {
            prop_assert!(interlaces_with_slack(&scaled, x, 1e-12).unwrap());
        }
    }

    #[test]
    fn whole_line_estimates_are_exact_counts(class in class_strategy(2), seed in any::<u64>()) {
        let samples = sample_configurations(class, 200, seed).unwrap();
        for r in 1..=class.level_count() {
            let q = CorrelationQuery::new(vec![Window::whole_line(r)]).unwrap();
            let e = estimate_correlation(&samples, &q).unwrap();
            prop_assert_eq!(e.value, class.points_at_level(r).unwrap() as f64);
        }
    }
}
