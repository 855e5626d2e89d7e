use std::f64::consts::LN_2;

use proptest::prelude::*;

use expburgers::asymptotics::{apply_transform, run_pipeline, Sequence, TransformId, CANONICAL_STACK};
use expburgers::experiments::reference_exact_symbol;
use expburgers::exact::{evaluate_at_precision, DEFAULT_TERM_CAP};
use expburgers::{with_precision, Real};

fn positive_sequence() -> impl Strategy<Value = Sequence<f64>> {
    (prop::collection::vec(1e-3f64..1e3, 3..30), -5i64..5)
        .prop_map(|(values, start)| Sequence::new(start, values, "s"))
}

fn k_log_k(c: f64, beta: f64, k_max: i64) -> Sequence<f64> {
    let values = (1..=k_max)
        .map(|k| {
            let k = k as f64;
            (beta * k.ln() - c * k * k.ln()).exp()
        })
        .collect();
    Sequence::new(1, values, "synthetic")
}

proptest! {
    #[test]
    fn scaling_only_moves_the_log_stage(s in positive_sequence(), c in 1e-3f64..1e3) {
        prop_assume!(s.len() >= 8);
        let scaled = s.map_values(|v| v * c, "c s");
        let a = run_pipeline(&s, &CANONICAL_STACK).unwrap();
        let b = run_pipeline(&scaled, &CANONICAL_STACK).unwrap();
        let log_a = &a.stages[0].1;
        let log_b = &b.stages[0].1;
        for (x, y) in log_a.values.iter().zip(&log_b.values) {
            prop_assert!((y - x - c.ln()).abs() < 1e-12 * (1.0 + x.abs()));
        }
        // after D the shift is gone up to rounding in the log stage
        let (_, d_a) = &a.stages[1];
        let (_, d_b) = &b.stages[1];
        prop_assert_eq!(d_a.start_index, d_b.start_index);
        for (x, y) in d_a.values.iter().zip(&d_b.values) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + c.ln().abs()));
        }
    }

    #[test]
    fn log_of_ratio_is_difference_of_log(s in positive_sequence()) {
        let lhs = apply_transform(TransformId::Log, &apply_transform(TransformId::R, &s).unwrap()).unwrap();
        let rhs = apply_transform(TransformId::D, &apply_transform(TransformId::Log, &s).unwrap()).unwrap();
        prop_assert_eq!(lhs.start_index, rhs.start_index);
        for (x, y) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_is_an_involution(s in positive_sequence()) {
        let twice = apply_transform(TransformId::I, &apply_transform(TransformId::I, &s).unwrap()).unwrap();
        for (x, y) in twice.values.iter().zip(&s.values) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs());
        }
    }
}

#[test]
fn prefactor_powers_do_not_move_the_constant() {
    let c = 1.0 / LN_2;
    for beta in [-1.0, 0.0, 1.0] {
        let report = run_pipeline(&k_log_k(c, beta, 40), &CANONICAL_STACK).unwrap();
        let c_star = report.c_star.unwrap();
        assert!((c_star / c - 1.0).abs() < 0.02, "beta = {beta}: C* = {c_star}");
    }
}

#[test]
fn synthetic_terminal_stage_approaches_minus_ln2() {
    let report = run_pipeline(&k_log_k(1.0 / LN_2, 0.0, 40), &CANONICAL_STACK).unwrap();
    let terminal = report.terminal();
    for (k, v) in terminal.iter().filter(|(k, _)| *k >= 35) {
        assert!((v + LN_2).abs() < 1e-3, "k = {k}: {v}");
    }
}

#[test]
fn exact_data_recover_the_constant() {
    let (v, _) = evaluate_at_precision(24, &reference_exact_symbol(), 1.0, 256, DEFAULT_TERM_CAP).unwrap();
    with_precision(256, || {
        let report = run_pipeline(&Sequence::new(1, v, "v_hat"), &CANONICAL_STACK).unwrap();
        let tail = report.tail_discrepancy().to_f64();
        assert!((tail + 2.3e-3).abs() < 1e-3, "tail {tail:e}");
        let c_star = report.c_star.as_ref().unwrap().to_f64();
        assert!((c_star * LN_2 - 1.0).abs() < 5e-3, "C* = {c_star}");
        assert_eq!(report.terminal().start_index, 4);
    });
}

#[test]
fn non_canonical_stack_leaves_the_constant_unset() {
    let s = Sequence::new(1, vec![5.0; 6], "five");
    let report = run_pipeline(&s, &[TransformId::D]).unwrap();
    assert!(report.c_star.is_none());
    assert_eq!(report.terminal_fit, 0.0);
    assert!(report.terminal().values.iter().all(|v| *v == 0.0));
}
