use num_complex::Complex64;

use expburgers::asymptotics::check_decay_bound;
use expburgers::exact::{compute_coefficients, DEFAULT_TERM_CAP};
use expburgers::experiments::{magnitude_spectrum, reference_exact_symbol, reference_solver_config, Band};
use expburgers::solver::{run, run_with, InitialCondition, SolverError};
use expburgers::{Grid, ProductMethod, SolverConfig64};

#[test]
fn coarser_step_agrees_on_low_modes() {
    let fine = run(&reference_solver_config()).unwrap();
    let mut cfg = reference_solver_config();
    cfg.dt = 5e-3;
    let coarse = run(&cfg).unwrap();
    let worst = (1..=12)
        .map(|k| (fine.get(k) - coarse.get(k)).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "max difference {worst:e}");
}

#[test]
fn rounding_noise_sets_in_near_k17() {
    let field = run(&reference_solver_config()).unwrap();
    let onset = field.noise_onset().expect("noise within the dealiased band");
    assert!((15..=19).contains(&onset), "onset {onset}");
    let flags = field.noise_flags();
    assert!(flags.iter().all(|&(k, noisy)| noisy == (k >= onset)));
}

#[test]
fn cosh_spectrum_obeys_the_decay_bound() {
    let field = run(&reference_solver_config()).unwrap();
    let spectrum = magnitude_spectrum(&field, Band::default());
    let c = 1.0 / (2.0 * std::f64::consts::LN_2);
    let check = check_decay_bound(&spectrum, 1.0, c * 0.99, 8);
    assert!(check.holds, "violation at {:?}", check.first_violation);
    assert!(check.checked >= 5);
}

#[test]
fn real_data_stay_real() {
    let field = run(&reference_solver_config()).unwrap();
    for k in 1..=field.grid().k_max() {
        let (a, b) = (field.get(k), field.get(-k));
        assert!((a - b.conj()).norm() <= 1e-15 * a.norm().max(1e-300));
    }
}

#[test]
fn half_space_data_stay_half_space() {
    let mut cfg = reference_solver_config();
    cfg.symbol = reference_exact_symbol();
    cfg.initial_condition = InitialCondition::SingleComplexMode(Complex64::new(0.0, 1.0));
    let mut snapshots = 0;
    let field = run_with(&cfg, |_, u| {
        snapshots += 1;
        assert!(u.is_half_space());
    })
    .unwrap();
    assert!(snapshots > 0);
    assert!(field.is_half_space());
}

#[test]
fn half_amplitude_matches_exact_engine() {
    let sym = reference_exact_symbol();
    let mut cfg = SolverConfig64::new(Grid::new(64).unwrap(), sym);
    cfg.dt = 2e-5;
    cfg.product = ProductMethod::Direct;
    cfg.initial_condition = InitialCondition::SingleComplexMode(Complex64::new(0.0, 0.5));
    let field = run(&cfg).unwrap();
    let exact = compute_coefficients::<f64>(8, &sym, Complex64::new(0.5, 0.0), DEFAULT_TERM_CAP).unwrap();
    for k in 1..=8 {
        let want = exact.u_hat(k, &1.0);
        let rel = (field.get(k as i64) - want).norm() / want.norm();
        assert!(rel < 1e-9, "k = {k}: relative error {rel:e}");
    }
}

#[test]
fn zero_final_time_is_rejected() {
    let mut cfg = reference_solver_config();
    cfg.t_end = 0.0;
    assert_eq!(run(&cfg).unwrap_err(), SolverError::BadFinalTime(0.0));
}
