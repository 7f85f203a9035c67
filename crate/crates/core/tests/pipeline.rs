use qfeedback_core::entanglement::concurrence_hermitian;
use qfeedback_core::master_equation::{
    analytic_steady_state, liouvillian_fb, liouvillian_nofb, steady_state_solution,
    SteadyStateCoefficients, DEGENERACY_THRESHOLD,
};
use qfeedback_core::optimizer::{
    optimize_lambda, scan_grid, scan_point, stationary_concurrence_validated,
};
use qfeedback_core::{concurrence, ModelParams, OptimizationConfig};

#[test]
fn closed_form_and_solver_agree_on_concurrence() {
    for (alpha, j) in [(0.3, 0.3), (1.0, 1.0), (2.0, 0.7)] {
        let p = ModelParams::new(alpha, j);
        let exact = stationary_concurrence_validated(&p).unwrap();
        let numeric =
            concurrence(&steady_state_solution(&liouvillian_nofb(&p)).unwrap().rho).unwrap();
        assert!((exact - numeric.value).abs() < 1e-10);
    }
}

#[test]
fn unit_parameters_steady_state() {
    let p = ModelParams::new(1.0, 1.0);
    let k = SteadyStateCoefficients::for_params(&p);
    assert_eq!(k.xi, 64.0 + 16.0 + 1.0 + 64.0);
    let rho = analytic_steady_state(&p).unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-15);
    assert!((concurrence(&rho).unwrap().value - 0.220689655172).abs() < 1e-11);
}

#[test]
fn feedback_solutions_are_nondegenerate_states() {
    let p = ModelParams::new(0.6, 0.4);
    for lambda in [-3.0, -0.5, 0.25, 2.0] {
        let sol = steady_state_solution(&liouvillian_fb(&p.with_lambda(lambda))).unwrap();
        assert!(sol.smallest_singular_values[1] > DEGENERACY_THRESHOLD);
        assert!(sol.rho.min_eigenvalue() > -1e-8);
        let a = concurrence(&sol.rho).unwrap().value;
        let b = concurrence_hermitian(&sol.rho).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn scan_matches_pointwise_optimization() {
    let cfg = OptimizationConfig {
        coarse_points: 41,
        ..OptimizationConfig::default()
    };
    let alphas = [0.2, 0.9];
    let js = [0.1, 0.6, 2.0];
    let grid = scan_grid(&alphas, &js, &cfg).unwrap();
    assert_eq!(grid.len(), 6);
    let mut k = 0;
    for &a in &alphas {
        for &j in &js {
            let rec = &grid[k];
            assert_eq!((rec.alpha, rec.j), (a, j));
            assert_eq!(rec, &scan_point(a, j, &cfg));
            let opt = optimize_lambda(&ModelParams::new(a, j), &cfg).unwrap();
            assert_eq!(rec.cfb, opt.cfb);
            assert!(rec.delta >= -1e-9);
            k += 1;
        }
    }
}

#[test]
fn maximally_mixed_feedback_state_is_handled() {
    // λ = −1 drives this point to I/4.
    let p = ModelParams::new(0.25526315789473686, 1.092105263157895).with_lambda(-1.0);
    let sol = steady_state_solution(&liouvillian_fb(&p)).unwrap();
    assert_eq!(concurrence(&sol.rho).unwrap().value, 0.0);
}
