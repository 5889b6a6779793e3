use std::f64::consts::PI;

use num_complex::Complex64;

use zakfrft::approx::{
    brute_force_modulus, build_solution, component_transform, evaluate_modulus, monotonicity_report,
    solution_reports, ApproxSolution,
};
use zakfrft::{Error, Grid, SignalExpr};

fn two_targets() -> ApproxSolution {
    let targets = [SignalExpr::triangle(-1.0, 1.0), SignalExpr::boxcar(-1.0, 1.0)];
    build_solution(&targets, &[0.0, PI / 2.0], 0.05, 1.0).unwrap()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn two_targets_meet_epsilon_and_cross_bounds() {
    let sol = two_targets();
    for r in solution_reports(&sol) {
        assert!(r.pass, "{}", r.to_json());
    }
    assert!(monotonicity_report(&sol, 2.0).unwrap().pass);
    // each component reproduces its own target at its own angle
    let grid = Grid::linspace(-1.0, 1.0, 81).unwrap();
    for c in &sol.components {
        let own = component_transform(c, c.angle, &grid).unwrap();
        for (t, v) in own.iter() {
            assert!((v.norm() - c.target.eval(t).re).abs() < 1e-8, "{t}");
        }
    }
}

#[test]
fn phase_flip_moves_moduli_by_at_most_twice_the_cross_terms() {
    let sol = two_targets();
    let flip = [one(), Complex64::new(-1.0, 0.0)];
    for (j, c) in sol.components.iter().enumerate() {
        let x = evaluate_modulus(&sol, &[one(), one()], c.angle, &sol.grid).unwrap();
        let y = evaluate_modulus(&sol, &flip, c.angle, &sol.grid).unwrap();
        let cross = (0..2).filter(|&k| k != j).map(|k| sol.cross[j][k]).fold(0.0, f64::max);
        assert!(x.max_abs_diff(&y).unwrap() <= 2.0 * cross + 1e-12);
        assert!(2.0 * cross <= 2.0 * sol.epsilon);
    }
}

#[test]
fn fast_path_matches_brute_force() {
    let sol = two_targets();
    let grid = Grid::linspace(-0.8, 0.8, 33).unwrap();
    for a in [0.0, PI / 2.0] {
        let fast = evaluate_modulus(&sol, &[one(), one()], a, &grid).unwrap();
        let brute = brute_force_modulus(&sol, &[one(), one()], a, &grid, 1.0e4, 0.25).unwrap();
        let d = fast.max_abs_diff(&brute).unwrap();
        assert!(d < 1e-4, "alpha {a}: {d}");
    }
}

#[test]
fn negative_or_complex_targets_are_rejected() {
    let neg = SignalExpr::boxcar(-1.0, 1.0).scale(Complex64::new(-1.0, 0.0));
    assert!(matches!(build_solution(&[neg], &[0.3], 0.05, 1.0), Err(Error::InvalidInput(_))));
    let complex = SignalExpr::boxcar(-1.0, 1.0).scale(Complex64::new(0.0, 1.0));
    assert!(matches!(build_solution(&[complex], &[0.3], 0.05, 1.0), Err(Error::InvalidInput(_))));
    let wide = SignalExpr::boxcar(-2.0, 2.0);
    assert!(build_solution(&[wide], &[0.3], 0.05, 1.0).is_err());
}

#[test]
fn unreachable_epsilon_fails_loudly() {
    let targets = [SignalExpr::triangle(-1.0, 1.0), SignalExpr::boxcar(-1.0, 1.0)];
    let err = build_solution(&targets, &[0.0, PI / 2.0], 1e-4, 1.0).unwrap_err();
    assert!(matches!(err, Error::LevelUnattained { .. } | Error::EpsilonNotAchieved { .. }), "{err}");
}
