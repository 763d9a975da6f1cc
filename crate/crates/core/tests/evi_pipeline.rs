use lipdon::basis::{EncodedVector, RieszBasis};
use lipdon::evi::{
    obstacle_to_solution, postprocess_feasible, solve_vi, ObstacleMap, ObstacleProblem, ProblemFile, SolverConfig,
};

/// Continuous solution for the obstacle `0.5 sin 2 pi x` with zero load:
/// contact on `[1/2 - x0, x0]`, `A cosh(x - 3/4)` elsewhere (periodically).
fn sine_solution(x: f64) -> f64 {
    const X0: f64 = 0.2614563113395998;
    const AMP: f64 = 0.44458577439308894;
    if (0.5 - X0..=X0).contains(&x) {
        0.5 * (2.0 * std::f64::consts::PI * x).sin()
    } else {
        let shifted = if x < 0.5 - X0 { x + 1.0 } else { x };
        AMP * (shifted - 0.75).cosh()
    }
}

#[test]
fn analytic_oracle_is_consistent() {
    // Continuity and smooth fit at both ends of the contact set.
    let x0 = 0.2614563113395998;
    let phi = |x: f64| 0.5 * (2.0 * std::f64::consts::PI * x).sin();
    for x in [x0, 0.5 - x0] {
        assert!((sine_solution(x - 1e-12) - phi(x)).abs() < 1e-9);
        assert!((sine_solution(x + 1e-12) - phi(x)).abs() < 1e-9);
    }
    // Periodic wrap.
    assert!((sine_solution(0.0) - sine_solution(1.0 - 1e-15)).abs() < 1e-9);
}

#[test]
fn discrete_solution_converges_to_the_analytic_one() {
    let mut errs = Vec::new();
    for n in [128usize, 512] {
        let phi: Vec<f64> = (0..n).map(|i| 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin()).collect();
        let p = ObstacleProblem::laplace(1, n, vec![0.0; n], phi).unwrap();
        let s = solve_vi(&p, &SolverConfig::default()).unwrap();
        assert!(s.converged && s.kkt_residual <= 1e-9);
        let e = s
            .u
            .iter()
            .enumerate()
            .map(|(i, u)| (u - sine_solution(i as f64 / n as f64)).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    assert!(errs[0] < 1e-3, "{errs:?}");
    assert!(errs[1] < errs[0], "{errs:?}");
}

#[test]
fn encoded_obstacles_roundtrip_through_json() {
    let map = ObstacleMap::standard(1, 64).unwrap();
    let phi = EncodedVector {
        coefficients: vec![0.0, 0.3, -0.2, 0.1],
        basis: map.input_basis.descriptor(),
    };
    let json = serde_json::to_string(&phi).unwrap();
    let back: EncodedVector = serde_json::from_str(&json).unwrap();
    let (u, sol) = obstacle_to_solution(&back, &map).unwrap();
    assert!(sol.converged);
    assert_eq!(u.coefficients.len(), map.output_terms);
    let grid = map.output_basis.decode(&u.coefficients).unwrap();
    // All modes but the Nyquist one are kept, so decoding recovers the
    // solution minus its alternating component.
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let nyquist = sol.u.iter().enumerate().map(|(i, u)| u * sign(i)).sum::<f64>() / 64.0;
    let err = grid
        .iter()
        .zip(&sol.u)
        .enumerate()
        .map(|(i, (a, b))| (a - (b - nyquist * sign(i))).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");

    let wrong = EncodedVector {
        basis: RieszBasis::fourier(1, 64).unwrap().descriptor(),
        ..phi
    };
    assert!(obstacle_to_solution(&wrong, &map).is_err());
}

#[test]
fn problem_files_solve_in_two_dimensions() {
    let n = 16;
    let phi: Vec<f64> = (0..n * n)
        .map(|p| {
            let (i, j) = (p / n, p % n);
            0.4 - 3.0 * ((i as f64 / n as f64 - 0.5).powi(2) + (j as f64 / n as f64 - 0.5).powi(2))
        })
        .collect();
    let file = ProblemFile {
        d: 2,
        n_grid: n,
        operator: "laplace_plus_id".into(),
        f: None,
        phi: Some(phi.clone()),
        phi_coeffs: None,
    };
    let text = serde_json::to_string(&file).unwrap();
    let parsed: ProblemFile = serde_json::from_str(&text).unwrap();
    let s = solve_vi(&parsed.to_problem().unwrap(), &SolverConfig::default()).unwrap();
    assert!(s.converged && s.kkt_residual <= 1e-9);
    assert!(s.u.iter().zip(&phi).all(|(u, p)| u >= &(p - 1e-12)));
    assert!(s.u.iter().any(|u| *u > 0.0));
}

#[test]
fn postprocessing_restores_feasibility() {
    let phi = vec![0.2, -0.1, 0.3];
    let rough = vec![0.1, 0.0, 0.35];
    let fixed = postprocess_feasible(&rough, &phi).unwrap();
    assert_eq!(fixed, vec![0.2, 0.0, 0.35]);
    assert!(postprocess_feasible(&rough, &phi[..2]).is_err());
}
