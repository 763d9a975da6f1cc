//! Obstacle problems on the periodic grid and the obstacle-to-solution map.

mod solver;

pub use solver::{kkt_residual, solve_vi, SolverConfig, SolverMethod, ViSolution};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{EncodedVector, RieszBasis};
use crate::error::{check_len, invalid, Error, Result};
use crate::hs::gaussian;
use crate::numeric::{dot, pairwise_sum_by};

/// A strongly monotone, Lipschitz operator on grid functions.
pub trait MonotoneOperator: Send + Sync {
    fn apply(&self, u: &[f64], out: &mut [f64]);
    /// `ell` in `<Au - Av, u - v> >= ell ||u - v||^2`.
    fn strong_monotonicity(&self) -> f64;
    fn lipschitz(&self) -> f64;
    /// `sup_{||u|| <= r} ||Au||`.
    fn bound(&self, r: f64) -> f64 {
        self.lipschitz() * r
    }
    /// `(d, n)` when this is `-Laplace_h + I` on an `n^d` grid.
    fn laplace_grid(&self) -> Option<(usize, usize)> {
        None
    }
}

/// `-Laplace_h + I` with second-order central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacePlusIdentity {
    pub d: usize,
    pub n: usize,
}

impl MonotoneOperator for LaplacePlusIdentity {
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let inv_h2 = (self.n as f64).powi(2);
        let diag = 2.0 * self.d as f64 * inv_h2 + 1.0;
        let mut nb = Vec::with_capacity(2 * self.d);
        for i in 0..u.len() {
            solver::neighbours(i, self.d, self.n, &mut nb);
            let s: f64 = nb.iter().map(|&j| u[j]).sum();
            out[i] = diag * u[i] - inv_h2 * s;
        }
    }

    fn strong_monotonicity(&self) -> f64 {
        1.0
    }

    fn lipschitz(&self) -> f64 {
        1.0 + 4.0 * self.d as f64 * (self.n as f64).powi(2)
    }

    fn laplace_grid(&self) -> Option<(usize, usize)> {
        Some((self.d, self.n))
    }
}

/// Pointwise `u -> a u + b tanh(u)` plus an optional scaled Laplacian;
/// a small nonlinear operator for exercising the fixed-point solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhOperator {
    pub d: usize,
    pub n: usize,
    pub linear: f64,
    pub tanh: f64,
    pub diffusion: f64,
}

impl MonotoneOperator for TanhOperator {
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let inv_h2 = (self.n as f64).powi(2);
        let mut nb = Vec::with_capacity(2 * self.d);
        for i in 0..u.len() {
            solver::neighbours(i, self.d, self.n, &mut nb);
            let lap: f64 = nb.iter().map(|&j| u[i] - u[j]).sum::<f64>() * inv_h2;
            out[i] = self.linear * u[i] + self.tanh * u[i].tanh() + self.diffusion * lap;
        }
    }

    fn strong_monotonicity(&self) -> f64 {
        self.linear
    }

    fn lipschitz(&self) -> f64 {
        self.linear + self.tanh + self.diffusion * 4.0 * self.d as f64 * (self.n as f64).powi(2)
    }
}

#[derive(Clone)]
pub struct ObstacleProblem {
    pub d: usize,
    pub n_grid: usize,
    pub operator: Arc<dyn MonotoneOperator>,
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
}

impl std::fmt::Debug for ObstacleProblem {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ObstacleProblem")
            .field("d", &self.d)
            .field("n_grid", &self.n_grid)
            .finish_non_exhaustive()
    }
}

pub fn check_grid(d: usize, n: usize) -> Result<()> {
    if d == 0 || d > 2 {
        return Err(invalid(format!("torus dimension {d} is not supported")));
    }
    if n < 4 {
        return Err(invalid("need at least 4 grid points per axis"));
    }
    if d == 2 && n > 64 {
        return Err(invalid("two-dimensional grids are limited to 64 points per axis"));
    }
    Ok(())
}

impl ObstacleProblem {
    pub fn new(
        d: usize,
        n_grid: usize,
        operator: Arc<dyn MonotoneOperator>,
        f: Vec<f64>,
        phi: Vec<f64>,
    ) -> Result<Self> {
        check_grid(d, n_grid)?;
        let points = n_grid.pow(d as u32);
        check_len(points, f.len())?;
        check_len(points, phi.len())?;
        if f.iter().chain(&phi).any(|x| !x.is_finite()) {
            return Err(invalid("grid functions must be finite"));
        }
        Ok(ObstacleProblem {
            d,
            n_grid,
            operator,
            f,
            phi,
        })
    }

    /// `-Laplace_h + I` problem.
    pub fn laplace(d: usize, n_grid: usize, f: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        Self::new(d, n_grid, Arc::new(LaplacePlusIdentity { d, n: n_grid }), f, phi)
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.d, self.n_grid)
    }

    pub fn points(&self) -> usize {
        self.phi.len()
    }

    pub fn with_obstacle(&self, phi: Vec<f64>) -> Result<Self> {
        check_len(self.points(), phi.len())?;
        Ok(ObstacleProblem {
            phi,
            ..self.clone()
        })
    }
}

/// Discrete `L2` norm on the unit torus.
pub fn grid_norm(u: &[f64]) -> f64 {
    (dot(u, u) / u.len() as f64).sqrt()
}

pub fn grid_dist(u: &[f64], v: &[f64]) -> f64 {
    (pairwise_sum_by(u.len(), |i| (u[i] - v[i]).powi(2)) / u.len() as f64).sqrt()
}

/// Grid coordinates `x_m = m / n` of flat index `p` along axis `axis`.
pub fn grid_coordinate(p: usize, axis: usize, d: usize, n: usize) -> f64 {
    let stride = n.pow((d - 1 - axis) as u32);
    ((p / stride) % n) as f64 / n as f64
}

/// Sampled check of the monotone operator constants on random pairs.
/// Returns the smallest monotonicity quotient and the largest Lipschitz
/// quotient seen.
pub fn sample_operator_constants(op: &dyn MonotoneOperator, points: usize, pairs: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mono = f64::INFINITY;
    let mut lip = 0.0f64;
    let mut au = vec![0.0; points];
    let mut av = vec![0.0; points];
    for _ in 0..pairs {
        let u: Vec<f64> = (0..points).map(|_| gaussian(&mut rng)).collect();
        let v: Vec<f64> = (0..points).map(|_| gaussian(&mut rng)).collect();
        op.apply(&u, &mut au);
        op.apply(&v, &mut av);
        let du: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        let da: Vec<f64> = au.iter().zip(&av).map(|(a, b)| a - b).collect();
        let n2 = dot(&du, &du);
        mono = mono.min(dot(&da, &du) / n2);
        lip = lip.max((dot(&da, &da) / n2).sqrt());
    }
    (mono, lip)
}

/// The map from obstacle coefficients to solution coefficients.
///
/// Obstacles are expanded in `input_basis` (an `H^1`-normalized Fourier
/// basis by default); solutions are encoded in `output_basis` with
/// `output_terms` coefficients.
pub struct ObstacleMap {
    pub d: usize,
    pub n_grid: usize,
    pub f: Vec<f64>,
    pub input_basis: RieszBasis,
    pub output_basis: RieszBasis,
    pub output_terms: usize,
    pub solver: SolverConfig,
    failures: AtomicUsize,
}

impl std::fmt::Debug for ObstacleMap {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ObstacleMap")
            .field("d", &self.d)
            .field("n_grid", &self.n_grid)
            .field("output_terms", &self.output_terms)
            .finish_non_exhaustive()
    }
}

impl ObstacleMap {
    pub fn new(
        d: usize,
        n_grid: usize,
        f: Vec<f64>,
        input_basis: RieszBasis,
        output_basis: RieszBasis,
        output_terms: usize,
    ) -> Result<Self> {
        check_grid(d, n_grid)?;
        check_len(n_grid.pow(d as u32), f.len())?;
        check_len(input_basis.points(), f.len())?;
        check_len(output_basis.points(), f.len())?;
        if output_terms == 0 || output_terms > output_basis.max_terms() {
            return Err(Error::OutOfRange(format!("{output_terms} output terms")));
        }
        Ok(ObstacleMap {
            d,
            n_grid,
            f,
            input_basis,
            output_basis,
            output_terms,
            solver: SolverConfig::default(),
            failures: AtomicUsize::new(0),
        })
    }

    /// `f = 0`, `H^1` Fourier inputs, `L2` Fourier outputs with every resolved mode.
    pub fn standard(d: usize, n_grid: usize) -> Result<Self> {
        let input = RieszBasis::fourier_sobolev(d, n_grid, 1.0)?;
        let output = RieszBasis::fourier(d, n_grid)?;
        let terms = output.max_terms();
        Self::new(d, n_grid, vec![0.0; n_grid.pow(d as u32)], input, output, terms)
    }

    pub fn max_input_terms(&self) -> usize {
        self.input_basis.max_terms()
    }

    pub fn problem(&self, coeffs: &[f64]) -> Result<ObstacleProblem> {
        let phi = self.input_basis.decode(coeffs)?;
        ObstacleProblem::laplace(self.d, self.n_grid, self.f.clone(), phi)
    }

    /// Solve for the obstacle with the given coefficients.
    pub fn solve(&self, coeffs: &[f64]) -> Result<ViSolution> {
        let sol = solve_vi(&self.problem(coeffs)?, &self.solver)?;
        if !sol.converged {
            self.failures.fetch_add(1, Ordering::Relaxed);
        }
        Ok(sol)
    }

    pub fn evaluate(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let sol = self.solve(coeffs)?;
        self.output_basis.encode(&sol.u, self.output_terms)
    }

    /// Number of solves so far that did not reach the tolerance.
    pub fn unconverged_solves(&self) -> usize {
        self.failures.load(Ordering::Relaxed)
    }
}

/// Encoded obstacle in, encoded solution out.
pub fn obstacle_to_solution(
    phi: &EncodedVector,
    map: &ObstacleMap,
) -> Result<(EncodedVector, ViSolution)> {
    if phi.basis != map.input_basis.descriptor() {
        return Err(invalid("obstacle is encoded in a different basis"));
    }
    let sol = map.solve(&phi.coefficients)?;
    let coefficients = map.output_basis.encode(&sol.u, map.output_terms)?;
    Ok((
        EncodedVector {
            coefficients,
            basis: map.output_basis.descriptor(),
        },
        sol,
    ))
}

/// Pointwise `max(surrogate, phi_m)`.
pub fn postprocess_feasible(surrogate: &[f64], phi_m: &[f64]) -> Result<Vec<f64>> {
    check_len(surrogate.len(), phi_m.len())?;
    Ok(surrogate.iter().zip(phi_m).map(|(a, b)| a.max(*b)).collect())
}

/// Discrepancies between two obstacle problems and their solutions, all in
/// the discrete `L2` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub solution_gap: f64,
    pub source_gap: f64,
    /// Largest sampled `|| max(u, phi_1) - max(u, phi_2) ||`.
    pub projection_gap: f64,
    /// Largest sampled `|| A_1 u - A_2 u ||` over `||u|| <= radius`.
    pub operator_gap: f64,
    pub radius: f64,
    pub converged: bool,
}

impl PerturbationReport {
    /// `solution_gap / (projection_gap + source_gap + operator_gap)`.
    pub fn ratio(&self) -> f64 {
        let den = self.projection_gap + self.source_gap + self.operator_gap;
        if den == 0.0 {
            if self.solution_gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.solution_gap / den
        }
    }

    pub fn satisfied_by(&self, c: f64) -> bool {
        self.solution_gap <= c * (self.projection_gap + self.source_gap + self.operator_gap) + 1e-12
    }
}

pub fn perturbation_certificate(
    p1: &ObstacleProblem,
    p2: &ObstacleProblem,
    solver: &SolverConfig,
    probes: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    if p1.grid() != p2.grid() {
        return Err(invalid("problems live on different grids"));
    }
    let s1 = solve_vi(p1, solver)?;
    let s2 = solve_vi(p2, solver)?;
    let radius = grid_norm(&s1.u).max(grid_norm(&s2.u));
    let points = p1.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<f64>> = vec![s1.u.clone(), s2.u.clone(), p1.phi.clone(), p2.phi.clone()];
    for _ in 0..probes {
        let g: Vec<f64> = (0..points).map(|_| gaussian(&mut rng)).collect();
        let scale = radius.max(1e-12) / grid_norm(&g);
        samples.push(g.iter().map(|x| x * scale).collect());
    }
    let mut projection_gap = 0.0f64;
    let mut operator_gap = 0.0f64;
    let mut a1 = vec![0.0; points];
    let mut a2 = vec![0.0; points];
    for u in &samples {
        let q1: Vec<f64> = u.iter().zip(&p1.phi).map(|(a, b)| a.max(*b)).collect();
        let q2: Vec<f64> = u.iter().zip(&p2.phi).map(|(a, b)| a.max(*b)).collect();
        projection_gap = projection_gap.max(grid_dist(&q1, &q2));
        if grid_norm(u) <= radius * (1.0 + 1e-12) {
            p1.operator.apply(u, &mut a1);
            p2.operator.apply(u, &mut a2);
            operator_gap = operator_gap.max(grid_dist(&a1, &a2));
        }
    }
    Ok(PerturbationReport {
        solution_gap: grid_dist(&s1.u, &s2.u),
        source_gap: grid_dist(&p1.f, &p2.f),
        projection_gap,
        operator_gap,
        radius,
        converged: s1.converged && s2.converged,
    })
}

/// Smallest constant consistent with every report.
pub fn fit_perturbation_constant(reports: &[PerturbationReport]) -> f64 {
    reports.iter().map(|r| r.ratio()).fold(0.0, f64::max)
}

/// Problem file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub d: usize,
    pub n_grid: usize,
    #[serde(default = "default_operator")]
    pub operator: String,
    #[serde(default)]
    pub f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_coeffs: Option<Vec<f64>>,
}

fn default_operator() -> String {
    "laplace_plus_id".into()
}

impl ProblemFile {
    /// Build the problem; `phi_coeffs` are read in the `H^1` Fourier basis.
    pub fn to_problem(&self) -> Result<ObstacleProblem> {
        if self.operator != "laplace_plus_id" {
            return Err(invalid(format!("unknown operator {:?}", self.operator)));
        }
        check_grid(self.d, self.n_grid)?;
        let points = self.n_grid.pow(self.d as u32);
        let f = self.f.clone().unwrap_or_else(|| vec![0.0; points]);
        let phi = match (&self.phi, &self.phi_coeffs) {
            (Some(p), None) => p.clone(),
            (None, Some(c)) => RieszBasis::fourier_sobolev(self.d, self.n_grid, 1.0)?.decode(c)?,
            _ => return Err(invalid("give exactly one of phi and phi_coeffs")),
        };
        ObstacleProblem::laplace(self.d, self.n_grid, f, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sine_obstacle(n: usize) -> Vec<f64> {
        (0..n)
            .map(|m| 0.5 * (2.0 * std::f64::consts::PI * m as f64 / n as f64).sin())
            .collect()
    }

    #[test]
    fn constant_obstacles() {
        let cfg = SolverConfig::default();
        let below = ObstacleProblem::laplace(1, 64, vec![0.0; 64], vec![-1.0; 64]).unwrap();
        let s = solve_vi(&below, &cfg).unwrap();
        assert!(s.converged);
        assert!(s.u.iter().all(|x| x.abs() < 1e-12));
        let above = ObstacleProblem::laplace(1, 64, vec![0.0; 64], vec![0.5; 64]).unwrap();
        let s = solve_vi(&above, &cfg).unwrap();
        assert!(s.converged);
        assert!(s.u.iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn methods_agree_on_small_grid() {
        let n = 32;
        let p = ObstacleProblem::laplace(1, n, vec![0.0; n], sine_obstacle(n)).unwrap();
        let mut cfg = SolverConfig::default();
        let a = solve_vi(&p, &cfg).unwrap();
        cfg.method = SolverMethod::GaussSeidel;
        let g = solve_vi(&p, &cfg).unwrap();
        assert!(a.converged && g.converged);
        for (x, y) in a.u.iter().zip(&g.u) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn two_dimensional_solve() {
        let n = 16;
        let phi: Vec<f64> = (0..n * n)
            .map(|p| {
                let x = grid_coordinate(p, 0, 2, n);
                let y = grid_coordinate(p, 1, 2, n);
                0.3 * (2.0 * std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).cos()
            })
            .collect();
        let p = ObstacleProblem::laplace(2, n, vec![0.1; n * n], phi).unwrap();
        let mut cfg = SolverConfig::default();
        let a = solve_vi(&p, &cfg).unwrap();
        assert!(a.converged, "residual {}", a.kkt_residual);
        cfg.method = SolverMethod::GaussSeidel;
        let g = solve_vi(&p, &cfg).unwrap();
        for (x, y) in a.u.iter().zip(&g.u) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
    }

    #[test]
    fn nonlinear_operator_uses_fixed_point() {
        let n = 16;
        let op = TanhOperator {
            d: 1,
            n,
            linear: 1.0,
            tanh: 0.5,
            diffusion: 0.001,
        };
        let p = ObstacleProblem::new(1, n, Arc::new(op), vec![0.2; n], sine_obstacle(n)).unwrap();
        let s = solve_vi(&p, &SolverConfig::default()).unwrap();
        assert!(s.converged);
        assert!(s.kkt_residual <= 1e-9);
        let cfg = SolverConfig {
            method: SolverMethod::ActiveSet,
            ..SolverConfig::default()
        };
        assert!(solve_vi(&p, &cfg).is_err());
    }

    #[test]
    fn nonconvergence_is_reported() {
        let n = 64;
        let p = ObstacleProblem::laplace(1, n, vec![0.0; n], sine_obstacle(n)).unwrap();
        let cfg = SolverConfig {
            method: SolverMethod::GaussSeidel,
            tol: 1e-12,
            max_iter: 3,
        };
        let s = solve_vi(&p, &cfg).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
    }

    #[test]
    fn laplace_constants() {
        let op = LaplacePlusIdentity { d: 1, n: 16 };
        let (mono, lip) = sample_operator_constants(&op, 16, 50, 1);
        assert!(mono >= 1.0 - 1e-8);
        assert!(lip <= op.lipschitz() + 1e-8);
    }

    #[test]
    fn map_examples() {
        let map = ObstacleMap::standard(1, 64).unwrap();
        let zero = map.evaluate(&[0.0; 5]).unwrap();
        assert!(zero.iter().all(|x| x.abs() < 1e-12));
        let lifted = map.evaluate(&[0.7]).unwrap();
        assert_abs_diff_eq!(lifted[0], 0.7, epsilon = 1e-12);
        assert!(lifted[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn postprocess_examples() {
        assert_eq!(postprocess_feasible(&[1.0, 2.0], &[0.0, 1.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(postprocess_feasible(&[-1.0; 3], &[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(postprocess_feasible(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn certificate_examples() {
        let n = 64;
        let cfg = SolverConfig::default();
        let p1 = ObstacleProblem::laplace(1, n, vec![0.0; n], sine_obstacle(n)).unwrap();
        let same = perturbation_certificate(&p1, &p1, &cfg, 8, 1).unwrap();
        assert_eq!(same.solution_gap, 0.0);
        assert_eq!(same.projection_gap + same.source_gap + same.operator_gap, 0.0);
        let delta = 0.05;
        let p2 = p1.with_obstacle(p1.phi.iter().map(|x| x + delta).collect()).unwrap();
        let shifted = perturbation_certificate(&p1, &p2, &cfg, 8, 2).unwrap();
        assert!(shifted.projection_gap <= delta + 1e-10);
        assert!(shifted.projection_gap >= delta - 1e-10);
        let f2: Vec<f64> = (0..n).map(|m| 0.3 * (m as f64 * 0.2).cos()).collect();
        let p3 = ObstacleProblem::laplace(1, n, f2, p1.phi.clone()).unwrap();
        let forced = perturbation_certificate(&p1, &p3, &cfg, 8, 3).unwrap();
        assert!(forced.solution_gap <= forced.source_gap + 1e-8);
    }

    #[test]
    fn problem_file_roundtrip() {
        let file = ProblemFile {
            d: 1,
            n_grid: 8,
            operator: "laplace_plus_id".into(),
            f: Some(vec![0.0; 8]),
            phi: None,
            phi_coeffs: Some(vec![0.25]),
        };
        let json = serde_json::to_string(&file).unwrap();
        let back: ProblemFile = serde_json::from_str(&json).unwrap();
        let p = back.to_problem().unwrap();
        assert!(p.phi.iter().all(|x| (x - 0.25).abs() < 1e-14));
        let bad = ProblemFile { phi: Some(vec![0.0; 8]), ..file };
        assert!(bad.to_problem().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn obstacle(c: &[f64], n: usize) -> Vec<f64> {
            RieszBasis::fourier_sobolev(1, n, 1.0).unwrap().decode(c).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn feasible_and_complementary(c in proptest::collection::vec(-1.0f64..1.0, 1..12), fval in -1.0f64..1.0) {
                let n = 64;
                let p = ObstacleProblem::laplace(1, n, vec![fval; n], obstacle(&c, n)).unwrap();
                let s = solve_vi(&p, &SolverConfig::default()).unwrap();
                prop_assert!(s.converged);
                prop_assert!(s.kkt_residual <= 1e-9);
                prop_assert!(s.u.iter().zip(&p.phi).all(|(u, f)| *u >= f - 1e-10));
            }

            #[test]
            fn comparison_principle(c in proptest::collection::vec(-1.0f64..1.0, 1..8), lift in 0.0f64..0.5) {
                let n = 64;
                let phi1 = obstacle(&c, n);
                let phi2: Vec<f64> = phi1.iter().enumerate().map(|(i, x)| x + lift * (1.0 + (i as f64).sin()) / 2.0).collect();
                let cfg = SolverConfig::default();
                let u1 = solve_vi(&ObstacleProblem::laplace(1, n, vec![0.0; n], phi1).unwrap(), &cfg).unwrap().u;
                let u2 = solve_vi(&ObstacleProblem::laplace(1, n, vec![0.0; n], phi2).unwrap(), &cfg).unwrap().u;
                prop_assert!(u1.iter().zip(&u2).all(|(a, b)| *a <= b + 1e-9));
            }

            #[test]
            fn solution_minimizes_energy(c in proptest::collection::vec(-1.0f64..1.0, 1..8), seed in any::<u64>()) {
                let n = 32;
                let p = ObstacleProblem::laplace(1, n, vec![0.3; n], obstacle(&c, n)).unwrap();
                let s = solve_vi(&p, &SolverConfig::default()).unwrap();
                let op = LaplacePlusIdentity { d: 1, n };
                let energy = |v: &[f64]| {
                    let mut av = vec![0.0; n];
                    op.apply(v, &mut av);
                    0.5 * dot(&av, v) - dot(&p.f, v)
                };
                let base = energy(&s.u);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..20 {
                    let v: Vec<f64> = s.u.iter().zip(&p.phi).map(|(u, f)| (u + 0.01 * gaussian(&mut rng)).max(*f)).collect();
                    prop_assert!(energy(&v) >= base - 1e-9);
                }
            }
        }
    }
}
