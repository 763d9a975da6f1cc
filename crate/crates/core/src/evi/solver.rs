//! Solvers for the discrete obstacle problem
//! `u >= phi, Au >= f, (Au - f)(u - phi) = 0`.

use serde::{Deserialize, Serialize};

use super::{MonotoneOperator, ObstacleProblem};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Active set for `-Laplace + I`, projected fixed point otherwise.
    #[default]
    Auto,
    /// Primal-dual active set with exact inner solves.
    ActiveSet,
    /// Projected Gauss-Seidel, lexicographic sweeps.
    GaussSeidel,
    /// `u <- max(phi, u - tau (Au - f))` with `tau = ell / L^2`.
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolverMethod::Auto,
            tol: 1e-9,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViSolution {
    pub u: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `|| min(Au - f, u - phi) ||_inf`.
pub fn kkt_residual(op: &dyn MonotoneOperator, u: &[f64], f: &[f64], phi: &[f64]) -> f64 {
    let mut au = vec![0.0; u.len()];
    op.apply(u, &mut au);
    au.iter()
        .zip(f)
        .zip(u.iter().zip(phi))
        .map(|((a, fi), (ui, pi))| (a - fi).min(ui - pi).abs())
        .fold(0.0, f64::max)
}

pub fn solve_vi(problem: &ObstacleProblem, config: &SolverConfig) -> Result<ViSolution> {
    if !(config.tol > 0.0) {
        return Err(invalid("solver tolerance must be positive"));
    }
    let laplace = problem.operator.laplace_grid();
    let method = match (config.method, laplace) {
        (SolverMethod::Auto, Some(_)) => SolverMethod::ActiveSet,
        (SolverMethod::Auto, None) => SolverMethod::FixedPoint,
        (m @ (SolverMethod::ActiveSet | SolverMethod::GaussSeidel), None) => {
            return Err(invalid(format!("{m:?} needs the -Laplace + I operator")))
        }
        (m, _) => m,
    };
    Ok(match method {
        SolverMethod::ActiveSet => active_set(problem, config),
        SolverMethod::GaussSeidel => gauss_seidel(problem, config),
        _ => fixed_point(problem, config),
    })
}

fn finish(problem: &ObstacleProblem, u: Vec<f64>, iterations: usize, tol: f64, settled: bool) -> ViSolution {
    let kkt = kkt_residual(problem.operator.as_ref(), &u, &problem.f, &problem.phi);
    ViSolution {
        u,
        kkt_residual: kkt,
        iterations,
        converged: settled && kkt <= tol,
    }
}

fn fixed_point(problem: &ObstacleProblem, config: &SolverConfig) -> ViSolution {
    let op = problem.operator.as_ref();
    let tau = op.strong_monotonicity() / op.lipschitz().powi(2);
    let mut u: Vec<f64> = problem.phi.iter().map(|p| p.max(0.0)).collect();
    let mut au = vec![0.0; u.len()];
    for it in 1..=config.max_iter {
        op.apply(&u, &mut au);
        let mut kkt = 0.0f64;
        for i in 0..u.len() {
            let r = au[i] - problem.f[i];
            kkt = kkt.max(r.min(u[i] - problem.phi[i]).abs());
            u[i] = (u[i] - tau * r).max(problem.phi[i]);
        }
        if kkt <= config.tol {
            // The residual above belongs to the previous iterate; recheck.
            let sol = finish(problem, u, it, config.tol, true);
            if sol.converged {
                return sol;
            }
            u = sol.u;
        }
    }
    finish(problem, u, config.max_iter, config.tol, false)
}

fn gauss_seidel(problem: &ObstacleProblem, config: &SolverConfig) -> ViSolution {
    let (d, n) = problem.grid();
    let h2 = (1.0 / n as f64).powi(2);
    let diag = 2.0 * d as f64 / h2 + 1.0;
    let points = problem.phi.len();
    let mut u: Vec<f64> = problem.phi.iter().map(|p| p.max(0.0)).collect();
    let mut nbrs = Vec::with_capacity(2 * d);
    for it in 1..=config.max_iter {
        for i in 0..points {
            neighbours(i, d, n, &mut nbrs);
            let s: f64 = nbrs.iter().map(|&j| u[j]).sum();
            u[i] = ((problem.f[i] + s / h2) / diag).max(problem.phi[i]);
        }
        if it % 16 == 0 || it == config.max_iter {
            let kkt = kkt_residual(problem.operator.as_ref(), &u, &problem.f, &problem.phi);
            if kkt <= config.tol {
                return ViSolution {
                    u,
                    kkt_residual: kkt,
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    finish(problem, u, config.max_iter, config.tol, false)
}

/// Periodic neighbours of flat index `i` on an `n^d` grid.
pub(crate) fn neighbours(i: usize, d: usize, n: usize, out: &mut Vec<usize>) {
    out.clear();
    let mut stride = 1;
    for _ in 0..d {
        let coord = (i / stride) % n;
        let base = i - coord * stride;
        out.push(base + ((coord + n - 1) % n) * stride);
        out.push(base + ((coord + 1) % n) * stride);
        stride *= n;
    }
}

fn active_set(problem: &ObstacleProblem, config: &SolverConfig) -> ViSolution {
    let (d, n) = problem.grid();
    let op = problem.operator.as_ref();
    let points = problem.phi.len();
    let c = 2.0 * d as f64 * (n as f64).powi(2) + 1.0;
    let mut u = vec![0.0; points];
    let mut active = vec![false; points];
    let mut iterations = 0;
    // Start from the unconstrained solution.
    inner_solve(problem, &active, &mut u);
    for i in 0..points {
        active[i] = problem.phi[i] > u[i];
    }
    let mut au = vec![0.0; points];
    let cap = config.max_iter.min(10 * points + 10);
    let mut settled = false;
    while iterations < cap {
        iterations += 1;
        inner_solve(problem, &active, &mut u);
        op.apply(&u, &mut au);
        let mut changed = false;
        for i in 0..points {
            let lambda = if active[i] { au[i] - problem.f[i] } else { 0.0 };
            let next = lambda + c * (problem.phi[i] - u[i]) > 0.0;
            if next != active[i] {
                active[i] = next;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    finish(problem, u, iterations, config.tol, settled)
}

/// Solve `u = phi` on active nodes and `(Au)_i = f_i` elsewhere.
fn inner_solve(problem: &ObstacleProblem, active: &[bool], u: &mut [f64]) {
    let (d, n) = problem.grid();
    for i in 0..u.len() {
        if active[i] {
            u[i] = problem.phi[i];
        }
    }
    if d == 1 {
        tridiagonal_runs(n, &problem.f, &problem.phi, active, u);
    } else {
        conjugate_gradient(d, n, &problem.f, active, u);
    }
}

/// One-dimensional case: each maximal run of inactive nodes is a
/// tridiagonal Dirichlet problem; with no active node the system is cyclic.
fn tridiagonal_runs(n: usize, f: &[f64], phi: &[f64], active: &[bool], u: &mut [f64]) {
    let h2 = (1.0 / n as f64).powi(2);
    let diag = 2.0 + h2;
    let Some(anchor) = active.iter().position(|&a| a) else {
        let rhs: Vec<f64> = f.iter().map(|x| x * h2).collect();
        cyclic_solve(diag, &rhs, u);
        return;
    };
    let mut run: Vec<usize> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for step in 1..=n {
        let i = (anchor + step) % n;
        if !active[i] {
            run.push(i);
            continue;
        }
        if !run.is_empty() {
            rhs.clear();
            rhs.extend(run.iter().map(|&j| f[j] * h2));
            let left = (run[0] + n - 1) % n;
            let right = (run[run.len() - 1] + 1) % n;
            rhs[0] += phi[left];
            let last = rhs.len() - 1;
            rhs[last] += phi[right];
            let sol = thomas(diag, &rhs);
            for (k, &j) in run.iter().enumerate() {
                u[j] = sol[k];
            }
            run.clear();
        }
    }
}

/// Solves `-x_{i-1} + b x_i - x_{i+1} = r_i` with zero boundary values.
fn thomas(b: f64, r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    cp[0] = -1.0 / b;
    dp[0] = r[0] / b;
    for i in 1..m {
        let den = b + cp[i - 1];
        cp[i] = -1.0 / den;
        dp[i] = (r[i] + dp[i - 1]) / den;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = dp[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Periodic version of [`thomas`] via Sherman-Morrison.
fn cyclic_solve(b: f64, r: &[f64], x: &mut [f64]) {
    let m = r.len();
    if m == 1 {
        x[0] = r[0] / (b - 2.0);
        return;
    }
    if m == 2 {
        // Both neighbours coincide: [[b, -2], [-2, b]].
        let det = b * b - 4.0;
        x[0] = (b * r[0] + 2.0 * r[1]) / det;
        x[1] = (2.0 * r[0] + b * r[1]) / det;
        return;
    }
    // A = T + w w^T with corner entries -1 absorbed by gamma.
    let gamma = -b;
    let mut diag = vec![b; m];
    diag[0] = b - gamma;
    diag[m - 1] = b - 1.0 / gamma;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = -1.0 / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..m {
            let den = diag[i] + cp[i - 1];
            cp[i] = -1.0 / den;
            dp[i] = (rhs[i] + dp[i - 1]) / den;
        }
        let mut y = vec![0.0; m];
        y[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            y[i] = dp[i] - cp[i] * y[i + 1];
        }
        y
    };
    let y = solve(r);
    let mut w = vec![0.0; m];
    w[0] = gamma;
    w[m - 1] = -1.0;
    let z = solve(&w);
    // v = (1, 0, ..., 0, -1/gamma)
    let vy = y[0] - y[m - 1] / gamma;
    let vz = z[0] - z[m - 1] / gamma;
    let factor = vy / (1.0 + vz);
    for i in 0..m {
        x[i] = y[i] - factor * z[i];
    }
}

/// Conjugate gradients on the inactive nodes, active values held fixed.
fn conjugate_gradient(d: usize, n: usize, f: &[f64], active: &[bool], u: &mut [f64]) {
    let inv_h2 = (n as f64).powi(2);
    let diag = 2.0 * d as f64 * inv_h2 + 1.0;
    let points = u.len();
    let mut nbrs = Vec::with_capacity(2 * d);
    let apply_free = |x: &[f64], out: &mut [f64], nbrs: &mut Vec<usize>| {
        for i in 0..points {
            if active[i] {
                out[i] = 0.0;
                continue;
            }
            neighbours(i, d, n, nbrs);
            let s: f64 = nbrs.iter().filter(|&&j| !active[j]).map(|&j| x[j]).sum();
            out[i] = diag * x[i] - inv_h2 * s;
        }
    };
    let mut b = vec![0.0; points];
    for i in 0..points {
        if active[i] {
            continue;
        }
        neighbours(i, d, n, &mut nbrs);
        let fixed: f64 = nbrs.iter().filter(|&&j| active[j]).map(|&j| u[j]).sum();
        b[i] = f[i] + inv_h2 * fixed;
    }
    let mut x: Vec<f64> = (0..points).map(|i| if active[i] { 0.0 } else { u[i] }).collect();
    let mut ax = vec![0.0; points];
    apply_free(&x, &mut ax, &mut nbrs);
    let mut r: Vec<f64> = (0..points).map(|i| b[i] - ax[i]).collect();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let bnorm: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut ap = vec![0.0; points];
    for _ in 0..(20 * points).max(100) {
        if rr.sqrt() <= 1e-15 * bnorm * diag {
            break;
        }
        apply_free(&p, &mut ap, &mut nbrs);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..points {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..points {
            p[i] = r[i] + beta * p[i];
        }
    }
    for i in 0..points {
        if !active[i] {
            u[i] = x[i];
        }
    }
}
