//! Monte Carlo error estimates, truncation-rate and universality studies,
//! and the experiment configuration driving the command-line tool.

pub mod config;
pub mod examples;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::project;
use crate::error::{invalid, Result};
use crate::numeric::ols;
use crate::planner::{PlannerConstants, Strategy, TruncationPlan};
use crate::surrogate::{
    fit_components, FitOptions, LipschitzOperator, OperatorSurrogate, OutputNorm, MAX_GRID_DIM,
};
use crate::weights::SamplingLaw;

pub use examples::{HsStudy, OperatorStudy, TruncationStudy};

/// Points below this are treated as exact zeros when fitting slopes.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Allowed slack between fitted and predicted slopes.
pub const SLOPE_TOLERANCE: f64 = 0.25;

pub fn sample_inputs(law: &SamplingLaw, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(invalid("need at least one sample"));
    }
    Ok(law.samples(n))
}

/// Pads the shorter vector with zeros.
fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Root-mean-square of `||truth(x) - approx(x)||` over `n` draws from `law`
/// and the 95% half-width from the delta method on the squared errors.
pub fn mc_l2_error(
    truth: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    approx: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    law: &SamplingLaw,
    n: usize,
    norm: &OutputNorm,
) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(invalid("need at least two samples"));
    }
    let sq: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let x = law.sample(k);
            norm.norm(&diff(&truth(&x), &approx(&x))).powi(2)
        })
        .collect();
    Ok(crate::surrogate::rms_with_ci(&sq))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    /// Keep `N` output coefficients.
    Output,
    /// Read `M` input coefficients.
    Input,
}

/// How a fitted slope is judged against the predicted one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateCheck {
    /// The prediction is an upper bound: decay at least as fast, up to the tolerance.
    AtLeast,
    /// The prediction is exact: match it within the tolerance.
    Matches,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub mode: RateMode,
    pub indices: Vec<usize>,
    /// Max over samples at each index.
    pub errors: Vec<f64>,
    /// Bootstrap 95% interval of the maximum.
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub predicted: f64,
    pub check: RateCheck,
    pub pass: bool,
    pub below_noise_floor: bool,
    pub samples: usize,
}

impl RateReport {
    /// Fit a slope through `(index, error)` and judge it.
    pub fn from_errors(
        mode: RateMode,
        indices: Vec<usize>,
        errors: Vec<f64>,
        ci: (Vec<f64>, Vec<f64>),
        predicted: f64,
        check: RateCheck,
        samples: usize,
    ) -> Self {
        let (xs, ys): (Vec<f64>, Vec<f64>) = indices
            .iter()
            .zip(&errors)
            .filter(|(_, e)| **e >= NOISE_FLOOR)
            .map(|(i, e)| ((*i as f64).log10(), e.log10()))
            .unzip();
        let fit = ols(&xs, &ys).filter(|(s, c)| s.is_finite() && c.is_finite());
        let (slope, intercept, below) = match fit {
            Some((s, c)) => (s, c, false),
            None => (0.0, 0.0, true),
        };
        let pass = !below
            && match check {
                RateCheck::AtLeast => slope <= predicted + SLOPE_TOLERANCE,
                RateCheck::Matches => (slope - predicted).abs() <= SLOPE_TOLERANCE,
            };
        RateReport {
            mode,
            indices,
            errors,
            ci_lo: ci.0,
            ci_hi: ci.1,
            slope,
            intercept,
            predicted,
            check,
            pass,
            below_noise_floor: below,
            samples,
        }
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "index,error,ci_lo,ci_hi")?;
        for k in 0..self.indices.len() {
            writeln!(
                out,
                "{},{:e},{:e},{:e}",
                self.indices[k], self.errors[k], self.ci_lo[k], self.ci_hi[k]
            )?;
        }
        writeln!(out, "# slope={}", self.slope)?;
        writeln!(out, "# predicted={}", self.predicted)?;
        if self.below_noise_floor {
            writeln!(out, "# below noise floor")?;
        }
        writeln!(out, "# pass={}", self.pass)
    }
}

/// Percentile bootstrap of the sample maximum.
fn bootstrap_max(values: &[f64], resamples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = values.len();
    let mut maxima: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..n)]).fold(0.0, f64::max))
        .collect();
    maxima.sort_by(f64::total_cmp);
    let at = |q: f64| maxima[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    (at(0.025), at(0.975))
}

fn check_indices(indices: &[usize]) -> Result<()> {
    if indices.len() < 4 {
        return Err(invalid("rate studies need at least four indices"));
    }
    if indices[0] == 0 || indices.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("indices must be positive and strictly increasing"));
    }
    Ok(())
}

/// Max-over-samples truncation error at each index with a fitted log-log slope.
pub fn truncation_rate_study(
    study: &dyn TruncationStudy,
    indices: &[usize],
    mode: RateMode,
    samples: usize,
) -> Result<RateReport> {
    check_indices(indices)?;
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let law = study.law();
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| study.errors(&law.sample(k), indices, mode))
        .collect::<Result<_>>()?;
    let column = |i: usize| per_sample.iter().map(|e| e[i]).collect::<Vec<f64>>();
    let errors: Vec<f64> = (0..indices.len()).map(|i| column(i).into_iter().fold(0.0, f64::max)).collect();
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..indices.len())
        .map(|i| bootstrap_max(&column(i), 200, law.seed ^ i as u64))
        .unzip();
    Ok(RateReport::from_errors(
        mode,
        indices.to_vec(),
        errors,
        (lo, hi),
        study.predicted_slope(mode),
        study.rate_check(),
        samples,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityRow {
    pub n: usize,
    pub sup_error: f64,
    /// Aggregate held-out component error of the surrogate.
    pub component_error: f64,
    pub parameters: usize,
    pub tolerances_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub rows: Vec<UniversalityRow>,
    /// The last level attempted exceeded the grid dimension cap.
    pub truncated_by_cap: bool,
    pub final_below_first: bool,
    /// Every step increases by no more than [`universality_allowance`].
    pub non_increasing_within_noise: bool,
}

impl UniversalityReport {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.final_below_first && self.non_increasing_within_noise
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "n,sup_error,component_error,parameters,tolerances_met")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{},{}",
                r.n, r.sup_error, r.component_error, r.parameters, r.tolerances_met
            )?;
        }
        if self.truncated_by_cap {
            writeln!(out, "# truncated at grid dimension cap {MAX_GRID_DIM}")?;
        }
        writeln!(out, "# pass={}", self.pass())
    }
}

/// How much the sup error may grow from level `n` to `n + 1` and still
/// count as flat: the accuracy budget of the finer surrogate,
/// `sqrt(n + 1) 2^{-(n + 1)}`.
pub fn universality_allowance(n: usize) -> f64 {
    ((n + 1) as f64).sqrt() * 0.5f64.powi(n as i32 + 1)
}

/// The surrogate of level `n`: `n` components, each on the first `n`
/// inputs, fitted to held-out accuracy `2^{-n}`.
pub fn level_surrogate(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    n: usize,
    fit: &FitOptions,
) -> Result<OperatorSurrogate> {
    let target = 0.5f64.powi(n as i32);
    let components: Vec<usize> = (1..=n).collect();
    let fits = fit_components(op, law, n, &components, &vec![target; n], fit)?;
    Ok(OperatorSurrogate {
        plan: TruncationPlan {
            n,
            m: vec![n; n],
            eps_j: vec![target; n],
            strategy: Strategy::Uniform,
            constants: PlannerConstants::defaults(&law.params),
        },
        components: fits,
        output_basis: None,
    })
}

/// Sup error over a fixed set of `compact` samples for each level in `levels`.
pub fn universality_study(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    levels: &[usize],
    compact: usize,
    fit: &FitOptions,
) -> Result<UniversalityReport> {
    if levels.is_empty() || levels[0] == 0 || levels.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("levels must be positive and increasing"));
    }
    let set = law.reseeded(law.seed ^ 0xc0de).samples(compact.max(1));
    let truth: Vec<Vec<f64>> = set
        .par_iter()
        .map(|x| op.evaluate(&project(x, op.input_dim)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut truncated = false;
    for &n in levels {
        if n > MAX_GRID_DIM || n > op.output_dim || n > op.input_dim.min(law.truncation_dim) {
            truncated = true;
            break;
        }
        let s = level_surrogate(op, law, n, fit)?;
        let sup = set
            .iter()
            .zip(&truth)
            .map(|(x, y)| crate::numeric::norm2(&diff(y, &s.evaluate(x))))
            .fold(0.0, f64::max);
        rows.push(UniversalityRow {
            n,
            sup_error: sup,
            component_error: s.aggregate_component_error(),
            parameters: s.total_parameters(),
            tolerances_met: s.all_tolerances_met(),
        });
    }
    let final_below_first = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => rows.len() == 1 || b.sup_error < a.sup_error || a.sup_error <= NOISE_FLOOR,
        _ => false,
    };
    let flat = rows
        .windows(2)
        .all(|p| p[1].sup_error <= p[0].sup_error + universality_allowance(p[0].n));
    Ok(UniversalityReport {
        rows,
        truncated_by_cap: truncated,
        final_below_first,
        non_increasing_within_noise: flat,
    })
}

/// Smallest `C` with `err(N) <= C w_{N+1}^t` and `err(M) <= C w_{M+1}^{s-1/2-delta0}`
/// over the measured points.
pub fn calibrate_truncation_constant(
    output: &RateReport,
    input: &RateReport,
    law: &SamplingLaw,
    delta0: f64,
) -> f64 {
    let p = &law.params;
    let w = &law.weights;
    let out = output
        .indices
        .iter()
        .zip(&output.errors)
        .map(|(&n, e)| e / w.at(n + 1).powf(p.t));
    let inp = input
        .indices
        .iter()
        .zip(&input.errors)
        .map(|(&m, e)| e / w.at(m + 1).powf(p.s - 0.5 - delta0));
    out.chain(inp).fold(0.0, f64::max)
}

/// Lipschitz constant from independent pairs plus short segments
/// (`x` to `x + step (x' - x)`), which see local slopes.
pub fn calibrate_lipschitz(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    pairs: usize,
    norm: &OutputNorm,
) -> Result<f64> {
    let m = op.input_dim.min(law.truncation_dim);
    let list: Vec<(Vec<f64>, Vec<f64>)> = (0..pairs as u64)
        .flat_map(|k| {
            let x = project(&law.sample(2 * k), m);
            let y = project(&law.sample(2 * k + 1), m);
            let near: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + 0.05 * (b - a)).collect();
            [(x.clone(), y), (x, near)]
        })
        .collect();
    let ratios: Vec<f64> = list
        .par_iter()
        .map(|pair| crate::surrogate::lipschitz_ratio_on_pairs(op, std::slice::from_ref(pair), norm))
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `sum_{i > n} w_i^{2s}` scaled by `r^2 / 3`: the expected squared norm of
/// the coordinates a truncated sample leaves out.
pub fn neglected_tail_sq(law: &SamplingLaw, n: usize) -> Result<f64> {
    let q = 2.0 * law.params.s;
    let total = law.weights.power_sum(q, crate::weights::DEFAULT_TAIL_DIM)?.value;
    let head = law.weights.partial_sum(q, n);
    Ok(law.params.r.powi(2) / 3.0 * (total - head).max(0.0))
}
