//! Experiment configuration and the end-to-end drivers behind the CLI.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::examples::{calculus_operator, evi_operator, HsStudy, OperatorStudy, TruncationStudy, MAX_HS_SIZE};
use super::{calibrate_lipschitz, calibrate_truncation_constant, mc_l2_error, truncation_rate_study, RateCheck, RateMode};
use crate::basis::project;
use crate::error::{invalid, Error, Result};
use crate::hs::{ScalarFn, SpectralFamily};
use crate::planner::{plan, PlannerConstants, TruncationPlan};
use crate::surrogate::{assemble, AssemblyConfig, Backend, FitOptions, LipschitzOperator, OutputNorm};
use crate::weights::{SamplingLaw, SmoothnessParams, WeightSequence};

/// Default output directory when no explicit path is given.
pub const OUT_DIR_ENV: &str = "LIPDON_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    Evi,
    Hs,
    Synthetic,
}

impl std::str::FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evi" => Ok(ExampleKind::Evi),
            "hs" => Ok(ExampleKind::Hs),
            "synthetic" => Ok(ExampleKind::Synthetic),
            other => Err(Error::Parse(format!("unknown example {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub example: ExampleKind,
    pub params: SmoothnessParams,
    /// Input weights.
    pub weights: WeightSequence,
    /// Output weights for `Y^t`; the input weights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_weights: Option<WeightSequence>,
    /// Replaces the calibrated planner constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PlannerConstants>,
    pub samples: usize,
    pub seed: u64,
    /// Indices for rate studies and calibration.
    pub indices: Vec<usize>,
    /// Sample dimension; `4 x max(indices)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_dim: Option<usize>,
    pub d: usize,
    pub grid_size: usize,
    /// Pairs used for Lipschitz calibration.
    pub pairs: usize,
    pub holdout: usize,
    pub node_budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_example(example: ExampleKind) -> Self {
        let (s, t) = match example {
            ExampleKind::Evi => (1.5, 1.0),
            ExampleKind::Hs => (2.0, 1.0),
            // The identity gains no output smoothness.
            ExampleKind::Synthetic => (1.5, 0.0),
        };
        ExperimentConfig {
            example,
            params: SmoothnessParams { s, t, r: 1.0, gamma: 1.0 },
            weights: WeightSequence::Power { p: 1.0 },
            output_weights: None,
            constants: None,
            samples: 200,
            seed: 0,
            indices: vec![2, 4, 8, 16, 32],
            truncation_dim: None,
            d: 1,
            grid_size: 256,
            pairs: 500,
            holdout: crate::surrogate::DEFAULT_HOLDOUT,
            node_budget: FitOptions::default().node_budget,
            out: None,
        }
    }

    /// Reads a JSON config. Missing fields take the defaults of its `example`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let raw: serde_json::Value = serde_json::from_str(&text)?;
        let obj = raw
            .as_object()
            .ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
        let example: ExampleKind = match obj.get("example") {
            Some(v) => serde_json::from_value(v.clone())?,
            None => return Err(Error::Parse("config needs an \"example\" field".into())),
        };
        let mut merged = serde_json::to_value(Self::for_example(example))?;
        let target = merged.as_object_mut().expect("config serializes to an object");
        for (k, v) in obj {
            target.insert(k.clone(), v.clone());
        }
        let cfg: Self = serde_json::from_value(merged)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.weights.validate()?;
        if let Some(w) = &self.output_weights {
            w.validate()?;
        }
        if self.samples == 0 || self.pairs == 0 || self.holdout == 0 {
            return Err(invalid("sample counts must be at least 1"));
        }
        if self.indices.is_empty() || self.indices[0] == 0 {
            return Err(invalid("indices must be positive"));
        }
        Ok(())
    }

    pub fn output_weights(&self) -> WeightSequence {
        self.output_weights.clone().unwrap_or_else(|| self.weights.clone())
    }

    fn max_dim(&self) -> usize {
        match self.example {
            ExampleKind::Hs => MAX_HS_SIZE,
            _ => usize::MAX,
        }
    }

    pub fn truncation_dim(&self) -> usize {
        let wanted = self
            .truncation_dim
            .unwrap_or(4 * self.indices.iter().copied().max().unwrap_or(1));
        wanted.min(self.max_dim()).max(1)
    }

    pub fn law(&self) -> Result<SamplingLaw> {
        SamplingLaw::new(self.weights.clone(), self.params, self.truncation_dim(), self.seed)
    }

    /// The operator in coefficients: the obstacle map, the identity, or
    /// the identity calculus on the spectral family.
    pub fn operator(&self) -> Result<LipschitzOperator> {
        let dim = self.truncation_dim();
        match self.example {
            ExampleKind::Evi => Ok(evi_operator(self.d, self.grid_size, dim)?.0),
            ExampleKind::Synthetic => Ok(LipschitzOperator::identity(dim)),
            ExampleKind::Hs => {
                let family = SpectralFamily::new(dim, self.seed);
                Ok(LipschitzOperator::new(dim, dim * dim, move |x| {
                    family.matrix(x).transpose().as_slice().to_vec()
                })
                .with_lipschitz(1.0))
            }
        }
    }

    pub fn study(&self) -> Result<Box<dyn TruncationStudy>> {
        let law = self.law()?;
        let p = self.params;
        Ok(match self.example {
            ExampleKind::Evi => Box::new(OperatorStudy {
                op: self.operator()?,
                law,
                predicted_output: -p.t,
                predicted_input: -(p.s - 0.5),
                check: RateCheck::AtLeast,
                norm: OutputNorm::Plain,
            }),
            ExampleKind::Synthetic => Box::new(OperatorStudy {
                op: self.operator()?,
                law,
                predicted_output: -(p.s - 0.5),
                predicted_input: -(p.s - 0.5),
                check: RateCheck::Matches,
                norm: OutputNorm::Plain,
            }),
            ExampleKind::Hs => Box::new(HsStudy {
                family: SpectralFamily::new(self.truncation_dim(), self.seed),
                f: ScalarFn::Identity,
                law,
            }),
        })
    }

    pub fn fit_options(&self, backend: Backend) -> FitOptions {
        FitOptions {
            backend,
            seed: self.seed,
            holdout: self.holdout,
            node_budget: self.node_budget,
            ..FitOptions::default()
        }
    }

    /// `path` if given, else `name` under the configured or environment
    /// output directory.
    pub fn output_path(&self, name: &str) -> PathBuf {
        if let Some(p) = &self.out {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(name)
    }
}

/// Truncation and Lipschitz constants measured on an example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_trunc: f64,
    pub lipschitz: f64,
    pub output_slope: f64,
    pub input_slope: f64,
}

pub fn calibrate(cfg: &ExperimentConfig, op: &LipschitzOperator) -> Result<Calibration> {
    let study = cfg.study()?;
    let out = truncation_rate_study(study.as_ref(), &cfg.indices_with_one(), RateMode::Output, cfg.samples)?;
    let inp = truncation_rate_study(study.as_ref(), &cfg.indices_with_one(), RateMode::Input, cfg.samples)?;
    let law = cfg.law()?;
    let delta0 = PlannerConstants::defaults(&cfg.params).delta0;
    let norm = OutputNorm::Weighted {
        weights: cfg.output_weights(),
        t: cfg.params.t,
    };
    Ok(Calibration {
        c_trunc: calibrate_truncation_constant(&out, &inp, &law, delta0),
        lipschitz: calibrate_lipschitz(op, &law, cfg.pairs, &norm)?,
        output_slope: out.slope,
        input_slope: inp.slope,
    })
}

impl ExperimentConfig {
    /// Calibration also covers index 1, where the constants tend to peak.
    fn indices_with_one(&self) -> Vec<usize> {
        let mut v = vec![1];
        v.extend(self.indices.iter().copied().filter(|&i| i > 1));
        v
    }
}

/// Planner constants from a calibration: measured `C_trunc`, `c_lg` from the
/// measured Lipschitz constant, and the zeta summation factor.
pub fn calibrated_constants(cfg: &ExperimentConfig, cal: &Calibration, lambda_x: f64) -> PlannerConstants {
    let mut c = PlannerConstants::defaults(&cfg.params);
    c.c_trunc = cal.c_trunc;
    let w1 = cfg.weights.at(1);
    c.c_lg = cal.lipschitz * lambda_x.powf(1.5) * 2.0 * cfg.params.r * w1.powf(cfg.params.s);
    c.with_zeta_factor()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub eps: f64,
    pub backend: Backend,
    pub calibration: Calibration,
    pub plan: TruncationPlan,
    pub rmse: f64,
    pub ci: f64,
    /// Error of the truncated operator alone at the planned `(N, M_j)`.
    pub truncation_rmse: f64,
    pub truncation_ci: f64,
    /// `(sum_j e_j^2)^{1/2}` over held-out component errors.
    pub component_error: f64,
    pub total_parameters: usize,
    pub tolerances_met: bool,
    pub samples: usize,
    pub pass: bool,
    /// `rmse <= truncation + component + both intervals`.
    pub decomposition_holds: bool,
}

/// Calibrate, plan, assemble and measure the surrogate at accuracy `eps`.
pub fn run_end_to_end(cfg: &ExperimentConfig, eps: f64, backend: Backend) -> Result<RunReport> {
    cfg.validate()?;
    let op = cfg.operator()?;
    let law = cfg.law()?;
    let lambda_x = 1.0;
    let calibration = calibrate(cfg, &op)?;
    let consts = match cfg.constants {
        Some(c) => c,
        None => calibrated_constants(cfg, &calibration, lambda_x),
    };
    let out_w = cfg.output_weights();
    let truncation_plan = plan(eps, &cfg.params, &consts, &out_w)?;
    let surrogate = assemble(
        &op,
        &law,
        &truncation_plan,
        &AssemblyConfig {
            lipschitz: calibration.lipschitz,
            lambda_x,
            output_weights: out_w,
            fit: cfg.fit_options(backend),
        },
    )?;
    // Fresh samples, independent of calibration and fitting.
    let test_law = law.reseeded(cfg.seed ^ 0x7e57);
    let truth = |x: &[f64]| op.evaluate(&project(x, op.input_dim)).expect("fixed dimensions");
    let approx = |x: &[f64]| surrogate.evaluate(x);
    let (rmse, ci) = mc_l2_error(&truth, &approx, &test_law, cfg.samples.max(2), &OutputNorm::Plain)?;
    let truncated = |x: &[f64]| {
        let mut out = Vec::with_capacity(truncation_plan.n);
        let mut cache: Vec<(usize, Vec<f64>)> = Vec::new();
        for (j, &m) in truncation_plan.m.iter().enumerate() {
            if !cache.iter().any(|(cm, _)| *cm == m) {
                let y = op.evaluate(&project(&x[..m.min(x.len())], op.input_dim)).expect("fixed dimensions");
                cache.push((m, y));
            }
            let y = &cache.iter().find(|(cm, _)| *cm == m).expect("just inserted").1;
            out.push(y[j]);
        }
        out
    };
    let (trunc, trunc_ci) = mc_l2_error(&truth, &truncated, &test_law, cfg.samples.max(2), &OutputNorm::Plain)?;
    let component_error = surrogate.aggregate_component_error();
    let component_ci = surrogate
        .components
        .iter()
        .map(|c| c.ci_half_width.powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(RunReport {
        eps,
        backend,
        calibration,
        plan: truncation_plan,
        rmse,
        ci,
        truncation_rmse: trunc,
        truncation_ci: trunc_ci,
        component_error,
        total_parameters: surrogate.total_parameters(),
        tolerances_met: surrogate.all_tolerances_met(),
        samples: cfg.samples,
        pass: rmse <= eps + ci,
        decomposition_holds: rmse <= trunc + component_error + ci + trunc_ci + component_ci,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub pairs: usize,
    /// Calibrated operator constant, `Y^t` against `X`.
    pub lipschitz: f64,
    /// Per component `j`: largest quotient seen and the bound `L w_j^t sqrt(Lambda_X)`.
    pub components: Vec<(usize, f64, f64)>,
    pub pass: bool,
}

/// Calibrate the operator constant, then check the component quotients
/// on fresh pairs from the box of the first `m` inputs.
pub fn certify_components(cfg: &ExperimentConfig, pairs: usize, components: usize, m: usize) -> Result<CertifyReport> {
    let op = cfg.operator()?;
    let law = cfg.law()?;
    let norm = OutputNorm::Weighted {
        weights: cfg.output_weights(),
        t: cfg.params.t,
    };
    let lipschitz = calibrate_lipschitz(&op, &law, pairs, &norm)?;
    let check_law = law.reseeded(cfg.seed ^ 0xce47);
    let m = m.min(op.input_dim);
    let quotients: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..pairs as u64)
            .into_par_iter()
            .map(|k| {
                let x = project(&check_law.sample(2 * k), m);
                let y = project(&check_law.sample(2 * k + 1), m);
                let dx = crate::numeric::dist2(&x, &y);
                let (fx, fy) = (op.evaluate(&x)?, op.evaluate(&y)?);
                Ok((0..components.min(op.output_dim))
                    .map(|j| if dx < 1e-12 { 0.0 } else { (fx[j] - fy[j]).abs() / dx })
                    .collect())
            })
            .collect::<Result<_>>()?
    };
    let w = cfg.output_weights();
    let rows: Vec<(usize, f64, f64)> = (0..components.min(op.output_dim))
        .map(|j| {
            let worst = quotients.iter().map(|q| q[j]).fold(0.0, f64::max);
            (j + 1, worst, lipschitz * w.at(j + 1).powf(cfg.params.t))
        })
        .collect();
    let pass = rows.iter().all(|(_, q, b)| *q <= b * (1.0 + 1e-6));
    Ok(CertifyReport {
        pairs,
        lipschitz,
        components: rows,
        pass,
    })
}

/// Soft-threshold calculus on `size x size` matrices, exposed for the CLI.
pub fn soft_threshold_operator(size: usize, level: f64) -> Result<LipschitzOperator> {
    calculus_operator(size, ScalarFn::SoftThreshold(level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override_example_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"example":"synthetic","samples":7,"indices":[1,2,3,4]}"#).unwrap();
        let cfg = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(cfg.samples, 7);
        assert_eq!(cfg.params.s, 1.5);
        assert_eq!(cfg.truncation_dim(), 16);
        std::fs::write(&path, r#"{"example":"synthetic","bogus":1}"#).unwrap();
        assert!(ExperimentConfig::from_file(&path).is_err());
        std::fs::write(&path, r#"{"samples":3}"#).unwrap();
        assert!(ExperimentConfig::from_file(&path).is_err());
    }

    #[test]
    fn hs_dimension_is_capped() {
        let mut cfg = ExperimentConfig::for_example(ExampleKind::Hs);
        cfg.indices = vec![8, 16, 32, 64];
        assert_eq!(cfg.truncation_dim(), MAX_HS_SIZE);
    }

    #[test]
    fn synthetic_rates_match_prediction() {
        let mut cfg = ExperimentConfig::for_example(ExampleKind::Synthetic);
        cfg.samples = 50;
        let study = cfg.study().unwrap();
        for mode in [RateMode::Output, RateMode::Input] {
            let r = truncation_rate_study(study.as_ref(), &cfg.indices, mode, cfg.samples).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn synthetic_plan_is_rejected_without_output_smoothness() {
        let cfg = ExperimentConfig::for_example(ExampleKind::Synthetic);
        assert!(run_end_to_end(&cfg, 0.4, Backend::GridInterpolant).is_err());
    }
}
