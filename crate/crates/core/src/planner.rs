//! Truncation indices, per-component tolerances and parameter-count
//! exponents.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{ceil_tol, zeta};
use crate::weights::{SmoothnessParams, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Uniform,
    PerComponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConstants {
    /// Constant in the combined truncation bound.
    pub c_trunc: f64,
    /// Envelope constant, `w_i <= c0 i^{-1+eps0}`.
    pub c0: f64,
    pub delta0: f64,
    pub eps0: f64,
    /// Lipschitz-type constant scaling the surrogate tolerances.
    pub c_lg: f64,
    /// Summation constant paired with `c_lg`.
    pub c_delta0: f64,
}

impl PlannerConstants {
    /// Unit constants with `delta0` and `eps0` at a tenth of their range.
    pub fn defaults(params: &SmoothnessParams) -> Self {
        let delta0 = delta0_range(params) / 10.0;
        let eps0 = delta0 / (params.s.max(params.t) - 0.5 - delta0) / 10.0;
        PlannerConstants {
            c_trunc: 1.0,
            c0: 1.0,
            delta0,
            eps0,
            c_lg: 1.0,
            c_delta0: 1.0,
        }
    }

    /// Replace `c_delta0` by `c0^{1/2+delta0} zeta(1+2 delta0)^{1/2}`.
    pub fn with_zeta_factor(mut self) -> Self {
        self.c_delta0 = self.c0.powf(0.5 + self.delta0) * zeta(1.0 + 2.0 * self.delta0).sqrt();
        self
    }

    pub fn validate(&self, params: &SmoothnessParams) -> Result<()> {
        for (name, v) in [
            ("c_trunc", self.c_trunc),
            ("c_lg", self.c_lg),
            ("c_delta0", self.c_delta0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive")));
            }
        }
        if !(self.c0 >= 1.0) {
            return Err(invalid("c0 must be at least 1"));
        }
        let hi = delta0_range(params);
        if !(self.delta0 > 0.0 && self.delta0 < hi) {
            return Err(invalid(format!("delta0 = {} must lie in (0, {hi})", self.delta0)));
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return Err(invalid(format!("eps0 = {} must lie in (0, 1)", self.eps0)));
        }
        Ok(())
    }
}

/// Upper end of the admissible `delta0` interval.
pub fn delta0_range(params: &SmoothnessParams) -> f64 {
    if params.t > 0.5 {
        (params.s.min(params.t)) / 2.0 - 0.25
    } else {
        params.s / 2.0 - 0.25
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps = {eps} must lie in (0, 1]")));
    }
    Ok(())
}

pub fn plan_output_n(eps: f64, params: &SmoothnessParams, consts: &PlannerConstants) -> Result<usize> {
    check_eps(eps)?;
    if !(params.t > 0.0) {
        return Err(invalid("output truncation needs t > 0"));
    }
    if !(consts.eps0 > 0.0 && consts.eps0 < 1.0) {
        return Err(invalid("eps0 must lie in (0, 1)"));
    }
    let base = eps / (4.0 * consts.c_trunc * consts.c0.powf(params.t));
    let n = base.powf(-1.0 / (params.t * (1.0 - consts.eps0)));
    Ok(ceil_tol(n).max(1.0) as usize)
}

pub fn plan_input_m_uniform(eps: f64, params: &SmoothnessParams, consts: &PlannerConstants) -> Result<usize> {
    check_eps(eps)?;
    let rate = params.s - 0.5 - 2.0 * consts.delta0;
    if !(consts.delta0 > 0.0) || !(rate > 0.0) {
        return Err(invalid(format!("delta0 = {} leaves no input rate", consts.delta0)));
    }
    let base = eps / (4.0 * consts.c_trunc * consts.c0.powf(params.s - 0.5 - consts.delta0));
    Ok(ceil_tol(base.powf(-1.0 / rate)).max(1.0) as usize)
}

/// `M_j` for 1-based component `j`.
pub fn plan_input_m_component(
    eps: f64,
    j: usize,
    params: &SmoothnessParams,
    consts: &PlannerConstants,
) -> Result<usize> {
    check_eps(eps)?;
    if !(params.t > 0.5) {
        return Err(invalid("per-component input truncation needs t > 1/2"));
    }
    if j == 0 {
        return Err(invalid("component indices start at 1"));
    }
    let hi = params.s.min(params.t) / 2.0 - 0.25;
    if !(consts.delta0 > 0.0 && consts.delta0 < hi) {
        return Err(invalid(format!("delta0 = {} must lie in (0, {hi})", consts.delta0)));
    }
    let d0 = consts.delta0;
    let base = eps / (4.0 * consts.c_trunc)
        * (j as f64).powf(params.t - 0.5 - 2.0 * d0)
        * consts.c0.powf(params.t + params.s - 1.0 - 2.0 * d0);
    let m = base.powf(-1.0 / (params.s - 0.5 - 2.0 * d0));
    Ok(ceil_tol(m).max(1.0) as usize)
}

pub fn component_tolerances(
    eps: f64,
    n: usize,
    params: &SmoothnessParams,
    consts: &PlannerConstants,
    w: &WeightSequence,
) -> Vec<f64> {
    let expo = -(params.t - 0.5 - consts.delta0);
    (1..=n)
        .map(|j| (w.at(j).powf(expo) * eps / (2.0 * consts.c_lg * consts.c_delta0)).min(1.0))
        .collect()
}

pub fn strategy_select(params: &SmoothnessParams) -> Strategy {
    if params.t > 0.5 {
        Strategy::PerComponent
    } else {
        Strategy::Uniform
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    pub eps_j: Vec<f64>,
    pub strategy: Strategy,
    pub constants: PlannerConstants,
}

impl TruncationPlan {
    pub fn max_input_dim(&self) -> usize {
        self.m.iter().copied().max().unwrap_or(0)
    }
}

/// Plans longer than this are rejected instead of materialized.
pub const MAX_PLAN_COMPONENTS: usize = 1 << 24;

/// Full plan: `N`, the input truncations and the component tolerances.
pub fn plan(
    eps: f64,
    params: &SmoothnessParams,
    consts: &PlannerConstants,
    w: &WeightSequence,
) -> Result<TruncationPlan> {
    params.validate()?;
    consts.validate(params)?;
    let n = plan_output_n(eps, params, consts)?;
    if n > MAX_PLAN_COMPONENTS {
        return Err(invalid(format!("plan needs {n} output components")));
    }
    let strategy = strategy_select(params);
    let m = match strategy {
        Strategy::Uniform => vec![plan_input_m_uniform(eps, params, consts)?; n],
        Strategy::PerComponent => (1..=n)
            .map(|j| plan_input_m_component(eps, j, params, consts))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(TruncationPlan {
        n,
        m,
        eps_j: component_tolerances(eps, n, params, consts, w),
        strategy,
        constants: *consts,
    })
}

/// Parameter-count metadata for a surrogate architecture: at most
/// `O(d^alpha eps^-beta (1 + log d + |log eps|)^kappa)` parameters for an
/// `L2` accuracy `eps` on Lipschitz functions of `d` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityModel {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub label: String,
    /// False when the count grows exponentially in `d`.
    pub dimension_robust: bool,
}

impl ComplexityModel {
    pub fn new(alpha: f64, beta: f64, kappa: f64, label: impl Into<String>) -> Result<Self> {
        if !(alpha >= 1.0) || !(beta >= 0.0) || !(kappa >= 0.0) {
            return Err(invalid("need alpha >= 1 and beta, kappa >= 0"));
        }
        Ok(ComplexityModel {
            alpha,
            beta,
            kappa,
            label: label.into(),
            dimension_robust: true,
        })
    }

    /// Floor / exponential / sine activations.
    pub fn fles() -> Self {
        Self::new(1.0, 0.0, 1.0, "FLES").expect("valid preset")
    }

    /// ReLU and sine activations.
    pub fn deep_fourier() -> Self {
        Self::new(1.0, 0.0, 2.0, "Deep Fourier").expect("valid preset")
    }

    /// Plain ReLU feedforward nets in dimension `d`.
    pub fn relu_feedforward(d: usize) -> Self {
        ComplexityModel {
            alpha: 2.0,
            beta: d as f64,
            kappa: 2.0,
            label: "Feedforward ReLU".into(),
            dimension_robust: false,
        }
    }

    /// ReLU NestNets of height `h` in dimension `d`.
    pub fn nestnet(h: usize, d: usize) -> Self {
        let h1 = (h + 1) as f64;
        ComplexityModel {
            alpha: 2.0 + d as f64 / (2.0 * h1),
            beta: d as f64 / h1,
            kappa: 0.0,
            label: format!("NestNet (height {h})"),
            dimension_robust: false,
        }
    }
}

/// Exponent of `eps` in the parameter count of the assembled surrogate for
/// `gamma`-Hölder operators.
pub fn holder_exponent(params: &SmoothnessParams, model: &ComplexityModel, delta: f64) -> Result<f64> {
    if !(params.t > 0.0) {
        return Err(invalid("parameter count prediction needs t > 0"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    let (s, t, g) = (params.s, params.t, params.gamma);
    if !(g > 0.0 && g <= 1.0) {
        return Err(invalid("gamma must lie in (0, 1]"));
    }
    let input = -model.alpha / (g * g * (s - 0.5));
    Ok(if t <= 0.5 {
        input - (2.0 * g + model.beta) / (2.0 * g * t) - delta
    } else {
        input - 1.0 / t - model.beta / g - delta
    })
}

/// Same exponent written for Lipschitz operators.
pub fn lipschitz_exponent(params: &SmoothnessParams, model: &ComplexityModel, delta: f64) -> Result<f64> {
    if !(params.t > 0.0) {
        return Err(invalid("parameter count prediction needs t > 0"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    let (s, t) = (params.s, params.t);
    Ok(if t <= 0.5 {
        -model.alpha / (s - 0.5) - (2.0 + model.beta) / (2.0 * t) - delta
    } else {
        -model.alpha / (s - 0.5) - 1.0 / t - model.beta - delta
    })
}

/// `(exponent, C eps^exponent (1 + |log eps|)^{kappa/gamma})`.
pub fn predict_n_para(
    eps: f64,
    params: &SmoothnessParams,
    model: &ComplexityModel,
    delta: f64,
    constant: f64,
) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let e = holder_exponent(params, model, delta)?;
    let bound = constant * eps.powf(e) * (1.0 + eps.ln().abs()).powf(model.kappa / params.gamma);
    Ok((e, bound))
}

pub fn composition_lipschitz_bound(constants: &[f64]) -> Result<f64> {
    if constants.is_empty() {
        return Err(invalid("need at least one factor"));
    }
    if constants.iter().any(|c| !(*c >= 0.0)) {
        return Err(invalid("Lipschitz constants must be non-negative"));
    }
    Ok(constants.iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, t: f64) -> SmoothnessParams {
        SmoothnessParams::new(s, t, 1.0, 1.0).unwrap()
    }

    fn unit(delta0: f64, eps0: f64) -> PlannerConstants {
        PlannerConstants {
            c_trunc: 1.0,
            c0: 1.0,
            delta0,
            eps0,
            c_lg: 1.0,
            c_delta0: 1.0,
        }
    }

    #[test]
    fn output_index_examples() {
        assert_eq!(plan_output_n(1.0, &params(1.5, 0.5), &unit(0.1, 0.1)).unwrap(), 22);
        assert_eq!(plan_output_n(1.0, &params(1.5, 1.0), &unit(0.1, 1e-12)).unwrap(), 4);
        assert!(plan_output_n(1.0, &params(1.5, 0.0), &unit(0.1, 0.1)).is_err());
        assert!(plan_output_n(0.0, &params(1.5, 1.0), &unit(0.1, 0.1)).is_err());
    }

    #[test]
    fn uniform_input_examples() {
        let p = params(1.5, 0.3);
        assert_eq!(plan_input_m_uniform(1.0, &p, &unit(0.1, 0.1)).unwrap(), 6);
        assert_eq!(plan_input_m_uniform(0.25, &p, &unit(0.1, 0.1)).unwrap(), 32);
        assert!(plan_input_m_uniform(1.0, &p, &unit(0.5, 0.1)).is_err());
    }

    #[test]
    fn per_component_examples() {
        let p = params(2.0, 1.0);
        let c = unit(0.1, 0.1);
        assert_eq!(plan_input_m_component(0.5, 1, &p, &c).unwrap(), 5);
        assert_eq!(plan_input_m_component(0.5, 1, &p, &c).unwrap(), plan_input_m_uniform(0.5, &p, &c).unwrap());
        let far = 2f64.powf(1.3 / 0.3).ceil() as usize * 64;
        assert_eq!(plan_input_m_component(0.5, far, &p, &c).unwrap(), 1);
        assert!(plan_input_m_component(0.5, 1, &params(2.0, 0.5), &c).is_err());
    }

    #[test]
    fn tolerance_examples() {
        let w = WeightSequence::power(1.0).unwrap();
        let p = params(1.5, 0.0);
        let c = unit(0.1, 0.1);
        let e = component_tolerances(10.0 * 2.0, 5, &p, &c, &w);
        assert!(e.iter().all(|&x| x == 1.0));
        let e = component_tolerances(0.01, 6, &p, &c, &w);
        assert_eq!(e[0], 0.005);
        for j in 1..6 {
            let ratio = e[j] / e[0];
            assert!((ratio - ((j + 1) as f64).powf(-0.6)).abs() < 1e-14);
        }
    }

    #[test]
    fn strategy_boundary() {
        assert_eq!(strategy_select(&params(1.5, 0.3)), Strategy::Uniform);
        assert_eq!(strategy_select(&params(1.5, 0.5)), Strategy::Uniform);
        assert_eq!(strategy_select(&params(1.5, 1.0)), Strategy::PerComponent);
    }

    #[test]
    fn exponent_examples() {
        let m = ComplexityModel::new(1.0, 0.0, 0.0, "test").unwrap();
        let tiny = 1e-15;
        let e1 = holder_exponent(&params(1.5, 1.0), &m, tiny).unwrap();
        let e2 = holder_exponent(&params(1.5, 0.5), &m, tiny).unwrap();
        assert!((e1 + 2.0).abs() < 1e-12);
        assert!((e2 + 3.0).abs() < 1e-12);
        assert!(holder_exponent(&params(1.5, 0.0), &m, tiny).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(composition_lipschitz_bound(&[2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(composition_lipschitz_bound(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!(composition_lipschitz_bound(&[]).is_err());
    }

    #[test]
    fn plan_json_shape() {
        let p = params(1.5, 1.0);
        let c = PlannerConstants::defaults(&p);
        let plan = plan(0.5, &p, &c, &WeightSequence::power(1.0).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&plan).unwrap();
        for key in ["N", "M", "eps_j", "strategy", "constants"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["strategy"], "per_component");
    }

    #[test]
    fn default_constants_are_admissible() {
        for &(s, t) in &[(0.6, 0.0), (1.5, 0.3), (1.5, 1.0), (3.0, 0.7), (1.0, 5.0)] {
            let p = params(s, t);
            PlannerConstants::defaults(&p).validate(&p).unwrap();
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn indices_monotone_in_eps(s in 0.8f64..3.0, t in 0.55f64..2.0, eps in 0.01f64..1.0) {
                let p = params(s, t);
                let c = PlannerConstants::defaults(&p);
                let half = eps / 2.0;
                prop_assert!(plan_output_n(half, &p, &c).unwrap() >= plan_output_n(eps, &p, &c).unwrap());
                prop_assert!(plan_input_m_uniform(half, &p, &c).unwrap() >= plan_input_m_uniform(eps, &p, &c).unwrap());
                for j in [1usize, 3, 10] {
                    prop_assert!(plan_input_m_component(half, j, &p, &c).unwrap() >= plan_input_m_component(eps, j, &p, &c).unwrap());
                }
            }

            #[test]
            fn per_component_plan_is_non_increasing(s in 0.8f64..3.0, t in 0.55f64..2.0, eps in 0.05f64..1.0) {
                let p = params(s, t);
                let c = PlannerConstants::defaults(&p);
                let plan = plan(eps, &p, &c, &WeightSequence::power(1.0).unwrap()).unwrap();
                prop_assert!(plan.m.windows(2).all(|w| w[1] <= w[0]));
                prop_assert!(plan.eps_j.iter().all(|&e| e > 0.0 && e <= 1.0));
            }

            #[test]
            fn uniform_plan_is_constant(s in 0.8f64..3.0, t in 0.25f64..0.5, eps in 0.2f64..1.0) {
                let p = params(s, t);
                let c = PlannerConstants::defaults(&p);
                let plan = plan(eps, &p, &c, &WeightSequence::power(1.0).unwrap()).unwrap();
                prop_assert!(plan.m.iter().all(|&m| m == plan.m[0]));
                prop_assert!(plan.eps_j.windows(2).all(|w| w[1] <= w[0]));
            }

            #[test]
            fn holder_reduces_to_lipschitz(s in 0.6f64..4.0, t in 0.05f64..3.0, alpha in 1.0f64..3.0, beta in 0.0f64..3.0, delta in 1e-6f64..0.1) {
                let p = params(s, t);
                let m = ComplexityModel::new(alpha, beta, 1.0, "x").unwrap();
                let a = holder_exponent(&p, &m, delta).unwrap();
                let b = lipschitz_exponent(&p, &m, delta).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }
}
