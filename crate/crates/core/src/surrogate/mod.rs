//! Surrogates for Lipschitz maps between coefficient spaces.
//!
//! An operator `G` acting on encoded inputs is split into scalar component
//! maps `c -> G(c)_j`, each read off the leading `M_j` input coordinates.
//! Each component gets its own surrogate on the box `prod [-r w_i^s, r w_i^s]`,
//! and [`assemble`] stacks them back into an operator.

pub mod grid;
pub mod net;

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{project, BasisDescriptor};
use crate::error::{invalid, Error, Result};
use crate::numeric::{dist2, mean, norm2};
use crate::planner::TruncationPlan;
use crate::weights::{weighted_norm, SamplingLaw, SmoothnessParams, WeightSequence};

pub use grid::{GridModel, MAX_GRID_DIM};
pub use net::{NetModel, NetOptions};

/// Held-out sample count used when certifying a fit.
pub const DEFAULT_HOLDOUT: usize = 10_000;

type CoeffFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A map on coefficient vectors together with its (declared or measured)
/// Lipschitz constant.
#[derive(Clone)]
pub struct LipschitzOperator {
    pub input_dim: usize,
    pub output_dim: usize,
    pub lipschitz: Option<f64>,
    pub params: Option<SmoothnessParams>,
    eval: Arc<CoeffFn>,
}

impl fmt::Debug for LipschitzOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzOperator")
            .field("input_dim", &self.input_dim)
            .field("output_dim", &self.output_dim)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl LipschitzOperator {
    pub fn new(
        input_dim: usize,
        output_dim: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        LipschitzOperator {
            input_dim,
            output_dim,
            lipschitz: None,
            params: None,
            eval: Arc::new(eval),
        }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_params(mut self, params: SmoothnessParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, a: f64) -> Self {
        Self::new(dim, dim, move |x| x.iter().map(|v| a * v).collect()).with_lipschitz(a.abs())
    }

    /// Evaluate on `x`, zero-padding inputs shorter than `input_dim`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() > self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        let y = if x.len() == self.input_dim {
            (self.eval)(x)
        } else {
            (self.eval)(&project(x, self.input_dim))
        };
        if y.len() != self.output_dim {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim,
                got: y.len(),
            });
        }
        Ok(y)
    }

    /// `c -> G(c)_j` on the leading `m` inputs (`j` is 1-based).
    pub fn component(&self, j: usize, m: usize) -> Result<impl Fn(&[f64]) -> f64 + Send + Sync> {
        if j == 0 || j > self.output_dim {
            return Err(Error::OutOfRange(format!(
                "component {j} of an operator with {} outputs",
                self.output_dim
            )));
        }
        if m == 0 || m > self.input_dim {
            return Err(Error::OutOfRange(format!("{m} input coordinates")));
        }
        let op = self.clone();
        Ok(move |c: &[f64]| (op.eval)(&project(&c[..m.min(c.len())], op.input_dim))[j - 1])
    }
}

/// `specs[0]` is applied first. The declared constant is the product of the
/// factors when all of them are known.
pub fn compose(specs: &[LipschitzOperator]) -> Result<LipschitzOperator> {
    let first = specs.first().ok_or_else(|| invalid("nothing to compose"))?;
    for pair in specs.windows(2) {
        if pair[0].output_dim != pair[1].input_dim {
            return Err(Error::DimensionMismatch {
                expected: pair[1].input_dim,
                got: pair[0].output_dim,
            });
        }
    }
    let lipschitz = specs
        .iter()
        .map(|s| s.lipschitz)
        .try_fold(1.0, |acc, l| l.map(|l| acc * l));
    let chain: Vec<Arc<CoeffFn>> = specs.iter().map(|s| s.eval.clone()).collect();
    let out = LipschitzOperator {
        input_dim: first.input_dim,
        output_dim: specs.last().map(|s| s.output_dim).unwrap_or(0),
        lipschitz,
        params: first.params,
        eval: Arc::new(move |x| chain.iter().fold(x.to_vec(), |acc, f| f(&acc))),
    };
    Ok(out)
}

/// How output differences are measured.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputNorm {
    Plain,
    /// `sqrt(sum_j w_j^{-2t} y_j^2)`.
    Weighted { weights: WeightSequence, t: f64 },
}

impl OutputNorm {
    pub fn norm(&self, y: &[f64]) -> f64 {
        match self {
            OutputNorm::Plain => norm2(y),
            OutputNorm::Weighted { weights, t } => weighted_norm(y, *t, weights),
        }
    }
}

/// Largest difference quotient over explicit pairs; pairs closer than
/// `1e-12` are skipped. A lower bound for the true constant.
pub fn lipschitz_ratio_on_pairs(
    op: &LipschitzOperator,
    pairs: &[(Vec<f64>, Vec<f64>)],
    norm: &OutputNorm,
) -> Result<f64> {
    let mut best = 0.0f64;
    for (x, xp) in pairs {
        let dx = dist2(x, xp);
        if dx < 1e-12 {
            continue;
        }
        let (y, yp) = (op.evaluate(x)?, op.evaluate(xp)?);
        let dy: Vec<f64> = y.iter().zip(&yp).map(|(a, b)| a - b).collect();
        best = best.max(norm.norm(&dy) / dx);
    }
    Ok(best)
}

/// Independent pairs from `law`, truncated to the operator's input length.
pub fn estimate_lipschitz(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    pairs: usize,
    norm: &OutputNorm,
) -> Result<f64> {
    if pairs == 0 {
        return Err(invalid("need at least one pair"));
    }
    let m = op.input_dim.min(law.truncation_dim);
    let list: Vec<_> = (0..pairs as u64)
        .map(|k| (project(&law.sample(2 * k), m), project(&law.sample(2 * k + 1), m)))
        .collect();
    lipschitz_ratio_on_pairs(op, &list, norm)
}

/// The box `prod [-a_i, a_i]` and its affine parametrization by `[0, 1]^M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub half_widths: Vec<f64>,
}

impl DomainBox {
    pub fn new(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(invalid("empty box"));
        }
        if half_widths.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid("half-widths must be positive"));
        }
        Ok(DomainBox { half_widths })
    }

    /// The box `D_M` of a sampling law.
    pub fn from_law(law: &SamplingLaw, m: usize) -> Result<Self> {
        Self::new(law.half_widths(m))
    }

    pub fn dims(&self) -> usize {
        self.half_widths.len()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        self.half_widths.iter().zip(u).map(|(a, u)| a * (2.0 * u - 1.0)).collect()
    }

    pub fn to_unit(&self, c: &[f64]) -> Vec<f64> {
        self.half_widths.iter().zip(c).map(|(a, c)| (c / a + 1.0) / 2.0).collect()
    }

    /// `2 max_i a_i`: how much the affine map stretches distances at most.
    pub fn stretch(&self) -> f64 {
        2.0 * self.half_widths.iter().cloned().fold(0.0, f64::max)
    }

    /// Uniform sample `index` of the stream keyed by `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        self.half_widths.iter().map(|a| a * rng.gen_range(-1.0..=1.0)).collect()
    }

    pub fn samples(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        (0..count as u64).map(|k| self.sample(seed, k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    GridInterpolant,
    TrainedNet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub backend: Backend,
    pub seed: u64,
    pub holdout: usize,
    /// Grid refinement stops before exceeding this many nodes.
    pub node_budget: usize,
    pub net: NetOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            backend: Backend::GridInterpolant,
            seed: 0,
            holdout: DEFAULT_HOLDOUT,
            node_budget: 1 << 17,
            net: NetOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurrogateModel {
    Grid(GridModel),
    Net(NetModel),
}

/// On-disk header preceding the little-endian parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub backend: Backend,
    pub dims: usize,
    pub parameter_count: usize,
    pub reported_l2_error: f64,
    /// Nodes per axis for grids, `[hidden]` for nets.
    pub shape: Vec<usize>,
}

impl SurrogateModel {
    pub fn backend(&self) -> Backend {
        match self {
            SurrogateModel::Grid(_) => Backend::GridInterpolant,
            SurrogateModel::Net(_) => Backend::TrainedNet,
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            SurrogateModel::Grid(g) => g.dims(),
            SurrogateModel::Net(n) => n.dims(),
        }
    }

    /// Stored scalars, the transform half-widths included.
    pub fn parameter_count(&self) -> usize {
        self.dims()
            + match self {
                SurrogateModel::Grid(g) => g.values.len(),
                SurrogateModel::Net(n) => n.weight_count(),
            }
    }

    pub fn evaluate(&self, c: &[f64]) -> f64 {
        match self {
            SurrogateModel::Grid(g) => g.evaluate(c),
            SurrogateModel::Net(n) => n.evaluate(c),
        }
    }

    fn flat_parameters(&self) -> Vec<f64> {
        match self {
            SurrogateModel::Grid(g) => [g.half_widths.as_slice(), &g.values].concat(),
            SurrogateModel::Net(n) => {
                let mut v = n.half_widths.clone();
                v.extend_from_slice(&n.w_in);
                v.extend_from_slice(&n.b_in);
                v.extend_from_slice(&n.w_out);
                v.extend([n.b_out, n.y_mean, n.y_scale]);
                v
            }
        }
    }

    pub fn write_to(&self, reported_l2_error: f64, out: &mut impl Write) -> Result<()> {
        let header = ModelHeader {
            backend: self.backend(),
            dims: self.dims(),
            parameter_count: self.parameter_count(),
            reported_l2_error,
            shape: match self {
                SurrogateModel::Grid(g) => g.nodes.clone(),
                SurrogateModel::Net(n) => vec![n.hidden],
            },
        };
        serde_json::to_writer(&mut *out, &header)?;
        out.write_all(b"\n")?;
        for x in self.flat_parameters() {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<(Self, ModelHeader)> {
        let mut line = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            if input.read(&mut byte)? == 0 {
                return Err(Error::Parse("missing model header".into()));
            }
            if byte[0] == b'\n' {
                break;
            }
            line.push(byte[0]);
        }
        let header: ModelHeader = serde_json::from_slice(&line)?;
        let mut raw = vec![0u8; header.parameter_count * 8];
        input
            .read_exact(&mut raw)
            .map_err(|_| Error::Parse("truncated parameter block".into()))?;
        let vals: Vec<f64> = raw
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect();
        let m = header.dims;
        let (half, rest) = vals.split_at(m.min(vals.len()));
        let model = match header.backend {
            Backend::GridInterpolant => {
                if header.shape.len() != m || rest.len() != grid::node_count(&header.shape) {
                    return Err(Error::Parse("grid shape does not match parameters".into()));
                }
                SurrogateModel::Grid(GridModel {
                    half_widths: half.to_vec(),
                    nodes: header.shape.clone(),
                    values: rest.to_vec(),
                })
            }
            Backend::TrainedNet => {
                let h = *header.shape.first().ok_or_else(|| Error::Parse("missing width".into()))?;
                if rest.len() != h * m + 2 * h + 3 {
                    return Err(Error::Parse("net shape does not match parameters".into()));
                }
                SurrogateModel::Net(NetModel {
                    half_widths: half.to_vec(),
                    hidden: h,
                    w_in: rest[..h * m].to_vec(),
                    b_in: rest[h * m..h * m + h].to_vec(),
                    w_out: rest[h * m + h..h * m + 2 * h].to_vec(),
                    b_out: rest[h * m + 2 * h],
                    y_mean: rest[h * m + 2 * h + 1],
                    y_scale: rest[h * m + 2 * h + 2],
                })
            }
        };
        Ok((model, header))
    }
}

/// A fitted component with its held-out certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedSurrogate {
    pub model: SurrogateModel,
    pub domain: DomainBox,
    /// Held-out RMS error under the uniform law on the box.
    pub reported_l2_error: f64,
    /// Half-width of the 95% normal interval on `reported_l2_error`.
    pub ci_half_width: f64,
    pub target_error: f64,
    pub tolerance_met: bool,
}

impl FittedSurrogate {
    pub fn parameter_count(&self) -> usize {
        self.model.parameter_count()
    }

    pub fn evaluate(&self, c: &[f64]) -> f64 {
        self.model.evaluate(c)
    }
}

/// RMS and 95% half-width of the RMS via the delta method.
pub(crate) fn rms_with_ci(sq_errors: &[f64]) -> (f64, f64) {
    let n = sq_errors.len().max(1) as f64;
    let m = mean(sq_errors);
    let var = sq_errors.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let rms = m.sqrt();
    let half = if rms > 0.0 {
        1.96 * (var / n).sqrt() / (2.0 * rms)
    } else {
        0.0
    };
    (rms, half)
}

/// Fit every output of `target` on one shared box, refining until each
/// output `k` meets `targets[k]` in held-out RMS.
pub(crate) fn fit_outputs(
    target: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    domain: &DomainBox,
    targets: &[f64],
    opts: &FitOptions,
) -> Result<Vec<FittedSurrogate>> {
    let m = domain.dims();
    if opts.backend == Backend::GridInterpolant && m > MAX_GRID_DIM {
        return Err(invalid(format!(
            "grid interpolant on {m} dimensions: tensor grids grow exponentially with the \
             dimension, so the grid backend is capped at {MAX_GRID_DIM}; use the trained backend"
        )));
    }
    if opts.holdout == 0 {
        return Err(invalid("held-out set is empty"));
    }
    let cache = grid::EvalCache::new(target);
    let holdout = domain.samples(opts.seed ^ 0x5eed_0001, opts.holdout);
    let truth = cache.values(&holdout);
    let certify = |k: usize, f: &dyn Fn(&[f64]) -> f64| {
        let sq: Vec<f64> = holdout
            .iter()
            .zip(&truth)
            .map(|(x, y)| (f(x) - y[k]).powi(2))
            .collect();
        rms_with_ci(&sq)
    };
    let finish = |models: Vec<SurrogateModel>| -> Vec<FittedSurrogate> {
        models
            .into_iter()
            .enumerate()
            .map(|(k, model)| {
                let (rms, ci) = certify(k, &|x| model.evaluate(x));
                FittedSurrogate {
                    model,
                    domain: domain.clone(),
                    reported_l2_error: rms,
                    ci_half_width: ci,
                    target_error: targets[k],
                    tolerance_met: rms <= targets[k],
                }
            })
            .collect()
    };

    match opts.backend {
        Backend::GridInterpolant => {
            let mut level = 0u32;
            let mut best: Option<Vec<FittedSurrogate>> = None;
            loop {
                let shape = grid::grid_shape(&domain.half_widths, level);
                let count = grid::node_count(&shape);
                if count > opts.node_budget && best.is_some() {
                    break;
                }
                let points: Vec<Vec<f64>> = (0..count)
                    .map(|k| grid::node_point(&domain.half_widths, &shape, k))
                    .collect();
                let values = cache.values(&points);
                let models = (0..targets.len())
                    .map(|k| {
                        SurrogateModel::Grid(GridModel {
                            half_widths: domain.half_widths.clone(),
                            nodes: shape.clone(),
                            values: values.iter().map(|v| v[k]).collect(),
                        })
                    })
                    .collect();
                let fitted = finish(models);
                let done = fitted.iter().all(|f| f.tolerance_met);
                best = Some(fitted);
                if done || level >= 30 {
                    break;
                }
                level += 1;
            }
            Ok(best.expect("at least one level"))
        }
        Backend::TrainedNet => {
            let train_x = domain.samples(opts.seed ^ 0x5eed_0002, opts.net.train_samples);
            let train_y = cache.values(&train_x);
            let models = (0..targets.len())
                .map(|k| {
                    let ys: Vec<f64> = train_y.iter().map(|v| v[k]).collect();
                    let seed = opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add(k as u64);
                    SurrogateModel::Net(net::train(&domain.half_widths, &train_x, &ys, &opts.net, seed))
                })
                .collect();
            Ok(finish(models))
        }
    }
}

/// Fit a scalar map with Lipschitz constant `lipschitz` on `domain`.
/// The target accuracy is `lipschitz * stretch * tol`.
pub fn fit_surrogate(
    target: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &DomainBox,
    lipschitz: f64,
    tol: f64,
    opts: &FitOptions,
) -> Result<FittedSurrogate> {
    if !(tol > 0.0 && tol <= 1.0) {
        return Err(invalid(format!("tolerance {tol} must lie in (0, 1]")));
    }
    if !(lipschitz >= 0.0) {
        return Err(invalid("Lipschitz constant must be nonnegative"));
    }
    let wrapped = |x: &[f64]| vec![target(x)];
    let goal = lipschitz * domain.stretch() * tol;
    let mut fits = fit_outputs(&wrapped, domain, &[goal], opts)?;
    Ok(fits.remove(0))
}

/// Settings shared by every component of an assembled surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyConfig {
    /// Operator Lipschitz constant, `Y^t` against `X`.
    pub lipschitz: f64,
    /// Upper Riesz bound of the input basis.
    pub lambda_x: f64,
    /// Output weights defining `Y^t`.
    pub output_weights: WeightSequence,
    pub fit: FitOptions,
}

#[derive(Debug, Clone)]
pub struct OperatorSurrogate {
    pub plan: TruncationPlan,
    pub components: Vec<FittedSurrogate>,
    pub output_basis: Option<BasisDescriptor>,
}

impl OperatorSurrogate {
    /// The first `N` output coefficients of the surrogate.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .zip(&self.plan.m)
            .map(|(c, &m)| c.evaluate(&project(x, m)))
            .collect()
    }

    pub fn total_parameters(&self) -> usize {
        self.components.iter().map(|c| c.parameter_count()).sum()
    }

    pub fn all_tolerances_met(&self) -> bool {
        self.components.iter().all(|c| c.tolerance_met)
    }

    /// `(sum_j e_j^2)^{1/2}` over the component held-out errors.
    pub fn aggregate_component_error(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.reported_l2_error.powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Surrogates for the listed 1-based `components` of `op`, all on the box
/// `D_m` of `law`, sharing every operator evaluation. `targets` are
/// absolute held-out RMS goals.
pub fn fit_components(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    m: usize,
    components: &[usize],
    targets: &[f64],
    opts: &FitOptions,
) -> Result<Vec<FittedSurrogate>> {
    if components.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            got: targets.len(),
        });
    }
    if let Some(&j) = components.iter().find(|&&j| j == 0 || j > op.output_dim) {
        return Err(Error::OutOfRange(format!("component {j}")));
    }
    if m == 0 || m > op.input_dim {
        return Err(Error::OutOfRange(format!("{m} inputs for an operator reading {}", op.input_dim)));
    }
    let domain = DomainBox::from_law(law, m)?;
    let eval = |c: &[f64]| {
        let y = op
            .evaluate(&project(c, op.input_dim))
            .expect("operator output length is fixed");
        components.iter().map(|&j| y[j - 1]).collect::<Vec<f64>>()
    };
    let mut local = *opts;
    local.seed = opts.seed.wrapping_add(m as u64);
    fit_outputs(&eval, &domain, targets, &local)
        .map_err(|e| invalid(format!("component {} (M = {m}): {e}", components[0])))
}

/// Fit one surrogate per output component of `op` following `plan`.
///
/// Components with equal `M_j` share their box, so they are fitted
/// together and every operator evaluation serves all of them.
pub fn assemble(
    op: &LipschitzOperator,
    law: &SamplingLaw,
    plan: &TruncationPlan,
    config: &AssemblyConfig,
) -> Result<OperatorSurrogate> {
    let params = &law.params;
    if plan.m.len() != plan.n || plan.eps_j.len() != plan.n {
        return Err(invalid("plan lists do not match N"));
    }
    if plan.n > op.output_dim {
        return Err(Error::OutOfRange(format!(
            "plan needs {} outputs, operator has {}",
            plan.n, op.output_dim
        )));
    }
    if plan.max_input_dim() > op.input_dim.min(law.truncation_dim) {
        return Err(Error::OutOfRange(format!(
            "plan reads {} inputs, only {} available",
            plan.max_input_dim(),
            op.input_dim.min(law.truncation_dim)
        )));
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (j, &m) in plan.m.iter().enumerate() {
        match groups.iter_mut().find(|(gm, _)| *gm == m) {
            Some((_, js)) => js.push(j),
            None => groups.push((m, vec![j])),
        }
    }
    let mut slots: Vec<Option<FittedSurrogate>> = vec![None; plan.n];
    for (m, js) in groups {
        let stretch = DomainBox::from_law(law, m)?.stretch();
        let targets: Vec<f64> = js
            .iter()
            .map(|&j| {
                let lg = config.lipschitz
                    * config.output_weights.at(j + 1).powf(params.t)
                    * config.lambda_x.sqrt();
                lg * stretch * plan.eps_j[j]
            })
            .collect();
        let components: Vec<usize> = js.iter().map(|j| j + 1).collect();
        let fits = fit_components(op, law, m, &components, &targets, &config.fit)?;
        for (&j, fit) in js.iter().zip(fits) {
            slots[j] = Some(fit);
        }
    }
    Ok(OperatorSurrogate {
        plan: plan.clone(),
        components: slots.into_iter().map(|s| s.expect("every component fitted")).collect(),
        output_basis: None,
    })
}
