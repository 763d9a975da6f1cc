//! Weight sequences, weighted coefficient norms, the cube of admissible
//! inputs and the sampling map onto it.
//!
//! Indices are 1-based throughout: `w(1)` is the first weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{pairwise_sum_by, power_tail};

/// Default number of explicitly summed terms before the tail estimate kicks in.
pub const DEFAULT_TAIL_DIM: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    /// `w_i = i^{-p}`, `p >= 1`.
    Power { p: f64 },
    /// Finite prefix of a non-increasing sequence. Past the prefix the
    /// sequence continues as `w_L (i / L)^{-tail_exponent}`.
    Explicit { values: Vec<f64>, tail_exponent: f64 },
}

/// A partial sum plus tail, with a certified bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WeightSequence {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("power weights need p >= 1, got {p}")));
        }
        Ok(WeightSequence::Power { p })
    }

    pub fn explicit(values: Vec<f64>, tail_exponent: f64) -> Result<Self> {
        let seq = WeightSequence::Explicit {
            values,
            tail_exponent,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSequence::Power { p } => {
                if !(*p >= 1.0) || !p.is_finite() {
                    return Err(invalid(format!("power weights need p >= 1, got {p}")));
                }
            }
            WeightSequence::Explicit {
                values,
                tail_exponent,
            } => {
                if values.is_empty() {
                    return Err(invalid("explicit weights must be non-empty"));
                }
                if !(*tail_exponent > 0.0) {
                    return Err(invalid("tail exponent must be positive"));
                }
                for (i, &v) in values.iter().enumerate() {
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(invalid(format!("weight {} = {v} is outside (0, 1]", i + 1)));
                    }
                    if i > 0 && v > values[i - 1] {
                        return Err(invalid(format!("weights increase at index {}", i + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exponent `a` such that `w_i` decays like `i^{-a}`.
    pub fn tail_exponent(&self) -> f64 {
        match self {
            WeightSequence::Power { p } => *p,
            WeightSequence::Explicit { tail_exponent, .. } => *tail_exponent,
        }
    }

    /// `w_i` for 1-based `i`.
    pub fn get(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(Error::OutOfRange("weight indices start at 1".into()));
        }
        Ok(self.at(i))
    }

    pub(crate) fn at(&self, i: usize) -> f64 {
        match self {
            WeightSequence::Power { p } => (i as f64).powf(-p),
            WeightSequence::Explicit {
                values,
                tail_exponent,
            } => {
                if i <= values.len() {
                    values[i - 1]
                } else {
                    let l = values.len();
                    values[l - 1] * (i as f64 / l as f64).powf(-tail_exponent)
                }
            }
        }
    }

    /// `(w_1, ..., w_n)`.
    pub fn prefix(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|i| self.at(i)).collect()
    }

    /// `sum_{i <= n} w_i^q`.
    pub fn partial_sum(&self, q: f64, n: usize) -> f64 {
        pairwise_sum_by(n, |k| self.at(k + 1).powf(q))
    }

    /// `sum_i w_i^q`, summing `tail_dim` terms and bounding the rest.
    pub fn power_sum(&self, q: f64, tail_dim: usize) -> Result<SumEstimate> {
        let a = q * self.tail_exponent();
        if !(a > 1.0) {
            return Err(Error::NotSummable(q));
        }
        let n = match self {
            WeightSequence::Power { .. } => tail_dim.max(1),
            WeightSequence::Explicit { values, .. } => tail_dim.max(values.len()),
        };
        let head = self.partial_sum(q, n);
        // Past the prefix both kinds are c * i^{-a}.
        let scale = match self {
            WeightSequence::Power { .. } => 1.0,
            WeightSequence::Explicit { values, .. } => {
                let l = values.len() as f64;
                values[values.len() - 1].powf(q) * l.powf(a)
            }
        };
        let (est, lo, hi) = power_tail(a, n);
        Ok(SumEstimate {
            value: head + scale * est,
            lower: head + scale * lo,
            upper: head + scale * hi,
        })
    }

    /// Whether `sum_i w_i^q` converges.
    pub fn summable(&self, q: f64) -> bool {
        q * self.tail_exponent() > 1.0
    }
}

/// Smoothness exponents and cube radius shared by the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    /// Input smoothness, must exceed 1/2.
    pub s: f64,
    /// Output smoothness, non-negative.
    pub t: f64,
    /// Cube radius.
    pub r: f64,
    /// Hölder exponent in (0, 1].
    #[serde(default = "one")]
    pub gamma: f64,
}

fn one() -> f64 {
    1.0
}

impl SmoothnessParams {
    pub fn new(s: f64, t: f64, r: f64, gamma: f64) -> Result<Self> {
        let p = SmoothnessParams { s, t, r, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.5) {
            return Err(invalid(format!("s must exceed 1/2, got {}", self.s)));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(invalid(format!("t must be non-negative, got {}", self.t)));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(invalid(format!("r must be positive, got {}", self.r)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        Ok(())
    }
}

/// `sqrt(sum_i c_i^2 w_i^{-2s})`.
pub fn weighted_norm(coeffs: &[f64], s: f64, w: &WeightSequence) -> f64 {
    pairwise_sum_by(coeffs.len(), |k| {
        let c = coeffs[k];
        if c == 0.0 {
            0.0
        } else {
            c * c * w.at(k + 1).powf(-2.0 * s)
        }
    })
    .sqrt()
}

/// Whether `|c_i| <= r w_i^s` for every listed coefficient.
pub fn cube_contains(coeffs: &[f64], params: &SmoothnessParams, w: &WeightSequence) -> bool {
    coeffs
        .iter()
        .enumerate()
        .all(|(k, c)| c.abs() <= params.r * w.at(k + 1).powf(params.s) * (1.0 + 1e-12))
}

/// Half-widths `r w_i^s` of the cube, `i = 1..=n`.
pub fn cube_half_widths(n: usize, params: &SmoothnessParams, w: &WeightSequence) -> Vec<f64> {
    (1..=n).map(|i| params.r * w.at(i).powf(params.s)).collect()
}

/// Radius of an `X^{1/2-eps}` ball containing the cube: `r sqrt(sum w_i^{1+2 eps})`.
pub fn ball_cube_radius(r: f64, eps: f64, w: &WeightSequence, tail_dim: usize) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let q = 1.0 + 2.0 * eps;
    if !w.summable(q) {
        return Err(Error::NotSummable(q));
    }
    Ok(r * w.power_sum(q, tail_dim)?.value.sqrt())
}

/// Map `u in [-1, 1]^n` to the cube: `c_i = r w_i^s u_i`.
pub fn sigma_map(u: &[f64], params: &SmoothnessParams, w: &WeightSequence) -> Result<Vec<f64>> {
    if let Some((k, x)) = u.iter().enumerate().find(|(_, x)| !(x.abs() <= 1.0)) {
        return Err(Error::OutOfRange(format!("u[{k}] = {x} is outside [-1, 1]")));
    }
    Ok(u
        .iter()
        .enumerate()
        .map(|(k, x)| params.r * w.at(k + 1).powf(params.s) * x)
        .collect())
}

/// Uniform law on `[-1, 1]^n` pushed through [`sigma_map`].
///
/// Each sample owns a ChaCha stream keyed by `(seed, index)`, so sample
/// `k` is the same no matter how many others are drawn or in which order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingLaw {
    pub weights: WeightSequence,
    pub params: SmoothnessParams,
    pub truncation_dim: usize,
    pub seed: u64,
}

impl SamplingLaw {
    pub fn new(
        weights: WeightSequence,
        params: SmoothnessParams,
        truncation_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        weights.validate()?;
        params.validate()?;
        if truncation_dim == 0 {
            return Err(invalid("truncation dimension must be positive"));
        }
        Ok(SamplingLaw {
            weights,
            params,
            truncation_dim,
            seed,
        })
    }

    /// The raw uniform vector for sample `index`.
    pub fn uniform(&self, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        (0..self.truncation_dim)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect()
    }

    /// Coefficients of sample `index`.
    pub fn sample(&self, index: u64) -> Vec<f64> {
        let u = self.uniform(index);
        u.iter()
            .enumerate()
            .map(|(k, x)| self.params.r * self.weights.at(k + 1).powf(self.params.s) * x)
            .collect()
    }

    pub fn samples(&self, count: usize) -> Vec<Vec<f64>> {
        (0..count as u64).map(|k| self.sample(k)).collect()
    }

    /// Same law with a different seed, for held-out sets.
    pub fn reseeded(&self, seed: u64) -> Self {
        SamplingLaw {
            seed,
            ..self.clone()
        }
    }

    pub fn half_widths(&self, n: usize) -> Vec<f64> {
        cube_half_widths(n, &self.params, &self.weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pw(p: f64) -> WeightSequence {
        WeightSequence::power(p).unwrap()
    }

    #[test]
    fn power_weights_basic() {
        let w = pw(1.0);
        assert_eq!(w.get(1).unwrap(), 1.0);
        assert_eq!(w.get(4).unwrap(), 0.25);
        assert!(w.get(0).is_err());
        assert!(WeightSequence::power(0.5).is_err());
    }

    #[test]
    fn explicit_weights_validation() {
        assert!(WeightSequence::explicit(vec![1.0, 0.5, 0.25], 1.0).is_ok());
        assert!(WeightSequence::explicit(vec![1.0, 0.5, 0.75], 1.0).is_err());
        assert!(WeightSequence::explicit(vec![1.5], 1.0).is_err());
        assert!(WeightSequence::explicit(vec![], 1.0).is_err());
        let w = WeightSequence::explicit(vec![1.0, 0.5], 2.0).unwrap();
        assert_abs_diff_eq!(w.get(4).unwrap(), 0.5 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn partial_sum_of_inverse_squares() {
        // Oracle: sum_{i<=1000} i^-2 = pi^2/6 - psi'(1001) = 1.6439345666815...
        let got = pw(1.0).partial_sum(2.0, 1000);
        assert_abs_diff_eq!(got, 1.643_934_566_681_56, epsilon = 1e-12);
    }

    #[test]
    fn power_sum_brackets_zeta() {
        let est = pw(1.0).power_sum(2.0, 1000).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(est.lower <= z2 && z2 <= est.upper);
        assert_abs_diff_eq!(est.value, z2, epsilon = 1e-13);
        assert!(pw(1.0).power_sum(1.0, 10).is_err());
    }

    #[test]
    fn weighted_norm_examples() {
        let w = pw(1.0);
        assert_abs_diff_eq!(weighted_norm(&[0.0, 1.0], 1.0, &w), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(weighted_norm(&[1.0, 1.0], 0.5, &w), 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(weighted_norm(&[], 1.0, &w), 0.0);
    }

    #[test]
    fn ball_cube_radius_examples() {
        let w1 = pw(1.0);
        let w2 = pw(2.0);
        let r1 = ball_cube_radius(1.0, 0.5, &w1, DEFAULT_TAIL_DIM).unwrap();
        assert_abs_diff_eq!(r1, 1.282_549_830_161_86, epsilon = 1e-10);
        let r2 = ball_cube_radius(2.0, 0.5, &w1, DEFAULT_TAIL_DIM).unwrap();
        assert_abs_diff_eq!(r2, 2.0 * r1, epsilon = 1e-12);
        // sqrt(zeta(4)) = pi^2 / sqrt(90)
        let r3 = ball_cube_radius(1.0, 0.5, &w2, DEFAULT_TAIL_DIM).unwrap();
        assert_abs_diff_eq!(r3, 1.040_347_650_408_81, epsilon = 1e-10);
        assert!(ball_cube_radius(1.0, 0.0, &w1, 100).is_err());
    }

    #[test]
    fn sigma_map_examples() {
        let params = SmoothnessParams::new(1.0, 0.5, 2.0, 1.0).unwrap();
        let w = pw(1.0);
        let c = sigma_map(&[1.0, -1.0, 0.5], &params, &w).unwrap();
        assert_abs_diff_eq!(c[0], 2.0);
        assert_abs_diff_eq!(c[1], -1.0);
        assert_abs_diff_eq!(c[2], 1.0 / 3.0, epsilon = 1e-15);
        assert!(sigma_map(&[1.5], &params, &w).is_err());
        assert!(cube_contains(&c, &params, &w));
    }

    #[test]
    fn params_validation() {
        assert!(SmoothnessParams::new(0.5, 1.0, 1.0, 1.0).is_err());
        assert!(SmoothnessParams::new(1.0, -0.1, 1.0, 1.0).is_err());
        assert!(SmoothnessParams::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(SmoothnessParams::new(1.0, 0.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn sampling_is_keyed_by_index() {
        let law = SamplingLaw::new(
            pw(1.0),
            SmoothnessParams::new(1.5, 1.0, 1.0, 1.0).unwrap(),
            16,
            7,
        )
        .unwrap();
        let batch = law.samples(5);
        assert_eq!(batch[3], law.sample(3));
        assert_ne!(law.sample(0), law.sample(1));
        assert_ne!(law.sample(0), law.reseeded(8).sample(0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sampled_points_lie_in_cube(seed in any::<u64>(), s in 0.6f64..3.0, r in 0.1f64..5.0, idx in 0u64..1000) {
                let params = SmoothnessParams::new(s, 0.5, r, 1.0).unwrap();
                let law = SamplingLaw::new(pw(1.0), params, 24, seed).unwrap();
                prop_assert!(cube_contains(&law.sample(idx), &params, &law.weights));
            }

            #[test]
            fn weighted_norm_is_monotone_in_s(c in proptest::collection::vec(-1.0f64..1.0, 1..20), s in 0.0f64..2.0, ds in 0.0f64..1.0) {
                let w = pw(1.0);
                prop_assert!(weighted_norm(&c, s, &w) <= weighted_norm(&c, s + ds, &w) * (1.0 + 1e-12));
            }

            #[test]
            fn weights_non_increasing(p in 1.0f64..4.0, i in 1usize..10_000) {
                let w = pw(p);
                prop_assert!(w.at(i + 1) <= w.at(i));
                prop_assert!(w.at(i) <= 1.0);
            }
        }
    }
}
