//! The worked examples as operators and truncation studies.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{RateCheck, RateMode};
use crate::basis::project;
use crate::error::{check_len, Result};
use crate::evi::ObstacleMap;
use crate::hs::{functional_calculus, hs_norm, truncated_calculus, ScalarFn, SpectralFamily};
use crate::numeric::norm2;
use crate::surrogate::{LipschitzOperator, OutputNorm};
use crate::weights::SamplingLaw;

/// Largest matrix the functional-calculus example builds.
pub const MAX_HS_SIZE: usize = 64;

/// Something whose truncation errors can be measured per sample.
pub trait TruncationStudy: Sync {
    fn law(&self) -> &SamplingLaw;
    /// Error at each index for the input `x`.
    fn errors(&self, x: &[f64], indices: &[usize], mode: RateMode) -> Result<Vec<f64>>;
    fn predicted_slope(&self, mode: RateMode) -> f64;
    fn rate_check(&self) -> RateCheck;
}

/// Truncation of an operator given in coefficients: outputs past `N` are
/// dropped, or inputs past `M` are zeroed.
#[derive(Debug, Clone)]
pub struct OperatorStudy {
    pub op: LipschitzOperator,
    pub law: SamplingLaw,
    pub predicted_output: f64,
    pub predicted_input: f64,
    pub check: RateCheck,
    pub norm: OutputNorm,
}

impl TruncationStudy for OperatorStudy {
    fn law(&self) -> &SamplingLaw {
        &self.law
    }

    fn errors(&self, x: &[f64], indices: &[usize], mode: RateMode) -> Result<Vec<f64>> {
        let x = project(x, self.op.input_dim);
        let y = self.op.evaluate(&x)?;
        indices
            .iter()
            .map(|&k| match mode {
                RateMode::Output => Ok(self.norm.norm(&y[k.min(y.len())..])),
                RateMode::Input => {
                    let yk = self.op.evaluate(&project(&x[..k.min(x.len())], self.op.input_dim))?;
                    let d: Vec<f64> = y.iter().zip(&yk).map(|(a, b)| a - b).collect();
                    Ok(self.norm.norm(&d))
                }
            })
            .collect()
    }

    fn predicted_slope(&self, mode: RateMode) -> f64 {
        match mode {
            RateMode::Output => self.predicted_output,
            RateMode::Input => self.predicted_input,
        }
    }

    fn rate_check(&self) -> RateCheck {
        self.check
    }
}

/// `A = U diag(s) V^T` with singular values from the sample, mapped to
/// `f(A)`; output truncation keeps the `N` largest singular triples.
#[derive(Debug, Clone)]
pub struct HsStudy {
    pub family: SpectralFamily,
    pub f: ScalarFn,
    pub law: SamplingLaw,
}

impl TruncationStudy for HsStudy {
    fn law(&self) -> &SamplingLaw {
        &self.law
    }

    fn errors(&self, x: &[f64], indices: &[usize], mode: RateMode) -> Result<Vec<f64>> {
        let a = self.family.matrix(x);
        let full = functional_calculus(&a, &self.f)?;
        indices
            .iter()
            .map(|&k| {
                let approx = match mode {
                    RateMode::Output => truncated_calculus(&a, &self.f, k)?,
                    RateMode::Input => functional_calculus(&self.family.matrix(&x[..k.min(x.len())]), &self.f)?,
                };
                Ok(hs_norm(&(&full - approx)))
            })
            .collect()
    }

    /// Singular values decay like the sample coefficients.
    fn predicted_slope(&self, _mode: RateMode) -> f64 {
        -(self.law.params.s - 0.5)
    }

    fn rate_check(&self) -> RateCheck {
        RateCheck::Matches
    }
}

/// The obstacle-to-solution map with all resolved output modes; the map is
/// returned too so callers can read its solver statistics.
pub fn evi_operator(d: usize, n_grid: usize, input_dim: usize) -> Result<(LipschitzOperator, Arc<ObstacleMap>)> {
    let map = Arc::new(ObstacleMap::standard(d, n_grid)?);
    let inputs = input_dim.min(map.max_input_terms());
    let inner = map.clone();
    let op = LipschitzOperator::new(inputs, map.output_terms, move |x| {
        inner.evaluate(x).expect("input length checked by the operator")
    });
    Ok((op, map))
}

/// Entries of a `size x size` matrix (row-major) mapped through the
/// singular-value calculus of `f`.
pub fn calculus_operator(size: usize, f: ScalarFn) -> Result<LipschitzOperator> {
    f.check()?;
    let l = f.lipschitz();
    Ok(LipschitzOperator::new(size * size, size * size, move |x| {
        let a = DMatrix::from_row_slice(size, size, x);
        let fa = functional_calculus(&a, &f).expect("checked scalar function");
        fa.transpose().as_slice().to_vec()
    })
    .with_lipschitz(l))
}

/// Difference quotient of `op` on one pair; `None` when the points coincide.
pub fn pair_ratio(op: &LipschitzOperator, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_len(x.len(), y.len())?;
    let dx: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let nx = norm2(&dx);
    if nx < 1e-12 {
        return Ok(None);
    }
    let (fx, fy) = (op.evaluate(x)?, op.evaluate(y)?);
    let d: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
    Ok(Some(norm2(&d) / nx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::random_orthogonal;
    use crate::weights::{SmoothnessParams, WeightSequence};

    fn law(s: f64, dim: usize) -> SamplingLaw {
        let p = SmoothnessParams::new(s, 1.0, 1.0, 1.0).unwrap();
        SamplingLaw::new(WeightSequence::power(1.0).unwrap(), p, dim, 3).unwrap()
    }

    #[test]
    fn identity_output_errors_are_tails() {
        let study = OperatorStudy {
            op: LipschitzOperator::identity(8),
            law: law(1.5, 8),
            predicted_output: -1.0,
            predicted_input: -1.0,
            check: RateCheck::Matches,
            norm: OutputNorm::Plain,
        };
        let x = vec![1.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(study.errors(&x, &[1, 3], RateMode::Output).unwrap(), vec![8f64.sqrt(), 0.0]);
        assert_eq!(study.errors(&x, &[1, 2], RateMode::Input).unwrap(), vec![8f64.sqrt(), 2.0]);
    }

    #[test]
    fn hs_output_error_matches_singular_tail() {
        let study = HsStudy {
            family: SpectralFamily::new(6, 1),
            f: ScalarFn::Identity,
            law: law(2.0, 6),
        };
        let x = [1.0, 0.25, 1.0 / 9.0, 1.0 / 16.0, 0.04, 1.0 / 36.0];
        let e = study.errors(&x, &[2], RateMode::Output).unwrap()[0];
        let tail: f64 = x[2..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((e - tail).abs() < 1e-12);
    }

    #[test]
    fn calculus_operator_is_orthogonally_invariant() {
        let op = calculus_operator(4, ScalarFn::SoftThreshold(0.3)).unwrap();
        let q = random_orthogonal(4, 2);
        let a = DMatrix::from_fn(4, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let flat = |m: &DMatrix<f64>| m.transpose().as_slice().to_vec();
        let fa = DMatrix::from_row_slice(4, 4, &op.evaluate(&flat(&a)).unwrap());
        let fqa = DMatrix::from_row_slice(4, 4, &op.evaluate(&flat(&(&q * &a))).unwrap());
        assert!(hs_norm(&(&q * fa - fqa)) < 1e-10);
    }
}
