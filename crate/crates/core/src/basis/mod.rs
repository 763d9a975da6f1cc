//! Riesz bases: encoding grid functions to coefficient vectors and back.

mod fourier;
pub mod wavelet;

pub use fourier::{sobolev_norm_sq, FourierBasis};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::numeric::{pairwise_sum_by, dot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Fourier,
    Sampled,
}

/// Serializable identity of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub kind: BasisKind,
    pub d: usize,
    pub grid_size: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub sobolev_order: f64,
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub scale: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}
fn unit() -> f64 {
    1.0
}
fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

/// User-supplied family of grid functions, measured in the trapezoidal L2
/// inner product. The dual family comes from inverting the Gram matrix.
#[derive(Debug, Clone)]
pub struct SampledBasis {
    d: usize,
    n: usize,
    functions: Vec<Vec<f64>>,
    duals: Vec<Vec<f64>>,
    bounds: (f64, f64),
}

impl SampledBasis {
    pub fn new(d: usize, n: usize, functions: Vec<Vec<f64>>) -> Result<Self> {
        let points = n.pow(d as u32);
        if functions.is_empty() {
            return Err(invalid("sampled basis needs at least one function"));
        }
        for f in &functions {
            check_len(points, f.len())?;
        }
        let m = functions.len();
        let cell = 1.0 / points as f64;
        let gram = DMatrix::from_fn(m, m, |i, j| dot(&functions[i], &functions[j]) * cell);
        let eig = SymmetricEigen::new(gram.clone());
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if !(lo > 1e-12 * hi.max(1e-300)) {
            return Err(invalid("sampled functions are linearly dependent on the grid"));
        }
        let inv = gram
            .try_inverse()
            .ok_or_else(|| invalid("Gram matrix is singular"))?;
        let duals = (0..m)
            .map(|i| {
                (0..points)
                    .map(|p| (0..m).map(|j| inv[(i, j)] * functions[j][p]).sum())
                    .collect()
            })
            .collect();
        Ok(SampledBasis {
            d,
            n,
            functions,
            duals,
            bounds: (lo, hi),
        })
    }
}

#[derive(Debug, Clone)]
pub enum RieszBasis {
    Fourier(FourierBasis),
    Sampled(SampledBasis),
}

impl RieszBasis {
    /// L2-orthonormal trigonometric basis.
    pub fn fourier(d: usize, n: usize) -> Result<Self> {
        Ok(RieszBasis::Fourier(FourierBasis::new(d, n, 0.0, 1.0)?))
    }

    /// Trigonometric basis normalized in `H^{order}`.
    pub fn fourier_sobolev(d: usize, n: usize, order: f64) -> Result<Self> {
        Ok(RieszBasis::Fourier(FourierBasis::new(d, n, order, 1.0)?))
    }

    pub fn from_descriptor(desc: &BasisDescriptor) -> Result<Self> {
        match desc.kind {
            BasisKind::Fourier => Ok(RieszBasis::Fourier(FourierBasis::new(
                desc.d,
                desc.grid_size,
                desc.sobolev_order,
                desc.scale,
            )?)),
            BasisKind::Sampled => Err(invalid(
                "a sampled basis cannot be rebuilt from its descriptor alone",
            )),
        }
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        match self {
            RieszBasis::Fourier(b) => BasisDescriptor {
                kind: BasisKind::Fourier,
                d: b.dim(),
                grid_size: b.grid_size(),
                sobolev_order: b.sobolev_order(),
                scale: b.scale(),
            },
            RieszBasis::Sampled(b) => BasisDescriptor {
                kind: BasisKind::Sampled,
                d: b.d,
                grid_size: b.n,
                sobolev_order: 0.0,
                scale: 1.0,
            },
        }
    }

    pub fn points(&self) -> usize {
        match self {
            RieszBasis::Fourier(b) => b.points(),
            RieszBasis::Sampled(b) => b.n.pow(b.d as u32),
        }
    }

    pub fn max_terms(&self) -> usize {
        match self {
            RieszBasis::Fourier(b) => b.max_terms(),
            RieszBasis::Sampled(b) => b.functions.len(),
        }
    }

    /// Riesz bounds `(lambda, Lambda)`.
    pub fn riesz_bounds(&self) -> (f64, f64) {
        match self {
            RieszBasis::Fourier(b) => (b.scale() * b.scale(), b.scale() * b.scale()),
            RieszBasis::Sampled(b) => b.bounds,
        }
    }

    pub fn encode(&self, values: &[f64], n_terms: usize) -> Result<Vec<f64>> {
        match self {
            RieszBasis::Fourier(b) => b.encode(values, n_terms),
            RieszBasis::Sampled(b) => {
                check_len(self.points(), values.len())?;
                if n_terms > b.functions.len() {
                    return Err(Error::OutOfRange(format!(
                        "{n_terms} terms requested from a family of {}",
                        b.functions.len()
                    )));
                }
                let cell = 1.0 / self.points() as f64;
                Ok(b.duals[..n_terms].iter().map(|g| dot(values, g) * cell).collect())
            }
        }
    }

    pub fn decode(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        match self {
            RieszBasis::Fourier(b) => b.decode(coeffs),
            RieszBasis::Sampled(b) => {
                if coeffs.len() > b.functions.len() {
                    return Err(Error::OutOfRange(format!(
                        "{} coefficients for a family of {}",
                        coeffs.len(),
                        b.functions.len()
                    )));
                }
                let points = self.points();
                Ok((0..points)
                    .map(|p| pairwise_sum_by(coeffs.len(), |i| coeffs[i] * b.functions[i][p]))
                    .collect())
            }
        }
    }

    /// Squared norm of a grid function in the space the basis lives in.
    pub fn norm_sq(&self, values: &[f64]) -> Result<f64> {
        match self {
            RieszBasis::Fourier(b) => b.norm_sq(values),
            RieszBasis::Sampled(_) => {
                check_len(self.points(), values.len())?;
                Ok(dot(values, values) / values.len() as f64)
            }
        }
    }

    /// `||sum c_i psi_i||^2 / ||c||^2`.
    pub fn rayleigh_quotient(&self, coeffs: &[f64]) -> Result<f64> {
        let c2 = dot(coeffs, coeffs);
        if c2 == 0.0 {
            return Err(invalid("zero coefficient vector"));
        }
        Ok(self.norm_sq(&self.decode(coeffs)?)? / c2)
    }
}

/// Empirical Riesz bounds from random Gaussian coefficient vectors of
/// length `n_terms`: the minimum and maximum Rayleigh quotient seen.
pub fn verify_riesz(basis: &RieszBasis, n_terms: usize, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if trials == 0 || n_terms == 0 {
        return Err(invalid("need at least one trial and one term"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..trials {
        let c: Vec<f64> = (0..n_terms)
            .map(|_| {
                // Box-Muller keeps this free of an extra distribution crate.
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let q = basis.rayleigh_quotient(&c)?;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok((lo, hi))
}

/// Keep the first `n` coefficients, zero the rest.
pub fn restrict(coeffs: &[f64], n: usize) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| if i < n { c } else { 0.0 })
        .collect()
}

/// The first `m` coefficients, zero-padded when the input is shorter.
pub fn project(coeffs: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    let k = m.min(coeffs.len());
    out[..k].copy_from_slice(&coeffs[..k]);
    out
}

/// A coefficient vector tagged with the basis it refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVector {
    pub coefficients: Vec<f64>,
    pub basis: BasisDescriptor,
}
