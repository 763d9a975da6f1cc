//! Real trigonometric basis on the unit torus, sampled on a uniform grid.
//!
//! Index 1 is the constant. Nonzero frequencies come in cos/sin pairs,
//! ordered by `|k|^2` and then lexicographically among the representatives
//! whose first nonzero component is positive. With `sobolev_order = s0` each
//! function is divided by `(1 + 4 pi^2 |k|^2)^{s0/2}`, which makes the family
//! orthonormal in `H^{s0}`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{check_len, invalid, Error, Result};
use crate::numeric::pairwise_sum_by;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Constant,
    Cos,
    Sin,
}

#[derive(Debug, Clone)]
struct Mode {
    k: Vec<i64>,
    part: Part,
    /// `scale * (1 + 4 pi^2 |k|^2)^{-s0/2}`
    amplitude: f64,
}

#[derive(Debug, Clone)]
pub struct FourierBasis {
    d: usize,
    n: usize,
    sobolev_order: f64,
    scale: f64,
    modes: Vec<Mode>,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl FourierBasis {
    pub fn new(d: usize, n: usize, sobolev_order: f64, scale: f64) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(invalid(format!("dimension {d} is not supported")));
        }
        if n < 2 {
            return Err(invalid("grid needs at least two points per axis"));
        }
        if !(scale > 0.0) || !sobolev_order.is_finite() {
            return Err(invalid("basis scale must be positive"));
        }
        let half = ((n - 1) / 2) as i64;
        let mut reps: Vec<Vec<i64>> = Vec::new();
        let side = (2 * half + 1) as usize;
        for flat in 0..side.pow(d as u32) {
            let mut k = vec![0i64; d];
            let mut rest = flat;
            for m in (0..d).rev() {
                k[m] = (rest % side) as i64 - half;
                rest /= side;
            }
            let lead = k.iter().find(|&&x| x != 0);
            if lead.is_none_or(|&x| x > 0) {
                reps.push(k);
            }
        }
        reps.sort_by(|a, b| {
            let na: i64 = a.iter().map(|x| x * x).sum();
            let nb: i64 = b.iter().map(|x| x * x).sum();
            na.cmp(&nb).then_with(|| a.cmp(b))
        });
        let mut modes = Vec::with_capacity(side.pow(d as u32));
        for k in reps {
            let k2: i64 = k.iter().map(|x| x * x).sum();
            let amplitude = scale * (1.0 + 4.0 * PI * PI * k2 as f64).powf(-sobolev_order / 2.0);
            if k2 == 0 {
                modes.push(Mode { k, part: Part::Constant, amplitude });
            } else {
                modes.push(Mode { k: k.clone(), part: Part::Cos, amplitude });
                modes.push(Mode { k, part: Part::Sin, amplitude });
            }
        }
        let cos_table = (0..n).map(|q| (2.0 * PI * q as f64 / n as f64).cos()).collect();
        let sin_table = (0..n).map(|q| (2.0 * PI * q as f64 / n as f64).sin()).collect();
        Ok(FourierBasis {
            d,
            n,
            sobolev_order,
            scale,
            modes,
            cos_table,
            sin_table,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn sobolev_order(&self) -> f64 {
        self.sobolev_order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Largest number of modes the grid resolves without aliasing.
    pub fn max_terms(&self) -> usize {
        self.modes.len()
    }

    /// Frequency vector of 1-based basis index `i`.
    pub fn frequency(&self, i: usize) -> Option<&[i64]> {
        self.modes.get(i.checked_sub(1)?).map(|m| m.k.as_slice())
    }

    fn check_terms(&self, n_terms: usize) -> Result<()> {
        if n_terms > self.max_terms() {
            return Err(Error::OutOfRange(format!(
                "{n_terms} terms requested but a grid of {} resolves only {}",
                self.n,
                self.max_terms()
            )));
        }
        Ok(())
    }

    /// Unscaled L2-normalized mode `e_i` at flat grid index `flat`.
    #[inline]
    fn unit_mode(&self, mode: &Mode, flat: usize) -> f64 {
        if mode.part == Part::Constant {
            return 1.0;
        }
        let n = self.n as i64;
        let mut rest = flat;
        let mut phase = 0i64;
        for m in (0..self.d).rev() {
            let coord = (rest % self.n) as i64;
            rest /= self.n;
            phase += mode.k[m] * coord;
        }
        let q = phase.rem_euclid(n) as usize;
        let v = if mode.part == Part::Cos {
            self.cos_table[q]
        } else {
            self.sin_table[q]
        };
        std::f64::consts::SQRT_2 * v
    }

    /// Sampled values of basis function `i` (1-based).
    pub fn function(&self, i: usize) -> Result<Vec<f64>> {
        let mode = self
            .modes
            .get(i.wrapping_sub(1))
            .ok_or_else(|| Error::OutOfRange(format!("basis index {i}")))?;
        Ok((0..self.points())
            .map(|p| mode.amplitude * self.unit_mode(mode, p))
            .collect())
    }

    /// Coefficients against the dual family, trapezoidal quadrature.
    pub fn encode(&self, values: &[f64], n_terms: usize) -> Result<Vec<f64>> {
        check_len(self.points(), values.len())?;
        self.check_terms(n_terms)?;
        let cell = 1.0 / self.points() as f64;
        Ok(self.modes[..n_terms]
            .iter()
            .map(|mode| {
                let ip = pairwise_sum_by(values.len(), |p| values[p] * self.unit_mode(mode, p));
                ip * cell / mode.amplitude
            })
            .collect())
    }

    pub fn decode(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_terms(coeffs.len())?;
        let mut out = vec![0.0; self.points()];
        for (mode, &c) in self.modes.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            let a = c * mode.amplitude;
            for (p, o) in out.iter_mut().enumerate() {
                *o += a * self.unit_mode(mode, p);
            }
        }
        Ok(out)
    }

    /// Squared `H^{s0}` norm of a grid function, computed from its DFT.
    pub fn norm_sq(&self, values: &[f64]) -> Result<f64> {
        sobolev_norm_sq(values, self.d, self.n, self.sobolev_order)
    }
}

/// `sum_k (1 + 4 pi^2 |k|^2)^{s0} |hat x_k|^2` over all grid frequencies.
pub fn sobolev_norm_sq(values: &[f64], d: usize, n: usize, s0: f64) -> Result<f64> {
    let total = n.pow(d as u32);
    check_len(total, values.len())?;
    let mut data: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    // Transform along each axis in turn.
    let mut line = vec![Complex::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        for base in 0..total {
            if !(base / stride).is_multiple_of(n) {
                continue;
            }
            for j in 0..n {
                line[j] = data[base + j * stride];
            }
            fft.process(&mut line);
            for j in 0..n {
                data[base + j * stride] = line[j];
            }
        }
    }
    let norm = 1.0 / total as f64;
    let signed = |j: usize| -> f64 {
        if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    Ok(pairwise_sum_by(total, |flat| {
        let mut rest = flat;
        let mut k2 = 0.0;
        for _ in 0..d {
            let k = signed(rest % n);
            k2 += k * k;
            rest /= n;
        }
        let weight = (1.0 + 4.0 * PI * PI * k2).powf(s0);
        weight * (data[flat] * norm).norm_sqr()
    }))
}
