//! Single-hidden-layer tanh network trained by Adam on squared loss.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetOptions {
    pub hidden: usize,
    pub epochs: usize,
    pub batch: usize,
    pub learning_rate: f64,
    pub train_samples: usize,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            hidden: 32,
            epochs: 300,
            batch: 64,
            learning_rate: 5e-3,
            train_samples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetModel {
    pub half_widths: Vec<f64>,
    pub hidden: usize,
    /// Row-major `hidden x dims`.
    pub w_in: Vec<f64>,
    pub b_in: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: f64,
    /// Targets are standardized during training; these undo it.
    pub y_mean: f64,
    pub y_scale: f64,
}

impl NetModel {
    pub fn dims(&self) -> usize {
        self.half_widths.len()
    }

    /// Stored scalars excluding the input transform.
    pub fn weight_count(&self) -> usize {
        self.w_in.len() + self.b_in.len() + self.w_out.len() + 3
    }

    fn normalized(&self, c: &[f64]) -> Vec<f64> {
        self.half_widths
            .iter()
            .enumerate()
            .map(|(i, a)| c.get(i).copied().unwrap_or(0.0) / a)
            .collect()
    }

    fn raw(&self, z: &[f64], hidden_out: &mut [f64]) -> f64 {
        let m = z.len();
        let mut y = self.b_out;
        for (h, act) in hidden_out.iter_mut().enumerate().take(self.hidden) {
            let row = &self.w_in[h * m..(h + 1) * m];
            let pre: f64 = self.b_in[h] + row.iter().zip(z).map(|(w, x)| w * x).sum::<f64>();
            *act = pre.tanh();
            y += self.w_out[h] * *act;
        }
        y
    }

    pub fn evaluate(&self, c: &[f64]) -> f64 {
        let z = self.normalized(c);
        let mut act = vec![0.0; self.hidden];
        self.y_mean + self.y_scale * self.raw(&z, &mut act)
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        self.step += 1;
        let c1 = 1.0 - B1.powi(self.step);
        let c2 = 1.0 - B2.powi(self.step);
        for i in 0..params.len() {
            self.m[i] = B1 * self.m[i] + (1.0 - B1) * grad[i];
            self.v[i] = B2 * self.v[i] + (1.0 - B2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + 1e-12);
        }
    }
}

/// Trains on `(inputs, targets)`; deterministic for a fixed seed.
pub fn train(
    half_widths: &[f64],
    inputs: &[Vec<f64>],
    targets: &[f64],
    opts: &NetOptions,
    seed: u64,
) -> NetModel {
    let m = half_widths.len();
    let h = opts.hidden.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = targets.len().max(1) as f64;
    let y_mean = targets.iter().sum::<f64>() / n;
    let var = targets.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n;
    let y_scale = if var > 0.0 { var.sqrt() } else { 1.0 };

    let init = 1.0 / (m.max(1) as f64).sqrt();
    let mut model = NetModel {
        half_widths: half_widths.to_vec(),
        hidden: h,
        w_in: (0..h * m).map(|_| rng.gen_range(-init..init) * 2.0).collect(),
        b_in: (0..h).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        w_out: (0..h).map(|_| rng.gen_range(-1.0..1.0) / (h as f64).sqrt()).collect(),
        b_out: 0.0,
        y_mean,
        y_scale,
    };
    let zs: Vec<Vec<f64>> = inputs.iter().map(|c| model.normalized(c)).collect();
    let ys: Vec<f64> = targets.iter().map(|y| (y - y_mean) / y_scale).collect();

    // Flat parameter layout: w_in, b_in, w_out, b_out.
    let total = h * m + 2 * h + 1;
    let mut adam = Adam::new(total);
    let mut order: Vec<usize> = (0..zs.len()).collect();
    let mut act = vec![0.0; h];
    let batch = opts.batch.max(1);
    for epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        // Cosine decay keeps the last epochs from bouncing around.
        let progress = epoch as f64 / opts.epochs.max(1) as f64;
        let lr = opts.learning_rate * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos()) + 1e-5;
        for chunk in order.chunks(batch) {
            let mut grad = vec![0.0; total];
            for &k in chunk {
                let z = &zs[k];
                let err = model.raw(z, &mut act) - ys[k];
                let scale = 2.0 * err / chunk.len() as f64;
                for j in 0..h {
                    grad[h * m + h + j] += scale * act[j];
                    let back = scale * model.w_out[j] * (1.0 - act[j] * act[j]);
                    grad[h * m + j] += back;
                    for i in 0..m {
                        grad[j * m + i] += back * z[i];
                    }
                }
                grad[total - 1] += scale;
            }
            let mut flat = Vec::with_capacity(total);
            flat.extend_from_slice(&model.w_in);
            flat.extend_from_slice(&model.b_in);
            flat.extend_from_slice(&model.w_out);
            flat.push(model.b_out);
            adam.update(&mut flat, &grad, lr);
            model.w_in.copy_from_slice(&flat[..h * m]);
            model.b_in.copy_from_slice(&flat[h * m..h * m + h]);
            model.w_out.copy_from_slice(&flat[h * m + h..h * m + 2 * h]);
            model.b_out = flat[total - 1];
        }
    }
    model
}
