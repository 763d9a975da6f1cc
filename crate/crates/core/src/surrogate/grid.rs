//! Tensor-product multilinear interpolation on anisotropic uniform grids.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

/// Largest input dimension the grid backend accepts.
pub const MAX_GRID_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct GridModel {
    pub half_widths: Vec<f64>,
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
}

/// Nodes per axis at refinement `level`: spacing is roughly uniform in
/// absolute terms, and every level halves it, so grids are nested.
pub fn grid_shape(half_widths: &[f64], level: u32) -> Vec<usize> {
    let widest = half_widths.iter().cloned().fold(0.0, f64::max);
    half_widths
        .iter()
        .map(|&a| {
            let e = level as f64 + (a / widest).log2().round();
            1 + (1usize << (e.max(0.0) as u32))
        })
        .collect()
}

pub fn node_count(nodes: &[usize]) -> usize {
    nodes.iter().product()
}

/// Coordinates of grid node `flat` (last axis fastest).
pub fn node_point(half_widths: &[f64], nodes: &[usize], flat: usize) -> Vec<f64> {
    let mut out = vec![0.0; nodes.len()];
    let mut rest = flat;
    for axis in (0..nodes.len()).rev() {
        let k = rest % nodes[axis];
        rest /= nodes[axis];
        let u = k as f64 / (nodes[axis] - 1) as f64;
        out[axis] = half_widths[axis] * (2.0 * u - 1.0);
    }
    out
}

impl GridModel {
    pub fn dims(&self) -> usize {
        self.nodes.len()
    }

    /// Multilinear interpolant at `c`; coordinates past the grid dimension
    /// are ignored, missing ones read as zero, and points outside the box
    /// are clamped onto it.
    pub fn evaluate(&self, c: &[f64]) -> f64 {
        let m = self.nodes.len();
        let mut base = 0usize;
        let mut frac = [0.0f64; MAX_GRID_DIM];
        let mut strides = [0usize; MAX_GRID_DIM];
        let mut stride = 1usize;
        for axis in (0..m).rev() {
            let n = self.nodes[axis];
            let x = c.get(axis).copied().unwrap_or(0.0);
            let u = ((x / self.half_widths[axis] + 1.0) / 2.0).clamp(0.0, 1.0);
            let pos = u * (n - 1) as f64;
            let i0 = (pos.floor() as usize).min(n - 2);
            frac[axis] = pos - i0 as f64;
            strides[axis] = stride;
            base += i0 * stride;
            stride *= n;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << m) {
            let mut w = 1.0;
            let mut idx = base;
            for axis in 0..m {
                if corner >> axis & 1 == 1 {
                    w *= frac[axis];
                    idx += strides[axis];
                } else {
                    w *= 1.0 - frac[axis];
                }
            }
            if w != 0.0 {
                acc += w * self.values[idx];
            }
        }
        acc
    }
}

/// Memoized vector-valued target, keyed by the exact bits of the point.
pub(crate) struct EvalCache<'a> {
    target: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    store: Mutex<HashMap<Vec<u64>, Vec<f64>>>,
}

impl<'a> EvalCache<'a> {
    pub fn new(target: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync)) -> Self {
        EvalCache {
            target,
            store: Mutex::new(HashMap::new()),
        }
    }

    fn key(p: &[f64]) -> Vec<u64> {
        p.iter().map(|x| (x + 0.0).to_bits()).collect()
    }

    /// Values at every point, evaluating only the ones not seen before.
    pub fn values(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let missing: Vec<&Vec<f64>> = {
            let store = self.store.lock().expect("cache lock");
            let mut seen = std::collections::HashSet::new();
            points
                .iter()
                .filter(|p| {
                    let k = Self::key(p);
                    !store.contains_key(&k) && seen.insert(k)
                })
                .collect()
        };
        let fresh: Vec<Vec<f64>> = missing.par_iter().map(|p| (self.target)(p)).collect();
        let mut store = self.store.lock().expect("cache lock");
        for (p, v) in missing.into_iter().zip(fresh) {
            store.insert(Self::key(p), v);
        }
        points
            .iter()
            .map(|p| store[&Self::key(p)].clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(half: &[f64], nodes: Vec<usize>, f: impl Fn(&[f64]) -> f64) -> GridModel {
        let values = (0..node_count(&nodes))
            .map(|k| f(&node_point(half, &nodes, k)))
            .collect();
        GridModel {
            half_widths: half.to_vec(),
            nodes,
            values,
        }
    }

    #[test]
    fn exact_on_multilinear_functions() {
        let half = [1.0, 0.5, 0.25];
        let f = |x: &[f64]| 1.0 + 2.0 * x[0] - x[1] + 3.0 * x[0] * x[1] * x[2];
        let g = fit(&half, vec![2, 3, 2], f);
        for p in [[0.3, -0.2, 0.1], [-1.0, 0.5, -0.25], [0.0, 0.0, 0.0]] {
            assert!((g.evaluate(&p) - f(&p)).abs() < 1e-13);
        }
    }

    #[test]
    fn shapes_are_nested_and_anisotropic() {
        let half = [1.0, 0.35, 0.2, 0.01];
        assert_eq!(grid_shape(&half, 0), vec![2, 2, 2, 2]);
        let s3 = grid_shape(&half, 3);
        assert_eq!(s3[0], 9);
        assert!(s3[1] < s3[0] && s3[3] == 2);
        let s4 = grid_shape(&half, 4);
        for (a, b) in s3.iter().zip(&s4) {
            assert_eq!((b - 1) % (a - 1), 0);
        }
    }

    #[test]
    fn cache_reuses_nested_nodes() {
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let target = |x: &[f64]| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            vec![x[0]]
        };
        let cache = EvalCache::new(&target);
        let half = [1.0];
        let coarse: Vec<Vec<f64>> = (0..3).map(|k| node_point(&half, &[3], k)).collect();
        let fine: Vec<Vec<f64>> = (0..5).map(|k| node_point(&half, &[5], k)).collect();
        cache.values(&coarse);
        cache.values(&fine);
        assert_eq!(calls.load(std::sync::atomic::Ordering::Relaxed), 5);
    }
}
