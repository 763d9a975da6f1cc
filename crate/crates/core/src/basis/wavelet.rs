//! Multiresolution index bookkeeping and the Besov sequence norm.
//!
//! An index is a level `j`, a shift `k in {0..2^j-1}^d` and a type
//! `l in {0,1}^d`, with `l = 0` allowed only on level 0. Level 0 relabels
//! onto `0..2^d-1` and level `j >= 1` onto `2^{dj}+1 ..= 2^{d(j+1)}`, in
//! lexicographic order of `(k, l)`. The integer `2^d` is not the image of
//! any index.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WaveletIndex {
    pub level: u32,
    pub shift: Vec<u64>,
    pub kind: Vec<u8>,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > 8 {
        return Err(invalid(format!("dimension {d} is not supported")));
    }
    Ok(())
}

fn max_level(d: usize) -> u32 {
    // Keep 2^{d(j+1)} inside u64.
    (62 / d as u32).saturating_sub(1)
}

fn binary_rank(bits: &[u8]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

/// Number of `(k, l)` pairs on level `j`.
pub fn level_size(d: usize, j: u32) -> u64 {
    let shifts = 1u64 << (d as u32 * j);
    let kinds = if j == 0 { 1u64 << d } else { (1u64 << d) - 1 };
    shifts * kinds
}

/// First label used on level `j`.
pub fn level_start(d: usize, j: u32) -> u64 {
    if j == 0 {
        0
    } else {
        (1u64 << (d as u32 * j)) + 1
    }
}

pub fn relabel(d: usize, idx: &WaveletIndex) -> Result<u64> {
    check_dim(d)?;
    let j = idx.level;
    if j > max_level(d) {
        return Err(Error::OutOfRange(format!("level {j} is too deep for d = {d}")));
    }
    if idx.shift.len() != d || idx.kind.len() != d {
        return Err(invalid("shift and type must have d components"));
    }
    let side = 1u64 << j;
    if idx.shift.iter().any(|&k| k >= side) {
        return Err(Error::OutOfRange(format!("shift outside {{0..{}}}^d", side - 1)));
    }
    if idx.kind.iter().any(|&l| l > 1) {
        return Err(invalid("type entries must be 0 or 1"));
    }
    let l_rank = binary_rank(&idx.kind);
    if j > 0 && l_rank == 0 {
        return Err(invalid("type 0 occurs only on level 0"));
    }
    let k_rank = idx.shift.iter().fold(0u64, |acc, &k| acc * side + k);
    let kinds = if j == 0 { 1u64 << d } else { (1u64 << d) - 1 };
    let within = k_rank * kinds + if j == 0 { l_rank } else { l_rank - 1 };
    Ok(level_start(d, j) + within)
}

pub fn relabel_inverse(d: usize, label: u64) -> Result<WaveletIndex> {
    check_dim(d)?;
    let base = 1u64 << d;
    let (j, within) = if label < base {
        (0u32, label)
    } else if label == base {
        return Err(Error::OutOfRange(format!("{label} is not the label of any index")));
    } else {
        let mut j = 1u32;
        while label > (1u64 << (d as u32 * (j + 1))) {
            j += 1;
            if j > max_level(d) {
                return Err(Error::OutOfRange(format!("label {label} is too large")));
            }
        }
        (j, label - level_start(d, j))
    };
    let kinds = if j == 0 { base } else { base - 1 };
    let k_rank = within / kinds;
    let l_rank = within % kinds + if j == 0 { 0 } else { 1 };
    let side = 1u64 << j;
    let mut shift = vec![0u64; d];
    let mut rest = k_rank;
    for m in (0..d).rev() {
        shift[m] = rest % side;
        rest /= side;
    }
    let kind = (0..d).map(|m| ((l_rank >> (d - 1 - m)) & 1) as u8).collect();
    Ok(WaveletIndex {
        level: j,
        shift,
        kind,
    })
}

/// All indices of level `j` in label order.
pub fn level_indices(d: usize, j: u32) -> Vec<WaveletIndex> {
    let start = level_start(d, j);
    (0..level_size(d, j))
        .map(|o| relabel_inverse(d, start + o).expect("label inside level range"))
        .collect()
}

/// Besov sequence norm with smoothness `gamma` and integrability `p`
/// (`p = f64::INFINITY` for the sup norm).
pub fn besov_norm(coeffs: &[(WaveletIndex, f64)], d: usize, gamma: f64, p: f64) -> Result<f64> {
    check_dim(d)?;
    if !(p >= 1.0) {
        return Err(invalid("p must be at least 1"));
    }
    let df = d as f64;
    if p.is_infinite() {
        return Ok(coeffs
            .iter()
            .map(|(ix, c)| 2f64.powf(ix.level as f64 * (gamma + df / 2.0)) * c.abs())
            .fold(0.0, f64::max));
    }
    let expo = p * (gamma + df / 2.0 - df / p);
    let sum: f64 = coeffs
        .iter()
        .map(|(ix, c)| 2f64.powf(ix.level as f64 * expo) * c.abs().powf(p))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// The same quantity written over relabeled indices:
/// `(sum_i (i+1)^{p gamma/d + p/2 - 1} |c_i|^p)^{1/p}`.
///
/// Labels start at 0, so they are shifted by one before weighting.
pub fn relabeled_norm(coeffs: &[(WaveletIndex, f64)], d: usize, gamma: f64, p: f64) -> Result<f64> {
    check_dim(d)?;
    if !(p >= 1.0) || p.is_infinite() {
        return Err(invalid("relabeled norm needs finite p >= 1"));
    }
    let df = d as f64;
    let expo = p * gamma / df + p / 2.0 - 1.0;
    let mut sum = 0.0;
    for (ix, c) in coeffs {
        let i = relabel(d, ix)? as f64 + 1.0;
        sum += i.powf(expo) * c.abs().powf(p);
    }
    Ok(sum.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ix(level: u32, shift: &[u64], kind: &[u8]) -> WaveletIndex {
        WaveletIndex {
            level,
            shift: shift.to_vec(),
            kind: kind.to_vec(),
        }
    }

    #[test]
    fn level_zero_and_one_in_one_dimension() {
        assert_eq!(relabel(1, &ix(0, &[0], &[0])).unwrap(), 0);
        assert_eq!(relabel(1, &ix(0, &[0], &[1])).unwrap(), 1);
        assert_eq!(relabel(1, &ix(1, &[0], &[1])).unwrap(), 3);
        assert_eq!(relabel(1, &ix(1, &[1], &[1])).unwrap(), 4);
        assert_eq!(relabel_inverse(1, 3).unwrap(), ix(1, &[0], &[1]));
        assert!(relabel_inverse(1, 2).is_err());
    }

    #[test]
    fn rejects_zero_type_above_level_zero() {
        assert!(relabel(1, &ix(1, &[0], &[0])).is_err());
        assert!(relabel(2, &ix(0, &[1, 0], &[0, 1])).is_err());
    }

    #[test]
    fn level_sizes_telescope() {
        for d in 1..=3 {
            for j in 1..6u32 {
                let below: u64 = (0..j).map(|m| level_size(d, m)).sum();
                assert_eq!(below, 1u64 << (d as u32 * j));
            }
        }
    }

    #[test]
    fn besov_single_coefficient() {
        let c = vec![(ix(2, &[0], &[1]), 1.0)];
        assert_abs_diff_eq!(besov_norm(&c, 1, 1.0, 2.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(besov_norm(&c, 1, 1.0, f64::INFINITY).unwrap(), 2f64.powf(3.0), epsilon = 1e-14);
        assert_eq!(besov_norm(&[], 1, 1.0, 2.0).unwrap(), 0.0);
    }
}
