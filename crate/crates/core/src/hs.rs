//! Functional calculus for Hilbert-Schmidt operators on finite sections:
//! `A = U diag(s) V^T` is mapped to `U diag(f(s)) V^T`.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::pairwise_sum_by;
use crate::weights::WeightSequence;

/// Scalar function applied to singular values. Must vanish at 0.
#[derive(Clone)]
pub enum ScalarFn {
    Identity,
    /// `max(x - c, 0)`
    SoftThreshold(f64),
    /// `min(x, c)`
    Clip(f64),
    /// `a x`
    Scaled(f64),
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lipschitz: f64,
    },
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Identity => write!(fm, "Identity"),
            ScalarFn::SoftThreshold(c) => write!(fm, "SoftThreshold({c})"),
            ScalarFn::Clip(c) => write!(fm, "Clip({c})"),
            ScalarFn::Scaled(a) => write!(fm, "Scaled({a})"),
            ScalarFn::Custom { lipschitz, .. } => write!(fm, "Custom(L = {lipschitz})"),
        }
    }
}

impl ScalarFn {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lipschitz: f64) -> Result<Self> {
        if f(0.0) != 0.0 {
            return Err(invalid("f(0) must be 0"));
        }
        Ok(ScalarFn::Custom {
            f: Arc::new(f),
            lipschitz,
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Identity => x,
            ScalarFn::SoftThreshold(c) => (x - c).max(0.0),
            ScalarFn::Clip(c) => x.min(*c),
            ScalarFn::Scaled(a) => a * x,
            ScalarFn::Custom { f, .. } => f(x),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            ScalarFn::Identity => 1.0,
            ScalarFn::SoftThreshold(_) | ScalarFn::Clip(_) => 1.0,
            ScalarFn::Scaled(a) => a.abs(),
            ScalarFn::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn check(&self) -> Result<()> {
        let at0 = self.apply(0.0);
        if at0 != 0.0 {
            return Err(invalid(format!("f(0) = {at0}, the calculus needs f(0) = 0")));
        }
        if let ScalarFn::Clip(c) = self {
            if !(*c >= 0.0) {
                return Err(invalid("clip level must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Singular triples sorted by decreasing singular value.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(invalid("empty matrix"));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let dec = a.clone().svd(true, true);
    let u = dec.u.ok_or_else(|| invalid("SVD returned no left vectors"))?;
    let vt = dec.v_t.ok_or_else(|| invalid("SVD returned no right vectors"))?;
    let raw = dec.singular_values;
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]).then(i.cmp(&j)));
    let k = order.len();
    let mut us = DMatrix::zeros(a.nrows(), k);
    let mut vs = DMatrix::zeros(a.ncols(), k);
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &vt.row(src).transpose());
        s.push(raw[src]);
    }
    Ok(Svd { u: us, s, v: vs })
}

fn assemble(dec: &Svd, f: &ScalarFn, keep: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(dec.u.nrows(), dec.v.nrows());
    for j in 0..keep.min(dec.s.len()) {
        let fs = f.apply(dec.s[j]);
        if fs != 0.0 {
            out += fs * dec.u.column(j) * dec.v.column(j).transpose();
        }
    }
    out
}

/// `sum_j f(s_j) u_j v_j^T`.
pub fn functional_calculus(a: &DMatrix<f64>, f: &ScalarFn) -> Result<DMatrix<f64>> {
    f.check()?;
    let dec = svd(a)?;
    Ok(assemble(&dec, f, dec.s.len()))
}

/// Keep only the `n` largest singular triples.
pub fn truncated_calculus(a: &DMatrix<f64>, f: &ScalarFn, n: usize) -> Result<DMatrix<f64>> {
    f.check()?;
    let dec = svd(a)?;
    Ok(assemble(&dec, f, n))
}

/// `sum_{j > n} f(s_j)^2`, the squared Hilbert-Schmidt truncation error.
pub fn truncation_tail_sq(a: &DMatrix<f64>, f: &ScalarFn, n: usize) -> Result<f64> {
    f.check()?;
    let s = svd(a)?.s;
    let tail = &s[n.min(s.len())..];
    Ok(pairwise_sum_by(tail.len(), |i| f.apply(tail[i]).powi(2)))
}

pub fn hs_norm(a: &DMatrix<f64>) -> f64 {
    let v = a.as_slice();
    pairwise_sum_by(v.len(), |i| v[i] * v[i]).sqrt()
}

/// Schatten-`p` norm, `p` in `[1, inf]`.
pub fn schatten_norm(a: &DMatrix<f64>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("Schatten exponent must be at least 1"));
    }
    let s = svd(a)?.s;
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    Ok(pairwise_sum_by(s.len(), |i| s[i].powf(p)).powf(1.0 / p))
}

/// `sqrt(sum_j s_j^2 w_j^{-2 s})`.
pub fn hs_smoothness_norm(a: &DMatrix<f64>, smoothness: f64, w: &WeightSequence) -> Result<f64> {
    let s = svd(a)?.s;
    Ok(pairwise_sum_by(s.len(), |i| s[i] * s[i] * w.at(i + 1).powf(-2.0 * smoothness)).sqrt())
}

/// Largest `||G(f)(A) - G(f)(B)||_HS / ||A - B||_HS` over the given pairs.
pub fn lipschitz_ratio(f: &ScalarFn, pairs: &[(DMatrix<f64>, DMatrix<f64>)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        let den = hs_norm(&(a - b));
        if den < 1e-12 {
            continue;
        }
        let num = hs_norm(&(functional_calculus(a, f)? - functional_calculus(b, f)?));
        worst = worst.max(num / den);
    }
    Ok(worst)
}

pub(crate) fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Matrix with i.i.d. standard normal entries.
pub fn random_gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_gaussian(n, n, &mut rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Operators `U diag(s) V^T` with fixed orthogonal factors and singular
/// values read from a coefficient vector (absolute values, sorted).
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

impl SpectralFamily {
    pub fn new(n: usize, seed: u64) -> Self {
        SpectralFamily {
            u: random_orthogonal(n, seed),
            v: random_orthogonal(n, seed.wrapping_add(0x9E37_79B9_7F4A_7C15)),
        }
    }

    pub fn size(&self) -> usize {
        self.u.nrows()
    }

    /// Singular values encoded by `coeffs`; entries past the matrix size are dropped.
    pub fn singular_values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut s: Vec<f64> = coeffs.iter().take(self.size()).map(|c| c.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s.resize(self.size(), 0.0);
        s
    }

    pub fn matrix(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let s = self.singular_values(coeffs);
        let mut scaled = self.u.clone();
        for (j, sj) in s.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*sj);
        }
        scaled * self.v.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => MatrixFormat::Json,
            _ => MatrixFormat::Csv,
        }
    }
}

/// Dense row-major matrix from CSV or a JSON array of rows.
pub fn read_matrix<R: BufRead>(reader: R, format: MatrixFormat) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = match format {
        MatrixFormat::Json => serde_json::from_reader(reader)?,
        MatrixFormat::Csv => {
            let mut rows = Vec::new();
            for (ln, line) in reader.lines().enumerate() {
                let line = line?;
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row = line
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
            rows
        }
    };
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn write_matrix<W: Write>(mut writer: W, a: &DMatrix<f64>, format: MatrixFormat) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect();
    match format {
        MatrixFormat::Json => serde_json::to_writer(&mut writer, &rows)?,
        MatrixFormat::Csv => {
            for row in rows {
                let line: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                writeln!(writer, "{}", line.join(","))?;
            }
        }
    }
    Ok(())
}
