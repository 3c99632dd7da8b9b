//! Chebyshev expansion of `f(H)·v` for real symmetric `H` given as a matrix-free
//! product, evaluated for several functions at once on a few target entries.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Chebyshev coefficients of `g` on `[-1, 1]`, from `nodes` Chebyshev–Gauss samples.
pub fn chebyshev_coefficients(g: impl Fn(f64) -> C64, nodes: usize) -> Vec<C64> {
    let m = nodes;
    let mut buf = vec![C64::new(0.0, 0.0); 2 * m];
    for j in 0..m {
        let x = (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
        let v = g(x);
        buf[j] = v;
        buf[2 * m - 1 - j] = v;
    }
    FftPlanner::new().plan_fft_forward(2 * m).process(&mut buf);
    let mut out: Vec<C64> = (0..m)
        .map(|k| {
            let phase = C64::from_polar(1.0, -std::f64::consts::PI * k as f64 / (2 * m) as f64);
            phase * buf[k] / m as f64
        })
        .collect();
    out[0] /= 2.0;
    out
}

/// Number of terms after which every coefficient stays below `tol · max|c|`.
fn effective_degree(coeffs: &[C64], tol: f64) -> usize {
    let peak = coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    let cut = tol * peak.max(f64::MIN_POSITIVE);
    coeffs.iter().rposition(|c| c.norm() > cut).map_or(1, |k| k + 1)
}

/// Spectral window `[lo, hi]` enclosing the spectrum of the operator.
#[derive(Debug, Clone, Copy)]
pub struct SpectralBounds {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralBounds {
    fn center(&self) -> f64 {
        0.5 * (self.hi + self.lo)
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// `[f_i(H) v]_target` for every function `f_i` and target index.
///
/// `time_scale` bounds `|d/dE log f|`, which fixes the number of samples needed.
pub fn evolve_entries(
    apply: impl Fn(&[f64], &mut [f64]),
    bounds: SpectralBounds,
    source: &[f64],
    funcs: &[Box<dyn Fn(f64) -> C64 + Sync + '_>],
    time_scale: f64,
    targets: &[usize],
) -> Result<Vec<Vec<C64>>> {
    let n = source.len();
    if targets.iter().any(|&t| t >= n) {
        return Err(Error::Internal("target index outside the vector".into()));
    }
    if bounds.hi.partial_cmp(&bounds.lo) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Numeric("empty spectral window".into()));
    }
    let (mid, half) = (bounds.center(), bounds.half_width());
    let span = time_scale * half;
    let nodes = ((2.0 * span + 128.0) as usize).next_power_of_two();
    let coeffs: Vec<Vec<C64>> = funcs
        .iter()
        .map(|f| chebyshev_coefficients(|x| f(mid + half * x), nodes))
        .collect();
    let degree = coeffs.iter().map(|c| effective_degree(c, 1e-13)).max().unwrap_or(1);
    if degree + 8 >= nodes {
        return Err(Error::Numeric(format!("Chebyshev series did not resolve (degree {degree})")));
    }

    let mut out = vec![vec![C64::new(0.0, 0.0); targets.len()]; funcs.len()];
    let accumulate = |out: &mut Vec<Vec<C64>>, k: usize, vec: &[f64]| {
        for (fi, c) in coeffs.iter().enumerate() {
            for (ti, &t) in targets.iter().enumerate() {
                out[fi][ti] += c[k] * vec[t];
            }
        }
    };

    // Scaled operator H̃ = (H − mid)/half.
    let mut scratch = vec![0.0; n];
    let mut scaled = |x: &[f64], y: &mut [f64]| {
        apply(x, &mut scratch);
        for i in 0..n {
            y[i] = (scratch[i] - mid * x[i]) / half;
        }
    };

    let mut prev = source.to_vec();
    accumulate(&mut out, 0, &prev);
    if degree == 1 {
        return Ok(out);
    }
    let mut cur = vec![0.0; n];
    scaled(&prev, &mut cur);
    accumulate(&mut out, 1, &cur);
    let mut next = vec![0.0; n];
    for k in 2..degree {
        scaled(&cur, &mut next);
        for i in 0..n {
            next[i] = 2.0 * next[i] - prev[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        accumulate(&mut out, k, &cur);
    }
    Ok(out)
}

/// `y = T x` for a symmetric tridiagonal `T`.
pub fn tridiagonal_apply(diag: &[f64], off: &[f64], x: &[f64], y: &mut [f64]) {
    let n = diag.len();
    for i in 0..n {
        let mut acc = diag[i] * x[i];
        if i > 0 {
            acc += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            acc += off[i] * x[i + 1];
        }
        y[i] = acc;
    }
}

/// Gershgorin window of a symmetric tridiagonal matrix.
pub fn tridiagonal_bounds(diag: &[f64], off: &[f64]) -> SpectralBounds {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-9 * (hi - lo).abs().max(1.0);
    SpectralBounds { lo: lo - pad, hi: hi + pad }
}
