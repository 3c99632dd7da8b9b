//! Eigenvalues of real symmetric tridiagonal matrices by implicit QL with shifts.

use crate::error::{Error, Result};

/// Eigenvalues (ascending) of the tridiagonal matrix with `diag` and `off`,
/// where `off[i]` couples rows `i` and `i+1`.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(format!("tridiagonal QL did not converge at row {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("tridiagonal QL produced non-finite values".into()));
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

const LANES: usize = 8;

/// Sturm counts at `LANES` shifts at once; `off2[i]` couples rows `i − 1` and `i`, with `off2[0] = 0`.
fn count_lanes(diag: &[f64], off2: &[f64], xs: &[f64; LANES], pivmin: f64) -> [usize; LANES] {
    let mut d = [1.0f64; LANES];
    let mut c = [0usize; LANES];
    for (&a, &e2) in diag.iter().zip(off2) {
        for l in 0..LANES {
            let mut v = a - xs[l] - e2 / d[l];
            if v.abs() < pivmin {
                v = -pivmin;
            }
            c[l] += (v < 0.0) as usize;
            d[l] = v;
        }
    }
    c
}

/// Eigenvalues below `upper` (ascending) by Sturm bisection; cost grows with their number.
pub fn tridiagonal_eigenvalues_below(diag: &[f64], off: &[f64], upper: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::Internal(format!("off-diagonal has length {}, expected {}", off.len(), n - 1)));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) || upper.is_nan() {
        return Err(Error::Numeric("non-finite tridiagonal entry".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let tol = 4.0 * f64::EPSILON * scale;
    lo -= tol;
    hi = hi.min(upper) + tol;
    if hi <= lo {
        return Ok(Vec::new());
    }
    let pivmin = f64::MIN_POSITIVE * off.iter().fold(1.0f64, |m, e| m.max(e * e));
    let off2: Vec<f64> = std::iter::once(0.0).chain(off.iter().map(|e| e * e)).collect();
    let k = count_lanes(diag, &off2, &[hi; LANES], pivmin)[0];
    // One bracket [a, b] per eigenvalue index, all bisected in lockstep.
    let mut brackets = vec![(lo, hi); k];
    loop {
        let active: Vec<usize> = (0..k).filter(|&j| brackets[j].1 - brackets[j].0 > tol).collect();
        if active.is_empty() {
            break;
        }
        for chunk in active.chunks(LANES) {
            let mut xs = [hi; LANES];
            for (l, &j) in chunk.iter().enumerate() {
                xs[l] = 0.5 * (brackets[j].0 + brackets[j].1);
            }
            let counts = count_lanes(diag, &off2, &xs, pivmin);
            for (l, &j) in chunk.iter().enumerate() {
                let (a, b) = brackets[j];
                let mid = xs[l];
                if mid <= a || mid >= b {
                    brackets[j] = (mid, mid);
                } else if counts[l] > j {
                    brackets[j].1 = mid;
                } else {
                    brackets[j].0 = mid;
                }
            }
        }
    }
    let mut out: Vec<f64> = brackets.iter().map(|(a, b)| 0.5 * (a + b)).filter(|&e| e < upper).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;

    #[test]
    fn path_graph_laplacian() {
        // Eigenvalues of the n-site chain with diagonal 2 and off-diagonal −1: 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let vals = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let expect = 2.0 - 2.0 * (((k + 1) as f64) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - expect).abs() < 1e-12, "{k}: {v} vs {expect}");
        }
    }

    #[test]
    fn trivial_sizes() {
        assert!(tridiagonal_eigenvalues(&[], &[]).unwrap().is_empty());
        assert_eq!(tridiagonal_eigenvalues(&[3.5], &[]).unwrap(), vec![3.5]);
        assert!(tridiagonal_eigenvalues(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn bisection_finds_low_path_eigenvalues() {
        let n = 200;
        let vals = tridiagonal_eigenvalues_below(&vec![2.0; n], &vec![-1.0; n - 1], 0.1).unwrap();
        let all = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        let expect: Vec<f64> = all.into_iter().filter(|&e| e < 0.1).collect();
        assert_eq!(vals.len(), expect.len());
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn bisection_agrees_with_ql(
            diag in proptest::collection::vec(-5.0f64..5.0, 1..40),
            seed in proptest::collection::vec(-3.0f64..3.0, 40),
            cut in -6.0f64..12.0,
        ) {
            let n = diag.len();
            let off: Vec<f64> = seed[..n - 1].to_vec();
            let expect: Vec<f64> = tridiagonal_eigenvalues(&diag, &off).unwrap().into_iter().filter(|&e| e < cut - 1e-9).collect();
            let got = tridiagonal_eigenvalues_below(&diag, &off, cut).unwrap();
            prop_assert!(got.len() >= expect.len() && got.len() <= expect.len() + 1);
            for (a, b) in got.iter().zip(&expect) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn agrees_with_dense_solver(
            diag in proptest::collection::vec(-5.0f64..5.0, 1..40),
            seed in proptest::collection::vec(-3.0f64..3.0, 40),
        ) {
            let n = diag.len();
            let off: Vec<f64> = seed[..n - 1].to_vec();
            let vals = tridiagonal_eigenvalues(&diag, &off).unwrap();
            let dense = DMatrix::from_fn(n, n, |i, j| {
                if i == j { diag[i] } else if i + 1 == j { off[i] } else if j + 1 == i { off[j] } else { 0.0 }
            });
            let mut expect: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
            expect.sort_by(f64::total_cmp);
            for (a, b) in vals.iter().zip(&expect) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
