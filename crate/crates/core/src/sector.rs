//! Matrix-free model of the quadratic Hamiltonians.
//!
//! `P²/2` only couples storage indices `k` and `k ± 2`, so the full space splits
//! into rings of sites. The sector fixed by `U^{N/2}` and `V^{N/2}` is the ring of
//! `N/4` even sites identified with their antipodes; it carries one ladder of the
//! spectrum and its point states converge to position eigenstates.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::calculus::{GridGeometry, HamiltonianKind};
use crate::chebyshev::{evolve_entries, SpectralBounds};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rational::cis_turns;
use crate::tridiag::{tridiagonal_eigenvalues, tridiagonal_eigenvalues_below};
use crate::weyl::AlgebraDescriptor;

/// Damping ladder for regularized kernels, in units of the lattice spacing.
const KERNEL_EPS: [f64; 3] = [1.0, 2.0, 4.0];
/// Damping ladder for regularized traces.
const TRACE_EPS: [f64; 3] = [0.05, 0.1, 0.2];

/// Value at zero of the quadratic through `(ε, v)` for `ε = e0, 2e0, 4e0`.
pub fn extrapolate_to_zero(values: [C64; 3]) -> C64 {
    values[0] * (8.0 / 3.0) - values[1] * 2.0 + values[2] * (1.0 / 3.0)
}

/// Value at zero of the interpolating polynomial through `(ε_i, v_i)`.
pub fn extrapolate_polynomial(samples: &[(f64, C64)]) -> Result<C64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("need at least one damping value".into()));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (i, &(ei, vi)) in samples.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(ej, _)) in samples.iter().enumerate() {
            if i != j {
                if ei == ej {
                    return Err(Error::InvalidParameter(format!("damping value {ei} repeated")));
                }
                w *= ej / (ej - ei);
            }
        }
        acc += vi * w;
    }
    Ok(acc)
}

/// `Σ_E e^{−i(t−iε)E/ħ}` for each `ε`, extrapolated to `ε → 0`.
pub fn damped_trace(spectrum: &[f64], t: f64, hbar: f64, epsilons: &[f64]) -> Result<C64> {
    if epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidParameter(format!("damping values must be finite and ≥ 0, got {epsilons:?}")));
    }
    let samples: Vec<(f64, C64)> = epsilons
        .iter()
        .map(|&eps| {
            let v = spectrum
                .iter()
                .map(|&e| C64::from_polar((-eps * e / hbar).exp(), -t * e / hbar))
                .sum::<C64>();
            (eps, v)
        })
        .collect();
    extrapolate_polynomial(&samples)
}

/// A periodic chain of sites with on-site energies and a uniform hopping.
#[derive(Debug, Clone)]
pub struct SiteRing {
    pub diag: Vec<f64>,
    pub hop: f64,
}

impl SiteRing {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let l = self.len();
        for m in 0..l {
            let up = (m + 1) % l;
            let down = (m + l - 1) % l;
            y[m] = self.diag[m] * x[m] + self.hop * (x[up] + x[down]);
        }
    }

    pub fn bounds(&self) -> SpectralBounds {
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let r = 2.0 * self.hop.abs();
        let pad = 1e-9 * (hi - lo + 2.0 * r).max(1.0);
        SpectralBounds {
            lo: lo - r - pad,
            hi: hi + r + pad,
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let l = self.len();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diag.clone()));
        for i in 0..l {
            m[((i + 1) % l, i)] += self.hop;
            m[((i + l - 1) % l, i)] += self.hop;
        }
        m
    }

    /// Splits into the even and odd parts under the reflection `m ↦ c − m (mod L)`,
    /// each a symmetric tridiagonal `(diag, off)`.
    pub fn fold(&self, c: i64) -> [(Vec<f64>, Vec<f64>); 2] {
        let l = self.len() as i64;
        let sigma = |m: i64| (c - m).rem_euclid(l);
        let mut reps = Vec::new();
        for i in 0..l {
            if sigma(i) >= i {
                reps.push(i);
            } else {
                break;
            }
        }
        let apply_sparse = |v: &[(i64, f64)]| {
            let mut out: Vec<(i64, f64)> = Vec::new();
            let mut add = |k: i64, w: f64| match out.iter_mut().find(|(j, _)| *j == k) {
                Some(e) => e.1 += w,
                None => out.push((k, w)),
            };
            for &(k, w) in v {
                add(k, self.diag[k as usize] * w);
                add((k + 1).rem_euclid(l), self.hop * w);
                add((k - 1).rem_euclid(l), self.hop * w);
            }
            out
        };
        let inner = |x: &[(i64, f64)], y: &[(i64, f64)]| -> f64 {
            x.iter()
                .map(|(k, w)| y.iter().filter(|(j, _)| j == k).map(|(_, v)| v * w).sum::<f64>())
                .sum()
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let even: Vec<Vec<(i64, f64)>> = reps
            .iter()
            .map(|&r| if sigma(r) == r { vec![(r, 1.0)] } else { vec![(r, h), (sigma(r), h)] })
            .collect();
        let odd: Vec<Vec<(i64, f64)>> = reps
            .iter()
            .filter(|&&r| sigma(r) != r)
            .map(|&r| vec![(r, h), (sigma(r), -h)])
            .collect();
        let block = |basis: &[Vec<(i64, f64)>]| {
            let images: Vec<_> = basis.iter().map(|g| apply_sparse(g)).collect();
            let d = (0..basis.len()).map(|i| inner(&basis[i], &images[i])).collect();
            let e = (1..basis.len()).map(|i| inner(&basis[i], &images[i - 1])).collect();
            (d, e)
        };
        [block(&even), block(&odd)]
    }

    /// Ascending eigenvalues, folded by the reflection with centre `c`.
    pub fn spectrum(&self, c: i64) -> Result<Vec<f64>> {
        if self.len() <= 8 {
            let mut v: Vec<f64> = SymmetricEigen::new(self.dense()).eigenvalues.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            return Ok(v);
        }
        let [(de, ee), (do_, eo)] = self.fold(c);
        let mut v = tridiagonal_eigenvalues(&de, &ee)?;
        v.extend(tridiagonal_eigenvalues(&do_, &eo)?);
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// The part of [`Self::spectrum`] below `upper`.
    pub fn spectrum_below(&self, c: i64, upper: f64) -> Result<Vec<f64>> {
        if self.len() <= 8 {
            return Ok(self.spectrum(c)?.into_iter().filter(|&e| e < upper).collect());
        }
        let [(de, ee), (do_, eo)] = self.fold(c);
        let mut v = tridiagonal_eigenvalues_below(&de, &ee, upper)?;
        v.extend(tridiagonal_eigenvalues_below(&do_, &eo, upper)?);
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

/// Energy above which `e^{−εE/ħ}` is below `1e−20` of the ground-state weight.
fn damping_cutoff(floor: f64, hbar: f64, epsilons: &[f64]) -> f64 {
    let eps = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    if eps > 0.0 {
        floor + 46.0 * hbar / eps
    } else {
        f64::INFINITY
    }
}

fn on_site(geom: &GridGeometry, kind: HamiltonianKind, k: usize) -> f64 {
    let kinetic = 1.0 / (4.0 * geom.b * geom.b);
    match kind {
        HamiltonianKind::Free => kinetic,
        HamiltonianKind::Harmonic => {
            let s = cis_turns(geom.m as i128 * k as i128, geom.n as i128).im;
            kinetic + s * s / (2.0 * geom.a * geom.a)
        }
    }
}

fn hop(geom: &GridGeometry) -> f64 {
    -1.0 / (8.0 * geom.b * geom.b)
}

/// Rings covering the full space: `(ring, reflection centre)`.
pub fn full_space_rings(geom: &GridGeometry, kind: HamiltonianKind) -> Vec<(SiteRing, i64)> {
    let n = geom.n;
    if n % 2 == 1 {
        let diag = (0..n).map(|m| on_site(geom, kind, (2 * m) % n)).collect();
        return vec![(SiteRing { diag, hop: hop(geom) }, 0)];
    }
    (0..2)
        .map(|w| {
            let diag = (0..n / 2).map(|m| on_site(geom, kind, 2 * m + w)).collect();
            (SiteRing { diag, hop: hop(geom) }, -(w as i64))
        })
        .collect()
}

/// Ascending spectrum of the Hamiltonian on the whole `N`-dimensional space.
pub fn full_space_spectrum(geom: &GridGeometry, kind: HamiltonianKind) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(geom.n);
    for (ring, c) in full_space_rings(geom, kind) {
        out.extend(ring.spectrum(c)?);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Damped trace over all `N` levels, extrapolated to `ε → 0` as in [`damped_trace`].
pub fn full_space_damped_trace(geom: &GridGeometry, kind: HamiltonianKind, t: f64, epsilons: &[f64]) -> Result<C64> {
    let mut levels = Vec::new();
    for (ring, c) in full_space_rings(geom, kind) {
        let upper = damping_cutoff(ring.bounds().lo, geom.hbar, epsilons);
        levels.extend(ring.spectrum_below(c, upper)?);
    }
    damped_trace(&levels, t, geom.hbar, epsilons)
}

/// The observable sector of a principal module with its Hamiltonian.
#[derive(Debug, Clone)]
pub struct ObservableSector {
    geometry: GridGeometry,
    kind: HamiltonianKind,
    ring: SiteRing,
}

impl ObservableSector {
    pub fn new(descriptor: &AlgebraDescriptor, kind: HamiltonianKind) -> Result<Self> {
        let geometry = GridGeometry::new(descriptor)?;
        let n = geometry.n;
        if n % 4 != 0 {
            return Err(Error::NoObservableSector(n));
        }
        let diag = (0..n / 4).map(|m| on_site(&geometry, kind, 2 * m)).collect();
        Ok(ObservableSector {
            ring: SiteRing { diag, hop: hop(&geometry) },
            geometry,
            kind,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    /// Number of sites, `N/4`.
    pub fn sites(&self) -> usize {
        self.ring.len()
    }

    /// Distance between neighbouring sites, `2Δx`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.geometry.dx
    }

    fn label_range(&self) -> (i64, i64) {
        let l = self.sites() as i64;
        (-(l / 2), l - 1 - l / 2)
    }

    /// `[x_min, x_max]` of the sector sites.
    pub fn extent(&self) -> (f64, f64) {
        let (lo, hi) = self.label_range();
        (lo as f64 * self.spacing(), hi as f64 * self.spacing())
    }

    /// Interpolation stencil `[(ring index, weight)]` for a point of the real line.
    fn stencil(&self, x: f64) -> Result<Vec<(usize, f64)>> {
        let (min, max) = self.extent();
        if !x.is_finite() || x < min - 1e-12 || x > max + 1e-12 {
            return Err(Error::OutOfRange { value: x, min, max });
        }
        let l = self.sites() as i64;
        let (lo, hi) = self.label_range();
        let s = x / self.spacing();
        let base = (s.floor() as i64).clamp(lo, hi);
        let w = (s - base as f64).clamp(0.0, 1.0);
        let idx = |j: i64| j.rem_euclid(l) as usize;
        if base == hi || w < 1e-12 {
            return Ok(vec![(idx(base), 1.0)]);
        }
        Ok(vec![(idx(base), 1.0 - w), (idx(base + 1), w)])
    }

    /// Ascending spectrum of the sector Hamiltonian.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        self.ring.spectrum(0)
    }

    /// `⟨x|e^{−iτH/ħ}|y⟩/(2Δx)` for each damping `ε` in the ladder, `τ = t − iε`.
    pub fn damped_kernels(&self, x: f64, y: f64, t: f64) -> Result<[C64; 3]> {
        let target = self.stencil(x)?;
        let source = self.stencil(y)?;
        let hbar = self.geometry.hbar;
        let eps0 = self.geometry.dx;
        let mut src = vec![0.0; self.sites()];
        for &(k, w) in &source {
            src[k] += w;
        }
        let taus: Vec<(f64, f64)> = KERNEL_EPS.iter().map(|e| (t, e * eps0)).collect();
        let funcs: Vec<Box<dyn Fn(f64) -> C64 + Sync>> = taus
            .iter()
            .map(|&(t, eps)| {
                Box::new(move |e: f64| C64::from_polar((-eps * e / hbar).exp(), -t * e / hbar))
                    as Box<dyn Fn(f64) -> C64 + Sync>
            })
            .collect();
        let indices: Vec<usize> = target.iter().map(|(k, _)| *k).collect();
        let time_scale = (t * t + (4.0 * eps0).powi(2)).sqrt() / hbar;
        let rows = evolve_entries(|a, b| self.ring.apply(a, b), self.ring.bounds(), &src, &funcs, time_scale, &indices)?;
        let norm = 1.0 / self.spacing();
        let mut out = [C64::new(0.0, 0.0); 3];
        for (i, row) in rows.iter().enumerate() {
            out[i] = target.iter().zip(row).map(|((_, w), v)| v * *w).sum::<C64>() * norm;
        }
        Ok(out)
    }

    /// Regularized propagator kernel `K(x, y; t)`; the identity kernel at `t = 0`.
    pub fn kernel(&self, x: f64, y: f64, t: f64) -> Result<C64> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
        if t == 0.0 {
            let target = self.stencil(x)?;
            let source = self.stencil(y)?;
            let overlap: f64 = target
                .iter()
                .map(|(k, w)| source.iter().filter(|(j, _)| j == k).map(|(_, v)| v * w).sum::<f64>())
                .sum();
            return Ok(C64::new(overlap / self.spacing(), 0.0));
        }
        Ok(extrapolate_to_zero(self.damped_kernels(x, y, t)?))
    }

    /// Regularized `Tr e^{−itH/ħ}` over the sector.
    pub fn trace(&self, t: f64) -> Result<C64> {
        self.trace_with(t, &TRACE_EPS)
    }

    /// As [`Self::trace`] with a caller-chosen damping ladder.
    pub fn trace_with(&self, t: f64, epsilons: &[f64]) -> Result<C64> {
        let hbar = self.geometry.hbar;
        let upper = damping_cutoff(self.ring.bounds().lo, hbar, epsilons);
        damped_trace(&self.ring.spectrum_below(0, upper)?, t, hbar, epsilons)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::weyl::make_algebra;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn polynomial_extrapolation_matches_fixed_ladder() {
        let v = [C64::new(1.0, 2.0), C64::new(-0.5, 0.25), C64::new(3.0, -1.0)];
        let fixed = extrapolate_to_zero(v);
        let general = extrapolate_polynomial(&[(0.1, v[0]), (0.2, v[1]), (0.4, v[2])]).unwrap();
        assert!((fixed - general).norm() < 1e-12);
        assert!(extrapolate_polynomial(&[(0.1, v[0]), (0.1, v[1])]).is_err());
    }

    fn ring_dense_spectrum(ring: &SiteRing) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(ring.dense()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn folding_preserves_spectrum() {
        for (l, c) in [(12usize, 0i64), (13, 0), (12, -1), (15, -1)] {
            let diag: Vec<f64> = (0..l as i64)
                .map(|m| {
                    let x = (m as f64 - c as f64 / 2.0) * std::f64::consts::TAU / l as f64;
                    1.0 + x.cos()
                })
                .collect();
            let ring = SiteRing { diag, hop: -0.7 };
            let got = ring.spectrum(c).unwrap();
            let expect = ring_dense_spectrum(&ring);
            assert_eq!(got.len(), expect.len());
            for (a, b) in got.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "L={l} c={c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sector_requires_divisibility_by_four() {
        let d = make_algebra(&q(1, 1), &q(1, 1), &q(1, 6)).unwrap();
        assert!(matches!(
            ObservableSector::new(&d, HamiltonianKind::Free),
            Err(Error::NoObservableSector(6))
        ));
    }

    #[test]
    fn sector_kernel_at_zero_time_is_identity() {
        let d = make_algebra(&q(1, 4), &q(1, 4), &q(1, 6)).unwrap();
        let s = ObservableSector::new(&d, HamiltonianKind::Harmonic).unwrap();
        assert_eq!(s.sites(), 24);
        let k = s.kernel(0.0, 0.0, 0.0).unwrap();
        assert!((k.re - 1.0 / s.spacing()).abs() < 1e-12);
        assert_eq!(s.kernel(0.0, s.spacing(), 0.0).unwrap(), C64::new(0.0, 0.0));
        assert!(matches!(s.kernel(1e6, 0.0, 1.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn full_space_spectrum_matches_dense_hamiltonian() {
        let d = make_algebra(&q(1, 2), &q(1, 3), &q(1, 2)).unwrap();
        let geom = GridGeometry::new(&d).unwrap();
        for kind in [HamiltonianKind::Free, HamiltonianKind::Harmonic] {
            let got = full_space_spectrum(&geom, kind).unwrap();
            let h = crate::calculus::hamiltonian(&crate::hilbert::principal_module(&d).unwrap(), kind).unwrap();
            let (expect, _) = crate::linalg::hermitian_eigen(&h.entries).unwrap();
            assert_eq!(got.len(), expect.len());
            for (a, b) in got.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn extrapolation_is_exact_on_quadratics() {
        let f = |e: f64| C64::new(2.0 - 3.0 * e + 5.0 * e * e, e);
        let v = extrapolate_to_zero([f(0.1), f(0.2), f(0.4)]);
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-12);
    }
}
