//! Quadratic Gauss sums `Σ_{n<c} e^{iπ(an² + bn)/c}`, their closed forms, and the
//! quadratic-dispersion free evolution whose kernel is such a sum.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{u_to_v_transition, AlgebraicHilbertSpace};
use crate::linalg::{CMatrix, OperatorMatrix, Role, C64, DENSE_LIMIT};
use crate::rational::{cis_half_turns, recognize_rational, Rational};

/// Largest `c` accepted by direct summation.
pub const DIRECT_LIMIT: u64 = 10_000_000;
/// Largest denominator accepted for the quadratic phase ratio.
pub const PHASE_DENOMINATOR_LIMIT: u64 = 10_000_000;

/// `G = Σ_{n=0}^{c−1} e^{iπ(a n² + b n)/c}`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GaussSumSpec {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl GaussSumSpec {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if c < 1 {
            return Err(Error::InvalidParameter(format!("Gauss sum needs c ≥ 1, got {c}")));
        }
        Ok(GaussSumSpec { a, b, c })
    }

    /// `Σ_{n<N} e^{2πin²/N}`, i.e. `a = 2, b = 0, c = N`.
    pub fn quadratic(n: i64) -> Result<Self> {
        Self::new(2, 0, n)
    }
}

/// A Gauss sum value with the evaluation path taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussValue {
    pub value: C64,
    pub closed_form_used: bool,
}

/// `Σ_{n<|c|} e^{iπ(an² + bn)/c}` by direct summation, exponents reduced exactly.
fn direct_sum(a: i128, b: i128, c: i128) -> C64 {
    let m = c.abs();
    let modulus = 2 * m;
    let sign = c.signum();
    let a = a.rem_euclid(modulus);
    let b = b.rem_euclid(modulus);
    let mut acc = C64::new(0.0, 0.0);
    // Track a·n² + b·n mod 2|c| incrementally.
    let mut phase = 0i128;
    let mut step = (a + b).rem_euclid(modulus);
    let two_a = (2 * a).rem_euclid(modulus);
    for _ in 0..m {
        acc += cis_half_turns(sign * phase, m);
        phase = (phase + step) % modulus;
        step = (step + two_a) % modulus;
    }
    acc
}

/// Literal sum (the brute-force oracle).
pub fn gauss_direct(spec: GaussSumSpec) -> Result<C64> {
    if spec.c as u64 > DIRECT_LIMIT {
        return Err(Error::TooLarge {
            what: "Gauss sum length",
            value: spec.c as u64,
            limit: DIRECT_LIMIT,
        });
    }
    Ok(direct_sum(spec.a as i128, spec.b as i128, spec.c as i128))
}

/// Closed form of `Σ_{n<|c|} e^{iπ(an² + bn)/c}` for `ac + b` even, by reciprocity
/// `S(a, b, c) = √|c/a|·e^{iπ(|ac| − b²)/(4ac)}·S(−c, −b, a)`.
fn reciprocity(mut a: i128, mut b: i128, mut c: i128) -> C64 {
    let mut factor = C64::new(1.0, 0.0);
    loop {
        let m = c.abs();
        let modulus = 2 * m;
        a = a.rem_euclid(modulus);
        if a > m {
            a -= modulus;
        }
        b = b.rem_euclid(modulus);
        if a == m || a == -m {
            // (−1)^{n²} = (−1)^n folds into the linear term.
            a = 0;
            b = (b + c).rem_euclid(modulus);
        }
        if a == 0 {
            // Σ e^{2πi(b/2)n/c}
            let half = b / 2;
            return if half % m == 0 { factor * m as f64 } else { C64::new(0.0, 0.0) };
        }
        let ac = a * c;
        let num = ac.abs() - b * b;
        let den = 4 * ac;
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den).max(1);
        factor *= cis_half_turns(num / g, den / g) * ((m as f64) / (a.abs() as f64)).sqrt();
        (a, b, c) = (-c, -b, a);
    }
}

/// Closed-form evaluation when the parity condition `ac + b ≡ 0 (mod 2)` holds, else
/// the direct sum with `closed_form_used = false`.
pub fn gauss_closed(spec: GaussSumSpec) -> Result<GaussValue> {
    let (a, b, c) = (spec.a as i128, spec.b as i128, spec.c as i128);
    if (a * c + b).rem_euclid(2) == 0 {
        return Ok(GaussValue {
            value: reciprocity(a, b, c),
            closed_form_used: true,
        });
    }
    Ok(GaussValue {
        value: gauss_direct(spec)?,
        closed_form_used: false,
    })
}

/// `Σ_{n<N} e^{2πin²/N}` from `N mod 4`.
pub fn gauss_closed_quadratic(n: u64) -> Result<C64> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadratic Gauss sum needs N ≥ 1".into()));
    }
    let r = (n as f64).sqrt();
    Ok(match n % 4 {
        1 => C64::new(r, 0.0),
        2 => C64::new(0.0, 0.0),
        3 => C64::new(0.0, r),
        _ => C64::new(r, r),
    })
}

/// `|p^{-1/2} Σ_{n<p} e^{2πin²q/p} − e^{iπ/4}(2q)^{-1/2} Σ_{n<2q} e^{−iπn²p/(2q)}|`, both sums direct.
pub fn landsberg_schaar_residual(p: i64, q: i64) -> Result<f64> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidParameter(format!("need p, q ≥ 1, got ({p}, {q})")));
    }
    let lhs = gauss_direct(GaussSumSpec::new(2 * q, 0, p)?)? / (p as f64).sqrt();
    let rhs_sum = gauss_direct(GaussSumSpec::new(-p, 0, 2 * q)?)?;
    let rhs = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * rhs_sum / ((2 * q) as f64).sqrt();
    Ok((lhs - rhs).norm())
}

/// `t·a²·(ħ/2π)`: the quadratic phase per squared Fourier index divided by `π`.
pub fn quadratic_phase_ratio(space: &AlgebraicHilbertSpace, t: &Rational) -> Rational {
    let d = space.descriptor();
    t * d.a() * d.a() * d.hbar_over_2pi()
}

/// Reads a float time as an exact rational for the Gauss-sum path.
pub fn exact_time(t: f64) -> Result<Rational> {
    recognize_rational(t, 1_000_000, 1e-13)
        .ok_or_else(|| Error::NotExactlySummable(format!("time {t} is not a recognizable rational")))
}

fn as_small(r: &Rational) -> Result<(i128, i128)> {
    let num = r.numer().to_i128();
    let den = r.denom().to_i128();
    match (num, den) {
        (Some(n), Some(d)) if (d as u128) <= PHASE_DENOMINATOR_LIMIT as u128 => Ok((n, d)),
        _ => Err(Error::NotExactlySummable(format!("phase ratio {r} exceeds the denominator guard"))),
    }
}

/// Quadratic-kernel value with the diagnostics of the two evaluation paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticKernel {
    pub value: C64,
    pub closed_form_used: bool,
    /// `|path (i) − path (ii)|`
    pub cross_check: f64,
}

/// Fourier symbol `D_l = e^{−iπ(r/s)·l²}` at the symmetric label of `l`.
fn fourier_symbol(space: &AlgebraicHilbertSpace, r: i128, s: i128) -> Vec<C64> {
    let n = space.dim();
    (0..n)
        .map(|l| {
            let m = space.symmetric_index(l) as i128;
            cis_half_turns((-r * m * m).rem_euclid(2 * s), s)
        })
        .collect()
}

/// `(1/N)·Σ_l e^{2πiM l(k−j)/N} D_l` summed term by term.
fn fourier_series_entry(space: &AlgebraicHilbertSpace, symbol: &[C64], j: usize, k: usize) -> C64 {
    let n = space.dim() as i128;
    let m = space.m_mod_n() as i128;
    let diff = (k as i128 - j as i128).rem_euclid(n);
    symbol
        .iter()
        .enumerate()
        .map(|(l, d)| crate::rational::cis_turns(m * ((l as i128 * diff) % n), n) * d)
        .sum::<C64>()
        / n as f64
}

fn check_indices(space: &AlgebraicHilbertSpace, j: usize, k: usize) -> Result<()> {
    let n = space.dim();
    for idx in [j, k] {
        if idx >= n {
            return Err(Error::OutOfRange {
                value: idx as f64,
                min: 0.0,
                max: (n - 1) as f64,
            });
        }
    }
    Ok(())
}

/// `⟨u_j|E_quad|u_k⟩` where `E_quad` has Fourier symbol `e^{−iπ·ratio·l²}` and
/// `ratio = t·a²·ħ/2π` is exact.
///
/// Path (i) assembles a Gauss sum when the ratio's denominator divides `N` and falls
/// back to the finite Fourier series otherwise; path (ii) conjugates the symbol by the
/// U-to-V transition. Both must agree within `1e-8`.
pub fn quadratic_kernel_exact(space: &AlgebraicHilbertSpace, ratio: &Rational, j: usize, k: usize) -> Result<QuadraticKernel> {
    check_indices(space, j, k)?;
    let n = space.dim();
    let (r, s) = as_small(ratio)?;
    let nn = n as i128;
    let symbol = fourier_symbol(space, r, s);

    let (value, closed) = if nn % s == 0 {
        let big_a = -r * (nn / s);
        let m = space.m_mod_n() as i128;
        let big_b = 2 * m * (k as i128 - j as i128);
        let m0 = -((n / 2) as i128);
        let lin = 2 * big_a * m0 + big_b;
        let g = gauss_closed(GaussSumSpec::new(
            i64::try_from(big_a.rem_euclid(2 * nn)).map_err(|_| Error::Internal("Gauss coefficient overflow".into()))?,
            i64::try_from(lin.rem_euclid(2 * nn)).map_err(|_| Error::Internal("Gauss coefficient overflow".into()))?,
            n as i64,
        )?)?;
        let shift = (big_a * m0 * m0 + big_b * m0).rem_euclid(2 * nn);
        (cis_half_turns(shift, nn) * g.value / n as f64, g.closed_form_used)
    } else {
        (fourier_series_entry(space, &symbol, j, k), false)
    };

    let other = if n <= DENSE_LIMIT.min(1024) {
        let f = u_to_v_transition(space)?.entries;
        (0..n).map(|l| f[(l, j)].conj() * symbol[l] * f[(l, k)]).sum::<C64>()
    } else {
        fourier_series_entry(space, &symbol, j, k)
    };
    let cross_check = (value - other).norm();
    if cross_check > 1e-8 {
        return Err(Error::Numeric(format!(
            "Gauss-sum and transition paths disagree by {cross_check:e} at ({j}, {k})"
        )));
    }
    Ok(QuadraticKernel {
        value,
        closed_form_used: closed,
        cross_check,
    })
}

/// `⟨u_j|E_quad(t)|u_k⟩` for a time recognizable as an exact rational.
pub fn quadratic_free_evolution_kernel(space: &AlgebraicHilbertSpace, t: f64, j: usize, k: usize) -> Result<C64> {
    let ratio = quadratic_phase_ratio(space, &exact_time(t)?);
    Ok(quadratic_kernel_exact(space, &ratio, j, k)?.value)
}

/// The full circulant matrix of `E_quad(t)`.
pub fn quadratic_free_evolution(space: &AlgebraicHilbertSpace, t: f64) -> Result<OperatorMatrix> {
    let n = space.dim();
    crate::linalg::ensure_dense(n)?;
    let ratio = quadratic_phase_ratio(space, &exact_time(t)?);
    let column: Vec<C64> = (0..n)
        .map(|j| quadratic_kernel_exact(space, &ratio, j, 0).map(|q| q.value))
        .collect::<Result<_>>()?;
    let m = CMatrix::from_fn(n, n, |j, k| column[(j + n - k) % n]);
    Ok(OperatorMatrix::new(Role::Evolution, m))
}

/// Delta-normalized quadratic-dispersion kernel at the grid points nearest to `x`, `y`.
pub fn quadratic_free_kernel_at(space: &AlgebraicHilbertSpace, t: f64, x: f64, y: f64) -> Result<C64> {
    let geom = crate::calculus::GridGeometry::new(space.descriptor())?;
    let j = geom.nearest_index(x)?;
    let k = geom.nearest_index(y)?;
    let ratio = quadratic_phase_ratio(space, &exact_time(t)?);
    Ok(quadratic_kernel_exact(space, &ratio, j, k)?.value / geom.dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::principal_module;
    use crate::linalg::max_abs;
    use crate::weyl::make_algebra;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Independent oracle: plain floating phases, no modular reduction.
    fn naive(a: i64, b: i64, c: i64) -> C64 {
        (0..c.abs())
            .map(|n| {
                let e = std::f64::consts::PI * ((a * n * n + b * n) as f64) / c as f64;
                C64::from_polar(1.0, e)
            })
            .sum()
    }

    #[test]
    fn direct_examples() {
        let one = gauss_direct(GaussSumSpec::new(2, 0, 1).unwrap()).unwrap();
        assert!((one - C64::new(1.0, 0.0)).norm() < 1e-15);
        let two = gauss_direct(GaussSumSpec::quadratic(2).unwrap()).unwrap();
        assert!(two.norm() < 1e-15);
        let five = gauss_direct(GaussSumSpec::quadratic(5).unwrap()).unwrap();
        assert!((five - C64::new(5f64.sqrt(), 0.0)).norm() < 1e-10);
        assert!(matches!(
            gauss_direct(GaussSumSpec::new(1, 0, 20_000_000).unwrap()),
            Err(Error::TooLarge { .. })
        ));
        assert!(GaussSumSpec::new(1, 0, 0).is_err());
    }

    #[test]
    fn closed_quadratic_examples() {
        assert_eq!(gauss_closed_quadratic(1).unwrap(), C64::new(1.0, 0.0));
        assert!((gauss_closed_quadratic(4).unwrap() - C64::new(2.0, 2.0)).norm() < 1e-15);
        assert!((gauss_closed_quadratic(7).unwrap() - C64::new(0.0, 7f64.sqrt())).norm() < 1e-15);
        for n in [4, 7, 12, 13, 30] {
            let d = naive(2, 0, n);
            assert!((gauss_closed_quadratic(n as u64).unwrap() - d).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_quadratic_matches_direct_up_to_ten_thousand() {
        for n in 1..=10_000i64 {
            let d = gauss_direct(GaussSumSpec::quadratic(n).unwrap()).unwrap();
            let c = gauss_closed_quadratic(n as u64).unwrap();
            assert!((d - c).norm() < 1e-8, "N={n}");
        }
    }

    #[test]
    fn landsberg_schaar_examples() {
        assert!(landsberg_schaar_residual(1, 1).unwrap() < 1e-12);
        assert!(landsberg_schaar_residual(3, 5).unwrap() < 1e-10);
        assert!(landsberg_schaar_residual(8, 3).unwrap() < 1e-10);
    }

    #[test]
    fn parity_obstruction_falls_back() {
        let g = gauss_closed(GaussSumSpec::new(1, 0, 3).unwrap()).unwrap();
        assert!(!g.closed_form_used);
        assert!((g.value - naive(1, 0, 3)).norm() < 1e-12);
        let h = gauss_closed(GaussSumSpec::new(1, 1, 3).unwrap()).unwrap();
        assert!(h.closed_form_used);
    }

    #[test]
    fn quadratic_kernel_examples() {
        let s = principal_module(&make_algebra(&q(1, 4), &q(1, 4), &q(1, 1)).unwrap()).unwrap();
        assert_eq!(s.dim(), 16);
        for j in 0..16 {
            let z = quadratic_free_evolution_kernel(&s, 0.0, j, 3).unwrap();
            let expect = if j == 3 { 1.0 } else { 0.0 };
            assert!((z - C64::new(expect, 0.0)).norm() < 1e-12);
        }
        // t·a²·ħ/2π = 1/8: phase π/8 per squared index.
        let k = quadratic_kernel_exact(&s, &q(1, 8), 2, 5).unwrap();
        assert!(k.closed_form_used);
        assert!(k.cross_check < 1e-8);
        let t = quadratic_free_evolution_kernel(&s, 2.0, 2, 5).unwrap();
        assert!((t - k.value).norm() < 1e-12);
        // Circulant: depends on j − k only.
        let a = quadratic_free_evolution_kernel(&s, 2.0, 7, 4).unwrap();
        let b = quadratic_free_evolution_kernel(&s, 2.0, 10, 7).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn quadratic_kernel_rejects_irrational_time() {
        let s = principal_module(&make_algebra(&q(1, 4), &q(1, 4), &q(1, 1)).unwrap()).unwrap();
        assert!(matches!(
            quadratic_free_evolution_kernel(&s, std::f64::consts::PI, 0, 0),
            Err(Error::NotExactlySummable(_))
        ));
    }

    #[test]
    fn quadratic_kernel_dual_paths() {
        for (den, ratio) in [(2i64, q(1, 8)), (4, q(3, 16)), (8, q(5, 64)), (8, q(1, 3))] {
            let s = principal_module(&make_algebra(&q(1, den), &q(1, den), &q(1, 1)).unwrap()).unwrap();
            let n = s.dim();
            assert!([4, 16, 64].contains(&n));
            for (j, k) in [(0, 0), (1, n - 1), (n / 2, 3)] {
                let r = quadratic_kernel_exact(&s, &ratio, j, k).unwrap();
                assert!(r.cross_check < 1e-8);
            }
        }
    }

    #[test]
    fn quadratic_evolution_is_unitary() {
        let s = principal_module(&make_algebra(&q(1, 8), &q(1, 8), &q(1, 1)).unwrap()).unwrap();
        let e = quadratic_free_evolution(&s, 0.5).unwrap();
        assert!(e.unitarity_defect() < 1e-10);
        let back = quadratic_free_evolution(&s, -0.5).unwrap();
        let n = s.dim();
        assert!(max_abs(&(&e.entries * &back.entries - CMatrix::identity(n, n))) < 1e-10);
    }

    proptest! {
        #[test]
        fn closed_form_matches_direct(a in -200i64..200, b in -200i64..200, c in 1i64..400) {
            let g = gauss_closed(GaussSumSpec::new(a, b, c).unwrap()).unwrap();
            let d = naive(a, b, c);
            prop_assert!((g.value - d).norm() < 1e-8 * (c as f64).sqrt().max(1.0), "{a} {b} {c}");
        }

        #[test]
        fn quadratic_magnitude_law(n in 1i64..5000) {
            let m = gauss_direct(GaussSumSpec::quadratic(n).unwrap()).unwrap().norm();
            let r = (n as f64).sqrt();
            let expect = match n % 4 { 2 => 0.0, 0 => r * 2f64.sqrt(), _ => r };
            prop_assert!((m - expect).abs() < 1e-8);
        }

        #[test]
        fn landsberg_schaar_random(p in 1i64..=500, q in 1i64..=500) {
            prop_assert!(landsberg_schaar_residual(p, q).unwrap() < 1e-9);
        }
    }
}
