//! Closed-form continuum kernels used as references for the discrete ones.

use num_complex::Complex64;

use crate::linalg::C64;

/// `(2πiħt)^{-1/2} e^{i(x−y)²/(2ħt)}` with the principal square root.
pub fn free_kernel(x: f64, y: f64, t: f64, hbar: f64) -> C64 {
    let pref = C64::new(0.0, std::f64::consts::TAU * hbar * t).sqrt().inv();
    pref * C64::from_polar(1.0, (x - y).powi(2) / (2.0 * hbar * t))
}

/// Mehler kernel of `H = (P² + Q²)/2`:
/// `(2πiħ sin t)^{-1/2} exp(i((x²+y²)cos t − 2xy)/(2ħ sin t))`.
pub fn harmonic_kernel(x: f64, y: f64, t: f64, hbar: f64) -> C64 {
    let (s, c) = t.sin_cos();
    let pref = C64::new(0.0, std::f64::consts::TAU * hbar * s).sqrt().inv();
    pref * C64::from_polar(1.0, ((x * x + y * y) * c - 2.0 * x * y) / (2.0 * hbar * s))
}

/// `Σ_n e^{−it(n+½)} = 1/(2i sin(t/2))`, the oscillator trace for unit frequency.
pub fn harmonic_trace(t: f64) -> C64 {
    (Complex64::new(0.0, 2.0 * (t / 2.0).sin())).inv()
}

/// The printed variant `1/(i sin(t/2))`, twice the standard value.
pub fn harmonic_trace_printed(t: f64) -> C64 {
    2.0 * harmonic_trace(t)
}

/// `ħ(n + ½)`
pub fn harmonic_level(n: usize, hbar: f64) -> f64 {
    hbar * (n as f64 + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_kernel_at_origin() {
        // |K(0,0,1)| = (2πħ)^{-1/2}, arg = −π/4.
        let k = free_kernel(0.0, 0.0, 1.0, 1.0);
        assert!((k.norm() - 1.0 / std::f64::consts::TAU.sqrt()).abs() < 1e-14);
        assert!((k.arg() + std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn mehler_reduces_to_free_for_small_time() {
        let (x, y, t) = (0.3, -0.2, 1e-3);
        let h = harmonic_kernel(x, y, t, 1.0);
        let f = free_kernel(x, y, t, 1.0);
        assert!((h - f).norm() / f.norm() < 1e-3);
    }

    #[test]
    fn trace_values() {
        let t = std::f64::consts::PI;
        assert!((harmonic_trace(t) - C64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((harmonic_trace_printed(t) - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(harmonic_level(2, 2.0), 5.0);
    }
}
