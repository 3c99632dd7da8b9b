//! Quadratic Gauss sums in closed form and by direct summation, and exact quadratic kernels.

use dirac_calculus::gauss::{
    gauss_closed, gauss_closed_quadratic, gauss_direct, landsberg_schaar_residual, quadratic_free_evolution_kernel,
    GaussSumSpec,
};
use dirac_calculus::hilbert::{principal_module, u_to_v_transition};
use dirac_calculus::linalg::C64;
use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::make_algebra;

fn main() -> dirac_calculus::Result<()> {
    for n in [1, 2, 3, 4, 5, 12, 1001] {
        let spec = GaussSumSpec::quadratic(n)?;
        let closed = gauss_closed(spec)?;
        let direct = gauss_direct(spec)?;
        println!(
            "N = {n:>4}: closed {:.6}  N mod 4 {:.6}  |closed − direct| = {:.1e}",
            closed.value,
            gauss_closed_quadratic(n as u64)?,
            (closed.value - direct).norm()
        );
    }
    let odd = gauss_closed(GaussSumSpec::new(1, 0, 3)?)?;
    println!("(a, b, c) = (1, 0, 3): closed form used = {}", odd.closed_form_used);

    for (p, q) in [(1, 1), (3, 5), (17, 4), (250, 499)] {
        println!("Landsberg–Schaar ({p}, {q}): residual {:.2e}", landsberg_schaar_residual(p, q)?);
    }

    // A kernel with exactly quadratic momentum phases, assembled from one Gauss sum.
    let r = parse_rational;
    let space = principal_module(&make_algebra(&r("1/4")?, &r("1/4")?, &r("1")?)?)?;
    let n = space.dim();
    let t = 0.5;
    let f = u_to_v_transition(&space)?.entries;
    let mut worst = 0.0f64;
    for (j, k) in [(0, 0), (1, 3), (5, 2)] {
        let exact = quadratic_free_evolution_kernel(&space, t, j, k)?;
        // Matrix path: diagonal phases in the momentum basis.
        let mut by_matrix = C64::new(0.0, 0.0);
        let (dp, hbar) = (space.descriptor().a_f64() * space.descriptor().hbar(), space.descriptor().hbar());
        for m in 0..n {
            let p = space.symmetric_index(m) as f64 * dp;
            by_matrix += f[(m, j)].conj() * C64::from_polar(1.0, -t * p * p / (2.0 * hbar)) * f[(m, k)];
        }
        worst = worst.max((exact - by_matrix).norm());
    }
    println!("quadratic kernel on N = {n}: Gauss sum vs matrix path {worst:.1e}");
    Ok(())
}
