//! The limit map respects sums and products of convergent chain quantities.

use dirac_calculus::calculus::{apply_position, gaussian_state};
use dirac_calculus::hilbert::AlgebraicHilbertSpace;
use dirac_calculus::limits::{lim_value, sweep, SweepOptions};
use dirac_calculus::linalg::C64;
use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::{build_chain, Schedule};
use dirac_calculus::Result;

/// `⟨ψ|Q²|ψ⟩ = ‖Qψ‖²` for the Gaussian ground-state profile.
fn spread(s: &AlgebraicHilbertSpace) -> Result<C64> {
    let psi = gaussian_state(s)?;
    let q_psi = apply_position(s, psi.amplitudes.as_slice());
    Ok(C64::new(q_psi.iter().map(|z| z.norm_sqr()).sum(), 0.0))
}

fn shifted_inverse_dim(s: &AlgebraicHilbertSpace) -> Result<C64> {
    Ok(C64::new(1.0 + 1.0 / s.dim() as f64, 0.0))
}

fn main() -> Result<()> {
    let chain = build_chain(&parse_rational("1")?, 9, &parse_rational("1")?, Schedule::Doubling)?;
    let options = SweepOptions::default();
    let f = sweep(&chain, spread, &options);
    let g = sweep(&chain, shifted_inverse_dim, &options);
    let sum = sweep(&chain, |s| Ok(spread(s)? + shifted_inverse_dim(s)?), &options);
    let product = sweep(&chain, |s| Ok(spread(s)? * shifted_inverse_dim(s)?), &options);
    let (lf, lg) = (lim_value(&f)?, lim_value(&g)?);
    println!("lim f = {lf:.6} (ħ/2 = {:.6}), lim g = {lg:.6}", std::f64::consts::PI);
    println!("lim (f + g) = {:.6}  vs  {:.6}", lim_value(&sum)?, lf + lg);
    println!("lim (f · g) = {:.6}  vs  {:.6}", lim_value(&product)?, lf * lg);
    Ok(())
}
