//! Clock and shift generators of a principal module, the DFT between their eigenbases,
//! and the Galois action on the module.

use dirac_calculus::hilbert::{galois_action, module, principal_module, u_to_v_transition, CentralCharacter, Turns};
use dirac_calculus::linalg::{max_abs, CMatrix};
use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::make_algebra;

fn main() -> dirac_calculus::Result<()> {
    let r = parse_rational;
    let d = make_algebra(&r("1/2")?, &r("1/2")?, &r("1/3")?)?;
    let space = principal_module(&d)?;
    let n = space.dim();
    println!("{d}: N = {n}, q = {:.6}", space.q());

    let u = space.u().to_dense();
    let v = space.v().to_dense();
    println!("‖UV − qVU‖ = {:.2e}", max_abs(&(&u * &v - (&v * &u) * space.q())));
    println!("structural defect = {:.2e}", space.structural_defect()?);

    let f = u_to_v_transition(&space)?;
    let eye = CMatrix::identity(n, n);
    println!("‖FF† − I‖ = {:.2e}", max_abs(&(&f.entries * f.entries.adjoint() - eye)));
    let diag = &f.entries * &v * f.entries.adjoint();
    let off: f64 = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| diag[(i, j)].norm())
        .fold(0.0, f64::max);
    println!("F V F† is diagonal to {off:.2e}");

    let twisted = module(&d, CentralCharacter::new(Turns::Real(0.25), Turns::Real(0.5))?)?;
    println!("twisted module defect = {:.2e}", twisted.structural_defect()?);

    for t in [1, 5, 7, 11] {
        let image = galois_action(&space, t)?;
        println!("t = {t:>2}: permutation cycles {:?}", image.cycles());
    }
    if let Err(e) = galois_action(&space, 3) {
        println!("t = 3: {e}");
    }
    Ok(())
}
