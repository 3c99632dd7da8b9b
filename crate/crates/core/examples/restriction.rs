//! Restricting a module to a subalgebra splits it into twisted modules of the smaller algebra.

use dirac_calculus::hilbert::{character_distance, coarsen, principal_module, restrict_module, restrict_through};
use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::make_algebra;

fn main() -> dirac_calculus::Result<()> {
    let r = parse_rational;
    let parent = make_algebra(&r("1/2")?, &r("1/2")?, &r("1/3")?)?;
    let sub = make_algebra(&r("1")?, &r("1")?, &r("1/3")?)?;
    let dec = restrict_module(&principal_module(&parent)?, &sub)?;
    println!("{parent} restricted to {sub}:");
    for b in dec.summary() {
        println!(
            "  character ({}, {}) × {} of dimension {}",
            b.character.theta_u.to_f64(),
            b.character.theta_v.to_f64(),
            b.multiplicity,
            b.dimension
        );
    }
    println!("  blocks = {}, total = {}, intertwiner defect = {:.2e}", dec.block_count(), dec.total_dimension(), dec.verify()?);

    // A three-level tower restricts the same way directly or in two stages.
    let top = make_algebra(&r("1/4")?, &r("1/6")?, &r("1")?)?;
    let middle = coarsen(&top, 2, 1)?;
    let bottom = coarsen(&middle, 1, 3)?;
    let s = principal_module(&top)?;
    let direct = restrict_module(&s, &bottom)?.character_multiset();
    let staged = restrict_through(&s, &middle, &bottom)?;
    println!(
        "tower {top} ⊇ {middle} ⊇ {bottom}: {} characters, distance {:.2e}",
        direct.len(),
        character_distance(&direct, &staged).unwrap_or(f64::INFINITY)
    );

    match restrict_module(&principal_module(&sub)?, &parent) {
        Err(e) => println!("reverse direction: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
