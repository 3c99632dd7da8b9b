//! Weyl algebras at rational parameters and the divisibility chains used for limits.

use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::{build_chain, is_subalgebra, join, make_algebra, Schedule};

fn main() -> dirac_calculus::Result<()> {
    let r = parse_rational;
    let a = make_algebra(&r("1/2")?, &r("1/2")?, &r("1/3")?)?;
    println!("{a}: N = {}, M = {}, q = e^(2πi·{})", a.n(), a.m(), a.q_angle());

    let sub = make_algebra(&r("1")?, &r("1")?, &r("1/3")?)?;
    println!("{sub} ⊆ {a}: {}", is_subalgebra(&sub, &a)?);
    println!("{a} ⊆ {sub}: {}", is_subalgebra(&a, &sub)?);

    let x = make_algebra(&r("1/2")?, &r("1/3")?, &r("1")?)?;
    let y = make_algebra(&r("1/3")?, &r("1/2")?, &r("1")?)?;
    println!("join of {x} and {y} is {}", join(&x, &y)?);

    for schedule in [Schedule::Factorial, Schedule::Lcm, Schedule::Doubling] {
        let chain = build_chain(&r("1")?, 6, &r("1/6")?, schedule)?;
        let dims: Vec<String> = chain.dims().iter().map(|n| n.to_string()).collect();
        println!("{schedule:>9}: N = {}", dims.join(", "));
        for pair in chain.entries.windows(2) {
            assert!(is_subalgebra(&pair[0], &pair[1])?);
        }
    }
    Ok(())
}
