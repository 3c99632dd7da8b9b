//! Bra-ket expressions parsed, compiled against a module and swept to their limit.

use dirac_calculus::dsl::{bindings, compile, evaluate, evaluate_limit, parse, Bindings};
use dirac_calculus::hilbert::principal_module;
use dirac_calculus::rational::parse_rational;
use dirac_calculus::weyl::{build_chain, make_algebra, Schedule};

fn main() -> dirac_calculus::Result<()> {
    let r = parse_rational;
    let space = principal_module(&make_algebra(&r("1/4")?, &r("1/4")?, &r("1")?)?)?;
    let b = bindings(&[("t", 1.0), ("x", 1.5), ("y", 0.0)]);

    for text in [
        "<0| I |0>",
        "2*<x|Q|x>",
        "(<x| Q*P |y> - <x| P*Q |y>) / (i*hbar)",
        "trace(exp(-i*t*Hho/hbar))",
        "<x| exp(-i*t*Hfree/hbar) |y>",
    ] {
        let expr = parse(text)?;
        let plan = compile(&expr, &space, &b)?;
        println!("{text}\n  printed {expr}\n  {} operator steps, value {:.6}", plan.steps.len(), evaluate(&expr, &space, &b)?);
    }

    for bad in ["<0| |0>", "<x| exp(2*Hfree) |y>", "trace(exp(i*U))", "<z|Q|0>"] {
        match parse(bad).and_then(|e| evaluate(&e, &space, &b)) {
            Err(e) => println!("{bad}: {e}"),
            Ok(v) => println!("{bad}: unexpectedly {v}"),
        }
    }
    match parse("<x|Q|y>").and_then(|e| evaluate(&e, &space, &Bindings::new())) {
        Err(e) => println!("without bindings: {e}"),
        Ok(v) => println!("without bindings: unexpectedly {v}"),
    }

    let b = bindings(&[("t", 1.0), ("x", 0.5), ("y", 0.0)]);
    let chain = build_chain(&r("1")?, 7, &r("1/6")?, Schedule::Doubling)?;
    for text in ["2+3*i", "trace(I)", "<x| exp(-i*t*Hfree/hbar) |y>"] {
        let report = evaluate_limit(&parse(text)?, &chain, &b, 1e-3);
        println!(
            "lim {text}: well-defined {}, value {}",
            report.well_defined,
            report.lim_value.map_or("none".into(), |v| format!("{v:.6}"))
        );
    }
    Ok(())
}
