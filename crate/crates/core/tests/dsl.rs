mod common;

use common::{q, random_scalar};
use dirac_calculus::dsl::{bindings, evaluate, parse, parse_bytes, Scalar};
use dirac_calculus::hilbert::{principal_module, AlgebraicHilbertSpace};
use dirac_calculus::weyl::make_algebra;
use dirac_calculus::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space() -> AlgebraicHilbertSpace {
    principal_module(&make_algebra(&q(1, 2), &q(1, 2), &q(1, 1)).unwrap()).unwrap()
}

#[test]
fn error_kinds_by_stage() {
    let s = space();
    let b = bindings(&[("t", 1.0)]);
    assert!(matches!(parse("<0|Q|0"), Err(Error::Syntax { .. })));
    assert!(matches!(parse("sin(1)"), Err(Error::UnknownIdentifier { .. })));
    assert!(matches!(parse("trace(exp(Q*P))"), Err(Error::IllTyped(_))));
    assert!(matches!(evaluate(&parse("<y|I|0>").unwrap(), &s, &b), Err(Error::UnboundSymbol(_))));
    assert!(matches!(evaluate(&parse("trace(exp(i*V))").unwrap(), &s, &b), Err(Error::NotExponentiable(_))));
    assert!(matches!(evaluate(&parse("trace(exp(t*Hho))").unwrap(), &s, &b), Err(Error::IllTyped(_))));
}

#[test]
fn layout_is_insignificant() {
    let a = parse("<x|exp(-i*t*Hho/hbar)|y>").unwrap();
    let b = parse("  < x |\n exp( -i * t * Hho / hbar )\t| y >  ").unwrap();
    assert_eq!(a, b);
}

#[test]
fn unitary_trace_of_identity_evolution() {
    let s = space();
    let v = evaluate(&parse("trace(exp(0*i*Hho))").unwrap(), &s, &bindings(&[])).unwrap();
    assert!((v.re - s.dim() as f64).abs() < 1e-9 && v.im.abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), depth in 0u32..5) {
        let e = random_scalar(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        let text = e.to_string();
        prop_assert_eq!(parse(&text).ok(), Some(e), "{}", text);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_bytes(&bytes);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[<>|()*/+\\-.0-9eixytQPUVHhofrcap ]{0,60}") {
        if let Ok(e) = parse(&text) {
            prop_assert_eq!(parse(&e.to_string()).ok(), Some(e));
        }
    }

    #[test]
    fn scalar_arithmetic_matches_complex_arithmetic(a in -50.0f64..50.0, b in -50.0f64..50.0, t in -3.0f64..3.0) {
        let s = space();
        let env = bindings(&[("t", t)]);
        let ea = Scalar::Number(a.abs());
        let eb = Scalar::Number(b.abs());
        let text = format!("({ea} - {eb} * i) * t / (1 + {eb})");
        let v = evaluate(&parse(&text).unwrap(), &s, &env).unwrap();
        let expect = (num_complex::Complex64::new(a.abs(), -b.abs()) * t) / (1.0 + b.abs());
        prop_assert!((v - expect).norm() <= 1e-12 * expect.norm().max(1.0));
    }

    #[test]
    fn brackets_are_linear(seed in any::<u64>(), c in -4.0f64..4.0) {
        let s = space();
        let env = bindings(&[("x", 0.0), ("y", 1.5), ("t", 0.3)]);
        let e = random_scalar(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let Ok(v) = evaluate(&e, &s, &env) else { return Ok(()) };
        let scaled = Scalar::Mul(Box::new(Scalar::Number(c.abs())), Box::new(e.clone()));
        let sum = Scalar::Add(Box::new(e.clone()), Box::new(e));
        prop_assume!(v.norm() < 1e100);
        let vs = evaluate(&scaled, &s, &env).unwrap();
        let vsum = evaluate(&sum, &s, &env).unwrap();
        prop_assert!((vs - v * c.abs()).norm() <= 1e-9 * (v.norm() * c.abs()).max(1.0));
        prop_assert!((vsum - v * 2.0).norm() <= 1e-9 * v.norm().max(1.0));
    }
}
