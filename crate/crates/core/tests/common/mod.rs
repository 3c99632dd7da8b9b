#![allow(dead_code)]

use dirac_calculus::dsl::{OpAtom, OpExpr, Point, Scalar};
use dirac_calculus::rational::Rational;
use num_bigint::BigInt;
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn number<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0..64) as f64 / 4.0
}

fn point<R: Rng>(rng: &mut R) -> Point {
    match rng.random_range(0..4) {
        0 => Point::X,
        1 => Point::Y,
        _ => Point::Value(rng.random_range(-16..16) as f64 / 8.0),
    }
}

fn atom<R: Rng>(rng: &mut R) -> OpAtom {
    *OpAtom::ALL.choose(rng).expect("nonempty")
}

pub fn random_op<R: Rng>(rng: &mut R, depth: u32) -> OpExpr {
    let pick = if depth == 0 { rng.random_range(0..2) } else { rng.random_range(0..4) };
    match pick {
        0 => OpExpr::Atom(atom(rng)),
        1 => OpExpr::Exp {
            scalar: if depth > 0 && rng.random_bool(0.7) { Some(Box::new(random_scalar(rng, depth - 1))) } else { None },
            op: atom(rng),
        },
        _ => OpExpr::Product(Box::new(random_op(rng, depth - 1)), Box::new(random_op(rng, depth - 1))),
    }
}

/// A random tree over the whole grammar, nested at most `depth` levels.
pub fn random_scalar<R: Rng>(rng: &mut R, depth: u32) -> Scalar {
    let leaf = |rng: &mut R| match rng.random_range(0..5) {
        0 => Scalar::Number(number(rng)),
        1 => Scalar::ImagUnit,
        2 => Scalar::Pi,
        3 => Scalar::Hbar,
        _ => Scalar::Time,
    };
    if depth == 0 {
        return leaf(rng);
    }
    let d = depth - 1;
    let b = |rng: &mut R| Box::new(random_scalar(rng, d));
    match rng.random_range(0..9) {
        0 => leaf(rng),
        1 => Scalar::Bracket(point(rng), Box::new(random_op(rng, d)), point(rng)),
        2 => Scalar::Trace(Box::new(random_op(rng, d))),
        3 => Scalar::Neg(b(rng)),
        4 => Scalar::Add(b(rng), b(rng)),
        5 => Scalar::Sub(b(rng), b(rng)),
        6 => Scalar::Mul(b(rng), b(rng)),
        7 => Scalar::Div(b(rng), b(rng)),
        _ => Scalar::Bracket(point(rng), Box::new(OpExpr::Atom(atom(rng))), point(rng)),
    }
}

const TOKENS: &[&str] = &[
    "<", ">", "|", "(", ")", "*", "/", "+", "-", " ", "\n", "x", "y", "t", "i", "pi", "hbar", "Q", "P", "U", "V",
    "Hfree", "Hho", "I", "exp", "trace", "0", "1.5", "2", "1e3", "1e", ".", "..", "foo", "é", "\u{0}", "#",
];

/// Either raw bytes or a soup of grammar tokens, which reaches deeper into the parser.
pub fn fuzz_input<R: Rng>(rng: &mut R) -> Vec<u8> {
    let len = rng.random_range(0..40);
    if rng.random_bool(0.3) {
        (0..len).map(|_| rng.random()).collect()
    } else {
        (0..len).flat_map(|_| TOKENS.choose(rng).expect("nonempty").bytes()).collect()
    }
}
