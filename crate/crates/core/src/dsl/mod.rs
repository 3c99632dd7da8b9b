//! Dirac-notation expressions: parsing, checking and evaluation over a module.

pub mod ast;
pub mod compile;
pub mod lexer;
pub mod parser;

pub use ast::{DiracExpr, OpAtom, OpExpr, Point, Scalar};
pub use compile::{bindings, compile, evaluate, evaluate_limit, Bindings, EvalPlan, OpStep, Reduction};
pub use parser::{parse, parse_bytes, MAX_INPUT_BYTES};
