//! Recursive-descent parser with one token of lookahead.

use super::ast::{DiracExpr, OpAtom, OpExpr, Point, Scalar};
use super::lexer::{tokenize, Token, TokenKind};
use crate::error::{Error, Result};

pub const MAX_INPUT_BYTES: usize = 64 * 1024;
const MAX_DEPTH: usize = 200;

const SCALAR_START: &[&str] = &["number", "i", "pi", "hbar", "t", "'<'", "trace", "'('", "'-'"];
const OPERATOR_START: &[&str] = &["Q", "P", "U", "V", "Hfree", "Hho", "I", "exp", "'('"];
const KNOWN: &[&str] = &["i", "pi", "hbar", "t", "x", "y", "exp", "trace", "Q", "P", "U", "V", "Hfree", "Hho", "I"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

pub fn parse(text: &str) -> Result<DiracExpr> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(Error::InvalidParameter(format!(
            "expression is {} bytes, limit is {MAX_INPUT_BYTES}",
            text.len()
        )));
    }
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        depth: 0,
    };
    let expr = p.sum()?;
    p.expect(TokenKind::End, &["'+'", "'-'", "'*'", "'/'", "end of input"])?;
    Ok(expr)
}

/// Parses raw bytes, rejecting invalid UTF-8 as a syntax error.
pub fn parse_bytes(bytes: &[u8]) -> Result<DiracExpr> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => Err(Error::Syntax {
            line: 1,
            column: e.valid_up_to() + 1,
            found: "invalid UTF-8".into(),
            expected: vec!["text".into()],
        }),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let t = self.peek();
        Error::Syntax {
            line: t.line,
            column: t.column,
            found: t.kind.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, kind: TokenKind, expected: &[&str]) -> Result<Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.error(expected))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(&["shallower nesting"]));
        }
        Ok(())
    }

    fn unknown(&self, name: &str) -> Option<Error> {
        let t = self.peek();
        (!KNOWN.contains(&name)).then(|| Error::UnknownIdentifier {
            name: name.to_string(),
            line: t.line,
            column: t.column,
        })
    }

    fn sum(&mut self) -> Result<Scalar> {
        let mut acc = self.prod()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.advance();
                    acc = Scalar::Add(Box::new(acc), Box::new(self.prod()?));
                }
                TokenKind::Minus => {
                    self.advance();
                    acc = Scalar::Sub(Box::new(acc), Box::new(self.prod()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> Result<Scalar> {
        let mut acc = self.atom()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    self.advance();
                    acc = Scalar::Mul(Box::new(acc), Box::new(self.atom()?));
                }
                TokenKind::Slash => {
                    self.advance();
                    acc = Scalar::Div(Box::new(acc), Box::new(self.atom()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Scalar> {
        self.enter()?;
        let out = self.atom_inner();
        self.depth -= 1;
        out
    }

    fn atom_inner(&mut self) -> Result<Scalar> {
        match self.peek().kind.clone() {
            TokenKind::Number(v) => {
                self.advance();
                Ok(Scalar::Number(v))
            }
            TokenKind::Minus => {
                self.advance();
                Ok(Scalar::Neg(Box::new(self.atom()?)))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.sum()?;
                self.expect(TokenKind::RParen, &["')'", "'+'", "'-'", "'*'", "'/'"])?;
                Ok(inner)
            }
            TokenKind::LAngle => self.bracket(),
            TokenKind::Ident(name) => {
                if let Some(e) = self.unknown(&name) {
                    return Err(e);
                }
                let simple = match name.as_str() {
                    "i" => Some(Scalar::ImagUnit),
                    "pi" => Some(Scalar::Pi),
                    "hbar" => Some(Scalar::Hbar),
                    "t" => Some(Scalar::Time),
                    _ => None,
                };
                if let Some(s) = simple {
                    self.advance();
                    return Ok(s);
                }
                if name == "trace" {
                    self.advance();
                    self.expect(TokenKind::LParen, &["'('"])?;
                    let op = self.opexpr()?;
                    self.expect(TokenKind::RParen, &["')'", "'*'"])?;
                    return Ok(Scalar::Trace(Box::new(op)));
                }
                Err(self.error(SCALAR_START))
            }
            _ => Err(self.error(SCALAR_START)),
        }
    }

    fn point(&mut self) -> Result<Point> {
        let sign = match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                Some(-1.0)
            }
            TokenKind::Plus => {
                self.advance();
                Some(1.0)
            }
            _ => None,
        };
        match self.peek().kind.clone() {
            TokenKind::Number(v) => {
                self.advance();
                Ok(Point::Value(sign.unwrap_or(1.0) * v))
            }
            TokenKind::Ident(name) if sign.is_none() && (name == "x" || name == "y") => {
                self.advance();
                Ok(if name == "x" { Point::X } else { Point::Y })
            }
            TokenKind::Ident(name) if sign.is_none() && !KNOWN.contains(&name.as_str()) => Err(self.unknown(&name).expect("unknown")),
            _ if sign.is_some() => Err(self.error(&["number"])),
            _ => Err(self.error(&["number", "x", "y"])),
        }
    }

    fn bracket(&mut self) -> Result<Scalar> {
        self.expect(TokenKind::LAngle, &["'<'"])?;
        let bra = self.point()?;
        self.expect(TokenKind::Bar, &["'|'"])?;
        let op = self.opexpr()?;
        self.expect(TokenKind::Bar, &["'|'", "'*'"])?;
        let ket = self.point()?;
        self.expect(TokenKind::RAngle, &["'>'"])?;
        Ok(Scalar::Bracket(bra, Box::new(op), ket))
    }

    fn opexpr(&mut self) -> Result<OpExpr> {
        let mut acc = self.opatom()?;
        while self.peek().kind == TokenKind::Star {
            self.advance();
            acc = OpExpr::Product(Box::new(acc), Box::new(self.opatom()?));
        }
        Ok(acc)
    }

    fn opatom(&mut self) -> Result<OpExpr> {
        self.enter()?;
        let out = self.opatom_inner();
        self.depth -= 1;
        out
    }

    fn opatom_inner(&mut self) -> Result<OpExpr> {
        match self.peek().kind.clone() {
            TokenKind::LParen => {
                self.advance();
                let inner = self.opexpr()?;
                self.expect(TokenKind::RParen, &["')'", "'*'"])?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if let Some(e) = self.unknown(&name) {
                    return Err(e);
                }
                if let Some(a) = OpAtom::from_name(&name) {
                    self.advance();
                    return Ok(OpExpr::Atom(a));
                }
                if name == "exp" {
                    self.advance();
                    self.expect(TokenKind::LParen, &["'('"])?;
                    let e = self.exp_body()?;
                    self.expect(TokenKind::RParen, &["')'", "'*'", "'/'"])?;
                    return Ok(e);
                }
                Err(self.error(OPERATOR_START))
            }
            _ => Err(self.error(OPERATOR_START)),
        }
    }

    /// `factor (("*" | "/") factor)*` with exactly one operator atom among the factors.
    fn exp_body(&mut self) -> Result<OpExpr> {
        let mut scalar: Option<Scalar> = None;
        let mut op: Option<OpAtom> = None;
        let mut divide = false;
        loop {
            let here = self.peek().clone();
            let atom = match &here.kind {
                TokenKind::Ident(name) => OpAtom::from_name(name),
                _ => None,
            };
            if let Some(a) = atom {
                self.advance();
                if divide {
                    return Err(Error::IllTyped(format!(
                        "operator {} cannot be a divisor (line {}, column {})",
                        a.name(),
                        here.line,
                        here.column
                    )));
                }
                if op.replace(a).is_some() {
                    return Err(Error::IllTyped(format!(
                        "exp takes exactly one operator atom (second one at line {}, column {})",
                        here.line, here.column
                    )));
                }
            } else {
                let s = self.atom()?;
                scalar = Some(match (scalar, divide) {
                    (None, false) => s,
                    (None, true) => Scalar::Div(Box::new(Scalar::Number(1.0)), Box::new(s)),
                    (Some(acc), false) => Scalar::Mul(Box::new(acc), Box::new(s)),
                    (Some(acc), true) => Scalar::Div(Box::new(acc), Box::new(s)),
                });
            }
            match self.peek().kind {
                TokenKind::Star => divide = false,
                TokenKind::Slash => divide = true,
                _ => break,
            }
            self.advance();
        }
        let op = op.ok_or_else(|| Error::IllTyped("exp needs an operator atom".into()))?;
        Ok(OpExpr::Exp {
            scalar: scalar.map(Box::new),
            op,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity_bracket() {
        let e = parse("<0| I |0>").unwrap();
        assert_eq!(
            e,
            Scalar::Bracket(Point::Value(0.0), Box::new(OpExpr::Atom(OpAtom::I)), Point::Value(0.0))
        );
    }

    #[test]
    fn parses_propagator() {
        let e = parse("<x| exp(-i*t*Hfree/hbar) |y>").unwrap();
        let Scalar::Bracket(Point::X, op, Point::Y) = e else { panic!() };
        let OpExpr::Exp { scalar: Some(s), op: OpAtom::Hfree } = *op else { panic!() };
        let expect = Scalar::Div(
            Box::new(Scalar::Mul(Box::new(Scalar::Neg(Box::new(Scalar::ImagUnit))), Box::new(Scalar::Time))),
            Box::new(Scalar::Hbar),
        );
        assert_eq!(*s, expect);
    }

    #[test]
    fn missing_operator_is_a_syntax_error() {
        match parse("<0| |0>") {
            Err(Error::Syntax { line: 1, column: 5, expected, .. }) => assert!(expected.contains(&"Q".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_reported() {
        assert!(matches!(parse("2*foo"), Err(Error::UnknownIdentifier { ref name, column: 3, .. }) if name == "foo"));
        assert!(matches!(parse("<z|I|0>"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn exp_shape_errors() {
        assert!(matches!(parse("trace(exp(2*t))"), Err(Error::IllTyped(_))));
        assert!(matches!(parse("trace(exp(Q*P))"), Err(Error::IllTyped(_))));
        assert!(matches!(parse("trace(exp(2/Q))"), Err(Error::IllTyped(_))));
    }

    #[test]
    fn products_are_left_associative() {
        let e = parse("1 - 2 - 3").unwrap();
        assert_eq!(e.to_string(), "((1.0 - 2.0) - 3.0)");
        let e = parse("trace(Q*P*U)").unwrap();
        assert_eq!(e.to_string(), "trace(((Q * P) * U))");
    }

    #[test]
    fn deep_nesting_is_rejected_without_overflow() {
        let text = format!("{}1{}", "(".repeat(5000), ")".repeat(5000));
        assert!(matches!(parse(&text), Err(Error::Syntax { .. })));
        let text = "-".repeat(60_000) + "1";
        assert!(parse(&text).is_err());
    }

    #[test]
    fn oversized_input_is_rejected() {
        let text = "1+".repeat(40_000) + "1";
        assert!(matches!(parse(&text), Err(Error::InvalidParameter(_))));
    }
}
