use std::fmt;

/// A bra or ket label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Value(f64),
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpAtom {
    Q,
    P,
    U,
    V,
    Hfree,
    Hho,
    I,
}

impl OpAtom {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "Q" => OpAtom::Q,
            "P" => OpAtom::P,
            "U" => OpAtom::U,
            "V" => OpAtom::V,
            "Hfree" => OpAtom::Hfree,
            "Hho" => OpAtom::Hho,
            "I" => OpAtom::I,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            OpAtom::Q => "Q",
            OpAtom::P => "P",
            OpAtom::U => "U",
            OpAtom::V => "V",
            OpAtom::Hfree => "Hfree",
            OpAtom::Hho => "Hho",
            OpAtom::I => "I",
        }
    }

    pub fn is_hermitian(self) -> bool {
        !matches!(self, OpAtom::U | OpAtom::V)
    }

    pub const ALL: [OpAtom; 7] = [OpAtom::Q, OpAtom::P, OpAtom::U, OpAtom::V, OpAtom::Hfree, OpAtom::Hho, OpAtom::I];
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpExpr {
    Atom(OpAtom),
    /// `exp(c·A)`; `None` stands for `c = 1`.
    Exp { scalar: Option<Box<Scalar>>, op: OpAtom },
    Product(Box<OpExpr>, Box<OpExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Number(f64),
    ImagUnit,
    Pi,
    Hbar,
    Time,
    Bracket(Point, Box<OpExpr>, Point),
    Trace(Box<OpExpr>),
    Neg(Box<Scalar>),
    Add(Box<Scalar>, Box<Scalar>),
    Sub(Box<Scalar>, Box<Scalar>),
    Mul(Box<Scalar>, Box<Scalar>),
    Div(Box<Scalar>, Box<Scalar>),
}

pub type DiracExpr = Scalar;

impl Scalar {
    /// True when no bracket or trace occurs, so the value needs no space.
    pub fn is_constant(&self) -> bool {
        match self {
            Scalar::Bracket(..) | Scalar::Trace(_) => false,
            Scalar::Neg(a) => a.is_constant(),
            Scalar::Add(a, b) | Scalar::Sub(a, b) | Scalar::Mul(a, b) | Scalar::Div(a, b) => a.is_constant() && b.is_constant(),
            _ => true,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Value(v) => write!(f, "{v:?}"),
            Point::X => f.write_str("x"),
            Point::Y => f.write_str("y"),
        }
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::Atom(a) => f.write_str(a.name()),
            OpExpr::Exp { scalar: None, op } => write!(f, "exp({})", op.name()),
            OpExpr::Exp { scalar: Some(s), op } => write!(f, "exp({s} * {})", op.name()),
            OpExpr::Product(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

/// Fully parenthesized, so that parsing the output gives back the same tree.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(v) => write!(f, "{v:?}"),
            Scalar::ImagUnit => f.write_str("i"),
            Scalar::Pi => f.write_str("pi"),
            Scalar::Hbar => f.write_str("hbar"),
            Scalar::Time => f.write_str("t"),
            Scalar::Bracket(x, op, y) => write!(f, "<{x}|{op}|{y}>"),
            Scalar::Trace(op) => write!(f, "trace({op})"),
            Scalar::Neg(a) => write!(f, "(-{a})"),
            Scalar::Add(a, b) => write!(f, "({a} + {b})"),
            Scalar::Sub(a, b) => write!(f, "({a} - {b})"),
            Scalar::Mul(a, b) => write!(f, "({a} * {b})"),
            Scalar::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}
