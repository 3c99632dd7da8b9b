//! Compilation of checked expressions into evaluation plans over one module.

use std::collections::BTreeMap;

use super::ast::{DiracExpr, OpAtom, OpExpr, Point, Scalar};
use crate::calculus::{self, apply_momentum, apply_position, is_standard_layout, GridGeometry, HamiltonianKind};
use crate::error::{Error, Result};
use crate::hilbert::AlgebraicHilbertSpace;
use crate::limits::{sweep, ConvergenceReport, SweepOptions};
use crate::linalg::{ensure_dense, hermitian_eigen, spectral_function, CMatrix, C64};
use crate::weyl::LimitChain;

/// Values for the free symbols `t`, `x` and `y`.
pub type Bindings = BTreeMap<String, f64>;

pub fn bindings(pairs: &[(&str, f64)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// One operator-assembly step; operands refer to earlier steps.
#[derive(Debug, Clone, PartialEq)]
pub enum OpStep {
    Fetch(OpAtom),
    /// `exp(coefficient · atom)` through an eigendecomposition of the atom.
    Exponential { coefficient: C64, atom: OpAtom },
    Product { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reduction {
    Constant(C64),
    /// `⟨bra|op|ket⟩/Δx` on grid-snapped points.
    Element { bra: f64, step: usize, ket: f64 },
    /// Delta-normalized propagator of `exp(−i·time·H/ħ)`.
    Kernel { kind: HamiltonianKind, time: f64, x: f64, y: f64 },
    /// `Σ_n e^{coefficient·E_n}` over the spectrum of the Hamiltonian.
    SpectralTrace { kind: HamiltonianKind, coefficient: C64 },
    Trace { step: usize },
    Neg(Box<Reduction>),
    Add(Box<Reduction>, Box<Reduction>),
    Sub(Box<Reduction>, Box<Reduction>),
    Mul(Box<Reduction>, Box<Reduction>),
    Div(Box<Reduction>, Box<Reduction>),
}

/// Operator steps plus the scalar reduction that consumes them.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPlan {
    pub dim: usize,
    pub steps: Vec<OpStep>,
    pub reduction: Reduction,
}

fn kind_of(atom: OpAtom) -> Option<HamiltonianKind> {
    match atom {
        OpAtom::Hfree => Some(HamiltonianKind::Free),
        OpAtom::Hho => Some(HamiltonianKind::Harmonic),
        _ => None,
    }
}

struct Compiler<'a> {
    space: &'a AlgebraicHilbertSpace,
    bindings: &'a Bindings,
    hbar: f64,
    steps: Vec<OpStep>,
}

impl Compiler<'_> {
    fn symbol(&self, name: &str) -> Result<f64> {
        self.bindings
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundSymbol(name.to_string()))
    }

    fn point(&self, p: Point) -> Result<f64> {
        match p {
            Point::Value(v) => Ok(v),
            Point::X => self.symbol("x"),
            Point::Y => self.symbol("y"),
        }
    }

    fn constant(&mut self, s: &Scalar) -> Result<C64> {
        match self.scalar(s)? {
            Reduction::Constant(c) => Ok(c),
            _ => Err(Error::IllTyped("the scalar inside exp must not contain brackets or traces".into())),
        }
    }

    /// Coefficient `c` of `exp(c·atom)`, checked to be purely imaginary.
    fn exponent(&mut self, scalar: &Option<Box<Scalar>>, atom: OpAtom) -> Result<C64> {
        let c = match scalar {
            Some(s) => self.constant(s)?,
            None => C64::new(1.0, 0.0),
        };
        if !atom.is_hermitian() {
            return Err(Error::NotExponentiable(format!("{} is not Hermitian", atom.name())));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Numeric(format!("exponent coefficient {c} is not finite")));
        }
        if c.re.abs() > 1e-12 * c.norm() {
            return Err(Error::IllTyped(format!(
                "exponent coefficient {c} is not purely imaginary, so exp({}) would not be unitary",
                atom.name()
            )));
        }
        Ok(C64::new(0.0, c.im))
    }

    fn push(&mut self, step: OpStep) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    fn op(&mut self, e: &OpExpr) -> Result<usize> {
        Ok(match e {
            OpExpr::Atom(a) => self.push(OpStep::Fetch(*a)),
            OpExpr::Exp { scalar, op } => {
                let coefficient = self.exponent(scalar, *op)?;
                self.push(OpStep::Exponential { coefficient, atom: *op })
            }
            OpExpr::Product(l, r) => {
                let left = self.op(l)?;
                let right = self.op(r)?;
                self.push(OpStep::Product { left, right })
            }
        })
    }

    fn binary(
        &mut self,
        a: &Scalar,
        b: &Scalar,
        fold: fn(C64, C64) -> C64,
        wrap: fn(Box<Reduction>, Box<Reduction>) -> Reduction,
    ) -> Result<Reduction> {
        let (ra, rb) = (self.scalar(a)?, self.scalar(b)?);
        Ok(match (ra, rb) {
            (Reduction::Constant(x), Reduction::Constant(y)) => Reduction::Constant(fold(x, y)),
            (ra, rb) => wrap(Box::new(ra), Box::new(rb)),
        })
    }

    fn scalar(&mut self, s: &Scalar) -> Result<Reduction> {
        let real = |v: f64| Reduction::Constant(C64::new(v, 0.0));
        Ok(match s {
            Scalar::Number(v) => real(*v),
            Scalar::ImagUnit => Reduction::Constant(C64::new(0.0, 1.0)),
            Scalar::Pi => real(std::f64::consts::PI),
            Scalar::Hbar => real(self.hbar),
            Scalar::Time => real(self.symbol("t")?),
            Scalar::Neg(a) => match self.scalar(a)? {
                Reduction::Constant(c) => Reduction::Constant(-c),
                r => Reduction::Neg(Box::new(r)),
            },
            Scalar::Add(a, b) => self.binary(a, b, |x, y| x + y, Reduction::Add)?,
            Scalar::Sub(a, b) => self.binary(a, b, |x, y| x - y, Reduction::Sub)?,
            Scalar::Mul(a, b) => self.binary(a, b, |x, y| x * y, Reduction::Mul)?,
            Scalar::Div(a, b) => self.binary(a, b, |x, y| x / y, Reduction::Div)?,
            Scalar::Bracket(bra, op, ket) => {
                let (x, y) = (self.point(*bra)?, self.point(*ket)?);
                if let OpExpr::Exp { scalar, op: atom } = op.as_ref() {
                    if let Some(kind) = kind_of(*atom) {
                        let c = self.exponent(scalar, *atom)?;
                        if is_standard_layout(self.space) {
                            // exp(c·H) = exp(−i·τ·H/ħ) with τ = i·c·ħ
                            let time = -c.im * self.hbar;
                            return Ok(Reduction::Kernel { kind, time, x, y });
                        }
                    }
                }
                let step = self.op(op)?;
                Reduction::Element { bra: x, step, ket: y }
            }
            Scalar::Trace(op) => match op.as_ref() {
                OpExpr::Atom(OpAtom::I) => real(self.space.dim() as f64),
                OpExpr::Exp { scalar, op: atom } => {
                    let c = self.exponent(scalar, *atom)?;
                    match kind_of(*atom) {
                        Some(kind) => Reduction::SpectralTrace { kind, coefficient: c },
                        None if *atom == OpAtom::I => Reduction::Constant(c.exp() * self.space.dim() as f64),
                        None => {
                            let step = self.push(OpStep::Exponential { coefficient: c, atom: *atom });
                            Reduction::Trace { step }
                        }
                    }
                }
                other => {
                    let step = self.op(other)?;
                    Reduction::Trace { step }
                }
            },
        })
    }
}

/// Type-checks `expr` against `space` and resolves every symbol.
pub fn compile(expr: &DiracExpr, space: &AlgebraicHilbertSpace, bindings: &Bindings) -> Result<EvalPlan> {
    let mut c = Compiler {
        space,
        bindings,
        hbar: space.descriptor().hbar(),
        steps: Vec::new(),
    };
    let reduction = c.scalar(expr)?;
    Ok(EvalPlan {
        dim: space.dim(),
        steps: c.steps,
        reduction,
    })
}

/// `atom · ψ` without forming a matrix.
fn apply_atom(space: &AlgebraicHilbertSpace, atom: OpAtom, psi: &[C64]) -> Vec<C64> {
    let d = space.descriptor();
    // (2 − W² − W⁻²)/4 · ψ
    let sine_square = |w: &crate::hilbert::MonomialOp, psi: &[C64]| -> Vec<C64> {
        let up = w.pow(2).apply(psi);
        let down = w.pow(-2).apply(psi);
        psi.iter()
            .zip(up.iter().zip(&down))
            .map(|(p, (u, v))| (2.0 * p - u - v) * 0.25)
            .collect()
    };
    match atom {
        OpAtom::Q => apply_position(space, psi),
        OpAtom::P => apply_momentum(space, psi),
        OpAtom::U => space.u().apply(psi),
        OpAtom::V => space.v().apply(psi),
        OpAtom::I => psi.to_vec(),
        OpAtom::Hfree | OpAtom::Hho => {
            let b = d.b_f64();
            let mut out: Vec<C64> = sine_square(space.v(), psi).into_iter().map(|z| z * (0.5 / (b * b))).collect();
            if atom == OpAtom::Hho {
                let a = d.a_f64();
                for (o, z) in out.iter_mut().zip(sine_square(space.u(), psi)) {
                    *o += z * (0.5 / (a * a));
                }
            }
            out
        }
    }
}

fn atom_matrix(space: &AlgebraicHilbertSpace, atom: OpAtom) -> Result<CMatrix> {
    Ok(match atom {
        OpAtom::Q => calculus::position_op(space)?.entries,
        OpAtom::P => calculus::momentum_op(space)?.entries,
        OpAtom::Hfree => calculus::hamiltonian(space, HamiltonianKind::Free)?.entries,
        OpAtom::Hho => calculus::hamiltonian(space, HamiltonianKind::Harmonic)?.entries,
        OpAtom::I => CMatrix::identity(space.dim(), space.dim()),
        OpAtom::U | OpAtom::V => {
            return Err(Error::NotExponentiable(format!("{} is not Hermitian", atom.name())));
        }
    })
}

struct Executor<'a> {
    plan: &'a EvalPlan,
    space: &'a AlgebraicHilbertSpace,
    exponentials: Vec<Option<CMatrix>>,
}

impl Executor<'_> {
    fn realize(&mut self, step: usize) -> Result<()> {
        match &self.plan.steps[step] {
            OpStep::Exponential { coefficient, atom } if self.exponentials[step].is_none() => {
                let n = self.space.dim();
                ensure_dense(n)?;
                let m = if *atom == OpAtom::I {
                    CMatrix::identity(n, n) * coefficient.exp()
                } else {
                    let (values, vectors) = hermitian_eigen(&atom_matrix(self.space, *atom)?)?;
                    let weights: Vec<C64> = values.iter().map(|&e| (coefficient * e).exp()).collect();
                    spectral_function(&vectors, &weights)
                };
                self.exponentials[step] = Some(m);
            }
            OpStep::Product { left, right } => {
                let (l, r) = (*left, *right);
                self.realize(l)?;
                self.realize(r)?;
            }
            _ => {}
        }
        Ok(())
    }

    fn apply(&self, step: usize, psi: Vec<C64>) -> Vec<C64> {
        match &self.plan.steps[step] {
            OpStep::Fetch(a) => apply_atom(self.space, *a, &psi),
            OpStep::Exponential { .. } => {
                let m = self.exponentials[step].as_ref().expect("realized before use");
                (m * crate::linalg::CVector::from_vec(psi)).as_slice().to_vec()
            }
            OpStep::Product { left, right } => {
                let inner = self.apply(*right, psi);
                self.apply(*left, inner)
            }
        }
    }

    fn column(&mut self, step: usize, k: usize) -> Result<Vec<C64>> {
        self.realize(step)?;
        let mut e = vec![C64::new(0.0, 0.0); self.space.dim()];
        e[k] = C64::new(1.0, 0.0);
        Ok(self.apply(step, e))
    }

    fn reduce(&mut self, r: &Reduction) -> Result<C64> {
        Ok(match r {
            Reduction::Constant(c) => *c,
            Reduction::Element { bra, step, ket } => {
                let geom = GridGeometry::new(self.space.descriptor())?;
                let j = geom.nearest_index(*bra)?;
                let k = geom.nearest_index(*ket)?;
                self.column(*step, k)?[j] / geom.dx
            }
            Reduction::Kernel { kind, time, x, y } => calculus::propagator_kernel(self.space, *kind, *time, *x, *y)?,
            Reduction::SpectralTrace { kind, coefficient } => calculus::spectrum(self.space, *kind)?
                .iter()
                .map(|&e| (coefficient * e).exp())
                .sum(),
            Reduction::Trace { step } => {
                let n = self.space.dim();
                ensure_dense(n)?;
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.column(*step, k)?[k];
                }
                acc
            }
            Reduction::Neg(a) => -self.reduce(a)?,
            Reduction::Add(a, b) => self.reduce(a)? + self.reduce(b)?,
            Reduction::Sub(a, b) => self.reduce(a)? - self.reduce(b)?,
            Reduction::Mul(a, b) => self.reduce(a)? * self.reduce(b)?,
            Reduction::Div(a, b) => self.reduce(a)? / self.reduce(b)?,
        })
    }
}

impl EvalPlan {
    pub fn execute(&self, space: &AlgebraicHilbertSpace) -> Result<C64> {
        if space.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: space.dim(),
            });
        }
        let mut ex = Executor {
            plan: self,
            space,
            exponentials: vec![None; self.steps.len()],
        };
        let v = ex.reduce(&self.reduction)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Numeric(format!("expression evaluated to {v}")));
        }
        Ok(v)
    }
}

pub fn evaluate(expr: &DiracExpr, space: &AlgebraicHilbertSpace, bindings: &Bindings) -> Result<C64> {
    compile(expr, space, bindings)?.execute(space)
}

/// Evaluates `expr` on every chain entry and applies the limit verdict at `tol`.
pub fn evaluate_limit(expr: &DiracExpr, chain: &LimitChain, bindings: &Bindings, tol: f64) -> ConvergenceReport {
    sweep(chain, |s| evaluate(expr, s, bindings), &SweepOptions::with_tol(tol))
}
