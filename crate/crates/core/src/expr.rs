//! Scalar expression trees over the ambient coordinates.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Const(f64),
    /// Ambient coordinate by index.
    Coord(usize),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    Neg(Box<Expression>),
    Powi(Box<Expression>, i32),
    Apply(Func, Box<Expression>),
}

impl Expression {
    pub fn constant(v: f64) -> Self {
        Expression::Const(v)
    }

    pub fn coord(i: usize) -> Self {
        Expression::Coord(i)
    }

    pub fn powi(self, p: i32) -> Self {
        Expression::Powi(Box::new(self), p)
    }

    pub fn apply(self, f: Func) -> Self {
        Expression::Apply(f, Box::new(self))
    }

    pub fn sin(self) -> Self {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> Self {
        self.apply(Func::Cos)
    }

    pub fn exp(self) -> Self {
        self.apply(Func::Exp)
    }

    pub fn ln(self) -> Self {
        self.apply(Func::Log)
    }

    pub fn sqrt(self) -> Self {
        self.apply(Func::Sqrt)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expression::Const(c) if *c == 0.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        use Expression::*;
        match self {
            Const(_) => None,
            Coord(i) => Some(*i),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Neg(a) | Powi(a, _) | Apply(_, a) => a.max_coord(),
        }
    }

    /// Canonical form: negated literals are folded into the literal.
    pub fn canonical(&self) -> Self {
        use Expression::*;
        let b = |e: &Expression| Box::new(e.canonical());
        match self {
            Const(c) => Const(*c),
            Coord(i) => Coord(*i),
            Add(x, y) => Add(b(x), b(y)),
            Sub(x, y) => Sub(b(x), b(y)),
            Mul(x, y) => Mul(b(x), b(y)),
            Div(x, y) => Div(b(x), b(y)),
            Neg(x) => match x.canonical() {
                Const(c) => Const(-c),
                other => Neg(Box::new(other)),
            },
            Powi(x, p) => Powi(b(x), *p),
            Apply(f, x) => Apply(*f, b(x)),
        }
    }

    /// Plain value at `point`.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Ok(jet_eval(self, point, 0)?.value())
    }

    /// Render with the given coordinate names, in the text grammar accepted
    /// by the spec parser.
    pub fn display_with<'a>(&'a self, coords: &'a [String]) -> impl fmt::Display + 'a {
        Printer { expr: self, coords }
    }
}

/// Exact value/gradient/Hessian of `expr` at `point`, up to `order`.
pub fn jet_eval(expr: &Expression, point: &[f64], order: u8) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::OrderExhausted(format!(
            "requested jet order {order}, maximum is {MAX_ORDER}"
        )));
    }
    if let Some(m) = expr.max_coord() {
        if m >= point.len() {
            return Err(Error::DimensionMismatch {
                expected: m + 1,
                got: point.len(),
            });
        }
    }
    eval_rec(expr, point, order)
}

fn eval_rec(expr: &Expression, p: &[f64], order: u8) -> Result<Jet> {
    use Expression::*;
    let n = p.len();
    Ok(match expr {
        Const(c) => Jet::constant(n, order, *c),
        Coord(i) => Jet::variable(n, order, *i, p[*i]),
        Add(a, b) => eval_rec(a, p, order)? + eval_rec(b, p, order)?,
        Sub(a, b) => eval_rec(a, p, order)? - eval_rec(b, p, order)?,
        Mul(a, b) => eval_rec(a, p, order)? * eval_rec(b, p, order)?,
        Div(a, b) => eval_rec(a, p, order)?.try_div(&eval_rec(b, p, order)?)?,
        Neg(a) => -eval_rec(a, p, order)?,
        Powi(a, k) => eval_rec(a, p, order)?.try_powi(*k)?,
        Apply(f, a) => {
            let x = eval_rec(a, p, order)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => x.try_ln()?,
                Func::Sqrt => x.try_sqrt()?,
            }
        }
    })
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $variant:ident) => {
        impl $tr for Expression {
            type Output = Expression;
            fn $m(self, rhs: Expression) -> Expression {
                Expression::$variant(Box::new(self), Box::new(rhs))
            }
        }
        impl $tr<f64> for Expression {
            type Output = Expression;
            fn $m(self, rhs: f64) -> Expression {
                Expression::$variant(Box::new(self), Box::new(Expression::Const(rhs)))
            }
        }
    };
}
expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::Neg(Box::new(self))
    }
}

// Binding strength used when printing.
fn precedence(e: &Expression) -> u8 {
    use Expression::*;
    match e {
        Add(..) | Sub(..) => 1,
        Mul(..) | Div(..) => 2,
        Neg(..) => 3,
        Powi(..) => 4,
        Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
        Const(_) | Coord(_) | Apply(..) => 5,
    }
}

struct Printer<'a> {
    expr: &'a Expression,
    coords: &'a [String],
}

impl Printer<'_> {
    fn sub<'b>(&'b self, e: &'b Expression) -> Printer<'b> {
        Printer {
            expr: e,
            coords: self.coords,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, e: &Expression, paren: bool) -> fmt::Result {
        if paren {
            write!(f, "({})", self.sub(e))
        } else {
            write!(f, "{}", self.sub(e))
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expression::*;
        match self.expr {
            Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Coord(i) => match self.coords.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{i}"),
            },
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                let (op, p) = match self.expr {
                    Add(..) => ("+", 1),
                    Sub(..) => ("-", 1),
                    Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                // Left-associative: the left child may share the level, the
                // right child may not.
                self.wrapped(f, a, precedence(a) < p)?;
                write!(f, " {op} ")?;
                self.wrapped(f, b, precedence(b) <= p)
            }
            Neg(a) => {
                f.write_str("-")?;
                self.wrapped(f, a, precedence(a) < 4)
            }
            Powi(a, k) => {
                self.wrapped(f, a, precedence(a) < 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Apply(func, a) => write!(f, "{}({})", func.name(), self.sub(a)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expression {
        Expression::coord(0)
    }
    fn y() -> Expression {
        Expression::coord(1)
    }

    #[test]
    fn product_jet() {
        let j = jet_eval(&(x() * y()), &[2.0, 3.0], 2).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.gradient(), &[3.0, 2.0]);
        assert_eq!(j.hessian_matrix(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn constant_jet() {
        let j = jet_eval(&Expression::constant(5.0), &[0.3, -0.2, 0.9], 2).unwrap();
        assert_eq!(j.value(), 5.0);
        assert!(j.gradient().iter().all(|g| *g == 0.0));
        assert!(j.hessian_matrix().iter().flatten().all(|h| *h == 0.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            jet_eval(&(x() / y()), &[1.0, 0.0], 0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            jet_eval(&y().ln(), &[1.0, -1.0], 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            jet_eval(&Expression::coord(3), &[1.0, 2.0], 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            jet_eval(&x(), &[1.0], 3),
            Err(Error::OrderExhausted(_))
        ));
    }

    #[test]
    fn canonical_folds_negated_literals() {
        let e = -(Expression::constant(2.0)) * -(x());
        assert_eq!(
            e.canonical(),
            Expression::Mul(
                Box::new(Expression::Const(-2.0)),
                Box::new(Expression::Neg(Box::new(x())))
            )
        );
    }

    #[test]
    fn printing_respects_associativity() {
        let names = vec!["x".to_string(), "y".to_string()];
        let e = x() - (y() - x());
        assert_eq!(e.display_with(&names).to_string(), "x - (y - x)");
        let e = (x() - y()) - x();
        assert_eq!(e.display_with(&names).to_string(), "x - y - x");
        let e = (-(x())).powi(2) / (y() * 2.0);
        assert_eq!(e.display_with(&names).to_string(), "(-x)^2 / (y * 2)");
        let e = Expression::Const(-0.5) * x().sin();
        assert_eq!(e.display_with(&names).to_string(), "-0.5 * sin(x)");
    }
}
