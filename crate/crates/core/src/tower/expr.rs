use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Cmp, TowerError, TowerReal, DEFAULT_PREC, MAX_PREC};

/// Expression over positive reals, evaluated to a [`TowerReal`] at a chosen precision.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Rat(BigRational),
    Fact(BigInt),
    E,
    Pi,
    Ln2,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    ExpNeg(Box<Expr>),
    Ln(Box<Expr>),
    NegLn(Box<Expr>),
    Sqrt(Box<Expr>),
    Recip(Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    pub fn big(v: BigInt) -> Expr {
        Expr::Int(v)
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn fact(k: BigInt) -> Expr {
        Expr::Fact(k)
    }

    pub fn pow(self, e: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(e))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn exp_neg(self) -> Expr {
        Expr::ExpNeg(Box::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn neg_ln(self) -> Expr {
        Expr::NegLn(Box::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }

    pub fn recip(self) -> Expr {
        Expr::Recip(Box::new(self))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::Rat(_) | Expr::Fact(_) | Expr::E | Expr::Pi | Expr::Ln2 => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Expr::Exp(a) | Expr::ExpNeg(a) | Expr::Ln(a) | Expr::NegLn(a) | Expr::Sqrt(a) | Expr::Recip(a) => {
                1 + a.depth()
            }
        }
    }

    pub fn eval(&self, prec: u32) -> Result<TowerReal, TowerError> {
        Ok(match self {
            Expr::Int(v) => TowerReal::from_bigint(v, prec)?,
            Expr::Rat(r) => TowerReal::from_rational(r, prec)?,
            Expr::Fact(k) => TowerReal::from_factorial(k, prec)?,
            Expr::E => TowerReal::e(prec),
            Expr::Pi => TowerReal::pi(prec),
            Expr::Ln2 => TowerReal::ln2(prec),
            Expr::Add(a, b) => a.eval(prec)?.add(&b.eval(prec)?)?,
            Expr::Sub(a, b) => a.eval(prec)?.sub(&b.eval(prec)?)?,
            Expr::Mul(a, b) => a.eval(prec)?.mul(&b.eval(prec)?)?,
            Expr::Div(a, b) => a.eval(prec)?.div(&b.eval(prec)?)?,
            Expr::Pow(a, b) => a.eval(prec)?.pow(&b.eval(prec)?)?,
            Expr::Exp(a) => a.eval(prec)?.exp()?,
            Expr::ExpNeg(a) => a.eval(prec)?.exp_neg()?,
            Expr::Ln(a) => a.eval(prec)?.ln()?,
            Expr::NegLn(a) => a.eval(prec)?.neg_ln()?,
            Expr::Sqrt(a) => a.eval(prec)?.sqrt()?,
            Expr::Recip(a) => a.eval(prec)?.recip(),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Rat(r) => write!(f, "({r})"),
            Expr::Fact(k) => write!(f, "{k}!"),
            Expr::E => f.write_str("e"),
            Expr::Pi => f.write_str("pi"),
            Expr::Ln2 => f.write_str("ln2"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::ExpNeg(a) => write!(f, "exp(-{a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::NegLn(a) => write!(f, "-ln({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Recip(a) => write!(f, "1/({a})"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

/// Outcome of a comparison retried at increasing precision.
#[derive(Clone, Debug)]
pub struct Certified {
    pub cmp: Cmp,
    /// Precision at which the answer was obtained (or the last one tried).
    pub prec: u32,
    pub lhs: Option<TowerReal>,
    pub rhs: Option<TowerReal>,
}

/// Compares two expressions, doubling precision from `start` until decided or `MAX_PREC` is passed.
pub fn certify(lhs: &Expr, rhs: &Expr, start: u32) -> Certified {
    let mut prec = start.max(DEFAULT_PREC / 2);
    let mut last = Certified { cmp: Cmp::Undecided, prec, lhs: None, rhs: None };
    while prec <= MAX_PREC {
        let l = lhs.eval(prec).ok();
        let r = rhs.eval(prec).ok();
        let cmp = match (&l, &r) {
            (Some(a), Some(b)) => a.compare(b),
            _ => Cmp::Undecided,
        };
        last = Certified { cmp, prec, lhs: l, rhs: r };
        if cmp.is_decided() {
            break;
        }
        prec *= 2;
    }
    last
}
