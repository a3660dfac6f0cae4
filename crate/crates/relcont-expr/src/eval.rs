use crate::ast::{BinOp, Expr, Func, Node};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
#[error("{line}:{column}: {message}")]
pub struct EvalError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

fn fail(e: &Expr, message: impl Into<String>) -> EvalError {
    EvalError { message: message.into(), line: e.span.line, column: e.span.column }
}

pub(crate) fn eval(e: &Expr, vars: &[f64]) -> Result<f64, EvalError> {
    let v = match &e.node {
        Node::Num(v) => *v,
        Node::Var(i) => *vars.get(*i).ok_or_else(|| fail(e, format!("variable #{i} not bound")))?,
        Node::Neg(a) => -eval(a, vars)?,
        Node::Bin(op, a, b) => {
            let x = eval(a, vars)?;
            let y = eval(b, vars)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(fail(e, "division by zero"));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x < 0.0 && y.fract() != 0.0 {
                        return Err(fail(e, "negative base with non-integer exponent"));
                    }
                    if x == 0.0 && y < 0.0 {
                        return Err(fail(e, "division by zero"));
                    }
                    pow(x, y)
                }
            }
        }
        Node::Call(f, args) => {
            let x = eval(&args[0], vars)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Tanh => x.tanh(),
                Func::Abs => x.abs(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(fail(e, "log of non-positive argument"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(fail(e, "sqrt of negative argument"));
                    }
                    x.sqrt()
                }
                Func::Min => x.min(eval(&args[1], vars)?),
                Func::Max => x.max(eval(&args[1], vars)?),
            }
        }
    };
    if !v.is_finite() {
        return Err(fail(e, "non-finite result"));
    }
    Ok(v)
}

/// Integer exponents go through `powi` so that e.g. `x^2` is exactly `x*x`.
fn pow(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= 64.0 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}
