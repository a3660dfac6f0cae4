//! Symbolic differentiation with light constant folding.
//!
//! Folding only removes additive zeros and multiplicative ones/zeros, so the
//! derivative keeps the evaluation semantics (domain errors included) of the
//! original subexpressions it reuses.

use crate::ast::{BinOp, Expr, Func, Node, Span};

fn num(v: f64) -> Expr {
    if v < 0.0 {
        neg(Expr::new(Node::Num(-v), Span::default()))
    } else {
        Expr::new(Node::Num(v), Span::default())
    }
}

fn as_num(e: &Expr) -> Option<f64> {
    match &e.node {
        Node::Num(v) => Some(*v),
        Node::Neg(a) => as_num(a).map(|v| -v),
        _ => None,
    }
}

fn neg(a: Expr) -> Expr {
    match &a.node {
        Node::Num(v) if *v == 0.0 => a,
        Node::Neg(inner) => (**inner).clone(),
        _ => Expr::new(Node::Neg(Box::new(a)), Span::default()),
    }
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::new(Node::Bin(op, Box::new(a), Box::new(b)), Span::default())
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => bin(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        _ => bin(BinOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), _) | (_, Some(x)) if x == 0.0 => num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => bin(BinOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), _) if x == 0.0 => num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => bin(BinOp::Div, a, b),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::new(Node::Call(f, vec![a]), Span::default())
}

fn is_zero(e: &Expr) -> bool {
    as_num(e) == Some(0.0)
}

pub(crate) fn derivative(e: &Expr, var: usize) -> Expr {
    if !e.node.depends_on(var) {
        return num(0.0);
    }
    match &e.node {
        Node::Num(_) => num(0.0),
        Node::Var(i) => num(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(derivative(a, var)),
        Node::Bin(op, a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b.clone()), mul(a, db)),
                BinOp::Div => {
                    // (a'b - ab') / b^2
                    let numer = sub(mul(da, b.clone()), mul(a, db));
                    div(numer, bin(BinOp::Pow, b, num(2.0)))
                }
                BinOp::Pow => {
                    if let (false, Some(k)) = (b.node.depends_on(var), as_num(&b)) {
                        // d(a^k) = k a^(k-1) a'
                        let lowered = if k - 1.0 == 1.0 { a.clone() } else { bin(BinOp::Pow, a, num(k - 1.0)) };
                        mul(mul(num(k), lowered), da)
                    } else {
                        // d(a^b) = a^b (b' ln a + b a'/a)
                        let mut inner = mul(db, call(Func::Log, a.clone()));
                        if !is_zero(&da) {
                            inner = add(inner, div(mul(b.clone(), da), a.clone()));
                        }
                        mul(bin(BinOp::Pow, a, b), inner)
                    }
                }
            }
        }
        Node::Call(f, args) => {
            let a = args[0].clone();
            let da = derivative(&a, var);
            let outer = match f {
                Func::Sin => call(Func::Cos, a),
                Func::Cos => neg(call(Func::Sin, a)),
                Func::Exp => call(Func::Exp, a),
                Func::Log => div(num(1.0), a),
                Func::Sqrt => div(num(0.5), call(Func::Sqrt, a)),
                Func::Tanh => sub(num(1.0), bin(BinOp::Pow, call(Func::Tanh, a), num(2.0))),
                Func::Abs => div(a.clone(), call(Func::Abs, a)),
                Func::Min | Func::Max => {
                    // derivative of the selected branch; ind = 1 where `a` is selected,
                    // written as (sign(d) + 1)/2 with sign(d) = d/|d| (undefined at ties)
                    let b = args[1].clone();
                    let db = derivative(&b, var);
                    let diff = if *f == Func::Min { sub(b.clone(), a.clone()) } else { sub(a.clone(), b.clone()) };
                    let ind = div(add(div(diff.clone(), call(Func::Abs, diff)), num(1.0)), num(2.0));
                    return add(mul(ind.clone(), da), mul(sub(num(1.0), ind), db));
                }
            };
            mul(outer, da)
        }
    }
}
