use crate::ast::{BinOp, Expr, Node};

const P_SUM: u8 = 1;
const P_PRODUCT: u8 = 2;
const P_UNARY: u8 = 3;
const P_POWER: u8 = 4;
const P_ATOM: u8 = 5;

fn prec(n: &Node) -> u8 {
    match n {
        Node::Num(v) if *v < 0.0 => P_UNARY,
        Node::Num(_) | Node::Var(_) | Node::Call(..) => P_ATOM,
        Node::Neg(_) => P_UNARY,
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => P_SUM,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => P_PRODUCT,
        Node::Bin(BinOp::Pow, ..) => P_POWER,
    }
}

fn wrap(e: &Expr, vars: &[&str], need: u8, out: &mut String) {
    if prec(&e.node) < need {
        out.push('(');
        write(e, vars, out);
        out.push(')');
    } else {
        write(e, vars, out);
    }
}

fn write(e: &Expr, vars: &[&str], out: &mut String) {
    match &e.node {
        Node::Num(v) => {
            if *v < 0.0 {
                out.push('-');
                out.push_str(&format!("{}", -v));
            } else {
                out.push_str(&format!("{v}"));
            }
        }
        Node::Var(i) => out.push_str(vars.get(*i).copied().unwrap_or("?")),
        Node::Neg(a) => {
            out.push('-');
            wrap(a, vars, P_UNARY, out);
        }
        Node::Bin(op, a, b) => {
            let (sym, p) = match op {
                BinOp::Add => ("+", P_SUM),
                BinOp::Sub => ("-", P_SUM),
                BinOp::Mul => ("*", P_PRODUCT),
                BinOp::Div => ("/", P_PRODUCT),
                BinOp::Pow => ("^", P_POWER),
            };
            if *op == BinOp::Pow {
                // base must be an atom; exponent is parsed as a unary expression
                wrap(a, vars, P_ATOM, out);
                out.push('^');
                wrap(b, vars, P_UNARY, out);
            } else {
                wrap(a, vars, p, out);
                out.push_str(if p == P_SUM { " " } else { "" });
                out.push_str(sym);
                out.push_str(if p == P_SUM { " " } else { "" });
                wrap(b, vars, p + 1, out);
            }
        }
        Node::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write(a, vars, out);
            }
            out.push(')');
        }
    }
}

pub(crate) fn print(e: &Expr, vars: &[&str]) -> String {
    let mut s = String::new();
    write(e, vars, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use crate::Expr;
    use proptest::prelude::*;

    fn roundtrip(text: &str) -> String {
        let e = Expr::parse(text).unwrap();
        let printed = e.to_coordinate_string();
        let again = Expr::parse(&printed).unwrap();
        assert!(e.same_as(&again), "{text} -> {printed}");
        printed
    }

    #[test]
    fn fixtures() {
        assert_eq!(roundtrip("-x0^2"), "-x0^2");
        assert_eq!(roundtrip("(-x0)^2"), "(-x0)^2");
        assert_eq!(roundtrip("x0 - (x1 - x2)"), "x0 - (x1 - x2)");
        assert_eq!(roundtrip("(x0 - x1) - x2"), "x0 - x1 - x2");
        assert_eq!(roundtrip("x0/(x1*x2)"), "x0/(x1*x2)");
        assert_eq!(roundtrip("(2^3)^2"), "(2^3)^2");
        assert_eq!(roundtrip("2^3^2"), "2^3^2");
        assert_eq!(roundtrip("x0*-x1"), "x0*-x1");
        assert_eq!(roundtrip("min(x0,x1+1)"), "min(x0, x1 + 1)");
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|v| format!("{}", v as f64 / 8.0)),
            (0usize..4).prop_map(|i| format!("x{i}")),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), 0usize..5).prop_map(|(a, b, k)| {
                    let op = ["+", "-", "*", "/", "^"][k];
                    format!("({a}){op}({b})")
                }),
                inner.clone().prop_map(|a| format!("-({a})")),
                inner.clone().prop_map(|a| format!("sin({a})")),
                (inner.clone(), inner).prop_map(|(a, b)| format!("max({a}, {b})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_print_parse_is_idempotent(text in arb_expr()) {
            let e = Expr::parse(&text).unwrap();
            let p1 = e.to_coordinate_string();
            let e2 = Expr::parse(&p1).unwrap();
            prop_assert!(e.same_as(&e2));
            prop_assert_eq!(p1, e2.to_coordinate_string());
        }
    }
}
