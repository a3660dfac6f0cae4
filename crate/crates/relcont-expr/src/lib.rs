//! Field-expression language.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          (right associative)
//! atom    := number | ident | ident '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! so `-x0^2` parses as `-(x0^2)` and `2^-1` as `2^(-1)`. Identifiers are
//! resolved against a variable table fixed at parse time; the default table is
//! the chart coordinates `x0..x9`. Built-in functions: `sin cos exp log sqrt
//! tanh abs` (one argument) and `min max` (two arguments).

mod ast;
mod diff;
mod eval;
mod parse;
mod print;

pub use ast::{BinOp, Expr, Func, Node, Span};
pub use eval::EvalError;
pub use parse::{ParseError, ParseErrorKind};

/// Names of the chart coordinates, the default variable table.
pub const COORDINATES: [&str; 10] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"];

impl Expr {
    /// Parse with the coordinate table `x0..x9`.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text, &COORDINATES)
    }

    /// Parse with a caller-supplied variable table; `Node::Var(i)` refers to `vars[i]`.
    pub fn parse_with(text: &str, vars: &[&str]) -> Result<Expr, ParseError> {
        parse::parse(text, vars)
    }

    /// Canonical text form. `parse(print(e))` reproduces `e` up to spans.
    pub fn print(&self, vars: &[&str]) -> String {
        print::print(self, vars)
    }

    /// Canonical text form using coordinate names.
    pub fn to_coordinate_string(&self) -> String {
        print::print(self, &COORDINATES)
    }

    /// Evaluate at the given variable values.
    pub fn eval(&self, vars: &[f64]) -> Result<f64, EvalError> {
        eval::eval(self, vars)
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        diff::derivative(self, var)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.node.max_var()
    }

    /// True when the expression references variable `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        self.node.depends_on(var)
    }

    /// Structural equality ignoring source spans.
    pub fn same_as(&self, other: &Expr) -> bool {
        self.node.same_as(&other.node)
    }

    /// Replace every `Var(i)` by `with[i]` (variables past the end are kept).
    pub fn substitute(&self, with: &[Expr]) -> Expr {
        let node = match &self.node {
            Node::Num(v) => Node::Num(*v),
            Node::Var(i) => return with.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Neg(a) => Node::Neg(Box::new(a.substitute(with))),
            Node::Bin(op, a, b) => Node::Bin(*op, Box::new(a.substitute(with)), Box::new(b.substitute(with))),
            Node::Call(f, args) => Node::Call(*f, args.iter().map(|a| a.substitute(with)).collect()),
        };
        Expr::new(node, self.span)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::new(Node::Num(v), Span::default())
    }

    pub fn var(i: usize) -> Expr {
        Expr::new(Node::Var(i), Span::default())
    }
}
