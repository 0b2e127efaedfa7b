//! Expression trees, constraints and problems.
//!
//! An [`Expr`] is evaluated either on points (`f64`) or on boxes through its
//! natural interval extension. Constraints are kept in the normalized form
//! `f <= 0` / `f >= 0`, where `f = g - h` for a user relation `g rel h`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::boxes::IntervalBox;
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Sqr,
    Pow(u32),
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

impl BinOp {
    pub fn apply(self, a: Interval, b: Interval) -> Interval {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        }
    }

    pub fn apply_point(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

impl UnOp {
    pub fn apply(self, a: Interval) -> Interval {
        match self {
            UnOp::Neg => -a,
            UnOp::Sqr => a.sqr(),
            UnOp::Pow(n) => a.powi(n),
            UnOp::Sqrt => a.sqrt(),
            UnOp::Exp => a.exp(),
            UnOp::Log => a.log(),
            UnOp::Sin => a.sin(),
            UnOp::Cos => a.cos(),
        }
    }

    pub fn apply_point(self, a: f64) -> f64 {
        match self {
            UnOp::Neg => -a,
            UnOp::Sqr => a * a,
            UnOp::Pow(n) => a.powi(n as i32),
            UnOp::Sqrt => a.sqrt(),
            UnOp::Exp => a.exp(),
            UnOp::Log => a.ln(),
            UnOp::Sin => a.sin(),
            UnOp::Cos => a.cos(),
        }
    }

    /// Name of the builtin function, for the ones written `f(x)`.
    pub fn function_name(self) -> Option<&'static str> {
        match self {
            UnOp::Sqrt => Some("sqrt"),
            UnOp::Exp => Some("exp"),
            UnOp::Log => Some("log"),
            UnOp::Sin => Some("sin"),
            UnOp::Cos => Some("cos"),
            _ => None,
        }
    }

    pub fn from_function_name(name: &str) -> Option<UnOp> {
        Some(match name {
            "sqrt" => UnOp::Sqrt,
            "exp" => UnOp::Exp,
            "log" => UnOp::Log,
            "sin" => UnOp::Sin,
            "cos" => UnOp::Cos,
            _ => return None,
        })
    }
}

/// A numeric literal: its nearest double and an interval that encloses the
/// real number it denotes (a point when the literal is exactly representable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num {
    value: f64,
    enclosure: Interval,
}

impl Num {
    /// An exactly representable constant.
    pub fn exact(value: f64) -> Self {
        Num {
            value,
            enclosure: Interval::point(value),
        }
    }

    /// Parses an unsigned decimal literal, widening it by one ulp on each side
    /// when the decimal is not exactly representable.
    pub fn from_literal(text: &str) -> Option<Self> {
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        if decimal_is_exact(text, value) {
            Some(Num::exact(value))
        } else {
            Some(Num {
                value,
                enclosure: Interval::new(value.next_down(), value.next_up()),
            })
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn enclosure(&self) -> Interval {
        self.enclosure
    }

    fn negated(self) -> Self {
        Num {
            value: -self.value,
            enclosure: -self.enclosure,
        }
    }
}

/// Significant digits and decimal exponent of a literal, with leading and
/// trailing zeros stripped. `None` for zero.
fn normalize_decimal(mantissa: &str, exp10: i64) -> Option<(String, i64)> {
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all: String = int_part.chars().chain(frac_part.chars()).collect();
    let lead = all.chars().take_while(|&c| c == '0').count();
    let digits = all[lead..].trim_end_matches('0');
    if digits.is_empty() {
        return None;
    }
    // position of the first significant digit relative to the decimal point
    let point = int_part.len() as i64 - lead as i64 - 1 + exp10;
    Some((digits.to_string(), point))
}

fn split_exponent(text: &str) -> (&str, i64) {
    match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse().unwrap_or(0)),
        None => (text, 0),
    }
}

/// Whether the decimal `text` denotes exactly the double `value`.
pub(crate) fn decimal_is_exact(text: &str, value: f64) -> bool {
    let (m, e) = split_exponent(text.trim_start_matches(['+', '-']));
    let lit = normalize_decimal(m, e);
    // 800 digits are enough to spell out any double exactly
    let exact = format!("{:.800e}", value.abs());
    let (em, ee) = split_exponent(&exact);
    let val = normalize_decimal(em, ee);
    lit == val
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Num),
    Pi,
    Var(usize),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
}

impl Expr {
    pub fn var(k: usize) -> Expr {
        Expr::Var(k)
    }

    /// An exactly representable constant.
    pub fn num(x: f64) -> Expr {
        Expr::Num(Num::exact(x))
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn sqr(self) -> Expr {
        Expr::unary(UnOp::Sqr, self)
    }

    pub fn powi(self, n: u32) -> Expr {
        if n == 2 {
            self.sqr()
        } else {
            Expr::unary(UnOp::Pow(n), self)
        }
    }

    pub fn sqrt(self) -> Expr {
        Expr::unary(UnOp::Sqrt, self)
    }

    pub fn exp(self) -> Expr {
        Expr::unary(UnOp::Exp, self)
    }

    pub fn log(self) -> Expr {
        Expr::unary(UnOp::Log, self)
    }

    pub fn sin(self) -> Expr {
        Expr::unary(UnOp::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::unary(UnOp::Cos, self)
    }

    /// Natural interval extension over `b`.
    pub fn eval(&self, b: &[Interval]) -> Interval {
        match self {
            Expr::Num(n) => n.enclosure,
            Expr::Pi => Interval::PI,
            Expr::Var(k) => b[*k],
            Expr::Binary(op, l, r) => op.apply(l.eval(b), r.eval(b)),
            Expr::Unary(op, a) => op.apply(a.eval(b)),
        }
    }

    /// Plain floating-point evaluation at a point.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(n) => n.value,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(k) => x[*k],
            Expr::Binary(op, l, r) => op.apply_point(l.eval_point(x), r.eval_point(x)),
            Expr::Unary(op, a) => op.apply_point(a.eval_point(x)),
        }
    }

    /// Whether variable `k` occurs in the expression.
    pub fn mentions(&self, k: usize) -> bool {
        match self {
            Expr::Var(j) => *j == k,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Binary(_, l, r) => l.mentions(k) || r.mentions(k),
            Expr::Unary(_, a) => a.mentions(k),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(j) => Some(*j),
            Expr::Num(_) | Expr::Pi => None,
            Expr::Binary(_, l, r) => l.max_var().max(r.max_var()),
            Expr::Unary(_, a) => a.max_var(),
        }
    }

    /// Renders the expression in the problem-file syntax.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Unary(UnOp::Neg, _) => 3,
            Expr::Num(n) if n.value.is_sign_negative() => 3,
            Expr::Unary(UnOp::Sqr | UnOp::Pow(_), _) => 4,
            _ => 5,
        }
    }
}

/// Natural interval extension of `e` over box `b`.
pub fn eval_natural(e: &Expr, b: &IntervalBox) -> Interval {
    e.eval(b.dims())
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    /// Negated literals are folded, matching what the parser produces.
    fn neg(self) -> Expr {
        match self {
            Expr::Num(n) if !n.value.is_sign_negative() => Expr::Num(n.negated()),
            e => Expr::unary(UnOp::Neg, e),
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl ExprDisplay<'_> {
    fn sub<'b>(&'b self, e: &'b Expr) -> ExprDisplay<'b> {
        ExprDisplay {
            expr: e,
            names: self.names,
        }
    }

    fn child(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        if e.precedence() < min_prec {
            write!(f, "({})", self.sub(e))
        } else {
            write!(f, "{}", self.sub(e))
        }
    }
}

pub(crate) fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x)
    } else {
        format!("{:?}", x)
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Num(n) => write!(f, "{}", format_number(n.value)),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(k) => match self.names.get(*k) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "x{k}"),
            },
            Expr::Binary(op, l, r) => {
                let prec = self.expr.precedence();
                self.child(f, l, prec)?;
                write!(f, " {} ", op.symbol())?;
                self.child(f, r, prec + 1)
            }
            Expr::Unary(UnOp::Neg, a) => {
                write!(f, "-")?;
                // a literal right after '-' would be folded into it on reparse
                let min = if matches!(**a, Expr::Num(_)) { 6 } else { 3 };
                self.child(f, a, min)
            }
            Expr::Unary(UnOp::Sqr, a) => {
                self.child(f, a, 5)?;
                write!(f, "^2")
            }
            Expr::Unary(UnOp::Pow(n), a) => {
                self.child(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Unary(op, a) => {
                write!(f, "{}({})", op.function_name().unwrap_or("?"), self.sub(a))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    /// `f <= 0`
    Leq,
    /// `f >= 0`
    Geq,
}

impl Rel {
    pub fn flip(self) -> Rel {
        match self {
            Rel::Leq => Rel::Geq,
            Rel::Geq => Rel::Leq,
        }
    }

    /// The interval of admissible values for `f`.
    pub fn admissible(self) -> Interval {
        match self {
            Rel::Leq => Interval::NON_POSITIVE,
            Rel::Geq => Interval::NON_NEGATIVE,
        }
    }

    pub fn holds(self, v: f64) -> bool {
        match self {
            Rel::Leq => v <= 0.0,
            Rel::Geq => v >= 0.0,
        }
    }
}

/// `expr rel 0`. `strict` records that the source relation was `<` or `>`;
/// solvers treat it as the non-strict relation.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: Expr,
    pub rel: Rel,
    pub strict: bool,
}

impl Constraint {
    /// `lhs rel rhs`, stored as `(lhs - rhs) rel 0`.
    pub fn new(lhs: Expr, rel: Rel, rhs: Expr) -> Self {
        Constraint {
            expr: lhs - rhs,
            rel,
            strict: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Relaxed negation: `f <= 0` becomes `f >= 0` and vice versa. Both
    /// relations hold where `f = 0`.
    pub fn negate(&self) -> Constraint {
        Constraint {
            expr: self.expr.clone(),
            rel: self.rel.flip(),
            strict: self.strict,
        }
    }

    /// Point test of the normalized (non-strict) relation.
    pub fn holds_at(&self, x: &[f64]) -> bool {
        self.rel.holds(self.expr.eval_point(x))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ConstraintDisplay<'a> {
        ConstraintDisplay { c: self, names }
    }

    pub fn decompose(&self) -> PrimitiveSystem {
        decompose(self)
    }
}

pub fn negate(c: &Constraint) -> Constraint {
    c.negate()
}

pub struct ConstraintDisplay<'a> {
    c: &'a Constraint,
    names: &'a [String],
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match (self.c.rel, self.c.strict) {
            (Rel::Leq, false) => "<=",
            (Rel::Leq, true) => "<",
            (Rel::Geq, false) => ">=",
            (Rel::Geq, true) => ">",
        };
        match &self.c.expr {
            Expr::Binary(BinOp::Sub, l, r) => {
                write!(f, "{} {op} {}", l.display(self.names), r.display(self.names))
            }
            e => write!(f, "{} {op} 0", e.display(self.names)),
        }
    }
}

/// The universally quantified variable and the domain it ranges over.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantifier {
    pub var: usize,
    pub domain: Interval,
}

/// Variables, initial box, constraints and an optional `forall` binding.
///
/// When a quantifier is present its variable is one of `vars` (the last one
/// for parsed problems) and its slot in `domain` equals the quantifier domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub vars: Vec<String>,
    pub domain: IntervalBox,
    pub constraints: Vec<Constraint>,
    pub quantifier: Option<Quantifier>,
}

impl Problem {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn quantified_var(&self) -> Option<usize> {
        self.quantifier.as_ref().map(|q| q.var)
    }

    /// Indices of the variables that are not universally quantified.
    pub fn free_vars(&self) -> Vec<usize> {
        let q = self.quantified_var();
        (0..self.vars.len()).filter(|&k| Some(k) != q).collect()
    }

    /// `B[name <- J]`.
    pub fn replace_dom(
        &self,
        b: &IntervalBox,
        name: &str,
        itv: Interval,
    ) -> Result<IntervalBox, crate::boxes::BoxError> {
        let k = self
            .var_index(name)
            .ok_or_else(|| crate::boxes::BoxError::UnknownVariable(name.to_string()))?;
        b.replace(k, itv)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.quantified_var();
        for (k, name) in self.vars.iter().enumerate() {
            if Some(k) == q {
                continue;
            }
            let d = self.domain.get(k);
            writeln!(
                f,
                "var {name} in [{}, {}];",
                format_number(d.lo()),
                format_number(d.hi())
            )?;
        }
        if let Some(q) = &self.quantifier {
            writeln!(
                f,
                "forall {} in [{}, {}]:",
                self.vars[q.var],
                format_number(q.domain.lo()),
                format_number(q.domain.hi())
            )?;
        }
        for c in &self.constraints {
            writeln!(f, "{}", c.display(&self.vars))?;
        }
        Ok(())
    }
}

/// An operand of a primitive constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand {
    Var(usize),
    Aux(usize),
    Const(Interval),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimOp {
    Bin(BinOp, Operand, Operand),
    Un(UnOp, Operand),
}

/// `aux[out] = op(args)`, a single-operator equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub out: usize,
    pub op: PrimOp,
}

/// A constraint flattened into primitive equations over the original
/// variables plus one auxiliary per operator node, topped by `root rel 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSystem {
    pub prims: Vec<Primitive>,
    pub root: Operand,
    pub rel: Rel,
}

impl PrimitiveSystem {
    pub fn aux_count(&self) -> usize {
        self.prims.len()
    }

    /// Whether `x` satisfies the system once each auxiliary is set to the
    /// value of its subterm.
    pub fn holds_at(&self, x: &[f64]) -> bool {
        let mut aux = vec![0.0; self.prims.len()];
        let get = |o: Operand, aux: &[f64]| match o {
            Operand::Var(k) => x[k],
            Operand::Aux(k) => aux[k],
            Operand::Const(c) => c.lo(),
        };
        for p in &self.prims {
            aux[p.out] = match p.op {
                PrimOp::Bin(op, a, b) => op.apply_point(get(a, &aux), get(b, &aux)),
                PrimOp::Un(op, a) => op.apply_point(get(a, &aux)),
            };
        }
        self.rel.holds(get(self.root, &aux))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PrimDisplay { sys: self, names }
    }
}

struct PrimDisplay<'a> {
    sys: &'a PrimitiveSystem,
    names: &'a [String],
}

impl fmt::Display for PrimDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |o: Operand| match o {
            Operand::Var(k) => self.names.get(k).cloned().unwrap_or_else(|| format!("x{k}")),
            Operand::Aux(k) => format!("u{}", k + 1),
            Operand::Const(c) if c.is_point() => format_number(c.lo()),
            Operand::Const(c) => c.to_string(),
        };
        for p in &self.sys.prims {
            let rhs = match p.op {
                PrimOp::Bin(op, a, b) => format!("{} {} {}", show(a), op.symbol(), show(b)),
                PrimOp::Un(UnOp::Neg, a) => format!("-{}", show(a)),
                PrimOp::Un(UnOp::Sqr, a) => format!("{}^2", show(a)),
                PrimOp::Un(UnOp::Pow(n), a) => format!("{}^{n}", show(a)),
                PrimOp::Un(op, a) => format!("{}({})", op.function_name().unwrap_or("?"), show(a)),
            };
            writeln!(f, "u{} = {rhs}", p.out + 1)?;
        }
        let rel = match self.sys.rel {
            Rel::Leq => "<=",
            Rel::Geq => ">=",
        };
        write!(f, "{} {rel} 0", show(self.sys.root))
    }
}

/// Flattens a constraint into primitive constraints, post-order.
pub fn decompose(c: &Constraint) -> PrimitiveSystem {
    fn walk(e: &Expr, prims: &mut Vec<Primitive>) -> Operand {
        match e {
            Expr::Num(n) => Operand::Const(n.enclosure),
            Expr::Pi => Operand::Const(Interval::PI),
            Expr::Var(k) => Operand::Var(*k),
            Expr::Binary(op, l, r) => {
                let a = walk(l, prims);
                let b = walk(r, prims);
                let out = prims.len();
                prims.push(Primitive {
                    out,
                    op: PrimOp::Bin(*op, a, b),
                });
                Operand::Aux(out)
            }
            Expr::Unary(op, a) => {
                let a = walk(a, prims);
                let out = prims.len();
                prims.push(Primitive {
                    out,
                    op: PrimOp::Un(*op, a),
                });
                Operand::Aux(out)
            }
        }
    }
    let mut prims = Vec::new();
    let root = walk(&c.expr, &mut prims);
    PrimitiveSystem {
        prims,
        root,
        rel: c.rel,
    }
}
