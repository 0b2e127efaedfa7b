//! Reader for the problem text format.
//!
//! ```text
//! var a in [0, 1];
//! var b in [0, 1];
//! forall t in [0, 2]:
//! a*t^2 + b*t >= 2*t - 1
//! ```
//!
//! Constraints are separated by newlines or `;`. `#` starts a comment.
//! Besides the core grammar, bounds may be constant expressions, factors may
//! carry a leading `-`, and `pi` names the constant.

use thiserror::Error;

use crate::boxes::IntervalBox;
use crate::expr::{Constraint, Expr, Num, Problem, Quantifier, Rel, UnOp};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unbounded domain for `{0}`")]
    UnboundedDomain(String),
    #[error("invalid domain for `{0}`: lower bound exceeds upper bound")]
    InvertedDomain(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("equality constraints are not supported")]
    Equality,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(&'static str),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 16] = [
    "<=", ">=", "==", "<", ">", "=", "+", "-", "*", "/", "^", "(", ")", "[", "]", ",",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let at = |i: usize| (li + 1, i + 1);
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = at(i);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == ';' || c == ':' {
                out.push(Token {
                    tok: Tok::Sym(if c == ';' { ";" } else { ":" }),
                    line,
                    col,
                });
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Number(chars[start..i].iter().collect()),
                    line,
                    col,
                });
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push(Token {
                        tok: Tok::Sym(s),
                        line,
                        col,
                    });
                    i += s.len();
                }
                None => {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                    })
                }
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line: li + 1,
            col: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line);
    let col = out.last().map_or(1, |t| t.col);
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const RESERVED: [&str; 9] = ["var", "in", "forall", "pi", "sin", "cos", "exp", "log", "sqrt"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err_here(ParseErrorKind::Syntax(msg.into()))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == kw)
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline) || self.is_sym(";") {
            self.next();
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Tok::Newline) {
            self.next();
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                if RESERVED.contains(&s.as_str()) {
                    return Err(self.err_here(ParseErrorKind::Reserved(s)));
                }
                self.next();
                Ok(s)
            }
            _ => Err(self.syntax(format!("expected a name, found {}", self.describe()))),
        }
    }

    /// `<name> in [<lo>, <hi>]`
    fn binding(&mut self) -> Result<(String, Interval), ParseError> {
        let name_tok = self.toks[self.pos].clone();
        let name = self.ident()?;
        if self.vars.contains(&name) {
            return Err(ParseError {
                line: name_tok.line,
                col: name_tok.col,
                kind: ParseErrorKind::Duplicate(name),
            });
        }
        if !self.is_keyword("in") {
            return Err(self.syntax(format!("expected `in`, found {}", self.describe())));
        }
        self.next();
        self.expect_sym("[")?;
        let lo = self.bound(&name, true)?;
        self.expect_sym(",")?;
        let hi = self.bound(&name, false)?;
        self.expect_sym("]")?;
        if lo > hi {
            return Err(ParseError {
                line: name_tok.line,
                col: name_tok.col,
                kind: ParseErrorKind::InvertedDomain(name),
            });
        }
        Ok((name, Interval::new(lo, hi)))
    }

    /// A constant bound. Literals are taken as their nearest double; other
    /// constant expressions are enclosed and the outer endpoint is kept.
    fn bound(&mut self, name: &str, lower: bool) -> Result<f64, ParseError> {
        let start = self.pos;
        let neg = self.is_sym("-") && matches!(self.peek_at(1), Tok::Ident(s) if s == "inf");
        if neg || self.is_keyword("inf") {
            return Err(self.err_here(ParseErrorKind::UnboundedDomain(name.to_string())));
        }
        let saved = std::mem::take(&mut self.vars);
        let e = self.expr();
        self.vars = saved;
        let e = e.map_err(|err| match err.kind {
            ParseErrorKind::UnboundVariable(_) => ParseError {
                kind: ParseErrorKind::Syntax("domain bounds must be constant".into()),
                ..err
            },
            _ => err,
        })?;
        let v = match &e {
            Expr::Num(n) => n.value(),
            _ => {
                let r = e.eval(&[]);
                if r.is_empty() {
                    f64::NAN
                } else if lower {
                    r.lo()
                } else {
                    r.hi()
                }
            }
        };
        if !v.is_finite() {
            let t = &self.toks[start];
            return Err(ParseError {
                line: t.line,
                col: t.col,
                kind: ParseErrorKind::UnboundedDomain(name.to_string()),
            });
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.is_sym("+") {
                self.next();
                e = e + self.term()?;
            } else if self.is_sym("-") {
                self.next();
                e = e - self.term()?;
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.factor()?;
        loop {
            if self.is_sym("*") {
                self.next();
                e = e * self.factor()?;
            } else if self.is_sym("/") {
                self.next();
                e = e / self.factor()?;
            } else {
                return Ok(e);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym("-") {
            self.next();
            // `-<literal>` is a negative literal unless a power follows
            if let Tok::Number(_) = self.peek() {
                if self.peek_at(1) != &Tok::Sym("^") {
                    let n = self.base()?;
                    return Ok(-n);
                }
            }
            let inner = self.factor()?;
            return Ok(Expr::unary(UnOp::Neg, inner));
        }
        let b = self.base()?;
        if self.is_sym("^") {
            self.next();
            let n = match self.peek().clone() {
                Tok::Number(s) => match s.parse::<u32>() {
                    Ok(n) if (1..=64).contains(&n) => n,
                    _ => return Err(self.syntax(format!("exponent must be an integer in 1..=64, found `{s}`"))),
                },
                _ => return Err(self.syntax(format!("expected an integer exponent, found {}", self.describe()))),
            };
            self.next();
            return Ok(b.powi(n));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Number(s) => match Num::from_literal(&s) {
                Some(n) => {
                    self.next();
                    Ok(Expr::Num(n))
                }
                None => Err(self.syntax(format!("invalid number `{s}`"))),
            },
            Tok::Sym("(") => {
                self.next();
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(op) = UnOp::from_function_name(&name) {
                    self.next();
                    self.expect_sym("(")?;
                    let arg = self.expr()?;
                    self.close_paren()?;
                    return Ok(Expr::unary(op, arg));
                }
                if self.peek_at(1) == &Tok::Sym("(") {
                    return Err(self.syntax(format!("unknown function `{name}`")));
                }
                if name == "pi" {
                    self.next();
                    return Ok(Expr::Pi);
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(k) => {
                        self.next();
                        Ok(Expr::Var(k))
                    }
                    None => Err(self.err_here(ParseErrorKind::UnboundVariable(name))),
                }
            }
            _ => Err(self.syntax(format!("expected an expression, found {}", self.describe()))),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.is_sym(")") {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(format!("unclosed parenthesis: expected `)`, found {}", self.describe())))
        }
    }

    fn constraint(&mut self) -> Result<Constraint, ParseError> {
        let lhs = self.expr()?;
        let (rel, strict) = match self.peek() {
            Tok::Sym("<=") => (Rel::Leq, false),
            Tok::Sym("<") => (Rel::Leq, true),
            Tok::Sym(">=") => (Rel::Geq, false),
            Tok::Sym(">") => (Rel::Geq, true),
            Tok::Sym("=") | Tok::Sym("==") => return Err(self.err_here(ParseErrorKind::Equality)),
            _ => return Err(self.syntax(format!("expected a relation, found {}", self.describe()))),
        };
        self.next();
        let rhs = self.expr()?;
        match self.peek() {
            Tok::Newline | Tok::Eof | Tok::Sym(";") => {}
            _ => return Err(self.syntax(format!("unexpected {} after constraint", self.describe()))),
        }
        let mut c = Constraint::new(lhs, rel, rhs);
        c.strict = strict;
        Ok(c)
    }

    fn problem(&mut self) -> Result<Problem, ParseError> {
        let mut doms = Vec::new();
        self.skip_separators();
        while self.is_keyword("var") {
            self.next();
            let (name, d) = self.binding()?;
            self.vars.push(name);
            doms.push(d);
            if self.is_sym(";") {
                self.next();
            }
            self.skip_separators();
        }
        let mut quantifier = None;
        if self.is_keyword("forall") {
            self.next();
            let (name, d) = self.binding()?;
            self.expect_sym(":")?;
            quantifier = Some(Quantifier {
                var: self.vars.len(),
                domain: d,
            });
            self.vars.push(name);
            doms.push(d);
        }
        let mut constraints = Vec::new();
        loop {
            self.skip_separators();
            if matches!(self.peek(), Tok::Eof) {
                break;
            }
            if self.is_keyword("var") || self.is_keyword("forall") {
                return Err(self.syntax("declarations must precede constraints"));
            }
            constraints.push(self.constraint()?);
        }
        self.skip_newlines();
        Ok(Problem {
            vars: std::mem::take(&mut self.vars),
            domain: IntervalBox::new(doms),
            constraints,
            quantifier,
        })
    }
}

/// Parses a problem from its text form.
pub fn parse(text: &str) -> Result<Problem, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: Vec::new(),
    };
    p.problem()
}

/// Parses a single constraint over the given variable names.
pub fn parse_constraint(text: &str, vars: &[String]) -> Result<Constraint, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: vars.to_vec(),
    };
    p.skip_newlines();
    let c = p.constraint()?;
    p.skip_separators();
    if !matches!(p.peek(), Tok::Eof) {
        return Err(p.syntax(format!("unexpected {}", p.describe())));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;
    use proptest::prelude::*;

    const PARABOLA: &str = "var a in [0, 1];\nvar b in [0, 1];\nvar c in [0, 1];\n\
                            forall t in [0,2]: a*t^2 + b*t + c >= 2*t - 1\n";

    #[test]
    fn parabola_problem() {
        let p = parse(PARABOLA).unwrap();
        assert_eq!(p.vars, ["a", "b", "c", "t"]);
        assert_eq!(p.quantifier, Some(Quantifier { var: 3, domain: Interval::new(0.0, 2.0) }));
        assert_eq!(p.domain.get(0), Interval::new(0.0, 1.0));
        assert_eq!(p.constraints.len(), 1);
        let c = &p.constraints[0];
        assert_eq!(c.rel, Rel::Geq);
        assert!(!c.strict);
        let (a, b, cc, t) = (Expr::var(0), Expr::var(1), Expr::var(2), Expr::var(3));
        let expected = a * t.clone().sqr() + b * t.clone() + cc - (Expr::num(2.0) * t - Expr::num(1.0));
        assert_eq!(c.expr, expected);
    }

    #[test]
    fn trivially_zero_constraint() {
        let p = parse("var x in [0, 1];\nx >= x\n").unwrap();
        let c = &p.constraints[0];
        assert_eq!(c.rel, Rel::Geq);
        assert_eq!(c.expr, Expr::binary(BinOp::Sub, Expr::var(0), Expr::var(0)));
        assert_eq!(c.expr.eval_point(&[0.3]), 0.0);
    }

    #[test]
    fn unclosed_parenthesis() {
        let err = parse("var x in [0, 1];\nvar y in [0, 1];\ny <= sin(x\n").unwrap_err();
        assert_eq!((err.line, err.col), (3, 11));
        assert!(matches!(err.kind, ParseErrorKind::Syntax(ref m) if m.contains("unclosed")));
    }

    #[test]
    fn error_kinds() {
        let e = parse("var x in [0, 1];\nx + z <= 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnboundVariable("z".into()));
        assert_eq!((e.line, e.col), (2, 5));
        let e = parse("var x in [-inf, 1];").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnboundedDomain("x".into()));
        let e = parse("var x in [0, 1e999];").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse("var x in [2, 1];").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::InvertedDomain("x".into()));
        let e = parse("var x in [0, 1];\nvar x in [0, 1];").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Duplicate("x".into()));
        let e = parse("var x in [0, 1];\nx = 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Equality);
        let e = parse("var x in [0, 1];\ntan(x) <= 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse("var sin in [0, 1];").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Reserved("sin".into()));
        let e = parse("var x in [0, 1];\nx <= 1 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse("var x in [0, 1];\nx^0 <= 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse("var x in [0, 1];\nx <= 1\nvar y in [0,1];").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("var x in [0, 1];\nx ? 1").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }

    #[test]
    fn bounds_with_pi_and_comments() {
        let p = parse("# circle\nvar x in [-10, 10];\nforall t in [-pi, pi]:\nx*cos(t) <= 3 # c1\n").unwrap();
        let q = p.quantifier.unwrap();
        assert_eq!(q.domain, Interval::new(-Interval::PI.hi(), Interval::PI.hi()));
        assert_eq!(p.domain.get(0), Interval::new(-10.0, 10.0));
    }

    #[test]
    fn literal_folding() {
        let p = parse("var x in [0, 1];\n-5*x^2 - -2 >= -x^3").unwrap();
        let x = Expr::var(0);
        let lhs = Expr::num(-5.0) * x.clone().sqr() - Expr::num(-2.0);
        let rhs = Expr::unary(UnOp::Neg, x.powi(3));
        assert_eq!(p.constraints[0].expr, lhs - rhs);
        let p = parse("var x in [0, 1];\n-2^2 <= x").unwrap();
        let c = &p.constraints[0];
        assert_eq!(c.expr.eval_point(&[0.0]), -4.0);
    }

    #[test]
    fn several_constraints_per_line_and_strict() {
        let p = parse("var x in [0,1]\nvar y in [0,1]\nx < y; y > 0.25\n").unwrap();
        assert_eq!(p.constraints.len(), 2);
        assert!(p.constraints[0].strict && p.constraints[1].strict);
        assert_eq!(p.constraints[0].rel, Rel::Leq);
    }

    #[test]
    fn print_round_trip_fixed() {
        let texts = [
            PARABOLA,
            "var v in [1.1, 6.2];\nvar w in [0, 45.1]\n-5*v^2 - 13*v + v*w - w > 0\n",
            "var x in [-0.1, 0.3]\nforall t in [-pi, pi]:\nsqrt((x - cos(t))^2) / (2 - -x) >= exp(log(x + 3)) * (1 - (x - t))\n",
            "var x in [0,1]\n-(x + 1)^3 <= -(2)\n",
        ];
        for text in texts {
            let p = parse(text).unwrap();
            let printed = p.to_string();
            let q = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(p, q, "{printed}");
            assert_eq!(printed, q.to_string());
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0usize..3).prop_map(Expr::Var),
            (0u32..1000).prop_map(|n| Expr::Num(Num::from_literal(&format!("{}", n as f64 / 8.0)).unwrap())),
            (1u32..100).prop_map(|n| Expr::Num(Num::from_literal(&format!("0.{n}")).unwrap())),
            Just(Expr::Pi),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
                inner.clone().prop_map(|a| -a),
                inner.clone().prop_map(|a| a.sqr()),
                (inner.clone(), 3u32..6).prop_map(|(a, n)| a.powi(n)),
                inner.clone().prop_map(Expr::sin),
                inner.clone().prop_map(Expr::cos),
                inner.clone().prop_map(Expr::exp),
                inner.clone().prop_map(Expr::log),
                inner.prop_map(Expr::sqrt),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(lhs in arb_expr(), rhs in arb_expr(), geq: bool, strict: bool) {
            let mut c = Constraint::new(lhs, if geq { Rel::Geq } else { Rel::Leq }, rhs);
            c.strict = strict;
            let p = Problem {
                vars: vec!["x".into(), "y".into(), "t".into()],
                domain: IntervalBox::new(vec![
                    Interval::new(-1.5, 2.0),
                    Interval::new(0.0, 0.1),
                    Interval::new(-Interval::PI.hi(), Interval::PI.hi()),
                ]),
                constraints: vec![c],
                quantifier: Some(Quantifier {
                    var: 2,
                    domain: Interval::new(-Interval::PI.hi(), Interval::PI.hi()),
                }),
            };
            let text = p.to_string();
            let q = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            prop_assert_eq!(p, q);
        }
    }
}
