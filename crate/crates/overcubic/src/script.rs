//! The `.qprf` proof-script language: a small line-oriented DSL that
//! names series, applies extraction/substitution, and asserts displayed
//! equations in a stated ring.
//!
//! ```text
//! # comment
//! pragma order 400
//! let bt = f4^3/(f1^6*f2^3)
//! assert extract(bt, 0, 2) == 8*q*f2^7*f4^3*f8^2*(1/f1^4)^4*(1/f1^2)
//!        + (f2^17*f4/f8^2)*(1/f1^4)^5*(1/f1^2) as "2-8"
//! assert phi(1) - phineg(1) == 4*q*psi(8) mod 64 upto 200 as "3-11"
//! ```
//!
//! Expression atoms: `f<k>` (eta factor), `q`, integers, `phi(k)`,
//! `phineg(k)`, `psi(k)`, let-bound names and the builtin truncated sums;
//! operators `+ - * / ^` with the usual precedence, plus the functions
//! `extract(E, r, m)`, `subq(E, k)` and `negq(E)`. Statements end at a
//! newline; newlines inside parentheses are ignored. Names must be
//! defined before use and never redefined; assert labels are unique
//! within a script.

use crate::expr::{EvalError, Env, Evaluator, SeriesExpr, BUILTIN_SUMS};
use crate::report::{Counterexample, VerificationReport};
use crate::series::MAX_MODULUS;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// An evaluation failure, tagged with the source position of the
/// statement that raised it.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {error}")]
pub struct ReplayError {
    pub line: u32,
    pub col: u32,
    #[source]
    pub error: EvalError,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spanned<T> {
    pub node: T,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Let {
        name: String,
        expr: SeriesExpr,
    },
    Assert {
        lhs: SeriesExpr,
        rhs: SeriesExpr,
        /// 0 checks exact equality over the integers.
        modulus: u64,
        /// Per-assert order override.
        order: Option<usize>,
        label: String,
    },
    Pragma {
        key: String,
        value: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Script {
    pub statements: Vec<Spanned<Statement>>,
}

impl Script {
    /// The script-wide default order, when a `pragma order` is present.
    pub fn pragma_order(&self) -> Option<usize> {
        self.statements.iter().find_map(|s| match &s.node {
            Statement::Pragma { key, value } if key == "order" && *value >= 0 => {
                Some(*value as usize)
            }
            _ => None,
        })
    }

    /// Labels of all asserts, in order.
    pub fn labels(&self) -> Vec<&str> {
        self.statements
            .iter()
            .filter_map(|s| match &s.node {
                Statement::Assert { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }
}

// --- lexer --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    EqEq,
    Eq,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out: Vec<Token> = Vec::new();
    let mut depth = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = src.chars().peekable();
    macro_rules! push {
        ($t:expr, $c:expr) => {
            out.push(Token {
                tok: $t,
                line,
                col: $c,
            })
        };
    }
    while let Some(&c) = chars.peek() {
        let start_col = col;
        match c {
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '\n' => {
                chars.next();
                if depth == 0 && !matches!(out.last().map(|t| &t.tok), Some(Tok::Newline) | None) {
                    push!(Tok::Newline, start_col);
                }
                line += 1;
                col = 1;
            }
            '#' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                depth += 1;
                push!(Tok::LParen, start_col);
            }
            ')' => {
                chars.next();
                col += 1;
                depth = depth.saturating_sub(1);
                push!(Tok::RParen, start_col);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, start_col);
            }
            '-' => {
                chars.next();
                col += 1;
                push!(Tok::Minus, start_col);
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, start_col);
            }
            '/' => {
                chars.next();
                col += 1;
                push!(Tok::Slash, start_col);
            }
            '^' => {
                chars.next();
                col += 1;
                push!(Tok::Caret, start_col);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, start_col);
            }
            '=' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::EqEq, start_col);
                } else {
                    push!(Tok::Eq, start_col);
                }
            }
            '"' => {
                chars.next();
                col += 1;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => {
                            col += 1;
                            break;
                        }
                        Some('\n') | None => {
                            return Err(ParseError::new(line, start_col, "unterminated string"))
                        }
                        Some(ch) => {
                            col += 1;
                            s.push(ch);
                        }
                    }
                }
                push!(Tok::Str(s), start_col);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let v: i64 = s
                    .parse()
                    .map_err(|_| ParseError::new(line, start_col, "integer literal too large"))?;
                push!(Tok::Int(v), start_col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(s), start_col);
            }
            other => {
                return Err(ParseError::new(
                    line,
                    start_col,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

// --- parser -------------------------------------------------------------

const KEYWORDS: [&str; 13] = [
    "let", "assert", "pragma", "mod", "upto", "as", "extract", "subq", "negq", "phi", "phineg",
    "psi", "q",
];

fn is_eta_name(s: &str) -> Option<u32> {
    let rest = s.strip_prefix('f')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// `None` disables use-before-definition checking (bare expression
    /// parsing); `Some` holds let-bound and builtin names.
    names: Option<HashSet<String>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(t.line, t.col, msg))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(ParseError::new(t.line, t.col, format!("expected {what}")))
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<i64, ParseError> {
        let neg = if self.peek().tok == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok(if neg { -v } else { v }),
            _ => Err(ParseError::new(t.line, t.col, format!("expected {what}"))),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.next();
        }
    }

    fn end_statement(&mut self) -> Result<(), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Newline | Tok::Eof => Ok(()),
            _ => Err(ParseError::new(t.line, t.col, "expected end of statement")),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<SeriesExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = SeriesExpr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = SeriesExpr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<SeriesExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = SeriesExpr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = SeriesExpr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<SeriesExpr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            if let Tok::Int(v) = self.peek().tok {
                self.next();
                return self.power_tail(SeriesExpr::Int(-v));
            }
            let inner = self.unary()?;
            return Ok(SeriesExpr::Scale(-1, Box::new(inner)));
        }
        self.power()
    }

    // power := atom ('^' INT)*
    fn power(&mut self) -> Result<SeriesExpr, ParseError> {
        let base = self.atom()?;
        self.power_tail(base)
    }

    fn power_tail(&mut self, mut base: SeriesExpr) -> Result<SeriesExpr, ParseError> {
        while self.peek().tok == Tok::Caret {
            self.next();
            let e = self.expect_int("an integer exponent")?;
            base = SeriesExpr::Pow(Box::new(base), e);
        }
        Ok(base)
    }

    fn theta_atom(&mut self, kind: crate::eta::ThetaKind) -> Result<SeriesExpr, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let t = self.peek().clone();
        let k = self.expect_int("a positive scale")?;
        if k < 1 {
            return self.err(&t, "theta scale must be at least 1");
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(SeriesExpr::Theta(kind, k as u32))
    }

    fn atom(&mut self) -> Result<SeriesExpr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok(SeriesExpr::Int(*v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(SeriesExpr::q()),
                "phi" => self.theta_atom(crate::eta::ThetaKind::Phi),
                "phineg" => self.theta_atom(crate::eta::ThetaKind::PhiNeg),
                "psi" => self.theta_atom(crate::eta::ThetaKind::Psi),
                "extract" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let e = self.expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let r = self.expect_int("a residue")?;
                    self.expect(Tok::Comma, "`,`")?;
                    let m = self.expect_int("a step")?;
                    self.expect(Tok::RParen, "`)`")?;
                    if r < 0 || m < 0 {
                        return self.err(&t, "extract arguments must be non-negative");
                    }
                    Ok(SeriesExpr::Extract(Box::new(e), r as u64, m as u64))
                }
                "subq" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let e = self.expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let k = self.expect_int("a power")?;
                    self.expect(Tok::RParen, "`)`")?;
                    if k < 1 {
                        return self.err(&t, "substitution power must be at least 1");
                    }
                    Ok(SeriesExpr::Subst(Box::new(e), k as u32))
                }
                "negq" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(SeriesExpr::NegQ(Box::new(e)))
                }
                other => {
                    if let Some(k) = is_eta_name(other) {
                        if k == 0 {
                            return self.err(&t, "eta factor index must be positive");
                        }
                        return Ok(SeriesExpr::eta(k, 1));
                    }
                    if KEYWORDS.contains(&other) {
                        return self.err(&t, format!("`{other}` cannot start an expression"));
                    }
                    if let Some(known) = &self.names {
                        if !known.contains(other) {
                            return self.err(&t, format!("name `{other}` used before definition"));
                        }
                    }
                    Ok(SeriesExpr::Ref(other.to_string()))
                }
            },
            _ => self.err(&t, "expected an expression"),
        }
    }
}

/// Parse a bare expression (no definedness checking of names).
pub fn parse_expr(src: &str) -> Result<SeriesExpr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        names: None,
    };
    p.skip_newlines();
    let e = p.expr()?;
    p.skip_newlines();
    let t = p.next();
    if t.tok != Tok::Eof {
        return Err(ParseError::new(t.line, t.col, "trailing input after expression"));
    }
    Ok(e)
}

/// Parse a whole script, enforcing define-before-use, no redefinition
/// and unique assert labels.
pub fn parse(src: &str) -> Result<Script, ParseError> {
    let toks = lex(src)?;
    let mut names: HashSet<String> = BUILTIN_SUMS.iter().map(|s| s.to_string()).collect();
    let mut labels: HashSet<String> = HashSet::new();
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        names: Some(names.clone()),
    };
    let mut statements = Vec::new();
    loop {
        p.skip_newlines();
        let t = p.peek().clone();
        if t.tok == Tok::Eof {
            break;
        }
        let (line, col) = (t.line, t.col);
        let word = match &t.tok {
            Tok::Ident(w) => w.clone(),
            _ => return Err(ParseError::new(line, col, "expected a statement")),
        };
        p.next();
        let node = match word.as_str() {
            "let" => {
                let nt = p.next();
                let name = match &nt.tok {
                    Tok::Ident(n) => n.clone(),
                    _ => return Err(ParseError::new(nt.line, nt.col, "expected a name after `let`")),
                };
                if KEYWORDS.contains(&name.as_str()) || is_eta_name(&name).is_some() {
                    return Err(ParseError::new(
                        nt.line,
                        nt.col,
                        format!("`{name}` is reserved and cannot be bound"),
                    ));
                }
                if names.contains(&name) {
                    return Err(ParseError::new(
                        nt.line,
                        nt.col,
                        format!("name `{name}` is already defined"),
                    ));
                }
                p.expect(Tok::Eq, "`=`")?;
                let expr = p.expr()?;
                p.end_statement()?;
                names.insert(name.clone());
                p.names = Some(names.clone());
                Statement::Let { name, expr }
            }
            "assert" => {
                let lhs = p.expr()?;
                p.expect(Tok::EqEq, "`==`")?;
                let rhs = p.expr()?;
                let mut modulus = 0u64;
                let mut order = None;
                loop {
                    match &p.peek().tok {
                        Tok::Ident(w) if w == "mod" => {
                            let mt = p.next();
                            let m = p.expect_int("a modulus")?;
                            if m < 0 || m as u64 >= MAX_MODULUS {
                                return Err(ParseError::new(
                                    mt.line,
                                    mt.col,
                                    "modulus out of range",
                                ));
                            }
                            modulus = m as u64;
                        }
                        Tok::Ident(w) if w == "upto" => {
                            let ut = p.next();
                            let n = p.expect_int("an order")?;
                            if n < 0 {
                                return Err(ParseError::new(ut.line, ut.col, "order must be non-negative"));
                            }
                            order = Some(n as usize);
                        }
                        _ => break,
                    }
                }
                let at = p.next();
                if !matches!(at.tok, Tok::Ident(ref w) if w == "as") {
                    return Err(ParseError::new(at.line, at.col, "expected `as \"label\"`"));
                }
                let lt = p.next();
                let label = match lt.tok {
                    Tok::Str(s) => s,
                    _ => return Err(ParseError::new(lt.line, lt.col, "expected a quoted label")),
                };
                if !labels.insert(label.clone()) {
                    return Err(ParseError::new(
                        lt.line,
                        lt.col,
                        format!("duplicate assert label \"{label}\""),
                    ));
                }
                p.end_statement()?;
                Statement::Assert {
                    lhs,
                    rhs,
                    modulus,
                    order,
                    label,
                }
            }
            "pragma" => {
                let kt = p.next();
                let key = match &kt.tok {
                    Tok::Ident(k) => k.clone(),
                    _ => return Err(ParseError::new(kt.line, kt.col, "expected a pragma key")),
                };
                let value = p.expect_int("a pragma value")?;
                p.end_statement()?;
                Statement::Pragma { key, value }
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unknown statement `{other}`"),
                ))
            }
        };
        statements.push(Spanned { node, line, col });
    }
    Ok(Script { statements })
}

// --- replay -------------------------------------------------------------

/// Execute a script: bind every `let`, evaluate every `assert` in its
/// stated ring, and return one report per assert (in script order).
///
/// Order resolution per assert: its own `upto`, else the script's
/// `pragma order`, else `default_order`.
pub fn replay(script: &Script, default_order: usize) -> Result<Vec<VerificationReport>, ReplayError> {
    let script_order = script.pragma_order().unwrap_or(default_order);
    let mut env = Env::new();
    let mut evaluators: HashMap<u64, Evaluator> = HashMap::new();
    let mut reports = Vec::new();
    for stmt in &script.statements {
        match &stmt.node {
            Statement::Pragma { .. } => {}
            Statement::Let { name, expr } => {
                env.insert(name.clone(), expr.clone());
            }
            Statement::Assert {
                lhs,
                rhs,
                modulus,
                order,
                label,
            } => {
                let order = order.unwrap_or(script_order);
                let start = Instant::now();
                let ev = evaluators
                    .entry(*modulus)
                    .or_insert_with(|| Evaluator::new(*modulus));
                let at = |error: EvalError| ReplayError {
                    line: stmt.line,
                    col: stmt.col,
                    error,
                };
                let l = ev.eval(lhs, order, &env).map_err(at)?;
                let r = ev.eval(rhs, order, &env).map_err(at)?;
                let report = match l.first_difference(&r) {
                    None => VerificationReport::pass(label.clone(), order as u64, start.elapsed()),
                    Some(i) => {
                        let lv = l.coeff(i).expect("in range");
                        let rv = r.coeff(i).expect("in range");
                        VerificationReport::fail(
                            label.clone(),
                            order as u64,
                            Counterexample::new(i as u64, format!("{lv} != {rv}")),
                            start.elapsed(),
                        )
                    }
                };
                reports.push(report);
            }
        }
    }
    Ok(reports)
}

/// Check that every assert label in `script` names exactly one known
/// identity or claim id.
pub fn check_script_labels(script: &Script, known_ids: &HashSet<String>) -> Result<(), String> {
    for label in script.labels() {
        if !known_ids.contains(label) {
            return Err(format!("assert label \"{label}\" matches no identity or claim id"));
        }
    }
    Ok(())
}

// --- pretty printing ----------------------------------------------------

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Let { name, expr } => write!(f, "let {name} = {expr}"),
            Statement::Assert {
                lhs,
                rhs,
                modulus,
                order,
                label,
            } => {
                write!(f, "assert {lhs} == {rhs}")?;
                if *modulus != 0 {
                    write!(f, " mod {modulus}")?;
                }
                if let Some(n) = order {
                    write!(f, " upto {n}")?;
                }
                write!(f, " as \"{label}\"")
            }
            Statement::Pragma { key, value } => write!(f, "pragma {key} {value}"),
        }
    }
}

/// Prints one statement per line in canonical form; parsing the output
/// reproduces the same statement list.
impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.node)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn stmts(src: &str) -> Vec<Statement> {
        parse(src).unwrap().statements.into_iter().map(|s| s.node).collect()
    }

    #[test]
    fn parse_let_builds_eta_tree() {
        let s = stmts("let S = f4^3 / (f1^6 * f2^3)");
        assert_eq!(s.len(), 1);
        match &s[0] {
            Statement::Let { name, expr } => {
                assert_eq!(name, "S");
                assert_eq!(expr.to_string(), "f4^3/(f1^6*f2^3)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_full_assert() {
        let src = r#"
let S = f4^3/(f1^6*f2^3)
assert extract(S,0,2) == 8*q*f2^7*f4^3*f8^2*(1/f1^4)^4*(1/f1^2) + (f2^17*f4/f8^2)*(1/f1^4)^5*(1/f1^2) as "2-8"
"#;
        let sc = parse(src).unwrap();
        assert_eq!(sc.labels(), vec!["2-8"]);
        match &sc.statements[1].node {
            Statement::Assert { modulus, order, .. } => {
                assert_eq!(*modulus, 0);
                assert_eq!(*order, None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_positions() {
        // `let = 3` errors at the `=`.
        let err = parse("let = 3").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        assert!(err.message.contains("name"));

        let err = parse("let x = ").unwrap_err();
        assert_eq!(err.line, 1);

        let err = parse("let x = y + 1").unwrap_err();
        assert!(err.message.contains("before definition"));

        let err = parse("let x = 1\nlet x = 2").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("already defined"));

        let err = parse("assert 1 == 1 as \"a\"\nassert 2 == 2 as \"a\"").unwrap_err();
        assert!(err.message.contains("duplicate"));

        let err = parse("let mod = 3").unwrap_err();
        assert!(err.message.contains("reserved"));

        let err = parse("@").unwrap_err();
        assert!(err.message.contains("unexpected character"));
    }

    #[test]
    fn multiline_inside_parens() {
        let src = "assert (1 +\n 1) == 2 as \"two\"";
        let sc = parse(src).unwrap();
        assert_eq!(sc.statements.len(), 1);
    }

    #[test]
    fn replay_negative_control_fails_at_first_coefficient() {
        let sc = parse("assert f1 == f2 upto 2 as \"bad\"").unwrap();
        let reps = replay(&sc, 10).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].status, Status::Fail);
        let ce = reps[0].counterexample.as_ref().unwrap();
        assert_eq!(ce.argument, 1);
        assert_eq!(ce.value, "-1 != 0");
    }

    #[test]
    fn replay_evaluates_exact_dissection() {
        let src = r#"
pragma order 60
let bt = f4^3/(f1^6*f2^3)
assert extract(bt,0,2) == 8*q*f2^7*f4^3*f8^2*(1/f1^4)^4*(1/f1^2) + (f2^17*f4/f8^2)*(1/f1^4)^5*(1/f1^2) as "2-8"
"#;
        let reps = replay(&parse(src).unwrap(), 400).unwrap();
        assert!(reps[0].passed(), "{}", reps[0]);
        assert_eq!(reps[0].range_checked, 60);
    }

    #[test]
    fn replay_honors_upto_and_mod() {
        let src = "assert f1^8 == f2^4 mod 8 upto 33 as \"t\"";
        let reps = replay(&parse(src).unwrap(), 5).unwrap();
        assert!(reps[0].passed());
        assert_eq!(reps[0].range_checked, 33);
    }

    #[test]
    fn replay_error_carries_position() {
        let src = "let a = f1\nassert a/(f1-1) == 1 upto 3 as \"x\"";
        let err = replay(&parse(src).unwrap(), 5).unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
        assert_eq!(err.error, EvalError::NonUnitDenominator);
    }

    #[test]
    fn pretty_print_roundtrips() {
        let src = r#"
pragma order 120
let bt = f4^3/(f1^6*f2^3)
let even = extract(bt, 0, 2)
assert even == 8*q*f2^7*f4^3*f8^2*(1/f1^4)^4*(1/f1^2) + (f2^17*f4/f8^2)*(1/f1^4)^5*(1/f1^2) as "2-8"
assert phi(1) - phineg(1) == 4*q*psi(8) as "3-11"
assert negq(subq(f1, 2)) - 1 == f2 - 1 - 16*q*f8^4/f4^2 + 16*q*f8^4/f4^2 mod 64 upto 40 as "mix"
assert sum_cross_all == 2*sum_cross_upper + sum_two_sq as "3-2"
"#;
        let first = parse(src).unwrap();
        let printed = first.to_string();
        let second = parse(&printed).unwrap();
        assert_eq!(
            first.statements.iter().map(|s| &s.node).collect::<Vec<_>>(),
            second.statements.iter().map(|s| &s.node).collect::<Vec<_>>()
        );
        // printing is itself stable
        assert_eq!(printed, second.to_string());
    }

    #[test]
    fn label_consistency_check() {
        let sc = parse("assert 1 == 1 as \"2-6\"\nassert 2 == 2 as \"made-up\"").unwrap();
        let known: HashSet<String> = ["2-6".to_string()].into_iter().collect();
        let err = check_script_labels(&sc, &known).unwrap_err();
        assert!(err.contains("made-up"));
    }
}
