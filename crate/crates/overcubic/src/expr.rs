//! Expression trees over eta and theta atoms, and their evaluator.
//!
//! A [`SeriesExpr`] is the machine form of a displayed q-series
//! equation side: eta monomials, theta atoms, integer scalars, ring
//! arithmetic, `q -> q^k` substitution, `q -> -q`, progression
//! extraction and named references.
//!
//! Evaluation works top-down on a requested order: an `extract(e, r, m)`
//! node asks its child for order `m*order + r`, a `subq(e, k)` node for
//! `order/k`, everything else passes the order through. Subtrees built
//! purely from eta factors, `q`-powers, integers and `* / ^` are folded
//! into a single [`EtaExpr`] first, so the expensive high-order bases of
//! iterated extractions are expanded with sparse pentagonal passes and
//! cached for reuse.

use crate::dissect::extract_progression;
use crate::eta::{theta_sum, EtaExpr, ThetaKind};
use crate::series::{Series, SeriesError};
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Default ceiling on any intermediate working order; deep extraction
/// chains multiply the requested order, and runaway requests should fail
/// cleanly rather than exhaust memory.
pub const DEFAULT_MAX_ORDER: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("name `{0}` is not defined")]
    Unresolved(String),
    #[error("denominator has non-unit constant term")]
    NonUnitDenominator,
    #[error("extract residue {r} must be smaller than the step {m}")]
    ExtractRange { r: u64, m: u64 },
    #[error("substitution power must be at least 1")]
    ZeroSubstPower,
    #[error("working order {0} exceeds the evaluation limit {1}")]
    OrderTooLarge(usize, usize),
    #[error("definition of `{0}` refers to itself")]
    CircularName(String),
}

impl From<SeriesError> for EvalError {
    fn from(e: SeriesError) -> EvalError {
        match e {
            SeriesError::NonUnitConstant => EvalError::NonUnitDenominator,
            // Remaining variants cannot escape the evaluator's own order
            // bookkeeping; map them defensively.
            other => panic!("unexpected series error during evaluation: {other}"),
        }
    }
}

/// Expression AST over series atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesExpr {
    /// An eta monomial `c * q^s * prod f_k^{e_k}` (also covers bare
    /// integers and powers of `q`).
    Eta(EtaExpr),
    /// `phi(q^k)`, `phi(-q^k)` or `psi(q^k)`.
    Theta(ThetaKind, u32),
    /// Integer constant.
    Int(i64),
    /// Integer-scalar multiple.
    Scale(i64, Box<SeriesExpr>),
    Add(Box<SeriesExpr>, Box<SeriesExpr>),
    Sub(Box<SeriesExpr>, Box<SeriesExpr>),
    Mul(Box<SeriesExpr>, Box<SeriesExpr>),
    Div(Box<SeriesExpr>, Box<SeriesExpr>),
    /// Integer power of a subexpression.
    Pow(Box<SeriesExpr>, i64),
    /// Substitute `q -> q^k`.
    Subst(Box<SeriesExpr>, u32),
    /// Substitute `q -> -q`.
    NegQ(Box<SeriesExpr>),
    /// Extract the progression `m*n + r` and compress `q^m -> q`.
    Extract(Box<SeriesExpr>, u64, u64),
    /// Reference to a let-bound or builtin name.
    Ref(String),
}

impl SeriesExpr {
    pub fn eta(k: u32, e: i32) -> SeriesExpr {
        SeriesExpr::Eta(EtaExpr::factor(k, e))
    }

    pub fn q() -> SeriesExpr {
        SeriesExpr::Eta(EtaExpr::q())
    }
}

/// Try to fold an expression subtree into a single eta monomial.
fn fold_eta(e: &SeriesExpr) -> Option<EtaExpr> {
    match e {
        SeriesExpr::Eta(ee) => Some(ee.clone()),
        SeriesExpr::Int(c) => Some(EtaExpr::constant(*c)),
        SeriesExpr::Scale(c, x) => fold_eta(x)?.mul(&EtaExpr::constant(*c)),
        SeriesExpr::Mul(a, b) => fold_eta(a)?.mul(&fold_eta(b)?),
        SeriesExpr::Div(a, b) => fold_eta(a)?.div(&fold_eta(b)?),
        SeriesExpr::Pow(b, e) => fold_eta(b)?.pow(*e),
        _ => None,
    }
}

/// Rewrite the tree, replacing every foldable subtree by its eta
/// monomial. Folding is semantics-preserving and only enables the
/// sparse expansion path plus cache sharing.
pub fn fold(e: &SeriesExpr) -> SeriesExpr {
    if let Some(ee) = fold_eta(e) {
        return SeriesExpr::Eta(ee);
    }
    match e {
        SeriesExpr::Scale(c, x) => SeriesExpr::Scale(*c, Box::new(fold(x))),
        SeriesExpr::Add(a, b) => SeriesExpr::Add(Box::new(fold(a)), Box::new(fold(b))),
        SeriesExpr::Sub(a, b) => SeriesExpr::Sub(Box::new(fold(a)), Box::new(fold(b))),
        SeriesExpr::Mul(a, b) => SeriesExpr::Mul(Box::new(fold(a)), Box::new(fold(b))),
        SeriesExpr::Div(a, b) => SeriesExpr::Div(Box::new(fold(a)), Box::new(fold(b))),
        SeriesExpr::Pow(b, e2) => SeriesExpr::Pow(Box::new(fold(b)), *e2),
        SeriesExpr::Subst(x, k) => SeriesExpr::Subst(Box::new(fold(x)), *k),
        SeriesExpr::NegQ(x) => SeriesExpr::NegQ(Box::new(fold(x))),
        SeriesExpr::Extract(x, r, m) => SeriesExpr::Extract(Box::new(fold(x)), *r, *m),
        other => other.clone(),
    }
}

/// Named bindings available during evaluation.
pub type Env = HashMap<String, SeriesExpr>;

/// Names resolvable in every context without a `let`: truncated
/// theta-style lattice sums that have no closed eta/theta form in the
/// expression language.
pub const BUILTIN_SUMS: [&str; 4] = [
    "sum_alt_sq",
    "sum_two_sq",
    "sum_cross_all",
    "sum_cross_upper",
];

/// `sum_alt_sq`: `sum_{n>=1} (-1)^n q^{n^2}`.
/// `sum_two_sq`: `sum_{n>=1} q^{2n^2}`.
/// `sum_cross_all`: `sum_{m,n>=1} (-1)^{m+n} q^{m^2+n^2}`.
/// `sum_cross_upper`: the same sum restricted to `m > n`.
fn builtin_sum(name: &str, order: usize, modulus: u64) -> Option<Series> {
    let mut c = vec![0i64; order + 1];
    match name {
        "sum_alt_sq" => {
            let mut n = 1usize;
            while n * n <= order {
                c[n * n] = if n % 2 == 1 { -1 } else { 1 };
                n += 1;
            }
        }
        "sum_two_sq" => {
            let mut n = 1usize;
            while 2 * n * n <= order {
                c[2 * n * n] = 1;
                n += 1;
            }
        }
        "sum_cross_all" | "sum_cross_upper" => {
            let upper_only = name == "sum_cross_upper";
            let mut m = 1usize;
            while m * m + 1 <= order {
                let nmax = if upper_only { m - 1 } else { usize::MAX };
                let mut n = 1usize;
                while n <= nmax && m * m + n * n <= order {
                    c[m * m + n * n] += if (m + n) % 2 == 1 { -1 } else { 1 };
                    n += 1;
                }
                m += 1;
            }
        }
        _ => return None,
    }
    Some(Series::from_coeffs(&c, modulus))
}

/// Evaluator for one coefficient ring.
///
/// Caches expanded eta monomials and resolved names at the highest order
/// requested so far, so iterated extraction chains over a shared base
/// series expand it once.
pub struct Evaluator {
    modulus: u64,
    max_order: usize,
    eta_cache: HashMap<EtaExpr, Series>,
    name_cache: HashMap<String, Series>,
    resolving: HashSet<String>,
}

impl Evaluator {
    pub fn new(modulus: u64) -> Evaluator {
        Evaluator::with_max_order(modulus, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(modulus: u64, max_order: usize) -> Evaluator {
        Evaluator {
            modulus,
            max_order,
            eta_cache: HashMap::new(),
            name_cache: HashMap::new(),
            resolving: HashSet::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Evaluate `expr` to `order` in this ring, resolving names in `env`.
    pub fn eval(&mut self, expr: &SeriesExpr, order: usize, env: &Env) -> Result<Series, EvalError> {
        let folded = fold(expr);
        self.eval_folded(&folded, order, env)
    }

    fn eval_folded(
        &mut self,
        expr: &SeriesExpr,
        order: usize,
        env: &Env,
    ) -> Result<Series, EvalError> {
        if order > self.max_order {
            return Err(EvalError::OrderTooLarge(order, self.max_order));
        }
        match expr {
            SeriesExpr::Eta(ee) => Ok(self.eta_series(ee, order)),
            SeriesExpr::Theta(kind, k) => Ok(theta_sum(*kind, *k, order, self.modulus)),
            SeriesExpr::Int(c) => Ok(Series::constant(*c, order, self.modulus)),
            SeriesExpr::Scale(c, x) => Ok(self.eval_folded(x, order, env)?.scale(*c)),
            SeriesExpr::Add(a, b) => {
                let x = self.eval_folded(a, order, env)?;
                let y = self.eval_folded(b, order, env)?;
                Ok(x.add(&y))
            }
            SeriesExpr::Sub(a, b) => {
                let x = self.eval_folded(a, order, env)?;
                let y = self.eval_folded(b, order, env)?;
                Ok(x.sub(&y))
            }
            SeriesExpr::Mul(a, b) => {
                let x = self.eval_folded(a, order, env)?;
                let y = self.eval_folded(b, order, env)?;
                Ok(x.mul(&y))
            }
            SeriesExpr::Div(a, b) => {
                let x = self.eval_folded(a, order, env)?;
                let y = self.eval_folded(b, order, env)?;
                let inv = y.try_inv().map_err(|_| EvalError::NonUnitDenominator)?;
                Ok(x.mul(&inv))
            }
            SeriesExpr::Pow(b, e) => {
                let x = self.eval_folded(b, order, env)?;
                x.try_pow(*e).map_err(|_| EvalError::NonUnitDenominator)
            }
            SeriesExpr::Subst(x, k) => {
                if *k == 0 {
                    return Err(EvalError::ZeroSubstPower);
                }
                let inner = self.eval_folded(x, order / *k as usize, env)?;
                Ok(inner.substitute_power(*k as usize).truncated(order))
            }
            SeriesExpr::NegQ(x) => Ok(self.eval_folded(x, order, env)?.alternate_signs()),
            SeriesExpr::Extract(x, r, m) => {
                if *m == 0 || r >= m {
                    return Err(EvalError::ExtractRange { r: *r, m: *m });
                }
                let (r, m) = (*r as usize, *m as usize);
                let need = order
                    .checked_mul(m)
                    .and_then(|v| v.checked_add(r))
                    .ok_or(EvalError::OrderTooLarge(usize::MAX, self.max_order))?;
                let inner = self.eval_folded(x, need, env)?;
                Ok(extract_progression(&inner, r, m))
            }
            SeriesExpr::Ref(name) => self.resolve(name, order, env),
        }
    }

    fn eta_series(&mut self, ee: &EtaExpr, order: usize) -> Series {
        if let Some(hit) = self.eta_cache.get(ee) {
            if hit.order() >= order {
                return hit.truncated(order);
            }
        }
        let value = ee.evaluate(order, self.modulus);
        self.eta_cache.insert(ee.clone(), value.clone());
        value
    }

    fn resolve(&mut self, name: &str, order: usize, env: &Env) -> Result<Series, EvalError> {
        if let Some(hit) = self.name_cache.get(name) {
            if hit.order() >= order {
                return Ok(hit.truncated(order));
            }
        }
        let value = if let Some(bound) = env.get(name) {
            if !self.resolving.insert(name.to_string()) {
                return Err(EvalError::CircularName(name.to_string()));
            }
            let bound = bound.clone();
            let result = self.eval(&bound, order, env);
            self.resolving.remove(name);
            result?
        } else if let Some(sum) = builtin_sum(name, order, self.modulus) {
            sum
        } else {
            return Err(EvalError::Unresolved(name.to_string()));
        };
        self.name_cache.insert(name.to_string(), value.clone());
        Ok(value)
    }
}

/// One-shot evaluation of an expression in a fresh context.
pub fn eval_expr(expr: &SeriesExpr, order: usize, modulus: u64) -> Result<Series, EvalError> {
    Evaluator::new(modulus).eval(expr, order, &Env::new())
}

// --- pretty printing ---------------------------------------------------

fn prec(e: &SeriesExpr) -> u8 {
    match e {
        SeriesExpr::Add(..) | SeriesExpr::Sub(..) => 1,
        SeriesExpr::Mul(..) | SeriesExpr::Div(..) | SeriesExpr::Scale(..) => 2,
        SeriesExpr::Pow(..) => 3,
        SeriesExpr::Int(c) if *c < 0 => 2,
        SeriesExpr::Eta(ee) if ee.coefficient != 1 || ee.qshift + ee.factors.len() as u32 > 1 => 2,
        _ => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &SeriesExpr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for SeriesExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesExpr::Eta(ee) => write!(f, "{ee}"),
            SeriesExpr::Theta(kind, k) => {
                let name = match kind {
                    ThetaKind::Phi => "phi",
                    ThetaKind::PhiNeg => "phineg",
                    ThetaKind::Psi => "psi",
                };
                write!(f, "{name}({k})")
            }
            SeriesExpr::Int(c) => write!(f, "{c}"),
            SeriesExpr::Scale(c, x) => {
                if *c == -1 {
                    write!(f, "-")?;
                    write_child(f, x, 3)
                } else {
                    write!(f, "{c}*")?;
                    write_child(f, x, 2)
                }
            }
            SeriesExpr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            SeriesExpr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            SeriesExpr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            SeriesExpr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            SeriesExpr::Pow(b, e) => {
                write_child(f, b, 4)?;
                write!(f, "^{e}")
            }
            SeriesExpr::Subst(x, k) => write!(f, "subq({x}, {k})"),
            SeriesExpr::NegQ(x) => write!(f, "negq({x})"),
            SeriesExpr::Extract(x, r, m) => write!(f, "extract({x}, {r}, {m})"),
            SeriesExpr::Ref(name) => write!(f, "{name}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_expr;
    use num_bigint::BigInt;

    fn ev(src: &str, order: usize, modulus: u64) -> Series {
        eval_expr(&parse_expr(src).unwrap(), order, modulus).unwrap()
    }

    #[test]
    fn triple_generating_function_starts_with_six() {
        let s = ev("f4^3/(f1^6*f2^3)", 1, 0);
        assert_eq!(s.coeff(0).unwrap(), BigInt::from(1));
        assert_eq!(s.coeff(1).unwrap(), BigInt::from(6));
    }

    #[test]
    fn phi_atom_expansion() {
        let s = ev("phi(1)", 10, 0);
        assert_eq!(
            s,
            Series::from_coeffs(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0], 0)
        );
    }

    #[test]
    fn phi_eta_form_is_exact_to_500() {
        let s = ev("phi(1) - f2^5/(f1^2*f4^2)", 500, 0);
        assert!(s.is_zero());
    }

    #[test]
    fn folding_collapses_eta_quotients() {
        let e = parse_expr("f4^3/(f1^6*f2^3)").unwrap();
        match fold(&e) {
            SeriesExpr::Eta(ee) => {
                assert_eq!(ee.coefficient, 1);
                assert_eq!(ee.qshift, 0);
                assert_eq!(ee.factors[&4], 3);
                assert_eq!(ee.factors[&1], -6);
                assert_eq!(ee.factors[&2], -3);
            }
            other => panic!("expected a folded eta monomial, got {other:?}"),
        }
        // 8*q*f2^7 folds too, including the scalar and the shift.
        match fold(&parse_expr("8*q*f2^7").unwrap()) {
            SeriesExpr::Eta(ee) => {
                assert_eq!((ee.coefficient, ee.qshift), (8, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn extraction_requests_higher_inner_order() {
        // extract(f1, 1, 5) to order 5 needs f1 to order 26.
        let s = ev("extract(f1, 1, 5)", 5, 0);
        assert_eq!(s, Series::from_coeffs(&[-1, 0, 0, 0, 0, 1], 0));
    }

    #[test]
    fn subq_and_negq_nodes() {
        let s = ev("subq(f1, 2)", 40, 0);
        assert_eq!(s, ev("f2", 40, 0));
        let t = ev("negq(f1*f2)", 30, 0);
        let direct = ev("f1*f2", 30, 0).alternate_signs();
        assert_eq!(t, direct);
    }

    #[test]
    fn builtin_sums_resolve() {
        // sum_cross_all = sum_alt_sq^2 by expanding the square.
        let lhs = ev("sum_cross_all", 300, 0);
        let rhs = ev("sum_alt_sq^2", 300, 0);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(
            eval_expr(&parse_expr("nope + 1").unwrap(), 5, 0),
            Err(EvalError::Unresolved("nope".into()))
        );
        assert_eq!(
            eval_expr(&parse_expr("extract(f1, 7, 3)").unwrap(), 5, 0),
            Err(EvalError::ExtractRange { r: 7, m: 3 })
        );
        assert_eq!(
            eval_expr(&parse_expr("1/(f1 - 1)").unwrap(), 5, 0),
            Err(EvalError::NonUnitDenominator)
        );
        // q^-1 is not a power series.
        assert_eq!(
            eval_expr(&parse_expr("f2/q").unwrap(), 5, 0),
            Err(EvalError::NonUnitDenominator)
        );
    }

    #[test]
    fn env_names_and_cycles() {
        let mut env = Env::new();
        env.insert("a".into(), parse_expr("f1^2").unwrap());
        env.insert("b".into(), parse_expr("a*f2").unwrap());
        let mut ev = Evaluator::new(0);
        let got = ev.eval(&parse_expr("b").unwrap(), 20, &env).unwrap();
        let want = eval_expr(&parse_expr("f1^2*f2").unwrap(), 20, 0).unwrap();
        assert_eq!(got, want);

        let mut cyc = Env::new();
        cyc.insert("x".into(), parse_expr("x + 1").unwrap());
        let mut ev2 = Evaluator::new(0);
        assert_eq!(
            ev2.eval(&parse_expr("x").unwrap(), 4, &cyc),
            Err(EvalError::CircularName("x".into()))
        );
    }

    #[test]
    fn name_cache_upgrades_order() {
        let mut env = Env::new();
        env.insert("base".into(), parse_expr("f4^3/(f1^6*f2^3)").unwrap());
        let mut evl = Evaluator::new(128);
        let low = evl.eval(&parse_expr("base").unwrap(), 10, &env).unwrap();
        let high = evl.eval(&parse_expr("base").unwrap(), 50, &env).unwrap();
        assert_eq!(high.truncated(10), low);
    }

    #[test]
    fn order_limit_is_enforced() {
        let mut evl = Evaluator::with_max_order(0, 1000);
        let err = evl.eval(
            &parse_expr("extract(f1, 0, 64)").unwrap(),
            100,
            &Env::new(),
        );
        assert_eq!(err, Err(EvalError::OrderTooLarge(6400, 1000)));
    }
}
