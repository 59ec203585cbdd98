//! The compiled-in registry of displayed q-series identities.
//!
//! One record per displayed equation: exact equalities are checked over
//! `Z`, congruences in `Z/mZ` for the stated modulus. Statements about
//! the coefficient family `bt(a*n + b)` are encoded by applying the
//! corresponding extraction chain to the generating-function expression
//! `f4^3/(f1^6*f2^3)`, so both sides of every record are closed
//! expressions. Chained displays are recorded against their final form
//! at the weakest stated ring; the stronger intermediate steps are not
//! asserted separately.

use crate::expr::{fold, Env, Evaluator, SeriesExpr};
use crate::report::{Counterexample, VerificationReport};
use crate::script::parse_expr;
use std::collections::HashMap;
use std::time::Instant;

/// A single displayed identity.
#[derive(Clone, Debug)]
pub struct IdentityRecord {
    /// Stable label, also used by the CLI `--id` filter.
    pub id: String,
    pub lhs_text: String,
    pub rhs_text: String,
    /// Parsed and eta-folded form of `lhs_text`.
    pub lhs: SeriesExpr,
    pub rhs: SeriesExpr,
    /// 0 for exact equality over the integers.
    pub modulus: u64,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown identity id `{0}`")]
pub struct UnknownId(pub String);

/// The generating function of overcubic partition triples.
pub const BT_EXPR: &str = "f4^3/(f1^6*f2^3)";

/// Nested extraction chain applied to the generating function, written
/// left to right: `chain(&[(0,2),(1,2)])` selects the coefficients
/// `bt(4n+2)`.
fn chain(steps: &[(u64, u64)]) -> String {
    let mut s = BT_EXPR.to_string();
    for &(r, m) in steps {
        s = format!("extract({s}, {r}, {m})");
    }
    s
}

/// raw rows: (id, lhs, rhs, modulus, citation)
fn raw_records() -> Vec<(&'static str, String, String, u64, &'static str)> {
    let s = |t: &str| t.to_string();
    vec![
        // -- exact identities (checked over Z) --------------------------
        (
            "1-1",
            s(BT_EXPR),
            s("(f4/(f1^2*f2))^3"),
            0,
            "triple generating function as the cube of the single-partition one",
        ),
        (
            "2-5",
            s(BT_EXPR),
            s("(f4^3/f2^3)*(1/f1^4)*(1/f1^2)"),
            0,
            "regrouping of the generating function ahead of the 2-dissection",
        ),
        (
            "2-6",
            s("1/f1^2"),
            s("f8^5/(f2^5*f16^2) + 2*q*f4^2*f16^2/(f2^5*f8)"),
            0,
            "2-dissection of 1/f1^2, from the Entry 25 theta identities (Berndt, p. 40)",
        ),
        (
            "2-7",
            s("1/f1^4"),
            s("f4^14/(f2^14*f8^4) + 4*q*f4^2*f8^4/f2^10"),
            0,
            "2-dissection of 1/f1^4, from the Entry 25 theta identities (Berndt, p. 40)",
        ),
        (
            "2-8",
            chain(&[(0, 2)]),
            s("8*q*f2^7*f4^3*f8^2*(1/f1^4)^4*(1/f1^2) + (f2^17*f4/f8^2)*(1/f1^4)^5*(1/f1^2)"),
            0,
            "even-class extraction of the triple generating function",
        ),
        (
            "3-2",
            s("sum_cross_all"),
            s("2*sum_cross_upper + sum_two_sq"),
            0,
            "double square sum split by m>n, m<n and the diagonal",
        ),
        (
            "3-3",
            s("phi(1)"),
            s("f2^5/(f1^2*f4^2)"),
            0,
            "eta form of phi(q)",
        ),
        ("3-4", s("psi(1)"), s("f2^2/f1"), 0, "eta form of psi(q)"),
        (
            "3-5",
            s("phineg(1)"),
            s("f1^2/f2"),
            0,
            "eta form of phi(-q)",
        ),
        (
            "3-10",
            s("phi(1) + phineg(1)"),
            s("2*phi(4)"),
            0,
            "Berndt, Entry 25, p. 40",
        ),
        (
            "3-11",
            s("phi(1) - phineg(1)"),
            s("4*q*psi(8)"),
            0,
            "Berndt, Entry 25, p. 40",
        ),
        (
            "4-5",
            s("phi(1)^2 - phineg(1)^2"),
            s("8*q*psi(4)^2"),
            0,
            "Berndt, Entry 25, p. 40",
        ),
        (
            "a-1",
            s("phi(1)^2 + phineg(1)^2"),
            s("2*phi(2)^2"),
            0,
            "Berndt, Entry 25, p. 40",
        ),
        (
            "4-6",
            s("psi(1)^2"),
            s("phi(1)*psi(2)"),
            0,
            "psi(q)^2 = phi(q) psi(q^2), by parity of the triangular exponents",
        ),
        (
            "3-12-a",
            s("psi(4)^2"),
            s("phi(4)*psi(8)"),
            0,
            "instance of psi(q)^2 = phi(q) psi(q^2) at q^4",
        ),
        (
            "4-12",
            s("f2^2/f1"),
            s("f6*f9^2/(f3*f18) + q*f18^2/f9"),
            0,
            "3-dissection of f2^2/f1 (Berndt, p. 49, Corollary (ii))",
        ),
        (
            "4-14",
            s("f1*f2"),
            s("f6*f9^4/(f3*f18^2) - q*f9*f18 - 2*q^2*f3*f18^4/(f6*f9^2)"),
            0,
            "3-dissection of f1*f2 (Hirschhorn and Sellers)",
        ),
        (
            "4-15",
            s("f4/f1"),
            s("f12*f18^4/(f3^3*f36^2) + q*f6^2*f9^3*f36/(f3^4*f18^2) + 2*q^2*f6*f18*f36/f3^3"),
            0,
            "3-dissection of f4/f1 (Andrews, Hirschhorn and Sellers)",
        ),
        // -- congruence identities ---------------------------------------
        (
            "2-1",
            chain(&[(0, 2), (0, 2)]),
            s("32*q*(f2^47/(f4*f8^2))*(1/f1^4)^12*(1/f1^2) \
               + 56*q*(f2^61*f8^2/f4^15)*(1/f1^4)^13*(1/f1^2) \
               + (f2^71/(f4^17*f8^2))*(1/f1^4)^14*(1/f1^2)"),
            128,
            "bt(4n) after two even-class extractions",
        ),
        (
            "2-2",
            chain(&[(0, 2), (0, 2), (0, 2)]),
            s("32*q*(f2^169*f8^2/f4^51)*(1/f1^4)^31*(1/f1^2) \
               + 16*q*(f2^155/(f4^37*f8^2))*(1/f1^4)^30*(1/f1^2) \
               + (f2^179/(f4^53*f8^2))*(1/f1^4)^32*(1/f1^2)"),
            128,
            "bt(8n) after three even-class extractions",
        ),
        (
            "2-3",
            chain(&[(0, 2), (0, 2), (0, 2), (0, 2)]),
            s("96*q*(f2^385*f8^2/f4^123)*(1/f1^4)^67*(1/f1^2) \
               + (f2^395/(f4^125*f8^2))*(1/f1^4)^68*(1/f1^2)"),
            128,
            "bt(16n) after four even-class extractions",
        ),
        (
            "2-4",
            chain(&[(0, 2), (0, 2), (0, 2), (0, 2), (0, 2)]),
            s("96*q*(f2^803/(f4^253*f8^2))*(1/f1^4)^138*(1/f1^2) \
               + 96*q*(f2^817*f8^2/f4^267)*(1/f1^4)^139*(1/f1^2) \
               + (f2^827/(f4^269*f8^2))*(1/f1^4)^140*(1/f1^2)"),
            128,
            "bt(32n) after five even-class extractions",
        ),
        (
            "3-1",
            format!(
                "{} - {}",
                chain(&[(0, 2), (0, 2), (0, 2), (0, 2)]),
                chain(&[(0, 2), (0, 2), (0, 2)])
            ),
            s("(f2^3*f4^3/(f1^2*f8^2))*(-16*q*f8^4/f4^2 + f2^8/f1^16 - f4^8/f2^16)"),
            64,
            "bt(16n) - bt(8n) factored for the theta reduction",
        ),
        (
            "3-6",
            s("f2/f1^2"),
            s("1 - 2*sum_alt_sq + 4*sum_two_sq"),
            8,
            "geometric expansion of 1/phi(-q) truncated mod 8",
        ),
        (
            "3-7",
            s("f2^8/f1^16"),
            s("21 + 12*phineg(1)^2 + 16*phi(2) + 16*phi(4)"),
            64,
            "eighth power of the mod-8 expansion, reduced mod 64",
        ),
        (
            "3-8",
            s("f4^8/f2^16"),
            s("21 + 12*phineg(2)^2 + 16*phi(4) + 16*phi(8)"),
            64,
            "previous row with q replaced by q^2",
        ),
        (
            "3-9",
            s("-16*q*f8^4/f4^2 + f2^8/f1^16 - f4^8/f2^16"),
            s("-16*q*psi(4)^2 + 16*phi(2) - 16*phi(8) + 12*phineg(1)^2 - 12*phineg(2)^2"),
            64,
            "theta form of the bracketed combination",
        ),
        (
            "3-12",
            s("-16*q*psi(4)^2 + 12*phineg(1)^2 - 12*phineg(2)^2 + 16*(phi(2) - phi(8))"),
            s("0"),
            64,
            "the bracketed combination vanishes mod 64",
        ),
        (
            "3-12-b",
            s("psi(8)^2"),
            s("psi(16)"),
            2,
            "binomial congruence instance psi(q^8)^2 = psi(q^16) mod 2",
        ),
        (
            "3-15",
            chain(&[(0, 2), (0, 2), (0, 2), (1, 2)]),
            s("48*(f2^383/(f4^117*f8^2))*(1/f1^4)^67*(1/f1^2) \
               + 2*(f2^397*f8^2/f4^131)*(1/f1^4)^68*(1/f1^2)"),
            128,
            "bt(16n+8): odd-class extraction of bt(8n)",
        ),
        (
            "bt-32n24",
            chain(&[(0, 2), (0, 2), (0, 2), (1, 2), (1, 2)]),
            s("4*(f4^2/f2)*(f8^2/f4)"),
            64,
            "bt(32n+24) reduces to an even series mod 64",
        ),
        (
            "4-2",
            format!(
                "{} - {}",
                chain(&[(0, 2), (0, 2), (0, 2), (0, 2), (0, 2)]),
                chain(&[(0, 2), (0, 2), (0, 2), (0, 2)])
            ),
            s("(f2^43/(f1^18*f4^13*f8^2))*(96*q*f8^4/f4^2 + f2^16/f1^32 - f4^16/f2^32)"),
            128,
            "bt(32n) - bt(16n) factored for the theta reduction",
        ),
        (
            "4-3",
            s("f2^16/f1^32"),
            s("57 + 120*phineg(1)^2 + 32*phi(2) + 32*phi(4) + 16*phineg(1)^4"),
            128,
            "sixteenth power of the mod-8 expansion, reduced mod 128",
        ),
        (
            "4-4",
            s("f4^16/f2^32"),
            s("57 + 120*phineg(2)^2 + 32*phi(4) + 32*phi(8) + 16*phineg(2)^4"),
            128,
            "previous row with q replaced by q^2",
        ),
        (
            "4-7",
            s("96*q*f8^4/f4^2 + f2^16/f1^32 - f4^16/f2^32"),
            s("0"),
            128,
            "the bracketed combination vanishes mod 128",
        ),
        (
            "4-9",
            chain(&[(0, 2), (1, 2)]),
            s("64*q*(1/f1^4)^12*(1/f1^2)*(f2^49*f8^2/f4^7) \
               + 28*(1/f1^4)^13*(1/f1^2)*(f2^59/(f4^9*f8^2)) \
               + 2*(1/f1^4)^14*(1/f1^2)*(f2^73*f8^2/f4^23)"),
            128,
            "bt(4n+2): odd-class extraction of bt(2n)",
        ),
        (
            "4-10",
            chain(&[(0, 2), (1, 2), (0, 2)]),
            s("64*q*(1/f1^4)^31*(f2^163*f8^2/f4^47) \
               + 96*q*(1/f1^4)^30*(f2^149/(f4^33*f8^2)) \
               + 30*(1/f1^4)^32*(f2^173/(f4^49*f8^2))"),
            128,
            "bt(8n+2): even-class extraction of bt(4n+2)",
        ),
        (
            "4-11",
            chain(&[(0, 2), (1, 2), (0, 2), (1, 2)]),
            s("32*(f2^2/f1)^3*(f4^2/f2)"),
            128,
            "bt(16n+10) collapsed by the binomial congruence",
        ),
        (
            "4-13",
            chain(&[(0, 2), (1, 2), (0, 2), (1, 2), (2, 3)]),
            s("32*q*f6^5*f12^2/f3^3 + 32*f1*f2*f3^6 + 96*(f6^5/f12)*(f4/f1)"),
            128,
            "bt(48n+42): class 2 mod 3 of bt(16n+10)",
        ),
        (
            "bt-144n42",
            chain(&[(0, 2), (1, 2), (0, 2), (1, 2), (2, 3), (0, 3)]),
            s("0"),
            128,
            "bt(144n+42) vanishes mod 128",
        ),
        (
            "bt-144n138",
            chain(&[(0, 2), (1, 2), (0, 2), (1, 2), (2, 3), (2, 3)]),
            s("0"),
            128,
            "bt(144n+138) vanishes mod 128",
        ),
        (
            "bt-mod3",
            BT_EXPR.to_string(),
            s("f12/(f3^2*f6)"),
            3,
            "generating function mod 3 via the binomial congruence",
        ),
        (
            "4-18",
            chain(&[(0, 3)]),
            s("f1*f4/(f2*f3)"),
            3,
            "bt(3n) mod 3, reduced by the binomial congruence",
        ),
        (
            "4-19",
            format!("negq({})", chain(&[(0, 3)])),
            s("(f2^2/f1)*(f3*f12/f6^3)"),
            3,
            "bt(3n) with q replaced by -q",
        ),
        (
            "4-20",
            chain(&[(0, 2), (0, 2), (1, 2)]),
            s("32*q*(1/f1^4)^30*(1/f1^2)*(f2^157*f8^2/f4^43) \
               + 16*(1/f1^4)^31*(1/f1^2)*(f2^167/(f4^45*f8^2)) \
               + 2*(1/f1^4)^32*(1/f1^2)*(f2^181*f8^2/f4^59)"),
            128,
            "bt(8n+4): odd-class extraction of bt(4n)",
        ),
        (
            "4-21",
            chain(&[(0, 2), (0, 2), (1, 2), (0, 2)]),
            s("64*q*(1/f1^4)^67*(f2^379*f8^2/f4^119) + 18*(1/f1^4)^68*(f2^389/(f4^121*f8^2))"),
            128,
            "bt(16n+4): even-class extraction of bt(8n+4)",
        ),
        (
            "4-22",
            chain(&[(0, 2), (0, 2), (1, 2), (0, 2), (1, 2)]),
            s("96*f2^819/(f1^559*f4^266)"),
            128,
            "bt(32n+20): odd-class extraction of bt(16n+4)",
        ),
        (
            "4-26",
            chain(&[(0, 2), (0, 2), (0, 2), (1, 2), (0, 2)]),
            s("64*q*(1/f1^4)^138*(f2^797/(f4^249*f8^2)) \
               + 64*q*(1/f1^4)^139*(f2^811*f8^2/f4^263) \
               + 50*(1/f1^4)^140*(f2^821/(f4^265*f8^2))"),
            128,
            "bt(32n+8): even-class extraction of bt(16n+8)",
        ),
        (
            "4-26-1",
            chain(&[(0, 2), (0, 2), (0, 2), (1, 2), (0, 2), (1, 2)]),
            s("96*f2^1683/(f1^1135*f4^554)"),
            128,
            "bt(64n+40): odd-class extraction of bt(32n+8)",
        ),
        (
            "4-30",
            chain(&[(0, 2), (0, 2), (0, 2), (0, 2), (1, 2)]),
            s("64*q*(1/f1^4)^138*(1/f1^2)*(f2^805*f8^2/f4^259) \
               + 112*(1/f1^4)^139*(1/f1^2)*(f2^815/(f4^261*f8^2)) \
               + 2*(1/f1^4)^140*(1/f1^2)*(f2^829*f8^2/f4^275)"),
            128,
            "bt(32n+16): odd-class extraction of bt(16n)",
        ),
        (
            "4-31",
            chain(&[(0, 2), (0, 2), (0, 2), (0, 2), (1, 2), (0, 2)]),
            s("114*(1/f1^4)^284*(f2^1685/(f4^553*f8^2))"),
            128,
            "bt(64n+16): even-class extraction of bt(32n+16)",
        ),
        (
            "4-32",
            chain(&[(0, 2), (0, 2), (0, 2), (0, 2), (1, 2), (0, 2), (1, 2)]),
            s("96*f2^3411/(f1^2287*f4^1130)"),
            128,
            "bt(128n+80): odd-class extraction of bt(64n+16)",
        ),
    ]
}

pub struct Registry {
    records: Vec<IdentityRecord>,
    by_id: HashMap<String, usize>,
}

impl Registry {
    /// The full compiled-in registry.
    pub fn builtin() -> Registry {
        let mut records = Vec::new();
        let mut by_id = HashMap::new();
        for (id, lhs_text, rhs_text, modulus, citation) in raw_records() {
            let lhs = fold(&parse_expr(&lhs_text).expect("builtin lhs parses"));
            let rhs = fold(&parse_expr(&rhs_text).expect("builtin rhs parses"));
            let prev = by_id.insert(id.to_string(), records.len());
            assert!(prev.is_none(), "duplicate registry id {id}");
            records.push(IdentityRecord {
                id: id.to_string(),
                lhs_text,
                rhs_text,
                lhs,
                rhs,
                modulus,
                citation: citation.to_string(),
            });
        }
        Registry { records, by_id }
    }

    pub fn records(&self) -> &[IdentityRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&IdentityRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.id.as_str())
    }

    /// Check one identity to `order` in its stated ring.
    pub fn verify(&self, id: &str, order: usize) -> Result<VerificationReport, UnknownId> {
        let rec = self.get(id).ok_or_else(|| UnknownId(id.to_string()))?;
        let mut ev = Evaluator::new(rec.modulus);
        Ok(verify_record(rec, order, &mut ev))
    }

    /// Check a set of identities, sharing expansion caches per ring.
    ///
    /// Records are processed in order of decreasing working-order demand
    /// so a shared base series is expanded once at its largest order.
    pub fn verify_many<'a, I>(&self, ids: I, order: usize) -> Result<Vec<VerificationReport>, UnknownId>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut recs = Vec::new();
        for id in ids {
            recs.push(self.get(id).ok_or_else(|| UnknownId(id.to_string()))?);
        }
        recs.sort_by_key(|r| std::cmp::Reverse(order_demand(&r.lhs).max(order_demand(&r.rhs))));
        let mut evaluators: HashMap<u64, Evaluator> = HashMap::new();
        let mut reports: Vec<VerificationReport> = recs
            .into_iter()
            .map(|rec| {
                let ev = evaluators
                    .entry(rec.modulus)
                    .or_insert_with(|| Evaluator::new(rec.modulus));
                verify_record(rec, order, ev)
            })
            .collect();
        reports.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(reports)
    }

    /// Check the whole registry at one order.
    pub fn verify_all(&self, order: usize) -> Vec<VerificationReport> {
        self.verify_many(self.ids(), order)
            .expect("builtin ids are known")
    }
}

/// Evaluate both sides of `rec` to `order` and compare coefficientwise.
pub fn verify_record(rec: &IdentityRecord, order: usize, ev: &mut Evaluator) -> VerificationReport {
    assert_eq!(ev.modulus(), rec.modulus, "evaluator ring mismatch");
    let start = Instant::now();
    let env = Env::new();
    let lhs = ev
        .eval(&rec.lhs, order, &env)
        .expect("registry lhs evaluates");
    let rhs = ev
        .eval(&rec.rhs, order, &env)
        .expect("registry rhs evaluates");
    match lhs.first_difference(&rhs) {
        None => VerificationReport::pass(rec.id.clone(), order as u64, start.elapsed()),
        Some(i) => {
            let l = lhs.coeff(i).expect("in range");
            let r = rhs.coeff(i).expect("in range");
            let suffix = if rec.modulus == 0 {
                String::new()
            } else {
                format!(" (mod {})", rec.modulus)
            };
            VerificationReport::fail(
                rec.id.clone(),
                order as u64,
                Counterexample::new(i as u64, format!("{l} != {r}{suffix}")),
                start.elapsed(),
            )
        }
    }
}

/// Worst-case multiplier the expression applies to the requested order
/// (extraction chains dominate; substitution shrinks).
fn order_demand(e: &SeriesExpr) -> u64 {
    match e {
        SeriesExpr::Extract(x, _, m) => order_demand(x).saturating_mul(*m),
        SeriesExpr::Scale(_, x)
        | SeriesExpr::Pow(x, _)
        | SeriesExpr::Subst(x, _)
        | SeriesExpr::NegQ(x) => order_demand(x),
        SeriesExpr::Add(a, b)
        | SeriesExpr::Sub(a, b)
        | SeriesExpr::Mul(a, b)
        | SeriesExpr::Div(a, b) => order_demand(a).max(order_demand(b)),
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn registry_shape() {
        let reg = Registry::builtin();
        let exact = reg.records().iter().filter(|r| r.modulus == 0).count();
        let modular = reg.records().iter().filter(|r| r.modulus > 0).count();
        assert_eq!(exact, 18);
        assert_eq!(modular, 34);
        assert!(reg.get("2-6").is_some());
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn dissection_lemmas_verify() {
        let reg = Registry::builtin();
        for id in ["2-6", "2-7", "3-10", "3-11", "4-5", "a-1", "4-6", "4-12", "4-14", "4-15"] {
            let rep = reg.verify(id, 400).unwrap();
            assert_eq!(rep.status, Status::Pass, "{rep}");
        }
    }

    #[test]
    fn bracketed_combination_vanishes() {
        let reg = Registry::builtin();
        let rep = reg.verify("3-12", 300).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn unknown_id_is_reported() {
        let reg = Registry::builtin();
        assert_eq!(reg.verify("no-such", 10).unwrap_err(), UnknownId("no-such".into()));
    }

    #[test]
    fn full_registry_passes_at_moderate_order() {
        // The deep acceptance run uses orders 1000/500; this is the smoke
        // version that still exercises every record.
        let reg = Registry::builtin();
        let reports = reg.verify_many(reg.ids(), 60).unwrap();
        for rep in &reports {
            assert!(rep.passed(), "{rep}");
        }
        assert_eq!(reports.len(), 52);
    }

    #[test]
    fn corrupted_record_reports_first_bad_exponent() {
        // Flip the sign of the q-term of the 1/f1^4 dissection: the first
        // disagreement is at q^1 (4 vs -4).
        let lhs = fold(&parse_expr("1/f1^4").unwrap());
        let rhs = fold(&parse_expr("f4^14/(f2^14*f8^4) - 4*q*f4^2*f8^4/f2^10").unwrap());
        let rec = IdentityRecord {
            id: "2-7-corrupt".into(),
            lhs_text: String::new(),
            rhs_text: String::new(),
            lhs,
            rhs,
            modulus: 0,
            citation: String::new(),
        };
        let mut ev = Evaluator::new(0);
        let rep = verify_record(&rec, 64, &mut ev);
        assert_eq!(rep.status, Status::Fail);
        let ce = rep.counterexample.unwrap();
        assert_eq!(ce.argument, 1);
        assert_eq!(ce.value, "4 != -4");
    }
}
