//! The bt(n) coefficient table and the catalog of congruence claims.
//!
//! `bt(n)` counts overcubic partition triples; its generating function is
//! the eta quotient `f4^3/(f1^6*f2^3)`. A [`BtTable`] holds `bt(0..=N)`
//! either exactly or reduced mod `m`, and [`verify_claim`] scans it for a
//! congruence over an arithmetic progression, optionally scaled by every
//! power of two (`2^alpha * (a n + b)`), reporting the smallest failing
//! argument.
//!
//! The default working ring for the claim suite is `Z/384Z`: 384 covers
//! every modulus that occurs (3, 8, 16, 32, 64, 128, 384), so one table
//! serves all claims.

pub mod oracle;

use crate::eta::EtaExpr;
use crate::report::{Counterexample, VerificationReport};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

/// Modulus that covers every congruence in the claim catalog.
pub const CLAIM_RING: u64 = 384;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed table file: {0}")]
    Malformed(String),
    #[error("table payload does not match its checksum")]
    ChecksumMismatch,
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ClaimError {
    #[error("table reaches argument {have} but the scan needs {need}")]
    TableTooSmall { have: u64, need: u64 },
    #[error("table modulus {table} is not a multiple of claim modulus {claim}")]
    IncompatibleModulus { table: u64, claim: u64 },
}

/// Values `bt(0..=limit)`, exact (`modulus == 0`) or reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BtTable {
    modulus: u64,
    values: Vec<BigInt>,
}

impl BtTable {
    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self, n: u64) -> &BigInt {
        &self.values[n as usize]
    }

    /// `bt(n) mod m`; the caller must have checked ring compatibility.
    fn residue(&self, n: u64, m: u64) -> u64 {
        self.values[n as usize]
            .mod_floor(&BigInt::from(m))
            .to_u64()
            .expect("residue fits u64")
    }

    /// Serialize as a text document with a checksummed payload.
    pub fn save(&self, path: &Path) -> Result<(), TableError> {
        let mut payload = String::new();
        for v in &self.values {
            payload.push_str(&v.to_string());
            payload.push('\n');
        }
        let digest = hex::encode(Sha256::digest(payload.as_bytes()));
        let mut out = std::fs::File::create(path)?;
        write!(
            out,
            "btqtable 1\nlimit {}\nmodulus {}\nsha256 {}\n---\n{}",
            self.limit(),
            self.modulus,
            digest,
            payload
        )?;
        Ok(())
    }

    /// Load and fully validate a table document.
    pub fn load(path: &Path) -> Result<BtTable, TableError> {
        let text = std::fs::read_to_string(path)?;
        let bad = |msg: &str| TableError::Malformed(msg.to_string());
        let (header, payload) = text
            .split_once("---\n")
            .ok_or_else(|| bad("missing payload separator"))?;
        let mut lines = header.lines();
        let version = lines.next().ok_or_else(|| bad("empty header"))?;
        if version != "btqtable 1" {
            return Err(bad("unsupported format version"));
        }
        let limit: u64 = lines
            .next()
            .and_then(|l| l.strip_prefix("limit "))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing or invalid limit"))?;
        let modulus: u64 = lines
            .next()
            .and_then(|l| l.strip_prefix("modulus "))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing or invalid modulus"))?;
        let digest = lines
            .next()
            .and_then(|l| l.strip_prefix("sha256 "))
            .ok_or_else(|| bad("missing checksum"))?;
        if hex::encode(Sha256::digest(payload.as_bytes())) != digest {
            return Err(TableError::ChecksumMismatch);
        }
        let mut values = Vec::with_capacity(limit as usize + 1);
        for line in payload.lines() {
            let v: BigInt = line
                .parse()
                .map_err(|_| bad("non-integer table entry"))?;
            if modulus == 0 && v.is_negative() {
                return Err(bad("exact table entry is negative"));
            }
            if modulus > 0 && (v.is_negative() || v >= BigInt::from(modulus)) {
                return Err(bad("table entry outside the residue range"));
            }
            values.push(v);
        }
        if values.len() as u64 != limit + 1 {
            return Err(bad("value count does not match the declared limit"));
        }
        if values[0] != BigInt::from(1) {
            return Err(bad("bt(0) must be 1"));
        }
        Ok(BtTable { modulus, values })
    }
}

/// Expand `bt(0..=limit)` in the requested ring.
pub fn bt_table(limit: u64, modulus: u64) -> BtTable {
    let gf = EtaExpr {
        coefficient: 1,
        qshift: 0,
        factors: BTreeMap::from([(4, 3), (1, -6), (2, -3)]),
    };
    let series = gf.evaluate(limit as usize, modulus);
    BtTable {
        modulus,
        values: series.coeffs_bigint(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    /// `bt(arg) = 0 (mod modulus)`.
    Vanishing,
    /// `bt(arg) = sign * bt(arg') (mod modulus)`.
    Equivalence,
}

/// The right-hand progression of an equivalence claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RhsProgression {
    pub a: u64,
    pub b: u64,
    /// `+1` or `-1`.
    pub sign: i8,
}

/// A congruence claim over the progression `a*n + b`, optionally scaled
/// by `2^alpha` for every `alpha >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimSpec {
    pub id: String,
    pub kind: ClaimKind,
    pub a: u64,
    pub b: u64,
    pub alpha_family: bool,
    pub modulus: u64,
    pub rhs: Option<RhsProgression>,
}

impl ClaimSpec {
    fn vanishing(id: &str, a: u64, b: u64, modulus: u64, alpha_family: bool) -> ClaimSpec {
        assert!(a >= 1 && modulus >= 2);
        ClaimSpec {
            id: id.to_string(),
            kind: ClaimKind::Vanishing,
            a,
            b,
            alpha_family,
            modulus,
            rhs: None,
        }
    }

    fn equivalence(
        id: &str,
        a: u64,
        b: u64,
        modulus: u64,
        alpha_family: bool,
        rhs: RhsProgression,
    ) -> ClaimSpec {
        assert!(a >= 1 && rhs.a >= 1 && modulus >= 2);
        assert!(rhs.sign == 1 || rhs.sign == -1);
        ClaimSpec {
            id: id.to_string(),
            kind: ClaimKind::Equivalence,
            a,
            b,
            alpha_family,
            modulus,
            rhs: Some(rhs),
        }
    }

    /// Human-readable statement, e.g. `bt(2^a(8n+7)) = 0 (mod 64)`.
    pub fn statement(&self) -> String {
        let lhs = if self.alpha_family {
            format!("bt(2^a({}n+{}))", self.a, self.b)
        } else {
            format!("bt({}n+{})", self.a, self.b)
        };
        match (&self.kind, &self.rhs) {
            (ClaimKind::Vanishing, _) => format!("{lhs} = 0 (mod {})", self.modulus),
            (ClaimKind::Equivalence, Some(r)) => {
                let sign = if r.sign < 0 { "-" } else { "" };
                format!("{lhs} = {sign}bt({}n+{}) (mod {})", r.a, r.b, self.modulus)
            }
            _ => unreachable!("equivalence claims carry a right-hand progression"),
        }
    }
}

/// Every congruence claim shipped with the crate, keyed by its label.
///
/// Covers the three mod 8/16/32 congruences of Nayaka, Dharmendra and
/// Kumar, the five mod 64/128/384 congruences of Saikia and Sarma, the
/// two conjectured infinite families they posed, and the derived
/// progression steps used along the way.
pub fn builtin_claims() -> Vec<ClaimSpec> {
    let plus = |a: u64, b: u64| RhsProgression { a, b, sign: 1 };
    let minus = |a: u64, b: u64| RhsProgression { a, b, sign: -1 };
    vec![
        ClaimSpec::vanishing("nayaka-1", 8, 5, 8, false),
        ClaimSpec::vanishing("nayaka-2", 16, 10, 16, false),
        ClaimSpec::vanishing("nayaka-3", 8, 7, 32, false),
        ClaimSpec::vanishing("v-1", 8, 7, 64, false),
        ClaimSpec::vanishing("v-2", 16, 14, 64, false),
        ClaimSpec::vanishing("v-3", 32, 28, 64, false),
        ClaimSpec::vanishing("v-4", 72, 21, 128, false),
        ClaimSpec::vanishing("v-5", 72, 69, 384, false),
        ClaimSpec::vanishing("1-2", 8, 7, 64, true),
        ClaimSpec::vanishing("1-3", 144, 42, 384, false),
        ClaimSpec::vanishing("1-4", 72, 21, 128, true),
        ClaimSpec::vanishing("1-5", 72, 69, 128, true),
        ClaimSpec::equivalence("3-13", 16, 0, 64, false, plus(8, 0)),
        ClaimSpec::equivalence("3-14", 8, 0, 64, true, plus(8, 0)),
        ClaimSpec::vanishing("3-16", 64, 56, 64, false),
        ClaimSpec::vanishing("3-17", 64, 56, 64, true),
        ClaimSpec::equivalence("4-1", 16, 0, 128, true, plus(16, 0)),
        ClaimSpec::equivalence("4-8", 32, 0, 128, false, plus(16, 0)),
        ClaimSpec::vanishing("4-16", 144, 42, 128, false),
        ClaimSpec::equivalence("4-23", 32, 20, 128, false, minus(16, 10)),
        ClaimSpec::vanishing("4-24", 288, 84, 128, false),
        ClaimSpec::equivalence("4-27", 64, 40, 128, false, minus(16, 10)),
        ClaimSpec::vanishing("4-28", 576, 168, 128, false),
        ClaimSpec::equivalence("4-33", 128, 80, 128, false, minus(16, 10)),
        ClaimSpec::vanishing("4-34", 1152, 336, 128, false),
        ClaimSpec::vanishing("4-35", 1152, 336, 128, true),
        ClaimSpec::vanishing("4-36", 144, 138, 128, false),
        ClaimSpec::vanishing("4-37", 288, 276, 128, false),
        ClaimSpec::vanishing("4-38", 576, 552, 128, false),
        ClaimSpec::vanishing("4-39", 1152, 1104, 128, false),
        ClaimSpec::vanishing("4-40", 1152, 1104, 128, true),
        ClaimSpec::vanishing("bt-9n6", 9, 6, 3, false),
    ]
}

/// Arguments of the claim's left-hand progression up to `limit`,
/// ascending and deduplicated. For alpha families the scale runs over
/// every power of two that still lands inside the table.
fn lhs_arguments(c: &ClaimSpec, limit: u64) -> Vec<(u64, u64)> {
    // (argument, n) pairs; n is needed to pair equivalence sides.
    let mut args = BTreeSet::new();
    let mut scale = 1u64;
    loop {
        let mut n = 0u64;
        loop {
            let arg = match c
                .a
                .checked_mul(n)
                .and_then(|v| v.checked_add(c.b))
                .and_then(|v| v.checked_mul(scale))
            {
                Some(v) => v,
                None => break,
            };
            if arg > limit {
                break;
            }
            args.insert((arg, n));
            n += 1;
        }
        if !c.alpha_family {
            break;
        }
        // Smallest argument that grows with the scale: b, or a at n=1
        // for progressions through zero.
        let seed = if c.b > 0 { c.b } else { c.a };
        scale = match scale.checked_mul(2) {
            Some(s) if s.saturating_mul(seed) <= limit => s,
            _ => break,
        };
    }
    args.into_iter().collect()
}

/// Scan the table for one claim, reporting the smallest failing
/// argument. Scanning stops at the first counterexample.
pub fn verify_claim(
    c: &ClaimSpec,
    table: &BtTable,
    limit: u64,
) -> Result<VerificationReport, ClaimError> {
    if table.modulus() != 0 && table.modulus() % c.modulus != 0 {
        return Err(ClaimError::IncompatibleModulus {
            table: table.modulus(),
            claim: c.modulus,
        });
    }
    if table.limit() < limit {
        return Err(ClaimError::TableTooSmall {
            have: table.limit(),
            need: limit,
        });
    }
    let start = Instant::now();
    let m = c.modulus;
    for (arg, n) in lhs_arguments(c, limit) {
        match (&c.kind, &c.rhs) {
            (ClaimKind::Vanishing, _) => {
                let r = table.residue(arg, m);
                if r != 0 {
                    return Ok(VerificationReport::fail(
                        c.id.clone(),
                        limit,
                        Counterexample::new(arg, format!("bt({arg}) = {r} (mod {m})")),
                        start.elapsed(),
                    ));
                }
            }
            (ClaimKind::Equivalence, Some(rhs)) => {
                let rhs_arg = rhs.a * n + rhs.b;
                if rhs_arg > limit {
                    continue;
                }
                let lv = table.residue(arg, m);
                let rv = table.residue(rhs_arg, m);
                let expected = if rhs.sign > 0 { rv } else { (m - rv) % m };
                if lv != expected {
                    let sign = if rhs.sign < 0 { "-" } else { "" };
                    return Ok(VerificationReport::fail(
                        c.id.clone(),
                        limit,
                        Counterexample::new(
                            arg,
                            format!("bt({arg}) = {lv} but {sign}bt({rhs_arg}) = {expected} (mod {m})"),
                        ),
                        start.elapsed(),
                    ));
                }
            }
            _ => unreachable!("equivalence claims carry a right-hand progression"),
        }
    }
    Ok(VerificationReport::pass(c.id.clone(), limit, start.elapsed()))
}
