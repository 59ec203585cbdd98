//! q-series toolkit for congruences of overcubic partition triples.

pub mod claims;
pub mod dissect;
pub mod eta;
pub mod expr;
pub mod registry;
pub mod report;
pub mod script;
pub mod series;

pub use claims::{bt_table, builtin_claims, verify_claim, BtTable, ClaimKind, ClaimSpec};
pub use dissect::{binomial_reduce_check, extract_progression, reconstruct};
pub use eta::{eta_power, theta_sum, EtaExpr, ThetaKind};
pub use expr::{eval_expr, EvalError, Evaluator, SeriesExpr};
pub use registry::{IdentityRecord, Registry, UnknownId};
pub use report::{Counterexample, Status, VerificationReport};
pub use script::{parse, parse_expr, replay, ParseError, ReplayError, Script, Statement};
pub use series::{Series, SeriesError};

use std::collections::HashSet;

/// Union of registry identity ids and claim catalog ids; the two sets
/// are disjoint, so a proof-script assert label resolves to exactly one
/// statement.
pub fn verification_ids() -> HashSet<String> {
    let mut ids = HashSet::new();
    for id in registry::Registry::builtin().ids() {
        assert!(ids.insert(id.to_string()), "duplicate id {id}");
    }
    for claim in claims::builtin_claims() {
        assert!(
            ids.insert(claim.id.clone()),
            "claim id {} collides with an identity id",
            claim.id
        );
    }
    ids
}
