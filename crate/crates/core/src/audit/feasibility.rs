//! Per-instance reliability and database-privacy checks.

use serde::Serialize;

use crate::schemes::{SchemeInstance, SourceBlock};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reliability {
    pub pass: bool,
    /// `certificate[l-1]` recovers `w_theta(l)` from the downloads.
    pub certificate: Vec<Vec<u64>>,
    pub failed_symbol: Option<usize>,
    pub reason: Option<String>,
}

/// Every desired symbol must be a combination of the downloaded forms, and a
/// declared decode plan must actually decode.
pub fn verify_reliability(inst: &SchemeInstance) -> Reliability {
    let m = inst.matrix();
    let layout = inst.layout();
    let mut certificate = Vec::with_capacity(inst.message_len);
    let fail = |l: usize, reason: &str, certificate: Vec<Vec<u64>>| Reliability {
        pass: false,
        certificate,
        failed_symbol: Some(l),
        reason: Some(reason.to_string()),
    };
    for l in 1..=inst.message_len {
        let target = layout.unit(crate::schemes::SymbolRef::msg(inst.theta, l));
        match m.solve_left(&target) {
            Ok(Some(x)) => certificate.push(x),
            _ => return fail(l, "not in the span of the downloads", certificate),
        }
        if let Some(plan) = &inst.decode_plan {
            let ok = plan
                .get(l - 1)
                .and_then(|p| m.left_mul(p).ok())
                .is_some_and(|v| v == target);
            if !ok {
                return fail(l, "declared decode plan does not recover the symbol", certificate);
            }
        }
    }
    Reliability { pass: true, certificate, failed_symbol: None, reason: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DatabasePrivacy {
    pub pass: bool,
    pub rank: usize,
    /// Rank once the undesired messages are known, i.e. with their columns removed.
    pub rank_without_undesired: usize,
}

impl DatabasePrivacy {
    /// `I(W_undesired; A)` in q-ary units.
    pub fn leakage(&self) -> usize {
        self.rank - self.rank_without_undesired
    }
}

pub fn verify_database_privacy(inst: &SchemeInstance) -> DatabasePrivacy {
    let layout = inst.layout();
    let m = inst.matrix();
    let others: Vec<SourceBlock> = (1..=inst.graph.message_count())
        .filter(|&k| k != inst.theta)
        .map(SourceBlock::Message)
        .collect();
    let keep: Vec<bool> = layout.mask(&others).into_iter().map(|b| !b).collect();
    let rank = m.rank();
    let rank_without_undesired = m.select_columns(&keep).rank();
    DatabasePrivacy { pass: rank == rank_without_undesired, rank, rank_without_undesired }
}
