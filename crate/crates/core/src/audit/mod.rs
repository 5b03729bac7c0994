//! Exact verification of schemes: reliability, database privacy, user
//! privacy and the converse inequalities, all through rank computations.
//! [`oracle`] provides an independent brute-force cross-check.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Rational;
use crate::error::Result;
use crate::schemes::{check_srp, RealizationSpace, SchemeFamily, SchemeInstance, UserRealization};

pub mod converse;
pub mod entropy;
pub mod feasibility;
pub mod oracle;
pub mod privacy;

pub use converse::audit_converse;
pub use entropy::{linear_entropy, query_entropy, EntropyQuery, Variable};
pub use feasibility::{verify_database_privacy, verify_reliability, DatabasePrivacy, Reliability};
pub use oracle::{entropy_oracle, OracleEntropy, DEFAULT_BUDGET};
pub use privacy::{canonical_view, server_view, verify_user_privacy, PrivacyOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Held on every sampled realization; not a proof.
    SampledPass,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::SampledPass => "sampled-pass",
        }
    }

    /// Worst of two statuses: fail, then sampled-pass, then pass.
    pub fn and(self, other: CheckStatus) -> CheckStatus {
        use CheckStatus::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (SampledPass, _) | (_, SampledPass) => SampledPass,
            _ => Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `lhs - rhs` for inequalities of the form `lhs >= rhs`.
    pub slack: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckResult {
    /// `lhs >= rhs`, downgraded to sampled-pass when not exhaustive.
    pub fn inequality(name: impl Into<String>, lhs: Rational, rhs: Rational, exact: bool) -> Self {
        let slack = &lhs - &rhs;
        let status = if slack.is_negative() {
            CheckStatus::Fail
        } else if exact {
            CheckStatus::Pass
        } else {
            CheckStatus::SampledPass
        };
        Self { name: name.into(), status, lhs, rhs, slack, witness: None }
    }

    pub fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub scheme: String,
    pub checks: Vec<CheckResult>,
}

impl AuditReport {
    pub fn status(&self) -> CheckStatus {
        self.checks.iter().fold(CheckStatus::Pass, |acc, c| acc.and(c.status))
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    pub mode: Mode,
    /// Largest realization space enumerated exhaustively.
    pub limit: u128,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { mode: Mode::Exhaustive, limit: 1_000_000, samples: 1000, seed: 0 }
    }
}

/// How the realization space of one `theta` was covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "coverage", content = "count")]
pub enum Coverage {
    /// Every realization.
    Full(u128),
    /// Every internal choice under identity permutations; exact for
    /// properties invariant under relabeling symbols.
    Choices(u128),
    Sampled(u128),
}

impl Coverage {
    pub fn status(&self) -> CheckStatus {
        match self {
            Coverage::Sampled(_) => CheckStatus::SampledPass,
            _ => CheckStatus::Pass,
        }
    }

    pub fn count(&self) -> u128 {
        match *self {
            Coverage::Full(n) | Coverage::Choices(n) | Coverage::Sampled(n) => n,
        }
    }
}

pub(crate) fn theta_rng(seed: u64, theta: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (theta as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Coverage strategy for a relabeling-invariant property of `theta`.
pub(crate) fn plan_coverage(family: &SchemeFamily, theta: usize, opts: &AuditOptions) -> Coverage {
    let space = family.realization_space(theta);
    if opts.mode == Mode::Sample {
        return Coverage::Sampled(opts.samples as u128);
    }
    match (space.size(), space.choice_count()) {
        (Some(n), _) if n <= opts.limit => Coverage::Full(n),
        (_, Some(c)) if c <= opts.limit => Coverage::Choices(c),
        _ => Coverage::Sampled(opts.samples as u128),
    }
}

/// The realizations visited under a coverage strategy, addressable by position.
pub(crate) struct Visit {
    pub coverage: Coverage,
    pub space: RealizationSpace,
    listed: Option<Vec<UserRealization>>,
}

impl Visit {
    pub fn new(family: &SchemeFamily, theta: usize, opts: &AuditOptions) -> Self {
        let coverage = plan_coverage(family, theta, opts);
        let space = family.realization_space(theta);
        let listed = match coverage {
            Coverage::Full(_) => None,
            Coverage::Choices(_) => Some(space.choice_vectors().map(|c| space.identity(c)).collect()),
            Coverage::Sampled(n) => {
                let mut rng = theta_rng(opts.seed, theta);
                Some((0..n).map(|_| space.sample(&mut rng)).collect())
            }
        };
        Self { coverage, space, listed }
    }

    /// Every internal choice under identity permutations.
    pub fn choices_only(family: &SchemeFamily, theta: usize) -> Self {
        let space = family.realization_space(theta);
        let listed: Vec<UserRealization> = space.choice_vectors().map(|c| space.identity(c)).collect();
        Self { coverage: Coverage::Choices(listed.len() as u128), space, listed: Some(listed) }
    }

    pub fn len(&self) -> u64 {
        self.coverage.count() as u64
    }

    pub fn get(&self, i: u64) -> UserRealization {
        match &self.listed {
            Some(list) => list[i as usize].clone(),
            None => self.space.get(i as u128).expect("id within space"),
        }
    }

    /// Identity instances for every choice vector that can be visited.
    pub fn bases(&self, family: &SchemeFamily, theta: usize) -> Result<HashMap<Vec<usize>, SchemeInstance>> {
        let mut out = HashMap::new();
        let choices: Vec<Vec<usize>> = match &self.listed {
            Some(list) => list.iter().map(|r| r.choices.clone()).collect(),
            None => self.space.choice_vectors().collect(),
        };
        for c in choices {
            if let std::collections::hash_map::Entry::Vacant(e) = out.entry(c) {
                let inst = family.build(theta, e.key())?;
                e.insert(inst);
            }
        }
        Ok(out)
    }
}

/// Run `check` on every covered instance of `theta`. Returns the coverage and
/// the first failure in visiting order.
pub(crate) fn scan_instances<F>(
    family: &SchemeFamily,
    theta: usize,
    opts: &AuditOptions,
    check: F,
) -> Result<(Coverage, Option<Value>)>
where
    F: Fn(&SchemeInstance) -> Option<Value> + Sync,
{
    let visit = Visit::new(family, theta, opts);
    let bases = visit.bases(family, theta)?;
    let failure = (0..visit.len()).into_par_iter().find_map_first(|i| {
        let real = visit.get(i);
        let inst = bases[&real.choices].permuted(&real);
        check(&inst).map(|detail| {
            json!({
                "theta": theta,
                "realization_id": visit.space.index_of(&real).map(|id| id.to_string()),
                "choices": real.choices,
                "detail": detail,
            })
        })
    });
    Ok((visit.coverage, failure))
}

fn feasibility_check(
    name: String,
    coverage: Coverage,
    failure: Option<Value>,
) -> CheckResult {
    let n = Rational::from(coverage.count() as usize);
    let (status, lhs) = match &failure {
        Some(_) => (CheckStatus::Fail, Rational::zero()),
        None => (coverage.status(), n.clone()),
    };
    let slack = &lhs - &n;
    CheckResult {
        name,
        status,
        lhs,
        rhs: n,
        slack,
        witness: Some(failure.unwrap_or_else(|| json!({ "coverage": coverage }))),
    }
}

/// Feasibility checks plus, for SPIR families, the converse suite. PIR
/// families (no common randomness) get an SRP check instead of database
/// privacy and the converse, which only apply to SPIR schemes.
pub fn audit_family(family: &SchemeFamily, opts: &AuditOptions) -> Result<AuditReport> {
    let spir = family.randomness_len() > 0;
    let mut checks = Vec::new();
    for theta in family.thetas() {
        let (cov, fail) = scan_instances(family, theta, opts, |inst| {
            let r = verify_reliability(inst);
            (!r.pass).then(|| json!({ "symbol": r.failed_symbol, "reason": r.reason }))
        })?;
        checks.push(feasibility_check(format!("reliability[theta={theta}]"), cov, fail));
        if spir {
            let (cov, fail) = scan_instances(family, theta, opts, |inst| {
                let d = verify_database_privacy(inst);
                (!d.pass).then(|| json!({ "rank": d.rank, "rank_without_undesired": d.rank_without_undesired }))
            })?;
            checks.push(feasibility_check(format!("database-privacy[theta={theta}]"), cov, fail));
        }
    }
    for theta in family.thetas().skip(1) {
        let p = verify_user_privacy(family, 1, theta, opts)?;
        let n = Rational::from(p.servers.len());
        let matched = Rational::from(p.servers.iter().filter(|s| s.equal).count());
        let slack = &matched - &n;
        checks.push(CheckResult {
            name: format!("user-privacy[theta=1,theta={theta}]"),
            status: p.status,
            lhs: matched,
            rhs: n,
            slack,
            witness: Some(serde_json::to_value(&p)?),
        });
    }
    if spir {
        checks.extend(audit_converse(family, opts)?.checks);
    } else {
        let srp = check_srp(family)?;
        let expected = Rational::from(srp.expected);
        let worst = srp
            .counts
            .values()
            .flatten()
            .map(|&c| Rational::from(c))
            .max_by(|a, b| (a - &expected).to_f64().abs().total_cmp(&(b - &expected).to_f64().abs()))
            .unwrap_or_else(|| expected.clone());
        let status = if srp.pass { CheckStatus::Pass } else { CheckStatus::Fail };
        checks.push(CheckResult {
            name: "symmetric-retrieval".into(),
            status,
            slack: &worst - &expected,
            lhs: worst,
            rhs: expected,
            witness: srp.witness.as_ref().map(serde_json::to_value).transpose()?,
        });
    }
    Ok(AuditReport { scheme: family.name(), checks })
}
