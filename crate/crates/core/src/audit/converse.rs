//! Necessary conditions from the capacity converse, evaluated on a concrete
//! family. Every inequality holds for any feasible SPIR scheme with fully
//! replicated randomness, so a violation points at a bug.
//!
//! `H(X | Q)` is the average over the realization space. Ranks do not change
//! under the user's permutations, so averaging over the internal choices
//! with identity permutations gives the exact value.

use serde_json::json;

use super::entropy::{query_entropy, EntropyQuery, Variable};
use super::{theta_rng, AuditOptions, AuditReport, CheckResult, CheckStatus, Mode};
use crate::algebra::{ratio, Rational};
use crate::error::Result;
use crate::graphdb::GraphKind;
use crate::schemes::{SchemeFamily, SchemeInstance, SourceBlock};

struct Ensemble {
    instances: Vec<SchemeInstance>,
    exact: bool,
}

impl Ensemble {
    fn new(family: &SchemeFamily, theta: usize, opts: &AuditOptions) -> Result<Self> {
        let space = family.realization_space(theta);
        let exhaustive = opts.mode == Mode::Exhaustive && space.choice_count().is_some_and(|c| c <= opts.limit);
        let choices: Vec<Vec<usize>> = if exhaustive {
            space.choice_vectors().collect()
        } else {
            let mut rng = theta_rng(opts.seed, theta);
            (0..opts.samples.max(1)).map(|_| space.sample(&mut rng).choices).collect()
        };
        let instances = choices.iter().map(|c| family.build(theta, c)).collect::<Result<_>>()?;
        Ok(Self { instances, exact: exhaustive })
    }

    fn mean(&self, f: impl Fn(&SchemeInstance) -> usize) -> Rational {
        let total: usize = self.instances.iter().map(f).sum();
        Rational::from(total).checked_div(&Rational::from(self.instances.len())).expect("nonempty ensemble")
    }

    fn entropy(&self, q: &EntropyQuery) -> Rational {
        self.mean(|inst| query_entropy(inst, q))
    }
}

fn server(n: usize) -> Variable {
    Variable::Server(n)
}

fn block(k: usize) -> Variable {
    Variable::Block(SourceBlock::Message(k))
}

fn all_but(n_servers: usize, skip: usize) -> Vec<Variable> {
    (1..=n_servers).filter(|&s| s != skip).map(server).collect()
}

fn rat(n: usize) -> Rational {
    Rational::from(n)
}

/// Evaluate the converse inequalities on an SPIR family.
pub fn audit_converse(family: &SchemeFamily, opts: &AuditOptions) -> Result<AuditReport> {
    let graph = family.graph().clone();
    let n = graph.server_count();
    let k_count = graph.message_count();
    let l = rat(family.message_len());
    let r = rat(family.randomness_len());
    let ens: Vec<Ensemble> = family.thetas().map(|t| Ensemble::new(family, t, opts)).collect::<Result<_>>()?;
    let exact = ens.iter().all(|e| e.exact);
    let e = |theta: usize| &ens[theta - 1];
    let mut checks = Vec::new();

    // H(A_n^[k] | Q) for every server and theta.
    let h: Vec<Vec<Rational>> = family
        .thetas()
        .map(|t| (1..=n).map(|s| e(t).entropy(&EntropyQuery::of([server(s)]))).collect())
        .collect();
    let hs = |theta: usize, s: usize| h[theta - 1][s - 1].clone();
    let sum_h = |theta: usize| (1..=n).map(|s| hs(theta, s)).sum::<Rational>();

    for theta in family.thetas() {
        let total = e(theta).entropy(&EntropyQuery::of([Variable::AllAnswers]));
        checks.push(CheckResult::inequality(
            format!("randomness-bound[theta={theta}]"),
            r.clone(),
            &total - &l,
            exact,
        ));

        let (i, j) = graph.servers_of(theta);
        let mut given: Vec<Variable> = (1..=k_count).filter(|&k| k != theta).map(block).collect();
        given.push(Variable::Block(SourceBlock::Randomness));
        let hi = e(theta).entropy(&EntropyQuery::of([server(i)]).given(given.clone()));
        let hj = e(theta).entropy(&EntropyQuery::of([server(j)]).given(given));
        checks.push(
            CheckResult::inequality(format!("edge-pair[theta={theta}]"), &hi + &hj, l.clone(), exact)
                .with_witness(json!({ "servers": [i, j], "entropies": [hi, hj] })),
        );
    }

    for s in 1..=n {
        let values: Vec<Rational> = family.thetas().map(|t| hs(t, s)).collect();
        let max = values.iter().max().cloned().unwrap_or_else(Rational::zero);
        let min = values.iter().min().cloned().unwrap_or_else(Rational::zero);
        let status = if max != min {
            CheckStatus::Fail
        } else if exact {
            CheckStatus::Pass
        } else {
            CheckStatus::SampledPass
        };
        checks.push(CheckResult {
            name: format!("theta-invariance[server={s}]"),
            status,
            slack: &min - &max,
            lhs: min,
            rhs: max,
            witness: Some(json!({ "entropies": values })),
        });
    }

    // H(A_{[N]\n}^[k] | A_n^[k], W_k, Q) >= bound.
    let side_info = |theta: usize, s: usize, bound: Rational| {
        let q = EntropyQuery::of(all_but(n, s)).given([server(s), block(theta)]);
        CheckResult::inequality(format!("side-information[theta={theta},server={s}]"), e(theta).entropy(&q), bound, exact)
    };

    match graph.kind() {
        GraphKind::Path => {
            let half = ratio(1, 2);
            checks.push(side_info(1, 1, rat(n - 2) * &l * half.clone()));
            checks.push(side_info(n - 1, n, rat(n - 2) * &l * half.clone()));
            for s in 2..=n.saturating_sub(2) {
                for theta in [s - 1, s] {
                    checks.push(side_info(theta, s, rat(n - 3) * &l * half.clone()));
                }
            }
            if n == 3 {
                let three_halves = ratio(3, 2) * &l;
                checks.push(CheckResult::inequality("pair[theta=1,servers=2+3]", hs(1, 2) + hs(1, 3), three_halves.clone(), exact));
                checks.push(CheckResult::inequality("pair[theta=2,servers=1+2]", hs(2, 1) + hs(2, 2), three_halves, exact));
                for theta in 1..=2 {
                    checks.push(CheckResult::inequality(
                        format!("pair[theta={theta},servers=1+3]"),
                        hs(theta, 1) + hs(theta, 3),
                        l.clone(),
                        exact,
                    ));
                    checks.push(CheckResult::inequality(
                        format!("download-sum[theta={theta}]"),
                        rat(2) * sum_h(theta),
                        rat(4) * &l,
                        exact,
                    ));
                    checks.push(CheckResult::inequality(
                        format!("randomness-sum[theta={theta}]"),
                        rat(3) * &r,
                        sum_h(theta) + l.clone(),
                        exact,
                    ));
                }
            }
            for theta in family.thetas() {
                checks.push(CheckResult::inequality(
                    format!("download-bound[theta={theta}]"),
                    rat(n - 1) * sum_h(theta),
                    rat(n * n - n + 2) * &l * ratio(1, 2),
                    exact,
                ));
            }
        }
        GraphKind::Cycle => {
            for s in 1..=n {
                let prev = if s == 1 { n } else { s - 1 };
                for theta in [prev, s] {
                    checks.push(side_info(theta, s, rat(n - 2) * &l * ratio(1, 2)));
                }
            }
            for theta in family.thetas() {
                checks.push(CheckResult::inequality(
                    format!("download-bound[theta={theta}]"),
                    rat(n - 1) * sum_h(theta),
                    rat(n) * (l.clone() + rat(n - 2) * &l * ratio(1, 2)),
                    exact,
                ));
            }
        }
        GraphKind::Generic => {}
    }

    Ok(AuditReport { scheme: family.name(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::schemes::P3CapacitySpir;

    #[test]
    fn p3_capacity_is_tight() {
        let fam = P3CapacitySpir::family(PrimeField::binary());
        let rep = audit_converse(&fam, &AuditOptions::default()).unwrap();
        assert_eq!(rep.status(), CheckStatus::Pass, "{rep:#?}");
        for name in ["randomness-bound[theta=1]", "download-sum[theta=1]", "randomness-sum[theta=2]", "pair[theta=1,servers=2+3]"] {
            assert_eq!(rep.check(name).unwrap().slack, Rational::zero(), "{name}");
        }
        let pair = rep.check("pair[theta=1,servers=2+3]").unwrap();
        assert_eq!((pair.lhs.clone(), pair.rhs.clone()), (Rational::from(3i64), Rational::from(3i64)));
    }
}
