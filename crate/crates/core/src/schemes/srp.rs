//! Symmetric retrieval property: each of the two servers storing the desired
//! message contributes exactly half of its symbols.
//!
//! The count at server `i` is the rank of `i`'s answers after conditioning on
//! the other messages stored there. Ranks are invariant under the per-message
//! permutations, so checking every internal-choice vector under identity
//! permutations covers every realization.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::{SchemeFamily, SchemeInstance, SourceBlock};

#[derive(Debug, Clone, Serialize)]
pub struct SrpWitness {
    pub theta: usize,
    pub choices: Vec<usize>,
    pub server: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SrpReport {
    pub family: String,
    /// `L'/2`.
    pub expected: usize,
    /// Distinct counts observed per `(theta, storing server)`.
    pub counts: BTreeMap<String, BTreeSet<usize>>,
    pub choice_vectors_checked: u128,
    pub pass: bool,
    pub witness: Option<SrpWitness>,
}

/// Desired symbols decodable from `server`'s answers alone, given its other messages.
pub fn desired_count(inst: &SchemeInstance, server: usize) -> usize {
    let layout = inst.layout();
    let keep = layout.mask(&[SourceBlock::Message(inst.theta)]);
    inst.matrix_of(&inst.server_refs(server)).select_columns(&keep).rank()
}

pub fn check_srp(family: &SchemeFamily) -> Result<SrpReport> {
    if family.randomness_len() != 0 {
        return Err(Error::NotPir(family.randomness_len()));
    }
    let l = family.message_len();
    let expected = l / 2;
    let mut counts: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut witness = None;
    let mut checked = 0u128;
    for theta in family.thetas() {
        let (i, j) = family.graph().servers_of(theta);
        let space = family.realization_space(theta);
        for choices in space.choice_vectors() {
            let inst = family.build(theta, &choices)?;
            checked += 1;
            for server in [i, j] {
                let c = desired_count(&inst, server);
                counts.entry(format!("theta={theta},server={server}")).or_default().insert(c);
                if (c != expected || l % 2 == 1) && witness.is_none() {
                    witness = Some(SrpWitness { theta, choices: choices.clone(), server, count: c });
                }
            }
        }
    }
    Ok(SrpReport {
        family: family.name(),
        expected,
        counts,
        choice_vectors_checked: checked,
        pass: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::graphdb::Graph;
    use crate::schemes::{
        Answer, BaseParams, Cycle3Pir, LinearForm, PathPir, Row, Scheme, SymbolRef, UserRealization,
    };

    #[test]
    fn path_three_counts_one_each() {
        let r = check_srp(&PathPir::family(3, PrimeField::binary()).unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.expected, 1);
        assert!(r.counts.values().all(|c| c == &BTreeSet::from([1])));
    }

    #[test]
    fn cycle_three_counts_three_each() {
        let r = check_srp(&Cycle3Pir::family(PrimeField::binary())).unwrap();
        assert!(r.pass);
        assert!(r.counts.values().all(|c| c == &BTreeSet::from([3])));
        assert_eq!(r.counts.len(), 6);
    }

    /// Both desired symbols come from the lower server.
    struct Lopsided(Graph);

    impl Scheme for Lopsided {
        fn name(&self) -> String {
            "lopsided".into()
        }
        fn graph(&self) -> &Graph {
            &self.0
        }
        fn message_len(&self) -> usize {
            2
        }
        fn randomness_len(&self) -> usize {
            0
        }
        fn base_params(&self) -> BaseParams {
            BaseParams { symbols: 2, downloads: 4 }
        }
        fn choice_radices(&self, _: usize) -> Vec<usize> {
            Vec::new()
        }
        fn build(&self, field: PrimeField, theta: usize, _: &[usize]) -> Result<SchemeInstance> {
            let (i, j) = self.0.servers_of(theta);
            let other = 3 - theta;
            let mut answers = vec![Vec::new(); 3];
            for l in 1..=2 {
                answers[i - 1].push(Answer::new(LinearForm::single(SymbolRef::msg(theta, l)), Row::Repetition(1)));
            }
            let (oi, _) = self.0.servers_of(other);
            answers[oi - 1].push(Answer::new(LinearForm::single(SymbolRef::msg(other, 1)), Row::Repetition(1)));
            answers[j - 1].push(Answer::new(LinearForm::single(SymbolRef::msg(other, 1)), Row::Repetition(1)));
            Ok(SchemeInstance {
                graph: self.0.clone(),
                field,
                theta,
                realization: UserRealization::identity(2, 2, 0, Vec::new()),
                message_len: 2,
                randomness_len: 0,
                answers,
                decode_plan: None,
            })
        }
    }

    #[test]
    fn lopsided_family_fails() {
        let fam = SchemeFamily::new(Lopsided(Graph::path(3).unwrap()), PrimeField::binary());
        let r = check_srp(&fam).unwrap();
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert_eq!((w.theta, w.server, w.count), (1, 1, 2));
        assert_eq!(r.counts["theta=1,server=2"], BTreeSet::from([0]));
    }

    #[test]
    fn spir_family_is_rejected() {
        let fam = crate::schemes::P3CapacitySpir::family(PrimeField::binary());
        assert!(matches!(check_srp(&fam), Err(Error::NotPir(2))));
    }
}
