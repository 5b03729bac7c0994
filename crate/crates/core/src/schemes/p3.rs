//! Rate-1/2 SPIR scheme on `P_3` with two message symbols and two
//! common-randomness symbols.
//!
//! Server 2 stores both messages; it returns one uncoded randomness symbol
//! and one masked 2-sum. Each endpoint returns one masked singleton.

use crate::algebra::PrimeField;
use crate::error::{Error, Result};
use crate::graphdb::Graph;
use crate::schemes::{
    dense_plan, Answer, BaseParams, LinearForm, Row, Scheme, SchemeFamily, SchemeInstance, SymbolRef,
    UserRealization,
};

#[derive(Debug, Clone)]
pub struct P3CapacitySpir {
    graph: Graph,
}

impl P3CapacitySpir {
    pub fn new() -> Self {
        Self { graph: Graph::path(3).expect("P3") }
    }

    pub fn family(field: PrimeField) -> SchemeFamily {
        SchemeFamily::new(Self::new(), field)
    }
}

impl Default for P3CapacitySpir {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for P3CapacitySpir {
    fn name(&self) -> String {
        "p3-capacity".into()
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn message_len(&self) -> usize {
        2
    }

    fn randomness_len(&self) -> usize {
        2
    }

    fn base_params(&self) -> BaseParams {
        BaseParams { symbols: 2, downloads: 4 }
    }

    fn choice_radices(&self, _theta: usize) -> Vec<usize> {
        Vec::new()
    }

    fn build(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<SchemeInstance> {
        if !choices.is_empty() {
            return Err(Error::InvalidRealization("P3 capacity scheme has no internal choices".into()));
        }
        let (a, b, s) = (|i| SymbolRef::msg(1, i), |i| SymbolRef::msg(2, i), SymbolRef::rand);
        let rep = |f: LinearForm| Answer::new(f, Row::Repetition(1));
        let raw = |i| Answer::new(LinearForm::single(s(i)), Row::Raw);
        let (answers, plan) = match theta {
            1 => (
                vec![
                    vec![rep(LinearForm::sum([a(1), s(1)]))],
                    vec![raw(1), rep(LinearForm::sum([a(2), b(2), s(2)]))],
                    vec![rep(LinearForm::sum([b(2), s(2)]))],
                ],
                // a1 = (a1+s1) - s1, a2 = (a2+b2+s2) - (b2+s2)
                vec![vec![((1, 0), 1), ((2, 0), -1)], vec![((2, 1), 1), ((3, 0), -1)]],
            ),
            2 => (
                vec![
                    vec![rep(LinearForm::sum([a(1), s(1)]))],
                    vec![raw(2), rep(LinearForm::sum([a(1), b(1), s(1)]))],
                    vec![rep(LinearForm::sum([b(2), s(2)]))],
                ],
                // b1 = (a1+b1+s1) - (a1+s1), b2 = (b2+s2) - s2
                vec![vec![((2, 1), 1), ((1, 0), -1)], vec![((3, 0), 1), ((2, 0), -1)]],
            ),
            _ => return Err(Error::ThetaOutOfRange { theta, k: 2 }),
        };
        let decode_plan = plan.iter().map(|e| dense_plan(field, &answers, e)).collect();
        Ok(SchemeInstance {
            graph: self.graph.clone(),
            field,
            theta,
            realization: UserRealization::identity(2, 2, 2, Vec::new()),
            message_len: 2,
            randomness_len: 2,
            answers,
            decode_plan: Some(decode_plan),
        })
    }
}

/// Capacity-achieving `P_3` instance for one realization.
pub fn build_p3_capacity_spir(theta: usize, real: &UserRealization, field: PrimeField) -> Result<SchemeInstance> {
    P3CapacitySpir::family(field).instance(theta, real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_decode_and_count() {
        for q in [2, 5] {
            let fam = P3CapacitySpir::family(PrimeField::new(q).unwrap());
            for theta in 1..=2 {
                let inst = fam.identity_instance(theta).unwrap();
                assert_eq!(inst.download_count(), 4);
                let m = inst.matrix();
                for (l, plan) in inst.decode_plan.as_ref().unwrap().iter().enumerate() {
                    assert_eq!(m.left_mul(plan).unwrap(), inst.layout().unit(SymbolRef::msg(theta, l + 1)));
                }
            }
            assert!(fam.build(3, &[]).is_err());
        }
    }

    #[test]
    fn permutations_move_the_plan() {
        let fam = P3CapacitySpir::family(PrimeField::binary());
        let space = fam.realization_space(1);
        assert_eq!(space.size(), Some(8));
        for id in 0..8 {
            let inst = fam.instance_by_id(1, id).unwrap();
            let m = inst.matrix();
            for (l, plan) in inst.decode_plan.as_ref().unwrap().iter().enumerate() {
                assert_eq!(m.left_mul(plan).unwrap(), inst.layout().unit(SymbolRef::msg(1, l + 1)));
            }
        }
    }
}
